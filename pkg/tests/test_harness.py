import csv
import math

import pytest

from brcsmud import cli
from brcsmud.harness import (
    ROC_HEADER,
    SWEEP_HEADER,
    ConfigError,
    ExperimentConfig,
    emit_roc,
    load_config,
    oracle_equivalence,
    run_point,
    run_sweep,
)

SMALL = dict(num_nodes=6, channel_taps=2, spreading_gain_list=(3,), trials_per_point=5, base_seed=17)


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def write_config(path, **items):
    path.write_text("".join(f"{k} = {v}\n" for k, v in items.items()))
    return path


class TestConfig:
    def test_defaults_mirror_paper_setup(self):
        c = ExperimentConfig()
        assert (c.num_nodes, c.channel_taps, c.activity_prob, c.omega_list) == (20, 4, 0.2, (1.0,))
        assert c.alphabet.data_symbols == (-1.0, 1.0)
        assert c.trials_per_point == 10_000

    def test_load(self, tmp_path):
        p = write_config(
            tmp_path / "exp.cfg",
            num_nodes=8,
            snr_db_list="0, 10,20",
            omega_list="0.1,1",
            detectors="brcsmud",
            alphabet="-1,1",
        )
        c = load_config(p, {"trials_per_point": "3"})
        assert c.num_nodes == 8 and c.snr_db_list == (0.0, 10.0, 20.0)
        assert c.omega_list == (0.1, 1.0) and c.detectors == ("brcsmud",) and c.trials_per_point == 3

    def test_comments_and_blank_lines(self, tmp_path):
        p = tmp_path / "c.cfg"
        p.write_text("# header\n\nnum_nodes = 5  # users\n")
        assert load_config(p).num_nodes == 5

    @pytest.mark.parametrize("text", ["bogus = 1\n", "num_nodes = x\n", "no equals sign\n", "detectors = omp\n", "omega_list =\n", "activity_prob = 1.5\n"])
    def test_bad_config(self, tmp_path, text):
        p = tmp_path / "bad.cfg"
        p.write_text(text)
        with pytest.raises(ConfigError):
            load_config(p)


def test_run_point_deterministic():
    cfg = ExperimentConfig(**{**SMALL, "trials_per_point": 1})
    a = run_point(cfg, 10.0, 1.0, 3, "brcsmud")
    b = run_point(cfg, 10.0, 1.0, 3, "brcsmud")
    assert a == b


def test_noise_free_overdetermined_is_exact():
    cfg = ExperimentConfig(num_nodes=4, channel_taps=4, trials_per_point=50)
    p = run_point(cfg, math.inf, 1.0, 2, "brcsmud")  # M = 5 >= K = 4
    assert p.gse == 0.0


def test_paired_frames_across_detectors_and_omega():
    cfg = ExperimentConfig(**SMALL)
    digests = {}
    for det in ("brcsmud", "bpdn"):
        for omega in (0.1, 10.0):
            d = []
            run_point(cfg, 5.0, omega, 3, det, digests=d)
            digests[det, omega] = d
    assert len({tuple(v) for v in digests.values()}) == 1
    other = []
    run_point(cfg, 6.0, 0.1, 3, "bpdn", digests=other)
    assert other != digests["bpdn", 0.1]


def test_brcsmud_beats_bpdn_high_snr():
    cfg = ExperimentConfig(num_nodes=8, channel_taps=4, activity_prob=0.2, trials_per_point=2000, base_seed=5)
    ours = run_point(cfg, 40.0, 1.0, 4, "brcsmud")
    theirs = run_point(cfg, 40.0, 1.0, 4, "bpdn")
    assert ours.gse < theirs.gse
    assert theirs.mean_nodes_visited is None and ours.mean_nodes_visited > 0


def test_sweep_single_cell(tmp_path):
    cfg = ExperimentConfig(**{**SMALL, "trials_per_point": 1, "snr_db_list": (10.0,), "detectors": ("brcsmud",)})
    out = run_sweep(cfg, tmp_path / "s.csv")
    lines = out.read_text().splitlines()
    assert lines[0] == ",".join(SWEEP_HEADER)
    assert len(lines) == 2


def test_sweep_ordering_and_counts(tmp_path):
    cfg = ExperimentConfig(**{**SMALL, "snr_db_list": (20.0, 0.0, 10.0), "detectors": ("brcsmud", "bpdn")})
    rows = read_rows(run_sweep(cfg, tmp_path / "s.csv"))
    assert len(rows) == 6
    keys = [(r["detector"], int(r["n"]), float(r["omega"]), float(r["snr_db"])) for r in rows]
    assert keys == sorted(keys)
    for r in rows:
        cells = sum(int(r[c]) for c in ("true_active", "false_active", "false_inactive", "true_inactive"))
        assert cells == 6 * int(r["trials"])
        assert r["mean_nodes_visited"] == "" if r["detector"] == "bpdn" else float(r["mean_nodes_visited"]) > 0


def test_row_count_law(tmp_path):
    cfg = ExperimentConfig(**{**SMALL, "trials_per_point": 2, "snr_db_list": (0.0, 30.0), "omega_list": (0.1, 1.0, 10.0), "spreading_gain_list": (2, 3)})
    rows = read_rows(run_sweep(cfg, tmp_path / "s.csv"))
    assert len(rows) == 2 * 2 * 3 * 2


def _write_sweep(path, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_HEADER)
        for det, omega, snr, tar, far in rows:
            w.writerow([det, 5, omega, snr, 10, 0, tar, far, 0, 0, 0, 0, ""])


def test_emit_roc_orders_by_snr(tmp_path):
    src = tmp_path / "sweep.csv"
    _write_sweep(src, [("brcsmud", 1, 10, 0.9, 0.1), ("brcsmud", 1, 5, 0.5, 0.2), ("bpdn", 1, 5, 0.1, 0.1)])
    assert emit_roc(src, tmp_path / "roc.csv") == 0
    rows = read_rows(tmp_path / "roc.csv")
    assert list(rows[0]) == ROC_HEADER
    assert [r["snr_db"] for r in rows] == ["5", "10"]


def test_emit_roc_perfect_end_point(tmp_path):
    src = tmp_path / "sweep.csv"
    _write_sweep(src, [("brcsmud", w, s, 1, 0) for w in (0.1, 10) for s in (30, 40)])
    emit_roc(src, tmp_path / "roc.csv")
    rows = read_rows(tmp_path / "roc.csv")
    for omega in ("0.1", "10"):
        last = [r for r in rows if r["omega"] == omega][-1]
        assert (float(last["far"]), float(last["tar"])) == (0.0, 1.0)


def test_emit_roc_drops_missing(tmp_path):
    src = tmp_path / "sweep.csv"
    _write_sweep(src, [("brcsmud", 1, 5, "", 0.1), ("brcsmud", 1, 10, 0.9, 0.0)])
    assert emit_roc(src, tmp_path / "roc.csv") == 1
    assert len(read_rows(tmp_path / "roc.csv")) == 1


def test_oracle_equivalence_helper():
    assert oracle_equivalence(50, seed=3) == []


class TestCli:
    def test_run_and_roc(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "e.cfg", num_nodes=5, channel_taps=2, spreading_gain_list=3, trials_per_point=3, snr_db_list="0,20")
        out = tmp_path / "sweep.csv"
        assert cli.main(["run", "--config", str(cfg), "--out", str(out), "--omega", "0.1,10", "--detectors", "brcsmud"]) == 0
        assert len(read_rows(out)) == 4
        assert cli.main(["roc", "--in", str(out), "--out", str(tmp_path / "roc.csv")]) == 0
        assert len(read_rows(tmp_path / "roc.csv")) == 4

    def test_overrides(self, tmp_path):
        cfg = write_config(tmp_path / "e.cfg", num_nodes=4, channel_taps=2, trials_per_point=50, snr_db_list=10, spreading_gain_list=5)
        out = tmp_path / "o.csv"
        assert cli.main(["run", "--config", str(cfg), "--out", str(out), "--trials", "2", "--snr", "3", "--gain", "2", "--seed", "9"]) == 0
        rows = read_rows(out)
        assert {r["trials"] for r in rows} == {"2"} and {r["snr_db"] for r in rows} == {"3"} and {r["n"] for r in rows} == {"2"}

    def test_exit_codes(self, tmp_path):
        bad = tmp_path / "bad.cfg"
        bad.write_text("unknown_key = 3\n")
        assert cli.main(["run", "--config", str(bad)]) == cli.EXIT_CONFIG
        assert cli.main(["run", "--config", str(tmp_path / "missing.cfg")]) == cli.EXIT_IO
        good = write_config(tmp_path / "g.cfg", trials_per_point=1)
        assert cli.main(["run", "--config", str(good), "--out", str(tmp_path / "no" / "such" / "dir.csv")]) == cli.EXIT_IO
        with pytest.raises(SystemExit) as exc:
            cli.main(["run"])
        assert exc.value.code == cli.EXIT_CONFIG

    def test_selftest(self, capsys):
        assert cli.main(["selftest", "--instances", "40"]) == 0
        assert "40/40" in capsys.readouterr().out

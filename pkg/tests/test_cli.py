import csv

import numpy as np
import pytest

from specmatch import spectral
from specmatch.cli import main
from specmatch.config import parse_config, parse_text
from specmatch.errors import ValidationError
from specmatch.features import FeatureSet

FAST = ["--distill.iterations", "30", "--distill.verify_bank_size", "2000",
        "--distill.bank_size", "64", "--data.base", "40"]


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


# -- config ----------------------------------------------------------------------

def test_empty_file_gives_defaults(tmp_path):
    p = tmp_path / "empty.cfg"
    p.write_text("")
    cfg = parse_config(p)
    assert cfg.kernel.gamma == 2.0
    assert cfg.distill.bank_size == 1024
    assert cfg.distill.policy.alpha_head == 0.8
    assert cfg.distill.policy.alpha_tail == 0.2
    assert cfg.data.beta == 100.0


def test_negative_gamma_rejected():
    with pytest.raises(ValidationError):
        parse_config(overrides={"kernel.gamma": "-1"})


def test_flag_overrides_file(tmp_path):
    p = tmp_path / "a.cfg"
    p.write_text("data.beta=10\ndata.classes=4\n")
    cfg = parse_config(p, [("beta", "200")])
    assert cfg.data.beta == 200.0
    assert cfg.data.num_classes == 4


def test_unknown_key_named():
    with pytest.raises(ValidationError, match="data.colour"):
        parse_text("data.beta=3\ndata.colour=red\n")


def test_type_mismatch_has_line_number():
    with pytest.raises(ValidationError, match=r"x\.cfg:3"):
        parse_text("# comment\ndata.beta=3\ndistill.ipc=ten\n", "x.cfg")


def test_missing_equals_rejected():
    with pytest.raises(ValidationError, match=":1"):
        parse_text("distill.ipc 10\n")


def test_means_syntax():
    cfg = parse_config(overrides={"data.classes": "2", "data.beta": "2",
                                  "data.means": "0,0;1,1|3,0"})
    assert len(cfg.data.means[0]) == 2 and len(cfg.data.means[1]) == 1
    np.testing.assert_array_equal(cfg.data.means[1][0], [3.0, 0.0])


def test_means_class_count_mismatch():
    with pytest.raises(ValidationError):
        parse_config(overrides={"data.classes": "3", "data.means": "0,0|1,1"})


def test_missing_config_file(tmp_path):
    with pytest.raises(ValidationError):
        parse_config(tmp_path / "nope.cfg")


# -- distill ---------------------------------------------------------------------

def test_distill_writes_outputs(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["distill", "--out", str(out), *FAST]) == 0
    for name in ("trace.csv", "final_report.csv", "synthetic.csv"):
        assert (out / name).exists()
    trace = read_csv(out / "trace.csv")
    assert trace[0] == ["iteration", "objective"] + [f"per_class_{c}" for c in range(5)]
    report = read_csv(out / "final_report.csv")
    assert report[0] == ["class", "count_real", "ipc", "alpha", "d_c", "diversity", "realism"]
    assert [r[1] for r in report[1:]] == ["40", "13", "4", "1", "1"]
    syn = FeatureSet.load(out / "synthetic.csv")
    assert syn.class_counts.tolist() == [10] * 5


def test_distill_diagnostics(tmp_path):
    out = tmp_path / "run"
    assert main(["distill", "--out", str(out), "--diagnostics", *FAST]) == 0
    freq = read_csv(out / "per_frequency.csv")
    assert freq[0] == ["freq_index", "amp_term", "cross_term", "sq_diff"]
    assert len(freq) == 2001
    a, x, s = map(float, freq[1][1:])
    assert abs(a + x - s) <= 1e-12
    assert read_csv(out / "per_class.csv")[0] == ["class", "count", "alpha", "d_c"]


def test_distill_seed_reruns_are_byte_identical(tmp_path):
    for name in ("a", "b"):
        assert main(["distill", "--seed", "7", "--out", str(tmp_path / name), *FAST]) == 0
    for f in ("trace.csv", "final_report.csv", "synthetic.csv"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
    assert main(["distill", "--seed", "8", "--out", str(tmp_path / "c"), *FAST]) == 0
    assert (tmp_path / "a" / "trace.csv").read_bytes() != (tmp_path / "c" / "trace.csv").read_bytes()


def test_freeze_bank_flag(tmp_path):
    assert main(["distill", "--freeze-bank", "--bank-size", "32", "--out", str(tmp_path), *FAST[:4]]) == 0


def test_unwritable_output_dir(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["distill", "--out", str(blocker / "sub"), *FAST]) != 0
    assert "error" in capsys.readouterr().err


def test_validation_exit_code(tmp_path, capsys):
    assert main(["distill", "--out", str(tmp_path), "--kernel.gamma", "-1"]) == 1
    assert main(["distill", "--out", str(tmp_path), "--no.such_key", "1"]) == 1
    assert "no.such_key" in capsys.readouterr().err
    assert main(["frobnicate"]) == 1


def test_gen_data(tmp_path):
    assert main(["gen-data", "--out", str(tmp_path), "--beta", "10", "--seed", "3"]) == 0
    a = FeatureSet.load(tmp_path / "real.csv")
    b = FeatureSet.load(tmp_path / "real.sdmx")
    assert a == b
    assert a.class_counts.tolist() == [200, 112, 63, 36, 20]


# -- verify ------------------------------------------------------------------------

SMALL_VERIFY = ["--verify.bank_size", "5000", "--verify.pairs", "20", "--verify.cf_pairs", "200",
                "--verify.cumulant_samples", "10000", "--verify.grad_instances", "10"]


def test_verify_passes(capsys):
    assert main(["verify", *SMALL_VERIFY]) == 0
    out = capsys.readouterr().out
    for name in ("bochner_equivalence", "decomposition_identity", "cfd_sandwich",
                 "moment_expansion", "logcf_cumulants", "gradient_fd"):
        assert name in out
    assert "FAIL" not in out


def test_verify_catches_cross_term_sign_flip(monkeypatch, capsys):
    good = spectral.amp_phase_decompose

    def flipped(phi_T, phi_S):
        amp, cross = good(phi_T, phi_S)
        return amp, -cross

    monkeypatch.setattr(spectral, "amp_phase_decompose", flipped)
    assert main(["verify", *SMALL_VERIFY]) == 3
    captured = capsys.readouterr()
    assert "decomposition_identity" in captured.err
    assert "measured" in captured.err


def _bochner_tolerance(out):
    line = next(ln for ln in out.splitlines() if ln.startswith("bochner_equivalence"))
    return float(line.split()[3])


def test_verify_bochner_tolerance_scales_with_bank_size(capsys):
    tols = {}
    for L in (100, 10000):
        main(["verify", "--bank-size", str(L), *SMALL_VERIFY[2:]])
        tols[L] = _bochner_tolerance(capsys.readouterr().out)
    assert tols[100] / tols[10000] == pytest.approx(10.0, rel=0.3)


# -- bench -------------------------------------------------------------------------

def test_bench_rows(tmp_path):
    code = main(["bench", "--out", str(tmp_path), "--bench.sizes", "64,128",
                 "--bench.dim", "4", "--bench.bank_size", "32", "--bench.repeats", "1"])
    assert code == 0
    rows = read_csv(tmp_path / "bench.csv")
    assert rows[0] == ["method", "N", "seconds", "ratio_vs_prev"]
    assert [(r[0], r[1]) for r in rows[1:]] == [
        ("sdd", "64"), ("sdd", "128"), ("mmd_gram", "64"), ("mmd_gram", "128")]
    assert rows[1][3] == "" and float(rows[2][3]) > 0


@pytest.mark.slow
def test_bench_default_has_eight_rows(tmp_path):
    assert main(["bench", "--out", str(tmp_path), "--bench.repeats", "1"]) == 0
    assert len(read_csv(tmp_path / "bench.csv")) == 9

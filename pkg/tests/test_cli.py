import json
import subprocess
import sys

import numpy as np
import pytest

from lrmm.cli import io
from lrmm.cli.bench import cells, rows_to_csv, run_bench, thread_count, trial_seed
from lrmm.cli.config import build_config, load_config
from lrmm.cli.main import main
from lrmm.cli.methods import parse_method
from lrmm.tensor_core import Tensor3

from oracles import brute_force_hamming


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, (json.loads(out) if code == 0 and out.strip().startswith("{") else out)


# --- file formats -----------------------------------------------------------------


@pytest.mark.parametrize("fmt", io.FORMATS)
def test_tensor_round_trip_is_bit_exact(tmp_path, rng, fmt):
    x = Tensor3.from_slices(rng.standard_normal((4, 3, 5)) * 10.0 ** rng.integers(-300, 300, (4, 3, 5)))
    path = tmp_path / ("t.t3d1" if fmt == "t3d1" else "t_csv")
    io.write_tensor(path, x, fmt)
    y = io.read_tensor(path)
    assert y.dims == x.dims
    assert y.slices.tobytes() == x.slices.tobytes()


def test_t3d1_layout(tmp_path):
    x = Tensor3.from_slices(np.arange(12, dtype=float).reshape(2, 3, 2))
    io.write_t3d1(tmp_path / "a", x)
    raw = (tmp_path / "a").read_bytes()
    assert raw[:4] == b"T3D1"
    assert np.frombuffer(raw[4:28], "<u8").tolist() == [3, 2, 2]
    np.testing.assert_array_equal(np.frombuffer(raw[28:], "<f8"), np.arange(12.0))


def test_corrupt_files(tmp_path):
    (tmp_path / "bad").write_bytes(b"XXXX" + bytes(24))
    with pytest.raises(io.FormatError):
        io.read_tensor(tmp_path / "bad")
    x = Tensor3.from_slices(np.zeros((2, 2, 2)))
    io.write_t3d1(tmp_path / "short", x)
    (tmp_path / "short").write_bytes((tmp_path / "short").read_bytes()[:-8])
    with pytest.raises(io.FormatError):
        io.read_tensor(tmp_path / "short")
    (tmp_path / "empty_dir").mkdir()
    with pytest.raises(io.FormatError):
        io.read_tensor(tmp_path / "empty_dir")


def test_label_round_trip(tmp_path):
    lab = np.array([0, 2, 1, 1, 0])
    io.write_labels(tmp_path / "l.csv", lab)
    assert (tmp_path / "l.csv").read_text() == "label\n1\n3\n2\n2\n1\n"
    np.testing.assert_array_equal(io.read_labels(tmp_path / "l.csv"), lab)
    (tmp_path / "z.csv").write_text("label\n0\n1\n")
    with pytest.raises(io.FormatError):
        io.read_labels(tmp_path / "z.csv")


# --- config ----------------------------------------------------------------------


def test_flag_beats_file_beats_preset(tmp_path):
    (tmp_path / "c.json").write_text(json.dumps({"setting": "s2_2", "trials": 7, "lam": 2.0}))
    cfg = load_config(tmp_path / "c.json", {"trials": 3, "lam": None})
    assert cfg.trials == 3 and cfg.lam == 2.0 and cfg.d1 == 100
    assert build_config({"setting": "s2_2"}).lam == [2.7, 3.0, 3.3]


def test_config_errors():
    with pytest.raises(ValueError):
        build_config({"bogus": 1})
    with pytest.raises(ValueError):
        build_config({"trials": 0})
    with pytest.raises(ValueError):
        build_config({"roster": []})
    with pytest.raises(ValueError):
        build_config({"setting": "nope"})


def test_method_names():
    assert parse_method("lr_lloyd+ts_init") == ("lr_lloyd", "ts_init")
    assert parse_method("vec_lloyd") == ("vec_lloyd", "spectral_m3")
    assert parse_method("kmeans_m3") == (None, "kmeans_m3")
    with pytest.raises(ValueError):
        parse_method("lr_lloyd+nothing")


# --- generate / cluster / evaluate ---------------------------------------------------


def test_generate_records_separation(tmp_path, capsys):
    code, meta = run(capsys, "generate", "--setting", "s1_1", "--lam", "2.5", "--seed", "3",
                     "--out", tmp_path / "d.t3d1")
    assert code == 0
    assert abs(meta["delta"] / 5.45 - 1) <= 0.10
    assert json.loads((tmp_path / "d.t3d1.meta.json").read_text()) == meta
    assert io.read_tensor(tmp_path / "d.t3d1").dims == (50, 50, 200)
    assert io.read_labels(tmp_path / "d.t3d1.labels.csv").size == 200


@pytest.mark.parametrize("fmt", io.FORMATS)
def test_cluster_noiseless_from_truth(tmp_path, capsys, fmt):
    out = tmp_path / "d"
    run(capsys, "generate", "--setting", "s2_1", "--delta-param", "5", "--noise-sd", "0", "--n", "40",
        "--d1", "12", "--d2", "10", "--format", fmt, "--out", out)
    truth = tmp_path / "d.labels.csv"
    code, summary = run(capsys, "cluster", out, "--method", "lr_lloyd+truth", "--ranks", "3,3",
                        "--truth", truth, "--out", tmp_path / "est.csv")
    assert code == 0
    assert summary["error"] == 0.0 and summary["error_per_iter"] == [0.0]
    np.testing.assert_array_equal(io.read_labels(tmp_path / "est.csv"), io.read_labels(truth))


def test_cluster_vec_lloyd_and_init_file(tmp_path, capsys):
    x = Tensor3.from_slices(np.array([[[0.0]], [[0.2]], [[5.0]], [[5.2]]]))
    io.write_tensor(tmp_path / "x", x)
    io.write_labels(tmp_path / "init.csv", [0, 1, 1, 1])
    code, summary = run(capsys, "cluster", tmp_path / "x", "--method", "vec_lloyd", "--init", tmp_path / "init.csv",
                        "--out", tmp_path / "o.csv")
    assert code == 0 and summary["method"] == "vec_lloyd+file"
    np.testing.assert_array_equal(io.read_labels(tmp_path / "o.csv"), [0, 0, 1, 1])


def test_missing_tensor_fails(tmp_path, capsys):
    code = main(["cluster", str(tmp_path / "nope.t3d1")])
    captured = capsys.readouterr()
    assert code != 0 and captured.out == ""


def test_missing_file_exit_code_and_stderr(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "lrmm.cli.main", "ranks", str(tmp_path / "nope")],
                          capture_output=True, text=True)
    assert proc.returncode != 0
    assert proc.stdout == "" and "nope" in proc.stderr


def test_evaluate(tmp_path, capsys, rng):
    io.write_labels(tmp_path / "a", [0, 1, 1, 0, 1])
    io.write_labels(tmp_path / "b", [1, 0, 0, 1, 0])
    assert run(capsys, "evaluate", tmp_path / "a", tmp_path / "a")[1]["rate"] == 0.0
    res = run(capsys, "evaluate", tmp_path / "a", tmp_path / "b")[1]
    assert res["rate"] == 0.0 and res["permutation"] == [2, 1]
    for _ in range(5):
        a, b = rng.integers(0, 4, 30), rng.integers(0, 4, 30)
        io.write_labels(tmp_path / "a", a)
        io.write_labels(tmp_path / "b", b)
        res = run(capsys, "evaluate", tmp_path / "a", tmp_path / "b", "--K", "4")[1]
        assert res["hamming"] == brute_force_hamming(a, b, 4)
        assert sorted(res["permutation"]) == [1, 2, 3, 4]


def test_ranks_and_lrtest(tmp_path, capsys):
    run(capsys, "generate", "--setting", "s2_1", "--delta-param", "10", "--noise-sd", "0", "--out", tmp_path / "d")
    code, rep = run(capsys, "ranks", tmp_path / "d", "--rmax", "10", "--kmax", "5", "--out", tmp_path / "s.json")
    assert code == 0 and (rep["r_u"], rep["r_v"], rep["K"], rep["ranks"]) == (3, 3, 2, [3, 3])
    full = json.loads((tmp_path / "s.json").read_text())
    assert len(full["init_labels"]) == 200 and "mode1" in " ".join(full["spectra"])
    code, rep = run(capsys, "lrtest", tmp_path / "d", "--epsilon", "0.5", "--alpha", "0.05")
    assert code == 0 and rep["decision"] == "reject"


# --- bench -----------------------------------------------------------------------


@pytest.mark.parametrize(
    "setting, extra",
    [
        ("s2_1", ["--delta-param", "5", "--method", "lr_lloyd+ts_init,vec_lloyd+spectral_m3"]),
        ("s2_2", ["--lam", "2", "--method", "rlr_lloyd+rts_init,vec_lloyd+spectral_m3"]),
    ],
)
def test_bench_noiseless_single_trial(capsys, setting, extra):
    code, out = run(capsys, "bench", "--setting", setting, "--trials", "1", "--noise-sd", "0", "--d1", "20",
                    "--d2", "20", "--n", "40", "--threads", "1", *extra)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].split(",")[:3] == ["setting", "d1", "d2"]
    assert len(lines) == 3
    assert all(float(line.split(",")[11]) == 0.0 for line in lines[1:])


def test_bench_csv_independent_of_threads(tmp_path, capsys, monkeypatch):
    args = ["bench", "--setting", "s2_2", "--d1", "15", "--d2", "15", "--n", "40", "--lam", "1.5,2.5",
            "--trials", "6", "--seed", "11"]
    outputs = []
    for k in ("1", "3"):
        monkeypatch.setenv("LRMM_THREADS", k)
        assert main(args + ["--out", str(tmp_path / f"b{k}.csv")]) == 0
        outputs.append((tmp_path / f"b{k}.csv").read_bytes())
    capsys.readouterr()
    assert outputs[0] == outputs[1]
    side = json.loads((tmp_path / "b1.json").read_text())
    assert len(side["rows"]) == 8 and all(len(r["errors"]) == 6 for r in side["rows"])


def test_bench_helpers():
    assert thread_count("2") == 2 and thread_count("0") >= 1
    with pytest.raises(ValueError):
        thread_count("-1")
    assert trial_seed(1, 2) == trial_seed(1, 2) != trial_seed(1, 3)
    cfg = build_config({"setting": "s2_1"})
    assert [c["delta_param"] for c in cells(cfg)] == [1.0, 5.0, 10.0]


def test_bench_rows_are_valid():
    cfg = build_config({"setting": "s2_2", "d1": 10, "d2": 10, "n": 30, "lam": 2.0, "trials": 3})
    rows = run_bench(cfg, threads=1)
    for r in rows:
        assert 0 <= r.mean_error <= 1 and r.se >= 0 and all(0 <= e <= 1 for e in r.errors)
    assert rows_to_csv(rows) == rows_to_csv(run_bench(cfg, threads=2))

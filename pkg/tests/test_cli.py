import json
import subprocess
import sys

import numpy as np
import pytest

from ldsforge.cli import main
from ldsforge.codebook import builtin_s2, expand, load, qpsk
from ldsforge.errors import ValidationError
from ldsforge.parallel import resolve_workers

SMALL_GRAPH = {"K": 2, "J": 3, "d_v": 2, "d_c": 3,
               "incidence": [[1, 1, 1], [1, 1, 1]]}


@pytest.fixture
def small_lds(tmp_path):
    """A 2x3 signature set built by the search CLI; cheap to analyze."""
    graph = tmp_path / "graph.json"
    graph.write_text(json.dumps(SMALL_GRAPH))
    out = tmp_path / "small.json"
    rc = main(["construct", "--graph", str(graph), "--rings-sq", "1,3,4",
               "--budget", "4", "--seed", "5", "--out", str(out)])
    assert rc == 0
    return out


def test_version_flag():
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0


def test_unknown_command_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_rings_lists_first_shells(capsys):
    assert main(["rings", "--max-radius-sq", "7"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["max_radius_sq"] == 7
    assert [r["radius_sq"] for r in doc["rings"]] == [1, 3, 4, 7]
    assert [r["count"] for r in doc["rings"]] == [6, 6, 6, 12]
    first = doc["rings"][0]
    assert first["radius"] == 1.0
    unit = {(p["a"], p["b"]) for p in first["points"]}
    assert unit == {(1, 0), (0, 1), (1, 1), (-1, 0), (0, -1), (-1, -1)}
    for p in first["points"]:
        assert p["re"] ** 2 + p["im"] ** 2 == pytest.approx(1.0, abs=1e-12)


def test_rings_rejects_nonpositive_radius():
    assert main(["rings", "--max-radius-sq", "0"]) == 1


def test_builtin_roundtrip_and_force(tmp_path, capsys):
    out = tmp_path / "s2.json"
    assert main(["builtin", "s2", "--out", str(out)]) == 0
    assert np.array_equal(load(out).entries, builtin_s2().entries)
    # refuses to clobber without --force
    assert main(["builtin", "s2", "--out", str(out)]) == 1
    assert main(["builtin", "s2", "--out", str(out), "--force"]) == 0
    assert main(["builtin", "s3", "--out", str(tmp_path / "x.json")]) == 1


def test_analyze_lds_stdout(tmp_path, capsys):
    out = tmp_path / "s2.json"
    main(["builtin", "s2", "--out", str(out)])
    capsys.readouterr()
    assert main(["analyze", "--lds", str(out)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["mpds"] == 0.009094884353730064
    assert doc["diversity_order"] == 1
    assert doc["kissing_number"] == 32
    assert doc["injective"] is True
    assert doc["power_balanced"] is True
    assert doc["violations"] == []
    assert np.allclose(doc["energy_distribution"], [2.0] * 6, atol=1e-12)


def write_codebooks(books, path):
    doc = {
        "K": books.K, "J": books.J, "M": books.M,
        "books": [[[[z.real, z.imag] for z in row] for row in b]
                  for b in books.books],
        "labels": list(books.labels),
    }
    path.write_text(json.dumps(doc))


def test_analyze_codebooks_file(tmp_path, capsys):
    path = tmp_path / "books.json"
    write_codebooks(expand(builtin_s2(), qpsk()), path)
    capsys.readouterr()
    assert main(["analyze", "--codebooks", str(path)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["mpds"] == 0.009094884353730064
    assert "power_balanced" not in doc
    assert np.allclose(doc["energy_distribution"], [2.0] * 6, atol=1e-12)


def test_analyze_flag_exclusivity(tmp_path):
    out = tmp_path / "s2.json"
    main(["builtin", "s2", "--out", str(out)])
    assert main(["analyze"]) == 1
    assert main(["analyze", "--lds", str(out), "--codebooks", str(out)]) == 1
    assert main(["analyze", "--lds", str(out), "--constellation", "8psk"]) == 1
    # wrong file kind for the flag
    books = tmp_path / "books.json"
    write_codebooks(expand(builtin_s2(), qpsk()), books)
    assert main(["analyze", "--lds", str(books)]) == 1
    assert main(["analyze", "--codebooks", str(out)]) == 1


def test_construct_outputs(tmp_path, small_lds):
    s = load(small_lds)
    assert s.frobenius_sq() == pytest.approx(6.0, abs=1e-9)
    trace = small_lds.with_suffix(".trace.csv").read_text().splitlines()
    assert trace[0] == "candidate,mpds"
    assert trace[1:] == ["0,0.15072142074250666", "1,0.2314927866825588",
                         "2,0.3014428414850129"]
    # output files are guarded, jointly with the trace sidecar
    rc = main(["construct", "--graph", "paper", "--rings-sq", "1,3,7",
               "--budget", "1", "--seed", "0", "--out", str(small_lds)])
    assert rc == 1


def test_construct_input_validation(tmp_path):
    out = tmp_path / "c.json"
    bad_graph = tmp_path / "bad.json"
    args = ["construct", "--rings-sq", "1,3,7", "--budget", "1",
            "--seed", "0", "--out", str(out)]
    assert main(args[:1] + ["--graph", str(tmp_path / "none.json")] + args[1:]) == 1
    bad_graph.write_text("{not json")
    assert main(args[:1] + ["--graph", str(bad_graph)] + args[1:]) == 1
    bad_graph.write_text(json.dumps({"K": 2, "J": 3}))
    assert main(args[:1] + ["--graph", str(bad_graph)] + args[1:]) == 1
    degenerate = dict(SMALL_GRAPH, incidence=[[1, 1, 1], [1, 1, 0]])
    bad_graph.write_text(json.dumps(degenerate))
    assert main(args[:1] + ["--graph", str(bad_graph)] + args[1:]) == 1
    assert main(["construct", "--rings-sq", "1,x", "--budget", "1",
                 "--seed", "0", "--out", str(out)]) == 1


def test_bound_curve(tmp_path, small_lds):
    out = tmp_path / "bound.csv"
    rc = main(["bound", "--lds", str(small_lds), "--ebno", "0:8:4",
               "--out", str(out)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "ebno_db,bound"
    rows = [line.split(",") for line in lines[1:]]
    assert [float(r[0]) for r in rows] == [0.0, 4.0, 8.0]
    values = [float(r[1]) for r in rows]
    assert values[0] > values[1] > values[2] > 0


def test_bound_grid_validation(tmp_path, small_lds):
    out = tmp_path / "bound.csv"
    for grid in ("0:8", "8:0:2", "0:8:-2", "a:b:c"):
        assert main(["bound", "--lds", str(small_lds), "--ebno", grid,
                     "--out", str(out)]) == 1


def test_simulate_csv_sidecar_and_workers(tmp_path, small_lds):
    def run(name, workers):
        out = tmp_path / name
        rc = main(["simulate", "--lds", str(small_lds), "--channel", "awgn",
                   "--ebno", "4:4:1", "--iters", "2", "--min-errors", "5",
                   "--max-blocks", "4096", "--seed", "3",
                   "--workers", str(workers), "--out", str(out)])
        assert rc == 0
        return out

    a = run("a.csv", 1)
    b = run("b.csv", 8)
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    assert lines[0] == "ebno_db,blocks,bits,bit_errors,ber,ci95"
    assert len(lines) == 2
    sidecar = json.loads(a.with_suffix(".config.json").read_text())
    assert sidecar == {
        "command": "simulate",
        "lds": str(small_lds),
        "constellation": "qpsk",
        "channel": "awgn",
        "ebno_grid_db": [4.0],
        "mpa_iters": 2,
        "min_errors": 5,
        "max_blocks": 4096,
        "seed": 3,
    }


def test_simulate_rejects_unknown_channel(tmp_path, small_lds):
    assert main(["simulate", "--lds", str(small_lds), "--channel", "rician",
                 "--ebno", "0:0:1", "--seed", "1",
                 "--out", str(tmp_path / "x.csv")]) == 1


def test_detect_inline_and_referenced(tmp_path, small_lds, capsys):
    lds_doc = json.loads(small_lds.read_text())
    problem = {
        "lds": lds_doc,
        "y": [[0.1, -0.2], [0.3, 0.0]],
        "h": [[1.0, 0.0], [1.0, 0.0]],
        "N0": 0.5,
    }
    path = tmp_path / "problem.json"
    path.write_text(json.dumps(problem))
    capsys.readouterr()
    assert main(["detect", "--problem", str(path), "--iters", "4"]) == 0
    doc = json.loads(capsys.readouterr().out)
    probs = np.array(doc["probabilities"])
    assert probs.shape == (3, 4)
    assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-9)
    assert len(doc["symbols"]) == 3
    assert len(doc["bits"]) == 6
    assert all(b in (0, 1) for b in doc["bits"])

    problem["lds"] = str(small_lds)
    path.write_text(json.dumps(problem))
    out = tmp_path / "post.json"
    assert main(["detect", "--problem", str(path), "--out", str(out)]) == 0
    saved = json.loads(out.read_text())
    assert set(saved) == {"probabilities", "symbols", "bits"}
    assert saved["symbols"] == doc["symbols"]


def test_detect_problem_validation(tmp_path, small_lds):
    lds_doc = json.loads(small_lds.read_text())
    base = {"lds": lds_doc, "y": [[0.0, 0.0], [0.0, 0.0]],
            "h": [[1.0, 0.0], [1.0, 0.0]], "N0": 0.5}
    path = tmp_path / "p.json"

    assert main(["detect", "--problem", str(tmp_path / "missing.json")]) == 1
    path.write_text("{oops")
    assert main(["detect", "--problem", str(path)]) == 1
    doc = dict(base)
    del doc["y"]
    path.write_text(json.dumps(doc))
    assert main(["detect", "--problem", str(path)]) == 1
    doc = dict(base, codebooks="also.json")
    path.write_text(json.dumps(doc))
    assert main(["detect", "--problem", str(path)]) == 1
    doc = dict(base, y=[[0.0, 0.0]])
    path.write_text(json.dumps(doc))
    assert main(["detect", "--problem", str(path)]) == 1
    doc = dict(base, y=[[0.0], [0.0]])
    path.write_text(json.dumps(doc))
    assert main(["detect", "--problem", str(path)]) == 1
    doc = dict(base, N0=0)
    path.write_text(json.dumps(doc))
    assert main(["detect", "--problem", str(path)]) == 1


def test_workers_env_fallback(monkeypatch):
    monkeypatch.delenv("LDSFORGE_WORKERS", raising=False)
    assert resolve_workers(None) == 1
    monkeypatch.setenv("LDSFORGE_WORKERS", "4")
    assert resolve_workers(None) == 4
    assert resolve_workers(2) == 2
    monkeypatch.setenv("LDSFORGE_WORKERS", "many")
    with pytest.raises(ValidationError):
        resolve_workers(None)
    with pytest.raises(ValidationError):
        resolve_workers(0)


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-c",
                           "import sys; from ldsforge.cli import main; "
                           "sys.exit(main(['rings', '--max-radius-sq', '4']))"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    doc = json.loads(proc.stdout)
    assert [r["radius_sq"] for r in doc["rings"]] == [1, 3, 4]

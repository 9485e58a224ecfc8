import csv
import json

import numpy as np
import pytest

from convroof import catalog, io
from convroof.cli import main
from convroof.ensemble import DensityMatrix
from convroof.errors import InvalidInputError


@pytest.fixture
def bell_file(tmp_path):
    mat = np.zeros((4, 4), dtype=complex)
    for a in (0, 3):
        for b in (0, 3):
            mat[a, b] = 0.5
    path = tmp_path / "bell.json"
    io.save_state(DensityMatrix(mat, factors=(2, 2)), path)
    return path


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_state_roundtrip_lossless(tmp_path):
    rho = catalog.haar_random_state((2, 2), rank=3, seed=1)
    path = tmp_path / "state.json"
    io.save_state(rho, path)
    loaded = io.load_state(path)
    assert np.array_equal(loaded.matrix, rho.matrix)  # bit-for-bit
    assert loaded.factors == rho.factors
    io.save_state(loaded, tmp_path / "state2.json")
    assert (tmp_path / "state.json").read_text() == (tmp_path / "state2.json").read_text()


def test_hermitian_and_channel_roundtrip(tmp_path):
    h = catalog.random_hermitian(3, 2)
    io.save_hermitian(h, tmp_path / "h.json")
    assert np.array_equal(io.load_hermitian(tmp_path / "h.json"), h)
    ch = catalog.depolarizing_channel(2, 0.5)
    io.save_channel(ch, tmp_path / "ch.json")
    loaded = io.load_channel(tmp_path / "ch.json")
    assert len(loaded.kraus) == len(ch.kraus)
    for a, b in zip(loaded.kraus, ch.kraus):
        assert np.array_equal(a, b)


def test_malformed_files(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(InvalidInputError):
        io.load_state(bad)
    bad.write_text(json.dumps({"dim": 2, "matrix": [[1.0, 0.0], [0.0, 1.0]]}))
    with pytest.raises(InvalidInputError):
        io.load_state(bad)


def test_cmd_solve_bell(bell_file, tmp_path, capsys):
    out = tmp_path / "record.json"
    rc = main(
        ["solve", "--measure", "eof", "--state", str(bell_file), "--out", str(out)]
    )
    assert rc == 0
    record = json.loads(out.read_text())
    assert abs(record["result"]["value"] - np.log(2.0)) <= 1e-8
    assert record["result"]["converged"] is True
    assert record["config"]["n"] == 8
    assert record["measure"]["kind"] == "eof"


def test_cmd_solve_deterministic(bell_file, tmp_path):
    outs = []
    for name in ("a.json", "b.json"):
        out = tmp_path / name
        rc = main(
            ["solve", "--measure", "eof", "--state", str(bell_file),
             "--seed", "7", "--out", str(out)]
        )
        assert rc == 0
        outs.append(json.loads(out.read_text())["result"]["value"])
    assert outs[0] == outs[1]  # byte-identical value


def test_cmd_solve_coherence_reference(tmp_path):
    path = tmp_path / "noisy.json"
    io.save_state(catalog.noisy_coherent(2, 0.5), path)
    out = tmp_path / "rec.json"
    rc = main(["solve", "--measure", "coherence", "--state", str(path), "--out", str(out)])
    assert rc == 0
    value = json.loads(out.read_text())["result"]["value"]
    assert abs(value - 0.066987) <= 1e-6


def test_cmd_solve_usage_errors(bell_file, tmp_path, capsys):
    assert main(["solve", "--measure", "eof", "--state", "/nonexistent.json"]) == 1
    # missing bipartition on a state without factors
    path = tmp_path / "bare.json"
    io.save_state(DensityMatrix(np.eye(4) / 4), path)
    assert main(["solve", "--measure", "eof", "--state", str(path)]) == 1
    assert main(["solve", "--measure", "qfi", "--state", str(bell_file)]) == 1
    assert main(["solve", "--measure", "eof", "--state", str(bell_file),
                 "--factors", "3x3"]) == 1
    # argparse-level usage error maps to exit 1
    assert main(["solve", "--measure", "not-a-measure", "--state", str(bell_file)]) == 1
    capsys.readouterr()


def test_cmd_solve_nonconverged_exit_code(tmp_path):
    path = tmp_path / "noisy.json"
    io.save_state(catalog.noisy_coherent(4, 0.5), path)
    rc = main(
        ["solve", "--measure", "coherence", "--state", str(path),
         "--max-iterations", "1", "--restarts", "1"]
    )
    assert rc == 2


def test_cmd_sweep_werner(tmp_path, capsys):
    out = tmp_path / "werner.csv"
    rc = main(
        ["sweep", "werner", "--d", "2", "--alpha-start", "0", "--alpha-stop", "1",
         "--alpha-steps", "3", "--out", str(out)]
    )
    assert rc == 0
    rows = read_rows(out)
    assert rows[0] == ["d", "alpha", "eof", "oracle", "abs_error",
                       "iterations", "converged"]
    assert len(rows) == 4
    # alpha = 0 row: separable, both solver and oracle at zero
    assert float(rows[1][2]) <= 1e-9
    assert float(rows[1][4]) <= 1e-8
    assert out.with_suffix(".png").exists()


def test_cmd_sweep_coherent(tmp_path):
    out = tmp_path / "coherent.csv"
    rc = main(
        ["sweep", "coherent", "--dims", "2", "--p-steps", "3", "--out", str(out),
         "--no-plot"]
    )
    assert rc == 0
    rows = read_rows(out)
    assert len(rows) == 4
    assert not out.with_suffix(".png").exists()
    for row in rows[1:]:
        assert float(row[4]) <= 1e-8


def test_cmd_sweep_bloch_section(tmp_path):
    out = tmp_path / "bloch.csv"
    rc = main(["sweep", "bloch-section", "--plane", "z0", "--grid", "5",
               "--out", str(out)])
    assert rc == 0
    rows = read_rows(out)
    assert rows[0][:6] == ["u", "v", "x", "y", "z", "in_octahedron"]
    assert out.with_suffix(".png").exists()
    for row in rows[1:]:
        inside = row[5] == "True"
        value = float(row[6])
        if inside:
            assert value <= 1e-9


def test_cmd_gradcheck_small(capsys):
    rc = main(
        ["gradcheck", "--measure", "eof", "--d", "4", "--trivialization", "polar",
         "--points", "3", "--seed", "1"]
    )
    assert rc == 0
    assert "ok" in capsys.readouterr().out


def test_cmd_oracle_compare_small(capsys):
    rc = main(["oracle-compare", "--suite", "magic-octahedron", "--trials", "2"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "upper_bound_violations=0" in out
    assert "PASS" in out


def test_cli_version(capsys):
    rc = main(["--version"])
    assert rc == 0

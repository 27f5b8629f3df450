import json

import pytest

from newman_cara import jsonio
from newman_cara.cli import main


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_sparsify_point_mass(tmp_path, capsys):
    src = write(tmp_path, "in.json", {"dimension": 2, "points": [[0.5, -0.25], [1, 1]],
                                       "weights": [{"index": 0, "weight": 1.0}]})
    out = str(tmp_path / "out.json")
    code, stdout, _ = run(["sparsify", src, "--delta", "0.1", "-o", out], capsys)
    assert code == 0
    doc = json.loads(open(out).read())
    assert doc["weights"] == [{"index": 0, "weight": 1.0}]
    assert "distance 0.0000000000000000" in stdout
    assert "support 1" in stdout


def test_sparsify_square_exact(tmp_path, capsys):
    corners = [[0, 0], [1, 0], [0, 1], [1, 1]]
    src = write(tmp_path, "in.json", {"dimension": 2, "points": corners,
                                       "weights": [{"index": i, "weight": 0.25} for i in range(4)]})
    out = str(tmp_path / "out.json")
    code, stdout, _ = run(["sparsify", src, "--exact", "--delta", "0.1", "-o", out], capsys)
    assert code == 0
    doc = json.loads(open(out).read())
    assert len(doc["weights"]) <= 3
    total = sum(e["weight"] for e in doc["weights"])
    assert abs(total - 1) <= 1e-12
    x = [sum(e["weight"] * corners[e["index"]][j] for e in doc["weights"]) for j in range(2)]
    assert max(abs(v - 0.5) for v in x) <= 0.1


def test_sparsify_antipodal(tmp_path, capsys):
    src = write(tmp_path, "in.json", {"dimension": 2, "points": [[1, 1], [-1, -1]],
                                       "weights": [{"index": 0, "weight": 0.5}, {"index": 1, "weight": 0.5}]})
    code, stdout, err = run(["sparsify", src, "--delta", "0.05", "--seed", "3"], capsys)
    assert code == 0
    dist = float(err.split("distance ")[1].split()[0])
    assert dist <= 0.05
    json.loads(stdout)


def test_sparsify_real_format(tmp_path, capsys):
    src = write(tmp_path, "in.json", {"dimension": 1, "points": [[0.1], [0.7]],
                                       "weights": [{"index": 0, "weight": 0.5}, {"index": 1, "weight": 0.5}]})
    out = tmp_path / "out.json"
    assert run(["sparsify", src, "-o", str(out)], capsys)[0] == 0
    text = out.read_text()
    assert "0.10000000000000001" in text and "0.69999999999999996" in text


@pytest.mark.parametrize("content", ["{not json", json.dumps({"dimension": 2, "points": [[1]]})])
def test_sparsify_parse_errors(tmp_path, capsys, content):
    src = tmp_path / "bad.json"
    src.write_text(content)
    assert run(["sparsify", str(src)], capsys)[0] == 2


def test_sparsify_missing_file(tmp_path, capsys):
    assert run(["sparsify", str(tmp_path / "nope.json")], capsys)[0] == 2


def test_sparsify_sampling_failure_exit_3(tmp_path, capsys, monkeypatch):
    import newman_cara.geometry as geometry

    monkeypatch.setattr(geometry, "sample_count", lambda d, delta, eta: 1)
    src = write(tmp_path, "in.json", {"dimension": 1, "points": [[1], [-1]],
                                       "weights": [{"index": 0, "weight": 0.5}, {"index": 1, "weight": 0.5}]})
    assert run(["sparsify", src, "--max-retries", "2"], capsys)[0] == 3


def test_newman_n4(capsys):
    code, out, _ = run(["newman", "--n", "4", "--t", "2", "--delta", "0.1"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["epsilon_measured"] == 0.25
    assert doc["error_measured"] <= doc["epsilon_measured"] + doc["delta_target"]
    for key in ("epsilon_measured", "delta_target", "error_measured", "k", "index_bits",
                "public_cost", "private_cost", "reduction_used", "seed"):
        assert key in doc


def test_newman_n2(capsys):
    code, out, _ = run(["newman", "--n", "2", "--t", "1", "--delta", "0.2"], capsys)
    assert code == 0
    assert json.loads(out)["epsilon_measured"] == 0.5


@pytest.mark.parametrize("argv", [["--delta", "0"], ["--delta", "-0.5"], ["--eta", "1.5"], ["--n", "9", "--t", "2"]])
def test_newman_usage_errors(capsys, argv):
    assert run(["newman", *argv], capsys)[0] == 2


def test_newman_bad_seed(capsys):
    with pytest.raises(SystemExit) as info:
        main(["newman", "--seed", str(2**64)])
    assert info.value.code == 2


def test_newman_output_is_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert run(["newman", "--n", "3", "--t", "2", "--seed", "17", "-o", str(path)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_newman_random_family(capsys):
    code, out, _ = run(["newman", "--family", "random", "--n", "1", "--q", "12", "--delta", "0.2"], capsys)
    assert code == 0
    assert json.loads(out)["reduction_used"] is True


def test_verify_equality(tmp_path, capsys):
    report = tmp_path / "r.json"
    assert run(["newman", "--n", "3", "--t", "2", "--delta", "0.15", "-o", str(report)], capsys)[0] == 0
    code, out, _ = run(["verify", str(report), "--trials", "20000", "--inputs", "12"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["all_pass"] and len(doc["inputs"]) == 12
    diag = [r for r in doc["inputs"] if r["x"] == r["y"]]
    assert diag and all(r["frequency"] == 1.0 for r in diag)


def test_verify_k1(tmp_path, capsys):
    report = tmp_path / "r.json"
    # t=1, n=1: protocols r=0 (always accept) and r=1; delta large keeps both
    assert run(["newman", "--n", "1", "--t", "1", "--delta", "0.5", "-o", str(report)], capsys)[0] == 0
    doc = json.loads(report.read_text())
    assert doc["k"] in (1, 2)
    code, out, _ = run(["verify", str(report), "--trials", "1000", "--inputs", "4"], capsys)
    assert code == 0


def test_verify_point_mass_frequencies_exact(tmp_path, capsys):
    report = tmp_path / "r.json"
    assert run(["newman", "--family", "random", "--n", "2", "--q", "1", "-o", str(report)], capsys)[0] == 0
    assert json.loads(report.read_text())["k"] == 1
    code, out, _ = run(["verify", str(report), "--trials", "500"], capsys)
    assert code == 0
    assert all(r["frequency"] in (0.0, 1.0) and r["deviation"] == 0.0 for r in json.loads(out)["inputs"])


def test_verify_missing_artifacts(tmp_path, capsys):
    assert run(["verify", str(tmp_path / "none.json")], capsys)[0] == 2
    bad = write(tmp_path, "bad.json", {"epsilon_measured": 0.1})
    assert run(["verify", bad], capsys)[0] == 2


def test_verify_tampered_support(tmp_path, capsys):
    report = tmp_path / "r.json"
    run(["newman", "--n", "2", "--t", "1", "-o", str(report)], capsys)
    doc = json.loads(report.read_text())
    doc["support"] = doc["support"][:-1]
    report.write_text(jsonio.dumps(doc))
    assert run(["verify", str(report)], capsys)[0] == 2


def test_scaling(capsys):
    code, out, _ = run(["scaling", "--n-values", "2", "4", "6", "8", "--delta", "0.1"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert [r["index_bits"] for r in doc["rows"]] == [11, 12, 12, 12]
    assert [r["k"] for r in doc["rows"]] == [1615, 2169, 2724, 3278]
    assert doc["logarithmic_growth"] is True

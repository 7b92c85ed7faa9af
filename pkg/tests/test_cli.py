import json

import pytest

from monomial_segre import cli
from monomial_segre.cli import (EXIT_DIVERGED, EXIT_FAIL, EXIT_OK, EXIT_USAGE,
                                UsageError, main, parse_inline_generators,
                                render_svg)
from monomial_segre.lattice import presentation

STAIRCASE_ARGS = ["--gens", "3,0;1,1;0,3"]


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, argv):
    code, out, err = run(capsys, argv)
    return code, json.loads(out), err


def test_parse_inline_generators():
    assert parse_inline_generators("3,0;1,1;0,3") == ((3, 0), (1, 1), (0, 3))
    assert parse_inline_generators(" 1,2 ; 3,4 ;") == ((1, 2), (3, 4))
    with pytest.raises(UsageError):
        parse_inline_generators("1,a")
    with pytest.raises(UsageError):
        parse_inline_generators(";;")


def test_compute_golden(capsys):
    code, doc, _ = run_json(capsys, ["compute"] + STAIRCASE_ARGS +
                            ["--dmax", "3"])
    assert code == EXIT_OK
    assert doc["n"] == 2
    assert doc["generators"] == [[3, 0], [1, 1], [0, 3]]
    assert doc["dmax"] == 3
    terms = {tuple(t["exponents"]): t["coefficient"] for t in doc["series"]}
    # the scheme has codimension 2, so the class starts in degree 2
    assert terms == {(1, 1): 6, (1, 2): -15, (2, 1): -15}


def test_compute_output_round_trips(capsys, tmp_path):
    code, out, _ = run(capsys, ["compute"] + STAIRCASE_ARGS)
    assert code == EXIT_OK
    job = tmp_path / "job.json"
    job.write_text(out)
    code2, doc2, _ = run_json(capsys, ["compute", "--input", str(job)])
    assert code2 == EXIT_OK
    assert doc2 == json.loads(out)


def test_compute_byte_stable(capsys):
    _, out1, _ = run(capsys, ["compute"] + STAIRCASE_ARGS)
    _, out2, _ = run(capsys, ["compute"] + STAIRCASE_ARGS)
    assert out1 == out2


def test_tower_trace_and_agreement(capsys):
    code, doc, _ = run_json(capsys, ["tower"] + STAIRCASE_ARGS)
    assert code == EXIT_OK
    assert doc["trace"]["iterations"] == len(doc["trace"]["steps"])
    code2, doc2, _ = run_json(capsys, ["compute"] + STAIRCASE_ARGS)
    assert doc2["series"] == doc["series"]


def test_verify_ok(capsys):
    code, doc, _ = run_json(capsys, ["verify"] + STAIRCASE_ARGS +
                            ["--dmax", "4"])
    assert code == EXIT_OK
    assert doc["ok"] is True
    assert all(c["passed"] for c in doc["checks"])


def test_triangulate_document(capsys):
    code, doc, _ = run_json(capsys, ["triangulate"] + STAIRCASE_ARGS +
                            ["--dmax", "3"])
    assert code == EXIT_OK
    assert len(doc["complement_cells"]) == 3
    assert doc["placement_order"][-1] == "O"
    rayed = [c for c in doc["complement_cells"] if c["infinite_directions"]]
    assert rayed, "complement must contain unbounded cells"
    for c in doc["complement_cells"]:
        assert c["hvol"] >= 1


def test_render_svg_sanity(capsys, tmp_path):
    out_file = tmp_path / "fig.svg"
    code, out, _ = run(capsys, ["render"] + STAIRCASE_ARGS +
                       ["-o", str(out_file)])
    assert code == EXIT_OK
    svg = out_file.read_text()
    assert svg.startswith("<svg")
    assert svg.count("<circle") == 3  # one dot per generator
    assert "<polygon" in svg
    code2, out2, _ = run(capsys, ["render"] + STAIRCASE_ARGS)
    assert out2 == svg


def test_render_rejects_n3(capsys):
    code, _, err = run(capsys, ["render", "--gens", "1,0,0;0,1,0"])
    assert code == EXIT_USAGE
    assert "n = 2" in err


def test_usage_errors(capsys):
    # neither --gens nor --input
    assert run(capsys, ["compute"])[0] == EXIT_USAGE
    # unknown subcommand
    assert run(capsys, ["frobnicate"])[0] == EXIT_USAGE
    # malformed generators
    assert run(capsys, ["compute", "--gens", "x,y"])[0] == EXIT_USAGE
    # bad dmax
    assert run(capsys, ["compute"] + STAIRCASE_ARGS +
               ["--dmax", "0"])[0] == EXIT_USAGE


def test_env_var_dmax(capsys, monkeypatch):
    monkeypatch.setenv(cli.ENV_DMAX, "2")
    code, doc, _ = run_json(capsys, ["compute"] + STAIRCASE_ARGS)
    assert doc["dmax"] == 2
    assert max(sum(t["exponents"]) for t in doc["series"]) <= 2
    # an explicit flag wins over the environment
    _, doc2, _ = run_json(capsys, ["compute"] + STAIRCASE_ARGS +
                          ["--dmax", "3"])
    assert doc2["dmax"] == 3
    monkeypatch.setenv(cli.ENV_DMAX, "zonk")
    assert run(capsys, ["compute"] + STAIRCASE_ARGS)[0] == EXIT_USAGE


def test_input_document_with_nil_pairs(capsys, tmp_path):
    job = tmp_path / "job.json"
    job.write_text(json.dumps({
        "n": 2, "generators": [[1, 0], [0, 1]],
        "nil_pairs": [["X1", "X2"]], "dmax": 4}))
    code, doc, _ = run_json(capsys, ["compute", "--input", str(job)])
    assert code == EXIT_OK
    assert doc["series"] == []  # empty scheme: zero class


def test_stdin_input(capsys, monkeypatch, tmp_path):
    doc = {"n": 2, "generators": [[1, 1]], "dmax": 2}
    import io
    monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps(doc)))
    code, out_doc, _ = run_json(capsys, ["compute", "--input", "-"])
    assert code == EXIT_OK
    assert out_doc["dmax"] == 2


def test_verify_failure_exit_code(capsys, monkeypatch):
    # force one check to fail to observe exit code 1
    from monomial_segre import segre

    real_verify = segre.verify

    def broken(p, *a, **k):
        report = real_verify(p, *a, **k)
        bad = report.checks[0].__class__("forced", False, "")
        return report.__class__(report.presentation,
                                report.checks + (bad,), report.diverged)
    monkeypatch.setattr(cli, "verify", broken)
    code, doc, _ = run_json(capsys, ["verify"] + STAIRCASE_ARGS +
                            ["--dmax", "3"])
    assert code == EXIT_FAIL
    assert doc["ok"] is False


def test_corpus_small_run(capsys):
    code, doc, _ = run_json(capsys, ["corpus", "--count", "6", "--seed", "1",
                                     "--jobs", "1"])
    assert code in (EXIT_OK, EXIT_DIVERGED)
    assert doc["count"] == 6
    assert len(doc["results"]) == 6
    assert doc["passed"] + doc["failed"] + doc["diverged"] == 6
    # determinism: the same seed regenerates the same instances
    _, doc2, _ = run_json(capsys, ["corpus", "--count", "6", "--seed", "1",
                                   "--jobs", "1"])
    assert [r["generators"] for r in doc2["results"]] == \
        [r["generators"] for r in doc["results"]]


def test_render_svg_direct():
    svg = render_svg(presentation(((2, 0), (0, 2))))
    assert svg.count("<circle") == 2
    assert svg.rstrip().endswith("</svg>")

import json
import os
import pathlib

import pytest

import kgbench

DATA = pathlib.Path(os.environ.get("KGBENCH_TEST_DATA", pathlib.Path(__file__).parent.parent / "data"))
CORPUS = DATA / "minicorpus"


def test_normalize_label():
    assert kgbench.normalize_label("  Kathryn_JANEWAY ") == "kathryn janeway"
    assert kgbench.normalize_label("ÉCOLE") == "école"


def test_match_minicorpus():
    alpha = kgbench.load_graph(str(CORPUS / "alpha.nt"), "alpha")
    beta = kgbench.load_graph(str(CORPUS / "beta.nt"), "beta")
    assert len(alpha) == 13
    assert alpha.count("instance") == 8
    with pytest.raises(kgbench.InvalidArgument):
        alpha.count("thing")
    plain = set(kgbench.match(alpha, beta))
    alt = set(kgbench.match(alpha, beta, use_alt_labels=True))
    assert plain and plain <= alt
    assert kgbench.match(alpha, beta, unique_only=True) == sorted(kgbench.match(alpha, beta, unique_only=True))


def test_evaluate_scenarios():
    gold = [("http://s/a", "http://t/b")]
    r = kgbench.evaluate([("http://s/a", "http://t/b2")], gold)
    assert (r["tp"], r["fp"], r["fn"]) == (0, 1, 1)
    assert r["precision"] == 0.0
    r = kgbench.evaluate([("http://s/c", "http://t/d")], gold)
    assert r["outcomes"] == ["IGNORED"]
    r = kgbench.evaluate([("http://s/x", "http://t/b")], gold, fp_side="source")
    assert r["outcomes"] == ["IGNORED"]
    with pytest.raises(kgbench.InvalidArgument):
        kgbench.evaluate([], [("http://s/a", "http://t/b"), ("http://s/a", "http://t/c")])


def test_arity():
    pairs = [(f"http://s/{s}", f"http://t/{t}") for s, t in [(1, 1), (2, 2), (2, 3), (4, 4), (5, 4)]]
    assert kgbench.classify_arity(pairs) == ["1:1", "1:n", "1:n", "n:1", "n:1"]


def test_statistics():
    assert abs(kgbench.max_error(50) - 0.1386) < 5e-4
    lo, hi = kgbench.wilson_interval(25, 50)
    assert lo < 0.5 < hi
    kappa, band = kgbench.fleiss_kappa([[2, 1], [1, 2]])
    assert abs(kappa + 1 / 3) < 1e-12
    assert band == "poor"


def test_sample_deterministic():
    pairs = [(f"http://s/{i}", f"http://t/{i}") for i in range(100)]
    a = kgbench.sample(pairs, 10, 7, "m", "task")
    assert a == kgbench.sample(pairs, 10, 7, "m", "task")
    assert len({x["id"] for x in a}) == 10


def test_parse_alignment():
    cells = kgbench.parse_alignment(str(CORPUS / "ext.alpha-beta.tsv"))
    assert len(cells) == 5
    assert sorted(c[2] for c in cells)[0] == 0.1
    with pytest.raises(kgbench.NotFound):
        kgbench.parse_alignment(str(CORPUS / "nope.tsv"))


def test_run_cli(tmp_path):
    code, out, err = kgbench.run_cli(["ingest", "--input", str(CORPUS / "alpha.nt")])
    assert code == 0, err
    assert json.loads(out)["instance"] == 8
    code, _, err = kgbench.run_cli(["no-such-command"])
    assert code != 0 and err

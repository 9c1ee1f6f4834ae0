import json
import os

import numpy as np
import pytest

from fann.cli import main
from fann.errors import DimensionMismatch, DuplicateId, ParseError, StructureMismatch
from fann.index import EAGER, build_one_eps, build_three_eps
from fann.io import corpus_digest, index_from_dict, index_to_dict, ingest, load_index, parse_lines, save_index
from fann.selftest import planted_instance, suite_rng


def test_parse_jsonl():
    ds = parse_lines(['{"id": "a", "points": [[0, 0], [1, 0], [2, 0]]}', "", "# note",
                      '{"id": 7, "points": [[1, 1]]}'], "jsonl")
    assert ds.ids == ["a", "7"] and ds.d == 2 and ds.m == 3
    assert np.array_equal(ds.curves[1].vertices, [[1, 1]] * 3)


def test_parse_csv():
    ds = parse_lines(["a,0,0;1,0", "b, 2,2 ; 3,3 ; 4,4"], "csv")
    assert ds.ids == ["a", "b"] and ds.m == 3
    assert np.array_equal(ds.curves[0].vertices[-1], [1, 0])


def test_parse_without_padding():
    ds = parse_lines(["a,0,0;1,0", "b,2,2;3,3;4,4"], "csv", pad=False)
    assert [c.m for c in ds.curves] == [2, 3]


def test_parse_errors():
    with pytest.raises(DimensionMismatch):
        parse_lines(["a,0,0;1,0", "b,0,0,0"], "csv")
    with pytest.raises(DuplicateId):
        parse_lines(["a,0,0", "a,1,1"], "csv")
    with pytest.raises(ParseError) as info:
        parse_lines(['{"id": "a", "points": [[0, 0]]}', "{oops"], "jsonl")
    assert info.value.line == 2
    with pytest.raises(ParseError):
        parse_lines(['{"points": [[0, 0]]}'], "jsonl")
    with pytest.raises(ParseError):
        parse_lines(["a,x,y"], "csv")


def test_digest_depends_on_ids_and_coordinates():
    ds = parse_lines(["a,0,0;1,0"], "csv")
    base = corpus_digest(ds.curves, ds.ids)
    assert base == corpus_digest(ds.curves, ["a"])
    assert base != corpus_digest(ds.curves, ["b"])
    moved = parse_lines(["a,0,0;1,1e-12"], "csv")
    assert base != corpus_digest(moved.curves, moved.ids)


@pytest.mark.parametrize("build", [build_one_eps, build_three_eps])
def test_save_load_preserves_answers(tmp_path, build):
    rng = suite_rng(31, 0)
    T, _, sigma = planted_instance(rng)
    idx = build(T, 0.4, 1.0, 3)
    path = tmp_path / "idx.json"
    save_index(idx, str(path))
    back, ids = load_index(str(path))
    assert ids == [str(i) for i in range(len(T))]
    qs = [sigma + rng.normal(0, 0.5, sigma.shape) for _ in range(10)]
    assert [idx.query(q) for q in qs] == [back.query(q) for q in qs]


def test_eager_round_trip(tmp_path):
    T = [[[0.0], [0.3]]]
    idx = build_three_eps(T, 0.4, 1.0, 3, mode=EAGER)
    path = tmp_path / "e.json"
    save_index(idx, str(path))
    back, _ = load_index(str(path))
    assert np.array_equal(back.table.tables[4], idx.table.tables[4])


def test_tampered_file_rejected():
    idx = build_three_eps([[(0.0, 0.0), (1.0, 0.0)]], 0.4, 0.5, 3)
    blob = index_to_dict(idx)
    blob["corpus"]["curves"][0][0][0] = 0.5
    with pytest.raises(StructureMismatch):
        index_from_dict(blob)
    with pytest.raises(StructureMismatch):
        index_from_dict({"format": "other"})


def test_lazy_file_size_independent_of_history(tmp_path):
    rng = suite_rng(32, 0)
    T, _, sigma = planted_instance(rng)
    idx = build_one_eps(T, 0.4, 1.0, 3)
    a = save_index(idx, str(tmp_path / "a.json"))
    for _ in range(5):
        idx.query(sigma + rng.normal(0, 0.3, sigma.shape))
    b = save_index(idx, str(tmp_path / "b.json"))
    assert a == b
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


# CLI


@pytest.fixture
def corpus(tmp_path):
    p = tmp_path / "data.jsonl"
    rows = [{"id": "flat", "points": [[0, 0], [1, 0], [2, 0]]}, {"id": "up", "points": [[0, 0], [1, 1], [2, 2]]}]
    p.write_text("".join(json.dumps(r) + "\n" for r in rows))
    return p


def test_cli_ingest(corpus, tmp_path, capsys):
    out = tmp_path / "clean.jsonl"
    assert main(["ingest", str(corpus), "--out", str(out)]) == 0
    info = json.loads(capsys.readouterr().out)
    assert info["curves"] == 2 and info["d"] == 2
    assert ingest(str(out)).ids == ["flat", "up"]


def test_cli_build_and_query(corpus, tmp_path, capsys):
    idx = tmp_path / "i.json"
    assert main(["build", str(corpus), "--eps", "0.4", "--delta", "0.5", "--out", str(idx)]) == 0
    capsys.readouterr()
    q = tmp_path / "q.csv"
    q.write_text("near,0,0.1;1,0.1;2,0.1\nshort,0,0;2,2\n")
    assert main(["query", str(idx), str(q), "--verify"]) == 0
    rows = [json.loads(x) for x in capsys.readouterr().out.splitlines()]
    assert rows[0]["answer"] == "flat" and rows[0]["bound_ok"]
    assert rows[1]["id"] == "short"


def test_cli_ladder(corpus, tmp_path, capsys):
    idx = tmp_path / "l.json"
    assert main(["build", str(corpus), "--out", str(idx)]) == 0
    capsys.readouterr()
    q = tmp_path / "q.jsonl"
    q.write_text(json.dumps({"id": "q", "points": [[0, 0], [1, 0.9], [2, 2]]}) + "\n")
    assert main(["query", str(idx), str(q), "--verify"]) == 0
    row = json.loads(capsys.readouterr().out)
    assert row["answer"] == "up" and row["bound_ok"]
    assert main(["build", str(corpus), "--mode", "eager", "--out", str(idx)]) == 2


def test_cli_exit_codes(corpus, tmp_path):
    idx = tmp_path / "i.json"
    assert main(["build", str(corpus), "--delta", "0.5", "--out", str(idx)]) == 0
    long_q = tmp_path / "long.csv"
    long_q.write_text("q,0,0;1,0;2,0;3,0\n")
    assert main(["query", str(idx), str(long_q)]) == 4
    empty = tmp_path / "empty.jsonl"
    empty.write_text("")
    assert main(["build", str(empty), "--delta", "0.5", "--out", str(idx)]) == 2
    mixed = tmp_path / "mixed.csv"
    mixed.write_text("a,0,0;1,0\nb,0,0,0\n")
    assert main(["ingest", str(mixed)]) == 2
    assert main(["build", str(corpus), "--delta", "0.5", "--variant", "one-eps", "--mode", "eager",
                 "--out", str(tmp_path / "x.json")]) == 3
    assert not os.path.exists(tmp_path / "x.json")
    assert main(["ingest", str(tmp_path / "missing.jsonl")]) == 2

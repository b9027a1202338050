import csv
import io
import json

import pytest

from pmatch import cli, edgelist
from pmatch.gadgets import torpid_gadget


def run(capsys, *argv):
    rc = cli.main(list(argv))
    return rc, capsys.readouterr().out


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.fixture
def h1(tmp_path):
    path = tmp_path / "h1.txt"
    with open(path, "w") as fh:
        edgelist.write(torpid_gadget(1).graph, fh)
    return str(path)


def test_gadget_writes_labels(capsys):
    _, out = run(capsys, "gadget", "torpid", "--k", "1")
    g = edgelist.parse(io.StringIO(out))
    assert len(g) == 20
    assert {"u", "v", "x1", "y2"} <= set(g.named)


def test_count_modes(capsys, h1):
    _, out = run(capsys, "count", "--input", h1)
    assert rows(out)[0]["value"] == "2"
    _, out = run(capsys, "count", "--input", h1, "--mode", "near", "--u", "x1", "--v", "v")
    assert rows(out)[0]["value"] == "3"
    _, out = run(capsys, "--format", "records", "count", "--input", h1, "--mode", "recursive",
                 "--pivot", "first")
    rec = json.loads(out)
    assert rec["value"] == 2 and rec["guarantee"] == "exact" and rec["calls"] >= 1
    _, out = run(capsys, "count", "--input", h1, "--mode", "fpt", "--backend", "ryser")
    assert rows(out)[0]["value"] == "2"


def test_named_pivot_file(capsys, h1, tmp_path):
    f = tmp_path / "u.txt"
    f.write_text("u v\n")
    _, out = run(capsys, "count", "--input", h1, "--mode", "recursive", "--pivot", f"named:{f}")
    assert rows(out)[0]["value"] == "2"


def test_holes_table_and_decompose(capsys, h1):
    _, out = run(capsys, "holes-table", "--input", h1)
    table = rows(out)
    assert table[0]["pattern"] == "perfect" and table[0]["count"] == "2"
    _, out = run(capsys, "decompose", "--input", h1)
    parts = {r["part"]: r for r in rows(out)}
    assert parts["C"]["size"] == "20"


def test_fc_order_and_blossoms(capsys, tmp_path):
    f = tmp_path / "bowtie.txt"
    f.write_text("p 5 6\n0 1\n1 2\n0 2\n2 3\n3 4\n2 4\n")
    _, out = run(capsys, "fc-order", "--input", str(f), "--base", "2")
    r = rows(out)
    assert r[0]["length"] == "2" and len(r) == 3
    _, out = run(capsys, "blossoms", "--input", str(f), "--hole", "0", "--min")
    assert rows(out)[0]["length"] == "3"


def test_chain_analyze_and_run(capsys, h1):
    _, out = run(capsys, "chain", "analyze", "--input", h1, "--cut", "near:u,v", "--mixing")
    r = rows(out)[0]
    assert float(r["phi"]) == pytest.approx(1 / 30)
    assert r["mixing_time"] == "134"
    _, out = run(capsys, "chain", "analyze", "--gadget", "torpid", "--k", "1", "--cut", "near-x1v",
                 "--weights", "broder")
    assert rows(out)[0]["cut"] == "near-x1v"
    _, a = run(capsys, "--seed", "5", "chain", "run", "--input", h1, "--steps", "2000",
               "--checkpoints", "1000,2000", "--exact-target")
    _, b = run(capsys, "chain", "run", "--input", h1, "--steps", "2000", "--seed", "5",
               "--checkpoints", "1000,2000", "--exact-target")
    assert a == b and len(rows(a)) == 2


def test_experiment_and_accept(capsys, tmp_path):
    out_path = tmp_path / "t.csv"
    run(capsys, "experiment", "torpid", "--ks", "1-2", "--output", str(out_path))
    table = rows(out_path.read_text())
    assert [r["k"] for r in table] == ["1", "2"]
    rc, out = run(capsys, "accept", "blossom-reduction")
    assert rc == 0 and out.startswith("PASS [7]")
    with pytest.raises(SystemExit, match="available: gadget-counts"):
        cli.main(["accept", "nope"])


def test_unknown_vertex(capsys, h1):
    with pytest.raises(SystemExit, match="no vertex"):
        cli.main(["count", "--input", h1, "--mode", "near", "--u", "zz", "--v", "v"])


def test_reduction_gadget(capsys, tmp_path):
    f = tmp_path / "d.txt"
    f.write_text("p 3 3\n0 1\n1 2\n0 2\n")
    _, out = run(capsys, "gadget", "reduction", "--input", str(f), "--s", "0", "--t", "2")
    g = edgelist.parse(io.StringIO(out))
    assert len(g) == 7
    assert "# hole" in out


def test_bad_input_is_reported(tmp_path):
    f = tmp_path / "bad.txt"
    f.write_text("0 1\n")
    with pytest.raises(SystemExit, match="missing 'p"):
        cli.main(["count", "--input", str(f)])


def test_brute_and_ryser_modes(capsys, tmp_path):
    f = tmp_path / "grid.txt"
    f.write_text("p 6 7\n0 1\n1 2\n3 4\n4 5\n0 3\n1 4\n2 5\n")
    for mode in ("brute", "ryser"):
        _, out = run(capsys, "count", "--input", str(f), "--mode", mode)
        assert rows(out)[0]["value"] == "3"
    odd = tmp_path / "c3.txt"
    odd.write_text("p 3 3\n0 1\n1 2\n0 2\n")
    with pytest.raises(SystemExit, match="bipartite"):
        cli.main(["count", "--input", str(odd), "--mode", "ryser"])


def test_decompose_reports_fc_order(capsys, tmp_path):
    # two triangles and a leaf hanging off vertex 0
    f = tmp_path / "g.txt"
    f.write_text("p 8 9\n0 1\n1 2\n2 3\n1 3\n0 4\n4 5\n5 6\n4 6\n0 7\n")
    _, out = run(capsys, "decompose", "--input", str(f))
    parts = rows(out)
    d = sorted((r["size"], r["fc_order"]) for r in parts if r["part"] == "D")
    assert d == [("1", "0"), ("3", "1"), ("3", "1")]
    assert [r["vertices"] for r in parts if r["part"] == "A"] == ["0"]

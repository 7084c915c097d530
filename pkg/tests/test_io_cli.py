import json

import pytest

from bundlesym import io
from bundlesym.cli import main
from bundlesym.connection import Connection, SplitPair, VectField
from bundlesym.diffop import DiffOp, Section
from bundlesym.harness.gen import Gen, GenConfig
from bundlesym.matalg import MatPoly
from bundlesym.poly import Poly
from conftest import M, P

E12 = [["0", "1"], ["0", "0"]]
ID = [["1", "0"], ["0", "1"]]


def write(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestSerialization:
    def test_operator_round_trip_bytes(self, gen):
        for _ in range(20):
            text = io.dumps(io.op_to_json(gen.diffop()))
            assert io.dumps(io.op_to_json(io.op_from_json(json.loads(text)))) == text

    def test_terms_sorted_grlex(self):
        t = DiffOp(2, 2, {(0, 2): MatPoly.identity(2, 2), (0, 0): MatPoly.identity(2, 2), (1, 0): MatPoly.identity(2, 2)})
        assert [term["alpha"] for term in io.op_to_json(t)["terms"]] == [[0, 0], [1, 0], [0, 2]]

    def test_other_round_trips(self, gen):
        s = gen.symbol(2)
        assert io.symbol_from_json(io.symbol_to_json(s)) == s
        c = gen.connection()
        assert io.connection_from_json(io.connection_to_json(c)) == c
        p = gen.pair()
        assert io.pair_from_json(io.pair_to_json(p)) == p
        sec = gen.section()
        assert io.section_from_json(io.section_to_json(sec)) == sec
        X = gen.vectfield()
        assert io.vectfield_from_json(io.vectfield_to_json(X)) == X

    @pytest.mark.parametrize(
        "doc",
        [
            {"m": 2, "n": 2},
            {"m": 2, "n": 2, "terms": [{"alpha": [1], "coeff": ID}]},
            {"m": 2, "n": 2, "terms": [{"alpha": [1, 0], "coeff": [["1", "0"]]}]},
            {"m": 2, "n": 2, "terms": [{"alpha": [1, 0], "coeff": [["x3", "0"], ["0", "0"]]}]},
            {"m": 0, "n": 2, "terms": []},
            {"m": 2, "n": 1, "terms": []},
        ],
    )
    def test_bad_operator_files(self, doc):
        with pytest.raises(io.FormatError):
            io.op_from_json(doc)

    def test_load_errors(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        with pytest.raises(io.FormatError):
            io.load(bad)
        with pytest.raises(io.FormatError):
            io.load(tmp_path / "missing.json")


class TestCli:
    def test_op_order(self, tmp_path, capsys):
        f = write(tmp_path / "t.json", {"m": 2, "n": 2, "terms": [{"alpha": [1, 0], "coeff": E12}]})
        code, out, _ = run(capsys, "op", "order", f)
        assert code == 0 and json.loads(out) == {"zero": False, "d_order": 1, "p_order": 2}

    def test_op_apply(self, tmp_path, capsys):
        t = write(tmp_path / "t.json", {"m": 2, "n": 2, "terms": [{"alpha": [1, 0], "coeff": E12}]})
        s = write(tmp_path / "s.json", {"m": 2, "n": 2, "components": ["0", "x1"]})
        code, out, _ = run(capsys, "op", "apply", t, s)
        assert code == 0 and json.loads(out)["components"] == ["1", "0"]

    def test_op_compose_and_bracket(self, tmp_path, capsys):
        d1 = write(tmp_path / "d1.json", {"m": 2, "n": 2, "terms": [{"alpha": [1, 0], "coeff": ID}]})
        x1 = write(tmp_path / "x1.json", {"m": 2, "n": 2, "terms": [{"alpha": [0, 0], "coeff": [["x1", "0"], ["0", "x1"]]}]})
        out_file = tmp_path / "out.json"
        assert main(["op", "bracket", d1, x1, "-o", str(out_file)]) == 0
        assert json.loads(out_file.read_text()) == {"m": 2, "n": 2, "terms": [{"alpha": [0, 0], "coeff": ID}]}
        code, out, _ = run(capsys, "op", "compose", d1, x1)
        assert code == 0 and len(json.loads(out)["terms"]) == 2

    def test_compose_output_round_trips(self, tmp_path, gen):
        a = write(tmp_path / "a.json", io.op_to_json(gen.diffop()))
        b = write(tmp_path / "b.json", io.op_to_json(gen.diffop()))
        first, second = tmp_path / "c1.json", tmp_path / "c2.json"
        assert main(["op", "compose", a, b, "-o", str(first)]) == 0
        text = first.read_text()
        second.write_text(io.dumps(io.op_to_json(io.op_from_json(json.loads(text)))))
        assert second.read_text() == text

    def test_sym_commands(self, tmp_path, capsys):
        t = write(tmp_path / "t.json", {"m": 2, "n": 2, "terms": [{"alpha": [1, 1], "coeff": ID}, {"alpha": [1, 0], "coeff": E12}]})
        code, out, _ = run(capsys, "sym", "of", t, "--kind", "ppal")
        assert code == 0 and json.loads(out)["terms"] == [{"xi": [1, 1], "coeff": ID}]
        code, out, _ = run(capsys, "sym", "of", t)
        doc = json.loads(out)
        assert code == 0 and doc["degree"] == 2 and doc["sl"] == [{"xi": [1, 0], "coeff": E12}]
        s = write(tmp_path / "s.json", doc)
        code, out, _ = run(capsys, "sym", "lift", s)
        assert code == 0
        code, out, _ = run(capsys, "sym", "mul", s, s)
        assert code == 0 and json.loads(out)["degree"] == 4
        code, out, _ = run(capsys, "sym", "bracket", s, s)
        assert code == 0 and json.loads(out)["degree"] == 3

    def test_conn_commands(self, tmp_path, capsys):
        c = write(tmp_path / "c.json", {"m": 2, "n": 2, "gamma": [[["0", "0"], ["0", "0"]], [["0", "x1"], ["-x1", "0"]]]})
        x = write(tmp_path / "x.json", {"m": 2, "components": ["1", "0"]})
        y = write(tmp_path / "y.json", {"m": 2, "components": ["0", "1"]})
        code, out, _ = run(capsys, "conn", "curvature", c, "--x", x, "--y", y)
        assert code == 0 and json.loads(out)["curvature"] == [["0", "1"], ["-1", "0"]]
        pair = write(tmp_path / "p.json", {"m": 2, "n": 2, "X": ["1", "0"], "A": E12})
        code, out, _ = run(capsys, "conn", "section", c, pair)
        assert code == 0 and len(json.loads(out)["terms"]) == 2
        t = write(tmp_path / "t.json", {"m": 2, "n": 2, "terms": [{"alpha": [0, 0], "coeff": [["3", "0"], ["0", "1"]]}]})
        code, out, _ = run(capsys, "conn", "trace-decompose", c, t)
        assert code == 0 and json.loads(out)["scalar"] == "2"

    def test_usage_errors_exit_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("[]")
        assert run(capsys, "op", "order", str(bad))[0] == 2
        assert run(capsys, "op", "order", str(tmp_path / "nope.json"))[0] == 2
        assert run(capsys, "frobnicate")[0] == 2
        assert run(capsys, "verify", "nosuch")[0] == 2
        assert run(capsys, "verify", "filtration", "--n", "1")[0] == 2
        t = write(tmp_path / "t.json", {"m": 2, "n": 2, "terms": [{"alpha": [1, 0], "coeff": E12}]})
        s3 = write(tmp_path / "s.json", {"m": 2, "n": 3, "components": ["0", "0", "1"]})
        assert run(capsys, "op", "apply", t, s3)[0] == 2
        nonmetric = write(tmp_path / "c.json", {"m": 2, "n": 2, "gamma": [E12, ID]})
        pair = write(tmp_path / "p.json", {"m": 2, "n": 2, "X": ["1", "0"], "A": E12})
        code, _, err = run(capsys, "conn", "section", nonmetric, pair)
        assert code == 2 and "metric" in err

    def test_verify_exit_codes(self, tmp_path, capsys, monkeypatch):
        report = tmp_path / "r.json"
        code, out, _ = run(capsys, "verify", "matalg", "--trials", "5", "--json", str(report))
        assert code == 0 and out.startswith("PASS matalg")
        assert json.loads(report.read_text())["passed"] is True

        from bundlesym.harness import suites

        def broken(t):
            t.expect("always-false", False, {})

        monkeypatch.setitem(suites._SUITE_FUNCS, "matalg", broken)
        code, out, _ = run(capsys, "verify", "matalg", "--trials", "2")
        assert code == 1 and "--only-trial 0" in out

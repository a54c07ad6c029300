import io
import json

import pytest

from tancat import cli
from tancat.cli import Report, execute, main, render
from tancat.engine.dual import check_tangent_axioms, dual_numbers
from tancat.engine.rings import RingMorphism
from tancat.script import parse
from tancat.tools.payloads import from_report
from tests.corpus import QQ_X, ring

CUSP_SCRIPT = "ring R = QQ[x, y] / (x^2 - x*y^2)\nrun tangent R --side scheme\n"
HYPERBOLA_SCRIPT = "ring H = QQ[x, y] / (x*y - 1)\npoint P on H = (1, 1)\nrun tangent-space H P\n"
AXIOMS_SCRIPT = "ring R = QQ[x]\nrun axioms R --side ring\n"


def run_json(write_script, capsys, text, *flags):
    code = main([write_script(text), "--format", "json", *flags])
    return code, json.loads(capsys.readouterr().out)


def ring_from_result(result, name="T"):
    text = f"ring {name} = QQ[{', '.join(result['vars'])}]"
    if result["relations"]:
        text += f" / ({', '.join(result['relations'])})"
    return parse(text + f"\nrun axioms {name}").declarations[name]


class TestCommands:
    def test_tangent_of_the_cusp(self, write_script, capsys):
        code, out = run_json(write_script, capsys, CUSP_SCRIPT)
        assert code == 0
        assert out["result"]["vars"] == ["x", "y", "d_x", "d_y"]
        expected = ring(
            ("x", "y", "d_x", "d_y"),
            lambda x, y, dx, dy: [x**2 - x * y**2, 2 * x * dx - y**2 * dx - 2 * x * y * dy],
        )
        assert ring_from_result(out["result"]) == expected

    def test_tangent_space(self, write_script, capsys):
        code, out = run_json(write_script, capsys, HYPERBOLA_SCRIPT)
        assert code == 0
        assert out["result"] == {"vars": ["d_x", "d_y"], "relations": ["d_x + d_y"]}

    def test_tangent_space_with_only_a_point(self, write_script, capsys):
        text = "ring R = QQ[x, y] / (x*y)\npoint P on R = (0, 0)\nrun tangent-space P\n"
        code, out = run_json(write_script, capsys, text)
        assert code == 0
        assert out["result"] == {"vars": ["d_x", "d_y"], "relations": []}

    def test_axioms(self, write_script, capsys):
        code, out = run_json(write_script, capsys, AXIOMS_SCRIPT)
        assert code == 0
        assert out["status"] == "ok"
        assert len(out["result"]["axioms"]) == 23
        assert all(entry["pass"] for entry in out["result"]["axioms"])

    def test_bundle_from_module(self, write_script, capsys):
        text = "ring R = QQ[x]\nmodule M over R = cokernel [x]\nrun bundle from-module M --side ring\n"
        code, out = run_json(write_script, capsys, text)
        assert code == 0
        assert out["result"]["vars"] == ["x", "u_1"]
        assert out["result"]["maps"]["iota"]["images"] == {"x": "x", "u_1": "-u_1"}

    def test_bundle_to_module_of_a_tangent_bundle(self, write_script, capsys):
        text = "ring R = QQ[x] / (x^2)\nrun bundle to-module R --side scheme\n"
        code, out = run_json(write_script, capsys, text)
        assert code == 0
        assert out["result"]["gens"] == ["d_x"]
        assert out["result"]["relations"] == [["x"]]

    def test_derive_sum(self, write_script, capsys):
        text = "ring R = QQ[x, y] / (x*y)\nrun bundle derive-sum R --side scheme\n"
        code, out = run_json(write_script, capsys, text)
        assert code == 0
        assert out["result"]["matches"] is True

    def test_vector_field_to_derivation(self, write_script, capsys):
        text = (
            "ring R = QQ[x]\nring T = QQ[x, eps] / (eps^2)\n"
            "morphism v : R -> T = {x |-> x + x^2*eps}\nrun vf to-derivation v\n"
        )
        code, out = run_json(write_script, capsys, text)
        assert code == 0
        assert out["result"]["images"] == {"x": "x^2"}

    def test_bracket(self, write_script, capsys):
        text = "ring R = QQ[x]\nmorphism D : R -> R = {x |-> 1}\nmorphism E : R -> R = {x |-> x}\nrun vf bracket D E\n"
        code, out = run_json(write_script, capsys, text)
        assert code == 0
        assert out["result"]["images"] == {"x": "1"}


class TestOutput:
    def test_json_schema(self, write_script, capsys):
        _, out = run_json(write_script, capsys, AXIOMS_SCRIPT)
        assert set(out) == {"status", "result", "ms"}
        assert isinstance(out["ms"], int)

    def test_no_timing_is_byte_stable(self, write_script, capsys):
        path = write_script(CUSP_SCRIPT)
        main([path, "--format", "json", "--no-timing"])
        first = capsys.readouterr().out
        main([path, "--format", "json", "--no-timing"])
        assert capsys.readouterr().out == first
        assert json.loads(first)["ms"] == 0

    def test_text_report(self, write_script, capsys):
        main([write_script(AXIOMS_SCRIPT), "--no-timing"])
        out = capsys.readouterr().out.splitlines()
        assert out[0] == "status: ok"
        assert "axioms: 23 passed, 0 failed" in out
        assert out[-1] == "time: 0 ms"

    def test_format_on_the_run_line(self, write_script, capsys):
        path = write_script("ring R = QQ[x]\nrun axioms R --format json\n")
        main([path])
        assert json.loads(capsys.readouterr().out)["status"] == "ok"

    def test_command_line_format_wins(self, write_script, capsys):
        path = write_script("ring R = QQ[x]\nrun axioms R --format json\n")
        main([path, "--format", "text"])
        assert capsys.readouterr().out.startswith("status: ok")

    def test_standard_input(self, monkeypatch, capsys):
        monkeypatch.setattr("sys.stdin", io.StringIO(HYPERBOLA_SCRIPT))
        assert main(["-", "--format", "json"]) == 0
        assert json.loads(capsys.readouterr().out)["result"]["relations"] == ["d_x + d_y"]


class TestExitCodes:
    def test_axiom_failure(self, write_script, capsys, monkeypatch):
        T = dual_numbers(QQ_X).ring
        TT = dual_numbers(T).ring
        bad = RingMorphism(T, TT, (TT.var("x"), TT.var("eps__2")))
        report = check_tangent_axioms(QQ_X, overrides={"lift": bad})
        monkeypatch.setattr(cli, "axioms_tool", lambda ring, side: from_report(report, "corrupted lift"))
        code, out = run_json(write_script, capsys, AXIOMS_SCRIPT)
        assert code == 1
        assert out["status"] == "axiom-failure"
        failing = [e for e in out["result"]["axioms"] if not e["pass"]]
        assert "T5.lift-lift" in {e["id"] for e in failing}
        assert all("witness" in e for e in failing)

    def test_point_off_the_variety(self, write_script, capsys):
        text = "ring R = QQ[x, y] / (x*y)\npoint P on R = (1, 1)\nrun tangent-space R P\n"
        code, out = run_json(write_script, capsys, text)
        assert code == 2
        assert out["status"] == "error"
        assert out["result"]["error_kind"] == "input"

    def test_unresolved_name(self, write_script, capsys):
        code, _ = run_json(write_script, capsys, "ring R = QQ[x]\nrun axioms S\n")
        assert code == 2

    def test_unknown_command(self, write_script, capsys):
        code, out = run_json(write_script, capsys, "ring R = QQ[x]\nrun frobnicate R\n")
        assert code == 2
        assert "run line" in out["result"]["error_message"]

    def test_syntax_error(self, write_script, capsys):
        code, out = run_json(write_script, capsys, "ring R = QQ[x / (x)\nrun axioms R\n")
        assert code == 2
        assert out["result"]["error_message"].startswith("1:15:")

    def test_wrong_kind_of_name(self, write_script, capsys):
        code, _ = run_json(write_script, capsys, "ring R = QQ[x]\nrun bundle from-module R\n")
        assert code == 2

    def test_missing_file(self, tmp_path):
        assert main([str(tmp_path / "missing.tc")]) == 2

    def test_budget_exceeded(self, write_script, capsys, monkeypatch):
        monkeypatch.setenv("TANCAT_STEP_BUDGET", "0")
        code, out = run_json(write_script, capsys, "ring R = QQ[s, t] / (s^2 - t, s*t - 3)\nrun axioms R\n")
        assert code == 3
        assert out["result"]["error_kind"] == "budget"


class TestReport:
    @pytest.mark.parametrize(
        "status, kind, code", [("ok", None, 0), ("axiom-failure", None, 1), ("error", "input", 2), ("error", "budget", 3)]
    )
    def test_exit_codes(self, status, kind, code):
        assert Report(status, error_kind=kind).exit_code == code

    def test_execute_without_timing(self):
        report = execute(parse(AXIOMS_SCRIPT), timing=False)
        assert report.ms == 0
        assert report.status == "ok"

    def test_render_json_is_sorted(self):
        text = render(Report("ok", {"vars": ["x"], "relations": []}, 0), "json")
        assert text.index('"ms"') < text.index('"result"') < text.index('"status"')

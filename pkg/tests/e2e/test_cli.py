#!/usr/bin/env python3
"""
End-to-end tests for the torsym command line.
Commands run in-process through main() with captured stdout and stderr.
"""

import io
import json
import os
import shutil
import subprocess
import sys
import tempfile
import unittest
from unittest.mock import patch

# Add the project root to the path
PROJECT_ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), "../../"))
sys.path.insert(0, PROJECT_ROOT)

from src.torsym import catalog  # noqa: E402
from src.torsym.documents import emit_pair_document  # noqa: E402
from src.torsym.main import main  # noqa: E402


class CliTestCase(unittest.TestCase):
    """Shared fixtures: a temporary working directory with pair documents."""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()
        self.original_dir = os.getcwd()
        os.chdir(self.temp_dir)

    def tearDown(self):
        os.chdir(self.original_dir)
        shutil.rmtree(self.temp_dir)

    def write(self, name, text):
        path = os.path.join(self.temp_dir, name)
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
        return path

    def write_pair(self, name, pair):
        return self.write(name, emit_pair_document(pair))

    def run_cli(self, *argv, stdin=""):
        with patch("sys.stdout", new_callable=io.StringIO) as out, \
                patch("sys.stderr", new_callable=io.StringIO) as err, \
                patch("sys.stdin", io.StringIO(stdin)):
            code = main(list(argv))
        return code, out.getvalue(), err.getvalue()


class TestValidateCommand(CliTestCase):
    """Test case for the validate command"""

    def test_valid_pair(self):
        code, out, _ = self.run_cli("validate", self.write_pair("cp2.json", catalog.cp(2)))
        self.assertEqual(code, 0)
        self.assertIn("valid: yes", out)
        self.assertIn("vertex class bound: ok", out)

    def test_invalid_pair(self):
        pair = catalog.hirzebruch(0).replace_vectors({"F3": (-2, 1)})
        code, out, _ = self.run_cli("validate", "--json", self.write_pair("bad.json", pair))
        self.assertEqual(code, 1)
        report = json.loads(out)
        self.assertFalse(report["valid"])
        self.assertEqual(report["singular_faces"], [["F2", "F3"], ["F3", "F4"]])
        self.assertIsNone(report["vertex_class_bound"])

    def test_malformed_document(self):
        code, out, err = self.run_cli("validate", self.write("broken.json", "{"))
        self.assertEqual(code, 2)
        self.assertEqual(out, "")
        self.assertIn("error:", err)

    def test_missing_file(self):
        code, _, err = self.run_cli("validate", "absent.json")
        self.assertEqual(code, 2)
        self.assertIn("cannot read", err)

    def test_reads_stdin(self):
        code, out, _ = self.run_cli("validate", "-", stdin=emit_pair_document(catalog.cp(1)))
        self.assertEqual(code, 0)
        self.assertIn("rank: 1", out)

    def test_report_is_independent_of_hash_seed(self):
        facets = ["A", "B", "C", "D", "E", "F", "G"]
        document = json.dumps({
            "n": 2,
            "facets": facets,
            "max_simplices": [["A", "B", "C"], ["C", "D"], ["D"], ["A", "B"], ["E", "A"], ["E", "B"],
                              ["E", "C"], ["F", "G"], ["G", "A"], ["F"]],
            "lambda": {facet: [1, 0] for facet in facets},
        })
        path = self.write("impure.json", document)
        script = (
            "import sys; sys.path.insert(0, sys.argv[1]); "
            "from src.torsym.main import main; sys.exit(main(sys.argv[2:]))"
        )
        outputs = set()
        for seed in range(6):
            env = dict(os.environ, PYTHONHASHSEED=str(seed))
            result = subprocess.run(
                [sys.executable, "-c", script, PROJECT_ROOT, "validate", "--json", path],
                capture_output=True, text=True, env=env, check=False,
            )
            self.assertEqual(result.returncode, 1, result.stderr)
            outputs.add(result.stdout)
        self.assertEqual(len(outputs), 1)
        violations = json.loads(outputs.pop())["violations"]
        self.assertEqual(violations[:2], [
            "face ['D'] has 1 vertices, expected 2 (not pure)",
            "face ['F'] has 1 vertices, expected 2 (not pure)",
        ])


class TestSymmetryCommand(CliTestCase):
    """Test case for the symmetry command"""

    def test_text_report(self):
        code, out, _ = self.run_cli("symmetry", self.write_pair("cp2.json", catalog.cp(2)))
        self.assertEqual(code, 0)
        self.assertIn("group: SU(3)", out)
        self.assertIn("SplitOff {F1,F2,F3} k=3 at F1", out)

    def test_json_report(self):
        code, out, _ = self.run_cli("symmetry", "--json", self.write_pair("p5.json", catalog.p5()))
        self.assertEqual(code, 0)
        report = json.loads(out)
        self.assertEqual(report["schema"], "torsym-report/1")
        self.assertEqual(report["command"], "symmetry")
        self.assertEqual(report["group"], "SU(2) x SU(2) x T^1")
        self.assertEqual(report["weyl_partition"], [["F1", "F2"], ["F3"], ["F4", "E"]])
        kinds = [step["kind"] for step in report["construction_tree"]["steps"]]
        self.assertEqual(kinds, ["BlowUp", "SplitOff", "SplitOff"])

    def test_reports_flips(self):
        pair = catalog.cp(1).replace_vectors({"F2": (1,)})
        code, out, _ = self.run_cli("symmetry", "--json", self.write_pair("line.json", pair))
        self.assertEqual(code, 0)
        self.assertEqual(json.loads(out)["flipped"], ["F2"])

    def test_reports_flip_of_a_single_class(self):
        path = self.write_pair("h-2.json", catalog.hirzebruch(-2))
        code, out, _ = self.run_cli("symmetry", path)
        self.assertEqual(code, 0)
        self.assertIn("signs: flip F4", out)
        code, out, _ = self.run_cli("symmetry", "--json", path)
        report = json.loads(out)
        self.assertEqual(report["flipped"], ["F4"])
        self.assertEqual(report["classes"][-1], {"facets": ["F4"], "dual": [2, -1, 0, 0]})

    def test_p5_signs(self):
        code, out, _ = self.run_cli("symmetry", "--json", self.write_pair("p5.json", catalog.p5()))
        self.assertEqual(code, 0)
        self.assertEqual(json.loads(out)["flipped"], ["F4", "E"])

    @patch.dict(os.environ, {"TORSYM_EXCEPTIONAL_PREFIX": "X"})
    def test_tree_uses_configured_prefix(self):
        code, out, _ = self.run_cli("symmetry", "--json", self.write_pair("p5.json", catalog.p5()))
        self.assertEqual(code, 0)
        tree = json.loads(out)["construction_tree"]
        self.assertEqual(tree["steps"][0]["exceptional"], "X")
        self.assertIn("X", tree["leaf"]["facets"])

    def test_invalid_pair_is_a_domain_error(self):
        pair = catalog.hirzebruch(0).replace_vectors({"F3": (-2, 1)})
        code, _, err = self.run_cli("symmetry", self.write_pair("bad.json", pair))
        self.assertEqual(code, 1)
        self.assertIn("singular", err)

    def test_output_is_deterministic(self):
        path = self.write_pair("prism.json", catalog.twisted_prism(2))
        first = self.run_cli("symmetry", "--json", path)
        second = self.run_cli("symmetry", "--json", path)
        self.assertEqual(first[1], second[1])

    def test_output_file(self):
        path = self.write_pair("square.json", catalog.hirzebruch(0))
        target = os.path.join(self.temp_dir, "report.txt")
        code, out, _ = self.run_cli("symmetry", "--output", target, path)
        self.assertEqual(code, 0)
        self.assertEqual(out, "")
        with open(target, encoding="utf-8") as f:
            self.assertIn("group: SU(2) x SU(2)", f.read())


class TestAutCommand(CliTestCase):
    """Test case for the aut command and its size guard"""

    def test_square(self):
        code, out, _ = self.run_cli("aut", "--json", self.write_pair("square.json", catalog.hirzebruch(0)))
        self.assertEqual(code, 0)
        report = json.loads(out)
        self.assertEqual(report["order"], 8)
        self.assertEqual(report["phi_image_order"], 4)
        self.assertEqual(report["automorphisms"][0]["matrix"], [[1, 0], [0, 1]])

    def test_default_guard(self):
        code, _, err = self.run_cli("aut", self.write_pair("cp12.json", catalog.cp(12)))
        self.assertEqual(code, 1)
        self.assertIn("TORSYM_SIZE_GUARD", err)

    @patch.dict(os.environ, {"TORSYM_SIZE_GUARD": "3"})
    def test_guard_from_environment(self):
        self.assertEqual(self.run_cli("aut", self.write_pair("cp2.json", catalog.cp(2)))[0], 0)
        self.assertEqual(self.run_cli("aut", self.write_pair("square.json", catalog.hirzebruch(0)))[0], 1)


class TestBlowCommands(CliTestCase):
    """Test case for blowup and blowdown"""

    def test_round_trip_is_byte_identical(self):
        code, original, _ = self.run_cli("catalog", "p5")
        self.assertEqual(code, 0)
        code, blown_up, _ = self.run_cli("blowup", "-", "--face", "F1,F2", stdin=original)
        self.assertEqual(code, 0)
        self.assertIn('"E2": [-1, -1, 0]', blown_up)
        code, restored, _ = self.run_cli("blowdown", "-", "E2", stdin=blown_up)
        self.assertEqual(code, 0)
        self.assertEqual(restored, original)

    def test_custom_label(self):
        path = self.write_pair("square.json", catalog.hirzebruch(0))
        code, out, _ = self.run_cli("blowup", path, "--face", "F1,F2", "--label", "X")
        self.assertEqual(code, 0)
        self.assertIn('"X": [-1, -1]', out)

    def test_blowup_of_non_face(self):
        path = self.write_pair("square.json", catalog.hirzebruch(0))
        code, _, err = self.run_cli("blowup", path, "--face", "F1,F3")
        self.assertEqual(code, 1)
        self.assertIn("not a face", err)

    def test_blowdown_of_ordinary_facet(self):
        path = self.write_pair("square.json", catalog.hirzebruch(0))
        self.assertEqual(self.run_cli("blowdown", path, "F1")[0], 1)


class TestTripleCommand(CliTestCase):
    """Test case for the triple command"""

    def test_hirzebruch(self):
        path = self.write_pair("h1.json", catalog.hirzebruch(1))
        code, out, _ = self.run_cli("triple", "--json", path, "--partition", "F1,F3")
        self.assertEqual(code, 0)
        report = json.loads(out)
        self.assertEqual(report["blocks"], [["F1", "F3"]])
        self.assertEqual(report["chosen"], ["F1"])
        self.assertEqual(report["psi_data"], [[1]])
        self.assertEqual(report["marked"], [None])
        self.assertEqual(report["reduced_pair"]["facets"], ["F2", "F4"])

    def test_inadmissible(self):
        path = self.write_pair("square.json", catalog.hirzebruch(0))
        self.assertEqual(self.run_cli("triple", path, "--partition", "F1,F2")[0], 1)

    def test_unknown_facet(self):
        path = self.write_pair("square.json", catalog.hirzebruch(0))
        code, _, err = self.run_cli("triple", path, "--partition", "F1,F9")
        self.assertEqual(code, 1)
        self.assertIn("unknown facets", err)


class TestCatalogCommand(CliTestCase):
    """Test case for the catalog command"""

    def test_emits_canonical_document(self):
        code, out, _ = self.run_cli("catalog", "cp", "2")
        self.assertEqual(code, 0)
        self.assertEqual(out, emit_pair_document(catalog.cp(2)))

    def test_unknown_entry(self):
        code, _, err = self.run_cli("catalog", "torus")
        self.assertEqual(code, 1)
        self.assertIn("unknown catalog entry", err)

    def test_non_integer_parameter(self):
        self.assertEqual(self.run_cli("catalog", "cp", "two")[0], 1)


class TestDelzantCommand(CliTestCase):
    """Test case for the delzant command"""

    def test_triangle(self):
        document = json.dumps({"n": 2, "inequalities": [
            {"normal": [-1, 0], "offset": 0},
            {"normal": [0, -1], "offset": 0},
            {"normal": [1, 1], "offset": "5/2"},
        ]})
        code, out, _ = self.run_cli("delzant", self.write("triangle.json", document))
        self.assertEqual(code, 0)
        self.assertIn("sign theorem: pass", out)
        self.assertIn("group: SU(3)", out)

    def test_json_report_echoes_polytope(self):
        document = json.dumps({"n": 2, "inequalities": [
            {"normal": [-1, 0], "offset": "0/2"},
            {"normal": [0, -1], "offset": 0},
            {"normal": [1, 1], "offset": "10/4"},
        ]})
        code, out, _ = self.run_cli("delzant", "--json", self.write("triangle.json", document))
        self.assertEqual(code, 0)
        report = json.loads(out)
        self.assertEqual(report["polytope"], {"n": 2, "inequalities": [
            {"normal": [-1, 0], "offset": 0},
            {"normal": [0, -1], "offset": 0},
            {"normal": [1, 1], "offset": "5/2"},
        ]})
        self.assertEqual(report["pair"]["facets"], ["F1", "F2", "F3"])

    def test_not_delzant(self):
        document = json.dumps({"n": 2, "inequalities": [
            {"normal": [-1, 0], "offset": 0},
            {"normal": [0, -1], "offset": 0},
            {"normal": [1, 2], "offset": 2},
        ]})
        code, _, err = self.run_cli("delzant", self.write("bad.json", document))
        self.assertEqual(code, 1)
        self.assertIn("not Delzant", err)


class TestMain(CliTestCase):
    """Test case for argument handling"""

    def test_no_command(self):
        code, out, _ = self.run_cli()
        self.assertEqual(code, 2)
        self.assertIn("usage", out)

    def test_verbose_logs_to_stderr(self):
        pair = catalog.cp(1).replace_vectors({"F2": (1,)})
        code, _, err = self.run_cli("symmetry", "--verbose", self.write_pair("line.json", pair))
        self.assertEqual(code, 0)
        self.assertIn("Normalized omniorientation", err)


def test_size_guard_skips_the_search(mocker, temp_directory, monkeypatch):
    monkeypatch.chdir(temp_directory)
    search = mocker.patch("src.torsym.main.aut_char_pair")
    path = os.path.join(temp_directory, "cp12.json")
    with open(path, "w", encoding="utf-8") as f:
        f.write(emit_pair_document(catalog.cp(12)))
    mocker.patch("sys.stderr", new_callable=io.StringIO)
    assert main(["aut", path]) == 1
    search.assert_not_called()


if __name__ == "__main__":
    unittest.main()

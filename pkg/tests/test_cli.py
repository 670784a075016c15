from __future__ import annotations

import contextlib
import csv
import io
import json
import sys
import tempfile
import unittest
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parents[1]
SRC_ROOT = REPO_ROOT / "src"
if str(SRC_ROOT) not in sys.path:
    sys.path.insert(0, str(SRC_ROOT))

from exptrap.cli import (  # noqa: E402
    EXIT_BAD_ARGS,
    EXIT_IO,
    EXIT_OK,
    EXIT_PLANNING,
    main,
)
from exptrap.harness.study_service import CSV_FIELDS  # noqa: E402


class CliTest(unittest.TestCase):
    def setUp(self) -> None:
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.root = Path(self.tmp.name)

    def run_cli(self, *argv: str) -> tuple[int, str, str]:
        out, err = io.StringIO(), io.StringIO()
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            code = main(list(argv))
        return code, out.getvalue(), err.getvalue()

    def test_plan_to_stdout(self) -> None:
        code, out, _ = self.run_cli("plan", "--budget", "100", "--precision", "40")
        self.assertEqual(code, EXIT_OK)
        payload = json.loads(out)
        self.assertEqual(payload["plan"]["n_per_dim"], [98])
        self.assertEqual(payload["plan"]["lambda"], "1.0")

    def test_plan_from_profile_file(self) -> None:
        profile = self.root / "profile.json"
        profile.write_text(
            json.dumps(
                {
                    "dims": 1,
                    "fourier": [{"kind": "exp", "a": "1", "b": "1"}],
                    "function": [{"kind": "dexp", "e": "1", "c": "1", "d": "1"}],
                }
            ),
            encoding="utf-8",
        )
        code, out, _ = self.run_cli(
            "plan", "--budget", "100", "--profile", str(profile), "--lambda", "0.5"
        )
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(json.loads(out)["plan"]["lambda"], "0.5")

    def test_common_options_before_subcommand(self) -> None:
        code, out, _ = self.run_cli(
            "--precision", "40", "--lambda", "0.5", "plan", "--budget", "100"
        )
        self.assertEqual(code, EXIT_OK)
        payload = json.loads(out)
        self.assertEqual(payload["plan"]["n_per_dim"], [98])
        self.assertEqual(payload["plan"]["lambda"], "0.5")

        target = self.root / "plan.json"
        code, out, _ = self.run_cli(
            "--out", str(target), "--precision", "40", "plan", "--budget", "100"
        )
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(out, "")
        written = json.loads(target.read_text(encoding="utf-8"))
        self.assertEqual(written["plan"]["n_per_dim"], [98])

        code, _, _ = self.run_cli("--precision", "10", "plan", "--budget", "100")
        self.assertEqual(code, EXIT_BAD_ARGS)

    def test_budget_too_small(self) -> None:
        code, out, err = self.run_cli("plan", "--budget", "1")
        self.assertEqual(code, EXIT_PLANNING)
        self.assertEqual(out, "")
        self.assertIn("budget too small", err)

    def test_bad_arguments(self) -> None:
        self.assertEqual(self.run_cli("sweep")[0], EXIT_BAD_ARGS)
        self.assertEqual(self.run_cli("plan")[0], EXIT_BAD_ARGS)
        self.assertEqual(self.run_cli("plan", "--budget", "ten")[0], EXIT_BAD_ARGS)
        self.assertEqual(
            self.run_cli("plan", "--budget", "10", "--integrand", "lorentzian")[0],
            EXIT_BAD_ARGS,
        )
        self.assertEqual(self.run_cli("study", "--budgets", "10,x")[0], EXIT_BAD_ARGS)
        self.assertEqual(self.run_cli("integrate", "--adaptive")[0], EXIT_BAD_ARGS)
        code = self.run_cli("plan", "--budget", "10", "--precision", "10")[0]
        self.assertEqual(code, EXIT_BAD_ARGS)

    def test_unwritable_output(self) -> None:
        blocker = self.root / "file"
        blocker.write_text("x", encoding="utf-8")
        code, _, err = self.run_cli(
            "plan", "--budget", "100", "--out", str(blocker / "plan.json")
        )
        self.assertEqual(code, EXIT_IO)
        self.assertIn("failed to write output", err)

    def test_missing_profile_file(self) -> None:
        code, _, _ = self.run_cli(
            "plan", "--budget", "100", "--profile", str(self.root / "absent.json")
        )
        self.assertEqual(code, EXIT_IO)

    def test_integrate_planned_and_adaptive(self) -> None:
        code, out, _ = self.run_cli("integrate", "--budget", "40", "--precision", "50")
        self.assertEqual(code, EXIT_OK)
        payload = json.loads(out)
        self.assertEqual(payload["truncation_box_used"], [[19, 19]])
        self.assertIn("total_bound", payload["report"])

        code, out, _ = self.run_cli(
            "integrate", "--integrand", "sinc", "--adaptive", "--M", "10", "--a", "5"
        )
        self.assertEqual(code, EXIT_OK)
        (k_minus, k_plus), = json.loads(out)["truncation_box_used"]
        self.assertNotEqual(k_minus, k_plus)

    def test_study_then_fit(self) -> None:
        study = self.root / "study.csv"
        code, _, _ = self.run_cli(
            "study",
            "--budgets",
            "20,40,60,80",
            "--precision",
            "80",
            "--out",
            str(study),
        )
        self.assertEqual(code, EXIT_OK)
        rows = list(csv.reader(study.read_text(encoding="utf-8").splitlines()))
        self.assertEqual(tuple(rows[0]), CSV_FIELDS)
        self.assertEqual([row[0] for row in rows[1:]], ["20", "40", "60", "80"])

        code, out, _ = self.run_cli("fit", "--input", str(study), "--precision", "80")
        self.assertEqual(code, EXIT_OK)
        fit = json.loads(out)
        self.assertEqual(fit["model"], "exp_rate")
        self.assertEqual(fit["points"], 4)

    def test_fit_missing_input(self) -> None:
        code, _, _ = self.run_cli("fit", "--input", str(self.root / "absent.csv"))
        self.assertEqual(code, EXIT_IO)

    def test_study_json_format(self) -> None:
        code, out, _ = self.run_cli(
            "study", "--budgets", "10,20", "--format", "json", "--precision", "40"
        )
        self.assertEqual(code, EXIT_OK)
        payload = json.loads(out)
        self.assertEqual([item["budget_N"] for item in payload], [10, 20])

    def test_lemma_check(self) -> None:
        code, out, _ = self.run_cli("lemma-check", "--precision", "40")
        self.assertEqual(code, EXIT_OK)
        rows = json.loads(out)
        self.assertEqual(len(rows), 12 + 27 + 36 + 1)
        printed = [row for row in rows if row["printed_form"]]
        self.assertEqual(len(printed), 1)
        self.assertFalse(printed[0]["holds"])
        self.assertTrue(all(row["holds"] for row in rows if not row["printed_form"]))


if __name__ == "__main__":
    unittest.main()

import json
import os
import unittest

import mock

from symkit.exceptions import InvalidJobError
from symkit.jobs import BenchReport, BenchRow, JobSpec

from . import utils


class JobSpecTestCase(unittest.TestCase):
    def setUp(self):
        self.heat = utils.corpus_path("heat.deq")

    def test_defaults(self):
        job = JobSpec("lie", self.heat)
        self.assertEqual(job.format, "text")
        self.assertEqual(job.degree, 1)
        self.assertTrue(job.timing)
        self.assertEqual(job.generators, [])

    def test_unknown_command(self):
        with self.assertRaises(InvalidJobError):
            JobSpec("solve", self.heat)

    def test_unknown_format(self):
        with self.assertRaises(InvalidJobError):
            JobSpec("lie", self.heat, format="xml")

    def test_qp_needs_an_action(self):
        with self.assertRaises(InvalidJobError):
            JobSpec("qp", utils.corpus_path("qp", "decay.json"))
        job = JobSpec("qp", utils.corpus_path("qp", "decay.json"),
                      action="lv")
        self.assertEqual(job.action, "lv")

    def test_degree(self):
        with self.assertRaises(InvalidJobError):
            JobSpec("qp", utils.corpus_path("qp", "decay.json"),
                    action="darboux", degree=0)

    def test_missing_file(self):
        with self.assertRaises(InvalidJobError):
            JobSpec("lie", utils.corpus_path("nothing.deq"))
        with self.assertRaises(InvalidJobError):
            JobSpec("lie", None)

    def test_bench_needs_a_directory(self):
        with self.assertRaises(InvalidJobError):
            JobSpec("bench", self.heat)
        self.assertEqual(JobSpec("bench", utils.CORPUS_DIR).path,
                         utils.CORPUS_DIR)

    def test_solver_parameters_are_validated(self):
        with self.assertRaises(InvalidJobError):
            JobSpec("lie", self.heat, params={"n1": 0})
        job = JobSpec("lie", self.heat, params={"n1": 3})
        self.assertEqual(job.params.n1, 3)

    @mock.patch.dict(os.environ, {"SYMKIT_BUDGET": "77"})
    def test_budget_from_environment(self):
        self.assertEqual(JobSpec("lie", self.heat).params.budget, 77)
        job = JobSpec("lie", self.heat, params={"budget": 9})
        self.assertEqual(job.params.budget, 9)

    @mock.patch.dict(os.environ, {"SYMKIT_BUDGET": "many"})
    def test_malformed_budget_in_environment(self):
        with self.assertRaises(InvalidJobError):
            JobSpec("lie", self.heat)

    def test_load_document(self):
        document = JobSpec("lie", self.heat).load_document()
        self.assertEqual(len(document.equations), 1)

    def test_bad_qp_system(self):
        job = JobSpec("qp", utils.fixture_path("bad_qp.json"), action="lv")
        with self.assertRaises(InvalidJobError):
            job.load_qp_system()

    def test_corpus_files(self):
        job = JobSpec("bench", utils.CORPUS_DIR)
        names = [os.path.basename(p) for p in job.corpus_files()]
        self.assertEqual(names, ["burgers.deq", "heat.deq", "transport.deq"])


class BenchReportTestCase(unittest.TestCase):
    def setUp(self):
        self.report = BenchReport()
        self.report.add(BenchRow("wave.deq", 4, "solved", 3, 1, 0.5))
        self.report.add(BenchRow("broken.deq", status="failed",
                                 error="line 1, column 3: bad", seconds=0.1))

    def test_rows_sorted_by_name(self):
        self.assertEqual([row.name for row in self.report.rows],
                         ["broken.deq", "wave.deq"])
        self.assertEqual([row.name for row in self.report.failed],
                         ["broken.deq"])

    def test_timing_can_be_left_out(self):
        rows = self.report.to_dict(timing=False)["systems"]
        self.assertNotIn("seconds", rows[1])
        self.assertEqual(rows[1]["generators"], 3)
        self.assertEqual(rows[0]["error"], "line 1, column 3: bad")
        self.assertNotIn("0.50s", self.report.to_text(timing=False))

    def test_json(self):
        payload = json.loads(self.report.to_json())
        self.assertEqual(payload["systems"][1]["seconds"], 0.5)

    def test_text(self):
        lines = self.report.to_text().splitlines()
        self.assertEqual(
            lines[1], "wave.deq: 4 equations, solved, 3 generators, "
                      "1 families, 0.50s")
        self.assertTrue(lines[0].endswith("(line 1, column 3: bad)"))

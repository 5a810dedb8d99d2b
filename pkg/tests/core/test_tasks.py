from ptwaveguide.core.loaders import load_run_config
from ptwaveguide.core.studies import FAILED, NO_EIGENVALUE
from ptwaveguide.core.tasks import compute_sweep_point, dispatch_sweep

from .base import BaseTestCase, with_run_file


class CeleryConfigurationTestCase(BaseTestCase):
    @with_run_file("strip.conf")
    def test_can_call_task(self, path):
        run_data = load_run_config(path).to_dict()

        direct = compute_sweep_point(run_data, 0.0)
        delayed = compute_sweep_point.delay(run_data, 0.0).get()

        self.assertEqual(direct, delayed)
        self.assertEqual(direct["status_bs"], NO_EIGENVALUE)
        self.assertEqual(direct["status_direct"], NO_EIGENVALUE)
        self.assertIsNone(direct["gap_ratio"])


class SweepPointTestCase(BaseTestCase):
    @with_run_file("collision.conf")
    def test_configuration_error_gives_a_failed_row(self, path):
        run_data = load_run_config(path).to_dict()
        with self.assertLogs("ptwaveguide.core.tasks", level="ERROR"):
            row = compute_sweep_point(run_data, 0.1)

        self.assertEqual(row, {"epsilon": 0.1, "status_direct": FAILED, "status_bs": FAILED})

    @with_run_file("strip.conf")
    def test_group_keeps_the_input_order(self, path):
        run = load_run_config(path)
        rows = dispatch_sweep(run, [0.0, 0.0], jobs=2)

        self.assertEqual(len(rows), 2)
        self.assertEqual([row["epsilon"] for row in rows], [0.0, 0.0])

    @with_run_file("repulsive.conf")
    def test_in_process_sweep(self, path):
        run = load_run_config(path)
        rows = dispatch_sweep(run, [0.1])
        self.assertEqual(rows[0]["status_bs"], NO_EIGENVALUE)
        self.assertIsNone(rows[0]["lambda_asym"])

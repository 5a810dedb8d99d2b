import os
import tempfile
from io import StringIO
from types import SimpleNamespace
from unittest.mock import patch

import scipy.special
from django.core.management import CommandError, call_command

from .base import BaseTestCase, run_file


class WaveguideCommandTestCase(BaseTestCase):
    def call(self, *args):
        out = StringIO()
        call_command("waveguide", *args, stdout=out)
        return out.getvalue().splitlines()

    def assertExitCode(self, code, *args):
        with self.assertRaises(CommandError) as cm:
            self.call(*args)
        self.assertEqual(cm.exception.returncode, code)
        return cm.exception


class ModesCommandTestCase(WaveguideCommandTestCase):
    def test_table_on_stdout(self):
        lines = self.call("modes", "--config", run_file("strip.conf"))

        self.assertEqual(lines[0], "j,kind,harmonic,mu_sq,a_re,a_im,biorthonormality")
        self.assertEqual(len(lines), 6)
        self.assertTrue(lines[1].startswith("0,alpha-mode,,2.5000000000000000e-01,"))
        self.assertTrue(lines[2].startswith("1,cosine-mode,1,"))

    def test_table_to_a_file(self):
        with tempfile.TemporaryDirectory() as folder:
            path = os.path.join(folder, "modes.csv")
            lines = self.call("modes", "--config", run_file("strip.conf"), "--csv", path)
            with open(path) as written:
                content = written.read().splitlines()

        self.assertEqual(lines, [])
        self.assertEqual(len(content), 6)

    def test_collision_is_a_configuration_error(self):
        self.assertExitCode(1, "modes", "--config", run_file("collision.conf"))

    def test_invalid_run_file(self):
        error = self.assertExitCode(1, "modes", "--config", run_file("negative_tolerance.conf"))
        self.assertIn("numerics.newton_tol", str(error))


class BoundStateCommandTestCase(WaveguideCommandTestCase):
    def test_repulsive_coupling(self):
        lines = self.call("boundstate", "--config", run_file("repulsive.conf"))

        self.assertEqual(
            lines[0], "method,status,lambda_re,lambda_im,k_re,k_im,residual,gap_deviation"
        )
        self.assertEqual(
            lines[1:],
            [
                "bs-root,no-eigenvalue,,,,,,",
                "direct,no-eigenvalue,,,,,,",
                "asymptotic,no-eigenvalue,,,,,,",
            ],
        )

    def test_unperturbed_operator(self):
        lines = self.call("boundstate", "--config", run_file("unperturbed.conf"))
        self.assertTrue(all(",no-eigenvalue," in line for line in lines[1:]))


class SweepCommandTestCase(WaveguideCommandTestCase):
    HEADER = (
        "epsilon,lambda_direct,lambda_bs,lambda_asym,k_bs,gap_ratio,fitted_order,"
        "status_direct,status_bs"
    )

    def test_empty_sweep_writes_the_header(self):
        lines = self.call("sweep", "--config", run_file("strip.conf"), "--epsilons", "")
        self.assertEqual(lines, [self.HEADER])

    def test_parallel_points(self):
        lines = self.call(
            "sweep", "--config", run_file("strip.conf"), "--epsilons", "0,0", "--jobs", "2"
        )

        self.assertEqual(len(lines), 3)
        for line in lines[1:]:
            self.assertTrue(line.startswith("0.0000000000000000e+00,"))
            self.assertTrue(line.endswith(",no-eigenvalue,no-eigenvalue"))

    def test_coupling_sweep_on_the_strip(self):
        lines = self.call("sweep", "--config", run_file("strip.conf"), "--epsilons", "0.2,0.3")

        self.assertEqual(lines[0], self.HEADER)
        rows = [dict(zip(self.HEADER.split(","), line.split(","))) for line in lines[1:]]
        self.assertEqual([float(row["epsilon"]) for row in rows], [0.2, 0.3])
        for row in rows:
            self.assertEqual((row["status_direct"], row["status_bs"]), ("ok", "ok"))
            self.assertLess(float(row["lambda_direct"]), 0.25)
            self.assertGreater(float(row["gap_ratio"]), 0.1)
            self.assertLess(float(row["gap_ratio"]), 0.25)
        self.assertGreaterEqual(float(rows[1]["fitted_order"]), 2.7)

    def test_negative_coupling_is_rejected(self):
        error = self.assertExitCode(
            1, "sweep", "--config", run_file("strip.conf"), "--epsilons", "0.1,-0.2"
        )
        self.assertIn("--epsilons", str(error))


class VerifyCommandTestCase(WaveguideCommandTestCase):
    def test_checks_pass(self):
        with tempfile.TemporaryDirectory() as folder:
            matrix = os.path.join(folder, "matrix.txt")
            lines = self.call(
                "verify", "--config", run_file("unperturbed.conf"), "--dump-matrix", matrix
            )
            self.assertTrue(os.path.getsize(matrix) > 0)

        self.assertTrue(lines[0].startswith("biorthonormality: ok"))
        self.assertEqual(lines[-1], "all checks passed")

    def test_failed_check_is_an_invariant_violation(self):
        failing = [SimpleNamespace(name="macdonald-k0", passed=False, worst=2.0)]
        with patch("ptwaveguide.core.studies.kernel_bound_suite", return_value=failing):
            error = self.assertExitCode(3, "verify", "--config", run_file("unperturbed.conf"))
        self.assertIn("macdonald-k0", str(error))


class KernelEvalCommandTestCase(WaveguideCommandTestCase):
    def test_bessel(self):
        (line,) = self.call("kernel-eval", "--kind", "bessel0", "--z", "1.0")
        re, im = map(float, line.split())

        self.assertAlmostEqual(re, scipy.special.k0(1.0), places=14)
        self.assertEqual(im, 0.0)

    def test_projected_kernel_reports_its_truncation(self):
        (line,) = self.call("kernel-eval", "--kind", "Rperp", "--k", "0.2", "--r", "1.0")
        self.assertIn("tail_bound=", line)
        self.assertIn("modes=", line)

    def test_missing_spectral_variable(self):
        self.assertExitCode(1, "kernel-eval", "--kind", "L")

    def test_domain_error(self):
        self.assertExitCode(2, "kernel-eval", "--kind", "bessel0", "--z", "1j")

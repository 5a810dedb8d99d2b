from dataclasses import replace
from types import SimpleNamespace
from unittest.mock import patch

from ptwaveguide.core.bs import Method
from ptwaveguide.core.exceptions import InvariantViolation, NoRoot, ResolutionLimit
from ptwaveguide.core.direct import discrete_eigenvalue_below_threshold
from ptwaveguide.core.factories import RunDataFactory
from ptwaveguide.core.loaders import (
    build_direct_numerics,
    build_waveguide_config,
    load_run_config,
    validate_run_config,
)
from ptwaveguide.core.studies import (
    FAILED,
    NO_EIGENVALUE,
    OK,
    Outcome,
    bs_equivalence,
    boundstate_rows,
    modes_rows,
    run_verify,
    solve,
    sweep_rows,
)

from .base import BaseTestCase, with_run_file, with_run_text

SMALL_BOX_RUN = """
problem.d = 3.141592653589793
problem.alpha0 = 0.5
problem.epsilon = 0.1
problem.beta.mean = -1.0
numerics.j_max = 4
numerics.longitudinal_nodes = 32
numerics.L = 12.0
numerics.h_x = 0.2
numerics.h_u = 0.39269908169872414
"""

EQUIVALENCE_RUN = """
problem.n = 1
problem.d = 3.141592653589793
problem.alpha0 = 0.5
problem.epsilon = 0.2
problem.beta.mean = -1.0
numerics.j_max = 6
numerics.longitudinal_nodes = 64
"""


class SolveTestCase(BaseTestCase):
    def test_labels(self):
        def verdict():
            raise ResolutionLimit("too small")

        def failure():
            raise NoRoot("left the half-plane")

        self.assertEqual(solve(Method.DIRECT, verdict).status, "resolution-limit")
        self.assertEqual(solve(Method.BS_ROOT, lambda: None).status, NO_EIGENVALUE)
        with self.assertLogs("ptwaveguide.core.studies", level="WARNING"):
            self.assertEqual(solve(Method.BS_ROOT, failure).status, FAILED)

        outcome = solve(Method.ASYMPTOTIC, lambda: SimpleNamespace(lambda_=0.2))
        self.assertEqual(outcome.status, OK)
        self.assertEqual(outcome.lambda_, 0.2)


class ModesTableTestCase(BaseTestCase):
    @with_run_file("strip.conf")
    def test_rows(self, path):
        rows = modes_rows(load_run_config(path))

        self.assertEqual(len(rows), 5)
        self.assertEqual(rows[0]["kind"], "alpha-mode")
        self.assertIsNone(rows[0]["harmonic"])
        self.assertEqual(rows[0]["mu_sq"], 0.25)
        self.assertEqual([row["j"] for row in rows], [0, 1, 2, 3, 4])
        self.assertLess(rows[0]["biorthonormality"], 1e-10)


class BoundStateTableTestCase(BaseTestCase):
    @with_run_text(SMALL_BOX_RUN)
    def test_small_box_cannot_resolve_the_gap(self, path):
        rows = boundstate_rows(load_run_config(path))
        by_method = {row["method"]: row for row in rows}

        self.assertEqual([row["method"] for row in rows], ["bs-root", "direct", "asymptotic"])
        self.assertEqual(by_method["direct"]["status"], "resolution-limit")
        self.assertNotIn("lambda_re", by_method["direct"])
        self.assertEqual(by_method["bs-root"]["status"], OK)
        self.assertEqual(by_method["bs-root"]["gap_deviation"], 0.0)
        self.assertLess(by_method["asymptotic"]["gap_deviation"], 0.5)

    @with_run_file("repulsive.conf")
    def test_repulsive_coupling(self, path):
        rows = boundstate_rows(load_run_config(path))
        self.assertEqual([row["status"] for row in rows], [NO_EIGENVALUE] * 3)


class SweepTableTestCase(BaseTestCase):
    def test_fitted_order(self):
        run = validate_run_config(RunDataFactory())
        points = [
            {"epsilon": epsilon, "gap_ratio": 0.25 + 0.4 * epsilon} for epsilon in (0.1, 0.05)
        ]
        points.append({"epsilon": 0.0, "gap_ratio": None})
        rows = sweep_rows(run, points)

        self.assertIsNone(rows[0]["fitted_order"])
        self.assertAlmostEqual(rows[1]["fitted_order"], 3.0, places=10)
        self.assertIsNone(rows[2]["fitted_order"])

    def test_no_fitted_order_on_the_layer(self):
        run = validate_run_config(RunDataFactory(problem__n="2"))
        points = [{"epsilon": 0.1, "gap_ratio": None}, {"epsilon": 0.05, "gap_ratio": None}]
        self.assertEqual([row["fitted_order"] for row in sweep_rows(run, points)], [None, None])


class VerifyTestCase(BaseTestCase):
    @with_run_file("unperturbed.conf")
    def test_unperturbed_operator_passes(self, path):
        results = run_verify(load_run_config(path))
        names = [result.name for result in results]

        self.assertEqual(names[0], "biorthonormality")
        self.assertEqual(names[-2:], ["composition-identity", "bs-equivalence"])
        self.assertIn("pt-commutation", names)
        self.assertTrue(all(result.passed for result in results))
        self.assertEqual(results[-1].note, f"(direct: {NO_EIGENVALUE})")

        parabola = next(result for result in results if result.name == "parabola-enclosure")
        self.assertEqual(str(parabola).split(": ")[1].split()[0], "ok")

    @with_run_file("unperturbed.conf")
    def test_first_failure_stops_the_run(self, path):
        failing = [SimpleNamespace(name="macdonald-k1", passed=False, worst=2.0)]
        reported = []
        with patch("ptwaveguide.core.studies.kernel_bound_suite", return_value=failing):
            with self.assertRaises(InvariantViolation) as cm:
                run_verify(load_run_config(path), report=reported.append)

        self.assertEqual(cm.exception.check, "macdonald-k1")
        names = [result.name for result in reported]
        self.assertEqual(names, ["biorthonormality", "macdonald-k1"])

    @with_run_text(EQUIVALENCE_RUN)
    def test_bs_operator_at_the_direct_eigenvalue(self, path):
        run = load_run_config(path)
        result = bs_equivalence(run, build_waveguide_config(run))

        self.assertTrue(result.passed, str(result))
        self.assertLessEqual(result.value, 1e-3)
        self.assertTrue(result.note.startswith("(gap deviation"))

    @with_run_text(EQUIVALENCE_RUN)
    def test_bs_equivalence_catches_a_wrong_direct_eigenvalue(self, path):
        run = load_run_config(path)
        config = build_waveguide_config(run)
        found = discrete_eigenvalue_below_threshold(config, build_direct_numerics(run, config))
        wrong_gap = 1.2 * (config.threshold - found.lambda_)
        shifted = replace(found, lambda_=config.threshold - wrong_gap)

        outcome = Outcome(method=Method.DIRECT, status=OK, result=shifted)
        with patch("ptwaveguide.core.studies._solve_direct", return_value=outcome):
            result = bs_equivalence(run, config)
        self.assertFalse(result.passed)
        self.assertGreater(result.value, 1e-3)

import logging
import math

import numpy as np
from django.core.management.base import BaseCommand, CommandError

from ptwaveguide.core.exceptions import (
    ConfigurationError,
    InvalidRunConfig,
    InvariantViolation,
    NumericalFailure,
)
from ptwaveguide.core.kernels import (
    SpectralVariable,
    bessel_k,
    free_resolvent_kernel,
    projected_resolvent_kernel,
    regular_kernel_N,
    singular_kernel_L,
)
from ptwaveguide.core.loaders import load_run_config, output_precision, run_overrides
from ptwaveguide.core.renderers import CSVRenderer, format_value
from ptwaveguide.core.serializers import SweepSerializer
from ptwaveguide.core.settings import app_settings
from ptwaveguide.core.studies import (
    BOUNDSTATE_HEADER,
    MODES_HEADER,
    SWEEP_HEADER,
    boundstate_rows,
    modes_rows,
    run_verify,
    sweep_rows,
)
from ptwaveguide.core.tasks import dispatch_sweep
from ptwaveguide.core.transverse import TransversalBasis, threshold

logger = logging.getLogger(__name__)

KERNEL_KINDS = ("bessel0", "bessel1", "free", "L", "N", "Rperp")


class Command(BaseCommand):
    help = "Spectral computations for the PT-symmetric Robin waveguide"

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(dest="subcommand", required=True)

        modes = subparsers.add_parser("modes", help="Transversal eigensystem table")
        boundstate = subparsers.add_parser("boundstate", help="Weak-coupling eigenvalue")
        sweep = subparsers.add_parser("sweep", help="Eigenvalue over a list of couplings")
        verify = subparsers.add_parser("verify", help="Run the invariant checks")
        for subparser in (modes, boundstate, sweep, verify):
            subparser.add_argument("--config", required=True, help="Run configuration file")
            subparser.add_argument("--csv", help="Write the table to this path")

        sweep.add_argument("--epsilons", help="Comma separated couplings")
        sweep.add_argument("--jobs", type=int, default=1, help="Parallel sweep points")
        verify.add_argument("--seed", type=int, default=0, help="Seed for random test fields")
        verify.add_argument("--dump-matrix", help="Write the assembled matrix to this path")

        kernel = subparsers.add_parser("kernel-eval", help="Evaluate one kernel value")
        kernel.add_argument("--kind", choices=KERNEL_KINDS, required=True)
        kernel.add_argument("--n", type=int, choices=[1, 2], default=1)
        kernel.add_argument("--z", type=complex, help="Argument of K0, K1 and the free kernel")
        kernel.add_argument("--k", type=complex, help="Spectral variable of L, N and Rperp")
        kernel.add_argument("--r", type=float, default=1.0, help="Longitudinal distance")
        kernel.add_argument("--u", type=float, default=0.0)
        kernel.add_argument("--u2", type=float, default=0.0)
        kernel.add_argument("--alpha0", type=float, default=0.5)
        kernel.add_argument("--d", type=float, default=math.pi)

    def handle(self, *args, **options):
        subcommand = options["subcommand"]
        handler = getattr(self, f"handle_{subcommand.replace('-', '_')}")
        try:
            handler(**options)
        except (ConfigurationError, NumericalFailure, InvariantViolation) as exc:
            raise CommandError(str(exc), returncode=exc.exit_code)

    def _run(self, options):
        run = load_run_config(options["config"])
        return run, app_settings.override(**run_overrides(run))

    def _emit(self, rows, header, run, options):
        content = CSVRenderer().render(
            rows, renderer_context={"header": header, "precision": output_precision(run)}
        )
        path = options.get("csv") or run.output.csv_path
        if path:
            with open(path, "wb") as output:
                output.write(content)
            logger.info(f"Wrote {len(rows)} rows to {path}")
        else:
            self.stdout.write(content.decode(CSVRenderer.charset), ending="")

    def handle_modes(self, **options):
        run, overrides = self._run(options)
        with overrides:
            self._emit(modes_rows(run), MODES_HEADER, run, options)

    def handle_boundstate(self, **options):
        run, overrides = self._run(options)
        with overrides:
            self._emit(boundstate_rows(run), BOUNDSTATE_HEADER, run, options)

    def handle_sweep(self, **options):
        run, overrides = self._run(options)
        epsilons = run.sweep.epsilons or []
        if options.get("epsilons") is not None:
            serializer = SweepSerializer(data={"epsilons": options["epsilons"]})
            if not serializer.is_valid():
                raise InvalidRunConfig(f"--epsilons: {serializer.errors['epsilons'][0]}")
            epsilons = serializer.validated_data["epsilons"]
        with overrides:
            points = dispatch_sweep(run, list(epsilons), jobs=options.get("jobs") or 1)
            self._emit(sweep_rows(run, points), SWEEP_HEADER, run, options)

    def handle_verify(self, **options):
        run, overrides = self._run(options)

        def report(result):
            self.stdout.write(str(result))

        with overrides:
            run_verify(
                run,
                seed=options.get("seed") or 0,
                matrix_path=options.get("dump_matrix"),
                report=report,
            )
        self.stdout.write("all checks passed")

    def handle_kernel_eval(self, **options):
        kind, n = options["kind"], options["n"]
        precision = app_settings.Output.precision

        if kind in ("bessel0", "bessel1", "free"):
            if options.get("z") is None:
                raise InvalidRunConfig(f"--z is required for {kind}")
            z = options["z"]
            if kind == "free":
                value = complex(free_resolvent_kernel(n, z, options["r"]))
            else:
                value = complex(bessel_k(0 if kind == "bessel0" else 1, z))
            self.stdout.write(self._complex(value, precision))
            return

        if options.get("k") is None:
            raise InvalidRunConfig(f"--k is required for {kind}")
        alpha0, d = options["alpha0"], options["d"]
        sv = SpectralVariable.from_k(options["k"], n, threshold(alpha0, d))
        basis = TransversalBasis.build(alpha0, d, 0)
        x = np.zeros(n)
        x2 = np.zeros(n)
        x2[0] = options["r"]
        u, u2 = options["u"], options["u2"]

        if kind == "L":
            value = complex(singular_kernel_L(sv, u, u2, basis))
        elif kind == "N":
            value = complex(regular_kernel_N(sv, x, x2, u, u2, basis))
        else:
            evaluation = projected_resolvent_kernel(sv, x, x2, u, u2, basis)
            self.stdout.write(
                f"{self._complex(evaluation.value, precision)} "
                f"tail_bound={format_value(evaluation.tail_bound, precision)} "
                f"modes={evaluation.modes}"
            )
            return
        self.stdout.write(self._complex(value, precision))

    def _complex(self, value, precision):
        return f"{format_value(value.real, precision)} {format_value(value.imag, precision)}"

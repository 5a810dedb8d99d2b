"""
Run configuration files.

A run file is a list of `key = value` lines. Dotted keys open sections,
`#` starts a comment line:

    problem.n = 1
    problem.alpha0 = 0.5
    problem.beta.kind = gaussian
    numerics.newton_tol = 1e-12

Values stay strings until `RunConfigSerializer` types and checks them.
"""

import logging
from dataclasses import replace
from pathlib import Path

from box import Box

from .bs import BSDiscretization
from .direct import DirectNumerics
from .exceptions import InvalidRunConfig
from .profiles import DecayClass, PerturbationProfile
from .serializers import RunConfigSerializer
from .settings import app_settings
from .transverse import WaveguideConfig

logger = logging.getLogger(__name__)


PROFILE_BUILDERS = {
    DecayClass.GAUSSIAN.value: PerturbationProfile.gaussian,
    DecayClass.COMPACT_BUMP.value: PerturbationProfile.bump,
    "odd-gaussian": PerturbationProfile.odd_gaussian,
}


def parse_config_text(text: str) -> dict:
    data: dict = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, separator, value = line.partition("=")
        key = key.strip()
        if not separator or not key:
            raise InvalidRunConfig(f"line {number}: expected `key = value`, got {raw!r}")

        *sections, name = key.split(".")
        node = data
        for section in sections:
            node = node.setdefault(section, {})
            if not isinstance(node, dict):
                raise InvalidRunConfig(f"line {number}: {key} extends a plain value")
        if name in node:
            raise InvalidRunConfig(f"line {number}: duplicate key {key}")
        node[name] = value.strip()
    return data


def flatten_errors(errors, prefix: str = "") -> list[str]:
    """DRF error trees as `dotted.field: message` lines."""
    if isinstance(errors, dict):
        lines = []
        for name, value in errors.items():
            if name == "non_field_errors":
                lines.extend(flatten_errors(value, prefix))
            else:
                lines.extend(flatten_errors(value, f"{prefix}.{name}" if prefix else name))
        return lines
    if isinstance(errors, (list, tuple)):
        return [line for item in errors for line in flatten_errors(item, prefix)]
    return [f"{prefix}: {errors}" if prefix else str(errors)]


def make_run(validated_data) -> Box:
    return Box(
        validated_data,
        frozen_box=True,
        default_box=True,
        default_box_attr=None,
        default_box_create_on_get=False,
    )


def validate_run_config(data: dict) -> Box:
    serializer = RunConfigSerializer(data=data)
    if not serializer.is_valid():
        lines = flatten_errors(serializer.errors)
        raise InvalidRunConfig("\n".join(lines), errors=serializer.errors)
    return make_run(serializer.validated_data)


def load_run_config(path) -> Box:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InvalidRunConfig(f"Can not read {path}: {exc}")
    logger.debug(f"Loading run configuration from {path}")
    return validate_run_config(parse_config_text(text))


def build_profile(run: Box) -> PerturbationProfile:
    beta = run.problem.beta
    builder = PROFILE_BUILDERS[beta.kind]
    options = {"width": beta.width, "center": beta.center}
    if beta.kind == "odd-gaussian":
        if beta.amplitude is not None:
            options["amplitude"] = beta.amplitude
    else:
        options.update(amplitude=beta.amplitude, mean=beta.mean)
    profile = builder(run.problem.n, **options)
    profile.validate_decay()
    return profile


def build_waveguide_config(run: Box, epsilon: float | None = None) -> WaveguideConfig:
    problem = run.problem
    return WaveguideConfig(
        n=problem.n,
        d=problem.d,
        alpha0=problem.alpha0,
        epsilon=problem.epsilon if epsilon is None else epsilon,
        beta=build_profile(run),
    )


def run_overrides(run: Box) -> dict:
    """Library settings replaced for the duration of one run."""
    numerics = run.numerics
    overrides = {}
    if numerics.newton_tol is not None:
        overrides["NEWTON_TOLERANCE"] = numerics.newton_tol
    if numerics.end_bc is not None:
        overrides["DEFAULT_END_BC"] = numerics.end_bc
    if run.output.precision is not None:
        overrides["PRECISION"] = run.output.precision
    return overrides


def build_bs_discretization(run: Box, config: WaveguideConfig) -> BSDiscretization:
    numerics = run.numerics
    return BSDiscretization.default(
        config,
        modes=numerics.j_max,
        order=numerics.longitudinal_nodes,
        transverse_nodes=numerics.quad_order,
    )


def build_direct_numerics(run: Box, config: WaveguideConfig) -> DirectNumerics:
    """
    The run's grid, or the default one. An explicit grid is used as given
    unless `numerics.extrapolate` asks for the h_u extrapolation.
    """
    numerics = run.numerics
    end_bc = numerics.end_bc or app_settings.Direct.default_end_bc
    if numerics.L is None:
        chosen = replace(DirectNumerics.default(config), end_bc=end_bc)
    else:
        chosen = DirectNumerics(L=numerics.L, h_x=numerics.h_x, h_u=numerics.h_u, end_bc=end_bc)
    if numerics.extrapolate is not None:
        chosen = replace(chosen, extrapolate=numerics.extrapolate)
    return chosen


def output_precision(run: Box) -> int:
    return run.output.precision or app_settings.Output.precision


__all__ = (
    "build_bs_discretization",
    "build_direct_numerics",
    "build_profile",
    "build_waveguide_config",
    "flatten_errors",
    "load_run_config",
    "make_run",
    "parse_config_text",
    "run_overrides",
    "validate_run_config",
)

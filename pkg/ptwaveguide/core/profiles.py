import logging
from dataclasses import dataclass, field, replace
from enum import StrEnum
from typing import Callable

import numpy as np

from .exceptions import DecayViolation
from .quadrature import LongitudinalGrid

logger = logging.getLogger(__name__)

DECAY_RADII = (10.0, 20.0, 40.0)
DECAY_CEILING = 1e-6


class DecayClass(StrEnum):
    GAUSSIAN = "gaussian"
    COMPACT_BUMP = "bump"
    CUSTOM = "custom"


def decay_exponent(n: int, delta: float = 0.1) -> float:
    """Weight |x|^p under which β and its derivatives must vanish at infinity."""
    return (5.0 if n == 1 else 4.0) + delta


@dataclass(frozen=True)
class PerturbationProfile:
    """
    The boundary-coupling perturbation β, so that α(x) = α0 + εβ(x).

    All evaluators take points as arrays of shape (..., n). `grad`
    returns shape (..., n) and `hess_trace` the transverse Laplacian
    Δ'β.
    """

    n: int
    decay_class: DecayClass
    mean: float
    width: float
    center: tuple[float, ...]
    value_fn: Callable = field(repr=False)
    grad_fn: Callable = field(repr=False)
    laplacian_fn: Callable = field(repr=False)
    support: float | None = None
    label: str = "custom"

    def eval(self, x) -> np.ndarray:
        return self.value_fn(self._offsets(x))

    def grad(self, x) -> np.ndarray:
        return self.grad_fn(self._offsets(x))

    def hess_trace(self, x) -> np.ndarray:
        return self.laplacian_fn(self._offsets(x))

    def _offsets(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.n == 1 and (x.ndim == 0 or x.shape[-1] != 1):
            x = x[..., None]
        return x - np.asarray(self.center)

    def envelope(self, x) -> np.ndarray:
        """Pointwise max of |β|, |∇β| and |Δ'β|."""
        gradient = np.abs(self.grad(x)).max(axis=-1)
        return np.maximum(np.maximum(np.abs(self.eval(x)), gradient), np.abs(self.hess_trace(x)))

    def support_radius(self, tolerance: float = 1e-10) -> float:
        """
        Half-width R of the box around the center outside of which β and
        its first and second derivatives stay below `tolerance`.
        """
        if self.support is not None:
            return self.support

        step = self.width / 8.0
        radius = step
        for _ in range(4096):
            radii = np.array([radius, 1.25 * radius, 1.5 * radius, 2.0 * radius])
            if all(self._axis_envelope(radii) < tolerance):
                logger.debug(f"{self.label} support radius {radius:.4g} at {tolerance:g}")
                return radius
            radius += step
        raise DecayViolation(f"{self.label} profile does not fall below {tolerance} at r={radius}")

    def _axis_envelope(self, radii) -> np.ndarray:
        values = np.zeros_like(radii)
        for axis in range(self.n):
            for sign in (-1.0, 1.0):
                points = np.zeros((len(radii), self.n))
                points[:, axis] = sign * radii
                points += np.asarray(self.center)
                values = np.maximum(values, self.envelope(points))
        return values

    def validate_decay(self, delta: float = 0.1) -> None:
        exponent = decay_exponent(self.n, delta)
        radii = np.array(DECAY_RADII) * max(1.0, self.width)
        weighted = radii**exponent * self._axis_envelope(radii)
        monotone = all(np.diff(weighted) <= 0.0)

        if not monotone or weighted[-1] >= DECAY_CEILING:
            raise DecayViolation(
                f"{self.label} profile does not decay faster than |x|^-{exponent:.2f}: "
                f"weighted samples {weighted.tolist()}"
            )

    def quadrature_mean(self, order: int = 96) -> float:
        grid = LongitudinalGrid(
            n=self.n, center=self.center, radius=self.support_radius(), order=order
        )
        return float(np.dot(grid.weights, self.eval(grid.points)))

    @classmethod
    def gaussian(cls, n, amplitude=None, width=1.0, center=None, mean=None):
        """b·exp(-|x - c|²/σ²); give either the amplitude b or the mean ⟨β⟩."""
        volume = (np.sqrt(np.pi) * width) ** n
        amplitude = _resolve_amplitude(amplitude, mean, volume)
        sigma2 = width**2

        def value(y):
            return amplitude * np.exp(-(y**2).sum(axis=-1) / sigma2)

        def gradient(y):
            return value(y)[..., None] * (-2.0 * y / sigma2)

        def laplacian(y):
            rho2 = (y**2).sum(axis=-1)
            return value(y) * (4.0 * rho2 / sigma2**2 - 2.0 * n / sigma2)

        return cls(
            n=n,
            decay_class=DecayClass.GAUSSIAN,
            mean=amplitude * volume,
            width=width,
            center=_center(center, n),
            value_fn=value,
            grad_fn=gradient,
            laplacian_fn=laplacian,
            label="gaussian",
        )

    @classmethod
    def bump(cls, n, amplitude=None, width=1.0, center=None, mean=None):
        """
        Compactly supported C² bump b·(1 - |x - c|²/σ²)³ on the ball of
        radius σ.
        """
        volume = width * 32.0 / 35.0 if n == 1 else np.pi * width**2 / 4.0
        amplitude = _resolve_amplitude(amplitude, mean, volume)
        sigma2 = width**2

        def inside(y):
            s = (y**2).sum(axis=-1) / sigma2
            return s, np.clip(1.0 - s, 0.0, None)

        def value(y):
            _, t = inside(y)
            return amplitude * t**3

        def gradient(y):
            _, t = inside(y)
            return (amplitude * -6.0 * t**2 / sigma2)[..., None] * y

        def laplacian(y):
            s, t = inside(y)
            return amplitude * (24.0 * t * s / sigma2 - 6.0 * n * t**2 / sigma2)

        return cls(
            n=n,
            decay_class=DecayClass.COMPACT_BUMP,
            mean=amplitude * volume,
            width=width,
            center=_center(center, n),
            value_fn=value,
            grad_fn=gradient,
            laplacian_fn=laplacian,
            support=width,
            label="bump",
        )

    @classmethod
    def odd_gaussian(cls, n, amplitude=1.0, width=1.0, center=None):
        """b·((x₁ - c₁)/σ)·exp(-|x - c|²/σ²), a profile with ⟨β⟩ = 0."""
        sigma2 = width**2

        def envelope(y):
            return amplitude * np.exp(-(y**2).sum(axis=-1) / sigma2)

        def value(y):
            return envelope(y) * y[..., 0] / width

        def gradient(y):
            grad = value(y)[..., None] * (-2.0 * y / sigma2)
            grad[..., 0] += envelope(y) / width
            return grad

        def laplacian(y):
            rho2 = (y**2).sum(axis=-1)
            return value(y) * (4.0 * rho2 / sigma2**2 - (2.0 * n + 4.0) / sigma2)

        return cls(
            n=n,
            decay_class=DecayClass.GAUSSIAN,
            mean=0.0,
            width=width,
            center=_center(center, n),
            value_fn=value,
            grad_fn=gradient,
            laplacian_fn=laplacian,
            label="odd-gaussian",
        )

    @classmethod
    def constant(cls, n, value=1.0):
        """β ≡ value. Not an admissible perturbation; used to exercise the gauge transform."""
        return cls(
            n=n,
            decay_class=DecayClass.CUSTOM,
            mean=float("nan"),
            width=1.0,
            center=_center(None, n),
            value_fn=lambda y: np.full(y.shape[:-1], float(value)),
            grad_fn=lambda y: np.zeros(y.shape),
            laplacian_fn=lambda y: np.zeros(y.shape[:-1]),
            label="constant",
        )

    @classmethod
    def custom(
        cls, n, value, gradient, laplacian, width=1.0, center=None, mean=None, support=None
    ):
        profile = cls(
            n=n,
            decay_class=DecayClass.CUSTOM,
            mean=float("nan") if mean is None else mean,
            width=width,
            center=_center(center, n),
            value_fn=value,
            grad_fn=gradient,
            laplacian_fn=laplacian,
            support=support,
        )
        if mean is None:
            profile = replace(profile, mean=profile.quadrature_mean())
        return profile


def _resolve_amplitude(amplitude, mean, volume):
    if amplitude is None and mean is None:
        raise ValueError("Either amplitude or mean is required")
    if mean is not None:
        return mean / volume
    return amplitude


def _center(center, n):
    if center is None:
        return (0.0,) * n
    center = tuple(float(c) for c in np.atleast_1d(center))
    if len(center) != n:
        raise ValueError(f"center {center} does not have {n} coordinates")
    return center

"""
Special functions and integral kernels of the waveguide resolvent.

The unperturbed resolvent kernel is the mode sum

    Σ_j ψ_j(u) R_{μ_j² - λ}(x, x') conj(φ_j(u'))

where R_z is the free longitudinal resolvent kernel. Near the threshold
the j = 0 term is split into a singular rank-one part L and a regular
part N; the remaining modes form the projected resolvent R⊥.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    DomainError,
    OnCutError,
    SingularPoint,
    TailBoundFailure,
    ThresholdSingularity,
)
from .settings import app_settings
from .transverse import ModeKind, TransversalBasis

logger = logging.getLogger(__name__)

EULER_GAMMA = 0.5772156649015329
SERIES_TERMS = 40

_k = np.arange(SERIES_TERMS)
_FACTORIAL = np.cumprod(np.concatenate([[1.0], np.arange(1.0, SERIES_TERMS + 1)]))
_HARMONIC = np.concatenate([[0.0], np.cumsum(1.0 / np.arange(1.0, SERIES_TERMS + 1))])
# coefficients of (z²/4)^k in the power series of I0, I1/(z/2), and the K0, K1 remainders
_I0 = 1.0 / _FACTORIAL[_k] ** 2
_I1 = 1.0 / (_FACTORIAL[_k] * _FACTORIAL[_k + 1])
_K0 = _HARMONIC[_k] * _I0
_K1 = (_HARMONIC[_k] + _HARMONIC[_k + 1] - 2.0 * EULER_GAMMA) * _I1


def _power_series(coefficients, z):
    quarter = z * z / 4.0
    total = np.zeros_like(quarter)
    for c in coefficients[::-1]:
        total = total * quarter + c
    return total


def bessel_i(order: int, z):
    """Modified Bessel function I_0 or I_1 by its power series."""
    z = np.asarray(z)
    if order == 0:
        return _power_series(_I0, z)
    if order == 1:
        return 0.5 * z * _power_series(_I1, z)
    raise DomainError(f"Only orders 0 and 1 are available, got {order}")


def _k_series(order, z):
    log_half = np.log(z / 2.0)
    if order == 0:
        return -(log_half + EULER_GAMMA) * bessel_i(0, z) + _power_series(_K0, z)
    return 1.0 / z + log_half * bessel_i(1, z) - 0.25 * z * _power_series(_K1, z)


def _k_integral(order, z):
    """
    e^{-z} ∫_0^∞ e^{-z(cosh t - 1)} cosh(νt) dt by the trapezoid rule,
    which converges geometrically in the step for this integrand.
    """
    step = app_settings.Kernels.bessel_step
    smallest = np.min(z.real) if z.size else 1.0
    t_max = np.arccosh(1.0 + 50.0 / smallest) + 2.0
    nodes = np.arange(step, t_max + step, step)

    total = 0.5 * np.ones_like(z)
    for t in nodes:
        total = total + np.exp(-z * (np.cosh(t) - 1.0)) * np.cosh(order * t)
    return step * total * np.exp(-z)


def bessel_k(order: int, z):
    """
    Macdonald function K_0 or K_1.

    Real arguments must be positive; complex arguments must lie in the
    open right half-plane. Power series with the logarithmic term for
    |z| ≤ 2, integral representation beyond.
    """
    if order not in (0, 1):
        raise DomainError(f"Only orders 0 and 1 are available, got {order}")

    z = np.asarray(z)
    if not np.iscomplexobj(z):
        z = z.astype(float)
    if np.any(z.real <= 0.0):
        raise DomainError("Macdonald functions need arguments with positive real part")

    small = np.abs(z) <= app_settings.Kernels.bessel_series_cutoff
    result = np.empty_like(z, dtype=complex if np.iscomplexobj(z) else float)
    if np.any(small):
        result[small] = _k_series(order, z[small])
    if np.any(~small):
        result[~small] = _k_integral(order, z[~small])
    return result[()] if result.ndim == 0 else result


def regularized_k0(log_kappa, r):
    """
    K0(κr) + ln κ, with κ = exp(log_kappa).

    Stays finite as κ → 0 (log_kappa → -∞), where it tends to
    -(ln(r/2) + γ).
    """
    log_kappa, r = np.broadcast_arrays(np.asarray(log_kappa), np.asarray(r, dtype=float))
    kappa = np.exp(log_kappa)
    z = kappa * r
    small = np.abs(z) <= app_settings.Kernels.bessel_series_cutoff
    dtype = complex if np.iscomplexobj(log_kappa) else float
    result = np.empty(z.shape, dtype=dtype)

    if np.any(small):
        zs, rs, ls = z[small], r[small], log_kappa[small]
        i0_excess = bessel_i(0, zs) - 1.0
        log_term = np.where(zs == 0, 0.0, ls * i0_excess)
        result[small] = (
            -(np.log(rs / 2.0) + EULER_GAMMA) * bessel_i(0, zs) - log_term + _power_series(_K0, zs)
        )
    if np.any(~small):
        result[~small] = bessel_k(0, z[~small]) + log_kappa[~small]
    return result[()] if result.ndim == 0 else result


def disc_integral_k0(log_kappa, rho, regularized: bool = False):
    """
    (1/2π) ∫ over the disc |y| < ρ of K0(κ|y|), plus ln κ times the
    disc area when `regularized`. Used on the diagonal of planar
    Nyström matrices, where the kernel itself is singular.
    """
    log_kappa, rho = np.broadcast_arrays(np.asarray(log_kappa), np.asarray(rho, dtype=float))
    kappa = np.exp(log_kappa)
    z = kappa * rho
    small = np.abs(z) <= app_settings.Kernels.bessel_series_cutoff
    dtype = complex if np.iscomplexobj(log_kappa) else float
    result = np.empty(z.shape, dtype=dtype)

    if np.any(small):
        zs, rs, ls = z[small], rho[small], log_kappa[small]
        # I1(z)/z through its series, finite at z = 0
        i1_over_z = 0.5 * _power_series(_I1, zs)
        log_coefficient = (0.5 if regularized else 0.0) - i1_over_z
        log_term = np.where(zs == 0, 0.0 if regularized else -np.inf, ls * log_coefficient)
        result[small] = rs**2 * (
            -i1_over_z * np.log(rs / 2.0) + 0.25 * _power_series(_K1, zs) + log_term
        )
    if np.any(~small):
        zl, rl, ll = z[~small], rho[~small], log_kappa[~small]
        value = (1.0 - zl * bessel_k(1, zl)) / kappa[~small] ** 2
        if regularized:
            value = value + 0.5 * rl**2 * ll
        result[~small] = value
    return result[()] if result.ndim == 0 else result


@dataclass(frozen=True)
class SpectralVariable:
    """
    The spectral parameter near the threshold μ0².

    n=1: k = √(μ0² - λ), so λ = μ0² - k².
    n=2: k = 1/ln√(μ0² - λ), so λ = μ0² - exp(2/k).
    """

    k: complex
    lambda_: complex
    n: int
    mu0_sq: float

    @classmethod
    def from_k(cls, k, n: int, mu0_sq: float) -> "SpectralVariable":
        k = complex(k)
        if n == 1:
            lambda_ = mu0_sq - k * k
        elif k == 0:
            lambda_ = complex(mu0_sq)
        else:
            lambda_ = mu0_sq - np.exp(2.0 / k)
        return cls(k=k, lambda_=complex(lambda_), n=n, mu0_sq=mu0_sq)

    @classmethod
    def from_lambda(cls, lambda_, n: int, mu0_sq: float) -> "SpectralVariable":
        gap = complex(mu0_sq - lambda_)
        if n == 1:
            k = np.sqrt(gap)
        elif gap == 0:
            k = -0.0 + 0j
        else:
            k = 2.0 / np.log(gap)
        return cls(k=complex(k), lambda_=complex(lambda_), n=n, mu0_sq=mu0_sq)

    @property
    def physical(self) -> bool:
        return self.k.real > 0 if self.n == 1 else self.k.real < 0

    @property
    def log_kappa(self) -> complex:
        """ln √(μ0² - λ)."""
        if self.n == 1:
            return complex(np.log(self.k)) if self.k != 0 else complex(-np.inf)
        return 1.0 / self.k if self.k != 0 else complex(-np.inf)

    @property
    def kappa(self) -> complex:
        """√(μ0² - λ), the decay rate of the threshold mode."""
        if self.n == 1:
            return self.k
        return complex(np.exp(self.log_kappa))

    def kappa_j(self, mu_sq):
        return np.sqrt(np.asarray(mu_sq, dtype=complex) - self.lambda_)


@dataclass(frozen=True)
class KernelEval:
    value: complex
    tail_bound: float
    modes: int = 0


def free_resolvent_kernel(n: int, z: complex, r):
    """Kernel of (-Δ' - z)⁻¹ on ℝⁿ at distance r, for z off [0, ∞)."""
    z = complex(z)
    if z.imag == 0 and z.real >= 0:
        raise OnCutError(f"z = {z} lies on the cut [0, inf)")
    r = np.asarray(r, dtype=float)
    if n >= 2 and np.any(r == 0):
        raise SingularPoint(f"The {n}-dimensional kernel is singular at coincident points")

    s = np.sqrt(-z)
    if n == 1:
        return np.exp(-s * r) / (2.0 * s)
    if n == 2:
        return bessel_k(0, s * r) / (2.0 * np.pi)
    if n == 3:
        return np.exp(-s * r) / (4.0 * np.pi * r)
    raise DomainError(f"No resolvent kernel for dimension {n}")


def longitudinal_factor(n: int, kappa, r):
    """R_{-κ²}(r) for an array of decay rates κ with positive real part."""
    kappa = np.asarray(kappa, dtype=complex)
    if n == 1:
        return np.exp(-kappa * r) / (2.0 * kappa)
    return bessel_k(0, kappa * r) / (2.0 * np.pi)


def singular_factor(sv: SpectralVariable) -> complex:
    """Scalar of the rank-one part: 1/(2k) for n=1 and -1/(2πk) for n=2."""
    if sv.k == 0:
        raise ThresholdSingularity("The singular part diverges at k = 0")
    if sv.n == 1:
        return 1.0 / (2.0 * sv.k)
    return -1.0 / (2.0 * np.pi * sv.k)


def regular_factor(sv: SpectralVariable, r):
    """
    Scalar part of N: (e^{-kr} - 1)/(2k) for n=1 and
    (K0(κr) + ln κ)/(2π) for n=2.
    """
    r = np.asarray(r, dtype=float)
    if sv.n == 1:
        if sv.k == 0:
            return -0.5 * r + 0j
        return np.expm1(-sv.k * r) / (2.0 * sv.k)
    if np.any(r == 0):
        raise SingularPoint("The planar regular kernel is singular at coincident points")
    return regularized_k0(sv.log_kappa, r) / (2.0 * np.pi)


def singular_kernel_L(sv: SpectralVariable, u, u2, basis: TransversalBasis):
    return basis.psi(0, u) * singular_factor(sv) * np.conj(basis.phi(0, u2))


def regular_kernel_N(sv: SpectralVariable, x, x2, u, u2, basis: TransversalBasis):
    r = _distance(x, x2)
    return basis.psi(0, u) * regular_factor(sv, r) * np.conj(basis.phi(0, u2))


def _distance(x, x2):
    return float(np.linalg.norm(np.atleast_1d(np.asarray(x, dtype=float) - x2)))


def _check_projected_domain(sv: SpectralVariable, basis: TransversalBasis):
    if basis.size < 2:
        return
    mu1_sq = basis.modes[1].mu_sq
    if sv.lambda_.imag == 0 and sv.lambda_.real >= mu1_sq:
        raise OnCutError(f"lambda = {sv.lambda_} lies on [mu_1^2, inf) = [{mu1_sq}, inf)")


def _tail_bound(sv: SpectralVariable, basis: TransversalBasis, r: float) -> float:
    """
    Majorant of Σ_{j>J} |ψ_j(u) R_j(r) φ_j(u')| built from |ψ_j| ≤ max(1, |α0|/μ_j),
    |A_j| decreasing in μ_j and the geometric decay of the longitudinal kernels.
    """
    if r == 0:
        return float("inf")

    harmonics = [mode.harmonic for mode in basis.modes if mode.kind == ModeKind.COSINE_MODE]
    mu_next = (max(harmonics, default=0) + 1) * np.pi / basis.d
    alpha0 = abs(basis.alpha0)
    if mu_next <= alpha0 or sv.lambda_.real >= mu_next**2:
        return float("inf")

    spread = np.sqrt(1.0 - max(sv.lambda_.real, 0.0) / mu_next**2)
    psi_bound = max(1.0, alpha0 / mu_next)
    a_bound = 2.0 * mu_next**2 / ((mu_next**2 - alpha0**2) * basis.d)
    constant = psi_bound**2 * a_bound
    geometric = np.exp(-spread * mu_next * r) / (-np.expm1(-spread * r * np.pi / basis.d))

    if sv.n == 1:
        return float(constant * geometric / (2.0 * spread * mu_next))
    decay = np.sqrt(np.pi / (2.0 * spread * mu_next * r))
    return float(constant * decay * geometric / (2 * np.pi))


def _projected_sum(sv, r, u, u2, basis):
    kappas = sv.kappa_j(basis.mu_sq[1:])
    if sv.n >= 2 and r == 0:
        raise SingularPoint("The planar projected kernel is singular at coincident points")
    factors = longitudinal_factor(sv.n, kappas, r)
    psi = basis.psi_table(np.atleast_1d(u))[1:, 0]
    phi = basis.phi_table(np.atleast_1d(u2))[1:, 0]
    return complex(np.sum(psi * factors * np.conj(phi)))


def projected_resolvent_kernel(
    sv: SpectralVariable, x, x2, u, u2, basis: TransversalBasis, J=None, tolerance=None
) -> KernelEval:
    """
    Projected resolvent R⊥ at a point: the mode sum over 1 ≤ j ≤ J plus
    a bound on the discarded tail. With `J=None` the truncation grows
    until the tail falls below `tolerance` relative to the partial sum.
    """
    r = _distance(x, x2)

    if J is not None:
        if J < 1:
            raise ValueError("The projected kernel needs J >= 1")
        basis = TransversalBasis.build(basis.alpha0, basis.d, J)
        _check_projected_domain(sv, basis)
        return KernelEval(
            value=_projected_sum(sv, r, u, u2, basis),
            tail_bound=_tail_bound(sv, basis, r),
            modes=J,
        )

    tolerance = tolerance or app_settings.Kernels.tail_tolerance
    max_modes = app_settings.Kernels.max_modes
    modes = 8
    while True:
        basis = TransversalBasis.build(basis.alpha0, basis.d, modes)
        _check_projected_domain(sv, basis)
        value = _projected_sum(sv, r, u, u2, basis)
        tail = _tail_bound(sv, basis, r)
        if tail <= tolerance * max(abs(value), np.finfo(float).tiny):
            logger.debug(f"Projected kernel converged with J={modes}, tail {tail:.3e}")
            return KernelEval(value=value, tail_bound=tail, modes=modes)
        if modes >= max_modes:
            raise TailBoundFailure(
                f"Tail bound {tail:.3e} above tolerance at J={modes}", modes=modes, tail_bound=tail
            )
        modes = min(2 * modes, max_modes)


def mode_sum_kernel(sv: SpectralVariable, x, x2, u, u2, basis: TransversalBasis) -> complex:
    """The unperturbed resolvent kernel truncated to the modes of `basis`."""
    r = _distance(x, x2)
    terms = []
    for j, mode in enumerate(basis.modes):
        z = sv.lambda_ - mode.mu_sq
        kernel = free_resolvent_kernel(sv.n, z, r)
        terms.append(basis.psi(j, u) * kernel * np.conj(basis.phi(j, u2)))
    return complex(np.sum(terms))


def schur_holmgren_norm(kernel, weights, column_weights=None) -> float:
    """
    (sup_x ∫|K(x, y)| dy · sup_y ∫|K(x, y)| dx)^{1/2} for a kernel sampled
    on quadrature nodes, an upper bound of the operator norm on L².
    """
    magnitude = np.abs(np.asarray(kernel))
    column_weights = weights if column_weights is None else column_weights
    rows = (magnitude * np.asarray(weights)[None, :]).sum(axis=1).max()
    columns = (magnitude * np.asarray(column_weights)[:, None]).sum(axis=0).max()
    return float(np.sqrt(rows * columns))


def lattice_resolvent_kernel(s: complex, h: float, cells: int) -> np.ndarray:
    """
    Green's matrix G of -D²_h + s on the interior nodes 1..cells-1 of a
    uniform grid with Dirichlet walls at nodes 0 and `cells`, normalized
    so that u = h·G·f solves the lattice problem, like a quadrature
    convolution with the continuous kernel e^{-κ|x-x'|}/(2κ).
    """
    theta = np.arccosh(complex(1.0 + 0.5 * s * h * h))
    if theta.real < 0:
        theta = -theta
    if theta.real == 0:
        raise OnCutError(f"s = {s} lies in the spectrum of the lattice Laplacian")
    q = np.exp(-theta)

    i = np.arange(1, cells)
    separation = np.abs(i[:, None] - i[None, :])
    total = i[:, None] + i[None, :]
    numerator = (
        q**separation - q**total - q ** (2 * cells - total) + q ** (2 * cells - separation)
    )
    return h * numerator / (2.0 * np.sinh(theta) * (1.0 - q ** (2 * cells)))


@dataclass(frozen=True)
class BoundCheck:
    name: str
    passed: bool
    worst: float
    limit: float


def kernel_bound_suite(samples: int = 10_000, seed: int = 0) -> list[BoundCheck]:
    """
    Sample the pointwise kernel estimates that the contraction argument
    rests on: the regularized-kernel ratio, its k-derivative, and the
    Macdonald-function inequalities.
    """
    rng = np.random.default_rng(seed)
    k = rng.uniform(0.0, 5.0, samples) + 1j * rng.uniform(-5.0, 5.0, samples)
    r = rng.uniform(1e-6, 10.0, samples)
    w = k * r

    ratio = np.abs(np.expm1(-w) / w)
    derivative = np.abs((-w * np.exp(-w) - np.exp(-w) + 1.0) / (2.0 * k**2)) / r**2

    z = 10.0 ** rng.uniform(-3.0, np.log10(50.0), samples)
    k0, k1 = bessel_k(0, z), bessel_k(1, z)
    step = 1e-6
    slope = (bessel_k(0, z + step) - bessel_k(0, z - step)) / (2.0 * step)

    checks = [
        ("regularized-ratio", ratio.max(), 1.0 + 1e-12),
        ("regularized-k-derivative", derivative.max(), 1.0 + 1e-12),
        ("macdonald-zK1", np.abs(z * k1).max(), 1.0 + 1e-12),
        ("macdonald-K1-minus-inverse", np.abs(k1 - 1.0 / z).max(), 1.0),
        ("macdonald-zK0", np.abs(z * k0).max(), 1.0),
        ("macdonald-K0-log", np.abs((k0 + np.log(z)) * np.exp(-z)).max(), 1.0),
        ("macdonald-derivative", (np.abs(slope + k1) / np.maximum(1.0, k1)).max(), 1e-5),
    ]
    return [
        BoundCheck(name=name, passed=bool(worst <= limit), worst=float(worst), limit=limit)
        for name, worst, limit in checks
    ]

"""
Birman-Schwinger reduction of the weakly coupled waveguide.

The gauge transform U_ε = exp(-iεβu) maps H_α to H_{α0} + εZ_ε, where Z_ε
is a second-order differential expression supported where β is. Writing
Z_ε = C_ε* D as a sum of 2n+3 factor pairs, λ is an eigenvalue of H_α iff
-1 is an eigenvalue of K = εD(H_{α0} - λ)⁻¹C_ε*. The resolvent splits
into a rank-one singular part L and a regular part M, and the eigenvalue
condition reduces to the scalar equation k = G(k, ε).

Numerically the operator is assembled in the transposed order εR Z, which
has the same nonzero spectrum as K and acts on the transversal mode
coefficients Φ_j(x_a) of a scalar field at Gauss-Legendre nodes x_a.
"""

import logging
from dataclasses import dataclass, field
from enum import StrEnum
from functools import cached_property, lru_cache
from typing import Callable

import numpy as np
import scipy.linalg
import scipy.sparse.linalg

from .exceptions import (
    BorderlineCase,
    ConvergenceFailure,
    GridError,
    NeumannSeriesDivergence,
    NoRoot,
    RealityViolation,
)
from .kernels import (
    SpectralVariable,
    disc_integral_k0,
    longitudinal_factor,
    regular_factor,
    singular_factor,
)
from .profiles import PerturbationProfile
from .quadrature import LongitudinalGrid, gauss_legendre
from .settings import app_settings
from .transverse import TransversalBasis, WaveguideConfig, default_quad_order

logger = logging.getLogger(__name__)

DENSE_ASSEMBLY_LIMIT = 4000


class Derivative(StrEnum):
    NONE = "none"
    X = "x"
    U = "u"


class Method(StrEnum):
    BS_ROOT = "bs-root"
    DIRECT = "direct"
    ASYMPTOTIC = "asymptotic"


@dataclass(frozen=True)
class SpectralResult:
    lambda_: complex
    k: complex
    epsilon: float
    method: Method
    residual: float = 0.0
    iterations: int = 0


def signed_root(f):
    """(f)_{1/2} := sgn(f)|f|^{1/2}."""
    return np.sign(f) * np.sqrt(np.abs(f))


@dataclass(frozen=True)
class FactorDescriptor:
    """
    A multiplication operator coefficient(x)·u^power, optionally followed
    by a first derivative in x_axis or in u.
    """

    label: str
    coefficient: Callable = field(repr=False)
    u_power: int = 0
    derivative: Derivative = Derivative.NONE
    axis: int | None = None


def _signed_root_of(fn, scale=1.0):
    def coefficient(x):
        return scale * signed_root(fn(x))

    return coefficient


def _abs_root_of(fn):
    def coefficient(x):
        return np.sqrt(np.abs(fn(x)))

    return coefficient


def _partial(beta: PerturbationProfile, axis: int):
    def derivative(x):
        return beta.grad(x)[..., axis]

    return derivative


@dataclass(frozen=True)
class FieldSample:
    """Values and first derivatives of a scalar field at scattered points (x, u)."""

    x: np.ndarray
    u: np.ndarray
    value: np.ndarray
    gradient: np.ndarray
    du: np.ndarray

    @classmethod
    def random(cls, n: int, d: float, size: int = 200, seed: int = 0, radius: float = 4.0):
        """Samples of a smooth wave packet exp(-|x - c|²/s²)(a cos νu + b sin νu)."""
        rng = np.random.default_rng(seed)
        x = rng.uniform(-radius, radius, (size, n))
        u = rng.uniform(0.0, d, size)
        center = rng.uniform(-1.0, 1.0, n)
        spread = rng.uniform(1.0, 2.0)
        nu = rng.integers(0, 4) * np.pi / d + rng.uniform(0.0, 1.0)
        a, b = rng.normal(size=2) + 1j * rng.normal(size=2)

        y = x - center
        envelope = np.exp(-(y**2).sum(axis=-1) / spread**2)
        transverse = a * np.cos(nu * u) + b * np.sin(nu * u)
        d_transverse = nu * (-a * np.sin(nu * u) + b * np.cos(nu * u))
        return cls(
            x=x,
            u=u,
            value=envelope * transverse,
            gradient=(-2.0 * y / spread**2) * (envelope * transverse)[:, None],
            du=envelope * d_transverse,
        )

    def derivative(self, factor: FactorDescriptor) -> np.ndarray:
        if factor.derivative == Derivative.X:
            return self.gradient[:, factor.axis]
        if factor.derivative == Derivative.U:
            return self.du
        return self.value


@dataclass(frozen=True)
class FactorizedPerturbation:
    """Z_ε = Σ_{i≤n+2} A_i* B_i + ε Σ_{i>n+2} A_i* B_i."""

    beta: PerturbationProfile = field(repr=False)
    n: int
    epsilon: float
    a_factors: tuple[FactorDescriptor, ...]
    b_factors: tuple[FactorDescriptor, ...]

    @property
    def size(self) -> int:
        return len(self.a_factors)

    @property
    def weights(self) -> np.ndarray:
        """1 for the first n+2 pairs, ε for the remaining n+1."""
        return np.where(np.arange(self.size) < self.n + 2, 1.0, self.epsilon)

    def pairs(self):
        return zip(self.weights, self.a_factors, self.b_factors)

    def apply(self, sample: FieldSample) -> np.ndarray:
        total = np.zeros_like(sample.value, dtype=complex)
        for weight, a, b in self.pairs():
            b_value = b.coefficient(sample.x) * sample.derivative(b)
            total += weight * a.coefficient(sample.x) * sample.u**a.u_power * b_value
        return total


def factorize_perturbation(
    beta: PerturbationProfile, n: int, epsilon: float
) -> FactorizedPerturbation:
    a_factors, b_factors = [], []

    for axis in range(n):
        partial = _partial(beta, axis)
        a_factors.append(FactorDescriptor(f"A{axis + 1}", _signed_root_of(partial, 2j), u_power=1))
        b_factors.append(
            FactorDescriptor(
                f"B{axis + 1}", _abs_root_of(partial), derivative=Derivative.X, axis=axis
            )
        )

    a_factors.append(FactorDescriptor(f"A{n + 1}", _signed_root_of(beta.eval, 2j)))
    b_factors.append(
        FactorDescriptor(f"B{n + 1}", _abs_root_of(beta.eval), derivative=Derivative.U)
    )

    a_factors.append(
        FactorDescriptor(f"A{n + 2}", _signed_root_of(beta.hess_trace, 1j), u_power=1)
    )
    b_factors.append(FactorDescriptor(f"B{n + 2}", _abs_root_of(beta.hess_trace)))

    a_factors.append(FactorDescriptor(f"A{n + 3}", beta.eval))
    b_factors.append(FactorDescriptor(f"B{n + 3}", beta.eval))

    for axis in range(n):
        partial = _partial(beta, axis)
        a_factors.append(FactorDescriptor(f"A{n + 4 + axis}", partial, u_power=2))
        b_factors.append(FactorDescriptor(f"B{n + 4 + axis}", partial))

    return FactorizedPerturbation(
        beta=beta, n=n, epsilon=epsilon, a_factors=tuple(a_factors), b_factors=tuple(b_factors)
    )


def apply_z(beta: PerturbationProfile, epsilon: float, sample: FieldSample) -> np.ndarray:
    """Z_ε Ψ evaluated directly from its defining expression."""
    x, u = sample.x, sample.u
    gradient = beta.grad(x)
    value = beta.eval(x)
    return (
        2j * u * (gradient * sample.gradient).sum(axis=-1)
        + 2j * value * sample.du
        + 1j * u * beta.hess_trace(x) * sample.value
        + epsilon * (value**2 + u**2 * (gradient**2).sum(axis=-1)) * sample.value
    )


def composition_residual(factorized: FactorizedPerturbation, sample: FieldSample) -> float:
    direct = apply_z(factorized.beta, factorized.epsilon, sample)
    return float(np.abs(factorized.apply(sample) - direct).max())


def _default_test_field(config: WaveguideConfig):
    center = np.asarray(config.beta.center)
    spread = max(1.0, config.beta.width)

    def test_field(x, u):
        envelope = np.exp(-((x - center) ** 2).sum(axis=-1) / spread**2)
        return envelope * (np.cos(np.pi * u / config.d) + 0.5j * np.sin(2 * np.pi * u / config.d))

    return test_field


def gauge_transform_check(config: WaveguideConfig, test_field=None, h=None, radius=None) -> float:
    """
    Largest interior-node difference between U⁻¹(-Δ)UΨ and (-Δ + εZ_ε)Ψ,
    both discretized by second-order central differences on a uniform
    grid. Vanishes identically at ε = 0 and is O(h²) otherwise.
    """
    test_field = test_field or _default_test_field(config)
    h = h or (0.05 if config.n == 1 else 0.1)
    radius = radius or 4.0 * max(1.0, config.beta.width)
    epsilon = config.epsilon

    axes = [np.arange(c - radius, c + radius + 0.5 * h, h) for c in config.beta.center]
    cells = max(2, int(round(config.d / h)))
    u_axis = np.linspace(0.0, config.d, cells + 1)
    steps = [h] * config.n + [config.d / cells]

    mesh = np.meshgrid(*axes, u_axis, indexing="ij")
    points = np.stack(mesh[:-1], axis=-1)
    u = mesh[-1]
    psi = test_field(points, u)

    value = config.beta.eval(points)
    gradient = config.beta.grad(points)
    laplacian = config.beta.hess_trace(points)

    phase = np.exp(-1j * epsilon * value * u)
    transformed = np.conj(phase) * _negative_laplacian(phase * psi, steps)

    derivatives = np.gradient(psi, *steps)
    z = (
        2j * u * sum(gradient[..., axis] * derivatives[axis] for axis in range(config.n))
        + 2j * value * derivatives[-1]
        + 1j * u * laplacian * psi
        + epsilon * (value**2 + u**2 * (gradient**2).sum(axis=-1)) * psi
    )
    expected = _negative_laplacian(psi, steps) + epsilon * z

    interior = tuple(slice(1, -1) for _ in steps)
    residual = float(np.abs(transformed[interior] - expected[interior]).max())
    logger.debug(f"Gauge transform residual {residual:.3e} at h={h}, epsilon={epsilon}")
    return residual


def _negative_laplacian(f, steps) -> np.ndarray:
    result = np.zeros_like(f)
    interior = tuple(slice(1, -1) for _ in steps)
    for axis, step in enumerate(steps):
        forward = [slice(1, -1)] * len(steps)
        backward = [slice(1, -1)] * len(steps)
        forward[axis] = slice(2, None)
        backward[axis] = slice(None, -2)
        result[interior] -= (f[tuple(forward)] - 2.0 * f[interior] + f[tuple(backward)]) / step**2
    return result


@dataclass(frozen=True)
class BSDiscretization:
    """Gauss-Legendre nodes in x and u and the number of transversal modes J."""

    grid: LongitudinalGrid
    modes: int
    transverse_nodes: int

    @classmethod
    def default(cls, config: WaveguideConfig, modes=None, order=None, transverse_nodes=None):
        settings = app_settings.BirmanSchwinger
        modes = settings.modes if modes is None else modes
        if order is None:
            order = settings.longitudinal_nodes if config.n == 1 else settings.planar_nodes
        transverse_nodes = max(
            transverse_nodes or settings.transverse_nodes, default_quad_order(modes)
        )
        radius = config.beta.support_radius(settings.support_tolerance)
        grid = LongitudinalGrid(n=config.n, center=config.beta.center, radius=radius, order=order)
        return cls(grid=grid, modes=modes, transverse_nodes=transverse_nodes)

    @property
    def size(self) -> int:
        return (self.modes + 1) * self.grid.size


@dataclass(frozen=True)
class TransverseTables:
    basis: TransversalBasis
    nodes: np.ndarray
    weights: np.ndarray

    @cached_property
    def psi(self) -> np.ndarray:
        return self.basis.psi_table(self.nodes)

    @cached_property
    def dpsi(self) -> np.ndarray:
        return self.basis.dpsi_table(self.nodes)

    @cached_property
    def projector(self) -> np.ndarray:
        """Row j integrates against conj(φ_j)."""
        return np.conj(self.basis.phi_table(self.nodes)) * self.weights

    def profile(self, derivative: Derivative) -> np.ndarray:
        return self.dpsi if derivative == Derivative.U else self.psi

    def coupling(self, u_power: int, derivative: Derivative) -> np.ndarray:
        """(φ_j', u^p ψ_j) or (φ_j', u^p ψ_j') as a (modes × modes) matrix."""
        return (self.projector * self.nodes**u_power) @ self.profile(derivative).T


@lru_cache(maxsize=16)
def transverse_tables(alpha0: float, d: float, modes: int, nodes: int) -> TransverseTables:
    basis = TransversalBasis.build(alpha0, d, modes)
    u, w = gauss_legendre(nodes, 0.0, d)
    return TransverseTables(basis=basis, nodes=u, weights=w)


def _local_operator(coefficient, factor: FactorDescriptor, grid: LongitudinalGrid):
    if factor.derivative == Derivative.X:
        return coefficient[:, None] * grid.derivatives[factor.axis]
    return np.diag(coefficient)


def perturbation_matrix(config: WaveguideConfig, discretization: BSDiscretization) -> np.ndarray:
    """Z_ε on the mode coefficients, as the product C_ε* D of the discretized factors."""
    factorized = factorize_perturbation(config.beta, config.n, config.epsilon)
    tables = transverse_tables(
        config.alpha0, config.d, discretization.modes, discretization.transverse_nodes
    )
    grid = discretization.grid
    points = grid.points

    matrix = np.zeros((discretization.size, discretization.size), dtype=complex)
    for weight, a, b in factorized.pairs():
        coefficient = weight * a.coefficient(points) * b.coefficient(points)
        coupling = tables.coupling(a.u_power, b.derivative)
        matrix += np.kron(coupling, _local_operator(coefficient, b, grid))

    logger.debug(f"Assembled perturbation matrix of size {discretization.size}")
    matrix.flags.writeable = False
    return matrix


@dataclass(frozen=True)
class BirmanSchwingerOperator:
    """The discretized operator εR(λ)Z at a fixed spectral variable."""

    sv: SpectralVariable
    config: WaveguideConfig
    discretization: BSDiscretization
    assembled_perturbation: np.ndarray | None = field(default=None, compare=False, repr=False)

    @property
    def grid(self) -> LongitudinalGrid:
        return self.discretization.grid

    @cached_property
    def tables(self) -> TransverseTables:
        return transverse_tables(
            self.config.alpha0,
            self.config.d,
            self.discretization.modes,
            self.discretization.transverse_nodes,
        )

    @cached_property
    def perturbation(self) -> np.ndarray:
        if self.assembled_perturbation is not None:
            return self.assembled_perturbation
        return perturbation_matrix(self.config, self.discretization)

    @cached_property
    def regular_blocks(self) -> list[np.ndarray]:
        """Nyström matrices of N (mode 0) and of the free kernels of modes j ≥ 1."""
        mu_sq = self.tables.basis.mu_sq
        kappas = self.sv.kappa_j(mu_sq[1:])
        if self.config.n == 1:
            blocks = [self._line_block(None)] + [self._line_block(kappa) for kappa in kappas]
        else:
            blocks = [self._plane_block(None)] + [self._plane_block(kappa) for kappa in kappas]
        return blocks

    def _line_block(self, kappa):
        rule = self.grid.split_rule
        distances = np.abs(self.grid.points[:, :1] - rule.nodes)
        if kappa is None:
            kernel = regular_factor(self.sv, distances)
        else:
            kernel = longitudinal_factor(1, kappa, distances)
        return np.einsum("is,isj->ij", kernel * rule.weights, rule.interpolation)

    def _plane_block(self, kappa):
        grid = self.grid
        distances = grid.distances.copy()
        np.fill_diagonal(distances, 1.0)

        if kappa is None:
            kernel = regular_factor(self.sv, distances)
            diagonal = disc_integral_k0(self.sv.log_kappa, grid.cell_radii, regularized=True)
        else:
            kernel = longitudinal_factor(2, kappa, distances)
            diagonal = disc_integral_k0(np.log(kappa), grid.cell_radii)

        block = kernel * grid.weights[None, :]
        block[np.diag_indices_from(block)] = diagonal
        return block

    def singular_block(self) -> np.ndarray:
        """The rank-one L on mode 0: ℓ Σ_b w_b f(x_b)."""
        scale = singular_factor(self.sv)
        return scale * np.broadcast_to(self.grid.weights, (self.grid.size, self.grid.size))

    def _apply_blocks(self, blocks) -> np.ndarray:
        nx = self.grid.size
        rows = [
            block @ self.perturbation[j * nx : (j + 1) * nx, :] for j, block in enumerate(blocks)
        ]
        return self.config.epsilon * np.vstack(rows)

    def m_core(self) -> np.ndarray:
        """εR_M Z without the singular part; defined at k = 0."""
        return self._apply_blocks(self.regular_blocks)

    def core(self) -> np.ndarray:
        """εR Z, with the same nonzero spectrum as K = εD R C_ε*."""
        blocks = list(self.regular_blocks)
        blocks[0] = blocks[0] + self.singular_block()
        return self._apply_blocks(blocks)

    def dense(self) -> np.ndarray:
        """
        K = εD R C_ε* on the (2n+3)-component field space sampled at the
        (x, u) quadrature nodes. Only for small discretizations.
        """
        factorized = factorize_perturbation(self.config.beta, self.config.n, self.config.epsilon)
        tables = self.tables
        grid = self.grid
        points = grid.points
        size = factorized.size * self.discretization.transverse_nodes * grid.size
        if size > DENSE_ASSEMBLY_LIMIT:
            raise GridError(
                f"Dense Birman-Schwinger matrix of size {size} exceeds {DENSE_ASSEMBLY_LIMIT}"
            )

        d_rows, c_columns = [], []
        for weight, a, b in factorized.pairs():
            local = _local_operator(b.coefficient(points), b, grid)
            d_rows.append(np.kron(tables.profile(b.derivative).T, local))
            c_columns.append(
                np.kron(
                    tables.projector * tables.nodes**a.u_power,
                    np.diag(weight * a.coefficient(points)),
                )
            )

        blocks = list(self.regular_blocks)
        blocks[0] = blocks[0] + self.singular_block()
        resolvent = scipy.linalg.block_diag(*blocks)
        return self.config.epsilon * np.vstack(d_rows) @ resolvent @ np.hstack(c_columns)

    def eigenvalues(self) -> np.ndarray:
        return scipy.linalg.eigvals(self.core())

    def nearest_eigenvalue(self, target: complex = -1.0) -> complex:
        eigenvalues = self.eigenvalues()
        return complex(eigenvalues[np.argmin(np.abs(eigenvalues - target))])

    def norm_m(self) -> float:
        """Spectral radius of εR_M Z, which governs the Neumann series of (I + M)⁻¹."""
        matrix = self.m_core()
        if not np.any(matrix):
            return 0.0
        try:
            largest = scipy.sparse.linalg.eigs(matrix, k=1, which="LM", return_eigenvectors=False)
        except (scipy.sparse.linalg.ArpackNoConvergence, ValueError, TypeError):
            largest = scipy.linalg.eigvals(matrix)
        return float(np.abs(largest).max())

    def check_contraction(self) -> float:
        radius = self.norm_m()
        if radius >= 1.0:
            raise NeumannSeriesDivergence(
                f"Spectral radius of M is {radius:.4f} at k={self.sv.k:.6g}", norm=radius
            )
        if radius >= app_settings.BirmanSchwinger.contraction_warning:
            logger.warning(f"Spectral radius of M is {radius:.4f}, epsilon may be too large")
        return radius

    def ground_vector(self) -> np.ndarray:
        vector = np.zeros(self.discretization.size, dtype=complex)
        vector[: self.grid.size] = 1.0
        return vector

    def rank_one_reduction(self, order=None) -> complex:
        """
        pref·(φ0, Z(I + M)⁻¹ψ0), with pref = -ε/2 (n=1) or ε/(2π) (n=2).
        A finite `order` replaces the inverse by its Neumann series.
        """
        m = self.m_core()
        source = self.ground_vector()
        if order is None:
            field = np.linalg.solve(np.eye(len(source)) + m, source)
        else:
            field, term = source.copy(), source
            for _ in range(order):
                term = -(m @ term)
                field = field + term
        projected = (self.perturbation @ field)[: self.grid.size]
        return complex(_reduction_prefactor(self.config) * np.dot(self.grid.weights, projected))


def _reduction_prefactor(config: WaveguideConfig) -> float:
    if config.n == 1:
        return -config.epsilon / 2.0
    return config.epsilon / (2.0 * np.pi)


def assemble_bs_operator(
    sv: SpectralVariable, config: WaveguideConfig, discretization: BSDiscretization
) -> np.ndarray:
    return BirmanSchwingerOperator(sv, config, discretization).core()


def _operator(k, epsilon, config, discretization, perturbation=None):
    config = config.with_epsilon(epsilon)
    discretization = discretization or BSDiscretization.default(config)
    sv = SpectralVariable.from_k(k, config.n, config.threshold)
    return BirmanSchwingerOperator(sv, config, discretization, perturbation)


def G(k, epsilon, config, discretization=None, check_contraction=True, perturbation=None):
    """
    The right-hand side of k = G(k, ε). `perturbation` may carry Z_ε
    already assembled for this ε and discretization.
    """
    if epsilon == 0:
        return 0j
    operator = _operator(k, epsilon, config, discretization, perturbation)
    if check_contraction:
        operator.check_contraction()
    return operator.rank_one_reduction()


def G_series(k, epsilon, config, discretization=None, order: int = 1) -> complex:
    if epsilon == 0:
        return 0j
    return _operator(k, epsilon, config, discretization).rank_one_reduction(order=order)


def leading_order_k(epsilon: float, config: WaveguideConfig) -> float:
    coupling = config.alpha0 * config.beta.mean
    if config.n == 1:
        return -epsilon * coupling
    return epsilon * coupling / np.pi


def asymptotic_lambda(epsilon: float, config: WaveguideConfig) -> complex:
    """
    Leading-order eigenvalue: μ0² - ε²α0²⟨β⟩² (n=1) or μ0² - exp(2/w),
    w = (ε/π)α0⟨β⟩ (n=2). Returns the threshold itself when no
    eigenvalue is predicted.
    """
    mu0_sq = config.threshold
    coupling = config.alpha0 * config.beta.mean
    if epsilon == 0 or coupling >= 0:
        return complex(mu0_sq)
    if config.n == 1:
        return complex(mu0_sq - (epsilon * coupling) ** 2)
    w = leading_order_k(epsilon, config)
    return complex(mu0_sq - np.exp(2.0 / w))


def _is_physical(k: complex, n: int) -> bool:
    return k.real > 0 if n == 1 else k.real < 0


def _check_weak_coupling(config: WaveguideConfig):
    config.require_subcritical()
    coupling = config.alpha0 * config.beta.mean
    if abs(coupling) < app_settings.BirmanSchwinger.borderline_tolerance:
        raise BorderlineCase(
            f"alpha0*<beta> = {coupling:.3e} vanishes: the leading term gives no verdict"
        )
    return coupling


def solve_weak_coupling(config: WaveguideConfig, discretization=None) -> SpectralResult | None:
    """
    The weakly coupled eigenvalue below μ0², or None when H_α has none.

    Newton iteration on F(k) = k - G(k, ε) from the leading-order seed,
    with a damped fixed-point iteration k ← k + θ(G(k) - k) as fallback.
    """
    if config.epsilon == 0:
        return None
    coupling = _check_weak_coupling(config)
    if coupling > 0:
        logger.info(f"alpha0*<beta> = {coupling:.4g} > 0: no eigenvalue below the threshold")
        return None

    settings = app_settings.BirmanSchwinger
    discretization = discretization or BSDiscretization.default(config)
    epsilon = config.epsilon
    k0 = complex(leading_order_k(epsilon, config))
    perturbation = perturbation_matrix(config, discretization)
    _operator(k0, epsilon, config, discretization, perturbation).check_contraction()

    def residual(k):
        return k - G(k, epsilon, config, discretization, False, perturbation)

    k, value, iterations = k0, residual(k0), 0
    while abs(value) >= settings.newton_tolerance and iterations < settings.newton_max_iterations:
        step = 1e-6 * abs(k)
        slope = (residual(k + step) - residual(k - step)) / (2.0 * step)
        k = k - value / slope
        iterations += 1
        if not _is_physical(k, config.n):
            raise NoRoot(f"Newton iterate k={k:.6g} left the physical half-plane")
        value = residual(k)
        logger.debug(f"Newton iteration {iterations}: k={k:.15g}, |F|={abs(value):.3e}")

    if abs(value) >= settings.newton_tolerance:
        logger.warning(f"Newton did not converge (|F|={abs(value):.3e}), using fixed point")
        k, value, iterations = _fixed_point(residual, k0, config.n)

    sv = SpectralVariable.from_k(k, config.n, config.threshold)
    check_reality(sv.lambda_)
    logger.info(f"Weak-coupling root k={k:.12g}, lambda={sv.lambda_:.15g}")
    return SpectralResult(
        lambda_=sv.lambda_,
        k=k,
        epsilon=epsilon,
        method=Method.BS_ROOT,
        residual=float(abs(value)),
        iterations=iterations,
    )


def _fixed_point(residual: Callable, k0: complex, n: int):
    settings = app_settings.BirmanSchwinger
    damping = settings.fixed_point_damping
    k, value = k0, residual(k0)
    for iteration in range(1, settings.newton_max_iterations + 1):
        k = k - damping * value
        if not _is_physical(k, n):
            raise NoRoot(f"Fixed-point iterate k={k:.6g} left the physical half-plane")
        value = residual(k)
        if abs(value) < settings.newton_tolerance:
            return k, value, iteration
    raise ConvergenceFailure(
        f"Weak-coupling equation did not converge, |F|={abs(value):.3e}",
        iterations=settings.newton_max_iterations,
        residual=abs(value),
    )


def check_reality(lambda_: complex):
    """A PT-symmetric root below the threshold must be real up to discretization error."""
    tolerance = app_settings.BirmanSchwinger.reality_tolerance
    if abs(lambda_.imag) > tolerance * abs(lambda_):
        raise RealityViolation(
            f"Eigenvalue {lambda_} has imaginary part above {tolerance:g}·|lambda|",
            imaginary=lambda_.imag,
            tolerance=tolerance,
        )


def count_roots(config, discretization=None, center=None, radius=None, samples: int = 64) -> int:
    """Zeros of F(k) = k - G(k, ε) inside a circle, by the argument principle."""
    discretization = discretization or BSDiscretization.default(config)
    center = complex(leading_order_k(config.epsilon, config) if center is None else center)
    radius = abs(center) / 2.0 if radius is None else radius
    perturbation = perturbation_matrix(config, discretization) if config.epsilon else None

    angles = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
    values = np.array(
        [
            k - G(k, config.epsilon, config, discretization, False, perturbation)
            for k in center + radius * np.exp(1j * angles)
        ]
    )
    winding = np.angle(np.roll(values, -1) / values).sum() / (2.0 * np.pi)
    logger.debug(f"Argument principle winding {winding:.6f} on |k - {center:.6g}| = {radius:.3g}")
    return int(round(winding))

"""
Finite-difference discretization of H_α on a truncated strip or layer.

The Robin rows use ghost points and are symmetrized by the diagonal
similarity S = diag(1/√2, 1, ..., 1, 1/√2) in u, so the matrix is complex
symmetric and acts on v = SΨ. In these coordinates the trapezoid inner
product is the Euclidean one times the cell volume.
"""

import logging
from dataclasses import dataclass, field, replace
from functools import cached_property
from itertools import chain
from typing import NamedTuple

import numpy as np
import scipy.fft
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .bs import Method, SpectralResult, asymptotic_lambda
from .exceptions import ConvergenceFailure, GridError, OnSpectrum, ResolutionLimit
from .kernels import SpectralVariable, lattice_resolvent_kernel
from .settings import EndCondition, app_settings
from .transverse import (
    LatticeTransversalBasis,
    WaveguideConfig,
    robin_stencil,
    trapezoid_scale,
)

logger = logging.getLogger(__name__)


def _cells(length: float, step: float, name: str) -> int:
    cells = length / step
    if step <= 0 or abs(cells - round(cells)) > 1e-9 * max(1.0, cells):
        raise GridError(f"{name} = {step} does not divide {length}")
    return int(round(cells))


@dataclass(frozen=True)
class Grid:
    """Uniform grid on [-L, L]^n × [0, d]; u varies fastest in flattened vectors."""

    n: int
    d: float
    L: float
    h_x: float
    h_u: float
    end_bc: EndCondition = EndCondition.DIRICHLET

    def __post_init__(self):
        if self.end_bc not in {c.value for c in EndCondition}:
            raise GridError(f"Unknown end condition {self.end_bc}")
        _cells(self.d, self.h_u, "h_u")
        _cells(2.0 * self.L, self.h_x, "h_x")
        if self.cells_u < 2 or self.cells_x < 2:
            raise GridError("The grid needs at least two cells in each direction")

    @property
    def cells_u(self) -> int:
        return _cells(self.d, self.h_u, "h_u")

    @property
    def cells_x(self) -> int:
        return _cells(2.0 * self.L, self.h_x, "h_x")

    @property
    def dirichlet(self) -> bool:
        return self.end_bc == EndCondition.DIRICHLET

    @cached_property
    def x_axis(self) -> np.ndarray:
        nodes = np.linspace(-self.L, self.L, self.cells_x + 1)
        return nodes[1:-1] if self.dirichlet else nodes

    @cached_property
    def u_axis(self) -> np.ndarray:
        return np.linspace(0.0, self.d, self.cells_u + 1)

    @cached_property
    def x_scale(self) -> np.ndarray:
        return np.ones(len(self.x_axis)) if self.dirichlet else trapezoid_scale(self.cells_x)

    @property
    def shape(self) -> tuple[int, ...]:
        return (len(self.x_axis),) * self.n + (len(self.u_axis),)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @cached_property
    def points(self) -> np.ndarray:
        mesh = np.meshgrid(*[self.x_axis] * self.n, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    @cached_property
    def x_weights(self) -> np.ndarray:
        """Trapezoid weights of the x-nodes, shape (Nx^n,)."""
        weights = self.h_x * self.x_scale**2
        total = weights
        for _ in range(self.n - 1):
            total = np.outer(total, weights).ravel()
        return total

    @cached_property
    def scale(self) -> np.ndarray:
        """The similarity S on the full grid, shape `shape`."""
        scale = trapezoid_scale(self.cells_u)
        for _ in range(self.n):
            scale = self.x_scale.reshape((-1,) + (1,) * scale.ndim) * scale
        return scale

    @property
    def volume(self) -> float:
        return self.h_x**self.n * self.h_u

    def to_symmetric(self, field) -> np.ndarray:
        return (np.asarray(field) * self.scale).ravel()

    def from_symmetric(self, vector) -> np.ndarray:
        return np.asarray(vector).reshape(self.shape) / self.scale


@dataclass(frozen=True)
class DirectNumerics:
    L: float
    h_x: float
    h_u: float
    end_bc: EndCondition | None = None
    extrapolate: bool = False

    @classmethod
    def default(cls, config: WaveguideConfig) -> "DirectNumerics":
        """
        Box wide enough for the predicted bound state to decay inside it,
        with the transverse grid at 16 cells. Strip gaps are
        extrapolated in h_u.
        """
        settings = app_settings.Direct
        width = max(1.0, config.beta.width)
        if config.n == 1:
            h_x = 0.1 * width
            half_length = settings.truncation_widths * width
            gap = config.threshold - asymptotic_lambda(config.epsilon, config).real
            if gap > 0:
                half_length = max(half_length, 1.25 * np.sqrt(settings.box_resolution / gap))
        else:
            h_x = 0.25 * width
            half_length = settings.truncation_widths * width
        half_length = h_x * np.ceil(half_length / h_x)
        return cls(
            L=float(half_length), h_x=h_x, h_u=config.d / 16, extrapolate=config.n == 1
        )

    def refined(self) -> "DirectNumerics":
        return replace(self, h_u=self.h_u / 2, extrapolate=False)

    def grid(self, config: WaveguideConfig) -> Grid:
        end_bc = self.end_bc or app_settings.Direct.default_end_bc
        return Grid(n=config.n, d=config.d, L=self.L, h_x=self.h_x, h_u=self.h_u, end_bc=end_bc)


@dataclass(frozen=True)
class DiscretizedHamiltonian:
    matrix: scipy.sparse.csr_matrix = field(repr=False)
    grid: Grid
    config: WaveguideConfig = field(repr=False)
    alpha: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return self.grid.size

    def with_alpha(self, alpha) -> "DiscretizedHamiltonian":
        return _assemble(self.config, self.grid, np.broadcast_to(alpha, self.alpha.shape))

    def adjoint_partner(self) -> "DiscretizedHamiltonian":
        """The matrix assembled with -α, which should equal the conjugate transpose."""
        return self.with_alpha(-self.alpha)

    def inner(self, first, second) -> complex:
        """Trapezoid inner product of two physical grid fields."""
        left = self.grid.to_symmetric(first)
        right = self.grid.to_symmetric(second)
        return complex(self.grid.volume * np.vdot(left, right))

    def apply(self, field) -> np.ndarray:
        return self.grid.from_symmetric(self.matrix @ self.grid.to_symmetric(field))


def _longitudinal_matrix(grid: Grid) -> scipy.sparse.spmatrix:
    if grid.dirichlet:
        count = grid.cells_x - 1
        main = np.full(count, 2.0 / grid.h_x**2)
        off = np.full(count - 1, -1.0 / grid.h_x**2)
    else:
        main, off = robin_stencil(grid.cells_x, grid.h_x, 0.0)
        main = main.real
    line = scipy.sparse.diags([off, main, off], [-1, 0, 1], format="csr")
    if grid.n == 1:
        return line
    identity = scipy.sparse.identity(line.shape[0], format="csr")
    return scipy.sparse.kron(line, identity) + scipy.sparse.kron(identity, line)


def _assemble(config: WaveguideConfig, grid: Grid, alpha: np.ndarray) -> DiscretizedHamiltonian:
    nu = len(grid.u_axis)
    longitudinal = scipy.sparse.kron(
        _longitudinal_matrix(grid), scipy.sparse.identity(nu), format="csr"
    )
    diagonal, off = robin_stencil(grid.cells_u, grid.h_u, alpha)
    # zeros between consecutive x-blocks keep the transverse operators apart
    off_blocks = np.tile(np.append(off, 0.0), len(alpha))[:-1]
    transverse = scipy.sparse.diags(
        [off_blocks, diagonal.ravel(), off_blocks], [-1, 0, 1], format="csr"
    )
    matrix = (longitudinal + transverse).tocsr()
    logger.debug(f"Assembled {grid.n}D Hamiltonian with {grid.size} unknowns, nnz={matrix.nnz}")
    return DiscretizedHamiltonian(matrix=matrix, grid=grid, config=config, alpha=np.asarray(alpha))


def assemble_hamiltonian(
    config: WaveguideConfig, L: float, h_x: float, h_u: float, end_bc=None
) -> DiscretizedHamiltonian:
    end_bc = end_bc or app_settings.Direct.default_end_bc
    grid = Grid(n=config.n, d=config.d, L=L, h_x=h_x, h_u=h_u, end_bc=end_bc)
    return _assemble(config, grid, config.alpha(grid.points))


class EigenPair(NamedTuple):
    value: complex
    vector: np.ndarray
    residual: float


def _dense_eigenpairs(matrix, center, count):
    values, vectors = scipy.linalg.eig(matrix.toarray())
    order = np.argsort(np.abs(values - center))[:count]
    return values[order], vectors[:, order]


def _shift_invert(matrix, center, count):
    shifts = (center, center + 1e-8 * (1.0 + abs(center)) * (1.0 + 1j))
    for attempt, shift in enumerate(shifts):
        try:
            return scipy.sparse.linalg.eigs(matrix, k=count, sigma=shift, which="LM")
        except scipy.sparse.linalg.ArpackNoConvergence:
            raise
        except RuntimeError as exc:
            if attempt:
                raise ConvergenceFailure(
                    f"Shift-invert failed at {center} and {shift}: {exc}", iterations=0
                ) from exc
            logger.warning(f"Shift {center} is singular ({exc}), retrying at {shifts[1]}")


def spectrum_window(H: DiscretizedHamiltonian, center: complex, count: int) -> list[EigenPair]:
    """The `count` eigenpairs nearest `center`, ordered by distance."""
    matrix = H.matrix
    size = matrix.shape[0]
    dense_limit = app_settings.Direct.dense_eigen_limit
    count = min(count, size)

    if count >= size - 1:
        if size > dense_limit:
            raise ConvergenceFailure(f"{count} eigenpairs of a {size} matrix is too many")
        values, vectors = _dense_eigenpairs(matrix, center, count)
    else:
        try:
            values, vectors = _shift_invert(matrix, center, count)
        except scipy.sparse.linalg.ArpackNoConvergence as exc:
            if size > dense_limit:
                raise ConvergenceFailure(
                    f"ARPACK did not converge near {center}", iterations=exc.eigenvalues.size
                ) from exc
            logger.warning(f"ARPACK did not converge near {center}, using a dense solve")
            values, vectors = _dense_eigenpairs(matrix, center, count)

    pairs = []
    for value, vector in zip(values, vectors.T):
        vector = vector / np.linalg.norm(vector)
        residual = float(np.linalg.norm(matrix @ vector - value * vector))
        if residual > app_settings.Direct.residual_tolerance * max(1.0, abs(value)):
            logger.warning(f"Eigenpair {value} has residual {residual:.3e}")
        pairs.append(EigenPair(complex(value), vector, residual))
    pairs.sort(key=lambda pair: abs(pair.value - center))
    return pairs


def discrete_threshold(config: WaveguideConfig, grid: Grid) -> float:
    """μ0²_h, the lowest eigenvalue of the discretized transversal operator."""
    return LatticeTransversalBasis.from_grid(config.alpha0, config.d, grid.cells_u).threshold


def resolution_floor(config: WaveguideConfig, grid: Grid) -> float:
    """Smallest gap below the threshold that the box still resolves."""
    settings = app_settings.Direct
    width = max(1.0, config.beta.width)
    return max(settings.box_resolution / grid.L**2, 10.0 * np.exp(-grid.L / width))


def participation(grid: Grid, vector) -> float:
    """Share of |Ψ|² carried by the central box |x_i| ≤ L/2."""
    weights = np.abs(np.asarray(vector).reshape(grid.shape)) ** 2
    inside = np.all(np.abs(grid.points) <= grid.L / 2.0, axis=-1).reshape(grid.shape[:-1])
    return float(weights[inside].sum() / weights.sum())


def _k_from_gap(gap: complex, n: int, mu0_sq: float) -> complex:
    return SpectralVariable.from_lambda(mu0_sq - gap, n, mu0_sq).k


def _localized_gap(config: WaveguideConfig, grid: Grid, predicted: float):
    """(μ0²_h - λ_h, residual) for the lowest localized eigenpair, or None."""
    floor = resolution_floor(config, grid)
    H = _assemble(config, grid, config.alpha(grid.points))
    threshold_h = discrete_threshold(config, grid)
    lower = threshold_h - 4.0 * max(predicted, floor)
    center = threshold_h - (predicted if predicted > 0 else floor)
    pairs = spectrum_window(H, center, app_settings.Direct.window_count)

    localization = app_settings.Direct.localization_threshold
    candidates = [
        pair
        for pair in pairs
        if lower < pair.value.real < threshold_h - floor
        and participation(grid, pair.vector) > localization
    ]
    if not candidates:
        logger.info(f"No localized eigenvalue below the discrete threshold {threshold_h:.12g}")
        return None
    found = min(candidates, key=lambda pair: pair.value.real)
    return threshold_h - found.value, found.residual


def discrete_eigenvalue_below_threshold(
    config: WaveguideConfig, numerics: DirectNumerics | None = None
) -> SpectralResult | None:
    """
    The localized eigenvalue below the discrete threshold, if any,
    reported relative to the exact threshold: λ = μ0² - (μ0²_h - λ_h).

    With `numerics.extrapolate` the gap is also computed at h_u/2 and the
    two are combined as (4·gap(h_u/2) - gap(h_u))/3, which removes the
    O(h_u²) term.
    """
    if config.epsilon == 0:
        return None
    config.require_subcritical()

    numerics = numerics or DirectNumerics.default(config)
    grid = numerics.grid(config)
    predicted = config.threshold - asymptotic_lambda(config.epsilon, config).real
    floor = resolution_floor(config, grid)
    # planar gaps exp(2/w) may underflow to zero while a bound state still exists
    if config.alpha0 * config.beta.mean < 0 and predicted < floor:
        raise ResolutionLimit(
            f"Predicted gap {predicted:.3e} is below the grid floor {floor:.3e}",
            gap=predicted,
            floor=floor,
        )

    found = _localized_gap(config, grid, predicted)
    if found is None:
        return None
    gap, residual = found
    if numerics.extrapolate:
        refined = _localized_gap(config, numerics.refined().grid(config), predicted)
        if refined is None:
            logger.info(f"Gap {gap.real:.6e} is not confirmed at h_u={numerics.h_u / 2:.4g}")
            return None
        logger.debug(f"Gaps {gap.real:.9e} and {refined[0].real:.9e} at h_u and h_u/2")
        gap, residual = (4.0 * refined[0] - gap) / 3.0, refined[1]

    lambda_ = config.threshold - gap
    logger.info(f"Direct eigenvalue {lambda_:.12g} (gap {gap.real:.6e}, residual {residual:.2e})")
    return SpectralResult(
        lambda_=complex(lambda_),
        k=_k_from_gap(gap, config.n, config.threshold),
        epsilon=config.epsilon,
        method=Method.DIRECT,
        residual=residual,
    )


def apply_resolvent_modesum(
    rhs, lambda_: complex, J: int, config: WaveguideConfig, grid: Grid
) -> np.ndarray:
    """
    (H_{α0} - λ)⁻¹ rhs on a Dirichlet grid, by projecting on the lattice
    transversal modes j ≤ J and solving each longitudinal problem with
    the explicit lattice kernel (n=1) or a sine transform (n=2).
    """
    if not grid.dirichlet:
        raise GridError("The mode-sum resolvent needs Dirichlet ends")

    basis = LatticeTransversalBasis.from_grid(config.alpha0, config.d, grid.cells_u)
    threshold_h = basis.threshold
    lambda_ = complex(lambda_)
    distance = abs(lambda_.imag) if lambda_.real >= threshold_h else abs(lambda_ - threshold_h)
    if distance < app_settings.Direct.residual_tolerance:
        raise OnSpectrum(f"lambda = {lambda_} lies on [{threshold_h}, inf)")

    rhs = np.asarray(rhs).reshape(grid.shape)
    modes = min(J + 1, grid.cells_u + 1)
    coefficients = basis.project(rhs, modes)

    solved = np.empty_like(coefficients, dtype=complex)
    for j in range(modes):
        shift = basis.eigenvalues[j] - lambda_
        solved[..., j] = _longitudinal_solve(coefficients[..., j], shift, grid)
    return basis.expand(solved)


def _longitudinal_solve(values, shift, grid: Grid) -> np.ndarray:
    if grid.n == 1:
        kernel = lattice_resolvent_kernel(shift, grid.h_x, grid.cells_x)
        return grid.h_x * kernel @ values

    count = grid.cells_x
    p = np.arange(1, count)
    symbol = 4.0 * np.sin(p * np.pi / (2 * count)) ** 2 / grid.h_x**2
    transformed = scipy.fft.dstn(values, type=1)
    transformed /= symbol[:, None] + symbol[None, :] + shift
    return scipy.fft.idstn(transformed, type=1)


def form_values(H: DiscretizedHamiltonian, field) -> tuple[float, float]:
    """h¹[Ψ] and h²[Ψ]: the Neumann-Laplacian form and ∫α(|Ψ(x,d)|² - |Ψ(x,0)|²)."""
    field = np.asarray(field).reshape(H.grid.shape)
    free = H.with_alpha(0.0)
    h1 = H.inner(field, free.apply(field)).real
    boundary = np.abs(field[..., -1]) ** 2 - np.abs(field[..., 0]) ** 2
    h2 = float(np.dot(H.grid.x_weights * H.alpha, boundary.ravel()))
    return h1, h2


def form_identity_residual(H: DiscretizedHamiltonian, field) -> float:
    h1, h2 = form_values(H, field)
    return float(abs(H.inner(field, H.apply(field)) - (h1 + 1j * h2)))


def form_bound_ratio(H: DiscretizedHamiltonian, field) -> float:
    """|h²[Ψ]| / (2‖α‖∞‖Ψ‖√h¹[Ψ]), at most 1."""
    h1, h2 = form_values(H, field)
    norm = np.sqrt(H.inner(field, field).real)
    bound = 2.0 * np.abs(H.alpha).max() * norm * np.sqrt(h1)
    return float(abs(h2) / bound) if bound > 0 else 0.0


def _smooth_field(grid: Grid, rng, modes: int = 3) -> np.ndarray:
    """Low transversal cosines times a gaussian envelope in x."""
    coefficients = rng.normal(size=modes) + 1j * rng.normal(size=modes)
    cosines = np.cos(np.outer(grid.u_axis, np.arange(modes)) * np.pi / grid.d)
    profile = cosines @ coefficients
    center = rng.uniform(-0.25, 0.25, size=grid.n) * grid.L
    width = rng.uniform(0.125, 0.25) * grid.L
    envelope = np.exp(-((grid.points - center) ** 2).sum(axis=-1) / (2.0 * width**2))
    return np.multiply.outer(envelope.reshape(grid.shape[:-1]), profile)


def random_fields(grid: Grid, count: int, seed: int = 0, smooth: bool = False):
    """
    Complex white noise on the grid. With `smooth`, fields from the low
    end of the spectrum instead, where h¹[Ψ] is small.
    """
    rng = np.random.default_rng(seed)
    for _ in range(count):
        if smooth:
            yield _smooth_field(grid, rng)
        else:
            yield rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape)


def _max_entry(matrix) -> float:
    matrix = scipy.sparse.csr_matrix(matrix)
    return float(np.abs(matrix.data).max()) if matrix.nnz else 0.0


def _reflection(grid: Grid) -> np.ndarray:
    return np.arange(grid.size).reshape(grid.shape)[..., ::-1].ravel()


@dataclass(frozen=True)
class OperatorReport:
    pt_residual: float
    adjoint_residual: float
    transpose_residual: float
    parabola_excess: float
    form_bound_ratio: float
    form_identity_residual: float
    eigenvalues: tuple[complex, ...] = ()

    @property
    def checks(self) -> list[tuple[str, bool, float]]:
        return [
            ("pt-commutation", self.pt_residual <= 1e-14 * self._scale, self.pt_residual),
            ("adjoint-law", self.adjoint_residual <= 1e-14 * self._scale, self.adjoint_residual),
            ("t-self-adjointness", self.transpose_residual == 0.0, self.transpose_residual),
            ("parabola-enclosure", self.parabola_excess <= 0.0, self.parabola_excess),
            ("form-bound", self.form_bound_ratio <= 1.0 + 1e-12, self.form_bound_ratio),
            ("form-identity", self.form_identity_residual <= 1e-8, self.form_identity_residual),
        ]

    @property
    def _scale(self) -> float:
        return max(1.0, max((abs(value) for value in self.eigenvalues), default=1.0))

    @property
    def passed(self) -> bool:
        return all(passed for _, passed, _ in self.checks)


def verify_operator_facts(
    H: DiscretizedHamiltonian, config: WaveguideConfig, samples: int = 100, seed: int = 0
) -> OperatorReport:
    """Symmetry laws, spectral parabola enclosure and form bounds of a discretized operator."""
    grid = H.grid
    matrix = H.matrix

    permutation = _reflection(grid)
    reflected = matrix.conj()[permutation][:, permutation]
    pt_residual = _max_entry(reflected - matrix)
    adjoint_residual = _max_entry(matrix.conj().T - H.adjoint_partner().matrix)
    transpose_residual = _max_entry(matrix.T - matrix)

    alpha_norm = float(np.abs(H.alpha).max())
    slack = 2.0 * max(grid.h_x, grid.h_u) ** 2
    center = discrete_threshold(config, grid)
    pairs = spectrum_window(H, center, app_settings.Direct.window_count)
    excess = max(
        abs(pair.value.imag) - 2.0 * alpha_norm * np.sqrt(max(pair.value.real, 0.0)) - slack
        for pair in pairs
    )

    ratios, residuals = [], []
    fields = chain(
        random_fields(grid, samples - samples // 2, seed),
        random_fields(grid, samples // 2, seed + 1, smooth=True),
    )
    for field in fields:
        ratios.append(form_bound_ratio(H, field))
        residuals.append(form_identity_residual(H, field) / abs(H.inner(field, field)))

    report = OperatorReport(
        pt_residual=pt_residual,
        adjoint_residual=adjoint_residual,
        transpose_residual=transpose_residual,
        parabola_excess=float(excess),
        form_bound_ratio=max(ratios, default=0.0),
        form_identity_residual=max(residuals, default=0.0),
        eigenvalues=tuple(pair.value for pair in pairs),
    )
    for name, passed, value in report.checks:
        logger.debug(f"{name}: {'ok' if passed else 'FAILED'} ({value:.3e})")
    return report


def band_census(
    config: WaveguideConfig, numerics: DirectNumerics, epsilons, upper: float, cap: int = 40
) -> dict[float, int]:
    """Number of eigenvalues with real part in [μ0²_h, upper] for each ε."""
    grid = numerics.grid(config)
    threshold_h = discrete_threshold(config, grid)
    census = {}
    for epsilon in epsilons:
        perturbed = config.with_epsilon(epsilon)
        H = _assemble(perturbed, grid, perturbed.alpha(grid.points))
        if H.size <= app_settings.Direct.dense_eigen_limit:
            values = scipy.linalg.eigvals(H.matrix.toarray())
        else:
            values = np.array(
                [pair.value for pair in spectrum_window(H, 0.5 * (threshold_h + upper), cap)]
            )
        census[epsilon] = int(np.sum((values.real >= threshold_h) & (values.real <= upper)))
        logger.debug(f"epsilon={epsilon}: {census[epsilon]} eigenvalues in the band window")
    return census


@dataclass(frozen=True)
class BoundarySensitivity:
    dirichlet: SpectralResult | None
    neumann: SpectralResult | None

    @property
    def difference(self) -> float | None:
        if self.dirichlet is None or self.neumann is None:
            return None
        return abs(self.dirichlet.lambda_ - self.neumann.lambda_)


def boundary_sensitivity(config: WaveguideConfig, numerics=None) -> BoundarySensitivity:
    """The bound-state search repeated with Dirichlet and with Neumann ends."""
    numerics = numerics or DirectNumerics.default(config)
    results = {}
    for end_bc in EndCondition:
        shifted = replace(numerics, end_bc=end_bc)
        results[end_bc] = discrete_eigenvalue_below_threshold(config, shifted)
    return BoundarySensitivity(
        dirichlet=results[EndCondition.DIRICHLET], neumann=results[EndCondition.NEUMANN]
    )


def dump_matrix(H: DiscretizedHamiltonian, path) -> int:
    """Write the matrix as `row col re im` lines, 0-based; returns the entry count."""
    coordinates = H.matrix.tocoo()
    with open(path, "w") as output:
        for row, col, value in zip(coordinates.row, coordinates.col, coordinates.data):
            output.write(f"{row} {col} {value.real:.17e} {value.imag:.17e}\n")
    logger.info(f"Wrote {coordinates.nnz} matrix entries to {path}")
    return coordinates.nnz

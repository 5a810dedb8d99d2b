import logging
from dataclasses import dataclass, field, replace
from enum import StrEnum
from functools import cached_property

import numpy as np
import scipy.linalg

from .exceptions import BorderlineCase, GridError, GridMismatch, SimpleSpectrumViolation
from .profiles import PerturbationProfile
from .quadrature import gauss_legendre
from .settings import app_settings

logger = logging.getLogger(__name__)


class ModeKind(StrEnum):
    ALPHA_MODE = "alpha-mode"
    COSINE_MODE = "cosine-mode"


def check_simple_spectrum(alpha0: float, d: float) -> None:
    ratio = alpha0 * d / np.pi
    nearest = round(ratio)
    if nearest != 0 and abs(ratio - nearest) < app_settings.Transverse.simple_spectrum_tolerance:
        raise SimpleSpectrumViolation(
            f"alpha0*d/pi = {ratio:.12g} is the nonzero integer {nearest}: "
            f"the alpha-mode collides with the cosine mode {nearest}"
        )


def threshold(alpha0: float, d: float) -> float:
    return min(alpha0**2, (np.pi / d) ** 2)


def is_neumann_limit(alpha0: float, d: float) -> bool:
    return abs(alpha0) < app_settings.Transverse.neumann_limit_tolerance * np.pi / d


def alpha_mode_constant(alpha0: float, d: float) -> complex:
    """
    Normalization 2iα0 / (1 - exp(-2iα0 d)) of the alpha-mode, written as
    exp(iα0 d) / (d·sinc(α0 d/π)) so that it is continuous through α0 = 0.
    """
    if is_neumann_limit(alpha0, d):
        return complex(1.0 / d)
    return np.exp(1j * alpha0 * d) / (d * np.sinc(alpha0 * d / np.pi))


@dataclass(frozen=True)
class TransversalMode:
    index: int
    mu: float
    mu_sq: float
    a_norm: complex
    kind: ModeKind
    harmonic: int | None = None


@dataclass(frozen=True)
class WaveguideConfig:
    n: int
    d: float
    alpha0: float
    epsilon: float
    beta: PerturbationProfile = field(repr=False)

    def __post_init__(self):
        if self.n not in (1, 2):
            raise GridError(f"Longitudinal dimension must be 1 or 2, got {self.n}")
        if self.d <= 0:
            raise GridError(f"Width must be positive, got {self.d}")
        if self.epsilon < 0:
            raise GridError(f"Coupling epsilon must be nonnegative, got {self.epsilon}")
        if self.beta.n != self.n:
            raise GridError(f"Profile is {self.beta.n}-dimensional, waveguide is {self.n}")
        check_simple_spectrum(self.alpha0, self.d)

    @property
    def threshold(self) -> float:
        return threshold(self.alpha0, self.d)

    @property
    def subcritical(self) -> bool:
        return abs(self.alpha0) < np.pi / self.d

    def require_subcritical(self):
        if not self.subcritical:
            raise BorderlineCase(
                f"|alpha0| = {abs(self.alpha0)} is not below pi/d = {np.pi / self.d}: "
                "the leading weak-coupling term vanishes"
            )

    def alpha(self, x) -> np.ndarray:
        return self.alpha0 + self.epsilon * self.beta.eval(x)

    def with_epsilon(self, epsilon: float) -> "WaveguideConfig":
        return replace(self, epsilon=epsilon)


def transversal_eigenvalues(alpha0: float, d: float, j_max: int) -> list[TransversalMode]:
    check_simple_spectrum(alpha0, d)
    if j_max < 0:
        raise ValueError("j_max must be nonnegative")

    candidates = [(alpha0**2, alpha0, ModeKind.ALPHA_MODE, None)]
    for harmonic in range(1, j_max + 2):
        mu = harmonic * np.pi / d
        candidates.append((mu**2, mu, ModeKind.COSINE_MODE, harmonic))
    candidates.sort(key=lambda candidate: candidate[0])

    modes = []
    for index, (_, mu, kind, harmonic) in enumerate(candidates[: j_max + 1]):
        if kind == ModeKind.ALPHA_MODE:
            a_norm = alpha_mode_constant(alpha0, d)
        else:
            a_norm = complex(2.0 * mu**2 / ((mu**2 - alpha0**2) * d))
        modes.append(
            TransversalMode(
                index=index, mu=mu, mu_sq=mu * mu, a_norm=a_norm, kind=kind, harmonic=harmonic
            )
        )
    return modes


def eval_psi(mode: TransversalMode, alpha0: float, u):
    u = np.asarray(u, dtype=float)
    if mode.kind == ModeKind.ALPHA_MODE:
        return np.exp(-1j * alpha0 * u)
    return np.cos(mode.mu * u) - 1j * (alpha0 / mode.mu) * np.sin(mode.mu * u)


def eval_dpsi(mode: TransversalMode, alpha0: float, u):
    """Analytic u-derivative of ψ_j."""
    u = np.asarray(u, dtype=float)
    if mode.kind == ModeKind.ALPHA_MODE:
        return -1j * alpha0 * np.exp(-1j * alpha0 * u)
    return -mode.mu * np.sin(mode.mu * u) - 1j * alpha0 * np.cos(mode.mu * u)


def eval_phi(mode: TransversalMode, alpha0: float, d: float, u):
    return np.conj(mode.a_norm * eval_psi(mode, alpha0, u))


@dataclass(frozen=True)
class TransversalBasis:
    """The first `len(modes)` biorthonormal pairs (ψ_j, φ_j) on (0, d)."""

    alpha0: float
    d: float
    modes: tuple[TransversalMode, ...]

    @classmethod
    def build(cls, alpha0: float, d: float, j_max: int) -> "TransversalBasis":
        return cls(alpha0=alpha0, d=d, modes=tuple(transversal_eigenvalues(alpha0, d, j_max)))

    @property
    def size(self) -> int:
        return len(self.modes)

    @cached_property
    def mu_sq(self) -> np.ndarray:
        return np.array([mode.mu_sq for mode in self.modes])

    def psi(self, j: int, u):
        return eval_psi(self.modes[j], self.alpha0, u)

    def dpsi(self, j: int, u):
        return eval_dpsi(self.modes[j], self.alpha0, u)

    def phi(self, j: int, u):
        return eval_phi(self.modes[j], self.alpha0, self.d, u)

    def psi_table(self, u) -> np.ndarray:
        """ψ_j(u_q) as an array of shape (modes, len(u))."""
        return np.array([self.psi(j, u) for j in range(self.size)])

    def dpsi_table(self, u) -> np.ndarray:
        return np.array([self.dpsi(j, u) for j in range(self.size)])

    def phi_table(self, u) -> np.ndarray:
        return np.array([self.phi(j, u) for j in range(self.size)])


def default_quad_order(j_max: int) -> int:
    return app_settings.Transverse.quadrature_factor * (j_max + 1)


def biorthonormality_matrix(alpha0: float, d: float, j_max: int, quad_order=None) -> np.ndarray:
    """Quadrature values of (φ_j, ψ_k) for j, k ≤ j_max."""
    basis = TransversalBasis.build(alpha0, d, j_max)
    nodes, weights = gauss_legendre(quad_order or default_quad_order(j_max), 0.0, d)
    return (np.conj(basis.phi_table(nodes)) * weights) @ basis.psi_table(nodes).T


def biorthonormality_residual(alpha0: float, d: float, j_max: int, quad_order=None) -> float:
    gram = biorthonormality_matrix(alpha0, d, j_max, quad_order)
    return float(np.abs(gram - np.eye(gram.shape[0])).max())


def project_mode(field, mode_index: int, config: WaveguideConfig, quad_order: int, u_nodes=None):
    """
    Coefficient Ψ_j(x) = (φ_j, Ψ(x, ·)) of a field sampled on the
    Gauss-Legendre u-nodes of order `quad_order`, one value per x-node.
    """
    field = np.asarray(field)
    nodes, weights = gauss_legendre(quad_order, 0.0, config.d)

    if field.shape[-1] != quad_order:
        raise GridMismatch(
            f"Field has {field.shape[-1]} transverse samples, quadrature has {quad_order} nodes"
        )
    if u_nodes is not None and (
        len(u_nodes) != quad_order or not np.allclose(u_nodes, nodes, rtol=0.0, atol=1e-12)
    ):
        raise GridMismatch("Transverse grid is not the Gauss-Legendre grid of the quadrature")

    basis = TransversalBasis.build(config.alpha0, config.d, mode_index)
    return field @ (np.conj(basis.phi(mode_index, nodes)) * weights)


def reconstruct(coefficients, basis: TransversalBasis, u) -> np.ndarray:
    """Σ_j Ψ_j(x) ψ_j(u) for coefficients of shape (..., modes)."""
    coefficients = np.asarray(coefficients)
    return coefficients @ basis.psi_table(u)[: coefficients.shape[-1]]


def robin_stencil(cells: int, h: float, alpha) -> tuple[np.ndarray, np.ndarray]:
    """
    Diagonal and off-diagonal of the symmetrized ghost-point matrix of
    -d²/du² with ψ' + iαψ = 0 at both ends of a grid of `cells` cells.

    `alpha` may be an array; the diagonal then gets a leading axis.
    """
    if cells < 2:
        raise GridError(f"Transverse grid needs at least 2 cells, got {cells}")
    alpha = np.asarray(alpha, dtype=float)
    diagonal = np.full(alpha.shape + (cells + 1,), 2.0, dtype=complex)
    diagonal[..., 0] -= 2j * h * alpha
    diagonal[..., -1] += 2j * h * alpha
    off_diagonal = np.full(cells, -1.0)
    off_diagonal[0] = off_diagonal[-1] = -np.sqrt(2.0)
    return diagonal / h**2, off_diagonal / h**2


def trapezoid_scale(cells: int) -> np.ndarray:
    """Diagonal S of the similarity that symmetrizes the ghost-point rows."""
    scale = np.ones(cells + 1)
    scale[0] = scale[-1] = 1.0 / np.sqrt(2.0)
    return scale


@dataclass(frozen=True)
class LatticeTransversalBasis:
    """
    Eigensystem of the discretized transversal operator on the uniform
    grid u_m = m·h, m = 0..cells. Vectors live in symmetrized coordinates
    and are normalized in the bilinear product, v_j^T v_k = δ_jk.
    """

    alpha0: float
    d: float
    cells: int
    eigenvalues: np.ndarray = field(repr=False)
    vectors: np.ndarray = field(repr=False)

    @classmethod
    def from_grid(cls, alpha0: float, d: float, cells: int) -> "LatticeTransversalBasis":
        h = d / cells
        diagonal, off_diagonal = robin_stencil(cells, h, alpha0)
        matrix = np.diag(diagonal) + np.diag(off_diagonal, 1) + np.diag(off_diagonal, -1)
        eigenvalues, vectors = scipy.linalg.eig(matrix)

        order = np.argsort(eigenvalues.real)
        eigenvalues, vectors = eigenvalues[order], vectors[:, order]
        vectors = vectors / np.sqrt((vectors * vectors).sum(axis=0))
        return cls(alpha0=alpha0, d=d, cells=cells, eigenvalues=eigenvalues, vectors=vectors)

    @property
    def h(self) -> float:
        return self.d / self.cells

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.d, self.cells + 1)

    @property
    def threshold(self) -> float:
        """Lowest lattice eigenvalue, the discrete counterpart of μ0²."""
        return float(self.eigenvalues[0].real)

    def project(self, field, modes=None) -> np.ndarray:
        """Coefficients of a physical field of shape (..., cells + 1)."""
        vectors = self.vectors[:, :modes]
        return (np.asarray(field) * trapezoid_scale(self.cells)) @ vectors

    def expand(self, coefficients) -> np.ndarray:
        coefficients = np.asarray(coefficients)
        vectors = self.vectors[:, : coefficients.shape[-1]]
        return (coefficients @ vectors.T) / trapezoid_scale(self.cells)


def lattice_alpha_eigenvalue(alpha0: float, h: float) -> float:
    """Closed form 2(1 - √(1 - h²α0²))/h² of the discrete alpha-mode eigenvalue."""
    return 2.0 * (1.0 - np.sqrt(1.0 - (h * alpha0) ** 2)) / h**2

from dataclasses import dataclass
from functools import cached_property

import numpy as np

SPLIT_PADDING = 16


def gauss_legendre(order: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    """
    Nodes (ascending) and weights of the `order`-point Gauss-Legendre
    rule on [a, b].
    """
    reference_nodes, reference_weights = np.polynomial.legendre.leggauss(order)
    half_width = 0.5 * (b - a)
    nodes = 0.5 * (a + b) + half_width * reference_nodes
    return nodes, half_width * reference_weights


def _barycentric_weights(reference_nodes, reference_weights) -> np.ndarray:
    # barycentric weights of Gauss-Legendre points, up to a common factor
    signs = np.where(np.arange(len(reference_nodes)) % 2 == 0, 1.0, -1.0)
    return signs * np.sqrt((1.0 - reference_nodes**2) * reference_weights)


def differentiation_matrix(order: int, a: float, b: float) -> np.ndarray:
    """
    Collocation derivative of the polynomial interpolant through the
    Gauss-Legendre nodes of [a, b].
    """
    reference_nodes, reference_weights = np.polynomial.legendre.leggauss(order)
    barycentric = _barycentric_weights(reference_nodes, reference_weights)

    differences = reference_nodes[:, None] - reference_nodes[None, :]
    np.fill_diagonal(differences, 1.0)
    matrix = (barycentric[None, :] / barycentric[:, None]) / differences
    np.fill_diagonal(matrix, 0.0)
    np.fill_diagonal(matrix, -matrix.sum(axis=1))
    return matrix * (2.0 / (b - a))


def interpolation_matrix(order: int, a: float, b: float, targets) -> np.ndarray:
    """
    Values at `targets` of the Lagrange basis through the Gauss-Legendre
    nodes of [a, b]; shape targets.shape + (order,).
    """
    reference_nodes, reference_weights = np.polynomial.legendre.leggauss(order)
    barycentric = _barycentric_weights(reference_nodes, reference_weights)
    nodes, _ = gauss_legendre(order, a, b)

    differences = np.asarray(targets, dtype=float)[..., None] - nodes
    hits = differences == 0.0
    differences[hits] = 1.0
    terms = barycentric / differences
    matrix = terms / terms.sum(axis=-1, keepdims=True)
    on_node = hits.any(axis=-1)
    matrix[on_node] = hits[on_node]
    return matrix


@dataclass(frozen=True)
class SplitRule:
    """
    For each node x_i, a Gauss-Legendre rule on [a, x_i] followed by one
    on [x_i, b], and the interpolation from the grid nodes to both.
    """

    nodes: np.ndarray
    weights: np.ndarray
    interpolation: np.ndarray


@dataclass(frozen=True)
class LongitudinalGrid:
    """Tensor Gauss-Legendre grid on the box [c - R, c + R]^n."""

    n: int
    center: tuple[float, ...]
    radius: float
    order: int

    @cached_property
    def axes(self) -> list[tuple[np.ndarray, np.ndarray]]:
        return [
            gauss_legendre(self.order, c - self.radius, c + self.radius) for c in self.center
        ]

    @cached_property
    def points(self) -> np.ndarray:
        """Nodes as an array of shape (size, n), axis 0 varying slowest."""
        mesh = np.meshgrid(*[nodes for nodes, _ in self.axes], indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    @cached_property
    def weights(self) -> np.ndarray:
        weights = self.axes[0][1]
        for _, axis_weights in self.axes[1:]:
            weights = np.outer(weights, axis_weights).ravel()
        return weights

    @property
    def size(self) -> int:
        return self.order**self.n

    @cached_property
    def derivatives(self) -> list[np.ndarray]:
        """One dense derivative matrix per longitudinal axis."""
        identity = np.eye(self.order)
        matrices = []
        for axis, c in enumerate(self.center):
            d = differentiation_matrix(self.order, c - self.radius, c + self.radius)
            factors = [identity] * self.n
            factors[axis] = d
            matrix = factors[0]
            for factor in factors[1:]:
                matrix = np.kron(matrix, factor)
            matrices.append(matrix)
        return matrices

    @cached_property
    def distances(self) -> np.ndarray:
        points = self.points
        return np.sqrt(((points[:, None, :] - points[None, :, :]) ** 2).sum(axis=-1))

    @cached_property
    def cell_radii(self) -> np.ndarray:
        """Radius of the disc whose area is each node's quadrature weight (n=2)."""
        return np.sqrt(self.weights / np.pi)

    @cached_property
    def split_rule(self) -> SplitRule:
        """
        Quadrature of f(x_i, y)·g(y) split at y = x_i (n=1), with g known
        at the nodes. Integrates kernels with a kink on the diagonal to
        the accuracy of the smooth case.
        """
        a, b = self.center[0] - self.radius, self.center[0] + self.radius
        sub_order = self.order + SPLIT_PADDING
        nodes, weights = [], []
        for x in self.axes[0][0]:
            left_nodes, left_weights = gauss_legendre(sub_order, a, x)
            right_nodes, right_weights = gauss_legendre(sub_order, x, b)
            nodes.append(np.concatenate([left_nodes, right_nodes]))
            weights.append(np.concatenate([left_weights, right_weights]))
        nodes = np.array(nodes)
        return SplitRule(
            nodes=nodes,
            weights=np.array(weights),
            interpolation=interpolation_matrix(self.order, a, b, nodes),
        )

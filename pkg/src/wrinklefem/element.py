"""Tensor-product Lagrange quadrilateral basis and quadrature tables.

Reference element is [-1,1]^2 with equally spaced nodes per direction and
lexicographic local numbering (xi fastest).  Quadrature is (p+1)x(p+1)
Gauss-Legendre.  Edge tables restrict the 2D basis to the four edges with a
1D (p+1)-point rule; local edges are 0: eta=-1, 1: xi=+1, 2: eta=+1,
3: xi=-1.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np


def lagrange_1d(nodes: np.ndarray, x: float) -> tuple[np.ndarray, np.ndarray]:
    """Values and derivatives of the 1D Lagrange basis on given nodes at x."""
    n = len(nodes)
    vals = np.ones(n)
    ders = np.zeros(n)
    for k in range(n):
        for j in range(n):
            if j == k:
                continue
            vals[k] *= (x - nodes[j]) / (nodes[k] - nodes[j])
        # derivative by the product rule
        s = 0.0
        for m in range(n):
            if m == k:
                continue
            term = 1.0 / (nodes[k] - nodes[m])
            for j in range(n):
                if j in (k, m):
                    continue
                term *= (x - nodes[j]) / (nodes[k] - nodes[j])
            s += term
        ders[k] = s
    return vals, ders


class LagrangeQuad:
    """Basis + quadrature tables for one polynomial order (cached).

    ``n_gauss`` is the Gauss point count per direction; the default
    ``order + 1`` integrates the stiffness of the undistorted element
    exactly ("full" integration).
    """

    def __init__(self, order: int, n_gauss: int | None = None):
        if order not in (1, 2, 3):
            raise ValueError("order must be 1, 2 or 3")
        self.order = order
        p = order
        self.nodes_1d = -1.0 + 2.0 * np.arange(p + 1) / p
        self.nshape = (p + 1) ** 2

        n_gauss = (p + 1) if n_gauss is None else int(n_gauss)
        if n_gauss < 1:
            raise ValueError("n_gauss must be positive")
        self.n_gauss = n_gauss
        gp, gw = np.polynomial.legendre.leggauss(n_gauss)
        self.gauss_1d = (gp, gw)
        # tensor-product QPs, xi fastest
        qp = [(x, y) for y in gp for x in gp]
        qw = [wx * wy for wy in gw for wx in gw]
        self.qp_points = np.array(qp)
        self.qp_weights = np.array(qw)
        self.nqp = len(qw)
        self.N_qp = np.array([self.shape(x, y) for x, y in qp])          # (nqp, nshape)
        self.dN_qp = np.array([self.shape_grad(x, y) for x, y in qp])    # (nqp, nshape, 2)

        # edge tables: point on edge as (xi(t), eta(t)), t the 1D gauss coord
        self.edge_param = {
            0: lambda t: (t, -1.0),
            1: lambda t: (1.0, t),
            2: lambda t: (t, 1.0),
            3: lambda t: (-1.0, t),
        }
        # local node ids along each edge (for reference only)
        idx = np.arange(self.nshape).reshape(p + 1, p + 1)
        self.edge_nodes = {0: idx[0, :], 1: idx[:, -1], 2: idx[-1, :], 3: idx[:, 0]}
        self.N_edge = {}
        self.dN_edge = {}
        for e, par in self.edge_param.items():
            pts = [par(t) for t in gp]
            self.N_edge[e] = np.array([self.shape(x, y) for x, y in pts])
            self.dN_edge[e] = np.array([self.shape_grad(x, y) for x, y in pts])
        # derivative direction along each edge: 0 for xi, 1 for eta
        self.edge_dir = {0: 0, 1: 1, 2: 0, 3: 1}

    def shape(self, xi: float, eta: float) -> np.ndarray:
        nx, _ = lagrange_1d(self.nodes_1d, xi)
        ny, _ = lagrange_1d(self.nodes_1d, eta)
        return np.outer(ny, nx).ravel()

    def shape_grad(self, xi: float, eta: float) -> np.ndarray:
        nx, dx = lagrange_1d(self.nodes_1d, xi)
        ny, dy = lagrange_1d(self.nodes_1d, eta)
        g = np.empty((self.nshape, 2))
        g[:, 0] = np.outer(ny, dx).ravel()
        g[:, 1] = np.outer(dy, nx).ravel()
        return g


@lru_cache(maxsize=None)
def reference_element(order: int, n_gauss: int | None = None) -> LagrangeQuad:
    return LagrangeQuad(order, n_gauss)

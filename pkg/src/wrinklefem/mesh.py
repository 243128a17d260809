"""Structured rectangular meshes of Lagrange quadrilaterals (orders 1-3).

Nodes live in 3D (z = 0 initially); connectivity is lexicographic within
each element (xi fastest).  Named node sets cover the edges, corners, edge
midpoints, midlines and the center node where they exist; named edge sets
(element, local edge) support boundary tractions.  Local edges are numbered
0: eta=-1 (bottom), 1: xi=+1 (right), 2: eta=+1 (top), 3: xi=-1 (left).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class Mesh:
    nodes: np.ndarray                      # (n_nodes, 3)
    elements: np.ndarray                   # (n_elements, nshape)
    order: int
    node_sets: dict[str, np.ndarray] = field(default_factory=dict)
    edge_sets: dict[str, np.ndarray] = field(default_factory=dict)  # (k, 2): elem, local edge
    meta: dict = field(default_factory=dict)

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def n_elements(self) -> int:
        return self.elements.shape[0]

    @property
    def n_dofs(self) -> int:
        return 3 * self.n_nodes

    def dofs(self, nodes, component: int) -> np.ndarray:
        """Global dof indices of one displacement component on given nodes."""
        nodes = np.asarray(nodes, dtype=int)
        return 3 * nodes + component

    def node_set(self, name: str) -> np.ndarray:
        try:
            return self.node_sets[name]
        except KeyError:
            raise KeyError(
                f"unknown node set {name!r}; available: {sorted(self.node_sets)}"
            )

    def locate(self, x: float, y: float):
        """Map a physical point to (element index, xi, eta).

        Only available for meshes built by build_rect_mesh (uses the
        structured layout stored in meta).  Points are clamped into the
        mesh bounding box.
        """
        m = self.meta
        if m.get("builder") != "rect":
            raise ValueError("locate() requires a structured rectangular mesh")
        ox, oy = m["origin"]
        lx, ly, nx, ny = m["lx"], m["ly"], m["nx"], m["ny"]
        fx = np.clip((x - ox) / lx, 0.0, 1.0) * nx
        fy = np.clip((y - oy) / ly, 0.0, 1.0) * ny
        ex = min(int(fx), nx - 1)
        ey = min(int(fy), ny - 1)
        xi = 2.0 * (fx - ex) - 1.0
        eta = 2.0 * (fy - ey) - 1.0
        return ey * nx + ex, xi, eta


def build_rect_mesh(lx: float, ly: float, nx: int, ny: int, order: int = 1,
                    origin=(0.0, 0.0)) -> Mesh:
    """Structured nx-by-ny mesh of Lagrange quads over [origin, origin+(lx,ly)].

    Node grid has (nx*order+1) x (ny*order+1) nodes; node index is
    j*(nx*order+1) + i with x fastest.
    """
    if order not in (1, 2, 3):
        raise ValueError("order must be 1, 2 or 3")
    if nx < 1 or ny < 1:
        raise ValueError("nx and ny must be positive")
    if lx <= 0.0 or ly <= 0.0:
        raise ValueError("lx and ly must be positive")
    p = order
    npx, npy = nx * p + 1, ny * p + 1
    xs = origin[0] + lx * np.arange(npx) / (npx - 1)
    ys = origin[1] + ly * np.arange(npy) / (npy - 1)
    xg, yg = np.meshgrid(xs, ys, indexing="xy")
    nodes = np.column_stack([xg.ravel(), yg.ravel(), np.zeros(npx * npy)])

    nshape = (p + 1) ** 2
    elements = np.empty((nx * ny, nshape), dtype=int)
    for ey in range(ny):
        for ex in range(nx):
            loc = []
            for jl in range(p + 1):
                for il in range(p + 1):
                    loc.append((ey * p + jl) * npx + ex * p + il)
            elements[ey * nx + ex] = loc

    grid = np.arange(npx * npy).reshape(npy, npx)
    node_sets = {
        "all": grid.ravel().copy(),
        "left": grid[:, 0].copy(),
        "right": grid[:, -1].copy(),
        "bottom": grid[0, :].copy(),
        "top": grid[-1, :].copy(),
        "corner_bl": np.array([grid[0, 0]]),
        "corner_br": np.array([grid[0, -1]]),
        "corner_tl": np.array([grid[-1, 0]]),
        "corner_tr": np.array([grid[-1, -1]]),
        "corners": np.array([grid[0, 0], grid[0, -1], grid[-1, 0], grid[-1, -1]]),
    }
    if npx % 2 == 1:
        mi = npx // 2
        node_sets["bottom_mid"] = np.array([grid[0, mi]])
        node_sets["top_mid"] = np.array([grid[-1, mi]])
        node_sets["midline_x"] = grid[:, mi].copy()
    if npy % 2 == 1:
        mj = npy // 2
        node_sets["left_mid"] = np.array([grid[mj, 0]])
        node_sets["right_mid"] = np.array([grid[mj, -1]])
        node_sets["midline_y"] = grid[mj, :].copy()
    if npx % 2 == 1 and npy % 2 == 1:
        node_sets["center"] = np.array([grid[npy // 2, npx // 2]])

    elem_grid = np.arange(nx * ny).reshape(ny, nx)
    edge_sets = {
        "bottom": np.column_stack([elem_grid[0, :], np.zeros(nx, dtype=int)]),
        "right": np.column_stack([elem_grid[:, -1], np.ones(ny, dtype=int)]),
        "top": np.column_stack([elem_grid[-1, :], np.full(nx, 2, dtype=int)]),
        "left": np.column_stack([elem_grid[:, 0], np.full(ny, 3, dtype=int)]),
    }

    meta = {
        "builder": "rect",
        "lx": float(lx),
        "ly": float(ly),
        "nx": int(nx),
        "ny": int(ny),
        "order": int(p),
        "origin": (float(origin[0]), float(origin[1])),
    }
    return Mesh(nodes, elements, p, node_sets, edge_sets, meta)


def element_columns(mesh: Mesh, index: int) -> np.ndarray:
    """Element ids of one vertical column of a rectangular mesh.

    ``index`` may be negative (python indexing); column i holds elements
    with x-position i in the structured element grid.
    """
    m = mesh.meta
    if m.get("builder") != "rect":
        raise ValueError("element_columns requires a structured rectangular mesh")
    nx, ny = m["nx"], m["ny"]
    return np.arange(nx * ny).reshape(ny, nx)[:, index].copy()

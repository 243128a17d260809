"""External load cases and their assembly.

Supported kinds:

* ``EdgeTraction``: dead force per unit reference edge length on a named
  boundary edge set, fixed direction, magnitude constant + linear in one
  reference coordinate.  No displacement dependence, so no tangent.
* ``Pressure``: follower pressure normal to the current surface,
  F_r = Int p (g1 x g2) . du/du_r dxi deta; contributes a nonsymmetric
  tangent dF_ext/du.
* ``BodyForce``: dead force per unit reference area (e.g. self weight).
* ``NodalForce``: fixed vector applied to each node of a node set.
* ``PenaltySpring``: grounded springs on selected dof components of a node
  set; contributes -k u to the external force and a constant diagonal
  tangent (so K = K_int - K_ext picks up +k).

Each load carries an optional per-step ``schedule`` (list of factors,
1-based steps); death loads are schedules ending in zero.  The solver
passes the per-load factors for the current step.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .element import reference_element
from .mesh import Mesh


@dataclass
class LoadBase:
    schedule: list[float] | None = field(default=None, kw_only=True)

    def factor(self, step: int, n_steps: int) -> float:
        """Factor for 1-based ``step``; default is full-on at every step."""
        if self.schedule is None:
            return 1.0
        if len(self.schedule) != n_steps:
            raise ValueError(
                f"schedule length {len(self.schedule)} != n_steps {n_steps}"
            )
        return float(self.schedule[step - 1])


@dataclass
class TractionProfile:
    """q(c) = const + linear * (c - center) / halfspan, c a ref coordinate.

    An optional ``window = (lo, hi)`` zeroes the profile outside lo <= c <= hi,
    which restricts the traction to part of an edge (e.g. a corner strip).
    """

    const: float
    linear: float = 0.0
    axis: int = 1
    center: float = 0.0
    halfspan: float = 1.0
    window: tuple[float, float] | None = None

    def __call__(self, coord):
        q = self.const + self.linear * (coord - self.center) / self.halfspan
        if self.window is not None:
            lo, hi = self.window
            q = np.where((coord >= lo) & (coord <= hi), q, 0.0)
        return q


@dataclass
class EdgeTraction(LoadBase):
    edge: str
    direction: tuple[float, float, float]
    profile: TractionProfile

    def __post_init__(self):
        d = np.asarray(self.direction, dtype=float)
        n = np.linalg.norm(d)
        if n == 0.0:
            raise ValueError("traction direction must be nonzero")
        object.__setattr__(self, "direction", tuple(d / n))


@dataclass
class Pressure(LoadBase):
    magnitude: float


@dataclass
class BodyForce(LoadBase):
    vector: tuple[float, float, float]


@dataclass
class NodalForce(LoadBase):
    nodes: str
    vector: tuple[float, float, float]


@dataclass
class PenaltySpring(LoadBase):
    nodes: str
    dofs: tuple[int, ...]
    stiffness: float


class LoadAssembler:
    """Evaluates external force and tangent for a list of loads."""

    def __init__(self, mesh: Mesh, loads):
        self.mesh = mesh
        self.loads = list(loads)
        self.quad = reference_element(mesh.order)
        self._edge_cache = {}
        self._has_pressure = any(isinstance(l, Pressure) for l in self.loads)

    # -- edge tables ---------------------------------------------------------

    def _edge_table(self, edge_name: str):
        """Per edge-QP: global connectivity, shape values, ref tangent, coord."""
        if edge_name in self._edge_cache:
            return self._edge_cache[edge_name]
        mesh, q = self.mesh, self.quad
        try:
            pairs = mesh.edge_sets[edge_name]
        except KeyError:
            raise KeyError(
                f"unknown edge set {edge_name!r}; available: {sorted(mesh.edge_sets)}"
            )
        conn = []
        nvals = []
        dline = []   # |dX/dt| * gauss weight
        coords = []  # reference (x, y, z) at the edge QP
        gw = q.gauss_1d[1]
        for elem, ledge in pairs:
            xe = mesh.nodes[mesh.elements[elem]]
            nmat = q.N_edge[ledge]
            dmat = q.dN_edge[ledge][:, :, q.edge_dir[ledge]]
            for k in range(len(gw)):
                tang = dmat[k] @ xe
                conn.append(mesh.elements[elem])
                nvals.append(nmat[k])
                dline.append(np.linalg.norm(tang) * gw[k])
                coords.append(nmat[k] @ xe)
        table = (np.array(conn), np.array(nvals), np.array(dline), np.array(coords))
        self._edge_cache[edge_name] = table
        return table

    # -- per-kind assembly ----------------------------------------------------

    def _edge_traction_force(self, load: EdgeTraction, f):
        conn, nvals, dline, coords = self._edge_table(load.edge)
        qmag = load.profile(coords[:, load.profile.axis])
        contrib = nvals * (qmag * dline)[:, None]      # (nqp_total, nshape)
        direction = np.asarray(load.direction)
        for i in range(3):
            if direction[i] != 0.0:
                np.add.at(f, 3 * conn + i, contrib * direction[i])

    def _body_force(self, load: BodyForce, f):
        mesh, q = self.mesh, self.quad
        xe = mesh.nodes[mesh.elements]
        g = np.einsum("eai,qaj->eqij", xe, q.dN_qp)
        jac = np.linalg.norm(np.cross(g[..., 0], g[..., 1]), axis=-1)
        w = q.qp_weights[None, :] * jac
        fe = np.einsum("qa,eq->ea", q.N_qp, w)
        vec = np.asarray(load.vector, dtype=float)
        for i in range(3):
            if vec[i] != 0.0:
                np.add.at(f, 3 * mesh.elements + i, fe * vec[i])

    def _nodal_force(self, load: NodalForce, f):
        nodes = self.mesh.node_set(load.nodes)
        vec = np.asarray(load.vector, dtype=float)
        for i in range(3):
            if vec[i] != 0.0:
                f[3 * nodes + i] += vec[i]

    def _spring(self, load: PenaltySpring, u, f, diag):
        nodes = self.mesh.node_set(load.nodes)
        for d in load.dofs:
            idx = 3 * nodes + d
            f[idx] += -load.stiffness * u[idx]
            diag[idx] += -load.stiffness

    def _pressure(self, load: Pressure, u, f, k_triplets):
        mesh, q = self.mesh, self.quad
        xc = mesh.nodes + u.reshape(-1, 3)
        xe = xc[mesh.elements]
        g = np.einsum("eai,qaj->eqij", xe, q.dN_qp)
        g1, g2 = g[..., 0], g[..., 1]
        nrm = np.cross(g1, g2)                                # (ne, nq, 3)
        w = q.qp_weights
        fe = load.magnitude * np.einsum("qa,eqi,q->eai", q.N_qp, nrm, w)
        np.add.at(f, 3 * mesh.elements[:, :, None] + np.arange(3), fe)

        if k_triplets is None:
            return
        # dF/du: d(g1 x g2) = dN_b1 (e_j x g2) + dN_b2 (g1 x e_j)
        eps = np.zeros((3, 3, 3))
        eps[0, 1, 2] = eps[1, 2, 0] = eps[2, 0, 1] = 1.0
        eps[0, 2, 1] = eps[1, 0, 2] = eps[2, 1, 0] = -1.0
        # (e_j x v)_i = eps[i, j, k] v_k
        t1 = np.einsum("ijk,eqk->eqij", eps, g2)              # e_j x g2
        t2 = -np.einsum("ijk,eqk->eqij", eps, g1)             # g1 x e_j
        ke = load.magnitude * (
            np.einsum("qa,qb,eqij,q->eaibj", q.N_qp, q.dN_qp[:, :, 0], t1, w)
            + np.einsum("qa,qb,eqij,q->eaibj", q.N_qp, q.dN_qp[:, :, 1], t2, w)
        )
        ns = q.nshape
        ke = ke.reshape(-1, 3 * ns, 3 * ns)
        dof = (3 * mesh.elements[:, :, None] + np.arange(3)).reshape(mesh.n_elements, -1)
        rows = np.repeat(dof[:, :, None], 3 * ns, axis=2)
        cols = np.repeat(dof[:, None, :], 3 * ns, axis=1)
        k_triplets.append((ke.ravel(), rows.ravel(), cols.ravel()))

    # -- public --------------------------------------------------------------

    def assemble(self, u, factors, with_tangent: bool = True):
        """External force and dF_ext/du for per-load ``factors``.

        Returns (F_ext, K_ext) with K_ext a CSR matrix or None when no load
        is displacement dependent (dead loads only).
        """
        ndof = self.mesh.n_dofs
        f = np.zeros(ndof)
        diag = np.zeros(ndof)
        k_triplets = [] if with_tangent else None
        any_diag = False
        for load, fac in zip(self.loads, factors, strict=True):
            if fac == 0.0:
                continue
            fl = np.zeros(ndof)
            if isinstance(load, EdgeTraction):
                self._edge_traction_force(load, fl)
            elif isinstance(load, BodyForce):
                self._body_force(load, fl)
            elif isinstance(load, NodalForce):
                self._nodal_force(load, fl)
            elif isinstance(load, PenaltySpring):
                dl = np.zeros(ndof)
                self._spring(load, u, fl, dl)
                diag += fac * dl
                any_diag = True
            elif isinstance(load, Pressure):
                scaled = Pressure(magnitude=load.magnitude * fac)
                self._pressure(scaled, u, fl, k_triplets)
                f += fl
                continue
            else:
                raise TypeError(f"unknown load kind {type(load).__name__}")
            f += fac * fl

        k_ext = None
        need_k = with_tangent and (any_diag or (k_triplets and len(k_triplets) > 0))
        if need_k:
            data = [sp.coo_matrix((ndof, ndof))]
            if any_diag:
                data.append(sp.diags(diag).tocoo())
            for vals, rows, cols in (k_triplets or []):
                data.append(sp.coo_matrix((vals, (rows, cols)), shape=(ndof, ndof)))
            k_ext = sum(data[1:], data[0]).tocsr()
        return f, k_ext

    def factors_at(self, step: int, n_steps: int) -> list[float]:
        return [l.factor(step, n_steps) for l in self.loads]


def external_force_and_tangent(mesh: Mesh, u, loads, factors=None,
                               with_tangent: bool = True):
    """One-shot external assembly; ``factors`` scalar or per-load sequence."""
    la = LoadAssembler(mesh, loads)
    if factors is None:
        factors = [1.0] * len(la.loads)
    elif np.isscalar(factors):
        factors = [float(factors)] * len(la.loads)
    return la.assemble(np.asarray(u, dtype=float).ravel(), factors, with_tangent)

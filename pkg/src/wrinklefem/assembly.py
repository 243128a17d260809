"""Total-Lagrangian membrane kinematics and vectorised assembly.

Kinematics per quadrature point: covariant base vectors G_a = dX/dtheta^a
(reference) and g_a = dx/dtheta^a (current), Green-Lagrange strain
E_ab = (g_ab - G_ab)/2 in curvilinear components, transformed into a local
orthonormal frame (e1 along G_1, normal G_1 x G_2) where the plane-stress
constitutive models operate.  Internal force and tangent follow from

    R_r = Int S : dE/du_r t dA,
    K_rs = Int (dS/dE : dE/du_s) : dE/du_r + S : d2E/du_r du_s t dA,

with the material part mapped through the constant reference-frame
transform and the geometric part through the contravariant stress
components.  All element loops are vectorised with einsum; the constitutive
call is a single batched evaluation over every quadrature point.

Cauchy stress recovery pushes the modified second Piola-Kirchhoff stress
forward with the in-plane deformation gradient F2d (sigma = F S F^T / det F).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .constitutive import BatchResponse, Material, evaluate_batch
from .element import reference_element
from .mesh import Mesh
from .tensor2d import DEFAULT_EIG_TOL, eig2_batch, perp_batch


class DegenerateElementError(RuntimeError):
    """Raised when an element has a vanishing reference surface Jacobian."""


def _surface_frames(tangents):
    """Orthonormal frame from two tangent vectors (..., 3, 2).

    Returns (e1, e2, normal, jac) with e1 along the first tangent and
    jac = |t1 x t2| the surface Jacobian.
    """
    t1 = tangents[..., :, 0]
    t2 = tangents[..., :, 1]
    nrm = np.cross(t1, t2)
    jac = np.linalg.norm(nrm, axis=-1)
    if np.any(jac <= 0.0) or not np.all(np.isfinite(jac)):
        raise DegenerateElementError("vanishing or invalid surface Jacobian")
    normal = nrm / jac[..., None]
    e1 = t1 / np.linalg.norm(t1, axis=-1)[..., None]
    e2 = np.cross(normal, e1)
    return e1, e2, normal, jac


@dataclass
class ElementKinematics:
    """Per-QP kinematic quantities for one element (leading axis = QP)."""

    G: np.ndarray          # (nqp, 3, 2) reference tangents
    g: np.ndarray          # (nqp, 3, 2) current tangents
    G_metric: np.ndarray   # (nqp, 2, 2)
    g_metric: np.ndarray   # (nqp, 2, 2)
    G_dual: np.ndarray     # (nqp, 2, 3) contravariant base vectors
    frame_e1: np.ndarray   # (nqp, 3)
    frame_e2: np.ndarray   # (nqp, 3)
    normal: np.ndarray     # (nqp, 3)
    E_cov: np.ndarray      # (nqp, 2, 2) curvilinear strain components
    E_local: np.ndarray    # (nqp, 3)  (E11, E22, E12) in the local frame
    jacobian: np.ndarray   # (nqp,) reference surface Jacobian
    weights: np.ndarray    # (nqp,) quadrature weight * jacobian


@dataclass
class FieldRecovery:
    """Per-QP recovered fields, shaped (n_elements, nqp, ...)."""

    position: np.ndarray          # (ne, nq, 3) reference QP positions
    state: np.ndarray             # (ne, nq) MembraneState ints
    pk2_principal: np.ndarray     # (ne, nq, 2) modified PK2 principal values
    cauchy_principal: np.ndarray  # (ne, nq, 2)
    wrinkle_dir: np.ndarray       # (ne, nq, 3) minor principal direction of S
    strain_local: np.ndarray      # (ne, nq, 3)


class Assembler:
    """Internal force/tangent assembly for one mesh + material + model."""

    def __init__(self, mesh: Mesh, material: Material, model: str = "mixed",
                 element_models: dict[int, str] | None = None,
                 tol_eig: float = DEFAULT_EIG_TOL, quadrature: str = "full"):
        self.mesh = mesh
        self.material = material
        self.model = model
        self.tol_eig = tol_eig
        if quadrature == "full":
            n_gauss = mesh.order + 1
        elif quadrature == "reduced":
            if mesh.order < 2:
                raise ValueError("reduced integration needs order >= 2")
            n_gauss = mesh.order
        else:
            raise ValueError(f"unknown quadrature {quadrature!r}")
        self.quadrature = quadrature
        self.quad = reference_element(mesh.order, n_gauss)

        q = self.quad
        self.X_e = mesh.nodes[mesh.elements]                       # (ne, ns, 3)
        dof = (3 * mesh.elements[:, :, None] + np.arange(3)).reshape(mesh.n_elements, -1)
        self.dof_idx = dof                                          # (ne, 3*ns)
        self._rows = np.repeat(dof[:, :, None], dof.shape[1], axis=2)
        self._cols = np.repeat(dof[:, None, :], dof.shape[1], axis=1)

        # reference kinematics (independent of u)
        G = np.einsum("eai,qaj->eqij", self.X_e, q.dN_qp)           # (ne,nq,3,2)
        e1, e2, normal, jac = _surface_frames(G)
        self.G = G
        self.jac = jac
        self.frame_e1, self.frame_e2, self.normal = e1, e2, normal
        g_metric = np.einsum("eqia,eqib->eqab", G, G)
        self.G_metric = g_metric
        ginv = np.linalg.inv(g_metric)
        self.G_dual = np.einsum("eqab,eqib->eqai", ginv, G)         # (ne,nq,2,3)
        frame = np.stack([e1, e2], axis=-1)                          # (ne,nq,3,2)
        self.A = np.einsum("eqai,eqij->eqaj", self.G_dual, frame)   # a_{alpha i}
        self.wdet = q.qp_weights[None, :] * jac * material.thickness
        self.qp_position = np.einsum("qa,eai->eqi", q.N_qp, self.X_e)

        # per-element constitutive model grouping
        ne = mesh.n_elements
        names = np.array([model] * ne, dtype=object)
        if element_models:
            for eid, name in element_models.items():
                names[int(eid)] = name
        self.element_model_names = names
        self.model_groups = {}
        for name in sorted(set(names.tolist())):
            self.model_groups[name] = np.flatnonzero(names == name)

    # -- kinematics ---------------------------------------------------------

    def _current_tangents(self, u):
        x_e = self.X_e + u.reshape(-1, 3)[self.mesh.elements]
        return np.einsum("eai,qaj->eqij", x_e, self.quad.dN_qp)

    def local_strains(self, u):
        """(e11, e22, e12) in the local frame, each shaped (ne, nq)."""
        g = self._current_tangents(u)
        g_metric = np.einsum("eqia,eqib->eqab", g, g)
        e_cov = 0.5 * (g_metric - self.G_metric)
        e_loc = np.einsum("eqai,eqab,eqbj->eqij", self.A, e_cov, self.A)
        return g, e_cov, e_loc[..., 0, 0], e_loc[..., 1, 1], 0.5 * (
            e_loc[..., 0, 1] + e_loc[..., 1, 0]
        )

    def element_kinematics(self, element_index: int, u) -> ElementKinematics:
        """Spec'd per-element kinematics view (single element, all QPs)."""
        g, e_cov, e11, e22, e12 = self.local_strains(u)
        e = element_index
        g_metric = np.einsum("qia,qib->qab", g[e], g[e])
        return ElementKinematics(
            G=self.G[e].copy(),
            g=g[e].copy(),
            G_metric=self.G_metric[e].copy(),
            g_metric=g_metric,
            G_dual=self.G_dual[e].copy(),
            frame_e1=self.frame_e1[e].copy(),
            frame_e2=self.frame_e2[e].copy(),
            normal=self.normal[e].copy(),
            E_cov=e_cov[e].copy(),
            E_local=np.stack([e11[e], e22[e], e12[e]], axis=-1),
            jacobian=self.jac[e].copy(),
            weights=(self.quad.qp_weights * self.jac[e]).copy(),
        )

    # -- constitutive -------------------------------------------------------

    def response(self, u) -> tuple[BatchResponse, np.ndarray]:
        """Batched constitutive response at every QP; also returns g."""
        g, _, e11, e22, e12 = self.local_strains(u)
        ne, nq = e11.shape
        flat = lambda a: a.reshape(ne * nq)
        e11f, e22f, e12f = flat(e11), flat(e22), flat(e12)
        if len(self.model_groups) == 1:
            r = evaluate_batch(self.model, e11f, e22f, e12f, self.material, self.tol_eig)
            return r, g
        # per-element model overrides: evaluate each subset, then scatter
        n = ne * nq
        psi_p = np.empty(n)
        psi_m = np.empty(n)
        stress = np.empty((n, 3))
        tangent = np.empty((n, 3, 3))
        state = np.empty(n, dtype=np.int64)
        nu_star = np.empty(n)
        qp_idx = np.arange(n).reshape(ne, nq)
        for name, eids in self.model_groups.items():
            idx = qp_idx[eids].ravel()
            r = evaluate_batch(name, e11f[idx], e22f[idx], e12f[idx],
                               self.material, self.tol_eig)
            psi_p[idx] = r.psi_plus
            psi_m[idx] = r.psi_minus
            stress[idx] = r.stress
            tangent[idx] = r.tangent
            state[idx] = r.state
            nu_star[idx] = r.nu_star
        return BatchResponse(psi_p, psi_m, stress, tangent, state, nu_star), g

    # -- assembly -----------------------------------------------------------

    def _b_matrix(self, g):
        """Local-frame strain-displacement operator B (ne, nq, 3, 3*ns)."""
        q = self.quad
        ceq = np.einsum("qaA,eqAi->eqai", q.dN_qp, self.A)      # (ne,nq,ns,2)
        gbar = np.einsum("eqBj,eqkB->eqjk", self.A, g)          # (ne,nq,2,3)
        ne, nq = gbar.shape[:2]
        ns = q.nshape
        b = np.empty((ne, nq, 3, ns, 3))
        b[:, :, 0] = ceq[..., 0, None] * gbar[:, :, None, 0, :]
        b[:, :, 1] = ceq[..., 1, None] * gbar[:, :, None, 1, :]
        b[:, :, 2] = (ceq[..., 0, None] * gbar[:, :, None, 1, :]
                      + ceq[..., 1, None] * gbar[:, :, None, 0, :])
        return b.reshape(ne, nq, 3, 3 * ns)

    def internal_force(self, u) -> np.ndarray:
        r, g = self.response(u)
        ne, nq = self.jac.shape
        sv = r.stress.reshape(ne, nq, 3)
        b = self._b_matrix(g)
        f_e = np.einsum("eqIr,eqI,eq->er", b, sv, self.wdet)
        f = np.zeros(self.mesh.n_dofs)
        np.add.at(f, self.dof_idx, f_e)
        return f

    def internal_force_and_tangent(self, u):
        """Assembled internal force vector and tangent stiffness (CSR)."""
        r, g = self.response(u)
        ne, nq = self.jac.shape
        sv = r.stress.reshape(ne, nq, 3)
        cv = r.tangent.reshape(ne, nq, 3, 3)
        b = self._b_matrix(g)

        f_e = np.einsum("eqIr,eqI,eq->er", b, sv, self.wdet)
        f = np.zeros(self.mesh.n_dofs)
        np.add.at(f, self.dof_idx, f_e)

        bc = np.einsum("eqIr,eqIJ->eqrJ", b, cv)
        k_mat = np.einsum("eqrJ,eqJs,eq->ers", bc, b, self.wdet)

        # geometric part: contravariant stress components
        s_t = np.empty(sv.shape[:2] + (2, 2))
        s_t[..., 0, 0] = sv[..., 0]
        s_t[..., 1, 1] = sv[..., 1]
        s_t[..., 0, 1] = sv[..., 2]
        s_t[..., 1, 0] = sv[..., 2]
        s_curv = np.einsum("eqai,eqij,eqbj->eqab", self.A, s_t, self.A)
        kgeo = np.einsum("qaA,eqAB,qbB,eq->eab", self.quad.dN_qp, s_curv,
                         self.quad.dN_qp, self.wdet)
        k_e = k_mat + np.kron(kgeo, np.eye(3)).reshape(k_mat.shape)

        k = sp.coo_matrix(
            (k_e.ravel(), (self._rows.ravel(), self._cols.ravel())),
            shape=(self.mesh.n_dofs, self.mesh.n_dofs),
        ).tocsr()
        return f, k

    def stored_energy(self, u) -> float:
        """Total stored energy Int (psi+ + eta psi-) t dA."""
        r, _ = self.response(u)
        ne, nq = self.jac.shape
        psi = (r.psi_plus + self.material.eta * r.psi_minus).reshape(ne, nq)
        return float(np.sum(psi * self.wdet))

    # -- recovery -----------------------------------------------------------

    def recover_fields(self, u) -> FieldRecovery:
        r, g = self.response(u)
        ne, nq = self.jac.shape
        sv = r.stress.reshape(ne, nq, 3)

        s1, s2, n1x, n1y, _ = eig2_batch(sv[..., 0], sv[..., 1], sv[..., 2],
                                         self.tol_eig)
        n2x, n2y = perp_batch(n1x, n1y)
        wdir = n2x[..., None] * self.frame_e1 + n2y[..., None] * self.frame_e2

        # in-plane deformation gradient in the local frames
        ce1, ce2, cn, _ = _surface_frames(g)
        cur = np.stack([ce1, ce2], axis=-2)                       # (ne,nq,2,3)
        f2d = np.einsum("eqik,eqkA,eqAj->eqij",
                        cur, g, self.A)                           # (ne,nq,2,2)
        det = f2d[..., 0, 0] * f2d[..., 1, 1] - f2d[..., 0, 1] * f2d[..., 1, 0]
        s_t = np.empty_like(f2d)
        s_t[..., 0, 0] = sv[..., 0]
        s_t[..., 1, 1] = sv[..., 1]
        s_t[..., 0, 1] = sv[..., 2]
        s_t[..., 1, 0] = sv[..., 2]
        sig = np.einsum("eqik,eqkl,eqjl->eqij", f2d, s_t, f2d) / det[..., None, None]
        c1, c2, _, _, _ = eig2_batch(sig[..., 0, 0], sig[..., 1, 1],
                                     0.5 * (sig[..., 0, 1] + sig[..., 1, 0]),
                                     self.tol_eig)

        _, _, e11, e22, e12 = self.local_strains(u)
        return FieldRecovery(
            position=self.qp_position.copy(),
            state=r.state.reshape(ne, nq),
            pk2_principal=np.stack([s1, s2], axis=-1),
            cauchy_principal=np.stack([c1, c2], axis=-1),
            wrinkle_dir=wdir,
            strain_local=np.stack([e11, e22, e12], axis=-1),
        )

    # -- point evaluation ---------------------------------------------------

    def evaluate_points(self, u, points):
        """Displacement and recovered stress at physical points.

        ``points``: iterable of (x, y).  Returns a dict of arrays keyed by
        'displacement' (n,3), 'state' (n,), 'pk2_principal' (n,2),
        'cauchy_principal' (n,2), 'cauchy_local' (n,3), 'strain_local'
        (n,3), 'wrinkle_dir' (n,3).
        """
        mesh, q = self.mesh, self.quad
        uu = u.reshape(-1, 3)
        disp = []
        e11l, e22l, e12l = [], [], []
        frames = []
        f2ds = []
        model_names = []
        for (x, y) in points:
            eid, xi, eta = mesh.locate(x, y)
            n = q.shape(xi, eta)
            dn = q.shape_grad(xi, eta)
            conn = mesh.elements[eid]
            xe = mesh.nodes[conn]
            ue = uu[conn]
            disp.append(n @ ue)
            G = xe.T @ dn                                   # (3,2)
            g = (xe + ue).T @ dn
            e1, e2, nrm, _ = _surface_frames(G[None])
            e1, e2 = e1[0], e2[0]
            ginv = np.linalg.inv(G.T @ G)
            Gdual = ginv @ G.T                              # (2,3)
            A = Gdual @ np.stack([e1, e2], axis=-1)         # (2,2)
            e_cov = 0.5 * (g.T @ g - G.T @ G)
            e_loc = A.T @ e_cov @ A
            e11l.append(e_loc[0, 0])
            e22l.append(e_loc[1, 1])
            e12l.append(0.5 * (e_loc[0, 1] + e_loc[1, 0]))
            ce1, ce2, _, _ = _surface_frames(g[None])
            cur = np.stack([ce1[0], ce2[0]], axis=0)        # (2,3)
            f2ds.append(cur @ g @ A)
            frames.append((e1, e2))
            model_names.append(self.element_model_names[eid])

        n = len(disp)
        e11a, e22a, e12a = np.array(e11l), np.array(e22l), np.array(e12l)
        stress = np.empty((n, 3))
        state = np.empty(n, dtype=np.int64)
        for name in sorted(set(model_names)):
            idx = [k for k in range(n) if model_names[k] == name]
            r = evaluate_batch(name, e11a[idx], e22a[idx], e12a[idx],
                               self.material, self.tol_eig)
            stress[idx] = r.stress
            state[idx] = r.state

        s1, s2, n1x, n1y, _ = eig2_batch(stress[:, 0], stress[:, 1], stress[:, 2],
                                         self.tol_eig)
        n2x, n2y = perp_batch(n1x, n1y)
        f2d = np.array(f2ds)
        det = np.linalg.det(f2d)
        s_t = np.empty((n, 2, 2))
        s_t[:, 0, 0] = stress[:, 0]
        s_t[:, 1, 1] = stress[:, 1]
        s_t[:, 0, 1] = s_t[:, 1, 0] = stress[:, 2]
        sig = np.einsum("nik,nkl,njl->nij", f2d, s_t, f2d) / det[:, None, None]
        c1, c2, _, _, _ = eig2_batch(sig[:, 0, 0], sig[:, 1, 1],
                                     0.5 * (sig[:, 0, 1] + sig[:, 1, 0]), self.tol_eig)
        fe1 = np.array([f[0] for f in frames])
        fe2 = np.array([f[1] for f in frames])
        return {
            "displacement": np.array(disp),
            "state": state,
            "pk2_voigt": stress,
            "pk2_principal": np.stack([s1, s2], axis=-1),
            "cauchy_principal": np.stack([c1, c2], axis=-1),
            "cauchy_local": np.stack(
                [sig[:, 0, 0], sig[:, 1, 1], 0.5 * (sig[:, 0, 1] + sig[:, 1, 0])], axis=-1
            ),
            "strain_local": np.stack([e11a, e22a, e12a], axis=-1),
            "wrinkle_dir": n2x[:, None] * fe1 + n2y[:, None] * fe2,
        }


# -- spec'd free-function entry points --------------------------------------


def compute_kinematics(mesh: Mesh, element_index: int, u, material: Material,
                       model: str = "mixed") -> ElementKinematics:
    return Assembler(mesh, material, model).element_kinematics(element_index, u)


def internal_force_and_tangent(mesh: Mesh, u, material: Material,
                               model: str = "mixed",
                               element_models: dict[int, str] | None = None):
    return Assembler(mesh, material, model, element_models).internal_force_and_tangent(u)


def recover_fields(mesh: Mesh, u, material: Material, model: str = "mixed",
                   element_models: dict[int, str] | None = None) -> FieldRecovery:
    return Assembler(mesh, material, model, element_models).recover_fields(u)

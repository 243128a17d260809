"""Plane-stress membrane constitutive models with wrinkling.

A membrane point is Taut, Wrinkled, or Slack.  The base material is a
plane-stress St. Venant-Kirchhoff solid; wrinkling and slackness are handled
by splitting the response into a positive (load-carrying) and a negative
part via the spectral decomposition of the Green-Lagrange strain, and
retaining the negative part only through a residual factor eta:

    S_tilde = S+ + eta * S-,   C_tilde = C+ + eta * C-,
    psi_tilde = psi+ + eta * psi-.

Three splits are implemented:

* ``stress``: split driven by the signs of the trial principal stresses
  E_a + nu*E_b; its tangent loses major symmetry in the wrinkled state.
* ``mixed``:  taut/slack detection mixes stress and strain criteria; the
  effective Poisson ratio nu* = H+(E2 + nu*E1) * nu switches off transverse
  coupling outside the taut regime, which keeps the tangent symmetric.
* ``strain``: split driven by the signs of the principal strains and of
  tr(E) (Macaulay brackets on the volumetric part); always symmetric, but a
  wrinkled point keeps a transverse stress nu*E/(1-nu^2)*tr(E) when tr(E)>0.

All kernels are vectorised over a leading batch axis; the scalar API wraps
batch size 1.  States are classified from the *unmodified* trial quantities:

    stress criterion:  Taut if S2 > 0, Slack if S1 <= 0, else Wrinkled
    strain criterion:  Taut if E2 > 0, Slack if E1 <= 0, else Wrinkled
    mixed  criterion:  Taut if S2 > 0, Slack if E1 <= 0, else Wrinkled

Heaviside convention: H+(x) = 1 for x > 0 and 0 at x = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .tensor2d import (
    DEFAULT_EIG_TOL,
    SymTensor2,
    Tangent4,
    eig2_batch,
    projector_products_batch,
    projector_voigt_batch,
)

MODEL_NAMES = ("svk", "stress", "strain", "mixed")


class MembraneState(IntEnum):
    TAUT = 0
    WRINKLED = 1
    SLACK = 2


@dataclass(frozen=True)
class Material:
    """Isotropic membrane material: E, nu, thickness, residual factor eta."""

    youngs_modulus: float
    poisson_ratio: float
    thickness: float = 1.0
    eta: float = 0.0

    def __post_init__(self):
        if not self.youngs_modulus > 0.0:
            raise ValueError("youngs_modulus must be positive")
        if not 0.0 <= self.poisson_ratio < 0.5:
            raise ValueError("poisson_ratio must be in [0, 0.5)")
        if not self.thickness > 0.0:
            raise ValueError("thickness must be positive")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError("eta must be in [0, 1]")

    @property
    def lam(self) -> float:
        """First Lame parameter (3D)."""
        e, nu = self.youngs_modulus, self.poisson_ratio
        return e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu))

    @property
    def mu(self) -> float:
        """Shear modulus."""
        return self.youngs_modulus / (2.0 * (1.0 + self.poisson_ratio))

    @property
    def lam_plane_stress(self) -> float:
        """Plane-stress-condensed Lame parameter 2*lam*mu/(lam + 2*mu)."""
        return self.youngs_modulus * self.poisson_ratio / (1.0 - self.poisson_ratio**2)


@dataclass
class PointResponse:
    """Constitutive response at one membrane point.

    ``stress``/``tangent`` are the modified (eta-combined) quantities;
    ``psi_plus``/``psi_minus`` are the raw split energy densities, so the
    stored energy is ``psi_plus + eta * psi_minus``.  ``nu_star`` is set by
    the mixed model only.
    """

    psi_plus: float
    psi_minus: float
    stress: SymTensor2
    tangent: Tangent4
    state: MembraneState
    nu_star: float | None = None


@dataclass
class BatchResponse:
    """Vectorised PointResponse: arrays share a leading batch axis.

    ``stress`` is stress-Voigt (N,3); ``tangent`` is (N,3,3); ``state`` is
    an int array of MembraneState values.
    """

    psi_plus: np.ndarray
    psi_minus: np.ndarray
    stress: np.ndarray
    tangent: np.ndarray
    state: np.ndarray
    nu_star: np.ndarray


class UntestablePointError(ValueError):
    """Point too close to a state/degeneracy boundary for an FD tangent check."""


def isotropic_tangent(youngs_modulus: float, nu) -> np.ndarray:
    """Plane-stress isotropic Voigt tangent; ``nu`` may be an array."""
    nu = np.asarray(nu, dtype=float)
    fac = youngs_modulus / (1.0 - nu**2)
    c = np.zeros(nu.shape + (3, 3))
    c[..., 0, 0] = fac
    c[..., 1, 1] = fac
    c[..., 0, 1] = fac * nu
    c[..., 1, 0] = fac * nu
    c[..., 2, 2] = fac * (1.0 - nu) / 2.0
    return c


# identity on symmetric tensors, Voigt (strain-in / stress-out)
_ISYM = np.diag([1.0, 1.0, 0.5])


def _as_batch(e11, e22, e12):
    e11 = np.atleast_1d(np.asarray(e11, dtype=float))
    e22 = np.atleast_1d(np.asarray(e22, dtype=float))
    e12 = np.atleast_1d(np.asarray(e12, dtype=float))
    return np.broadcast_arrays(e11, e22, e12)


def _spectral_tables(e11, e22, e12, tol_eig):
    e1, e2, n1x, n1y, deg = eig2_batch(e11, e22, e12, tol_eig)
    m1v, m2v = projector_voigt_batch(n1x, n1y)
    q11, q22, q12, q21, gsym = projector_products_batch(m1v, m2v)
    gap = e1 - e2
    safe_gap = np.where(deg, 1.0, gap)
    md1 = gsym / (2.0 * safe_gap)[..., None, None]  # dM1/dE; garbage where deg
    return e1, e2, m1v, m2v, q11, q22, q12, q21, md1, deg


def classify_batch(e11, e22, e12, material: Material, criterion: str,
                   tol_eig: float = DEFAULT_EIG_TOL) -> np.ndarray:
    """Vectorised membrane-state classification from trial quantities."""
    e11, e22, e12 = _as_batch(e11, e22, e12)
    e1, e2, _, _, _ = eig2_batch(e11, e22, e12, tol_eig)
    nu = material.poisson_ratio
    s1t = e1 + nu * e2  # trial principal stresses up to a positive factor
    s2t = e2 + nu * e1
    if criterion == "stress":
        taut, slack = s2t > 0.0, s1t <= 0.0
    elif criterion == "strain":
        taut, slack = e2 > 0.0, e1 <= 0.0
    elif criterion == "mixed":
        taut, slack = s2t > 0.0, e1 <= 0.0
    else:
        raise ValueError(f"unknown criterion {criterion!r}")
    state = np.full(e1.shape, MembraneState.WRINKLED, dtype=np.int64)
    state[slack] = MembraneState.SLACK
    state[taut] = MembraneState.TAUT
    return state


def classify(strain: SymTensor2, material: Material, criterion: str,
             tol_eig: float = DEFAULT_EIG_TOL) -> MembraneState:
    """Classify a single point as Taut / Wrinkled / Slack."""
    s = classify_batch(strain.a11, strain.a22, strain.a12, material, criterion, tol_eig)
    return MembraneState(int(s[0]))


def svk_base_batch(e11, e22, e12, material: Material):
    """Plane-stress St. Venant-Kirchhoff: (psi, stress Voigt, tangent)."""
    e11, e22, e12 = _as_batch(e11, e22, e12)
    lam_ps = material.lam_plane_stress
    mu = material.mu
    tr = e11 + e22
    tr_e2 = e11**2 + e22**2 + 2.0 * e12**2
    psi = 0.5 * lam_ps * tr**2 + mu * tr_e2
    s11 = lam_ps * tr + 2.0 * mu * e11
    s22 = lam_ps * tr + 2.0 * mu * e22
    s12 = 2.0 * mu * e12
    stress = np.stack([s11, s22, s12], axis=-1)
    tangent = np.broadcast_to(
        isotropic_tangent(material.youngs_modulus, material.poisson_ratio),
        e11.shape + (3, 3),
    ).copy()
    return psi, stress, tangent


def svk_base(strain: SymTensor2, material: Material):
    """Scalar SVK evaluation: (psi, SymTensor2 stress, Tangent4)."""
    psi, sv, c = svk_base_batch(strain.a11, strain.a22, strain.a12, material)
    return float(psi[0]), SymTensor2.from_voigt(sv[0], "stress"), Tangent4(c[0])


def _split_spectral(e1, e2, m1v, m2v, q11, q22, q12, q21, md1, deg,
                    youngs_modulus, nu):
    """Positive/negative split driven by the signs of E_a + nu*E_b.

    ``nu`` is a per-point array (the stress split passes the material nu,
    the mixed model passes nu*).  Returns S+, S-, C+, C-, psi+, psi-.
    """
    fac = youngs_modulus / (1.0 - nu**2)
    i1 = e1 + nu * e2
    i2 = e2 + nu * e1
    g1 = (i1 > 0.0).astype(float)
    g2 = (i2 > 0.0).astype(float)

    s1p, s1m = fac * g1 * i1, fac * (1.0 - g1) * i1
    s2p, s2m = fac * g2 * i2, fac * (1.0 - g2) * i2
    sp = s1p[..., None] * m1v + s2p[..., None] * m2v
    sm = s1m[..., None] * m1v + s2m[..., None] * m2v
    # psi = 1/2 S : E and M_a : E = E_a
    psi_p = 0.5 * (s1p * e1 + s2p * e2)
    psi_m = 0.5 * (s1m * e1 + s2m * e2)

    b1 = q11 + nu[..., None, None] * q12 + i1[..., None, None] * md1
    b2 = q22 + nu[..., None, None] * q21 - i2[..., None, None] * md1
    facn = fac[..., None, None]
    cp = facn * (g1[..., None, None] * b1 + g2[..., None, None] * b2)
    cm = facn * ((1.0 - g1)[..., None, None] * b1 + (1.0 - g2)[..., None, None] * b2)

    if np.any(deg):
        # Coincident eigenvalues: both split indicators coincide, so the
        # response is isotropic; the tangent limit is the isotropic tensor
        # gated to one side.
        ciso = isotropic_tangent(youngs_modulus, nu)
        gate = (i1 > 0.0)[..., None, None]
        degn = deg[..., None, None]
        cp = np.where(degn, np.where(gate, ciso, 0.0), cp)
        cm = np.where(degn, np.where(gate, 0.0, ciso), cm)
    return sp, sm, cp, cm, psi_p, psi_m


def stress_split_batch(e11, e22, e12, material: Material,
                       tol_eig: float = DEFAULT_EIG_TOL) -> BatchResponse:
    """Split by the signs of the trial principal stresses."""
    e11, e22, e12 = _as_batch(e11, e22, e12)
    tabs = _spectral_tables(e11, e22, e12, tol_eig)
    e1 = tabs[0]
    nu = np.full(e1.shape, material.poisson_ratio)
    sp, sm, cp, cm, psi_p, psi_m = _split_spectral(*tabs, material.youngs_modulus, nu)
    eta = material.eta
    return BatchResponse(
        psi_plus=psi_p,
        psi_minus=psi_m,
        stress=sp + eta * sm,
        tangent=cp + eta * cm,
        state=classify_batch(e11, e22, e12, material, "stress", tol_eig),
        nu_star=np.full(e1.shape, np.nan),
    )


def mixed_batch(e11, e22, e12, material: Material,
                tol_eig: float = DEFAULT_EIG_TOL) -> BatchResponse:
    """Mixed-criterion model: nu* = H+(E2 + nu*E1) * nu, then stress split."""
    e11, e22, e12 = _as_batch(e11, e22, e12)
    tabs = _spectral_tables(e11, e22, e12, tol_eig)
    e1, e2 = tabs[0], tabs[1]
    nu = material.poisson_ratio
    nu_star = np.where(e2 + nu * e1 > 0.0, nu, 0.0)
    sp, sm, cp, cm, psi_p, psi_m = _split_spectral(*tabs, material.youngs_modulus, nu_star)
    eta = material.eta
    return BatchResponse(
        psi_plus=psi_p,
        psi_minus=psi_m,
        stress=sp + eta * sm,
        tangent=cp + eta * cm,
        state=classify_batch(e11, e22, e12, material, "mixed", tol_eig),
        nu_star=nu_star,
    )


def strain_split_batch(e11, e22, e12, material: Material,
                       tol_eig: float = DEFAULT_EIG_TOL) -> BatchResponse:
    """Split by the signs of the principal strains and of tr(E)."""
    e11, e22, e12 = _as_batch(e11, e22, e12)
    e1, e2, m1v, m2v, q11, q22, q12, q21, md1, deg = _spectral_tables(
        e11, e22, e12, tol_eig
    )
    em = material.youngs_modulus
    nu = material.poisson_ratio
    fac = em / (1.0 - nu**2)
    lam_ps = material.lam_plane_stress
    mu = material.mu
    tr = e1 + e2
    g1 = (e1 > 0.0).astype(float)
    g2 = (e2 > 0.0).astype(float)
    gt = (tr > 0.0).astype(float)
    iv = np.array([1.0, 1.0, 0.0])

    dev_p = fac * (1.0 - nu) * (g1 * e1)[..., None] * m1v \
        + fac * (1.0 - nu) * (g2 * e2)[..., None] * m2v
    dev_m = fac * (1.0 - nu) * ((1.0 - g1) * e1)[..., None] * m1v \
        + fac * (1.0 - nu) * ((1.0 - g2) * e2)[..., None] * m2v
    vol_p = fac * nu * (gt * tr)[..., None] * iv
    vol_m = fac * nu * ((1.0 - gt) * tr)[..., None] * iv
    sp = dev_p + vol_p
    sm = dev_m + vol_m

    psi_p = 0.5 * lam_ps * (gt * tr) ** 2 + mu * (g1 * e1**2 + g2 * e2**2)
    psi_m = 0.5 * lam_ps * ((1.0 - gt) * tr) ** 2 \
        + mu * ((1.0 - g1) * e1**2 + (1.0 - g2) * e2**2)

    # d(E_a M_a)/dE per branch; the volumetric M-terms cancel pairwise
    # because dM2/dE = -dM1/dE, leaving (I (x) I) for the trace block.
    b1 = q11 + e1[..., None, None] * md1
    b2 = q22 - e2[..., None, None] * md1
    qsum = q11 + q22 + q12 + q21
    one_m_nu = 1.0 - nu
    cp = fac * (one_m_nu * (g1[..., None, None] * b1 + g2[..., None, None] * b2)
                + nu * gt[..., None, None] * qsum)
    cm = fac * (one_m_nu * ((1.0 - g1)[..., None, None] * b1
                            + (1.0 - g2)[..., None, None] * b2)
                + nu * (1.0 - gt)[..., None, None] * qsum)

    if np.any(deg):
        # limit of the deviatoric block: (1-nu) * I_sym, gated by the shared
        # eigenvalue sign; trace block is already regular.
        gate = (e1 > 0.0)[..., None, None]
        degn = deg[..., None, None]
        dev_lim_p = np.where(gate, fac * one_m_nu, 0.0) * _ISYM
        dev_lim_m = np.where(gate, 0.0, fac * one_m_nu) * _ISYM
        cp = np.where(degn, dev_lim_p + fac * nu * gt[..., None, None] * qsum, cp)
        cm = np.where(degn, dev_lim_m + fac * nu * (1.0 - gt)[..., None, None] * qsum, cm)

    eta = material.eta
    return BatchResponse(
        psi_plus=psi_p,
        psi_minus=psi_m,
        stress=sp + eta * sm,
        tangent=cp + eta * cm,
        state=classify_batch(e11, e22, e12, material, "strain", tol_eig),
        nu_star=np.full(e1.shape, np.nan),
    )


def svk_batch(e11, e22, e12, material: Material,
              tol_eig: float = DEFAULT_EIG_TOL) -> BatchResponse:
    """Unsplit SVK wrapped in the common response layout (always 'taut')."""
    psi, stress, tangent = svk_base_batch(e11, e22, e12, material)
    return BatchResponse(
        psi_plus=psi,
        psi_minus=np.zeros_like(psi),
        stress=stress,
        tangent=tangent,
        state=np.full(psi.shape, MembraneState.TAUT, dtype=np.int64),
        nu_star=np.full(psi.shape, np.nan),
    )


_BATCH_MODELS = {
    "svk": svk_batch,
    "stress": stress_split_batch,
    "strain": strain_split_batch,
    "mixed": mixed_batch,
}


def evaluate_batch(model: str, e11, e22, e12, material: Material,
                   tol_eig: float = DEFAULT_EIG_TOL) -> BatchResponse:
    """Vectorised constitutive evaluation for a named model."""
    try:
        fn = _BATCH_MODELS[model]
    except KeyError:
        raise ValueError(f"unknown model {model!r}; expected one of {MODEL_NAMES}")
    return fn(e11, e22, e12, material, tol_eig)


def _scalar(model: str, strain: SymTensor2, material: Material, tol_eig) -> PointResponse:
    r = evaluate_batch(model, strain.a11, strain.a22, strain.a12, material, tol_eig)
    nu_star = float(r.nu_star[0]) if np.isfinite(r.nu_star[0]) else None
    return PointResponse(
        psi_plus=float(r.psi_plus[0]),
        psi_minus=float(r.psi_minus[0]),
        stress=SymTensor2.from_voigt(r.stress[0], "stress"),
        tangent=Tangent4(r.tangent[0]),
        state=MembraneState(int(r.state[0])),
        nu_star=nu_star,
    )


def stress_split_model(strain: SymTensor2, material: Material,
                       tol_eig: float = DEFAULT_EIG_TOL) -> PointResponse:
    return _scalar("stress", strain, material, tol_eig)


def mixed_model(strain: SymTensor2, material: Material,
                tol_eig: float = DEFAULT_EIG_TOL) -> PointResponse:
    return _scalar("mixed", strain, material, tol_eig)


def strain_split_model(strain: SymTensor2, material: Material,
                       tol_eig: float = DEFAULT_EIG_TOL) -> PointResponse:
    return _scalar("strain", strain, material, tol_eig)


def evaluate(model: str, strain: SymTensor2, material: Material,
             tol_eig: float = DEFAULT_EIG_TOL) -> PointResponse:
    return _scalar(model, strain, material, tol_eig)


def _boundary_margin(model: str, strain: SymTensor2, material: Material, tol_eig) -> float:
    """Distance of the point from its nearest gating boundary.

    The eigenvalue gap is deliberately not a boundary: inside the taut and
    slack regions the response is smooth across coincident eigenvalues, and
    a wrinkled point near coincidence is always near a gating boundary
    anyway (its indicators differ by a multiple of the gap).
    """
    e1, e2, _, _, _ = eig2_batch(strain.a11, strain.a22, strain.a12, tol_eig)
    e1, e2 = float(e1), float(e2)
    nu = material.poisson_ratio
    if model == "svk":
        return np.inf
    if model == "stress":
        inds = [e1 + nu * e2, e2 + nu * e1]
    elif model == "mixed":
        nu_star = nu if e2 + nu * e1 > 0.0 else 0.0
        inds = [e2 + nu * e1, e1 + nu_star * e2, e2 + nu_star * e1]
    elif model == "strain":
        inds = [e1, e2, e1 + e2]
    else:
        raise ValueError(f"unknown model {model!r}")
    return min(abs(v) for v in inds)


def tangent_fd_check(model: str, strain: SymTensor2, material: Material,
                     step: float = 1e-6, tol_eig: float = DEFAULT_EIG_TOL) -> float:
    """Central-difference check of the consistent tangent.

    Perturbs Voigt strain components by ``step``, differentiates the
    modified stress, and returns the max entrywise error relative to the
    largest tangent entry.  Raises UntestablePointError when the point is
    within 10*step of a state/degeneracy boundary, where the one-sided
    derivative jump would dominate.
    """
    margin = _boundary_margin(model, strain, material, tol_eig)
    if margin < 10.0 * step:
        raise UntestablePointError(
            f"point is {margin:.3e} from a state boundary; need >= {10 * step:.1e}"
        )
    c = evaluate(model, strain, material, tol_eig).tangent.c
    fd = np.empty((3, 3))
    for j in range(3):
        d = [0.0, 0.0, 0.0]
        d[j] = step if j < 2 else 0.5 * step  # Voigt strain step
        sp = evaluate(
            model, SymTensor2(strain.a11 + d[0], strain.a22 + d[1], strain.a12 + d[2]),
            material, tol_eig,
        ).stress.voigt("stress")
        sm = evaluate(
            model, SymTensor2(strain.a11 - d[0], strain.a22 - d[1], strain.a12 - d[2]),
            material, tol_eig,
        ).stress.voigt("stress")
        fd[:, j] = (sp - sm) / (2.0 * step)
    scale = max(np.abs(c).max(), 1e-300)
    return float(np.abs(fd - c).max() / scale)

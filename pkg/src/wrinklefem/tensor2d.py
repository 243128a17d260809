"""Symmetric 2x2 tensor algebra: spectral decomposition, eigenprojectors and
their derivatives, fourth-order projector products, Voigt packing.

Conventions used throughout the package:

* Voigt strain vectors are ``(E11, E22, 2*E12)``, Voigt stress vectors are
  ``(S11, S22, S12)``, and a fourth-order tangent ``D`` is packed into a 3x3
  matrix ``C`` such that ``S_voigt = C @ E_voigt``.  With this packing the
  Voigt matrix is symmetric exactly when ``D`` has major symmetry.
* Eigenvalues are ordered ``e1 >= e2``; the first nonzero component of the
  first eigenvector is positive, and ``n2`` is ``n1`` rotated by +90 degrees
  with the same sign rule applied.
* A decomposition is flagged degenerate when
  ``|e1 - e2| <= tol_eig * max(1, |e1| + |e2|)``.

Most functions have vectorised private kernels (leading batch axis) that the
constitutive and assembly layers reuse; the public API operates on single
tensors.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

DEFAULT_EIG_TOL = 1e-9

# Voigt index pairs for rows/columns (11, 22, 12).
_VOIGT_PAIRS = ((0, 0), (1, 1), (0, 1))


class CoincidentEigenvaluesError(ValueError):
    """Raised when an operation is undefined for coincident eigenvalues."""


@dataclass(frozen=True)
class SymTensor2:
    """Symmetric second-order tensor in 2D, stored as (a11, a22, a12)."""

    a11: float
    a22: float
    a12: float

    @property
    def trace(self) -> float:
        return self.a11 + self.a22

    @property
    def det(self) -> float:
        return self.a11 * self.a22 - self.a12 * self.a12

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.a11, self.a12], [self.a12, self.a22]])

    @classmethod
    def from_matrix(cls, m) -> "SymTensor2":
        m = np.asarray(m, dtype=float)
        if m.shape != (2, 2):
            raise ValueError("expected a 2x2 matrix")
        if not np.allclose(m[0, 1], m[1, 0], rtol=0.0, atol=1e-12 * (1.0 + abs(m[0, 1]))):
            raise ValueError("matrix is not symmetric")
        return cls(float(m[0, 0]), float(m[1, 1]), 0.5 * float(m[0, 1] + m[1, 0]))

    def voigt(self, kind: str = "stress") -> np.ndarray:
        """Voigt vector; ``kind='strain'`` doubles the shear component."""
        if kind == "stress":
            return np.array([self.a11, self.a22, self.a12])
        if kind == "strain":
            return np.array([self.a11, self.a22, 2.0 * self.a12])
        raise ValueError(f"unknown Voigt kind {kind!r}")

    @classmethod
    def from_voigt(cls, v, kind: str = "stress") -> "SymTensor2":
        v = np.asarray(v, dtype=float)
        if v.shape != (3,):
            raise ValueError("expected a length-3 Voigt vector")
        if kind == "stress":
            return cls(float(v[0]), float(v[1]), float(v[2]))
        if kind == "strain":
            return cls(float(v[0]), float(v[1]), 0.5 * float(v[2]))
        raise ValueError(f"unknown Voigt kind {kind!r}")

    def contract(self, other: "SymTensor2") -> float:
        """Double contraction a : b."""
        return self.a11 * other.a11 + self.a22 * other.a22 + 2.0 * self.a12 * other.a12

    def __add__(self, other: "SymTensor2") -> "SymTensor2":
        return SymTensor2(self.a11 + other.a11, self.a22 + other.a22, self.a12 + other.a12)

    def __sub__(self, other: "SymTensor2") -> "SymTensor2":
        return SymTensor2(self.a11 - other.a11, self.a22 - other.a22, self.a12 - other.a12)

    def __mul__(self, s: float) -> "SymTensor2":
        return SymTensor2(self.a11 * s, self.a22 * s, self.a12 * s)

    __rmul__ = __mul__


@dataclass(frozen=True)
class Spectral2:
    """Spectral decomposition of a SymTensor2: eigenpairs and projectors.

    ``m1``/``m2`` are the rank-one eigenprojectors ``n_a (x) n_a`` so that the
    tensor reconstructs as ``e1*m1 + e2*m2``.
    """

    e1: float
    e2: float
    n1: np.ndarray
    n2: np.ndarray
    m1: SymTensor2
    m2: SymTensor2
    degenerate: bool


@dataclass
class Tangent4:
    """Fourth-order (plane) tensor in Voigt form: 3x3, strain-in / stress-out."""

    c: np.ndarray

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        if self.c.shape != (3, 3):
            raise ValueError("Voigt tangent must be 3x3")

    @property
    def has_major_symmetry(self) -> bool:
        scale = max(1e-300, float(np.abs(self.c).max()))
        return bool(np.abs(self.c - self.c.T).max() <= 1e-12 * scale)

    @classmethod
    def from_full(cls, d) -> "Tangent4":
        """Pack a full 2x2x2x2 tensor (minor-symmetric) into Voigt form."""
        d = np.asarray(d, dtype=float)
        if d.shape != (2, 2, 2, 2):
            raise ValueError("expected a 2x2x2x2 tensor")
        c = np.empty((3, 3))
        for row, (i, j) in enumerate(_VOIGT_PAIRS):
            for col, (k, l) in enumerate(_VOIGT_PAIRS):
                c[row, col] = d[i, j, k, l]
        return cls(c)

    def to_full(self) -> np.ndarray:
        """Unpack to the full minor-symmetric 2x2x2x2 tensor."""
        d = np.empty((2, 2, 2, 2))
        for row, (i, j) in enumerate(_VOIGT_PAIRS):
            for col, (k, l) in enumerate(_VOIGT_PAIRS):
                v = self.c[row, col]
                d[i, j, k, l] = v
                d[j, i, k, l] = v
                d[i, j, l, k] = v
                d[j, i, l, k] = v
        return d

    def __add__(self, other: "Tangent4") -> "Tangent4":
        return Tangent4(self.c + other.c)

    def __mul__(self, s: float) -> "Tangent4":
        return Tangent4(self.c * s)

    __rmul__ = __mul__


class ProjectorProducts(NamedTuple):
    """Fourth-order products of the two eigenprojectors (Voigt packed).

    q_ab = M_a (x) M_b; gsym = G_12 + G_21 with
    G_ab^{ijkl} = M_a^{ik} M_b^{jl} + M_a^{il} M_b^{jk}.
    """

    q11: Tangent4
    q22: Tangent4
    q12: Tangent4
    q21: Tangent4
    gsym: Tangent4


# ---------------------------------------------------------------------------
# vectorised kernels (leading batch axis); used by constitutive and assembly
# ---------------------------------------------------------------------------


def eig2_batch(a11, a22, a12, tol_eig: float = DEFAULT_EIG_TOL):
    """Eigendecomposition of batched symmetric 2x2 tensors.

    Returns ``(e1, e2, n1x, n1y, degenerate)`` with e1 >= e2 and the sign rule
    "first nonzero component of n1 positive".
    """
    a11 = np.asarray(a11, dtype=float)
    a22 = np.asarray(a22, dtype=float)
    a12 = np.asarray(a12, dtype=float)
    mean = 0.5 * (a11 + a22)
    diff = 0.5 * (a11 - a22)
    rad = np.hypot(diff, a12)
    e1 = mean + rad
    e2 = mean - rad

    # Column of (A - e2 I) with the larger norm is parallel to n1.
    use_first = diff >= 0.0
    vx = np.where(use_first, rad + diff, a12)
    vy = np.where(use_first, a12, rad - diff)
    norm = np.hypot(vx, vy)
    tiny = norm <= 0.0
    vx = np.where(tiny, 1.0, vx)
    vy = np.where(tiny, 0.0, vy)
    norm = np.where(tiny, 1.0, norm)
    n1x = vx / norm
    n1y = vy / norm
    flip = (n1x < 0.0) | ((n1x == 0.0) & (n1y < 0.0))
    sign = np.where(flip, -1.0, 1.0)
    n1x = n1x * sign
    n1y = n1y * sign

    degenerate = (2.0 * rad) <= tol_eig * np.maximum(1.0, np.abs(e1) + np.abs(e2))
    return e1, e2, n1x, n1y, degenerate


def projector_voigt_batch(n1x, n1y):
    """Stress-Voigt vectors (N,3) of the two eigenprojectors."""
    n2x, n2y = perp_batch(n1x, n1y)
    m1 = np.stack([n1x * n1x, n1y * n1y, n1x * n1y], axis=-1)
    m2 = np.stack([n2x * n2x, n2y * n2y, n2x * n2y], axis=-1)
    return m1, m2


def perp_batch(n1x, n1y):
    """Second eigenvector: n1 rotated by +90 deg, then the sign rule."""
    n2x = -n1y
    n2y = np.asarray(n1x, dtype=float).copy()
    flip = (n2x < 0.0) | ((n2x == 0.0) & (n2y < 0.0))
    sign = np.where(flip, -1.0, 1.0)
    return n2x * sign, n2y * sign


def _full_from_voigt_batch(mv):
    """(N,3) projector Voigt vectors -> (N,2,2) full tensors."""
    full = np.empty(mv.shape[:-1] + (2, 2))
    full[..., 0, 0] = mv[..., 0]
    full[..., 1, 1] = mv[..., 1]
    full[..., 0, 1] = mv[..., 2]
    full[..., 1, 0] = mv[..., 2]
    return full


def _pack_voigt_batch(d):
    """(N,2,2,2,2) minor-symmetric tensors -> (N,3,3) Voigt matrices."""
    c = np.empty(d.shape[:-4] + (3, 3))
    for row, (i, j) in enumerate(_VOIGT_PAIRS):
        for col, (k, l) in enumerate(_VOIGT_PAIRS):
            c[..., row, col] = d[..., i, j, k, l]
    return c


def projector_products_batch(m1v, m2v):
    """Voigt Q11, Q22, Q12, Q21 (outer products) and Gsym = G12 + G21."""
    q11 = m1v[..., :, None] * m1v[..., None, :]
    q22 = m2v[..., :, None] * m2v[..., None, :]
    q12 = m1v[..., :, None] * m2v[..., None, :]
    q21 = m2v[..., :, None] * m1v[..., None, :]
    f1 = _full_from_voigt_batch(m1v)
    f2 = _full_from_voigt_batch(m2v)
    g12 = np.einsum("...ik,...jl->...ijkl", f1, f2) + np.einsum("...il,...jk->...ijkl", f1, f2)
    g21 = np.einsum("...ik,...jl->...ijkl", f2, f1) + np.einsum("...il,...jk->...ijkl", f2, f1)
    gsym = _pack_voigt_batch(g12 + g21)
    return q11, q22, q12, q21, gsym


# ---------------------------------------------------------------------------
# public single-tensor API
# ---------------------------------------------------------------------------


def spectral_decompose(t: SymTensor2, tol_eig: float = DEFAULT_EIG_TOL) -> Spectral2:
    """Eigenvalues (e1 >= e2), eigenvectors, and eigenprojectors of ``t``."""
    vals = np.array([t.a11, t.a22, t.a12])
    if not np.all(np.isfinite(vals)):
        raise ValueError("tensor components must be finite")
    e1, e2, n1x, n1y, deg = eig2_batch(vals[0], vals[1], vals[2], tol_eig)
    n2x, n2y = perp_batch(n1x, n1y)
    n1 = np.array([float(n1x), float(n1y)])
    n2 = np.array([float(n2x), float(n2y)])
    m1 = SymTensor2(n1[0] * n1[0], n1[1] * n1[1], n1[0] * n1[1])
    m2 = SymTensor2(n2[0] * n2[0], n2[1] * n2[1], n2[0] * n2[1])
    return Spectral2(float(e1), float(e2), n1, n2, m1, m2, bool(deg))


def projector_products(s: Spectral2) -> ProjectorProducts:
    """Fourth-order projector products for a decomposition (Voigt packed)."""
    m1v = s.m1.voigt("stress")[None, :]
    m2v = s.m2.voigt("stress")[None, :]
    q11, q22, q12, q21, gsym = projector_products_batch(m1v, m2v)
    return ProjectorProducts(
        Tangent4(q11[0]), Tangent4(q22[0]), Tangent4(q12[0]), Tangent4(q21[0]), Tangent4(gsym[0])
    )


def eigenprojector_derivative(s: Spectral2) -> tuple[Tangent4, Tangent4]:
    """Derivatives dM1/dE and dM2/dE = -dM1/dE.

    Undefined for coincident eigenvalues; raises CoincidentEigenvaluesError.
    """
    if s.degenerate:
        raise CoincidentEigenvaluesError(
            "eigenprojector derivative undefined for coincident eigenvalues"
        )
    gsym = projector_products(s).gsym
    m1d = Tangent4(gsym.c / (2.0 * (s.e1 - s.e2)))
    m2d = Tangent4(-m1d.c)
    return m1d, m2d


def rotate_to_principal(t: SymTensor2, s: Spectral2) -> tuple[float, float, float]:
    """Components of ``t`` in the principal frame of ``s``: R^T t R."""
    m = t.as_matrix()
    r = np.column_stack([s.n1, s.n2])
    tp = r.T @ m @ r
    return float(tp[0, 0]), float(tp[1, 1]), 0.5 * float(tp[0, 1] + tp[1, 0])

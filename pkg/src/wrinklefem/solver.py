"""Load-stepped Newton solution of the membrane equilibrium equations.

Residual convention: R(u) = F_int(u) - F_ext(u), tangent K = dR/du =
K_int - K_ext, update K du = -R.  Convergence per step uses the normalized
residual ||R_free|| / ||F_ext_free||; when the external force vanishes on
the free dofs (displacement control) the denominator falls back to the
reaction-force norm at constrained dofs, and ||R_free|| <= tol_abs acts as
a last-resort absolute check.

Dirichlet constraints are handled by elimination: prescribed dofs are set
to their target value before iterating, so the correction system only
involves free dofs.  The linear solver is a general (nonsymmetric) sparse
LU; the stress-split tangent is not symmetric in wrinkled states.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .assembly import Assembler
from .loads import LoadAssembler
from .mesh import Mesh


class NonConvergenceError(RuntimeError):
    """Newton failed within max_iter; carries the partial solve state."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class SingularMatrixError(NonConvergenceError):
    """Tangent factorization failed (rank-deficient system)."""


@dataclass
class SolverConfig:
    n_steps: int = 1
    max_iter: int = 50
    tol_rel: float = 1e-8
    tol_abs: float = 1e-12
    linear_solver: str = "splu"       # "splu" | "dense"
    line_search: bool = False

    def __post_init__(self):
        if self.n_steps < 1 or self.max_iter < 1:
            raise ValueError("n_steps and max_iter must be >= 1")
        if self.tol_rel <= 0.0:
            raise ValueError("tol_rel must be positive")
        if self.linear_solver not in ("splu", "dense"):
            raise ValueError(f"unknown linear solver {self.linear_solver!r}")


@dataclass
class Constraint:
    """Prescribed displacement on ``dofs`` components of a node set.

    ``value`` is the full prescribed magnitude; per-step targets are
    value * schedule[step-1] (default schedule: full value every step).
    """

    nodes: str
    dofs: tuple[int, ...]
    value: float = 0.0
    schedule: list[float] | None = None

    def value_at(self, step: int, n_steps: int) -> float:
        if self.schedule is None:
            return self.value
        if len(self.schedule) != n_steps:
            raise ValueError(
                f"constraint schedule length {len(self.schedule)} != n_steps {n_steps}"
            )
        return self.value * float(self.schedule[step - 1])


@dataclass
class IterationRecord:
    step: int
    iteration: int
    residual: float
    f_ext_norm: float
    ratio: float


@dataclass
class SolveState:
    u: np.ndarray
    step: int = 0
    records: list[IterationRecord] = field(default_factory=list)
    iterations_per_step: list[int] = field(default_factory=list)
    converged: bool = False

    def residual_ratios(self, step: int | None = None):
        recs = [r for r in self.records if step is None or r.step == step]
        return [r.ratio for r in recs]


@dataclass
class ReducedSystem:
    """K_ff u_f = rhs with fixed dofs eliminated."""

    k_ff: sp.csr_matrix
    rhs: np.ndarray
    free: np.ndarray
    fixed: np.ndarray
    fixed_values: np.ndarray
    n_dofs: int

    def expand(self, u_free) -> np.ndarray:
        u = np.zeros(self.n_dofs)
        u[self.free] = u_free
        u[self.fixed] = self.fixed_values
        return u


def constraint_arrays(mesh: Mesh, constraints, step: int, n_steps: int):
    """Flatten Constraint objects to (dof indices, prescribed values).

    Duplicate dofs are allowed only when the prescribed values agree.
    """
    dof_map: dict[int, float] = {}
    for c in constraints:
        val = c.value_at(step, n_steps)
        nodes = mesh.node_set(c.nodes) if isinstance(c.nodes, str) else np.asarray(c.nodes)
        for d in c.dofs:
            if not 0 <= d <= 2:
                raise ValueError(f"dof component {d} out of range")
            for idx in 3 * nodes + d:
                idx = int(idx)
                if idx in dof_map and dof_map[idx] != val:
                    raise ValueError(
                        f"conflicting prescribed values at dof {idx}: "
                        f"{dof_map[idx]} vs {val}"
                    )
                dof_map[idx] = val
    fixed = np.array(sorted(dof_map), dtype=int)
    values = np.array([dof_map[i] for i in fixed])
    return fixed, values


def apply_dirichlet(k: sp.spmatrix, r, constraints) -> ReducedSystem:
    """Eliminate constrained dofs from K u = -R (or K u = F with r = -F).

    ``constraints`` is a sequence of (dof, value) pairs.  Nonzero values
    are folded into the right-hand side; conflicting duplicates raise.
    """
    n = k.shape[0]
    dof_map: dict[int, float] = {}
    for dof, val in constraints:
        dof = int(dof)
        if dof in dof_map and dof_map[dof] != val:
            raise ValueError(f"conflicting prescribed values at dof {dof}")
        dof_map[dof] = float(val)
    fixed = np.array(sorted(dof_map), dtype=int)
    values = np.array([dof_map[i] for i in fixed])
    mask = np.ones(n, dtype=bool)
    mask[fixed] = False
    free = np.nonzero(mask)[0]
    k = k.tocsr()
    rhs = -np.asarray(r, dtype=float)[free]
    if fixed.size and np.any(values != 0.0):
        rhs -= k[free][:, fixed] @ values
    return ReducedSystem(k[free][:, free].tocsr(), rhs, free, fixed, values, n)


def _solve_linear(k_ff: sp.csr_matrix, rhs, method: str):
    if k_ff.shape[0] == 0:
        return np.zeros(0)
    try:
        if method == "dense":
            du = np.linalg.solve(k_ff.toarray(), rhs)
        else:
            du = spla.splu(k_ff.tocsc()).solve(rhs)
    except (RuntimeError, np.linalg.LinAlgError) as exc:
        raise SingularMatrixError(f"linear solve failed: {exc}") from exc
    if not np.all(np.isfinite(du)):
        raise SingularMatrixError("linear solve produced non-finite increments")
    return du


class NewtonDriver:
    """Shared machinery for newton_solve/run_schedule on prebuilt assemblers."""

    def __init__(self, assembler: Assembler, load_assembler: LoadAssembler,
                 constraints, cfg: SolverConfig):
        self.assembler = assembler
        self.loads = load_assembler
        self.constraints = list(constraints)
        self.cfg = cfg

    def _residual(self, u, factors):
        f_int, k_int = self.assembler.internal_force_and_tangent(u)
        f_ext, k_ext = self.loads.assemble(u, factors, with_tangent=True)
        k = k_int if k_ext is None else (k_int - k_ext).tocsr()
        return f_int - f_ext, f_ext, k

    def solve_step(self, u, step: int, state: SolveState):
        cfg = self.cfg
        mesh = self.assembler.mesh
        fixed, values = constraint_arrays(mesh, self.constraints, step, cfg.n_steps)
        mask = np.ones(mesh.n_dofs, dtype=bool)
        mask[fixed] = False
        free = np.nonzero(mask)[0]
        factors = self.loads.factors_at(step, cfg.n_steps)

        u = u.copy()
        u[fixed] = values
        n_solves = 0
        for it in range(cfg.max_iter + 1):
            r, f_ext, k = self._residual(u, factors)
            r_free = r[free]
            rnorm = float(np.linalg.norm(r_free))
            fnorm = float(np.linalg.norm(f_ext[free]))
            denom = fnorm
            if denom <= cfg.tol_abs:
                denom = float(np.linalg.norm(r[fixed]))  # reaction forces
            ratio = rnorm / denom if denom > 0.0 else (0.0 if rnorm == 0.0 else np.inf)
            state.records.append(IterationRecord(step, it, rnorm, fnorm, ratio))
            if ratio <= cfg.tol_rel or rnorm <= cfg.tol_abs:
                state.iterations_per_step.append(n_solves)
                state.step = step
                state.u = u
                return u
            if it == cfg.max_iter:
                break
            du_free = _solve_linear(k[free][:, free].tocsr(), -r_free,
                                    cfg.linear_solver)
            if cfg.line_search:
                u = self._backtrack(u, free, du_free, rnorm, factors)
            else:
                u[free] += du_free
            n_solves += 1

        state.iterations_per_step.append(n_solves)
        state.step = step
        state.u = u
        raise NonConvergenceError(
            f"no convergence in step {step} after {cfg.max_iter} iterations "
            f"(last ratio {state.records[-1].ratio:.3e})",
            state=state,
        )

    def _backtrack(self, u, free, du_free, rnorm0, factors):
        """Halve the update until the residual norm stops growing (<= 8 cuts)."""
        alpha = 1.0
        for _ in range(8):
            trial = u.copy()
            trial[free] += alpha * du_free
            r, _, _ = self._residual(trial, factors)
            if np.linalg.norm(r[free]) <= rnorm0 or alpha <= 1.0 / 256.0:
                return trial
            alpha *= 0.5
        return trial


def newton_solve(mesh: Mesh, material, model, loads, constraints,
                 cfg: SolverConfig | None = None, element_models=None,
                 u0=None) -> SolveState:
    """Run all load steps; returns the converged SolveState.

    Raises NonConvergenceError (carrying the partial state) or
    SingularMatrixError.
    """
    cfg = cfg or SolverConfig()
    assembler = Assembler(mesh, material, model=model, element_models=element_models)
    load_asm = LoadAssembler(mesh, loads)
    driver = NewtonDriver(assembler, load_asm, constraints, cfg)
    state = SolveState(u=np.zeros(mesh.n_dofs))
    u = state.u if u0 is None else np.asarray(u0, dtype=float).copy()
    for step in range(1, cfg.n_steps + 1):
        u = driver.solve_step(u, step, state)
    state.converged = True
    return state


@dataclass
class RuntimeCase:
    """Fully resolved, runnable problem description."""

    mesh: Mesh
    material: object
    model: str
    loads: list
    constraints: list
    config: SolverConfig
    element_models: dict | None = None
    name: str = "case"
    snapshot_steps: list[int] | None = None   # default: every step
    quadrature: str = "full"


@dataclass
class ScheduleResult:
    state: SolveState
    snapshots: dict[int, np.ndarray]
    assembler: Assembler


def run_schedule(case: RuntimeCase) -> ScheduleResult:
    """Execute a case's load steps, keeping displacement snapshots."""
    cfg = case.config
    assembler = Assembler(case.mesh, case.material, model=case.model,
                          element_models=case.element_models,
                          quadrature=case.quadrature)
    load_asm = LoadAssembler(case.mesh, case.loads)
    driver = NewtonDriver(assembler, load_asm, case.constraints, cfg)
    state = SolveState(u=np.zeros(case.mesh.n_dofs))
    wanted = set(case.snapshot_steps or range(1, cfg.n_steps + 1))
    snapshots: dict[int, np.ndarray] = {}
    u = state.u
    try:
        for step in range(1, cfg.n_steps + 1):
            u = driver.solve_step(u, step, state)
            if step in wanted:
                snapshots[step] = u.copy()
    except NonConvergenceError as exc:
        exc.snapshots = snapshots
        exc.assembler = assembler
        exc.state = state
        raise
    state.converged = True
    return ScheduleResult(state=state, snapshots=snapshots, assembler=assembler)

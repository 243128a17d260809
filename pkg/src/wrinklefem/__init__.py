"""wrinklefem: nonlinear membrane finite elements with wrinkling models.

A small numpy/scipy library implementing plane-stress membrane constitutive
models that handle wrinkling and slackness through spectral strain/stress
splits, a total-Lagrangian curvilinear membrane element, a Newton solver, and
a set of classical verification benchmarks (tension-field bending, shear
wrinkling, corner-loaded membrane, airbag inflation, gravity-loaded blanket).
"""

from .assembly import (
    Assembler,
    DegenerateElementError,
    ElementKinematics,
    compute_kinematics,
    internal_force_and_tangent,
    recover_fields,
)
from .constitutive import (
    Material,
    MembraneState,
    PointResponse,
    UntestablePointError,
    classify,
    evaluate,
    mixed_model,
    strain_split_model,
    stress_split_model,
    svk_base,
    tangent_fd_check,
)
from .loads import (
    BodyForce,
    EdgeTraction,
    NodalForce,
    PenaltySpring,
    Pressure,
    TractionProfile,
    external_force_and_tangent,
)
from .mesh import Mesh, build_rect_mesh
from .solver import (
    Constraint,
    NonConvergenceError,
    RuntimeCase,
    SingularMatrixError,
    SolveState,
    SolverConfig,
    apply_dirichlet,
    newton_solve,
    run_schedule,
)
from .tensor2d import (
    DEFAULT_EIG_TOL,
    CoincidentEigenvaluesError,
    ProjectorProducts,
    Spectral2,
    SymTensor2,
    Tangent4,
    eigenprojector_derivative,
    projector_products,
    rotate_to_principal,
    spectral_decompose,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_EIG_TOL",
    "Assembler",
    "BodyForce",
    "CoincidentEigenvaluesError",
    "Constraint",
    "DegenerateElementError",
    "EdgeTraction",
    "ElementKinematics",
    "Material",
    "MembraneState",
    "Mesh",
    "NodalForce",
    "NonConvergenceError",
    "PenaltySpring",
    "PointResponse",
    "Pressure",
    "ProjectorProducts",
    "RuntimeCase",
    "SingularMatrixError",
    "SolveState",
    "SolverConfig",
    "Spectral2",
    "SymTensor2",
    "Tangent4",
    "TractionProfile",
    "UntestablePointError",
    "apply_dirichlet",
    "build_rect_mesh",
    "classify",
    "compute_kinematics",
    "eigenprojector_derivative",
    "evaluate",
    "external_force_and_tangent",
    "internal_force_and_tangent",
    "mixed_model",
    "newton_solve",
    "projector_products",
    "recover_fields",
    "rotate_to_principal",
    "run_schedule",
    "spectral_decompose",
    "strain_split_model",
    "stress_split_model",
    "svk_base",
    "tangent_fd_check",
]

"""JSON case files: schema validation and construction of runnable cases.

A case file is a single JSON document describing material, mesh, loads with
per-step schedules, constraints, solver settings, probes, and optional
reference values.  The schema (shipped as ``schema/case_schema.json``) rejects
unknown keys so typos fail loudly instead of being silently ignored.
"""

from __future__ import annotations

import json
from importlib import resources

import jsonschema

from .constitutive import Material
from .loads import (BodyForce, EdgeTraction, NodalForce, PenaltySpring,
                    Pressure, TractionProfile)
from .mesh import build_rect_mesh
from .solver import Constraint, RuntimeCase, SolverConfig

__all__ = [
    "CaseValidationError",
    "case_schema",
    "validate_case",
    "load_case",
    "save_case",
    "build_runtime",
]


class CaseValidationError(ValueError):
    """Raised when a case document does not conform to the schema."""

    def __init__(self, errors):
        self.errors = list(errors)
        lines = []
        for err in self.errors:
            pointer = "/" + "/".join(str(p) for p in err.absolute_path)
            lines.append(f"{pointer}: {err.message}")
        super().__init__("invalid case document:\n  " + "\n  ".join(lines))


def case_schema() -> dict:
    """The case-file JSON schema as a dict."""
    text = resources.files("wrinklefem").joinpath(
        "schema/case_schema.json").read_text()
    return json.loads(text)


def _schema_errors(doc):
    validator = jsonschema.Draft202012Validator(case_schema())
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
    # oneOf failures nest the useful message in error context; surface the
    # best sub-error (deepest match) instead of the generic oneOf complaint
    out = []
    for err in errors:
        out.append(jsonschema.exceptions.best_match([err]) or err)
    return out


def validate_case(doc: dict) -> None:
    """Raise :class:`CaseValidationError` unless ``doc`` matches the schema."""
    errors = _schema_errors(doc)
    if errors:
        raise CaseValidationError(errors)
    _validate_semantics(doc)


def _validate_semantics(doc: dict):
    """Cross-field checks the schema language cannot express."""
    n_steps = doc["solver"]["n_steps"]
    problems = []
    for i, load in enumerate(doc["loads"]):
        sched = load.get("schedule")
        if sched is not None and len(sched) != n_steps:
            problems.append(f"/loads/{i}/schedule: length {len(sched)} != "
                            f"n_steps {n_steps}")
    for i, con in enumerate(doc["constraints"]):
        sched = con.get("schedule")
        if sched is not None and len(sched) != n_steps:
            problems.append(f"/constraints/{i}/schedule: length {len(sched)} "
                            f"!= n_steps {n_steps}")
    for i, step in enumerate(doc.get("snapshot_steps", [])):
        if step > n_steps:
            problems.append(f"/snapshot_steps/{i}: step {step} > n_steps "
                            f"{n_steps}")
    mesh = doc["mesh"]
    if mesh.get("quadrature", "full") == "reduced" and mesh.get("order", 1) < 2:
        problems.append("/mesh/quadrature: 'reduced' needs order >= 2")
    names = [p["name"] for p in doc.get("probes", [])]
    if len(names) != len(set(names)):
        dupes = sorted({n for n in names if names.count(n) > 1})
        problems.append(f"/probes: duplicate probe names {dupes}")
    known = set(names)
    for i, ref in enumerate(doc.get("references", [])):
        wanted = [ref["probe"]] if "probe" in ref else ref.get("probes", [])
        for pname in wanted:
            if pname not in known:
                problems.append(f"/references/{i}: unknown probe {pname!r}")
    if problems:
        raise ValueError("invalid case document:\n  " + "\n  ".join(problems))


def load_case(path) -> dict:
    """Read and validate a case file; returns the document."""
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not valid JSON: {exc}") from exc
    validate_case(doc)
    return doc


def save_case(doc: dict, path) -> None:
    """Validate and write a case document (floats keep full precision)."""
    validate_case(doc)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=False)
        fh.write("\n")


# ---------------------------------------------------------------------------
# document -> runtime objects
# ---------------------------------------------------------------------------

def _build_load(entry: dict):
    kind = entry["kind"]
    sched = entry.get("schedule")
    if kind == "edge_traction":
        p = entry["profile"]
        window = p.get("window")
        profile = TractionProfile(
            const=p["const"], linear=p.get("linear", 0.0),
            axis=p.get("axis", 1), center=p.get("center", 0.0),
            halfspan=p.get("halfspan", 1.0),
            window=tuple(window) if window is not None else None)
        return EdgeTraction(edge=entry["edge"],
                            direction=tuple(entry["direction"]),
                            profile=profile, schedule=sched)
    if kind == "pressure":
        return Pressure(magnitude=entry["magnitude"], schedule=sched)
    if kind == "body_force":
        return BodyForce(vector=tuple(entry["vector"]), schedule=sched)
    if kind == "nodal_force":
        return NodalForce(nodes=entry["nodes"], vector=tuple(entry["vector"]),
                          schedule=sched)
    if kind == "spring":
        return PenaltySpring(nodes=entry["nodes"], dofs=tuple(entry["dofs"]),
                             stiffness=entry["stiffness"], schedule=sched)
    raise ValueError(f"unknown load kind '{kind}'")


def build_runtime(doc: dict) -> RuntimeCase:
    """Validate a case document and build the runnable case."""
    validate_case(doc)

    m = doc["material"]
    material = Material(youngs_modulus=m["youngs_modulus"],
                        poisson_ratio=m["poisson_ratio"],
                        thickness=m["thickness"], eta=m.get("eta", 0.0))

    g = doc["mesh"]
    mesh = build_rect_mesh(g["lx"], g["ly"], g["nx"], g["ny"],
                           order=g.get("order", 1),
                           origin=tuple(g.get("origin", (0.0, 0.0))))

    loads = [_build_load(entry) for entry in doc["loads"]]
    constraints = [Constraint(nodes=c["nodes"], dofs=tuple(c["dofs"]),
                              value=c.get("value", 0.0),
                              schedule=c.get("schedule"))
                   for c in doc["constraints"]]

    s = doc["solver"]
    config = SolverConfig(n_steps=s["n_steps"],
                          max_iter=s.get("max_iter", 50),
                          tol_rel=s.get("tol_rel", 1.0e-8),
                          tol_abs=s.get("tol_abs", 1.0e-12),
                          linear_solver=s.get("linear_solver", "splu"),
                          line_search=s.get("line_search", False))

    element_models = None
    overrides = doc.get("element_overrides")
    if overrides:
        element_models = {}
        for group in overrides:
            for eid in group["elements"]:
                if eid >= mesh.n_elements:
                    raise ValueError(f"element override id {eid} out of range "
                                     f"(mesh has {mesh.n_elements} elements)")
                element_models[int(eid)] = group["model"]

    return RuntimeCase(mesh=mesh, material=material, model=doc["model"],
                       loads=loads, constraints=constraints, config=config,
                       element_models=element_models, name=doc["name"],
                       snapshot_steps=doc.get("snapshot_steps"),
                       quadrature=g.get("quadrature", "full"))

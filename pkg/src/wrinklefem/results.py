"""Result bundles: probe evaluation, CSV tables, legacy-VTK snapshots.

A run directory contains:

``probes.csv``
    One row per (probe, snapshot step): ``probe,step,value``.
``convergence.csv``
    Newton history, one row per iteration: ``step,iteration,residual,
    f_ext_norm,ratio``.  Iteration 0 is the residual of the initial guess.
``fields_step_<k>.vtk``
    Legacy ASCII VTK unstructured grid per snapshot step: displaced points,
    quad cells (higher-order elements are split into linear sub-quads), and
    point data for displacement, membrane state, principal Cauchy stresses,
    and the wrinkle direction.  Quadrature-point fields are extrapolated to
    nodes element-by-element (least squares in the element basis) and
    averaged between elements.
``metadata.json``
    Full resolved case document plus run facts (convergence flag, iteration
    counts, dof count, recovery conventions) so a run can be reproduced
    exactly.  Output is deterministic: identical runs give identical bytes.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from . import __version__
from .assembly import Assembler
from .casefile import build_runtime
from .loads import LoadAssembler
from .solver import NonConvergenceError, RuntimeCase, run_schedule

__all__ = [
    "RunResult",
    "run_case",
    "evaluate_probes",
    "write_vtk",
    "write_probes_csv",
    "write_convergence_csv",
]

STATE_NAMES = {0: "taut", 1: "wrinkled", 2: "slack"}


def _fmt(x) -> str:
    """Full-precision, round-trippable decimal text for a float."""
    return format(float(x), ".17g")


# ---------------------------------------------------------------------------
# probe evaluation
# ---------------------------------------------------------------------------

def _band_top(assembler: Assembler, rec) -> float:
    """Largest y among wrinkled quadrature points, or -inf if none."""
    wr = rec.state.reshape(-1) == 1
    if not wr.any():
        return -np.inf
    return float(rec.position.reshape(-1, 3)[wr, 1].max())


def _eval_point_probes(assembler: Assembler, probes, u):
    pts = np.array([[p["x"], p["y"]] for p in probes])
    out = assembler.evaluate_points(u, pts)
    values = []
    for i, p in enumerate(probes):
        q = p["quantity"]
        if q in ("u_x", "u_y", "u_z"):
            v = out["displacement"][i, ("u_x", "u_y", "u_z").index(q)]
        elif q == "pullin_diag":
            ux, uy = out["displacement"][i, 0], out["displacement"][i, 1]
            v = -(ux + uy) / np.sqrt(2.0)
        elif q in ("s1", "s2"):
            v = out["cauchy_principal"][i, ("s1", "s2").index(q)]
        elif q in ("sx", "sy", "sxy"):
            v = out["cauchy_local"][i, ("sx", "sy", "sxy").index(q)]
        elif q in ("pk2_1", "pk2_2"):
            v = out["pk2_principal"][i, ("pk2_1", "pk2_2").index(q)]
        elif q == "state":
            v = out["state"][i]
        else:
            raise ValueError(f"unknown point quantity '{q}'")
        values.append((p["name"], float(v)))
    return values


def evaluate_probes(assembler: Assembler, load_assembler: LoadAssembler,
                    probes, u, step: int, n_steps: int):
    """Evaluate all probes on displacement state ``u`` at ``step``.

    Returns a list of (name, value) in probe order.
    """
    mesh = assembler.mesh
    point_probes = [p for p in probes if p["kind"] == "point"]
    point_vals = dict(_eval_point_probes(assembler, point_probes, u)
                      if point_probes else [])

    rec = None
    residual = None
    values = []
    for p in probes:
        kind = p["kind"]
        if kind == "point":
            values.append((p["name"], point_vals[p["name"]]))
            continue
        if kind in ("band_height", "edge_rotation", "wrinkled_fraction"):
            if rec is None:
                rec = assembler.recover_fields(u)
        if kind == "band_height":
            col = p.get("column", 0)
            nx, ny = mesh.meta["nx"], mesh.meta["ny"]
            elems = np.arange(ny) * nx + col
            nqp = assembler.quad.nqp
            sel = np.zeros(mesh.n_elements * nqp, dtype=bool)
            sel[(elems[:, None] * nqp + np.arange(nqp)).ravel()] = True
            st = rec.state.reshape(-1)[sel]
            yq = rec.position.reshape(-1, 3)[sel, 1]
            wr = st == 1
            values.append((p["name"], float(yq[wr].max()) if wr.any() else 0.0))
        elif kind == "edge_rotation":
            # rotation of the taut part of the edge: fit the tangential
            # in-plane displacement against the edge coordinate above the
            # wrinkled band (the band itself contracts freely and warps)
            edge = p["edge"]
            nodes = np.asarray(mesh.node_sets[edge])
            if edge in ("left", "right"):
                coord, comp = mesh.nodes[nodes, 1], 0
                elem_h = mesh.meta["ly"] / mesh.meta["ny"]
            else:
                coord, comp = mesh.nodes[nodes, 0], 1
                elem_h = mesh.meta["lx"] / mesh.meta["nx"]
            disp = u.reshape(-1, 3)[nodes, comp]
            top = _band_top(assembler, rec)
            sel = coord > top + 0.5 * elem_h
            if sel.sum() < 3:
                sel = np.ones(len(nodes), dtype=bool)
            slope = np.polyfit(coord[sel], disp[sel], 1)[0]
            values.append((p["name"], float(slope * p.get("scale", 1.0))))
        elif kind == "wrinkled_fraction":
            pos = rec.position.reshape(-1, 3)
            st = rec.state.reshape(-1)
            d = np.abs(pos[:, 0] - pos[:, 1]) / np.sqrt(2.0)
            band = d < p["half_width"]
            frac = float((st[band] == 1).mean()) if band.any() else 0.0
            values.append((p["name"], frac))
        elif kind == "reaction":
            if residual is None:
                factors = load_assembler.factors_at(step, n_steps)
                f_ext, _ = load_assembler.assemble(u, factors,
                                                   with_tangent=False)
                residual = assembler.internal_force(u) - f_ext
            nodes = np.asarray(mesh.node_sets[p["nodes"]])
            values.append((p["name"],
                           float(residual[3 * nodes + p["dof"]].sum())))
        else:
            raise ValueError(f"unknown probe kind '{kind}'")
    return values


# ---------------------------------------------------------------------------
# writers
# ---------------------------------------------------------------------------

def write_probes_csv(rows, path) -> None:
    """rows: iterable of (probe, step, value)."""
    with open(path, "w") as fh:
        fh.write("probe,step,value\n")
        for name, step, value in rows:
            fh.write(f"{name},{step},{_fmt(value)}\n")


def write_convergence_csv(records, path) -> None:
    with open(path, "w") as fh:
        fh.write("step,iteration,residual,f_ext_norm,ratio\n")
        for r in records:
            fh.write(f"{r.step},{r.iteration},{_fmt(r.residual)},"
                     f"{_fmt(r.f_ext_norm)},{_fmt(r.ratio)}\n")


def _node_fields(assembler: Assembler, u) -> dict:
    """QP fields extrapolated to nodes (per-element LSQ, then averaged)."""
    mesh = assembler.mesh
    rec = assembler.recover_fields(u)
    n_qp = assembler.quad.nqp
    nmat = assembler.quad.N_qp                       # (nqp, nshape)
    # square system (tensor-product Gauss): LSQ solve == exact solve
    extrap = np.linalg.pinv(nmat)                    # (nshape, nqp)

    def to_nodes(qp_field):
        qp = qp_field.reshape(mesh.n_elements, n_qp, -1)
        nodal = np.einsum("sq,eqc->esc", extrap, qp)
        out = np.zeros((mesh.n_nodes, qp.shape[2]))
        count = np.zeros(mesh.n_nodes)
        np.add.at(out, mesh.elements.ravel(),
                  nodal.reshape(-1, qp.shape[2]))
        np.add.at(count, mesh.elements.ravel(), 1.0)
        return out / count[:, None]

    return {
        "state": to_nodes(rec.state.astype(float)[..., None])[:, 0],
        "sigma1": to_nodes(rec.cauchy_principal[..., :1])[:, 0],
        "sigma2": to_nodes(rec.cauchy_principal[..., 1:])[:, 0],
        "wrinkle_dir": to_nodes(rec.wrinkle_dir),
    }


def _sub_quads(mesh):
    """Split each element into (order x order) linear quads for VTK cells."""
    p = mesh.order
    cells = []
    for conn in mesh.elements:
        local = np.asarray(conn).reshape(p + 1, p + 1)
        for j in range(p):
            for i in range(p):
                cells.append([local[j, i], local[j, i + 1],
                              local[j + 1, i + 1], local[j + 1, i]])
    return np.array(cells, dtype=int)


def write_vtk(mesh, fields: dict, path, points=None) -> None:
    """Write a legacy ASCII VTK unstructured grid of quad cells.

    ``fields`` maps names to per-node arrays: shape (n,) scalars or (n, 3)
    vectors.  ``points`` overrides node positions (e.g. deformed geometry);
    reference positions are used when omitted.
    """
    pts = mesh.nodes if points is None else np.asarray(points)
    if pts.shape != (mesh.n_nodes, 3):
        raise ValueError("points must be (n_nodes, 3)")
    for name, arr in fields.items():
        if len(arr) != mesh.n_nodes:
            raise ValueError(f"field '{name}' is not node-sized")
    cells = _sub_quads(mesh)
    lines = [
        "# vtk DataFile Version 3.0",
        "wrinklefem fields",
        "ASCII",
        "DATASET UNSTRUCTURED_GRID",
        f"POINTS {mesh.n_nodes} double",
    ]
    for xyz in pts:
        lines.append(" ".join(_fmt(v) for v in xyz))
    lines.append(f"CELLS {len(cells)} {len(cells) * 5}")
    for c in cells:
        lines.append("4 " + " ".join(str(i) for i in c))
    lines.append(f"CELL_TYPES {len(cells)}")
    lines.extend(["9"] * len(cells))                  # VTK_QUAD
    lines.append(f"POINT_DATA {mesh.n_nodes}")
    for name, arr in fields.items():
        arr = np.asarray(arr)
        if arr.ndim == 1:
            lines.append(f"SCALARS {name} double 1")
            lines.append("LOOKUP_TABLE default")
            lines.extend(_fmt(v) for v in arr)
        else:
            lines.append(f"VECTORS {name} double")
            for vec in arr:
                lines.append(" ".join(_fmt(v) for v in vec))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# run driver
# ---------------------------------------------------------------------------

@dataclass
class RunResult:
    """What `run_case` produced."""

    outdir: str
    converged: bool
    probe_rows: list
    iterations_per_step: list
    error: str = ""


def _write_bundle(outdir, doc, runtime: RuntimeCase, assembler, snapshots,
                  state, converged: bool, error: str = "") -> RunResult:
    load_asm = LoadAssembler(runtime.mesh, runtime.loads)
    n_steps = runtime.config.n_steps
    probes = doc.get("probes", [])
    rows = []
    for step in sorted(snapshots):
        u = snapshots[step]
        for name, value in evaluate_probes(assembler, load_asm, probes, u,
                                           step, n_steps):
            rows.append((name, step, value))
        fields = _node_fields(assembler, u)
        disp = u.reshape(-1, 3)
        fields = {"displacement": disp, **fields}
        write_vtk(runtime.mesh, fields,
                  os.path.join(outdir, f"fields_step_{step}.vtk"),
                  points=runtime.mesh.nodes + disp)
    write_probes_csv(rows, os.path.join(outdir, "probes.csv"))
    write_convergence_csv(state.records,
                          os.path.join(outdir, "convergence.csv"))
    metadata = {
        "package": "wrinklefem",
        "version": __version__,
        "case": doc,
        "converged": converged,
        "error": error,
        "n_dofs": runtime.mesh.n_dofs,
        "n_elements": runtime.mesh.n_elements,
        "iterations_per_step": list(state.iterations_per_step),
        "snapshot_steps_written": sorted(snapshots),
        "conventions": {
            "cauchy_from": "F",
            "stress_voigt": ["11", "22", "12"],
            "strain_voigt": ["11", "22", "2*12"],
            "state_codes": STATE_NAMES,
            "float_format": "printf %.17g (round-trip exact for doubles)",
        },
    }
    with open(os.path.join(outdir, "metadata.json"), "w") as fh:
        json.dump(metadata, fh, indent=2)
        fh.write("\n")
    return RunResult(outdir=str(outdir), converged=converged,
                     probe_rows=rows,
                     iterations_per_step=list(state.iterations_per_step),
                     error=error)


def run_case(doc: dict, outdir) -> RunResult:
    """Execute a case document and write the result bundle into ``outdir``.

    On nonconvergence the partial bundle (residual history, any snapshots
    already taken) is still written and the returned result has
    ``converged=False``.
    """
    runtime = build_runtime(doc)
    os.makedirs(outdir, exist_ok=True)
    try:
        res = run_schedule(runtime)
    except NonConvergenceError as exc:
        return _write_bundle(outdir, doc, runtime, exc.assembler,
                             exc.snapshots, exc.state, converged=False,
                             error=str(exc))
    return _write_bundle(outdir, doc, runtime, res.assembler, res.snapshots,
                         res.state, converged=True)

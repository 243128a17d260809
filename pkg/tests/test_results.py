"""Probe evaluation, CSV/VTK writers, and result-bundle generation."""

import json
import os

import numpy as np
import pytest

from wrinklefem.casefile import build_runtime
from wrinklefem.loads import LoadAssembler
from wrinklefem.mesh import build_rect_mesh
from wrinklefem.results import (evaluate_probes, run_case, write_probes_csv,
                                write_convergence_csv, write_vtk)
from wrinklefem.solver import run_schedule

Q_EDGE = 0.02           # per unit edge length; keeps strains ~1% so the
                        # nominal q/t stress estimate holds for Cauchy too


def stretch_doc(**extra) -> dict:
    """2x2 patch pulled equally in +x and +y: solidly taut when converged.

    The small eta keeps the very first tangent (zero strain classifies as
    slack) regular without affecting the taut solution.
    """
    doc = {
        "name": "stretch",
        "model": "mixed",
        "material": {"youngs_modulus": 100.0, "poisson_ratio": 0.3,
                     "thickness": 0.01, "eta": 1.0e-3},
        "mesh": {"kind": "rect", "lx": 1.0, "ly": 1.0, "nx": 2, "ny": 2},
        "loads": [
            {"kind": "edge_traction", "edge": "right",
             "direction": [1, 0, 0], "profile": {"const": Q_EDGE}},
            {"kind": "edge_traction", "edge": "top",
             "direction": [0, 1, 0], "profile": {"const": Q_EDGE}},
        ],
        "constraints": [
            {"nodes": "left", "dofs": [0]},
            {"nodes": "bottom", "dofs": [1]},
            {"nodes": "all", "dofs": [2]},
        ],
        "solver": {"n_steps": 2},
    }
    doc.update(extra)
    return doc


def solved_stretch():
    runtime = build_runtime(stretch_doc())
    res = run_schedule(runtime)
    load_asm = LoadAssembler(runtime.mesh, runtime.loads)
    return runtime, res, load_asm


class TestProbeEvaluation:
    def test_point_displacement_matches_nodal_value(self):
        runtime, res, load_asm = solved_stretch()
        node = runtime.mesh.node_sets["right_mid"][0]
        probes = [{"name": "ux", "kind": "point", "x": 1.0, "y": 0.5,
                   "quantity": "u_x"}]
        vals = dict(evaluate_probes(res.assembler, load_asm, probes,
                                    res.state.u, 2, 2))
        assert vals["ux"] == pytest.approx(res.state.u[3 * node], abs=1e-14)
        assert vals["ux"] > 0

    def test_stress_and_state_probes_on_taut_patch(self):
        runtime, res, load_asm = solved_stretch()
        probes = [
            {"name": "sx", "kind": "point", "x": 0.5, "y": 0.5,
             "quantity": "sx"},
            {"name": "s2", "kind": "point", "x": 0.5, "y": 0.5,
             "quantity": "s2"},
            {"name": "st", "kind": "point", "x": 0.5, "y": 0.5,
             "quantity": "state"},
        ]
        vals = dict(evaluate_probes(res.assembler, load_asm, probes,
                                    res.state.u, 2, 2))
        # uniform equibiaxial Cauchy stress ~ q/t on the deformed section
        assert vals["sx"] == pytest.approx(Q_EDGE / 0.01, rel=0.05)
        assert vals["s2"] == pytest.approx(vals["sx"], rel=1e-6)
        assert vals["st"] == 0.0

    def test_pullin_diag_combines_displacements(self):
        runtime, res, load_asm = solved_stretch()
        probes = [
            {"name": "ux", "kind": "point", "x": 1.0, "y": 1.0,
             "quantity": "u_x"},
            {"name": "uy", "kind": "point", "x": 1.0, "y": 1.0,
             "quantity": "u_y"},
            {"name": "pull", "kind": "point", "x": 1.0, "y": 1.0,
             "quantity": "pullin_diag"},
        ]
        vals = dict(evaluate_probes(res.assembler, load_asm, probes,
                                    res.state.u, 2, 2))
        want = -(vals["ux"] + vals["uy"]) / np.sqrt(2.0)
        assert vals["pull"] == pytest.approx(want, abs=1e-15)

    def test_taut_patch_has_no_band_and_no_wrinkles(self):
        runtime, res, load_asm = solved_stretch()
        probes = [
            {"name": "band", "kind": "band_height", "column": 0},
            {"name": "frac", "kind": "wrinkled_fraction", "half_width": 0.2},
        ]
        vals = dict(evaluate_probes(res.assembler, load_asm, probes,
                                    res.state.u, 2, 2))
        assert vals["band"] == 0.0
        assert vals["frac"] == 0.0

    def test_reaction_balances_applied_load(self):
        runtime, res, load_asm = solved_stretch()
        probes = [{"name": "rx", "kind": "reaction", "nodes": "left",
                   "dof": 0}]
        vals = dict(evaluate_probes(res.assembler, load_asm, probes,
                                    res.state.u, 2, 2))
        # support force = -(total applied traction), edge length 1
        assert vals["rx"] == pytest.approx(-Q_EDGE, rel=1e-8)

    def test_unknown_probe_kind_rejected(self):
        runtime, res, load_asm = solved_stretch()
        with pytest.raises(ValueError, match="unknown probe kind"):
            evaluate_probes(res.assembler, load_asm,
                            [{"name": "x", "kind": "wat"}], res.state.u, 2, 2)


class TestCsvWriters:
    def test_probes_csv(self, tmp_path):
        path = tmp_path / "probes.csv"
        write_probes_csv([("a", 1, 0.5), ("b", 2, 1.0 / 3.0)], path)
        lines = path.read_text().splitlines()
        assert lines[0] == "probe,step,value"
        assert lines[1] == "a,1,0.5"
        name, step, val = lines[2].split(",")
        assert (name, step) == ("b", "2")
        assert float(val) == 1.0 / 3.0          # full-precision round trip

    def test_convergence_csv(self, tmp_path):
        from wrinklefem.solver import IterationRecord
        path = tmp_path / "conv.csv"
        recs = [IterationRecord(1, 0, 2.0, 4.0, 0.5),
                IterationRecord(1, 1, 1e-12, 4.0, 2.5e-13)]
        write_convergence_csv(recs, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "step,iteration,residual,f_ext_norm,ratio"
        assert lines[1] == "1,0,2,4,0.5"
        assert float(lines[2].split(",")[4]) == 2.5e-13


class TestVtkWriter:
    def test_single_linear_quad_layout(self, tmp_path):
        mesh = build_rect_mesh(1.0, 1.0, 1, 1, order=1)
        path = tmp_path / "one.vtk"
        write_vtk(mesh, {"temp": np.arange(4.0),
                         "disp": np.zeros((4, 3))}, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "# vtk DataFile Version 3.0"
        assert lines[2] == "ASCII"
        assert lines[3] == "DATASET UNSTRUCTURED_GRID"
        assert "POINTS 4 double" in lines
        i = lines.index("CELLS 1 5")
        # connectivity is counterclockwise corner order
        assert lines[i + 1] == "4 0 1 3 2"
        j = lines.index("CELL_TYPES 1")
        assert lines[j + 1] == "9"
        k = lines.index("POINT_DATA 4")
        assert "SCALARS temp double 1" in lines[k:]
        assert "LOOKUP_TABLE default" in lines[k:]
        assert "VECTORS disp double" in lines[k:]

    def test_quadratic_element_splits_into_subquads(self, tmp_path):
        mesh = build_rect_mesh(1.0, 1.0, 1, 1, order=2)
        path = tmp_path / "two.vtk"
        write_vtk(mesh, {}, path)
        text = path.read_text()
        assert "POINTS 9 double" in text
        assert "CELLS 4 20" in text          # 2x2 linear sub-quads

    def test_points_override_used(self, tmp_path):
        mesh = build_rect_mesh(1.0, 1.0, 1, 1, order=1)
        moved = mesh.nodes + [0.0, 0.0, 2.5]
        path = tmp_path / "moved.vtk"
        write_vtk(mesh, {}, path, points=moved)
        assert "0 0 2.5" in path.read_text()

    def test_bad_inputs_rejected(self, tmp_path):
        mesh = build_rect_mesh(1.0, 1.0, 1, 1, order=1)
        with pytest.raises(ValueError, match="points"):
            write_vtk(mesh, {}, tmp_path / "x.vtk", points=np.zeros((2, 3)))
        with pytest.raises(ValueError, match="node-sized"):
            write_vtk(mesh, {"f": np.zeros(7)}, tmp_path / "x.vtk")


class TestRunCase:
    def probed_doc(self):
        doc = stretch_doc()
        doc["probes"] = [
            {"name": "ux_tip", "kind": "point", "x": 1.0, "y": 0.5,
             "quantity": "u_x"},
            {"name": "rx", "kind": "reaction", "nodes": "left", "dof": 0},
        ]
        doc["snapshot_steps"] = [2]
        return doc

    def test_bundle_files_and_metadata(self, tmp_path):
        out = tmp_path / "run"
        result = run_case(self.probed_doc(), out)
        assert result.converged
        for name in ("probes.csv", "convergence.csv", "metadata.json",
                     "fields_step_2.vtk"):
            assert (out / name).exists()
        assert not (out / "fields_step_1.vtk").exists()
        meta = json.loads((out / "metadata.json").read_text())
        assert meta["package"] == "wrinklefem"
        assert meta["converged"] is True
        assert meta["case"] == self.probed_doc()
        assert meta["n_elements"] == 4
        assert len(meta["iterations_per_step"]) == 2
        assert meta["snapshot_steps_written"] == [2]

    def test_probe_rows_only_at_snapshot_steps(self, tmp_path):
        result = run_case(self.probed_doc(), tmp_path / "run")
        steps = {step for _, step, _ in result.probe_rows}
        assert steps == {2}
        names = {name for name, _, _ in result.probe_rows}
        assert names == {"ux_tip", "rx"}

    def test_identical_runs_are_byte_identical(self, tmp_path):
        a = tmp_path / "a"
        b = tmp_path / "b"
        run_case(self.probed_doc(), a)
        run_case(self.probed_doc(), b)
        for name in sorted(os.listdir(a)):
            assert (a / name).read_bytes() == (b / name).read_bytes(), name

    def test_nonconvergence_still_writes_bundle(self, tmp_path):
        doc = self.probed_doc()
        doc["loads"][0]["profile"]["const"] = 40.0     # strain ~ O(1)
        doc["solver"].update(n_steps=1, max_iter=2)
        doc["snapshot_steps"] = [1]
        out = tmp_path / "failed"
        result = run_case(doc, out)
        assert not result.converged
        assert result.error
        meta = json.loads((out / "metadata.json").read_text())
        assert meta["converged"] is False
        assert meta["error"] == result.error
        conv = (out / "convergence.csv").read_text().splitlines()
        assert len(conv) >= 2                          # header + >= 1 iter
        assert (out / "probes.csv").read_text() == "probe,step,value\n"

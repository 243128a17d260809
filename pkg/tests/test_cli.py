"""End-to-end command-line checks (subprocess level).

Exit-code contract: 0 success, 1 invalid input/usage, 2 nonconvergence.
"""

import json
import os
import subprocess
import sys

import pytest

CLI = [sys.executable, "-m", "wrinklefem.cli"]


def run_cli(*args, env_extra=None, cwd=None):
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(CLI + list(args), capture_output=True, text=True,
                          env=env, cwd=cwd)


def small_case() -> dict:
    return {
        "name": "patch",
        "model": "mixed",
        "material": {"youngs_modulus": 100.0, "poisson_ratio": 0.3,
                     "thickness": 0.01, "eta": 1.0e-3},
        "mesh": {"kind": "rect", "lx": 1.0, "ly": 1.0, "nx": 2, "ny": 2},
        "loads": [
            {"kind": "edge_traction", "edge": "right",
             "direction": [1, 0, 0], "profile": {"const": 0.02}},
            {"kind": "edge_traction", "edge": "top",
             "direction": [0, 1, 0], "profile": {"const": 0.02}},
        ],
        "constraints": [
            {"nodes": "left", "dofs": [0]},
            {"nodes": "bottom", "dofs": [1]},
            {"nodes": "all", "dofs": [2]},
        ],
        "solver": {"n_steps": 2},
        "probes": [{"name": "ux_tip", "kind": "point", "x": 1.0, "y": 0.5,
                    "quantity": "u_x"}],
        "snapshot_steps": [2],
        "references": [{"kind": "value", "probe": "ux_tip", "step": 2,
                        "value": 0.013716496269422437, "rtol": 1.0e-6,
                        "source": "regression"}],
    }


@pytest.fixture
def case_path(tmp_path):
    path = tmp_path / "patch.json"
    path.write_text(json.dumps(small_case()))
    return path


class TestValidate:
    def test_good_file(self, case_path):
        proc = run_cli("validate", str(case_path))
        assert proc.returncode == 0
        assert "OK" in proc.stdout

    def test_schema_error_names_the_field(self, tmp_path):
        doc = small_case()
        doc["model"] = "bogus"
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc))
        proc = run_cli("validate", str(path))
        assert proc.returncode == 1
        assert "/model" in proc.stderr

    def test_broken_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{")
        proc = run_cli("validate", str(path))
        assert proc.returncode == 1

    def test_missing_file(self, tmp_path):
        proc = run_cli("validate", str(tmp_path / "nope.json"))
        assert proc.returncode == 1


class TestRun:
    def test_run_writes_bundle(self, case_path, tmp_path):
        out = tmp_path / "out"
        proc = run_cli("run", str(case_path), "--out", str(out))
        assert proc.returncode == 0, proc.stderr
        assert "ux_tip" in proc.stdout
        assert "converged" in proc.stdout
        for name in ("probes.csv", "convergence.csv", "metadata.json",
                     "fields_step_2.vtk"):
            assert (out / name).exists()

    def test_nonconvergence_exits_2_with_bundle(self, tmp_path):
        doc = small_case()
        doc["loads"][0]["profile"]["const"] = 40.0
        doc["solver"].update(n_steps=1, max_iter=2)
        doc["snapshot_steps"] = [1]
        del doc["references"]
        path = tmp_path / "hard.json"
        path.write_text(json.dumps(doc))
        out = tmp_path / "failed"
        proc = run_cli("run", str(path), "--out", str(out))
        assert proc.returncode == 2
        assert (out / "convergence.csv").exists()
        meta = json.loads((out / "metadata.json").read_text())
        assert meta["converged"] is False

    def test_invalid_case_exits_1(self, tmp_path):
        doc = small_case()
        del doc["solver"]
        path = tmp_path / "invalid.json"
        path.write_text(json.dumps(doc))
        proc = run_cli("run", str(path), "--out", str(tmp_path / "x"))
        assert proc.returncode == 1

    def test_output_root_env_var(self, case_path, tmp_path):
        root = tmp_path / "results-root"
        proc = run_cli("run", str(case_path),
                       env_extra={"WRINKLEFEM_OUTPUT_ROOT": str(root)})
        assert proc.returncode == 0, proc.stderr
        assert (root / "patch" / "metadata.json").exists()


class TestBenchAndReport:
    def test_bench_run_then_report(self, tmp_path):
        out = tmp_path / "airbag4"
        proc = run_cli("bench", "airbag", "--mesh", "4", "--out", str(out))
        assert proc.returncode == 0, proc.stderr
        meta = json.loads((out / "metadata.json").read_text())
        assert meta["case"]["name"] == "airbag-mixed-n4"
        assert meta["converged"] is True

        rep = run_cli("report", str(out))
        assert rep.returncode == 0, rep.stderr
        assert "pass" in rep.stdout
        assert "FAIL" not in rep.stdout

    def test_bench_option_passthrough(self, tmp_path):
        from wrinklefem import benchmarks
        out = tmp_path / "airbag4b"
        proc = run_cli("bench", "airbag", "--mesh", "4",
                       "--opt", "stabilizer=2.0", "--out", str(out))
        assert proc.returncode == 0, proc.stderr
        meta = json.loads((out / "metadata.json").read_text())
        # doubled stabilizer shows up in the resolved death-load tractions
        consts = [ld["profile"]["const"] for ld in meta["case"]["loads"]
                  if ld["kind"] == "edge_traction"]
        base = benchmarks.build_case("airbag", n=4).document
        base_consts = [ld["profile"]["const"] for ld in base["loads"]
                       if ld["kind"] == "edge_traction"]
        assert consts == [2.0 * c for c in base_consts]

    def test_unknown_bench_name_exits_1(self):
        proc = run_cli("bench", "torsion")
        assert proc.returncode == 1

    def test_bad_option_exits_1(self, tmp_path):
        # --mesh only applies to square-mesh cases; bending is 11x5
        proc = run_cli("bench", "bending", "--mesh", "8", cwd=tmp_path)
        assert proc.returncode == 1
        assert "mesh" in proc.stderr.lower()

    def test_report_on_missing_dir_exits_1(self, tmp_path):
        proc = run_cli("report", str(tmp_path / "nothing-here"))
        assert proc.returncode == 1


class TestUsage:
    def test_no_arguments_is_usage_error(self):
        proc = run_cli()
        assert proc.returncode == 1

    def test_unknown_subcommand(self):
        proc = run_cli("frobnicate")
        assert proc.returncode == 1

    def test_help_exits_0(self):
        proc = run_cli("--help")
        assert proc.returncode == 0
        for sub in ("run", "bench", "validate", "report"):
            assert sub in proc.stdout

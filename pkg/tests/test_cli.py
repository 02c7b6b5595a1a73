"""Command-line behavior: spec validation, dispatch, exit codes, artifacts."""

import json

import numpy as np
import pytest

from planarends.cli import build_parser, load_schema, main
from planarends.meshio import import_obj, import_ply

import jsonschema


def run(tmp_path, *argv):
    return main(list(argv))


def write_spec(tmp_path, name, payload):
    p = tmp_path / name
    p.write_text(json.dumps(payload), encoding="utf-8")
    return str(p)


CATENOID = {"kind": "catenoid"}
PHI = {"kind": "phi_ij", "lambdas": ["0", "1", "2", "3"], "I": [1, 2], "J": [1, 3]}
GFORM = {
    "kind": "gform",
    "lambdas": ["0", "1", "2", "3"],
    "p1": {"branch_index": 1},
    "p2": {"branch_index": 2},
    "alpha": "1",
    "null_vector": ["1", "i", "0", "0"],
    "holomorphic_matrix": [["1"], ["2"], ["3"], ["1/2"]],
}


class TestSpecValidation:
    def test_missing_kind_rejected(self, tmp_path):
        spec = write_spec(tmp_path, "s.json", {"lambdas": ["0", "1"]})
        assert main(["verify", "--spec", spec]) == 2

    def test_unknown_kind_rejected(self, tmp_path):
        spec = write_spec(tmp_path, "s.json", {"kind": "helicoid"})
        assert main(["verify", "--spec", spec]) == 2

    def test_missing_kind_parameters_rejected(self, tmp_path):
        spec = write_spec(tmp_path, "s.json", {"kind": "phi_ij", "I": [1, 2]})
        assert main(["verify", "--spec", spec]) == 2

    def test_bad_tolerance_rejected(self, tmp_path):
        payload = dict(CATENOID, tolerances={"periods": -1.0})
        spec = write_spec(tmp_path, "s.json", payload)
        assert main(["verify", "--spec", spec]) == 2

    def test_malformed_json_rejected(self, tmp_path):
        p = tmp_path / "s.json"
        p.write_text("{not json", encoding="utf-8")
        assert main(["verify", "--spec", str(p)]) == 2

    def test_missing_file_rejected(self, tmp_path):
        assert main(["verify", "--spec", str(tmp_path / "absent.json")]) == 2

    def test_schema_accepts_all_fixture_specs(self):
        schema = load_schema()
        for payload in (CATENOID, PHI, GFORM):
            jsonschema.validate(payload, schema)


class TestConstruct:
    def test_catenoid_two_passing_ends(self, tmp_path, capsys):
        spec = write_spec(tmp_path, "s.json", CATENOID)
        assert main(["construct", "--spec", spec, "--out", str(tmp_path)]) == 0
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["pass"] is True
        assert len(report["ends"]) == 2
        assert all(e["embedded_planar"] for e in report["ends"])
        images = {e["gauss_image"] for e in report["ends"]}
        assert images == {"[0,0,1,-i]", "[1,-i,0,0]"}
        out = capsys.readouterr().out
        assert "PASS" in out

    def test_phi_three_passing_ends(self, tmp_path):
        spec = write_spec(tmp_path, "s.json", PHI)
        assert main(["construct", "--spec", spec, "--out", str(tmp_path)]) == 0
        report = json.loads((tmp_path / "report.json").read_text())
        assert len(report["ends"]) == 3
        assert all(e["embedded_planar"] for e in report["ends"])
        assert report["symmetry"]["ok"] is True
        assert report["periods"]["method"] == "exact"

    def test_equal_index_sets_rejected(self, tmp_path):
        payload = dict(PHI, J=[1, 2])
        spec = write_spec(tmp_path, "s.json", payload)
        assert main(["construct", "--spec", spec, "--out", str(tmp_path)]) == 2


class TestVerify:
    def test_gform_conformality_witness_printed(self, tmp_path, capsys):
        spec = write_spec(tmp_path, "s.json", GFORM)
        assert main(["verify", "--spec", spec, "--out", str(tmp_path)]) == 3
        out = capsys.readouterr().out
        assert "conformal: FAIL witness =" in out
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["conformal"]["ok"] is False
        assert report["conformal"]["witness"]

    def test_tolerance_overrides_recorded(self, tmp_path):
        payload = dict(CATENOID, tolerances={"periods": 1e-6})
        spec = write_spec(tmp_path, "s.json", payload)
        assert main(["verify", "--spec", spec, "--out", str(tmp_path)]) == 0
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["periods"]["tolerance"] == 1e-6

    def test_deterministic_report_bytes(self, tmp_path):
        spec = write_spec(tmp_path, "s.json", CATENOID)
        d1, d2 = tmp_path / "a", tmp_path / "b"
        assert main(["verify", "--spec", spec, "--out", str(d1)]) == 0
        assert main(["verify", "--spec", spec, "--out", str(d2)]) == 0
        assert (d1 / "report.json").read_bytes() == (d2 / "report.json").read_bytes()


class TestTorus:
    def test_half_period_case(self, tmp_path):
        payload = {"kind": "torus_eta", "tau": "i", "p2": "1/2"}
        spec = write_spec(tmp_path, "s.json", payload)
        assert main(["verify", "--spec", spec, "--out", str(tmp_path)]) == 0
        report = json.loads((tmp_path / "report.json").read_text())
        cases = [row["case"] for row in report["forms"]]
        assert cases == ["wp", "half_period"]
        assert all(row["max_abs_residue"] < 1e-8 for row in report["forms"])

    def test_generic_case(self, tmp_path):
        payload = {"kind": "torus_eta", "tau": "i", "p2": "1/3+1/3*i"}
        spec = write_spec(tmp_path, "s.json", payload)
        assert main(["verify", "--spec", spec, "--out", str(tmp_path)]) == 0
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["forms"][1]["case"] == "generic"
        assert all(row["max_abs_residue"] < 1e-8 for row in report["forms"])

    def test_lattice_point_rejected(self, tmp_path):
        payload = {"kind": "torus_eta", "tau": "i", "p2": "1+i"}
        spec = write_spec(tmp_path, "s.json", payload)
        assert main(["verify", "--spec", spec, "--out", str(tmp_path)]) == 2

    def test_mesh_of_torus_rejected(self, tmp_path):
        payload = {"kind": "torus_eta", "tau": "i", "p2": "1/2"}
        spec = write_spec(tmp_path, "s.json", payload)
        assert main(["mesh", "--spec", spec, "--out", str(tmp_path)]) == 2


class TestMesh:
    def test_catenoid_obj_written(self, tmp_path, capsys):
        spec = write_spec(tmp_path, "s.json", CATENOID)
        rc = main(["mesh", "--spec", spec, "--out", str(tmp_path), "--grid", "8x12"])
        assert rc == 0
        out = capsys.readouterr().out
        assert "8 vertices" in out.splitlines()[0] or "vertices" in out
        mesh = import_obj(tmp_path / "mesh.obj")
        assert len(mesh.vertices) == 8 * 12
        assert mesh.vertices.shape[1] == 4

    def test_phi_ply_with_four_coordinates(self, tmp_path):
        spec = write_spec(tmp_path, "s.json", PHI)
        rc = main(["mesh", "--spec", spec, "--out", str(tmp_path), "--grid", "4x6"])
        assert rc == 0
        header = (tmp_path / "mesh.ply").read_bytes().split(b"end_header")[0]
        for prop in (b"property double x1", b"property double x4"):
            assert prop in header
        mesh = import_ply(tmp_path / "mesh.ply")
        assert len(mesh.vertices) == 3 * 4 * 12
        assert mesh.vertices.shape[1] == 4

    def test_nonzero_periods_exit_code(self, tmp_path):
        spec = write_spec(tmp_path, "s.json", GFORM)
        assert main(["mesh", "--spec", spec, "--out", str(tmp_path)]) == 3

    def test_projection_flag_respected(self, tmp_path):
        spec = write_spec(tmp_path, "s.json", CATENOID)
        proj = ["0", "1", "0", "0", "0", "0", "1", "0", "0", "0", "0", "1"]
        rc = main(
            ["mesh", "--spec", spec, "--out", str(tmp_path), "--grid", "4x8",
             "--projection", *proj]
        )
        assert rc == 0
        mesh = import_obj(tmp_path / "mesh.obj")
        expect = np.zeros((3, 4))
        expect[0, 1] = expect[1, 2] = expect[2, 3] = 1.0
        assert np.array_equal(mesh.projection, expect)

    def test_bad_projection_rejected(self, tmp_path):
        spec = write_spec(tmp_path, "s.json", CATENOID)
        proj = ["1"] * 12
        rc = main(
            ["mesh", "--spec", spec, "--out", str(tmp_path), "--grid", "4x8",
             "--projection", *proj]
        )
        assert rc == 2

    def test_bad_grid_string_rejected(self):
        with pytest.raises(SystemExit) as exc:
            build_parser().parse_args(["mesh", "--spec", "x.json", "--grid", "64"])
        assert exc.value.code == 2


class TestSearch:
    def test_immediate_selection_needs_no_trials(self, tmp_path, capsys):
        rc = main(["search", "1", "1,2", "1,3", "--out", str(tmp_path)])
        assert rc == 0
        found = json.loads((tmp_path / "found_spec.json").read_text())
        assert found["kind"] == "phi_ij"
        assert found["lambdas"] == ["0", "1", "2", "3"]
        assert found["certificate"]["nonzero"] is True
        jsonschema.validate(found, load_schema())

    def test_seeded_search_emits_certificate(self, tmp_path):
        rc = main(["search", "2", "1,2,3", "1,4,5", "--seed", "7",
                   "--out", str(tmp_path)])
        assert rc == 0
        found = json.loads((tmp_path / "found_spec.json").read_text())
        assert len(found["lambdas"]) == 6
        assert found["certificate"]["nonzero"] is True
        assert found["search"]["seed"] == 7
        jsonschema.validate(found, load_schema())

    def test_search_is_deterministic(self, tmp_path):
        d1, d2 = tmp_path / "a", tmp_path / "b"
        for d in (d1, d2):
            assert main(["search", "2", "1,2,3", "1,4,5", "--seed", "7",
                         "--out", str(d)]) == 0
        assert (d1 / "found_spec.json").read_bytes() == (d2 / "found_spec.json").read_bytes()

    def test_full_union_rejected(self, tmp_path):
        rc = main(["search", "1", "1,2,3", "1,2,4", "--out", str(tmp_path)])
        assert rc == 2

    def test_trial_cap_exit_code(self, tmp_path):
        # this selection misses both combinatorial guarantees, so it needs
        # sampled branch values; a zero trial budget must exhaust cleanly
        rc = main(["search", "2", "1,2,3", "1,4,5", "--trials", "0",
                   "--out", str(tmp_path)])
        assert rc == 4

    def test_found_spec_constructs_cleanly(self, tmp_path):
        assert main(["search", "1", "1,2", "1,3", "--out", str(tmp_path)]) == 0
        rc = main(["construct", "--spec", str(tmp_path / "found_spec.json"),
                   "--out", str(tmp_path)])
        assert rc == 0
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["pass"] is True
        assert len(report["ends"]) == 3

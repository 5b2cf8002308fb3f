import json

import numpy as np
import pytest

import oracles
from pantscut import (
    DecompositionError,
    PantsDecomposition,
    ScalarField,
    SurfaceType,
    decompose,
    default_field,
    expected_counts,
    handle_decompose,
    reeb_decompose,
    synth_genus_g,
    theta_surface,
    validate_decomposition,
)
from pantscut.fileio import segmentation_dict

CASES = [
    (2, 0), (3, 0), (4, 0),
    (1, 1), (2, 1),
    (1, 2), (0, 4), (0, 3), (2, 3),
]


def run_case(genus, b, algorithm, res=16):
    mesh = synth_genus_g(genus, res=res, boundaries=b)
    st = mesh.validate()
    dec = decompose(mesh, algorithm=algorithm)
    return mesh, st, dec


class TestExpectedCounts:
    def test_known_counts(self):
        assert expected_counts(SurfaceType(2, 0)) == (2, 3)
        assert expected_counts(SurfaceType(3, 0)) == (4, 6)
        assert expected_counts(SurfaceType(5, 0)) == (8, 12)
        assert expected_counts(SurfaceType(0, 3)) == (1, 0)
        assert expected_counts(SurfaceType(0, 4)) == (2, 1)
        assert expected_counts(SurfaceType(1, 1)) == (1, 1)
        assert expected_counts(SurfaceType(2, 3)) == (5, 6)


@pytest.mark.parametrize("algorithm", ["handle", "reeb"])
class TestFullMatrix:
    @pytest.mark.parametrize("genus,b", CASES)
    def test_counts_and_types(self, genus, b, algorithm):
        mesh, st, dec = run_case(genus, b, algorithm)
        n_patches, n_curves = expected_counts(st)
        assert dec.n_patches == n_patches
        assert dec.n_curves == n_curves
        for p in dec.patches:
            assert p.surface_type == SurfaceType(0, 3)
            assert oracles.classify_surface(p.mesh.triangles) == (0, 3)
        rep = validate_decomposition(dec, mesh)
        assert rep.ok, rep.problems

    def test_chi_additivity(self, algorithm):
        mesh, st, dec = run_case(2, 1, algorithm)
        assert sum(
            p.mesh.euler_characteristic() for p in dec.patches
        ) == st.euler_characteristic

    def test_pants_input_returned_unchanged(self, algorithm, pants_mesh):
        dec = decompose(pants_mesh, algorithm=algorithm)
        assert dec.n_patches == 1
        assert dec.n_curves == 0
        assert dec.patches[0].mesh.n_triangles == pants_mesh.n_triangles

    def test_theta_surface_degenerate_saddles(self, algorithm):
        mesh, values = theta_surface()
        st = mesh.validate()
        assert st == SurfaceType(2, 0)
        f = ScalarField(mesh, values)
        from pantscut import classify_vertices

        report = classify_vertices(f)
        assert [s.multiplicity for s in report.saddles] == [2, 2]
        dec = decompose(mesh, f, algorithm=algorithm)
        assert dec.n_patches == 2
        assert dec.n_curves == 3
        assert validate_decomposition(dec, mesh).ok


class TestHandleSpecifics:
    def test_harmonic_field_all_iso_curves(self, g2_mesh, g2_field):
        # the default field splits before it merges, so both end pieces
        # are already pants and no path loop is traced
        dec = handle_decompose(g2_mesh, g2_field)
        assert [c.kind for c in dec.curves] == ["iso", "iso", "iso"]

    def test_axis_field_needs_two_loops(self, g2_mesh):
        # sweeping along the chain axis makes both end pieces (1,1),
        # each repaired by one saddle loop
        f = ScalarField(g2_mesh, g2_mesh.vertices[:, 0].copy())
        dec = handle_decompose(g2_mesh, f)
        kinds = sorted(c.kind for c in dec.curves)
        assert kinds == ["iso", "loop", "loop"]
        assert validate_decomposition(dec, g2_mesh).ok

    def test_loop_curves_have_positions(self, g2_mesh):
        f = ScalarField(g2_mesh, g2_mesh.vertices[:, 0].copy())
        dec = handle_decompose(g2_mesh, f)
        for c in dec.curves:
            if c.kind == "loop":
                assert c.positions is not None
                assert len(c.positions) == len(c.points)


class TestReebAnyField:
    # chained tori stack one min and one max per handle along z, which
    # the handle sweep rejects but the Reeb route prunes as leaves
    def test_multi_extrema_field_decomposes(self, g2_mesh):
        from pantscut import classify_vertices

        f = ScalarField(g2_mesh, g2_mesh.vertices[:, 2].copy())
        rep = classify_vertices(f)
        assert rep.n_min == 2 and rep.n_max == 2
        dec = reeb_decompose(g2_mesh, f)
        assert len(dec.patches) == 2
        assert len(dec.curves) == 3
        assert validate_decomposition(dec, g2_mesh).ok

    def test_same_field_rejected_by_handle_sweep(self, g2_mesh):
        f = ScalarField(g2_mesh, g2_mesh.vertices[:, 2].copy())
        with pytest.raises(DecompositionError, match="exactly one minimum"):
            handle_decompose(g2_mesh, f)


class TestChiPositiveRejected:
    def test_sphere(self, sphere12):
        with pytest.raises(DecompositionError, match="pants"):
            decompose(sphere12)

    def test_torus(self, torus16):
        with pytest.raises(DecompositionError, match="pants"):
            decompose(torus16)

    def test_disk(self, icosahedron):
        from pantscut import TriMesh

        disk = TriMesh(icosahedron.vertices, icosahedron.triangles[1:])
        with pytest.raises(DecompositionError):
            decompose(disk)


class TestValidator:
    def test_dropped_patch_detected(self, g2_mesh, g2_field):
        dec = handle_decompose(g2_mesh, g2_field)
        bad = PantsDecomposition(
            dec.source_type, dec.algorithm, dec.patches[:-1], dec.curves
        )
        rep = validate_decomposition(bad, g2_mesh)
        assert not rep.ok
        assert any("patch" in p for p in rep.problems)

    def test_dropped_curve_detected(self, g2_mesh, g2_field):
        dec = handle_decompose(g2_mesh, g2_field)
        bad = PantsDecomposition(
            dec.source_type, dec.algorithm, dec.patches, dec.curves[:-1]
        )
        rep = validate_decomposition(bad, g2_mesh)
        assert not rep.ok
        assert any("curve" in p for p in rep.problems)

    def test_non_pants_patch_detected(self, torus16, g2_mesh, g2_field):
        from pantscut.decompose import Patch

        dec = handle_decompose(g2_mesh, g2_field)
        fake = Patch(
            0, torus16, SurfaceType(0, 3),
            dec.patches[0].source_faces,
        )
        bad = PantsDecomposition(
            dec.source_type, dec.algorithm,
            [fake] + list(dec.patches[1:]), dec.curves,
        )
        rep = validate_decomposition(bad, g2_mesh)
        assert not rep.ok


class TestDeterminism:
    @pytest.mark.parametrize("algorithm", ["handle", "reeb"])
    def test_repeat_runs_identical(self, algorithm):
        blobs = []
        for _ in range(2):
            mesh = synth_genus_g(2, res=16, boundaries=1)
            dec = decompose(mesh, algorithm=algorithm)
            blobs.append(
                json.dumps(segmentation_dict(dec), sort_keys=True)
            )
        assert blobs[0] == blobs[1]


class TestDispatcher:
    def test_unknown_algorithm(self, g2_mesh):
        with pytest.raises(ValueError, match="unknown algorithm"):
            decompose(g2_mesh, algorithm="bogus")

    def test_default_field_routes_by_type(self, g2_mesh, pants_mesh):
        f_closed = default_field(g2_mesh)
        assert f_closed.mesh is g2_mesh
        f_pants = default_field(pants_mesh)
        loops = pants_mesh.boundary_components()
        vals = {float(f_pants.values[loop[0]]) for loop in loops}
        assert vals == {0.0, 1.0}


class TestPatchProvenance:
    @pytest.mark.parametrize("algorithm", ["handle", "reeb"])
    def test_source_faces_cover_input(self, algorithm):
        # triangles split by a cut contribute to both sides, so the
        # per-patch origin sets overlap but their union is everything
        mesh, st, dec = run_case(2, 0, algorithm)
        covered = set()
        for p in dec.patches:
            covered.update(map(int, p.source_faces))
        assert covered == set(range(mesh.n_triangles))

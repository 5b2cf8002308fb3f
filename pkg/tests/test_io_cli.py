import json
import os
import subprocess
import sys

import numpy as np
import pytest

from pantscut import (
    MeshValidationError,
    SurfaceType,
    TriMesh,
    decompose,
    handle_decompose,
    synth_genus_g,
)
from pantscut.cli import main
from pantscut.fileio import (
    load_mesh,
    load_obj,
    load_off,
    save_mesh,
    save_obj,
    save_off,
    save_patches,
    save_ply,
    save_segmentation,
    segmentation_dict,
)

def write_icosahedron_off(path, icosahedron):
    lines = ["OFF", f"{12} {20} {30}"]
    for v in icosahedron.vertices:
        lines.append(" ".join(repr(float(x)) for x in v))
    for t in icosahedron.triangles:
        lines.append("3 " + " ".join(str(int(i)) for i in t))
    path.write_text("\n".join(lines) + "\n")


class TestOffFormat:
    def test_load_known_polyhedron(self, tmp_path, icosahedron):
        p = tmp_path / "ico.off"
        write_icosahedron_off(p, icosahedron)
        m = load_off(p)
        assert m.n_vertices == 12
        assert m.n_edges == 30
        assert m.n_triangles == 20
        assert m.validate() == SurfaceType(0, 0)

    def test_positions_parsed_exactly(self, tmp_path):
        p = tmp_path / "three.off"
        p.write_text(
            "OFF\n4 2 0\n0.1 -3.5e-2 1\n0 0 0\n1 0 0\n1 1 0.25\n"
            "3 0 1 2\n3 0 2 3\n"
        )
        m = load_off(p)
        assert m.vertices[0, 0] == float("0.1")
        assert m.vertices[0, 1] == float("-3.5e-2")
        assert m.vertices[3, 2] == 0.25

    def test_round_trip_exact(self, tmp_path, g2_mesh):
        p = tmp_path / "g2.off"
        save_off(p, g2_mesh)
        m = load_off(p)
        assert np.array_equal(m.vertices, g2_mesh.vertices)
        assert np.array_equal(m.triangles, g2_mesh.triangles)

    def test_comments_ignored(self, tmp_path):
        p = tmp_path / "c.off"
        p.write_text(
            "OFF\n# header comment\n3 1 0\n0 0 0\n1 0 0\n# mid comment\n"
            "0 1 0\n3 0 1 2\n"
        )
        assert load_off(p).n_triangles == 1

    def test_quad_face_rejected(self, tmp_path):
        p = tmp_path / "quad.off"
        p.write_text("OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n")
        with pytest.raises(MeshValidationError, match="triangulate"):
            load_off(p)

    def test_missing_header(self, tmp_path):
        p = tmp_path / "x.off"
        p.write_text("3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n")
        with pytest.raises(MeshValidationError, match="OFF header"):
            load_off(p)

    def test_truncated_file(self, tmp_path):
        p = tmp_path / "trunc.off"
        p.write_text("OFF\n3 1 0\n0 0 0\n1 0 0\n")
        with pytest.raises(MeshValidationError, match="malformed"):
            load_off(p)


class TestObjFormat:
    def test_round_trip_exact(self, tmp_path, g2_mesh):
        p = tmp_path / "g2.obj"
        save_obj(p, g2_mesh)
        m = load_obj(p)
        assert np.array_equal(m.vertices, g2_mesh.vertices)
        assert np.array_equal(m.triangles, g2_mesh.triangles)

    def test_slash_refs_and_negative_indices(self, tmp_path):
        p = tmp_path / "s.obj"
        p.write_text(
            "v 0 0 0\nv 1 0 0\nv 0 1 0\n"
            "f 1/1/1 2/2/2 -1/3/3\n"
        )
        m = load_obj(p)
        assert np.array_equal(m.triangles, [[0, 1, 2]])

    def test_quad_face_rejected(self, tmp_path):
        p = tmp_path / "q.obj"
        p.write_text("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n")
        with pytest.raises(MeshValidationError, match="triangulate"):
            load_obj(p)

    def test_by_extension(self, tmp_path, g2_mesh):
        for name in ("m.off", "m.obj"):
            p = tmp_path / name
            save_mesh(p, g2_mesh)
            assert load_mesh(p).n_triangles == g2_mesh.n_triangles
        with pytest.raises(MeshValidationError, match="unsupported"):
            save_mesh(tmp_path / "m.stl", g2_mesh)
        with pytest.raises(MeshValidationError, match="unsupported"):
            load_mesh(tmp_path / "m.stl")


@pytest.fixture(scope="module")
def g2_dec():
    mesh = synth_genus_g(2, res=16)
    mesh.validate()
    return mesh, handle_decompose(mesh)


class TestSegmentationJson:
    def test_schema(self, g2_dec):
        mesh, dec = g2_dec
        d = segmentation_dict(dec)
        assert set(d) == {"surface_type", "patches", "curves"}
        assert d["surface_type"] == {"g": 2, "b": 0, "chi": -2}
        assert len(d["patches"]) == 2
        assert len(d["curves"]) == 3
        for p in d["patches"]:
            assert set(p) == {"id", "type", "face_ids"}
            assert p["type"] == {"g": 0, "b": 3}
        for c in d["curves"]:
            assert c["kind"] in ("iso", "loop")
            if c["kind"] == "iso":
                assert "level" in c
                for pt in c["points"]:
                    assert set(pt) == {"edge", "t"}
                    assert 0.0 < pt["t"] < 1.0

    def test_face_ids_label_combined_mesh(self, g2_dec):
        mesh, dec = g2_dec
        d = segmentation_dict(dec)
        combined, labels = dec.combined()
        total = sum(len(p["face_ids"]) for p in d["patches"])
        assert total == combined.n_triangles
        for p in d["patches"]:
            assert all(labels[i] == p["id"] for i in p["face_ids"][:5])

    def test_pants_has_empty_curves(self, pants_mesh):
        dec = decompose(pants_mesh)
        assert segmentation_dict(dec)["curves"] == []

    def test_file_round_trip_and_determinism(self, g2_dec, tmp_path):
        _, dec = g2_dec
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        save_segmentation(a, dec)
        save_segmentation(b, dec)
        assert a.read_bytes() == b.read_bytes()
        parsed = json.loads(a.read_text())
        assert len(parsed["patches"]) == 2

    def test_ply_output(self, g2_dec, tmp_path):
        _, dec = g2_dec
        combined, labels = dec.combined()
        p = tmp_path / "c.ply"
        save_ply(p, combined, labels)
        text = p.read_text().splitlines()
        assert text[0] == "ply"
        assert f"element vertex {combined.n_vertices}" in text
        assert f"element face {combined.n_triangles}" in text
        assert "property int patch" in text

    def test_patch_files_reload_as_pants(self, g2_dec, tmp_path):
        _, dec = g2_dec
        save_patches(tmp_path / "patches", dec)
        files = sorted(os.listdir(tmp_path / "patches"))
        assert files == ["patch_000.off", "patch_001.off"]
        for f in files:
            m = load_off(tmp_path / "patches" / f)
            assert m.validate() == SurfaceType(0, 3)


@pytest.fixture(scope="module")
def g2_off(tmp_path_factory):
    p = tmp_path_factory.mktemp("mesh") / "g2.off"
    save_off(p, synth_genus_g(2, res=16))
    return str(p)


class TestCli:
    def test_version(self, capsys):
        with pytest.raises(SystemExit) as e:
            main(["--version"])
        assert e.value.code == 0

    def test_synth_and_decompose(self, tmp_path, capsys):
        mesh_file = str(tmp_path / "g2.off")
        assert main(["synth", "--genus", "2", "--res", "16",
                     "--out", mesh_file]) == 0
        out_dir = str(tmp_path / "dec")
        assert main(["decompose", mesh_file, "--out", out_dir]) == 0
        printed = capsys.readouterr().out
        assert "patches: 2, curves: 3" in printed
        assert "timing: field" in printed
        assert "classification" in printed and "cut" in printed
        assert os.path.exists(os.path.join(out_dir, "segmentation.json"))
        assert os.path.exists(os.path.join(out_dir, "combined.ply"))
        assert os.path.exists(
            os.path.join(out_dir, "patches", "patch_000.off")
        )

    def test_reeb_algo_flag(self, g2_off, tmp_path, capsys):
        out = str(tmp_path / "r")
        assert main(["decompose", g2_off, "--algo", "reeb",
                     "--out", out]) == 0
        assert "patches: 2, curves: 3" in capsys.readouterr().out

    def test_field_z_flag(self, g2_off, tmp_path, capsys):
        out = str(tmp_path / "z")
        assert main(["decompose", g2_off, "--algo", "reeb",
                     "--field", "z", "--out", out]) == 0

    def test_field_file_flag(self, g2_off, tmp_path):
        mesh = load_off(g2_off)
        vals = "\n".join(
            repr(float(x)) for x in mesh.vertices[:, 0]
        ) + "\n"
        fpath = tmp_path / "field.txt"
        fpath.write_text(vals)
        out = str(tmp_path / "ff")
        assert main(["decompose", g2_off, "--algo", "reeb",
                     "--field", str(fpath), "--out", out]) == 0

    def test_inspect(self, g2_off, capsys):
        assert main(["inspect", g2_off]) == 0
        printed = capsys.readouterr().out
        assert "surface type: (2,0)" in printed
        assert "criticals: 1 min," in printed
        assert "saddle multiplicity total: 4" in printed
        assert "loop rank 2" in printed
        assert "graph reeb {" in printed

    def test_reeb_command(self, g2_off, tmp_path, capsys):
        out = str(tmp_path / "rg")
        assert main(["reeb", g2_off, "--out", out]) == 0
        dot = (tmp_path / "rg" / "reeb.dot").read_text()
        assert dot.startswith("graph reeb {")
        data = json.loads((tmp_path / "rg" / "reeb.json").read_text())
        assert {n["kind"] for n in data["nodes"]} >= {"min", "max"}
        for arc in data["arcs"]:
            lo, hi = arc["value_range"]
            assert lo <= hi

    def test_noise_zero_byte_identical(self, g2_off, tmp_path, capsys):
        a = str(tmp_path / "plain")
        b = str(tmp_path / "noise0")
        assert main(["decompose", g2_off, "--out", a]) == 0
        assert main(["noise", g2_off, "--noise", "0", "--seed", "9",
                     "--out", b]) == 0
        for name in ("segmentation.json", "combined.ply"):
            pa = os.path.join(a, name)
            pb = os.path.join(b, name)
            assert open(pa, "rb").read() == open(pb, "rb").read()

    def test_noise_cap(self, g2_off, tmp_path, capsys):
        assert main(["noise", g2_off, "--noise", "0.5",
                     "--out", str(tmp_path / "x")]) == 2
        assert "0.15" in capsys.readouterr().err

    def test_noise_cap_override(self, g2_off, tmp_path, capsys):
        code = main(["noise", g2_off, "--noise", "0.16",
                     "--allow-large-noise", "--seed", "4",
                     "--out", str(tmp_path / "big")])
        # may fail to decompose at extreme noise, but must not be
        # rejected as invalid input
        assert code in (0, 1)

    def test_decompose_deterministic_bytes(self, g2_off, tmp_path, capsys):
        outs = []
        for name in ("d1", "d2"):
            out = str(tmp_path / name)
            assert main(["decompose", g2_off, "--out", out]) == 0
            outs.append(
                open(os.path.join(out, "segmentation.json"), "rb").read()
            )
        assert outs[0] == outs[1]

    def test_missing_input_exit2(self, tmp_path, capsys):
        assert main(["decompose", str(tmp_path / "nope.off")]) == 2

    def test_invalid_mesh_exit2(self, tmp_path, capsys):
        p = tmp_path / "bad.off"
        p.write_text("OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n")
        assert main(["decompose", str(p)]) == 2
        err = capsys.readouterr().err
        assert "invalid input" in err
        assert "face 0" in err

    def test_chi_zero_exit1(self, tmp_path, capsys):
        from pantscut.synth import grid_torus, orient_consistently

        v, t = grid_torus(12)
        p = tmp_path / "torus.off"
        save_off(p, TriMesh(v, orient_consistently(t)))
        assert main(["decompose", str(p)]) == 1

    def test_log_env(self, g2_off, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("PANTSCUT_LOG", "DEBUG")
        assert main(["inspect", g2_off]) == 0

    def test_console_script_installed(self):
        proc = subprocess.run(
            [sys.executable, "-m", "pantscut.cli", "--version"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert proc.stdout.strip()

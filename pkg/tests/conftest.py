import numpy as np
import pytest

from pantscut import ScalarField, TriMesh, default_field, synth_genus_g
from pantscut.synth import grid_torus, orient_consistently, uv_sphere

# golden-ratio icosahedron; the classic consistently oriented face list
_PHI = (1.0 + 5.0 ** 0.5) / 2.0
ICO_VERTS = np.array(
    [
        (-1, _PHI, 0), (1, _PHI, 0), (-1, -_PHI, 0), (1, -_PHI, 0),
        (0, -1, _PHI), (0, 1, _PHI), (0, -1, -_PHI), (0, 1, -_PHI),
        (_PHI, 0, -1), (_PHI, 0, 1), (-_PHI, 0, -1), (-_PHI, 0, 1),
    ],
    dtype=float,
)
ICO_FACES = np.array(
    [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ],
    dtype=np.int64,
)


@pytest.fixture(scope="session")
def icosahedron():
    return TriMesh(ICO_VERTS.copy(), ICO_FACES.copy())


@pytest.fixture(scope="session")
def torus16():
    verts, tris = grid_torus(16)
    return TriMesh(verts, orient_consistently(tris))


@pytest.fixture(scope="session")
def torus_x_field(torus16):
    """The classical torus Morse function: height along the x axis."""
    return ScalarField(torus16, torus16.vertices[:, 0].copy())


@pytest.fixture(scope="session")
def sphere12():
    verts, tris = uv_sphere(12)
    return TriMesh(verts, orient_consistently(tris))


@pytest.fixture(scope="session")
def g2_mesh():
    mesh = synth_genus_g(2, res=24)
    mesh.validate()
    return mesh


@pytest.fixture(scope="session")
def g2_field(g2_mesh):
    return default_field(g2_mesh)


@pytest.fixture(scope="session")
def pants_mesh():
    mesh = synth_genus_g(0, res=16, boundaries=3)
    mesh.validate()
    return mesh

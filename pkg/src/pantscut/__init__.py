"""Pants decomposition of triangulated surfaces via PL Morse theory.

A surface with negative Euler characteristic is cut along disjoint
simple closed curves into patches that are all pairs of pants, i.e.
genus-0 surfaces with three boundary circles.  Cut levels come from a
discrete-harmonic (or user supplied) scalar field; curves are either
iso-level circles or edge loops through a saddle.  Two drivers are
provided: a direct sweep over critical values and one that extracts
cut positions from the Reeb graph of the field.
"""

from .errors import (
    DecompositionError,
    FieldError,
    MeshValidationError,
    PantscutError,
    UnsupportedDecomposition,
)
from .mesh import (
    SurfaceType,
    TriMesh,
    boundary_components,
    euler_characteristic,
    split_components,
    validate_mesh,
)
from .fields import (
    DirichletConstraints,
    ScalarField,
    default_extrema_constraints,
    load_field,
    mean_value_matrix,
    save_field,
    solve_boundary_aware,
    solve_harmonic,
)
from .morse import (
    CriticalReport,
    CriticalVertex,
    CutLevel,
    classify_vertex,
    classify_vertices,
    extract_level_set,
    level_from_value,
    regular_midvalues,
    saddle_loop,
)
from .cutting import (
    CutCurve,
    cut_along_iso_curves,
    cut_along_path_loop,
    slice_along_curves,
)
from .reeb import (
    ReebArc,
    ReebGraph,
    ReebNode,
    compute_reeb,
    reeb_cut_curves,
    retract_leaves,
    select_cut_points,
    smooth_degree2,
)
from .decompose import (
    PantsDecomposition,
    Patch,
    ValidationReport,
    decompose,
    default_field,
    expected_counts,
    handle_decompose,
    reeb_decompose,
    validate_decomposition,
)
from .synth import (
    cylinder,
    make_rng,
    noise_displace,
    synth_genus_g,
    theta_surface,
)
from .fileio import (
    load_mesh,
    save_mesh,
    save_patches,
    save_ply,
    save_segmentation,
    segmentation_dict,
)
from ._kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CriticalReport",
    "CriticalVertex",
    "CutCurve",
    "CutLevel",
    "DecompositionError",
    "DirichletConstraints",
    "FieldError",
    "MeshValidationError",
    "PantsDecomposition",
    "PantscutError",
    "Patch",
    "ReebArc",
    "ReebGraph",
    "ReebNode",
    "ScalarField",
    "SurfaceType",
    "TriMesh",
    "UnsupportedDecomposition",
    "ValidationReport",
    "boundary_components",
    "classify_vertex",
    "classify_vertices",
    "compute_reeb",
    "cut_along_iso_curves",
    "cut_along_path_loop",
    "cylinder",
    "decompose",
    "default_extrema_constraints",
    "default_field",
    "euler_characteristic",
    "expected_counts",
    "extract_level_set",
    "handle_decompose",
    "level_from_value",
    "load_field",
    "load_mesh",
    "make_rng",
    "mean_value_matrix",
    "noise_displace",
    "reeb_cut_curves",
    "reeb_decompose",
    "regular_midvalues",
    "retract_leaves",
    "saddle_loop",
    "save_field",
    "save_mesh",
    "save_patches",
    "save_ply",
    "save_segmentation",
    "segmentation_dict",
    "select_cut_points",
    "slice_along_curves",
    "smooth_degree2",
    "solve_boundary_aware",
    "solve_harmonic",
    "split_components",
    "synth_genus_g",
    "theta_surface",
    "validate_decomposition",
    "validate_mesh",
    "__version__",
]

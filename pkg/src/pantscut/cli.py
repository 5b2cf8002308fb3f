"""Command-line interface.

Subcommands: decompose, inspect, reeb, noise, synth.  Results land in
an output directory as segmentation JSON, a labelled PLY and per-patch
OFF files.  Timing goes to stdout only, so the written artifacts are
byte-identical across runs for a fixed seed.

Exit codes: 0 success, 1 algorithm failure, 2 invalid input.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from dataclasses import dataclass

from . import __version__
from .decompose import decompose, default_field, validate_decomposition
from .errors import MeshValidationError, PantscutError
from .fields import (
    DEFAULT_TOL,
    ScalarField,
    default_extrema_constraints,
    load_field,
    solve_boundary_aware,
    solve_harmonic,
)
from .fileio import (
    load_mesh,
    reeb_dot,
    save_mesh,
    save_patches,
    save_ply,
    save_reeb_dot,
    save_reeb_json,
    save_segmentation,
)
from .morse import classify_vertices
from .reeb import compute_reeb
from .synth import make_rng, noise_displace, synth_genus_g

log = logging.getLogger("pantscut")

NOISE_CAP = 0.15


@dataclass
class RunConfig:
    command: str
    input: str | None = None
    algorithm: str = "handle"
    field_source: str = "auto"
    tol: float = DEFAULT_TOL
    seed: int = 0
    noise_amplitude: float = 0.0
    out: str | None = None
    fmt: str = "off"
    genus: int = 2
    res: int = 24
    boundaries: int = 0
    allow_large_noise: bool = False


def build_field(mesh, surface_type, cfg):
    """Resolve --field: auto, harmonic, boundary, z, or a file path."""
    src = cfg.field_source
    if src == "auto":
        return default_field(mesh, surface_type)
    if src == "harmonic":
        return solve_harmonic(
            mesh, default_extrema_constraints(mesh), tol=cfg.tol
        )
    if src == "boundary":
        mode = (
            "one_boundary"
            if surface_type.boundary_count == 1
            else "multi_boundary"
        )
        return solve_boundary_aware(mesh, mode, tol=cfg.tol)
    if src == "z":
        return ScalarField(mesh, mesh.vertices[:, 2].copy())
    return load_field(mesh, src)


def _out_dir(cfg, suffix="pants"):
    if cfg.out:
        return cfg.out
    base = os.path.splitext(os.path.basename(cfg.input))[0]
    return f"{base}_{suffix}"


def _load(cfg):
    mesh = load_mesh(cfg.input)
    return mesh, mesh.validate()


def _run_decomposition(cfg, mesh, surface_type):
    t0 = time.perf_counter()
    field = build_field(mesh, surface_type, cfg)
    t1 = time.perf_counter()
    report = classify_vertices(field)
    t2 = time.perf_counter()
    dec = decompose(mesh, field, algorithm=cfg.algorithm)
    t3 = time.perf_counter()
    times = {
        "field": t1 - t0,
        "classification": t2 - t1,
        "cut": t3 - t2,
        "total": t3 - t0,
    }
    return dec, report, times


def _write_outputs(cfg, dec):
    out = _out_dir(cfg)
    os.makedirs(out, exist_ok=True)
    save_segmentation(os.path.join(out, "segmentation.json"), dec)
    combined, labels = dec.combined()
    save_ply(os.path.join(out, "combined.ply"), combined, labels)
    save_patches(os.path.join(out, "patches"), dec)
    return out


def _report_result(dec, times, out):
    rep = validate_decomposition(dec)
    print(f"surface type: {dec.source_type}")
    print(f"algorithm: {dec.algorithm}")
    print(f"patches: {dec.n_patches}, curves: {dec.n_curves}")
    print(
        "timing: field {field:.3f}s, classification {classification:.3f}s, "
        "cut {cut:.3f}s, total {total:.3f}s".format(**times)
    )
    print(f"output: {out}")
    if not rep.ok:
        for p in rep.problems:
            print(f"validation problem: {p}", file=sys.stderr)
        return 1
    print("validation: all patches are (0,3), counts match")
    return 0


def cmd_decompose(cfg):
    mesh, st = _load(cfg)
    dec, _, times = _run_decomposition(cfg, mesh, st)
    out = _write_outputs(cfg, dec)
    return _report_result(dec, times, out)


def cmd_noise(cfg):
    amp = cfg.noise_amplitude
    if amp < 0:
        raise MeshValidationError("noise amplitude must be non-negative")
    if amp > NOISE_CAP and not cfg.allow_large_noise:
        raise MeshValidationError(
            f"noise amplitude {amp} exceeds the {NOISE_CAP} cap "
            "(pass --allow-large-noise to override)"
        )
    mesh, st = _load(cfg)
    noisy = noise_displace(mesh, amp, make_rng(cfg.seed))
    print(f"noise: amplitude {amp} of bbox diagonal, seed {cfg.seed}")
    dec, _, times = _run_decomposition(cfg, noisy, st)
    out = _write_outputs(cfg, dec)
    return _report_result(dec, times, out)


def cmd_inspect(cfg):
    mesh, st = _load(cfg)
    print(f"surface type: {st}")
    print(
        f"V={mesh.n_vertices} E={mesh.n_edges} F={mesh.n_triangles} "
        f"chi={mesh.euler_characteristic()}"
    )
    field = build_field(mesh, st, cfg)
    report = classify_vertices(field)
    n_saddles = len(report.saddles)
    print(
        f"criticals: {report.n_min} min, {n_saddles} saddles, "
        f"{report.n_max} max"
    )
    print(f"saddle multiplicity total: {report.saddle_multiplicity_total}")
    for c in report.criticals:
        mult = f" (multiplicity {c.multiplicity})" if c.multiplicity > 1 else ""
        print(f"  vertex {c.vertex}: {c.kind}{mult}, value {c.value!r}")
    graph = compute_reeb(field, report)
    print(
        f"reeb: {graph.n_nodes} nodes, {graph.n_arcs} arcs, "
        f"loop rank {graph.loop_rank()}"
    )
    sys.stdout.write(reeb_dot(graph))
    return 0


def cmd_reeb(cfg):
    mesh, st = _load(cfg)
    field = build_field(mesh, st, cfg)
    graph = compute_reeb(field)
    out = _out_dir(cfg, "reeb")
    os.makedirs(out, exist_ok=True)
    save_reeb_json(os.path.join(out, "reeb.json"), graph)
    save_reeb_dot(os.path.join(out, "reeb.dot"), graph)
    print(
        f"reeb: {graph.n_nodes} nodes, {graph.n_arcs} arcs, "
        f"loop rank {graph.loop_rank()}"
    )
    print(f"output: {out}")
    return 0


def cmd_synth(cfg):
    mesh = synth_genus_g(cfg.genus, res=cfg.res, boundaries=cfg.boundaries)
    st = mesh.validate()
    out = cfg.out or f"genus{cfg.genus}b{cfg.boundaries}.{cfg.fmt}"
    save_mesh(out, mesh)
    print(f"wrote {out}: type {st}, V={mesh.n_vertices} F={mesh.n_triangles}")
    return 0


DISPATCH = {
    "decompose": cmd_decompose,
    "inspect": cmd_inspect,
    "reeb": cmd_reeb,
    "noise": cmd_noise,
    "synth": cmd_synth,
}


def make_parser():
    p = argparse.ArgumentParser(
        prog="pantscut",
        description="Cut surfaces of negative Euler characteristic "
        "into pairs of pants.",
    )
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, needs_input=True):
        if needs_input:
            sp.add_argument("input", help="mesh file (.off or .obj)")
        sp.add_argument(
            "--field",
            default="auto",
            help="scalar field: auto, harmonic, boundary, z, "
            "or a path to one value per vertex (default: auto)",
        )
        sp.add_argument("--tol", type=float, default=DEFAULT_TOL,
                        help="harmonic solver tolerance")
        sp.add_argument("--out", help="output directory")

    d = sub.add_parser("decompose", help="cut a mesh into pants patches")
    common(d)
    d.add_argument("--algo", choices=("handle", "reeb"), default="handle")

    n = sub.add_parser("noise", help="perturb vertices, then decompose")
    common(n)
    n.add_argument("--algo", choices=("handle", "reeb"), default="handle")
    n.add_argument("--seed", type=int, default=0)
    n.add_argument("--noise", type=float, default=0.0,
                   help="amplitude as a fraction of the bbox diagonal")
    n.add_argument("--allow-large-noise", action="store_true")

    i = sub.add_parser("inspect", help="print type, criticals and Reeb graph")
    common(i)

    r = sub.add_parser("reeb", help="write the Reeb graph as JSON and DOT")
    common(r)

    s = sub.add_parser("synth", help="generate a synthetic (g,b) mesh")
    s.add_argument("--genus", type=int, default=2)
    s.add_argument("--res", type=int, default=24)
    s.add_argument("--boundaries", type=int, default=0)
    s.add_argument("--out", help="output file (default: genus<g>b<b>.<fmt>)")
    s.add_argument("--format", dest="fmt", choices=("off", "obj"),
                   default="off")
    return p


def _config_from_args(args):
    cfg = RunConfig(command=args.command)
    for name in (
        "input", "tol", "seed", "out", "fmt", "genus", "res",
        "boundaries", "allow_large_noise",
    ):
        if hasattr(args, name):
            setattr(cfg, name, getattr(args, name))
    if hasattr(args, "algo"):
        cfg.algorithm = args.algo
    if hasattr(args, "field"):
        cfg.field_source = args.field
    if hasattr(args, "noise"):
        cfg.noise_amplitude = args.noise
    return cfg


def main(argv=None):
    level = os.environ.get("PANTSCUT_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))
    args = make_parser().parse_args(argv)
    cfg = _config_from_args(args)
    try:
        return DISPATCH[cfg.command](cfg)
    except MeshValidationError as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PantscutError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

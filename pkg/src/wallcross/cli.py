"""Command-line entry point.

Every subcommand prints (or writes with --out) a JSON document that is
validated against its schema before it is emitted; ``plot`` emits SVG.
Exit codes: 0 success, 1 verification failure, 2 configuration error.
Rational numbers are written as "p/q" strings, integers as JSON integers.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

import jsonschema

from . import cone_geometry as cg
from . import fock_voa as fv
from . import k3_stability as k3
from . import quiver_git as qg
from .lattice_core import (
    LatticeError,
    MukaiVector,
    SurfaceConfig,
    as_fraction,
    format_rational,
    load_surface_config,
    signature,
    standard_lattice,
    standard_surface,
)


class ConfigError(ValueError):
    pass


class VerificationFailure(RuntimeError):
    """Raised with a JSON-able payload when a check ran but did not pass."""

    def __init__(self, payload: dict) -> None:
        super().__init__("verification failed")
        self.payload = payload


# ---------------------------------------------------------------------------
# schemas

_RAT = {"oneOf": [{"type": "integer"}, {"type": "string", "pattern": r"^-?\d+(/\d+)?$"}]}
_VEC = {"type": "array", "items": _RAT}
_INTVEC = {"type": "array", "items": {"type": "integer"}}
_MUKAI = {"type": "array", "minItems": 3, "maxItems": 3,
          "prefixItems": [_RAT, _VEC, _RAT]}

SCHEMAS: dict[str, dict] = {
    "lattice": {
        "type": "object",
        "required": ["name", "rank", "gram", "even", "signature"],
        "properties": {
            "name": {"type": "string"},
            "rank": {"type": "integer"},
            "gram": {"type": "array", "items": _INTVEC},
            "even": {"type": "boolean"},
            "signature": {"type": "array", "items": {"type": "integer"}, "minItems": 3, "maxItems": 3},
        },
    },
    "quiver-walls": {
        "type": "object",
        "required": ["quiver", "v", "w", "positive_roots"],
        "properties": {
            "quiver": {"type": "string"},
            "v": _INTVEC,
            "w": _INTVEC,
            "positive_roots": {"type": "array", "items": _INTVEC},
            "points": {"type": "integer"},
            "genuine_walls": {"type": "array", "items": _INTVEC},
            "excluded": {"type": "array", "items": _INTVEC},
            "hilb_chamber": _VEC,
        },
    },
    "k3-walls": {
        "type": "object",
        "required": ["surface", "n", "v", "walls"],
        "properties": {
            "surface": {"type": "string"},
            "n": {"type": "integer"},
            "v": _MUKAI,
            "walls": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["kind", "v", "w"],
                    "properties": {"kind": {"enum": ["hilbert-chow", "curve-wall", "boundary"]},
                                   "v": _MUKAI, "w": _MUKAI, "curve": _VEC, "k": {"type": "integer"}},
                },
            },
        },
    },
    "ext-quiver": {
        "type": "object",
        "required": ["adjacency", "dims", "framing", "loops", "trivial_factor_dim"],
        "properties": {
            "adjacency": {"type": "array", "items": _INTVEC},
            "dims": _INTVEC,
            "framing": _INTVEC,
            "loops": _INTVEC,
            "trivial_factor_dim": {"type": "integer"},
        },
    },
    "corner-solve": {
        "type": "object",
        "required": ["surface", "v", "roots", "k", "beta", "omega", "certified"],
        "properties": {
            "surface": {"type": "string"},
            "v": _MUKAI,
            "roots": {"type": "array", "items": _VEC},
            "k": _INTVEC,
            "beta": _VEC,
            "omega": _VEC,
            "certified": {"type": "boolean"},
        },
    },
    "chambers-match": {
        "type": "object",
        "required": ["surface", "collection", "n", "matches", "faces", "chambers", "walls"],
        "properties": {
            "surface": {"type": "string"},
            "collection": {"type": "string"},
            "n": {"type": "integer"},
            "matches": {"type": "boolean"},
            "faces": {"type": "integer"},
            "chambers": {"type": "integer"},
            "orientation": {"oneOf": [{"type": "null"}, _INTVEC]},
            "reason": {"type": "string"},
            "walls": {"type": "array", "items": {"type": "object"}},
        },
    },
    "voa-verify": {
        "type": "object",
        "required": ["lattice", "truncation", "ok", "results"],
        "properties": {
            "lattice": {"type": "string"},
            "truncation": {"type": "integer"},
            "ok": {"type": "boolean"},
            "results": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["relation", "lattice", "degree", "status", "checked"],
                    "properties": {
                        "relation": {"type": "string"},
                        "lattice": {"type": "string"},
                        "degree": {"type": "integer"},
                        "status": {"enum": ["pass", "fail"]},
                        "checked": {"type": "integer"},
                        "witness": {"type": "object"},
                    },
                },
            },
        },
    },
    "plot-json": {
        "type": "array",
        "items": {
            "type": "object",
            "required": ["label", "tag", "p0", "p1", "full"],
            "properties": {"label": {"type": "string"}, "tag": {"type": "string"},
                           "p0": _VEC, "p1": _VEC, "full": {"type": "boolean"}},
        },
    },
    "report": {
        "type": "object",
        "required": ["ok", "runs"],
        "properties": {
            "ok": {"type": "boolean"},
            "runs": {
                "type": "array",
                "items": {"type": "object", "required": ["command", "exit", "result"]},
            },
        },
    },
}

# configuration accepted by ``report --config``
RUN_CONFIG_SCHEMA = {
    "type": "object",
    "required": ["runs"],
    "additionalProperties": False,
    "properties": {
        "runs": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["command"],
                "additionalProperties": False,
                "properties": {
                    "command": {"enum": ["lattice", "quiver-walls", "k3-walls", "ext-quiver",
                                         "corner-solve", "chambers-match", "voa-verify"]},
                    "args": {"type": "array", "items": {"type": "string"}},
                },
            },
        }
    },
}

# surface configs read from a file
SURFACE_SCHEMA = {
    "type": "object",
    "required": ["gram"],
    "properties": {
        "gram": {"type": "array", "items": _INTVEC},
        "labels": {"type": "array", "items": {"type": "string"}},
        "curves": {"type": "object", "additionalProperties": _INTVEC},
        "collections": {"type": "object",
                        "additionalProperties": {"type": "array", "items": {"type": "string"}}},
        "positive_class": _INTVEC,
    },
}


def validate(kind: str, data: object) -> None:
    jsonschema.validate(data, SCHEMAS[kind])


# ---------------------------------------------------------------------------
# parsing helpers


def _rat(q: Fraction) -> int | str:
    q = as_fraction(q)
    return int(q) if q.denominator == 1 else format_rational(q)


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip() != "")
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated integers, got {text!r}") from exc


def _rats(text: str) -> tuple[Fraction, ...]:
    try:
        return tuple(Fraction(x.strip()) for x in text.split(",") if x.strip() != "")
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated rationals, got {text!r}") from exc


def _dimension(Q: qg.Quiver, text: str) -> tuple[int, ...]:
    """'2,2' or 'kdelta' (k times the null root)."""
    t = text.strip()
    if t.endswith("delta"):
        head = t[: -len("delta")]
        k = int(head) if head else 1
        delta = qg.affine_root_system(Q).null_root
        return tuple(k * d for d in delta)
    return _ints(t)


def _surface(name: str) -> SurfaceConfig:
    path = Path(name)
    if path.suffix == ".json":
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read surface config {name}: {exc}") from exc
        jsonschema.validate(data, SURFACE_SCHEMA)
        return load_surface_config(path)
    return standard_surface(name)


def _collection(S: SurfaceConfig, text: str | None):
    if text is None:
        return None
    if text in S.collections:
        return text
    names = tuple(x.strip() for x in text.split(",") if x.strip())
    for n in names:
        if n not in S.curves:
            raise ConfigError(f"unknown curve or collection {n!r}")
    return names


# ---------------------------------------------------------------------------
# subcommands


def cmd_lattice(args: argparse.Namespace) -> dict:
    L = standard_lattice(args.name)
    return {"name": args.name, "rank": L.rank, "gram": [list(r) for r in L.gram],
            "even": all(L.gram[i][i] % 2 == 0 for i in range(L.rank)),
            "signature": list(signature(L))}


def cmd_quiver_walls(args: argparse.Namespace) -> dict:
    Q = qg.Quiver.from_name(args.quiver)
    v = _dimension(Q, args.v)
    w = _ints(args.w) if args.w else qg.affine_framing(Q)
    out: dict[str, object] = {"quiver": args.quiver, "v": list(v), "w": list(w),
                              "positive_roots": [list(r) for r in qg.bounded_positive_roots(Q, v)]}
    if Q.n_vertices > 1 and tuple(w) == qg.affine_framing(Q):
        n = qg.num_points(Q, v)
        out["points"] = n
        if n >= 1:
            walls = qg.shifted_genuine_walls(Q, v)
            out["genuine_walls"] = [list(r) for r in walls]
            canon = {qg.canonical_normal(r) for r in walls}
            out["excluded"] = [list(r) for r in qg.bounded_positive_roots(Q, v)
                               if qg.canonical_normal(r) not in canon]
        out["hilb_chamber"] = [_rat(t) for t in qg.hilb_chamber_rep(Q, v)]
    return out


def cmd_k3_walls(args: argparse.Namespace) -> dict:
    S = _surface(args.surface)
    coll = _collection(S, args.collection)
    if args.twist:
        walls = k3.twisted_walls(S, _rats(args.twist), args.n, coll)
    else:
        walls = k3.hilb_walls(S, args.n, coll)
    return {"surface": args.surface, "n": args.n, "v": k3.mukai_json(walls[0].v),
            "walls": [w.to_dict() for w in walls]}


def _decomp(text: str) -> list[tuple[tuple[int, ...], int]]:
    out = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        beta, _, mult = part.partition(":")
        out.append((_ints(beta), int(mult) if mult else 1))
    return out


def cmd_ext_quiver(args: argparse.Namespace) -> dict:
    Q = qg.Quiver.from_name(args.quiver)
    v = _dimension(Q, args.v)
    w = _ints(args.w) if args.w else qg.affine_framing(Q)
    Qinf, total = qg.crawley_boevey(Q, v, w)
    data = qg.ext_quiver(Qinf, total, _decomp(args.decomp), _ints(args.beta_inf))
    return {"adjacency": [list(r) for r in data.quiver.adjacency], "dims": list(data.dims),
            "framing": list(data.framing), "loops": list(data.loops),
            "trivial_factor_dim": data.trivial_factor_dim}


def cmd_corner_solve(args: argparse.Namespace) -> dict:
    S = _surface(args.surface)
    coll = _collection(S, args.collection)
    R = S.collection(coll)
    k = _ints(args.k)
    D = _rats(args.D) if args.D else (Fraction(0),) * S.rank
    s = as_fraction(Fraction(args.s))
    lp = None
    if args.N is not None:
        lp = k3.LimitParams(Fraction(args.N), Fraction(args.xi), Fraction(args.V), coll)
    try:
        kp = k3.solve_corner_stability(S, D, s, R, k, lp, collection=coll)
    except k3.StabilityError as exc:
        raise VerificationFailure({"surface": args.surface, "error": str(exc)}) from exc
    return {"surface": args.surface, "v": k3.mukai_json(MukaiVector(1, D, s)),
            "roots": [[_rat(a) for a in C] for C in R], "k": list(k),
            "beta": [_rat(a) for a in kp.beta], "omega": [_rat(a) for a in kp.omega],
            "certified": k3.corner_certificate(S, D, s, R, k, kp)}


def cmd_chambers_match(args: argparse.Namespace) -> dict:
    S = _surface(args.surface)
    model = cg.HilbNSModel(S, args.n)
    walls = cg.walls_through_symn_point(model, args.collection)
    kind, rank = _collection_type(S, args.collection)
    res = cg.arrangement_matches(model, walls, cg.affine_arrangement(kind, rank, args.n))
    out = {"surface": args.surface, "collection": args.collection, "n": args.n,
           "matches": res.matches, "faces": res.faces, "chambers": res.chambers,
           "orientation": list(res.orientation) if res.orientation is not None else None,
           "reason": res.reason, "walls": [{"label": w.tag(), "w": k3.mukai_json(w.mukai)}
                                            for w in walls]}
    if not res.matches:
        raise VerificationFailure(out)
    return out


def _collection_type(S: SurfaceConfig, name: str) -> tuple[str, int]:
    """Type A_r for a chain of curves (the only contractible type in the catalogue surfaces)."""
    curves = S.collection(name)
    r = len(curves)
    edges = sum(1 for i in range(r) for j in range(i + 1, r) if S.ns.pair(curves[i], curves[j]) == 1)
    if r == 0 or edges != r - 1:
        raise ConfigError(f"collection {name!r} is not a type A chain")
    return "A", r


def cmd_voa_verify(args: argparse.Namespace) -> dict:
    voa = fv.LatticeVOA(fv.vertex_lattice(args.lattice))
    iso = [_ints(x) for x in args.isotropic] if args.isotropic else []
    if not iso and args.lattice in fv.SURFACE_LATTICES and voa.rank == 2:
        # the fibre class of the catalogue elliptic lattices sits first
        if voa.lattice.pair((1, 0), (1, 0)) == 0:
            iso = [(1, 0)]
    rels = args.relations.split(",") if args.relations else None
    report = fv.relation_suite(voa, args.degree, modes=args.modes, marker_radius=args.markers,
                               isotropic=iso, relations=rels)
    if args.matrix_dir:
        _dump_matrices(voa, Path(args.matrix_dir), args.degree)
    out = json.loads(report.to_json())
    if not report.ok:
        raise VerificationFailure(out)
    return out


def _dump_matrices(voa: fv.LatticeVOA, root: Path, degree: int) -> None:
    """x_{−1}(±bᵢ) on every component (0-marker) up to the given degree, as CSV."""
    root.mkdir(parents=True, exist_ok=True)
    zero = (0,) * voa.rank
    for i, b in enumerate(voa.lattice.basis()):
        for sgn, tag in ((1, "p"), (-1, "m")):
            a = tuple(sgn * x for x in b)
            for k in range(degree + 1):
                tg, tk, rows = fv.component_matrix(voa, [("x", a, -1)], zero, k)
                if tg is None:
                    continue
                name = f"x-1_{tag}{i}_deg{k}_to_{'_'.join(map(str, tg))}_deg{tk}.csv"
                (root / name).write_text(fv.matrix_csv(rows), encoding="utf-8")


def cmd_plot(args: argparse.Namespace) -> str:
    if not args.quiver.startswith("affine-"):
        raise ConfigError("plot needs an affine quiver such as affine-A2")
    body = args.quiver[len("affine-"):]
    kind, rank = body[0], int(body[1:])
    Q = qg.Quiver.from_name(args.quiver)
    v = _dimension(Q, args.v)
    n = qg.num_points(Q, v)
    delta = qg.affine_root_system(Q).null_root
    if tuple(v) != tuple(n * d for d in delta):
        raise ConfigError("plot supports dimension vectors n·delta")
    if args.slice != "level1":
        raise ConfigError(f"unknown slice {args.slice!r}")
    spec = cg.level_one_slice(kind, rank, Fraction(args.extent))
    segs = cg.slice_segments(spec, cg.quiver_slice_walls(kind, rank, n))
    if args.format == "json":
        text = cg.segments_json(segs)
        validate("plot-json", json.loads(text))
        return text
    return cg.segments_svg(segs, spec.extent)


def cmd_report(args: argparse.Namespace) -> dict:
    try:
        cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read run config: {exc}") from exc
    try:
        jsonschema.validate(cfg, RUN_CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"run config: {exc.message}") from exc
    runs = []
    for item in cfg["runs"]:
        argv = [item["command"], *item.get("args", [])]
        code, result = _dispatch(argv)
        if code == 2:
            raise ConfigError(f"run {argv}: {result}")
        runs.append({"command": item["command"], "args": item.get("args", []),
                     "exit": code, "result": result})
    out = {"ok": all(r["exit"] == 0 for r in runs), "runs": runs}
    if not out["ok"]:
        validate("report", out)
        raise VerificationFailure(out)
    return out


COMMANDS: dict[str, Callable[[argparse.Namespace], object]] = {
    "lattice": cmd_lattice,
    "quiver-walls": cmd_quiver_walls,
    "k3-walls": cmd_k3_walls,
    "ext-quiver": cmd_ext_quiver,
    "corner-solve": cmd_corner_solve,
    "chambers-match": cmd_chambers_match,
    "voa-verify": cmd_voa_verify,
    "plot": cmd_plot,
    "report": cmd_report,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # type: ignore[override]
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="wallcross", description="Exact wall and chamber computations.")
    p.add_argument("--out", help="write the output here instead of stdout")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("lattice", help="Gram matrix and signature of a catalogue lattice")
    s.add_argument("--name", required=True)

    s = sub.add_parser("quiver-walls", help="bounded positive roots and genuine walls")
    s.add_argument("--quiver", required=True)
    s.add_argument("--v", required=True, help="dimension vector, e.g. 2,2 or 3delta")
    s.add_argument("--w", help="framing vector (default: affine framing)")

    s = sub.add_parser("k3-walls", help="walls for the Hilbert scheme of an elliptic K3")
    s.add_argument("--surface", default="elliptic", help="catalogue name or a .json config")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--collection", help="collection name or comma-separated curve names")
    s.add_argument("--twist", help="divisor D for v ⊗ O(D)")

    s = sub.add_parser("ext-quiver", help="local quiver of a polystable point")
    s.add_argument("--quiver", required=True)
    s.add_argument("--v", required=True)
    s.add_argument("--w")
    s.add_argument("--decomp", required=True, help="'b0,b1,..:mult;...' over the framed quiver")
    s.add_argument("--beta-inf", required=True, dest="beta_inf")

    s = sub.add_parser("corner-solve", help="a stability condition on all walls of a corner")
    s.add_argument("--surface", default="elliptic")
    s.add_argument("--collection", required=True)
    s.add_argument("--k", required=True, help="one integer per curve of the collection")
    s.add_argument("--D", help="twist divisor (default 0)")
    s.add_argument("--s", required=True, help="last Mukai coordinate of v = (1, D, s)")
    s.add_argument("--N", help="limit-region bound N (enables the region test)")
    s.add_argument("--xi", default="1/2")
    s.add_argument("--V", default="10")

    s = sub.add_parser("chambers-match", help="face poset near Sym^n against the affine arrangement")
    s.add_argument("--surface", default="elliptic")
    s.add_argument("--collection", required=True)
    s.add_argument("--n", type=int, required=True)

    s = sub.add_parser("voa-verify", help="exact relation checks in the lattice vertex algebra")
    s.add_argument("--lattice", required=True)
    s.add_argument("--degree", type=int, required=True)
    s.add_argument("--modes", type=int, default=2)
    s.add_argument("--markers", type=int, default=1, help="lattice marker box radius")
    s.add_argument("--isotropic", action="append", help="isotropic class to test, repeatable")
    s.add_argument("--relations", help="comma-separated subset of hx,xx,serre,isotropic")
    s.add_argument("--matrix-dir", dest="matrix_dir", help="also dump x_{-1} matrices as CSV")

    s = sub.add_parser("plot", help="SVG of a 2D slice of the wall arrangement")
    s.add_argument("--quiver", required=True)
    s.add_argument("--v", required=True)
    s.add_argument("--slice", default="level1")
    s.add_argument("--extent", default="3")
    s.add_argument("--format", choices=["svg", "json"], default="svg")

    s = sub.add_parser("report", help="run a JSON list of subcommands and collect the results")
    s.add_argument("--config", required=True)
    return p


def _dispatch(argv: Sequence[str]) -> tuple[int, object]:
    """(exit code, result); results are JSON-able (or SVG text for plot)."""
    try:
        args = build_parser().parse_args(list(argv))
        result = COMMANDS[args.command](args)
        if isinstance(result, dict):
            validate(args.command, result)
        return 0, result
    except VerificationFailure as exc:
        return 1, exc.payload
    except (ConfigError, LatticeError, qg.QuiverError, fv.VOAError, cg.ConeError,
            k3.StabilityError, jsonschema.ValidationError, ValueError) as exc:
        msg = exc.message if isinstance(exc, jsonschema.ValidationError) else str(exc)
        return 2, msg


def run(argv: Sequence[str]) -> int:
    argv = list(argv)
    out_path = None
    if "--out" in argv:
        i = argv.index("--out")
        if i + 1 >= len(argv):
            print("error: --out needs a path", file=sys.stderr)
            return 2
        out_path = argv[i + 1]
        del argv[i : i + 2]
    code, result = _dispatch(argv)
    if code == 2:
        print(f"error: {result}", file=sys.stderr)
        return 2
    text = result if isinstance(result, str) else json.dumps(result, sort_keys=True) + "\n"
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()

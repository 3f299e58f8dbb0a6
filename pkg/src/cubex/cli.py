"""Deterministic experiment runner.

    cubex <command> [--manifest FILE] [--seed S] [--out DIR] [flags]

A manifest is a JSON object ``{"command": ..., "params": {...},
"limits": {...}, "seed": ...}``; per-command flags mirror the params and
override the manifest.  Each run prints one JSON record to stdout.  With
``--out`` it also writes ``<command>.json``, plus ``<command>.csv`` for
table commands.  Every artifact carries the SHA-256 of the resolved
manifest, and none contains a float.

Exit codes: 0 ok, 2 invalid input (error record on stderr), 3 refused by a
resource limit, 4 internal error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io as _io
import json
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import boolfn, constructions, cube, dmt, fieldfn, joinings, measures, testability
from .cube import Config, TooLargeError
from .io import ParseError, config_to_str, format_fraction, load_measure, parse_fraction, save_measure

EXIT_OK, EXIT_INVALID, EXIT_LIMIT, EXIT_INTERNAL = 0, 2, 3, 4

DEFAULT_LIMITS = {"max_support": 200_000, "max_group_order": 50_000}


class ValidationError(ValueError):
    pass


def _ints(text) -> list[int]:
    if isinstance(text, list):
        return [int(v) for v in text]
    return [int(v) for v in str(text).split(",") if v.strip()]


def _rationals(text) -> list[Fraction]:
    if isinstance(text, list):
        return [parse_fraction(v) for v in text]
    return [parse_fraction(v) for v in str(text).split(",") if v.strip()]


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    if str(text).lower() in ("1", "true", "yes"):
        return True
    if str(text).lower() in ("0", "false", "no"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


TYPES = {
    "int": int,
    "rational": parse_fraction,
    "ints": _ints,
    "rationals": _rationals,
    "str": str,
    "bool": _bool,
}

# command -> {param: (type, default, help)}; default None means required
COMMANDS: dict[str, dict[str, tuple]] = {
    "group": {"n": ("int", 3, "cube dimension")},
    "faces": {"n": ("int", 3, "cube dimension"), "r": ("int", 1, "face dimension")},
    "anf": {"n": ("int", None, "dimension"), "table": ("str", None, "truth table, hex")},
    "omega": {"n": ("int", 4, "dimension (exhaustive, <= 4)")},
    "rm-distance": {
        "n": ("int", None, "dimension"),
        "r": ("int", None, "degree bound"),
        "table": ("str", None, "truth table, hex"),
    },
    "field-search": {
        "q": ("int", 3, "field size"),
        "d": ("int", 2, "dimension"),
        "r": ("int", 2, "cube dimension"),
        "exhaustive": ("bool", True, "scan every function"),
        "samples": ("int", 0, "kernel samples (needs --seed)"),
        "signed": ("bool", False, "alternating instead of plain sums"),
    },
    "hyperplane": {
        "n": ("int", 4, "dimension"),
        "p": ("rational", "1/8", "coordinate density"),
        "N": ("int", 3, "subcube dimension"),
        "save": ("str", "", "write the measure to this file"),
    },
    "walk": {
        "factors": ("ints", None, "cyclic factors of U"),
        "nu": ("rationals", None, "step law over U, index order"),
        "n": ("int", 2, "dimension"),
        "save": ("str", "", "write the measure to this file"),
    },
    "nu-check": {
        "factors": ("ints", None, "cyclic factors of U"),
        "nu": ("rationals", None, "step law over U, index order"),
    },
    "mixture": {
        "mu1": ("str", None, "measure file"),
        "mu2": ("str", None, "measure file"),
        "p": ("rational", "1/16", "hyperplane density"),
        "face": ("ints", [], "free coordinates of J (default: all)"),
    },
    "dbar": {
        "mu": ("str", None, "measure file"),
        "nu": ("str", None, "measure file"),
        "vertex": ("int", 0, "reference vertex"),
    },
    "decompose": {"mu": ("str", None, "measure file")},
    "testability": {
        "r": ("int", 1, "degree threshold"),
        "J": ("int", 4, "face dimension"),
        "ns": ("ints", "6,7,8,9,10,11,12,13,14,15,16", "dimensions"),
        "trials": ("int", 0, "Monte Carlo trials per row (needs --seed)"),
    },
    "dmt": {
        "kind": ("str", "hypergraph", "hypergraph or cube"),
        "ns": ("ints", "4,5,6", "dimensions"),
        "k": ("int", 2, "hyperedge size"),
        "trials": ("int", 0, "sampled pairs instead of exhaustive (needs --seed)"),
    },
}

TABLE_COMMANDS = {"faces", "testability", "dmt"}
SAMPLED = {"field-search": "samples", "testability": "trials", "dmt": "trials"}


def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cubex", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, params in COMMANDS.items():
        p = sub.add_parser(name)
        p.add_argument("--manifest", help="JSON manifest")
        p.add_argument("--seed", type=int, help="RNG seed (u64)")
        p.add_argument("--out", help="report directory")
        p.add_argument("--max-support", type=int, dest="max_support")
        p.add_argument("--max-group-order", type=int, dest="max_group_order")
        for pname, (_, _, hlp) in params.items():
            p.add_argument(_flag(pname), dest=f"p_{pname}", metavar=pname.upper(), help=hlp)
    return parser


def resolve(command: str, args: argparse.Namespace) -> dict:
    """Merge manifest, flags and defaults into a validated manifest dict."""
    schema = COMMANDS[command]
    raw: dict = {}
    limits = dict(DEFAULT_LIMITS)
    seed = None
    if args.manifest:
        try:
            doc = json.loads(Path(args.manifest).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise ValidationError(f"cannot read manifest: {e}") from None
        if not isinstance(doc, dict):
            raise ValidationError("manifest must be a JSON object")
        if doc.get("command", command) != command:
            raise ValidationError(f"manifest is for {doc['command']!r}, not {command!r}")
        unknown = set(doc) - {"command", "params", "limits", "seed"}
        if unknown:
            raise ValidationError(f"unknown manifest fields {sorted(unknown)}")
        raw.update(doc.get("params", {}))
        for key, val in doc.get("limits", {}).items():
            if key not in limits:
                raise ValidationError(f"unknown limit {key!r}")
            limits[key] = int(val)
        seed = doc.get("seed")
    for pname in schema:
        val = getattr(args, f"p_{pname}")
        if val is not None:
            raw[pname] = val
    for key in ("max_support", "max_group_order"):
        if getattr(args, key) is not None:
            limits[key] = getattr(args, key)
    if args.seed is not None:
        seed = args.seed
    unknown = set(raw) - set(schema)
    if unknown:
        raise ValidationError(f"unknown parameters {sorted(unknown)} for {command}")
    params = {}
    for pname, (tname, default, _) in schema.items():
        val = raw.get(pname, default)
        if val is None:
            raise ValidationError(f"missing required parameter {pname!r}")
        try:
            params[pname] = TYPES[tname](val)
        except (TypeError, ValueError) as e:
            raise ValidationError(f"bad value for {pname!r}: {e}") from None
    if seed is not None:
        seed = int(seed)
        if not 0 <= seed < 1 << 64:
            raise ValidationError("seed must be an unsigned 64-bit integer")
    if command in SAMPLED and params[SAMPLED[command]] > 0 and seed is None:
        raise ValidationError(f"{command} with sampling requires --seed")
    return {"command": command, "params": params, "limits": limits, "seed": seed}


def _canonical(obj):
    if isinstance(obj, Fraction):
        return format_fraction(obj)
    if isinstance(obj, Config):
        return config_to_str(obj)
    if isinstance(obj, dict):
        return {str(k): _canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canonical(v) for v in obj]
    if isinstance(obj, float):
        raise TypeError("floats are not allowed in reports")
    return obj


def manifest_hash(manifest: dict) -> str:
    text = json.dumps(_canonical(manifest), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def bundled(name: str) -> Path:
    return Path(str(resources.files("cubex") / "data" / name))


def _measure(path: str) -> measures.ExactMeasure:
    """Load a measure file; ``@name`` refers to a bundled file."""
    p = bundled(path[1:]) if path.startswith("@") else Path(path)
    try:
        return load_measure(p)
    except OSError as e:
        raise ValidationError(f"cannot read measure file: {e}") from None


def _limit(value: int, limit: int, what: str) -> None:
    if value > limit:
        raise TooLargeError(f"{what} {value} exceeds limit {limit}")


# -- commands ------------------------------------------------------------------


def cmd_group(p, lim, seed):
    n = p["n"]
    _limit(cube.group_order(n), lim["max_group_order"], "group order")
    group = cube.enumerate_group(n)
    rec = {"n": n, "order": len(group), "expected": cube.group_order(n)}
    if n <= 4:
        pts = range(1 << n)
        tables = {g.table() for g in group}
        rec["distinct_action_tables"] = len(tables)
        rec["preserves_hamming"] = all(
            cube.hamming(g(x), g(y)) == cube.hamming(x, y) for g in group for x in pts for y in pts
        )
        rec["closed_under_compose"] = all(
            cube.compose(g, h).table() in tables for g in group for h in group
        )
    return rec, None


def cmd_faces(p, lim, seed):
    n, r = p["n"], p["r"]
    faces = cube.enumerate_faces(n, r)
    rows = [
        {"free": " ".join(map(str, f.free_coords)), "base": f.base, "points": " ".join(map(str, f.points()))}
        for f in faces
    ]
    return {"n": n, "r": r, "faces": len(faces), "expected": cube.face_count(n, r)}, rows


def _boolfn(p) -> boolfn.BoolFn:
    try:
        return boolfn.BoolFn.from_hex(p["n"], p["table"])
    except ValueError as e:
        raise ValidationError(f"bad truth table: {e}") from None


def cmd_anf(p, lim, seed):
    g = _boolfn(p)
    u = boolfn.mobius_inverse(g)
    return {
        "n": g.n,
        "table": g.to_hex(),
        "anf": format(u.coeffs, f"0{max(1, (1 << g.n) // 4)}x"),
        "degree": boolfn.anf_degree(u),
        "monomials": [list(m) for m in u.support()],
        "round_trip": boolfn.mobius_forward(u) == g,
    }, None


def cmd_omega(p, lim, seed):
    return boolfn.verify_omega_threshold(p["n"]), None


def cmd_rm_distance(p, lim, seed):
    g = _boolfn(p)
    dist = boolfn.rm_distance(g, p["r"])
    return {"n": g.n, "r": p["r"], "distance": dist, "rel_distance": Fraction(dist, 1 << g.n)}, None


def cmd_field_search(p, lim, seed):
    q, d = p["q"], p["d"]
    exhaustive = p["exhaustive"] and q ** (q**d) <= fieldfn.MAX_EXHAUSTIVE
    rep = fieldfn.field_search(q, d, p["r"], exhaustive, p["samples"], seed, p["signed"])
    rep["exhaustive_run"] = exhaustive
    return rep, None


def _decomp(mu):
    if not measures.is_invariant(mu):
        return None
    return {config_to_str(c): w for c, w in measures.ergodic_decompose(mu).terms}


def cmd_hyperplane(p, lim, seed):
    params = constructions.HyperplaneParams(p["n"], p["p"])
    _limit(1 << (p["n"] + 1), lim["max_support"], "support size")
    if not 0 <= p["N"] <= p["n"]:
        raise ValidationError("N must lie in [0, n]")
    mu = constructions.hyperplane_measure(params)
    if p["save"]:
        save_measure(mu, p["save"])
    closed = constructions.marginal_allzero_prob(params, p["N"])
    zero = constructions.constant_pattern_mass(mu, p["N"], 0)
    one = constructions.constant_pattern_mass(mu, p["N"], 1)
    return {
        "n": p["n"],
        "p": p["p"],
        "N": p["N"],
        "support": len(mu),
        "invariant": measures.is_invariant(mu),
        "allzero_closed_form": closed,
        "allzero_enumerated": zero,
        "allone_enumerated": one,
        "agree": closed == zero == one,
        "decomposition": _decomp(mu),
    }, None


def _group_nu(p):
    try:
        group = constructions.FiniteAbelianGroup(tuple(p["factors"]))
        nu = constructions._check_nu(group, p["nu"])
    except ValueError as e:
        raise ValidationError(str(e)) from None
    return group, nu


def cmd_walk(p, lim, seed):
    group, nu = _group_nu(p)
    steps = sum(1 for x in nu if x)
    _limit(group.order * steps ** p["n"], lim["max_support"], "walk outcomes")
    mu = constructions.random_walk_measure(constructions.WalkParams(group, nu, p["n"]))
    if p["save"]:
        save_measure(mu, p["save"])
    sym = constructions.check_nu_symmetry(group, nu)
    inv = measures.is_invariant(mu)
    return {
        "factors": list(group.factors),
        "nu": list(nu),
        "n": p["n"],
        "support": len(mu),
        "nu_symmetric": sym,
        "invariant": inv,
        "agree": sym == inv,
        "decomposition": _decomp(mu),
    }, None


def cmd_nu_check(p, lim, seed):
    group, nu = _group_nu(p)
    return {"factors": list(group.factors), "nu": list(nu), "symmetric": constructions.check_nu_symmetry(group, nu)}, None


def cmd_mixture(p, lim, seed):
    mu1, mu2 = _measure(p["mu1"]), _measure(p["mu2"])
    n = mu1.n
    coords = p["face"] or list(range(1, n + 1))
    face = cube.Face.from_coords(n, coords)
    rep = constructions.mixture_experiment(mu1, mu2, constructions.HyperplaneParams(n, p["p"]), face)
    out = rep.pop("measure")
    k = rep["k"]
    rep["component_rep"] = config_to_str(Config.from_key(n, k * k, rep["component_rep"]))
    rep["deviations"] = {config_to_str(Config.from_key(face.dim, k, a)): d for a, d in rep["deviations"].items()}
    rep["decomposition"] = _decomp(out)
    return rep, None


def cmd_dbar(p, lim, seed):
    mu, nu = _measure(p["mu"]), _measure(p["nu"])
    sol = joinings.optimal_joining(mu, nu, p["vertex"])
    lam = sol.joining
    return {
        "dbar": sol.value,
        "vertex": p["vertex"],
        "pair_orbits": len(sol.program.orbits),
        "joining": {config_to_str(c): w for c, w in lam.items()},
    }, None


def cmd_decompose(p, lim, seed):
    mu = _measure(p["mu"])
    dec = measures.ergodic_decompose(mu)
    return {
        "n": mu.n,
        "k": mu.k,
        "components": {config_to_str(c): w for c, w in dec.terms},
        "reconstructs": dec.reconstruct() == mu,
    }, None


def cmd_testability(p, lim, seed):
    rows = testability.nontestability_report(p["r"], p["ns"], p["J"], p["trials"], seed)
    exact = [row["exact_p"] for row in rows]
    rec = {
        "r": p["r"],
        "J": p["J"],
        "subject": "x" + "x".join(str(i) for i in range(1, p["r"] + 2)),
        "nondecreasing_in_n": all(a <= b for a, b in zip(exact, exact[1:])),
        "rows": len(rows),
    }
    if p["trials"]:
        rec["within_3_sigma"] = all(
            testability.within_three_sigma(row["passes"], row["trials"], row["exact_p"]) for row in rows
        )
    return rec, rows


def cmd_dmt(p, lim, seed):
    rows = []
    for n in p["ns"]:
        if p["kind"] == "hypergraph":
            ctx = dmt.hypergraph_context(n, p["k"])
        elif p["kind"] == "cube":
            ctx = dmt.cube_context(n)
        else:
            raise ValidationError("kind must be hypergraph or cube")
        _limit(ctx.order, lim["max_group_order"], "group order")
        I, J = dmt.default_sets(ctx)
        q = dmt.DmtQuery(ctx, I, J, sampled=bool(p["trials"]), trials=p["trials"], seed=seed)
        res = dmt.dmt_fraction(q)
        rows.append(
            {
                "kind": p["kind"],
                "n": n,
                "index_set": len(ctx.points),
                "group_order": ctx.order,
                "I": str(ctx.points[I[0]]),
                "J": str(ctx.points[J[0]]),
                "hits": res.hits,
                "pairs": res.pairs,
                "fraction": res.fraction,
                "exhaustive": res.exhaustive,
                "witnesses_verified": res.verified,
            }
        )
    return {"kind": p["kind"], "rows": len(rows)}, rows


HANDLERS = {name: globals()["cmd_" + name.replace("-", "_")] for name in COMMANDS}


def render(manifest: dict, record: dict, rows) -> tuple[str, str | None]:
    digest = manifest_hash(manifest)
    doc = {"manifest": manifest, "manifest_sha256": digest, "result": record}
    if rows is not None:
        doc["table"] = rows
    text = json.dumps(_canonical(doc), sort_keys=True, indent=2) + "\n"
    table = None
    if rows is not None:
        buf = _io.StringIO()
        buf.write(f"# manifest_sha256: {digest}\n")
        if rows:
            writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
            writer.writeheader()
            for row in rows:
                writer.writerow(_canonical(row))
        table = buf.getvalue()
    return text, table


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        manifest = resolve(args.command, args)
        record, rows = HANDLERS[args.command](manifest["params"], manifest["limits"], manifest["seed"])
        text, table = render(manifest, record, rows)
    except TooLargeError as e:
        _error("resource-limit", e)
        return EXIT_LIMIT
    except (ValidationError, ParseError, measures.MeasureError, ValueError) as e:
        _error("validation", e)
        return EXIT_INVALID
    except Exception as e:  # noqa: BLE001
        _error("internal", e)
        return EXIT_INTERNAL
    sys.stdout.write(text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{args.command}.json").write_text(text)
        if table is not None:
            (out / f"{args.command}.csv").write_text(table)
    return EXIT_OK


def _error(kind: str, exc: Exception) -> None:
    rec = {"error": kind, "type": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ParseError):
        rec["line"], rec["column"] = exc.line, exc.column
    sys.stderr.write(json.dumps(rec, sort_keys=True) + "\n")


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

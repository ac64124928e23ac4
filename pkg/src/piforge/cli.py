"""Command-line front end.

Every command writes a JSON report (stdout or ``--out``).  Exit codes:
0 definitive result, 2 inconclusive, 1 error, 64 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import freealg, matalg, pitest, polylib, quiver
from .coeffring import Field, make_field, parse_field
from .errors import PiforgeError
from .freealg import NcPolynomial, format_poly, parse_poly

EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


# -- input helpers ------------------------------------------------------------------

def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _poly_lines(text: str) -> list[str]:
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")]


def _load_polys(args, field: Field) -> list[NcPolynomial]:
    if getattr(args, "expr", None):
        lines = [args.expr]
    elif getattr(args, "poly", None):
        lines = _poly_lines(_read_text(args.poly))
    else:
        raise UsageError("give --poly FILE or --expr TEXT")
    return [parse_poly(ln, field) for ln in lines]


def _load_poly(args, field: Field) -> NcPolynomial:
    polys = _load_polys(args, field)
    if len(polys) != 1:
        raise UsageError(f"expected one polynomial, found {len(polys)}")
    return polys[0]


def _load_matrix(path: str) -> matalg.Matrix:
    return matalg.Matrix.from_json(json.loads(_read_text(path)))


def _load_quiver(path: str) -> quiver.QuiverSpec:
    return quiver.QuiverSpec.from_json(json.loads(_read_text(path)))


def _algebra(args):
    if getattr(args, "quiver", None):
        return quiver.realize(_load_quiver(args.quiver))
    if getattr(args, "ring", None):
        q = args.q or args.p
        return quiver.matrix_ring(args.p, args.ring, q)
    raise UsageError("give --quiver FILE or --ring N --p P")


def _poly_json(f: NcPolynomial) -> dict:
    return {"field": f.field.name, "unital": f.unital, "text": format_poly(f),
            "terms": [[[freealg.letter_name(i) for i in w], f.field.format(c)] for w, c in f.terms.items()]}


def _poly_from_json(data: dict) -> NcPolynomial:
    F = parse_field(data["field"])
    terms = {}
    for word, c in data["terms"]:
        terms[tuple(freealg.parse_letter(x) for x in word)] = F.parse(c)
    return NcPolynomial(F, terms, bool(data.get("unital", False)))


def _charpoly_json(cp: matalg.CharPoly) -> dict:
    F = cp.field
    return {"coefficients": [F.format(c) for c in cp.coeffs],
            "signed": [F.format(cp.signed(k)) for k in range(1, cp.n + 1)],
            "text": str(cp)}


# -- commands ---------------------------------------------------------------------------

def cmd_poly(args) -> dict:
    F = parse_field(args.field)
    if args.action == "print":
        if args.expr:
            f = parse_poly(args.expr, F)
        else:
            data = json.loads(_read_text(args.poly or "-"))
            f = _poly_from_json(data.get("result", data))
        return {"text": format_poly(f)}
    if args.action == "closure":
        members, certs = freealg.ultra_homogeneous_closure(_load_polys(args, F), certificates=True)
        return {"closure": [format_poly(m) for m in members],
                "certificates_replay": all(c.verify() for c in certs)}
    f = _load_poly(args, F)
    if args.action == "parse":
        return _poly_json(f)
    if args.action == "linearize":
        return {"result": format_poly(freealg.partial_linearization(f, args.var, args.parts))}
    if args.action == "quasi":
        tr = freealg.quasi_linearize(f, trace=True)
        return {"result": format_poly(tr.result), "replays": tr.verify(),
                "steps": [{"variable": freealg.letter_name(s.variable),
                           "fresh": [freealg.letter_name(v) for v in s.fresh]} for s in tr.steps]}
    if args.action == "recover":
        return {"result": format_poly(freealg.recover_leading(f, args.var, args.k, args.literal))}
    raise UsageError(f"unknown poly action {args.action}")


def cmd_known(args) -> dict:
    F = parse_field(args.field)
    a = args.action
    if a == "capelli":
        f = polylib.capelli(F, args.k)
    elif a == "standard":
        f = polylib.standard(F, args.k)
    elif a == "central":
        f = polylib.central_h(F, args.n)
    elif a == "g":
        f = polylib.multilinearized_commutator_square(F)
    elif a == "alternator":
        f = polylib.alternator(_load_poly(args, F), args.t)
    elif a == "delta":
        f = polylib.zubrilin_delta(_load_poly(args, F), args.n, args.k, args.z)
    else:
        raise UsageError(f"unknown known action {a}")
    return {"result": format_poly(f), "terms": len(f)}


def cmd_mat(args) -> dict:
    a = args.action
    if a == "symcoeffs":
        mats = [_load_matrix(p) for p in args.matrices]
        v = matalg.symmetrized_char_coeffs(mats, args.t, args.j)
        return {"value": mats[0].field.format(v)}
    m = _load_matrix(args.matrix)
    if a == "charpoly":
        return _charpoly_json(matalg.char_poly(m))
    if a == "qcoeffs":
        return _charpoly_json(matalg.q_char_coeffs(m, args.qbar))
    if a == "regular":
        r = matalg.left_regular(m)
        return {"matrix": r.to_json(), "charpoly": _charpoly_json(matalg.char_poly(r))}
    if a == "alphahat":
        return {"matrix": matalg.matrix_char_coeff(m, args.k).to_json()}
    if a == "semisimple":
        return {"semisimple": matalg.is_semisimple(m)}
    raise UsageError(f"unknown mat action {a}")


def _dv_arg(text: str, glue: str | None) -> quiver.DegreeVector:
    entries = [int(x) for x in text.split(",") if x]
    groups = [[int(x) for x in g.split(",")] for g in glue.split(";")] if glue else []
    return quiver.DegreeVector.glued(entries, *groups)


def cmd_quiver(args) -> dict:
    a = args.action
    if a == "compare":
        u, v = _dv_arg(args.u, args.u_glue), _dv_arg(args.v, args.v_glue)
        return {"result": quiver.compare_degree_vectors(u, v)}
    if a == "fuzz":
        rng = np.random.Generator(np.random.Philox(args.seed))
        chains = []
        for _ in range(args.count):
            spec = quiver.random_quiver(rng, args.max_vertices)
            bound = quiver.chain_bound(spec)
            steps, measures, _ = quiver.reduction_chain(spec, rng)
            decreasing = all(x > y for x, y in zip(measures, measures[1:]))
            chains.append({"vertices": len(spec.vertices), "steps": len(steps), "bound": bound,
                           "decreasing": decreasing})
        ok = all(c["decreasing"] and c["steps"] <= c["bound"] for c in chains)
        return {"count": args.count, "seed": args.seed, "all_decreasing": ok,
                "max_steps": max((c["steps"] for c in chains), default=0), "chains": chains}
    spec = _load_quiver(args.quiver)
    if a == "validate":
        problems = quiver.validate(spec)
        return {"valid": not problems, "violations": problems}
    if a == "realize":
        return quiver.realize(spec).summary()
    if a == "degvec":
        return quiver.path_degree_vector(spec, args.path.split(",")).to_json()
    if a == "reduce":
        step_data = json.loads(args.step)
        step = quiver.ReductionStep(step_data["kind"], tuple(
            tuple(x) if isinstance(x, list) else x for x in step_data["payload"]))
        new = quiver.apply_reduction(spec, step)
        before, after = quiver.reduction_measure(spec), quiver.reduction_measure(new)
        return {"quiver": new.to_json(), "measure_before": repr(before), "measure_after": repr(after),
                "decreased": after < before}
    raise UsageError(f"unknown quiver action {a}")


def cmd_check(args) -> dict:
    alg = _algebra(args)
    f = _load_poly(args, alg.field)
    a = args.action
    if a == "identity":
        rep = pitest.is_identity(f, alg, args.mode, args.budget, args.seed)
        return rep.to_json()
    if a == "central":
        return pitest.is_central(f, alg, args.mode, args.budget, args.seed).to_json()
    if a == "quasilinear":
        verdict, witness = pitest.is_quasi_linear(f, alg, args.var, args.budget, args.seed)
        out = {"verdict": verdict, "witness": None}
        if witness:
            out["witness"] = {freealg.letter_name(k): ([m.to_json() for m in v] if isinstance(v, tuple)
                                                       else v.to_json()) for k, v in sorted(witness.items())}
        return out
    if a == "admissible":
        out = pitest.is_admissible(f, alg, args.budget, args.seed).to_json()
        if out["verdict"] == "not-found" and not out["exhaustive"]:
            out["verdict"] = "inconclusive"
        return out
    if a == "annihilate":
        data = json.loads(_read_text(args.assign))
        assignment = {freealg.parse_letter(k): matalg.Matrix.from_json(v["matrix"]) for k, v in data.items()}
        purity = {freealg.parse_letter(k): v.get("purity", "unknown") for k, v in data.items()}
        return pitest.nilpotence_diagnostics(f, alg, assignment, purity)
    raise UsageError(f"unknown check action {a}")


def cmd_hike(args) -> dict:
    F = parse_field(args.field)
    a = args.action
    if a == "stage2":
        _, rec = polylib.hike_stage2_term(F, args.ni, args.nj, args.q1, args.q2, args.qbar,
                                          central=args.central)
    elif a == "stage4":
        _, rec = polylib.hike_stage4_term(F, args.ni, args.nprime)
    else:
        f = _load_poly(args, F)
        if a == "stage1":
            _, rec = polylib.hike_stage1(f, args.var, args.n, args.power, central=args.central)
        elif a == "stage3":
            _, rec = polylib.hike_stage3(f, args.var, args.n, args.t, central=args.central)
        elif a == "expand":
            _, rec = polylib.hike_expand(f, args.var, args.n, args.t, args.qbar, central=args.central)
        else:
            raise UsageError(f"unknown hike action {a}")
    out = rec.to_json()
    out["replays"] = rec.verify()
    return out


def cmd_absorb(args) -> dict:
    F = parse_field(args.field)
    f = _load_poly(args, F) if (args.poly or args.expr) else polylib.capelli(F, args.n * args.n)
    rep = pitest.absorption_check(f, args.n, F, args.trials, args.seed)
    rep["verdict"] = "holds" if rep["working"] and rep["telescope_vanishes"] else "fails"
    return rep


def cmd_tideal(args) -> dict:
    F = parse_field(args.field)
    gens = [parse_poly(ln, F) for ln in _poly_lines(_read_text(args.gens))]
    target = parse_poly(_poly_lines(_read_text(args.target))[0], F)
    res = pitest.tideal_member(gens, target, args.deg, args.vars, args.budget)
    return res.to_json()


COMMANDS = {"poly": cmd_poly, "known": cmd_known, "mat": cmd_mat, "quiver": cmd_quiver,
            "check": cmd_check, "hike": cmd_hike, "absorb": cmd_absorb, "tideal": cmd_tideal}


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="piforge", description="Exact polynomial-identity workbench.")
    ap.add_argument("--out", help="write the JSON report here instead of stdout")
    ap.add_argument("--timing", action="store_true", help="include wall-clock time in the report")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, field=True, poly=True):
        if field:
            p.add_argument("--field", default="Z", help="Z, F<p> or GF(p,m)")
        if poly:
            p.add_argument("--poly", help="file with one polynomial per line ('-' for stdin)")
            p.add_argument("--expr", help="polynomial text")

    p = sub.add_parser("poly")
    p.add_argument("action", choices=["parse", "print", "linearize", "quasi", "closure", "recover"])
    common(p)
    p.add_argument("--var", type=int, default=1)
    p.add_argument("--parts", type=int)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--literal", action="store_true")

    p = sub.add_parser("known")
    p.add_argument("action", choices=["capelli", "standard", "central", "g", "alternator", "delta"])
    common(p)
    for name in ("k", "n", "t", "z"):
        p.add_argument(f"--{name}", type=int, default=1)

    p = sub.add_parser("mat")
    p.add_argument("action", choices=["charpoly", "qcoeffs", "regular", "alphahat", "symcoeffs", "semisimple"])
    p.add_argument("--matrix")
    p.add_argument("--matrices", nargs="+")
    p.add_argument("--qbar", type=int, default=1)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--j", type=int, default=1)

    p = sub.add_parser("quiver")
    p.add_argument("action", choices=["validate", "realize", "degvec", "compare", "reduce", "fuzz"])
    p.add_argument("--quiver")
    p.add_argument("--path")
    p.add_argument("--u")
    p.add_argument("--v")
    p.add_argument("--u-glue", help="1-based glued positions, groups separated by ';'")
    p.add_argument("--v-glue")
    p.add_argument("--step", help='JSON, e.g. {"kind":"drop-vertex","payload":["v1"]}')
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--max-vertices", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("check")
    p.add_argument("action", choices=["identity", "central", "quasilinear", "admissible", "annihilate"])
    common(p, field=False)
    p.add_argument("--quiver")
    p.add_argument("--ring", type=int, help="matrix size n for M_n(F_q)")
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--q", type=int)
    p.add_argument("--mode", default="auto",
                   choices=["auto", "exhaustive", "exhaustive-basis", "exhaustive-pure", "exhaustive-all", "randomized"])
    p.add_argument("--budget", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--var", type=int, default=1)
    p.add_argument("--assign", help="JSON {letter: {matrix: ..., purity: ...}}")

    p = sub.add_parser("hike")
    p.add_argument("action", choices=["stage1", "stage2", "stage3", "stage4", "expand"])
    common(p)
    p.add_argument("--var", type=int, default=1)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--power", type=int)
    p.add_argument("--qbar", type=int, default=1)
    p.add_argument("--ni", type=int, default=1)
    p.add_argument("--nj", type=int, default=2)
    p.add_argument("--nprime", type=int, default=1)
    p.add_argument("--q1", type=int, default=1)
    p.add_argument("--q2", type=int, default=1)
    p.add_argument("--central", choices=["h", "g"], default="h")

    p = sub.add_parser("absorb")
    p.add_argument("action", choices=["verify"])
    common(p)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("tideal")
    p.add_argument("action", choices=["member"])
    p.add_argument("--field", default="F2")
    p.add_argument("--gens", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--deg", type=int, default=2)
    p.add_argument("--vars", type=int, default=3)
    p.add_argument("--budget", type=int, default=20000)
    return ap


_INCONCLUSIVE = {"inconclusive", "not-found"}


def _exit_code(result: dict) -> int:
    verdict = result.get("verdict")
    if verdict in _INCONCLUSIVE:
        return EXIT_INCONCLUSIVE
    if verdict == "fails":
        return EXIT_ERROR
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "timing")}
    start = time.perf_counter()
    try:
        result = COMMANDS[args.command](args)
        code = _exit_code(result)
    except UsageError as exc:
        print(f"piforge: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PiforgeError, OSError, json.JSONDecodeError, KeyError) as exc:
        result = {"error": type(exc).__name__, "message": str(exc)}
        code = EXIT_ERROR
    report = {"command": args.command, "config": config, "result": result, "exit_code": code}
    if args.timing:
        report["seconds"] = round(time.perf_counter() - start, 6)
    text = json.dumps(report, indent=2, sort_keys=True, default=str) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if code == EXIT_ERROR and "error" in result:
        print(f"piforge: {result['error']}: {result['message']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    raise SystemExit(main())

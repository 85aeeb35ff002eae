"""``nashlab`` command line.

Every subcommand prints ``key=value`` lines followed by one ``#summary``
line holding the same report as JSON.  Files are written under ``--out``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from ._util import nnorm, substream


def emit(report: dict) -> None:
    for k, v in report.items():
        print(f"{k}={v}")
    print("#summary " + json.dumps(report, sort_keys=True, default=_jsonable))


def _jsonable(v):
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    return str(v)


def _out(args, name: str) -> Path:
    d = Path(args.out)
    d.mkdir(parents=True, exist_ok=True)
    return d / name


def _profile(args):
    from .profile import load_profile

    return load_profile(args.profile)


# ----------------------------------------------------------------- loaders


def _instance(args):
    from .graphs import read_instance

    return read_instance(args.instance)


def _code_for(inst, path):
    from .code import ConcatenatedCode, read_code

    half = read_code(path)
    n = (inst.host.num_vertices - 1).bit_length()
    return ConcatenatedCode(half, n, split=half.n2)


def _field(args):
    from .brouwer import BrouwerField

    inst = _instance(args)
    return BrouwerField(_code_for(inst, args.code), _profile(args)).fit(inst)


def _game(args):
    from .game import game_from_composed
    from .lift import read_composed
    from .locality import read_family

    F = _field(args)
    G = game_from_composed(read_composed(args.composed), F.code, read_family(args.family), F.profile_)
    return F, G


def _strategies(args):
    from .game import read_strategy

    sa, A = read_strategy(args.strategy_a)
    sb, B = read_strategy(args.strategy_b)
    if (sa, sb) != ("A", "B"):
        raise ValueError("--strategy-a must hold side A and --strategy-b side B")
    return A, B


# ------------------------------------------------------------------ embed


def cmd_sample_instance(args) -> dict:
    from .embed import sample_bicritical, sample_critical
    from .graphs import write_instance

    rng = substream(args.seed, "instance")
    inst = (sample_bicritical if args.bicritical else sample_critical)(args.N, rng)
    path = _out(args, "instance.txt")
    write_instance(inst, path)
    return {"N": args.N, "edges": len(inst.edges()), "file": str(path)}


def cmd_congestion(args) -> dict:
    from .embed import congestion_trials
    from .graphs import choose_d

    d = args.d or choose_d(args.n)
    r = congestion_trials(args.n, d, args.trials, substream(args.seed, "congestion"))
    r.pop("congestions")
    return r


def cmd_dichotomy(args) -> dict:
    from .embed import SOLVERS, dichotomy_experiment

    r = dichotomy_experiment(SOLVERS[args.solver], args.N, args.trials, substream(args.seed, "dichotomy"))
    return {"solver": args.solver, **r}


def cmd_coupling(args) -> dict:
    from .embed import coupling_failure_rate
    from .graphs import choose_d

    N = args.N or 1 << args.n
    d = args.d or choose_d(args.n)
    rate = coupling_failure_rate(N, args.n, args.trials, substream(args.seed, "coupling"), d=d)
    return {"n": args.n, "N": N, "d": d, "trials": args.trials, "failure_rate": rate}


# ----------------------------------------------------------- code, family


def cmd_build_code(args) -> dict:
    from .code import write_code
    from .pipeline import PipelineConfig, build_code

    cfg = PipelineConfig(n=args.n, ell=args.ell, seed=args.seed, profile=_profile(args))
    code = build_code(cfg)
    path = _out(args, "code.txt")
    write_code(code.half, path)
    return {"n": args.n, "m": code.m, "distance": code.distance, "file": str(path)}


def cmd_build_family(args) -> dict:
    from .locality import build_subset_families, family_invariants, write_family

    fam = build_subset_families(args.m, args.ell, args.k, args.seed)
    inv = family_invariants(fam)
    path = _out(args, "family.txt")
    write_family(fam, path)
    return {"m": args.m, "ell": args.ell, "k": args.k, "size": fam.size, "invariants_ok": inv["ok"], "file": str(path)}


# ---------------------------------------------------------------- brouwer


def cmd_build_brouwer(args) -> dict:
    from .brouwer import min_nonadjacent_separation

    F = _field(args)
    P = F.path_
    return {
        "m": F.m_,
        "dim": F.dim,
        "segments": P.num_segments,
        "endpoints": len(P.endpoints()),
        "min_separation": min_nonadjacent_separation(P),
        "radius_inner": F.radii_.inner,
        "radius_outer": F.radii_.outer,
    }


def cmd_eval_f(args) -> dict:
    from .brouwer import read_point, write_point

    F = _field(args)
    x = read_point(args.point)
    fx = F.transform(x[None])[0]
    path = _out(args, "f_point.txt")
    write_point(fx, F.profile_, path)
    return {"residual": nnorm(fx - x), "endpoint_distance": float(F.endpoint_distance(x)[0]), "file": str(path)}


def cmd_check_lipschitz(args) -> dict:
    from .brouwer import check_lipschitz

    F = _field(args)
    return check_lipschitz(F, args.samples, substream(args.seed, "lipschitz"), boundary=args.boundary)


def cmd_find_fixed_point(args) -> dict:
    from .brouwer import analytic_fixed_points, find_fixed_point, write_point

    F = _field(args)
    pts = analytic_fixed_points(F)
    if not pts:
        raise ValueError("the instance has no path endpoints")
    x0, v, side = pts[args.endpoint % len(pts)]
    x, res = find_fixed_point(F, x0)
    path = _out(args, "fixed_point.txt")
    write_point(x, F.profile_, path)
    return {"endpoint": v, "side": side, "residual": res, "candidates": len(pts), "file": str(path)}


def cmd_decode_fp(args) -> dict:
    from .brouwer import decode_fixed_point, read_point

    F = _field(args)
    x = read_point(args.point)
    sol = decode_fixed_point(x, F, tol=args.tol)
    return {"vertex": sol.vertex, "label": sol.label, "reason": sol.reason, "residual": F.residual(x)}


# ------------------------------------------------------------------- game


def cmd_build_game(args) -> dict:
    from .lift import compose, write_composed

    inst = _instance(args)
    ci = compose(inst, substream(args.seed, "game"))
    path = _out(args, "composed.txt")
    write_composed(ci, path)
    return {"coordinates": ci.alice.size, "gadget": ci.gadget.name, "file": str(path)}


def cmd_plant(args) -> dict:
    from .brouwer import read_point
    from .game import plant_equilibrium, write_strategy

    F, G = _game(args)
    A, B, sol = plant_equilibrium(G, F, read_point(args.fixed_point))
    pa, pb = _out(args, "strategy_A.txt"), _out(args, "strategy_B.txt")
    write_strategy(A, "A", pa)
    write_strategy(B, "B", pb)
    return {"vertex": sol.vertex, "support_A": len(A), "support_B": len(B), "files": f"{pa},{pb}"}


def cmd_check_wsne(args) -> dict:
    from .game import check_wsne

    _, G = _game(args)
    A, B = _strategies(args)
    rep = check_wsne(A, B, G, args.eps)
    return {"passed": rep.passed, "eps": args.eps, "max_regret": rep.max_regret}


def cmd_check_ane(args) -> dict:
    from .game import check_ane

    _, G = _game(args)
    A, B = _strategies(args)
    r = check_ane(A, B, G, args.eps)
    return {"passed": r["passed"], "eps": args.eps, "gain_A": r["gain"]["A"], "gain_B": r["gain"]["B"]}


def cmd_prune(args) -> dict:
    from .game import prune_ane_to_wsne, write_strategy

    _, G = _game(args)
    A, B = _strategies(args)
    A2, B2 = prune_ane_to_wsne(A, B, G, args.eps)
    pa, pb = _out(args, "pruned_A.txt"), _out(args, "pruned_B.txt")
    write_strategy(A2, "A", pa)
    write_strategy(B2, "B", pb)
    return {"support_A": f"{len(A)}->{len(A2)}", "support_B": f"{len(B)}->{len(B2)}", "files": f"{pa},{pb}"}


def cmd_extract(args) -> dict:
    from .brouwer import write_point
    from .game import extract_point

    F, G = _game(args)
    _, B = _strategies(args)
    x, unc = extract_point(B, G.spec, args.which)
    path = _out(args, "extracted_point.txt")
    write_point(x, F.profile_, path)
    return {"which": args.which, "uncovered": int(unc.sum()), "residual": F.residual(x), "file": str(path)}


def cmd_verify_reduction(args) -> dict:
    from .game import verify_reduction

    F, G = _game(args)
    A, B = _strategies(args)
    r = verify_reduction(A, B, G, F, args.eps, args.K)
    return {"residual_sq": r.residual_sq, "vertex": r.solution.vertex, "reason": r.solution.reason, "uncovered": r.uncovered}


# ------------------------------------------------------ pipeline, acceptance


def cmd_pipeline(args) -> dict:
    from .pipeline import STAGES, PipelineConfig, run_pipeline

    stages = tuple(s for s in args.stages.split(",") if s) if args.stages else STAGES
    cfg = PipelineConfig(n=args.n, ell=args.ell, k=args.k, seed=args.seed, out=args.out, profile=_profile(args), stages=stages)
    man = run_pipeline(cfg)
    rep = {f"sha256.{k}": v["sha256"] for k, v in sorted(man["artifacts"].items())}
    rep["artifacts"] = len(man["artifacts"])
    rep["manifest"] = str(Path(args.out) / "manifest.json")
    return rep


def cmd_acceptance(args) -> dict:
    from .acceptance import run_all

    nums = [int(t) for t in args.criteria.split(",")] if args.criteria else None
    res = run_all(nums, seed=args.seed, echo=print)
    return {"passed": sum(r.passed for r in res), "total": len(res), "all_passed": all(r.passed for r in res)}


# ----------------------------------------------------------------- parser


def _globals(p: argparse.ArgumentParser, top: bool) -> None:
    kw = {} if top else {"default": argparse.SUPPRESS}
    p.add_argument("--seed", type=int, **({"default": 0} if top else kw))
    p.add_argument("--profile", **({"default": "default"} if top else kw), help="default, tight or a JSON file")
    p.add_argument("--out", **({"default": "out"} if top else kw), help="output directory")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nashlab")
    _globals(ap, True)
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, *flags):
        p = sub.add_parser(name)
        _globals(p, False)
        for f in flags:
            f(p)
        p.set_defaults(func=fn)
        return p

    inst = lambda p: p.add_argument("--instance", required=True)  # noqa: E731
    code = lambda p: p.add_argument("--code", required=True)  # noqa: E731

    def game_inputs(p):
        inst(p)
        code(p)
        p.add_argument("--family", required=True)
        p.add_argument("--composed", required=True)

    def strategies(p):
        p.add_argument("--strategy-a", required=True)
        p.add_argument("--strategy-b", required=True)

    def embed_flags(p):
        p.add_argument("--n", type=int, default=6)
        p.add_argument("--N", type=int, default=None)
        p.add_argument("--d", type=int, default=None)
        p.add_argument("--trials", type=int, default=100)
        p.add_argument("--solver", choices=("canonical", "noncanonical", "coin"), default="canonical")

    def eps(p):
        p.add_argument("--eps", type=float, required=True)

    add("sample-instance", cmd_sample_instance, lambda p: p.add_argument("--N", type=int, default=64),
        lambda p: p.add_argument("--bicritical", action="store_true"))
    add("congestion-sim", cmd_congestion, embed_flags)
    add("dichotomy", cmd_dichotomy, embed_flags)
    add("coupling", cmd_coupling, embed_flags)
    add("build-code", cmd_build_code, lambda p: p.add_argument("--n", type=int, default=6),
        lambda p: p.add_argument("--ell", type=int, default=2))
    add("build-family", cmd_build_family, lambda p: p.add_argument("--m", type=int, default=36),
        lambda p: p.add_argument("--ell", type=int, default=2), lambda p: p.add_argument("--k", type=int, default=4))
    add("build-brouwer", cmd_build_brouwer, inst, code)
    add("eval-f", cmd_eval_f, inst, code, lambda p: p.add_argument("--point", required=True))
    add("check-lipschitz", cmd_check_lipschitz, inst, code, lambda p: p.add_argument("--samples", type=int, default=10_000),
        lambda p: p.add_argument("--boundary", type=int, default=1000))
    add("find-fixed-point", cmd_find_fixed_point, inst, code, lambda p: p.add_argument("--endpoint", type=int, default=0))
    add("decode-fp", cmd_decode_fp, inst, code, lambda p: p.add_argument("--point", required=True),
        lambda p: p.add_argument("--tol", type=float, default=None))
    add("build-game", cmd_build_game, inst)
    add("plant", cmd_plant, game_inputs, lambda p: p.add_argument("--fixed-point", required=True))
    add("check-wsne", cmd_check_wsne, game_inputs, strategies, eps)
    add("check-ane", cmd_check_ane, game_inputs, strategies, eps)
    add("prune", cmd_prune, game_inputs, strategies, eps)
    add("extract", cmd_extract, game_inputs, strategies,
        lambda p: p.add_argument("--which", choices=("x", "xhat"), default="xhat"))
    add("verify-reduction", cmd_verify_reduction, game_inputs, strategies,
        lambda p: p.add_argument("--eps", type=float, default=1e-9), lambda p: p.add_argument("--K", type=float, default=1e-3))
    add("pipeline", cmd_pipeline, lambda p: p.add_argument("--n", type=int, default=6),
        lambda p: p.add_argument("--ell", type=int, default=2), lambda p: p.add_argument("--k", type=int, default=4),
        lambda p: p.add_argument("--stages", default=None, help="comma-separated subset of stages"))
    add("acceptance", cmd_acceptance, lambda p: p.add_argument("--criteria", default=None, help="e.g. 1,2,9"))
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "dichotomy" and args.N is None:
        args.N = 1 << args.n
    try:
        report = args.func(args)
    except (ValueError, RuntimeError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    emit(report)
    failed = report.get("passed") is False or report.get("all_passed") is False
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())

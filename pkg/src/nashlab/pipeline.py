"""End-to-end run: instance, embedding, code, families, fixed point, planted equilibrium.

Every stage reads its inputs from the output directory when the stage that
produces them is not part of the run, so single stages can be re-run on
existing artifacts.  All randomness comes from named substreams of one seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._util import sha256_file, substream
from .brouwer import BrouwerField, analytic_fixed_points, find_fixed_point, read_point, write_point
from .code import ConcatenatedCode, RandomLinearCode, read_code, valid_m, write_code
from .embed import embed_instance, sample_critical
from .game import build_game, check_wsne, plant_equilibrium, read_strategy, verify_reduction, write_strategy
from .graphs import read_instance, write_instance
from .locality import build_subset_families, read_family, write_family
from .profile import ConstantsProfile, brouwer_min_distance, save_profile

STAGES = ("instance", "embed", "code", "family", "brouwer", "game", "verify")

ARTIFACTS = {
    "instance": "instance.txt",
    "embedding": "embedded.txt",
    "code": "code.txt",
    "family": "family.txt",
    "fixed_point": "fixed_point.txt",
    "strategy_A": "strategy_A.txt",
    "strategy_B": "strategy_B.txt",
}

# stage -> artifacts it needs from disk when the producer is not run
NEEDS = {
    "embed": ("instance",),
    "brouwer": ("instance", "code"),
    "game": ("instance", "code", "family", "fixed_point"),
    "verify": ("instance", "code", "family", "strategy_A", "strategy_B"),
}
PRODUCER = {
    "instance": "instance",
    "embedding": "embed",
    "code": "code",
    "family": "family",
    "fixed_point": "brouwer",
    "strategy_A": "game",
    "strategy_B": "game",
}


class PipelineError(RuntimeError):
    def __init__(self, stage: str, msg: str):
        super().__init__(f"stage {stage}: {msg}")
        self.stage = stage


@dataclass
class PipelineConfig:
    n: int = 6
    ell: int = 2
    k: int = 4
    seed: int = 0
    out: str | Path = "out"
    profile: ConstantsProfile = field(default_factory=ConstantsProfile.default)
    stages: tuple[str, ...] = STAGES
    eps: float = 1e-9
    K: float = 1e-3

    @property
    def m(self) -> int:
        return valid_m(self.n, self.ell)


def build_code(cfg: PipelineConfig) -> ConcatenatedCode:
    m = cfg.m
    half = RandomLinearCode(
        n2=(cfg.n + 1) // 2, m2=m // 2, min_distance=brouwer_min_distance(cfg.profile, m), seed=cfg.seed
    ).fit()
    return ConcatenatedCode(half, cfg.n, split=(cfg.n + 1) // 2)


def run_pipeline(cfg: PipelineConfig) -> dict:
    """Run the selected stages and write ``manifest.json``; returns the manifest."""
    bad = [s for s in cfg.stages if s not in STAGES]
    if bad:
        raise PipelineError(bad[0], f"unknown stage (choose from {', '.join(STAGES)})")
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    paths = {k: out / v for k, v in ARTIFACTS.items()}
    run = [s for s in STAGES if s in cfg.stages]
    for s in run:
        for need in NEEDS.get(s, ()):
            if PRODUCER[need] not in run and not paths[need].exists():
                raise PipelineError(s, f"missing input {need} ({paths[need]})")

    prof = cfg.profile
    info: dict = {}
    state: dict = {}

    def get(key, loader):
        if key not in state:
            state[key] = loader(paths[key])
        return state[key]

    def load_code(p):
        half = read_code(p)
        return ConcatenatedCode(half, cfg.n, split=half.n2)

    def field_():
        if "field" not in state:
            state["field"] = BrouwerField(get("code", load_code), prof).fit(get("instance", read_instance))
        return state["field"]

    def stage(name, fn):
        try:
            fn()
        except PipelineError:
            raise
        except Exception as exc:  # noqa: BLE001
            raise PipelineError(name, f"{type(exc).__name__}: {exc}") from exc

    def s_instance():
        inst = sample_critical(1 << cfg.n, substream(cfg.seed, "instance"))
        write_instance(inst, paths["instance"])
        state["instance"] = inst

    def s_embed():
        emb, Hd = embed_instance(cfg.n, get("instance", read_instance), substream(cfg.seed, "embedding"))
        info["embedding"] = {"status": emb.status, "congestion": emb.congestion, "d": emb.d}
        if not emb.ok:
            raise RuntimeError(f"embedding rejected (congestion {emb.congestion} > d={emb.d})")
        write_instance(emb.to_instance(Hd), paths["embedding"])

    def s_code():
        code = build_code(cfg)
        write_code(code.half, paths["code"])
        state["code"] = code

    def s_family():
        fam = build_subset_families(cfg.m, cfg.ell, cfg.k, cfg.seed)
        write_family(fam, paths["family"])
        state["family"] = fam

    def s_brouwer():
        F = field_()
        x0, v, side = analytic_fixed_points(F)[0]
        x, res = find_fixed_point(F, x0)
        write_point(x, prof, paths["fixed_point"])
        info["brouwer"] = {"endpoint": v, "side": side, "residual": float(res)}

    def s_game():
        F = field_()
        G = build_game(F.instance_, F.code, get("family", read_family), prof, substream(cfg.seed, "game"))
        A, B, sol = plant_equilibrium(G, F, get("fixed_point", read_point))
        write_strategy(A, "A", paths["strategy_A"])
        write_strategy(B, "B", paths["strategy_B"])
        state["game"] = G
        info["game"] = {"planted_vertex": sol.vertex, "support_A": len(A), "support_B": len(B)}

    def s_verify():
        F = field_()
        G = state.get("game") or build_game(
            F.instance_, F.code, get("family", read_family), prof, substream(cfg.seed, "game")
        )
        A = read_strategy(paths["strategy_A"])[1]
        B = read_strategy(paths["strategy_B"])[1]
        rep = check_wsne(A, B, G, cfg.eps)
        r = verify_reduction(A, B, G, F, cfg.eps, cfg.K)
        info["verify"] = {
            "max_regret": rep.max_regret,
            "residual_sq": r.residual_sq,
            "solution": r.solution.vertex,
            "reason": r.solution.reason,
            "uncovered": r.uncovered,
        }

    fns = {
        "instance": s_instance,
        "embed": s_embed,
        "code": s_code,
        "family": s_family,
        "brouwer": s_brouwer,
        "game": s_game,
        "verify": s_verify,
    }
    for s in run:
        stage(s, fns[s])

    manifest = {
        "config": {"n": cfg.n, "ell": cfg.ell, "k": cfg.k, "m": cfg.m, "seed": cfg.seed, "stages": run},
        "profile": prof.to_dict(),
        "artifacts": {k: {"file": p.name, "sha256": sha256_file(p)} for k, p in paths.items() if p.exists()},
        "results": _plain(info),
    }
    save_profile(prof, out / "profile.json")
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj

"""Small-constant hierarchy shared by the Brouwer field and the game."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, replace
from pathlib import Path

HIERARCHY = ("eps_nash", "eps_precision", "eps_uniform", "eps_brouwer", "delta", "h")


@dataclass(frozen=True)
class ConstantsProfile:
    eps_nash: float = 1e-9
    eps_precision: float = 1e-8
    eps_uniform: float = 1e-7
    eps_brouwer: float = 1e-6
    delta: float = 1e-4
    h: float = 1e-2
    lam_v: float = 0.1
    lam_alpha: float = 1e-3
    lam_j: float = 0.1
    lam_x: float = 1e-3
    ratio: float = 10.0

    @property
    def eta(self) -> float:
        return 2.0 * math.sqrt(self.h)

    @property
    def sqrt_h(self) -> float:
        return math.sqrt(self.h)

    @property
    def lam_J(self) -> float:
        return self.lam_j

    @property
    def lam_xhat(self) -> float:
        return self.lam_x

    def violations(self) -> list[str]:
        """Hard constraint failures (empty when the profile is usable)."""
        out = []
        vals = [getattr(self, k) for k in HIERARCHY]
        if any(v <= 0 for v in vals):
            out.append("all constants must be positive")
        for (a, va), (b, vb) in zip(zip(HIERARCHY, vals), zip(HIERARCHY[1:], vals[1:])):
            if vb < self.ratio * va * (1 - 1e-9):
                out.append(f"{b}/{a} = {vb / va:.3g} < {self.ratio}")
        if self.h * self.ratio > 1 + 1e-9:
            out.append("h must be at least `ratio` times below 1")
        lam_ok = self.lam_v / 2 > self.eps_nash + max(self.lam_alpha, 9 * self.lam_xhat)
        if not lam_ok:
            out.append("lam_v/2 must exceed eps_nash + max(lam_alpha, 9 lam_xhat)")
        if min(self.lam_v, self.lam_alpha, self.lam_j, self.lam_x) <= 0:
            out.append("lambda weights must be positive")
        return out

    def warnings(self) -> list[str]:
        """Soft conditions that the default desk-scale profile may not meet."""
        out = []
        if self.eps_brouwer * self.ratio > self.delta**2 * (1 + 1e-9):
            out.append(
                f"eps_brouwer={self.eps_brouwer:g} is not `ratio` times below delta^2={self.delta**2:g}"
            )
        if self.eps_brouwer * self.ratio > self.h:
            out.append("eps_brouwer is not well below h")
        return out

    def validate(self) -> "ConstantsProfile":
        bad = self.violations()
        if bad:
            raise ValueError("invalid constants profile: " + "; ".join(bad))
        return self

    def grid(self, x):
        """Snap to the eps_precision grid inside [-1, 2]."""
        import numpy as np

        q = np.round((np.asarray(x, dtype=float) + 1.0) / self.eps_precision)
        return np.clip(q * self.eps_precision - 1.0, -1.0, 2.0)

    @classmethod
    def default(cls) -> "ConstantsProfile":
        return cls().validate()

    @classmethod
    def tight(cls) -> "ConstantsProfile":
        """Variant whose eps_brouwer also sits well below delta^2."""
        return cls(eps_brouwer=1e-9, eps_uniform=1e-10, eps_precision=1e-11, eps_nash=1e-12).validate()

    def to_dict(self) -> dict:
        return asdict(self)

    def with_(self, **kw) -> "ConstantsProfile":
        return replace(self, **kw)


def load_profile(spec: str | Path | None) -> ConstantsProfile:
    """``None``/"default"/"tight" or a JSON file of field overrides."""
    if spec is None or str(spec) == "default":
        return ConstantsProfile.default()
    if str(spec) == "tight":
        return ConstantsProfile.tight()
    data = json.loads(Path(spec).read_text())
    unknown = set(data) - set(ConstantsProfile.__dataclass_fields__)
    if unknown:
        raise ValueError(f"unknown profile fields: {sorted(unknown)}")
    return ConstantsProfile(**data).validate()


def save_profile(profile: ConstantsProfile, path: str | Path) -> None:
    Path(path).write_text(json.dumps(profile.to_dict(), indent=2, sort_keys=True) + "\n")


@dataclass(frozen=True)
class DecodeRadii:
    """Normalized-norm decoding thresholds for one m-block.

    The asymptotic radii (8, 23, 25 times sqrt(h)) are capped by fractions of
    the code's normalized distance ``rho = sqrt(d / m)`` so that they stay
    meaningful when sqrt(h) is not small against the code geometry.
    """

    inner: float
    vertex_test: float
    outer: float


def decode_radii(profile: ConstantsProfile, distance: int, m: int) -> DecodeRadii:
    rho = math.sqrt(distance / m)
    s = profile.sqrt_h
    inner = min(8 * s, rho / 4)
    outer = min(25 * s, rho / 2)
    # same relative position as 23 inside [8, 25]
    test = inner + (23 - 8) / (25 - 8) * (outer - inner)
    return DecodeRadii(inner, test, outer)


def brouwer_min_distance(profile: ConstantsProfile, m: int, margin: float = 1.25) -> int:
    """Half-code distance making every codeword step at least ``margin * eta`` long."""
    return math.ceil(4 * m * (margin * profile.eta) ** 2 - 1e-9)

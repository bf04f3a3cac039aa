"""Seed files: canonical JSON for (theta, level data, policy)."""

from __future__ import annotations

import json
from fractions import Fraction

from ..errors import BadInput
from ..numerics.ball import BallReal
from ..numerics.logscale import BigCount, LogScaleReal
from ..rotations.angle import RotationNumber
from .forge import ForgePolicy, SeedLevel, SeedSequences, _fill_magnitudes

SEED_FORMAT = "cremerlab-seed"
SEED_VERSION = 1


def dumps_canonical(obj) -> str:
    """Byte-stable JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True) + "\n"


def _policy_json(p: ForgePolicy) -> dict:
    return {
        "target_depth": p.target_depth,
        "materialize_depth": p.materialize_depth,
        "first_quotient": p.first_quotient,
        "c1_margin": str(p.c1_margin),
        "c4_threshold": str(p.c4_threshold),
        "prec": p.prec,
        "lazy_base": p.lazy_base,
        "bit_budget": p.bit_budget,
        "lazy_slack_bits": p.lazy_slack_bits,
    }


def policy_from_json(d: dict) -> ForgePolicy:
    kw = dict(d)
    for key in ("c1_margin", "c4_threshold"):
        if key in kw:
            kw[key] = Fraction(kw[key])
    return ForgePolicy(**kw)


def _opt(x):
    return None if x is None else x.to_json()


def seed_to_json(theta: RotationNumber, seqs: SeedSequences, policy: ForgePolicy | None = None) -> dict:
    levels = []
    for lv in seqs.levels:
        levels.append({
            "j": lv.j,
            "m": str(lv.m),
            "k": lv.k.to_json(),
            "r": str(lv.r),
            "lazy": lv.lazy,
            "M": _opt(lv.M),
            "log2_M": _opt(lv.log2_M),
            "delta": _opt(lv.delta),
            "log2_delta": _opt(lv.log2_delta),
        })
    out = {
        "format": SEED_FORMAT,
        "version": SEED_VERSION,
        "theta": theta.to_json(),
        "materialized_depth": seqs.materialized_depth,
        "levels": levels,
    }
    if policy is not None:
        out["policy"] = _policy_json(policy)
    return out


def seed_from_json(d: dict, refresh: bool = False):
    """(theta, seqs, policy or None); ``refresh`` recomputes M and delta from theta."""
    if d.get("format") != SEED_FORMAT:
        raise BadInput("not a seed file")
    if d.get("version") != SEED_VERSION:
        raise BadInput(f"unsupported seed version {d.get('version')!r}")
    theta = RotationNumber.from_json(d["theta"])
    levels = []
    for e in d["levels"]:
        lv = SeedLevel(j=int(e["j"]), m=int(e["m"]), k=BigCount.from_json(e["k"]), r=int(e["r"]),
                       lazy=bool(e["lazy"]))
        if refresh:
            _fill_magnitudes(theta, lv, 256)
        else:
            lv.M = BallReal.from_json(e["M"]) if e.get("M") else None
            lv.delta = BallReal.from_json(e["delta"]) if e.get("delta") else None
            lv.log2_M = LogScaleReal.from_json(e["log2_M"]) if e.get("log2_M") else None
            lv.log2_delta = LogScaleReal.from_json(e["log2_delta"]) if e.get("log2_delta") else None
        levels.append(lv)
    if [lv.j for lv in levels] != list(range(1, len(levels) + 1)):
        raise BadInput("seed levels must be numbered 1..J")
    policy = policy_from_json(d["policy"]) if d.get("policy") else None
    return theta, SeedSequences(levels, int(d.get("materialized_depth", len(levels)))), policy


def save_seed(path, theta, seqs, policy=None) -> str:
    text = dumps_canonical(seed_to_json(theta, seqs, policy))
    with open(path, "w", encoding="ascii") as fh:
        fh.write(text)
    return text


def load_seed(path, refresh: bool = False):
    try:
        with open(path, encoding="ascii") as fh:
            d = json.load(fh)
    except OSError as exc:
        raise BadInput(f"cannot read seed file: {exc}") from None
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise BadInput(f"seed file is not valid JSON: {exc}") from None
    return seed_from_json(d, refresh=refresh)

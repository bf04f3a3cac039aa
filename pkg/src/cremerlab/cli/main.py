"""Command-line front end: forge, certify, escape, arith, orbit, perk, linearize.

Exit codes: 0 ok, 1 bad input, 2 infeasible (or a FAIL certificate), 3 undecided.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .. import __version__
from ..errors import BadInput, CremerLabError, InsufficientDepth
from ..seedforge.io import dumps_canonical
from .config import RunConfig

COMMANDS = ("forge", "certify", "escape", "arith", "orbit", "perk", "linearize")
REPORT_VERSION = 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise BadInput(f"{self.prog}: {message}")


def _bool(s) -> bool:
    if isinstance(s, bool):
        return s
    v = str(s).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise BadInput(f"not a boolean: {s!r}")


def _numbers(text: str) -> list:
    """Comma-separated complex constants in the polynomial grammar (e.g. "1e-6, 0.1+0.2i")."""
    from ..dynsim.poly import parse_polys

    out = []
    for p in parse_polys(text, names=()):
        if p.degree() > 0:
            raise BadInput(f"expected numbers, got {text!r}")
        out.append(p.constant())
    return out


def _need(a, *names):
    for n in names:
        if getattr(a, n) in (None, "", []):
            raise BadInput(f"{a.command} needs --{n}")


def _cstr(z: complex) -> list:
    return [repr(float(z.real)), repr(float(z.imag))]


# ---------------------------------------------------------------------------------------------
# subcommands


def _cert_exit(*reports) -> int:
    codes = [0]
    for r in reports:
        for v in r.verdicts:
            if v.status == "FAIL":
                codes.append(2)
            elif v.status != "PASS":
                codes.append(3)
    return max(codes)


def _cert_payload(theta, seqs, prec):
    from ..seedforge.certify import certify, certify_inverse

    if not seqs.levels:
        return None, None, 0
    fwd = certify(theta, seqs, prec=prec)
    inv = certify_inverse(theta, seqs, prec=prec)
    return fwd.to_json(), inv.to_json(), _cert_exit(fwd, inv)


def cmd_forge(a) -> tuple:
    from ..seedforge.forge import ForgePolicy, forge
    from ..seedforge.io import save_seed, seed_to_json

    policy = ForgePolicy(target_depth=a.depth, materialize_depth=min(a.materialize, a.depth),
                         bit_budget=a.bit_budget, prec=max(a.prec, 64))
    theta, seqs = forge(policy)
    if a.out:
        save_seed(a.out, theta, seqs, policy)
    fwd, inv, code = _cert_payload(theta, seqs, a.prec)
    return {
        "kind": "forge",
        "seed_file": a.out,
        "seed": seed_to_json(theta, seqs, policy),
        "forward": fwd,
        "inverse": inv,
        "all_pass": code == 0,
    }, code


def cmd_certify(a) -> tuple:
    from ..seedforge.io import load_seed

    _need(a, "seed")
    theta, seqs, _ = load_seed(a.seed)
    fwd, inv, code = _cert_payload(theta, seqs, a.prec)
    return {"kind": "certify", "seed_file": a.seed, "forward": fwd, "inverse": inv, "all_pass": code == 0}, code


def _spec_from_args(a, n: int):
    from ..cremermap.series import CremerMapSpec
    from ..seedforge.io import load_seed

    if a.toy:
        return CremerMapSpec.toy_map(n=n, prec=a.prec)
    if not a.seed:
        raise BadInput("escape needs --seed FILE (or --toy)")
    theta, seqs, _ = load_seed(a.seed)
    if not seqs.levels:
        raise InsufficientDepth("the seed has no levels", needed_level=1)
    return CremerMapSpec(theta, seqs, n=n, prec=a.prec)


def _escape_one(args):
    a, pt = args
    from ..cremermap.escape import DomainCxU, escape_certificate

    spec = _spec_from_args(a, len(pt) - 1)
    dom = DomainCxU(complex(a.center), a.radius)
    cert = escape_certificate(spec, (list(pt[:-1]), pt[-1]), dom, a.direction)
    d = cert.to_json()
    d["point"] = [_cstr(z) for z in pt]
    return d


def cmd_escape(a) -> tuple:
    if not a.point:
        raise BadInput("escape needs at least one --point")
    pts = [_numbers(p) for p in a.point]
    if any(len(p) < 2 for p in pts):
        raise BadInput("a point needs x coordinates and y: \"x,y\" or \"x1,...,xn,y\"")
    work = [(a, p) for p in pts]
    if a.jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=a.jobs) as ex:
            certs = list(ex.map(_escape_one, work))
    else:
        certs = [_escape_one(w) for w in work]
    out = {"kind": "escape", "certificates": certs} if len(certs) > 1 else {"kind": "escape", **certs[0]}
    return out, 0


def _angle(spec: str):
    from fractions import Fraction

    from ..rotations.angle import RotationNumber
    from ..seedforge.io import load_seed

    if spec == "golden":
        return RotationNumber.golden()
    if spec == "forged":
        from ..seedforge.forge import forge

        return forge()[0]
    kind, _, rest = spec.partition(":")
    if kind == "cf":
        return RotationNumber.from_quotients([int(t) for t in rest.split(",") if t.strip()], tail="open")
    if kind == "frac":
        return RotationNumber.from_fraction(Fraction(rest))
    if kind == "seed":
        return load_seed(rest)[0]
    raise BadInput(f"unknown angle {spec!r} (golden, forged, cf:a1,a2,..., frac:p/q, seed:FILE)")


def cmd_arith(a) -> tuple:
    from ..rotations.smalldiv import arith_profile

    theta = _angle(a.angle)
    prof = arith_profile(theta, a.bruno, prec=min(a.prec, 256), omega_ms=a.omega or (), cremer_ms=a.cremer or ())
    return {"kind": "arith", "angle": theta.to_json(), **prof.to_json()}, 0


def _emit_orbit(rec, a):
    if a.format == "csv":
        return rec.to_csv(), 0
    d = rec.to_json()
    d["kind"] = "orbit"
    d["points"] = [[_cstr(complex(z)) for z in p] for p in rec.points]
    return d, 0


def cmd_orbit(a) -> tuple:
    from ..dynsim.orbit import Domain, iterate
    from ..dynsim.poly import PolyMap

    _need(a, "map", "point")
    fmap = PolyMap.parse(a.map, inverse=a.inverse)
    p = _numbers(a.point)
    center = _numbers(a.center) if a.center else [0j] * fmap.dim
    rec = iterate(fmap, p, Domain(tuple(center), a.radius), a.budget, a.direction, prec=a.prec)
    return _emit_orbit(rec, a)


def cmd_perk(a) -> tuple:
    from ..dynsim.poly import PolyMap
    from ..perk.explore import components, per_k_points

    _need(a, "map")
    fmap = PolyMap.parse(a.map)
    res = per_k_points(fmap, a.k, a.radius, (a.rings, a.grid), a.tol, prec=min(a.prec, 256))
    if res.points:
        res = components(res, a.eps)
    if a.format == "csv":
        return res.to_csv(), 0
    d = res.to_json()
    d["kind"] = "perk"
    return d, 0


def cmd_linearize(a) -> tuple:
    from ..cremermap import linearize as L

    if a.germ:
        from ..dynsim.poly import parse_polys

        theta = _angle(a.angle)
        P, Q = parse_polys(a.germ, names=("x", "y"))
        lam = complex(L.lam_pow(theta, 1, 64))
        F1 = {(1, 0): lam}
        for k, v in P.terms.items():
            F1[k] = F1.get(k, 0) + v
        F2 = {(0, 1): 1}
        for k, v in Q.terms.items():
            F2[k] = F2.get(k, 0) + v
        res = L.transversal_linearization(F1, F2, N=a.N, y_trunc=a.y_trunc, theta=theta)
        return {"kind": "transversal", **res.to_json()}, 0
    spec = _spec_from_args(a, 1)
    prof = L.divergence_profile(spec)
    rows = []
    for j, v in prof:
        rows.append({"j": j, "root": [str(v.lower()), str(v.upper())], "expected": 2 * j,
                     "identity_ok": L.coefficient_identity(spec, j)})
    return {"kind": "divergence", "profile": rows}, 0


HANDLERS = {
    "forge": cmd_forge, "certify": cmd_certify, "escape": cmd_escape, "arith": cmd_arith,
    "orbit": cmd_orbit, "perk": cmd_perk, "linearize": cmd_linearize,
}


# ---------------------------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="key = value file with [global] and per-command sections")
    common.add_argument("--prec", type=int, default=256, help="working precision in bits (default 256)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="write output here instead of stdout (forge: the seed file)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for per-point work")

    p = _Parser(prog="cremerlab", description="Validated experiments with finite-orbit maps.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    f = sub.add_parser("forge", parents=[common], help="forge a seed and certify it")
    f.add_argument("--depth", type=int, default=3)
    f.add_argument("--materialize", type=int, default=2)
    f.add_argument("--bit-budget", dest="bit_budget", type=int, default=1 << 20)
    f.add_argument("--report", help="write the certification report here instead of stdout")

    c = sub.add_parser("certify", parents=[common], help="certify a seed file in both directions")
    c.add_argument("--seed")

    e = sub.add_parser("escape", parents=[common], help="escape certificate for points of C^n x C")
    e.add_argument("--seed")
    e.add_argument("--toy", type=_bool, nargs="?", const=True, default=False)
    e.add_argument("--point", action="append", help='"x,y" or "x1,...,xn,y"; repeatable')
    e.add_argument("--radius", type=float, default=0.4, help="radius of U (d = 2 radius)")
    e.add_argument("--center", type=complex, default=0j, help="center of U")
    e.add_argument("--direction", choices=("fwd", "bwd"), default="fwd")

    r = sub.add_parser("arith", parents=[common], help="small divisors and Bruno-type sums")
    r.add_argument("--angle", default="golden", help="golden, forged, cf:a1,a2,..., frac:p/q, seed:FILE")
    r.add_argument("--bruno", type=int, default=10, help="number of partial sums K")
    r.add_argument("--omega", type=int, nargs="*", help="m values for Omega(m)")
    r.add_argument("--cremer", type=int, nargs="*", help="m values for |lambda^m - 1|^{1/m}")

    o = sub.add_parser("orbit", parents=[common], help="iterate a polynomial map in ball arithmetic")
    o.add_argument("--map")
    o.add_argument("--inverse")
    o.add_argument("--point")
    o.add_argument("--radius", type=float, default=1.0)
    o.add_argument("--center")
    o.add_argument("--budget", type=int, default=1000)
    o.add_argument("--direction", choices=("forward", "backward"), default="forward")

    k = sub.add_parser("perk", parents=[common], help="periodic points of period k in a ball")
    k.add_argument("--map")
    k.add_argument("--k", type=int, default=1)
    k.add_argument("--radius", type=float, default=1.0)
    k.add_argument("--tol", type=float, default=1e-10)
    k.add_argument("--rings", type=int, default=3)
    k.add_argument("--grid", type=int, default=16)
    k.add_argument("--eps", type=float, default=None, help="clustering radius (default radius / 4)")

    n = sub.add_parser("linearize", parents=[common], help="divergence profile or transversal linearization")
    n.add_argument("--seed")
    n.add_argument("--toy", type=_bool, nargs="?", const=True, default=False)
    n.add_argument("--germ", help='nonlinear parts "P,Q" of F = (lambda x + P, y + Q)')
    n.add_argument("--angle", default="golden")
    n.add_argument("--N", type=int, default=6)
    n.add_argument("--y-trunc", dest="y_trunc", type=int, default=6)
    return p


def _apply_config(parser, argv):
    cfg_path = None
    for i, t in enumerate(argv):
        if t == "--config" and i + 1 < len(argv):
            cfg_path = argv[i + 1]
        elif t.startswith("--config="):
            cfg_path = t.split("=", 1)[1]
    cmd = next((t for t in argv if t in COMMANDS), None)
    if not cfg_path or cmd is None:
        return
    sub = parser._subparsers._group_actions[0].choices[cmd]
    acts = {a.dest: a for a in sub._actions}
    vals = {}
    for key, raw in RunConfig.load(cfg_path).for_command(cmd).items():
        key = key.replace("-", "_")
        act = acts.get(key)
        if act is None:
            raise BadInput(f"unknown config key {key!r} for {cmd}")
        conv = act.type or (lambda s: s)
        if isinstance(act, argparse._AppendAction):
            if any(t == f or t.startswith(f + "=") for t in argv for f in act.option_strings):
                continue  # explicit flags replace, rather than extend, the configured list
            vals[key] = [conv(s.strip()) for s in raw.split(";")]
        elif act.nargs == "*":
            vals[key] = [conv(s) for s in raw.split()]
        else:
            vals[key] = conv(raw)
    sub.set_defaults(**vals)


def _write(text: str, path):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        parser = build_parser()
        _apply_config(parser, argv)
        a = parser.parse_args(argv)
        payload, code = HANDLERS[a.command](a)
        if isinstance(payload, dict):
            payload = {"format": "cremerlab", "version": REPORT_VERSION, "precision_bits": a.prec, **payload}
            text = dumps_canonical(payload)
        else:
            text = payload
        _write(text, a.report if a.command == "forge" else a.out)
        return code
    except CremerLabError as exc:
        err = {"error": type(exc).__name__, "message": str(exc), "exit_code": exc.exit_code}
        if isinstance(exc, InsufficientDepth) and exc.needed_level is not None:
            err["needed_level"] = exc.needed_level
        sys.stderr.write(json.dumps(err, sort_keys=True) + "\n")
        return exc.exit_code


def main(argv=None):
    sys.exit(run(argv))


np.seterr(all="ignore")

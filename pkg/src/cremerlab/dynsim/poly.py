"""Sparse multivariate polynomials, polynomial maps and vector fields, and a small parser.

Grammar accepted by :func:`parse_polys` (whitespace ignored)::

    list   = expr { "," expr } ;
    expr   = [ "+" | "-" ] term { ( "+" | "-" ) term } ;
    term   = factor { ( "*" | "/" ) factor } ;       (* "/" only by a constant *)
    factor = atom [ "^" integer ] ;
    atom   = number | [ number ] "i" | variable | "(" expr ")" ;
    number = digits [ "." digits ] [ ( "e" | "E" ) [ "+" | "-" ] digits ] ;

Variables default to ``z`` (one component), ``x, y`` (two) or ``x1..xn``.
"""

from __future__ import annotations

import ast
import re
from functools import cached_property
from numbers import Integral

import numpy as np

from ..errors import BadInput
from ..numerics.ball import BallComplex


class Poly:
    """Polynomial in ``nvars`` variables as {exponent tuple: complex coefficient}."""

    __slots__ = ("terms", "nvars")

    def __init__(self, terms: dict, nvars: int):
        self.nvars = nvars
        self.terms = {tuple(int(e) for e in k): complex(v) for k, v in terms.items() if v != 0}

    @classmethod
    def const(cls, c, nvars):
        return cls({(0,) * nvars: c}, nvars)

    @classmethod
    def var(cls, i, nvars):
        e = [0] * nvars
        e[i] = 1
        return cls({tuple(e): 1}, nvars)

    def __add__(self, o):
        o = self._lift(o)
        t = dict(self.terms)
        for k, v in o.terms.items():
            t[k] = t.get(k, 0) + v
        return Poly(t, self.nvars)

    __radd__ = __add__

    def __neg__(self):
        return Poly({k: -v for k, v in self.terms.items()}, self.nvars)

    def __sub__(self, o):
        return self + (-self._lift(o))

    def __rsub__(self, o):
        return self._lift(o) - self

    def __mul__(self, o):
        o = self._lift(o)
        t = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in o.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                t[k] = t.get(k, 0) + v1 * v2
        return Poly(t, self.nvars)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if not isinstance(e, Integral) or e < 0:
            raise BadInput("polynomial powers must be non-negative integers")
        e = int(e)
        out = Poly.const(1, self.nvars)
        base = self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def __eq__(self, o):
        return isinstance(o, Poly) and self.nvars == o.nvars and self.terms == o.terms

    def _lift(self, o):
        if isinstance(o, Poly):
            if o.nvars != self.nvars:
                raise BadInput("polynomials in different numbers of variables")
            return o
        return Poly.const(o, self.nvars)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(k) for k in self.terms), default=-1)

    def min_degree(self) -> int:
        return min((sum(k) for k in self.terms), default=-1)

    def homogeneous(self, d: int) -> "Poly":
        return Poly({k: v for k, v in self.terms.items() if sum(k) == d}, self.nvars)

    def truncate(self, d: int) -> "Poly":
        return Poly({k: v for k, v in self.terms.items() if sum(k) <= d}, self.nvars)

    def constant(self) -> complex:
        return self.terms.get((0,) * self.nvars, 0j)

    def diff(self, i: int) -> "Poly":
        t = {}
        for k, v in self.terms.items():
            if k[i]:
                k2 = list(k)
                k2[i] -= 1
                t[tuple(k2)] = v * k[i]
        return Poly(t, self.nvars)

    def compose(self, subs: list, max_degree: int | None = None) -> "Poly":
        """self(subs[0], ..., subs[n-1]), optionally dropping total degree > max_degree."""
        if len(subs) != self.nvars:
            raise BadInput("wrong number of substitutions")
        nv = subs[0].nvars
        cache = [{0: Poly.const(1, nv)} for _ in subs]

        def pw(i, e):
            c = cache[i]
            if e not in c:
                c[e] = _trunc(pw(i, e - 1) * subs[i], max_degree)
            return c[e]

        out = Poly({}, nv)
        for k, v in self.terms.items():
            m = Poly.const(v, nv)
            for i, e in enumerate(k):
                if e:
                    m = _trunc(m * pw(i, e), max_degree)
            out = out + m
        return out

    def __call__(self, z):
        """Float evaluation; ``z`` is a sequence of complex scalars or arrays."""
        out = 0j
        for k, v in self.terms.items():
            m = v
            for zi, e in zip(z, k):
                if e:
                    m = m * zi ** e
            out = out + m
        return out

    def eval_ball(self, z: list, prec: int = 128) -> BallComplex:
        out = BallComplex(0, 0, prec)
        pw = [dict() for _ in z]
        for k, v in self.terms.items():
            m = BallComplex.from_complex(v, prec)
            for i, e in enumerate(k):
                if e:
                    if e not in pw[i]:
                        pw[i][e] = z[i] ** e
                    m = m * pw[i][e]
            out = out + m
        return out

    def to_str(self, names=None) -> str:
        names = names or default_names(self.nvars)
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms, key=lambda k: (sum(k), tuple(-e for e in k))):
            v = self.terms[k]
            mono = "*".join(n if e == 1 else f"{n}^{e}" for n, e in zip(names, k) if e)
            c = _cstr(v)
            if mono:
                parts.append(mono if c == "1" else f"-{mono}" if c == "-1" else f"{c}*{mono}")
            else:
                parts.append(c)
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"Poly({self.to_str()})"


def _trunc(p, d):
    return p if d is None else p.truncate(d)


def _cstr(v: complex) -> str:
    def r(x):
        return str(int(x)) if float(x).is_integer() else repr(float(x))

    if v.imag == 0:
        return r(v.real)
    if v.real == 0:
        return f"{r(v.imag)}i"
    return f"({r(v.real)}{'+' if v.imag >= 0 else '-'}{r(abs(v.imag))}i)"


def default_names(n: int) -> tuple:
    if n == 1:
        return ("z",)
    if n == 2:
        return ("x", "y")
    return tuple(f"x{i}" for i in range(1, n + 1))


_IMAG_NUM = re.compile(r"(?<![\w.])(\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)i\b")
_IMAG_UNIT = re.compile(r"(?<![\w.])i\b")


def parse_polys(text: str, names=None) -> list:
    """Comma-separated polynomials; see the module docstring for the grammar."""
    if not isinstance(text, str) or not text.strip():
        raise BadInput("empty polynomial expression")
    src = _IMAG_UNIT.sub("1j", _IMAG_NUM.sub(r"\1j", text.replace("^", "**")))
    try:
        tree = ast.parse(src.strip(), mode="eval").body
    except SyntaxError as exc:
        raise BadInput(f"cannot parse {text!r}: {exc.msg}") from None
    items = tree.elts if isinstance(tree, ast.Tuple) else [tree]
    if names is None:
        used = sorted({n.id for n in ast.walk(tree) if isinstance(n, ast.Name)})
        names = default_names(len(items))
        if len(items) == 1 and len(used) == 1:
            names = tuple(used)
    names = tuple(names)
    return [_build(node, names, text) for node in items]


def _build(node, names, text) -> Poly:
    n = len(names)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, complex)) \
            and not isinstance(node.value, bool):
        return Poly.const(node.value, n)
    if isinstance(node, ast.Name):
        if node.id not in names:
            raise BadInput(f"unknown variable {node.id!r} in {text!r} (expected {', '.join(names)})")
        return Poly.var(names.index(node.id), n)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        p = _build(node.operand, names, text)
        return -p if isinstance(node.op, ast.USub) else p
    if isinstance(node, ast.BinOp):
        if isinstance(node.op, ast.Pow):
            e = node.right
            if isinstance(e, ast.Constant) and isinstance(e.value, int) and e.value >= 0:
                return _build(node.left, names, text) ** e.value
            raise BadInput(f"exponents must be non-negative integer literals in {text!r}")
        a = _build(node.left, names, text)
        b = _build(node.right, names, text)
        if isinstance(node.op, ast.Add):
            return a + b
        if isinstance(node.op, ast.Sub):
            return a - b
        if isinstance(node.op, ast.Mult):
            return a * b
        if isinstance(node.op, ast.Div):
            if b.degree() > 0 or b.is_zero:
                raise BadInput(f"division only by a nonzero constant in {text!r}")
            return a * (1 / b.constant())
    raise BadInput(f"unsupported syntax in {text!r}")


class _Arrays:
    """Flat (coef, exps, comp) triple consumed by the float kernels."""

    def __init__(self, comps: list, dim: int):
        rows = [(c, k, i) for i, p in enumerate(comps) for k, c in sorted(p.terms.items())]
        self.coef = np.array([r[0] for r in rows], dtype=np.complex128)
        self.exps = np.array([r[1] for r in rows], dtype=np.int64).reshape(len(rows), dim)
        self.comp = np.array([r[2] for r in rows], dtype=np.int64)
        self.dim = dim


class PolyMap:
    """Polynomial self-map of C^n, optionally with an exact polynomial inverse."""

    def __init__(self, comps: list, inverse: list | None = None, name: str = ""):
        if not comps:
            raise BadInput("a map needs at least one component")
        self.dim = len(comps)
        if any(p.nvars != self.dim for p in comps):
            raise BadInput("map components must use exactly dim variables")
        self.comps = list(comps)
        self.inverse = list(inverse) if inverse is not None else None
        if self.inverse is not None and len(self.inverse) != self.dim:
            raise BadInput("inverse has the wrong dimension")
        self.name = name

    @classmethod
    def parse(cls, text: str, inverse: str | None = None, names=None, name: str = "") -> "PolyMap":
        comps = parse_polys(text, names)
        inv = parse_polys(inverse, names or default_names(len(comps))) if inverse else None
        return cls(comps, inv, name=name or text)

    @classmethod
    def linear(cls, M, name: str = "") -> "PolyMap":
        M = np.asarray(M, dtype=np.complex128)
        n = M.shape[0]
        comps = [sum((Poly.var(j, n) * M[i, j] for j in range(n)), Poly({}, n)) for i in range(n)]
        inv = np.linalg.inv(M)
        icomps = [sum((Poly.var(j, n) * inv[i, j] for j in range(n)), Poly({}, n)) for i in range(n)]
        return cls(comps, icomps, name=name)

    def inverted(self) -> "PolyMap":
        if self.inverse is None:
            raise BadInput("map has no declared inverse")
        return PolyMap(self.inverse, self.comps, name=f"({self.name})^-1")

    def __call__(self, p):
        return np.array([c(p) for c in self.comps], dtype=np.complex128)

    def eval_ball(self, p: list, prec: int = 128) -> list:
        return [c.eval_ball(p, prec) for c in self.comps]

    def compose(self, inner: "PolyMap", max_degree: int | None = None) -> "PolyMap":
        """self o inner."""
        comps = [c.compose(inner.comps, max_degree) for c in self.comps]
        inv = None
        if self.inverse is not None and inner.inverse is not None and max_degree is None:
            inv = [c.compose(self.inverse) for c in inner.inverse]
        return PolyMap(comps, inv, name=f"{self.name}o{inner.name}")

    def power(self, m: int, max_degree: int | None = None) -> "PolyMap":
        out = self
        for _ in range(m - 1):
            out = self.compose(out, max_degree)
        return out

    def fixes_origin(self) -> bool:
        return all(abs(c.constant()) == 0 for c in self.comps)

    def linear_part(self) -> np.ndarray:
        n = self.dim
        M = np.zeros((n, n), dtype=np.complex128)
        for i, c in enumerate(self.comps):
            for j in range(n):
                e = [0] * n
                e[j] = 1
                M[i, j] = c.terms.get(tuple(e), 0)
        return M

    def jacobian_poly(self) -> list:
        return [[c.diff(j) for j in range(self.dim)] for c in self.comps]

    @cached_property
    def arrays(self) -> _Arrays:
        return _Arrays(self.comps, self.dim)

    @cached_property
    def inverse_arrays(self) -> _Arrays:
        if self.inverse is None:
            raise BadInput("map has no declared inverse")
        return _Arrays(self.inverse, self.dim)

    def eval_jac(self, pts: np.ndarray):
        from .. import _kernels

        a = self.arrays
        pts = np.atleast_2d(np.asarray(pts, dtype=np.complex128))
        return _kernels.poly_eval_jac(a.coef, a.exps, a.comp, a.dim, pts)

    def check_inverse(self, pts, tol: float = 1e-9) -> bool:
        """Declared inverse round-trips on the given points."""
        inv = self.inverted()
        pts = np.atleast_2d(np.asarray(pts, dtype=np.complex128))
        for p in pts:
            q = inv(self(p))
            if np.max(np.abs(q - p)) > tol * max(1.0, np.max(np.abs(p))):
                return False
        return True

    def to_strings(self) -> list:
        return [c.to_str() for c in self.comps]

    def __repr__(self):
        return f"PolyMap({', '.join(self.to_strings())})"


class PolyVectorField:
    """Polynomial vector field sum_i X_i d/dz_i on C^n."""

    def __init__(self, comps: list, name: str = ""):
        self.dim = len(comps)
        if not comps or any(p.nvars != self.dim for p in comps):
            raise BadInput("field components must use exactly dim variables")
        self.comps = list(comps)
        self.name = name

    @classmethod
    def parse(cls, text: str, names=None, name: str = "") -> "PolyVectorField":
        return cls(parse_polys(text, names), name=name or text)

    @property
    def singular(self) -> bool:
        """True when the field vanishes at the origin."""
        return all(abs(c.constant()) == 0 for c in self.comps)

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.comps)

    def __call__(self, p):
        return np.array([c(p) for c in self.comps], dtype=np.complex128)

    @cached_property
    def arrays(self) -> _Arrays:
        return _Arrays(self.comps, self.dim)

    def to_strings(self) -> list:
        return [c.to_str() for c in self.comps]

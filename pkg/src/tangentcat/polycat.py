"""Polynomial morphism categories over exact scalar domains.

Objects are ranks; a morphism F^m -> F^n is an n-tuple of formal
polynomials in m variables with coefficients in an exact domain: the
rationals, a prime field Z/p, or the naturals.  Equality is equality of
canonical forms, not of functions, so x and x^p differ over Z/p.  The
tangent functor doubles the rank and sends f to (f(x), J_f(x).v) where
the Jacobian uses the term-by-term rule d(x^k)/dx = k x^(k-1) with k
reduced into the domain.
"""

from __future__ import annotations

import re
from fractions import Fraction

from . import nbullet, weil
from .errors import ArityMismatch, DomainMismatch, ManifestParse


class Domain:
    """An exact scalar domain: tag 'rational', 'zp' or 'nat'."""

    def __init__(self, tag: str, p: int | None = None):
        if tag == "zp":
            if p is None or p < 2 or any(p % d == 0 for d in range(2, int(p**0.5) + 1)):
                raise ValueError(f"modulus {p!r} is not prime")
        elif tag not in ("rational", "nat"):
            raise ValueError(f"unknown domain tag {tag!r}")
        self.tag = tag
        self.p = p

    @classmethod
    def rational(cls):
        return cls("rational")

    @classmethod
    def zp(cls, p):
        return cls("zp", p)

    @classmethod
    def nat(cls):
        return cls("nat")

    @classmethod
    def parse(cls, text: str) -> "Domain":
        if text == "rational":
            return cls.rational()
        if text == "nat":
            return cls.nat()
        if text.startswith("zp:"):
            return cls.zp(int(text[3:]))
        raise ValueError(f"unknown domain {text!r}")

    @property
    def is_field(self) -> bool:
        return self.tag in ("rational", "zp")

    def normalize(self, value):
        if self.tag == "rational":
            return Fraction(value)
        if self.tag == "zp":
            if isinstance(value, Fraction):
                return (value.numerator * pow(value.denominator, -1, self.p)) % self.p
            return value % self.p
        if isinstance(value, Fraction):
            if value.denominator != 1:
                raise ValueError(f"{value} is not a natural number")
            value = value.numerator
        if value < 0:
            raise ValueError(f"{value} is not a natural number")
        return int(value)

    def from_int(self, n: int):
        if self.tag == "zp":
            return n % self.p
        if self.tag == "rational":
            return Fraction(n)
        if n < 0:
            raise ValueError(f"{n} is not a natural number")
        return n

    def add(self, a, b):
        return self.normalize(a + b)

    def mul(self, a, b):
        return self.normalize(a * b)

    def scale_by_int(self, n: int, a):
        """n*a with n reduced into the domain first (derivative coefficients)."""
        return self.mul(self.from_int(n) if n >= 0 else self.normalize(n), a)

    def __eq__(self, other):
        return isinstance(other, Domain) and (self.tag, self.p) == (other.tag, other.p)

    def __hash__(self):
        return hash((self.tag, self.p))

    def __repr__(self):
        return f"zp:{self.p}" if self.tag == "zp" else self.tag


def _check_domains(a: Domain, b: Domain):
    if a != b:
        raise DomainMismatch(f"{a!r} vs {b!r}")


class Polynomial:
    """Formal polynomial: map from exponent vector to nonzero coefficient."""

    __slots__ = ("domain", "nvars", "terms")

    def __init__(self, domain: Domain, nvars: int, terms):
        canonical = {}
        for exps, coeff in terms.items():
            exps = tuple(exps)
            if len(exps) != nvars or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent vector {exps} for {nvars} variables")
            coeff = domain.normalize(coeff)
            if coeff != 0:
                canonical[exps] = coeff
        self.domain = domain
        self.nvars = nvars
        self.terms = canonical

    @classmethod
    def constant(cls, domain, nvars, value):
        return cls(domain, nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, domain, nvars, i):
        assert 0 <= i < nvars
        exps = tuple(1 if j == i else 0 for j in range(nvars))
        return cls(domain, nvars, {exps: domain.from_int(1)})

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        _check_domains(self.domain, other.domain)
        assert self.nvars == other.nvars
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = self.domain.add(out.get(e, 0), c)
        return Polynomial(self.domain, self.nvars, out)

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return self.scale(other)
        _check_domains(self.domain, other.domain)
        assert self.nvars == other.nvars
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = self.domain.add(out.get(e, 0), self.domain.mul(c1, c2))
        return Polynomial(self.domain, self.nvars, out)

    def scale(self, scalar):
        scalar = self.domain.normalize(scalar)
        return Polynomial(
            self.domain, self.nvars, {e: self.domain.mul(c, scalar) for e, c in self.terms.items()}
        )

    def substitute(self, args):
        """Evaluate at a tuple of polynomials (one per variable)."""
        assert len(args) == self.nvars
        nvars = args[0].nvars if args else 0
        domain = args[0].domain if args else self.domain
        out = Polynomial(domain, nvars, {})
        for exps, coeff in self.terms.items():
            term = Polynomial.constant(domain, nvars, coeff)
            for i, e in enumerate(exps):
                for _ in range(e):
                    term = term * args[i]
            out = out + term
        return out

    def degree(self):
        return max((sum(e) for e in self.terms), default=0)

    def sorted_terms(self):
        """Graded-lexicographic order, for deterministic output."""
        return sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), kv[0]))

    def __eq__(self, other):
        return (
            isinstance(other, Polynomial)
            and self.domain == other.domain
            and self.nvars == other.nvars
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.domain, self.nvars, tuple(self.sorted_terms())))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for exps, coeff in self.sorted_terms():
            factors = [f"x{i}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(exps) if e]
            if not factors:
                parts.append(str(coeff))
            elif coeff == 1:
                parts.append("*".join(factors))
            else:
                parts.append("*".join([str(coeff)] + factors))
        return " + ".join(parts)


def partial(poly: Polynomial, i: int) -> Polynomial:
    """Formal partial derivative in variable i (0-based): d(x^k)/dx = k x^(k-1)."""
    assert 0 <= i < poly.nvars
    out = {}
    for exps, coeff in poly.terms.items():
        k = exps[i]
        if k == 0:
            continue
        new = tuple(e - 1 if j == i else e for j, e in enumerate(exps))
        scaled = poly.domain.scale_by_int(k, coeff)
        if scaled != 0:
            out[new] = poly.domain.add(out.get(new, 0), scaled)
    return Polynomial(poly.domain, poly.nvars, out)


class PolyMorphism:
    """A tuple of polynomials: a morphism F^source_arity -> F^target_arity."""

    __slots__ = ("domain", "source_arity", "target_arity", "components")

    def __init__(self, domain: Domain, source_arity: int, components):
        components = tuple(components)
        for c in components:
            _check_domains(c.domain, domain)
            if c.nvars != source_arity:
                raise ArityMismatch(f"component in {c.nvars} variables, expected {source_arity}")
        self.domain = domain
        self.source_arity = source_arity
        self.target_arity = len(components)
        self.components = components

    @classmethod
    def identity(cls, domain, m):
        return cls(domain, m, [Polynomial.variable(domain, m, i) for i in range(m)])

    @classmethod
    def from_matrix(cls, domain, entries, source_arity=None):
        """Linear morphism with the given scalar matrix."""
        rows = [tuple(row) for row in entries]
        cols = source_arity if source_arity is not None else (len(rows[0]) if rows else 0)
        comps = []
        for row in rows:
            terms = {}
            for j, x in enumerate(row):
                x = domain.normalize(x)
                if x != 0:
                    terms[tuple(1 if jj == j else 0 for jj in range(cols))] = x
            comps.append(Polynomial(domain, cols, terms))
        return cls(domain, cols, comps)

    def __eq__(self, other):
        return (
            isinstance(other, PolyMorphism)
            and self.domain == other.domain
            and self.source_arity == other.source_arity
            and self.components == other.components
        )

    def __hash__(self):
        return hash((self.domain, self.source_arity, self.components))

    def __repr__(self):
        comps = ", ".join(map(repr, self.components))
        return f"PolyMorphism({self.domain!r}, {self.source_arity} -> {self.target_arity}; {comps})"

    def as_matrix(self):
        """Scalar matrix when every component is linear homogeneous, else None."""
        rows = []
        for comp in self.components:
            row = [self.domain.from_int(0)] * self.source_arity
            for exps, coeff in comp.terms.items():
                if sum(exps) != 1:
                    return None
                row[exps.index(1)] = coeff
            rows.append(tuple(row))
        return tuple(rows)


def compose(g: PolyMorphism, f: PolyMorphism) -> PolyMorphism:
    """g after f by simultaneous substitution."""
    _check_domains(g.domain, f.domain)
    if g.source_arity != f.target_arity:
        raise ArityMismatch(
            f"cannot compose arity {g.source_arity} after target arity {f.target_arity}"
        )
    if f.target_arity == 0:
        comps = [
            Polynomial(g.domain, f.source_arity, {(0,) * f.source_arity: c})
            for c in (comp.terms.get((), 0) for comp in g.components)
        ]
        return PolyMorphism(g.domain, f.source_arity, comps)
    return PolyMorphism(
        g.domain, f.source_arity, [c.substitute(f.components) for c in g.components]
    )


def equals(f: PolyMorphism, g: PolyMorphism) -> bool:
    return f == g


def identity(domain: Domain, m: int) -> PolyMorphism:
    return PolyMorphism.identity(domain, m)


def jacobian(f: PolyMorphism):
    """target_arity x source_arity matrix of formal partial derivatives."""
    return tuple(
        tuple(partial(comp, j) for j in range(f.source_arity)) for comp in f.components
    )


def tangent_object(k: int) -> int:
    return 2 * k


def tangent(f: PolyMorphism) -> PolyMorphism:
    """T(f): (x, v) |-> (f(x), J_f(x).v) on F^2m -> F^2n."""
    m = f.source_arity
    domain = f.domain
    lift = [Polynomial.variable(domain, 2 * m, i) for i in range(m)]
    comps = [c.substitute(lift) for c in f.components]
    jac = jacobian(f)
    for i in range(f.target_arity):
        acc = Polynomial(domain, 2 * m, {})
        for j in range(m):
            dij = jac[i][j]
            if dij.is_zero():
                continue
            acc = acc + dij.substitute(lift) * Polynomial.variable(domain, 2 * m, m + j)
        comps.append(acc)
    return PolyMorphism(domain, 2 * m, comps)


def structural(domain: Domain, kind: str, k: int) -> PolyMorphism:
    """The five structural maps at rank k, as degree-one morphisms."""
    mat = nbullet.structural(kind, k)
    return PolyMorphism.from_matrix(domain, mat.entries, mat.cols)


def weil_action(algebra: weil.WeilAlgebra, k: int) -> int:
    """Rank of T_A(F^k), coordinates blocked per basis monomial."""
    return algebra.dimension * k


def weil_action_on_theta(theta: weil.WeilMorphism, k: int, domain: Domain) -> PolyMorphism:
    """Linear action of an algebra morphism: kron(basis matrix, I_k)."""
    mat = nbullet.kron(nbullet.NMatrix(theta.basis_matrix()), nbullet.NMatrix.identity(k))
    return PolyMorphism.from_matrix(domain, mat.entries, mat.cols)


def _tangent_power(f: PolyMorphism, n: int) -> PolyMorphism:
    """T_{W^n}(f): (x, v1..vn) |-> (f(x), J_f(x).v1, ..., J_f(x).vn)."""
    m = f.source_arity
    domain = f.domain
    width = (n + 1) * m
    lift = [Polynomial.variable(domain, width, i) for i in range(m)]
    comps = [c.substitute(lift) for c in f.components]
    jac = [[d.substitute(lift) for d in row] for row in jacobian(f)]
    for block in range(1, n + 1):
        for i in range(f.target_arity):
            acc = Polynomial(domain, width, {})
            for j in range(m):
                if jac[i][j].is_zero():
                    continue
                acc = acc + jac[i][j] * Polynomial.variable(domain, width, block * m + j)
            comps.append(acc)
    return PolyMorphism(domain, width, comps)


def weil_action_on_f(algebra: weil.WeilAlgebra, f: PolyMorphism) -> PolyMorphism:
    """T_A(f) by left-nested recursion on the canonical decomposition of A."""
    blocks = weil.decompose(algebra)
    out = f
    for n in reversed(blocks):
        out = _tangent_power(out, n)
    return out


# -- polynomial string grammar -------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<var>x\d+)|(?P<num>-?\d+(?:/\d+)?)|(?P<mod>mod)|(?P<op>[+*^]))"
)


def parse_polynomial(text: str, nvars: int, domain: Domain, where: str = "<string>") -> Polynomial:
    """Parse `2*x0^2*x1 + 3` style syntax.

    Variables are x0..x{nvars-1}; coefficients are integers, a/b rationals
    or `k mod p` residues; operators are +, * and ^ with a nonnegative
    integer exponent.  Whitespace is insignificant.
    """
    def location(at):
        line = text.count("\n", 0, at) + 1
        col = at - text.rfind("\n", 0, at)
        return line, col

    def err(msg, at):
        line, col = location(max(at, 0))
        raise ManifestParse(f"{where}: {msg}", line, col)

    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            rest = text[pos:].lstrip()
            if not rest:
                break
            err(f"cannot tokenize {rest[:10]!r}", pos)
        tokens.append((m.lastgroup, m.group(m.lastgroup), m.start(m.lastgroup)))
        pos = m.end()
    if not tokens:
        err("empty polynomial", 0)

    # fold `k mod p` into single residue tokens
    folded = []
    i = 0
    while i < len(tokens):
        kind, value, at = tokens[i]
        if (
            kind == "num"
            and i + 2 < len(tokens)
            and tokens[i + 1][0] == "mod"
            and tokens[i + 2][0] == "num"
        ):
            if domain.tag != "zp":
                err("`mod` coefficients only make sense over zp domains", at)
            if int(tokens[i + 2][1]) != domain.p:
                err(f"modulus {tokens[i + 2][1]} does not match domain {domain!r}", at)
            folded.append(("num", value, at))
            i += 3
            continue
        if kind == "mod":
            err("stray `mod`", at)
        folded.append((kind, value, at))
        i += 1

    def parse_coeff(value, at):
        if "/" in value:
            if domain.tag != "rational":
                err("rational coefficient in a non-rational domain", at)
            num, den = value.split("/")
            return Fraction(int(num), int(den))
        n = int(value)
        if domain.tag == "nat" and n < 0:
            err("negative coefficient over the naturals", at)
        return domain.normalize(n)

    result = Polynomial(domain, nvars, {})
    term_coeff = None
    term_exps = None

    def flush():
        nonlocal result, term_coeff, term_exps
        if term_exps is not None:
            result = result + Polynomial(domain, nvars, {tuple(term_exps): term_coeff})
        term_coeff = None
        term_exps = None

    expect_factor = True
    i = 0
    while i < len(folded):
        kind, value, at = folded[i]
        if kind == "op" and value == "+":
            if expect_factor:
                err("`+` without a preceding term", at)
            flush()
            expect_factor = True
            i += 1
            continue
        if kind == "op" and value == "*":
            if expect_factor:
                err("`*` without a preceding factor", at)
            expect_factor = True
            i += 1
            continue
        if kind == "op" and value == "^":
            err("`^` without a base variable", at)
        if not expect_factor:
            err(f"missing operator before {value!r}", at)
        if term_exps is None:
            term_coeff = domain.from_int(1)
            term_exps = [0] * nvars
        if kind == "num":
            term_coeff = domain.mul(term_coeff, parse_coeff(value, at))
            expect_factor = False
            i += 1
            continue
        # variable, possibly with an exponent
        index = int(value[1:])
        if index >= nvars:
            err(f"variable {value} out of range for arity {nvars}", at)
        exponent = 1
        if i + 1 < len(folded) and folded[i + 1][:2] == ("op", "^"):
            if i + 2 >= len(folded) or folded[i + 2][0] != "num":
                err("`^` must be followed by an integer literal", at)
            exponent = int(folded[i + 2][1])
            if exponent < 0 or "/" in folded[i + 2][1]:
                err("exponent must be a nonnegative integer literal", at)
            i += 2
        term_exps[index] += exponent
        expect_factor = False
        i += 1
    if expect_factor:
        err("dangling operator at end of polynomial", len(text) - 1)
    flush()
    return result


def parse_morphism(texts, nvars: int, domain: Domain, where: str = "<string>") -> PolyMorphism:
    comps = [
        parse_polynomial(t, nvars, domain, where=f"{where}[{i}]") for i, t in enumerate(texts)
    ]
    return PolyMorphism(domain, nvars, comps)

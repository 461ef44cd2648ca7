"""Graded pieces of hypersurface rings F_p[x_1..x_s]/(f).

A single homogeneous relation keeps everything elementary: {f} is already a
Groebner basis of (f), so normal forms are plain division by f, and the
standard monomials of degree m are the degree-m monomials not divisible by
the leading term of f.  The monomial order is graded reverse lexicographic
with x_1 > x_2 > ... > x_s throughout; nothing here is meaningful for any
other order, so it is not configurable.

``relation=None`` gives the ambient polynomial ring itself; the smoothness
check on curves needs quotients of that ring, and everything degreewise
works verbatim with the unreduced Hilbert function.
"""

from __future__ import annotations

import heapq
import math
import re
from typing import Iterator, Optional, Sequence

import numpy as np

from hklab.fp_linalg import PrimeField, PrimeFieldMatrix

__all__ = [
    "Monomial",
    "Polynomial",
    "HypersurfaceRing",
    "SpecParseError",
    "grevlex_key",
    "graded_map_matrix",
    "parse_polynomial",
    "parse_ring_spec",
]

Monomial = tuple  # exponent tuples; length = ring's variable count


class SpecParseError(ValueError):
    """Raised for malformed polynomial / ring / ideal descriptions."""


def grevlex_key(mono: Monomial):
    """Sort key; larger key = larger monomial in grevlex with x1 > ... > xs."""
    return (sum(mono), tuple(-e for e in reversed(mono)))


def _heap_key(mono: Monomial):
    # Min-heap companion of grevlex_key: smallest key = largest monomial.
    return (-sum(mono), tuple(reversed(mono)))


def _var_names(nvars: int) -> list:
    if nvars <= 4:
        return ["x", "y", "z", "w"][:nvars]
    return [f"x{i + 1}" for i in range(nvars)]


class Polynomial:
    """Multivariate polynomial over a prime field, stored sparsely.

    Treated as immutable: no method mutates ``terms`` after construction,
    and the dict is never handed out.
    """

    __slots__ = ("field", "nvars", "terms")

    def __init__(self, field: PrimeField, nvars: int, terms: dict) -> None:
        p = field.p
        clean = {}
        for mono, coeff in terms.items():
            if len(mono) != nvars:
                raise ValueError("exponent tuple length != variable count")
            if any(e < 0 for e in mono):
                raise ValueError("negative exponent")
            c = coeff % p
            if c:
                clean[tuple(mono)] = c
        self.field = field
        self.nvars = nvars
        self.terms = clean

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, field: PrimeField, nvars: int) -> "Polynomial":
        return cls(field, nvars, {})

    @classmethod
    def constant(cls, field: PrimeField, nvars: int, c: int) -> "Polynomial":
        return cls(field, nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, field: PrimeField, nvars: int, i: int) -> "Polynomial":
        if not 0 <= i < nvars:
            raise ValueError("variable index out of range")
        mono = tuple(1 if j == i else 0 for j in range(nvars))
        return cls(field, nvars, {mono: 1})

    @classmethod
    def monomial(
        cls, field: PrimeField, nvars: int, mono: Monomial, c: int = 1
    ) -> "Polynomial":
        return cls(field, nvars, {tuple(mono): c})

    # -- structure ---------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_homogeneous(self) -> bool:
        degrees = {sum(m) for m in self.terms}
        return len(degrees) <= 1

    @property
    def degree(self) -> Optional[int]:
        """Total degree; None for the zero polynomial."""
        if not self.terms:
            return None
        return max(sum(m) for m in self.terms)

    def leading_monomial(self) -> Monomial:
        if not self.terms:
            raise ValueError("zero polynomial has no leading monomial")
        return max(self.terms, key=grevlex_key)

    # -- arithmetic ---------------------------------------------------------

    def _check_compatible(self, other: "Polynomial") -> None:
        if self.field.p != other.field.p or self.nvars != other.nvars:
            raise ValueError("mixed rings")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check_compatible(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Polynomial(self.field, self.nvars, out)

    def __neg__(self) -> "Polynomial":
        return Polynomial(
            self.field, self.nvars, {m: -c for m, c in self.terms.items()}
        )

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._check_compatible(other)
        p = self.field.p
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = (out.get(m, 0) + c1 * c2) % p
        return Polynomial(self.field, self.nvars, out)

    def scale(self, c: int) -> "Polynomial":
        return Polynomial(
            self.field, self.nvars, {m: c * v for m, v in self.terms.items()}
        )

    def derivative(self, i: int) -> "Polynomial":
        out = {}
        for m, c in self.terms.items():
            if m[i]:
                dm = tuple(e - 1 if j == i else e for j, e in enumerate(m))
                out[dm] = out.get(dm, 0) + c * m[i]
        return Polynomial(self.field, self.nvars, out)

    def pth_power(self) -> "Polynomial":
        # (sum c_i x^a_i)^p = sum c_i^p x^(p a_i) in characteristic p, and
        # c^p = c on residues, so only exponents move.
        p = self.field.p
        return Polynomial(
            self.field,
            self.nvars,
            {tuple(e * p for e in m): c for m, c in self.terms.items()},
        )

    # -- comparison / rendering ---------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return (
            self.field.p == other.field.p
            and self.nvars == other.nvars
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        return hash((self.field.p, self.nvars, frozenset(self.terms.items())))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        names = _var_names(self.nvars)
        parts = []
        for mono in sorted(self.terms, key=grevlex_key, reverse=True):
            c = self.terms[mono]
            factors = []
            if c != 1 or not any(mono):
                factors.append(str(c))
            for name, e in zip(names, mono):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            parts.append("*".join(factors))
        return "+".join(parts)

    def __repr__(self) -> str:
        return f"Polynomial(p={self.field.p}, {self})"


def _binomial(n: int, k: int) -> int:
    if n < 0 or k < 0 or k > n:
        return 0
    return math.comb(n, k)


def _bounded_monomials(nvars: int, m: int, caps: Sequence) -> Iterator:
    """Degree-m exponent tuples with per-variable inclusive caps (None =
    unbounded), generated in descending grevlex order."""
    if m < 0:
        return
    if nvars == 0:
        if m == 0:
            yield ()
        return
    head = caps[:-1]
    budget = 0
    for c in head:
        if c is None:
            budget = m
            break
        budget += c
    last_cap = caps[-1]
    hi = m if last_cap is None else min(m, last_cap)
    lo = max(0, m - budget)
    for last in range(lo, hi + 1):
        for rest in _bounded_monomials(nvars - 1, m - last, head):
            yield rest + (last,)


class HypersurfaceRing:
    """F_p[x_1..x_s]/(f) for one homogeneous f, or the plain polynomial ring
    when ``relation`` is None."""

    def __init__(
        self, field: PrimeField, s: int, relation: Optional[Polynomial]
    ) -> None:
        if s < 1:
            raise ValueError("need at least one variable")
        if relation is not None:
            if relation.field.p != field.p or relation.nvars != s:
                raise ValueError("relation lives in a different ring")
            if relation.is_zero:
                raise ValueError("relation must be nonzero")
            if not relation.is_homogeneous:
                raise ValueError("relation must be homogeneous")
            if relation.degree < 1:
                raise ValueError("relation must have degree >= 1")
        self.field = field
        self.s = s
        self.relation = relation
        if relation is None:
            self._lt = None
            self._tail = None
            self._lc_inv = None
        else:
            lt = relation.leading_monomial()
            self._lt = lt
            self._lc_inv = field.inv(relation.terms[lt])
            self._tail = {m: c for m, c in relation.terms.items() if m != lt}
        self._basis_cache = {}
        self._index_cache = {}

    @property
    def d(self) -> Optional[int]:
        return None if self.relation is None else self.relation.degree

    @property
    def krull_dim(self) -> int:
        return self.s if self.relation is None else self.s - 1

    def __repr__(self) -> str:
        f = "0" if self.relation is None else str(self.relation)
        return f"HypersurfaceRing(p={self.field.p}, s={self.s}, f={f})"

    def canonical_string(self) -> str:
        f = "" if self.relation is None else str(self.relation)
        return f"p={self.field.p};s={self.s};f={f}"

    # -- graded pieces -------------------------------------------------------

    def hilbert_dim(self, m: int) -> int:
        """dim of the degree-m piece; exact integer combinatorics, valid for
        all m (0 for m < 0)."""
        s = self.s
        full = _binomial(m + s - 1, s - 1)
        if self.relation is None:
            return full
        return full - _binomial(m - self.relation.degree + s - 1, s - 1)

    def monomial_basis(self, m: int):
        """Degree-m standard monomials, descending grevlex, as a tuple."""
        if m < 0:
            return ()
        cached = self._basis_cache.get(m)
        if cached is not None:
            return cached
        lt = self._lt
        caps = [None] * self.s
        filter_lt = None
        if lt is not None:
            support = [i for i, e in enumerate(lt) if e]
            if len(support) == 1:
                caps[support[0]] = lt[support[0]] - 1
            else:
                filter_lt = lt
        basis = []
        for mono in _bounded_monomials(self.s, m, caps):
            if filter_lt is not None and all(
                a >= b for a, b in zip(mono, filter_lt)
            ):
                continue
            basis.append(mono)
        result = tuple(basis)
        self._basis_cache[m] = result
        return result

    def basis_index(self, m: int) -> dict:
        cached = self._index_cache.get(m)
        if cached is None:
            cached = {mono: i for i, mono in enumerate(self.monomial_basis(m))}
            self._index_cache[m] = cached
        return cached

    # -- normal forms ----------------------------------------------------------

    def _nf_terms(self, terms: dict) -> dict:
        p = self.field.p
        work = {}
        for mono, c in terms.items():
            c %= p
            if c:
                work[mono] = c
        if self._lt is None or not work:
            return work
        lt = self._lt
        tail = self._tail
        lc_inv = self._lc_inv
        heap = [(_heap_key(m), m) for m in work]
        heapq.heapify(heap)
        seen = set()
        out = {}
        while heap:
            mono = heapq.heappop(heap)[1]
            if mono in seen:
                continue
            seen.add(mono)
            c = work.pop(mono, 0)
            if not c:
                continue
            if all(a >= b for a, b in zip(mono, lt)):
                # c*mono = c*x^beta*LT(f) = -c*lc^-1*x^beta*tail(f) mod f;
                # every new monomial is strictly smaller in grevlex, so the
                # descending sweep visits each monomial at most once.
                beta = tuple(a - b for a, b in zip(mono, lt))
                factor = c * lc_inv % p
                for t, tc in tail.items():
                    nm = tuple(a + b for a, b in zip(t, beta))
                    nv = (work.get(nm, 0) - factor * tc) % p
                    if nv:
                        if nm not in work:
                            heapq.heappush(heap, (_heap_key(nm), nm))
                        work[nm] = nv
                    else:
                        work.pop(nm, None)
            else:
                out[mono] = c
        return out

    def normal_form(self, g: Polynomial) -> Polynomial:
        """Remainder of g under division by the relation: no term divisible
        by LT(f), congruent to g mod (f), idempotent."""
        if g.field.p != self.field.p or g.nvars != self.s:
            raise ValueError("polynomial lives in a different ring")
        if self.relation is None:
            return g
        return Polynomial(self.field, self.s, self._nf_terms(g.terms))


def graded_map_matrix(
    ring: HypersurfaceRing, gens: Sequence, m: int
) -> PrimeFieldMatrix:
    """Matrix of (v_i) |-> sum g_i * v_i from ⊕_i R_{m-e_i} to R_m.

    Columns run over the generators in order and, within one generator, over
    monomial_basis(ring, m - e_i); rows over monomial_basis(ring, m).
    Generators of degree > m contribute empty blocks.
    """
    degrees = []
    reduced = []
    for g in gens:
        if g.is_zero or not g.is_homogeneous:
            raise ValueError("generators must be nonzero homogeneous")
        degrees.append(g.degree)
        reduced.append(ring.normal_form(g))
    rows = ring.basis_index(m)
    blocks = [
        ring.monomial_basis(m - e) if e <= m else ()
        for e in degrees
    ]
    ncols = sum(len(b) for b in blocks)
    arr = np.zeros((len(rows), ncols), dtype=ring.field.dtype)
    j = 0
    for g, block in zip(reduced, blocks):
        gterms = g.terms
        for u in block:
            shifted = {
                tuple(a + b for a, b in zip(mono, u)): c
                for mono, c in gterms.items()
            }
            for mono, c in ring._nf_terms(shifted).items():
                arr[rows[mono], j] = c
            j += 1
    return PrimeFieldMatrix(ring.field, arr)


# -- parsing ---------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([a-zA-Z]\w*)|([-+*^]))")


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None or match.end() == pos:
            raise SpecParseError(f"bad character in polynomial: {text[pos:]!r}")
        num, name, op = match.groups()
        if num is not None:
            tokens.append(("num", int(num)))
        elif name is not None:
            tokens.append(("var", name))
        else:
            tokens.append(("op", op))
        pos = match.end()
    return tokens


def parse_polynomial(field: PrimeField, nvars: int, text: str) -> Polynomial:
    """Parse ``3*x^2*y + z^4`` style input.

    Variables are x1..xs always, plus x,y,z,w when s <= 4; '*' between
    factors is optional; coefficients are integers reduced mod p.
    """
    names = {f"x{i + 1}": i for i in range(nvars)}
    if nvars <= 4:
        for i, n in enumerate(_var_names(nvars)):
            names[n] = i
    tokens = _tokenize(text)
    if not tokens:
        raise SpecParseError("empty polynomial")
    result = {}
    pos = 0

    def term(pos: int):
        coeff = 1
        expo = [0] * nvars
        saw_factor = False
        pending_star = False
        while pos < len(tokens):
            kind, val = tokens[pos]
            if kind == "op":
                if val == "*":
                    if not saw_factor or pending_star:
                        raise SpecParseError("misplaced '*'")
                    pending_star = True
                    pos += 1
                    continue
                break
            pending_star = False
            if kind == "num":
                coeff *= val
                pos += 1
            else:
                if val not in names:
                    raise SpecParseError(f"unknown variable {val!r}")
                e = 1
                pos += 1
                if pos < len(tokens) and tokens[pos] == ("op", "^"):
                    pos += 1
                    if pos >= len(tokens) or tokens[pos][0] != "num":
                        raise SpecParseError("missing exponent after '^'")
                    e = tokens[pos][1]
                    pos += 1
                expo[names[val]] += e
            saw_factor = True
        if not saw_factor or pending_star:
            raise SpecParseError("incomplete term")
        return coeff, tuple(expo), pos

    sign = 1
    if tokens[0] == ("op", "-"):
        sign = -1
        pos = 1
    elif tokens[0] == ("op", "+"):
        pos = 1
    while True:
        coeff, mono, pos = term(pos)
        result[mono] = result.get(mono, 0) + sign * coeff
        if pos == len(tokens):
            break
        kind, val = tokens[pos]
        if kind != "op" or val not in "+-":
            raise SpecParseError(f"expected '+' or '-' at {val!r}")
        sign = 1 if val == "+" else -1
        pos += 1
        if pos == len(tokens):
            raise SpecParseError("dangling sign")
    return Polynomial(field, nvars, result)


def _parse_kv(body: str, allowed: set) -> dict:
    out = {}
    for chunk in body.split(","):
        if not chunk:
            continue
        key, eq, value = chunk.partition("=")
        if not eq:
            raise SpecParseError(f"expected key=value, got {chunk!r}")
        key = key.strip()
        if key not in allowed:
            raise SpecParseError(f"unknown key {key!r}")
        if key in out:
            raise SpecParseError(f"duplicate key {key!r}")
        out[key] = value.strip()
    return out


def _int_field(kv: dict, key: str) -> int:
    if key not in kv:
        raise SpecParseError(f"missing {key}=")
    try:
        return int(kv[key])
    except ValueError:
        raise SpecParseError(f"{key}= must be an integer") from None


def parse_ring_spec(text: str) -> HypersurfaceRing:
    """Build a ring from ``fermat:s=3,d=4,p=7``,
    ``hypersurface:s=3,p=7,f=x^3+y^3+z^3`` or ``polyring:s=2,p=5``."""
    kind, colon, body = text.strip().partition(":")
    kind = kind.strip()
    if not colon:
        raise SpecParseError("ring spec needs the form kind:key=value,...")
    try:
        if kind == "fermat":
            kv = _parse_kv(body, {"s", "d", "p"})
            field = PrimeField(_int_field(kv, "p"))
            s = _int_field(kv, "s")
            d = _int_field(kv, "d")
            if s < 1 or d < 1:
                raise SpecParseError("need s >= 1 and d >= 1")
            terms = {
                tuple(d if j == i else 0 for j in range(s)): 1 for i in range(s)
            }
            return HypersurfaceRing(field, s, Polynomial(field, s, terms))
        if kind == "hypersurface":
            kv = _parse_kv(body, {"s", "p", "f"})
            field = PrimeField(_int_field(kv, "p"))
            s = _int_field(kv, "s")
            if "f" not in kv:
                raise SpecParseError("missing f=")
            return HypersurfaceRing(field, s, parse_polynomial(field, s, kv["f"]))
        if kind == "polyring":
            kv = _parse_kv(body, {"s", "p"})
            return HypersurfaceRing(
                PrimeField(_int_field(kv, "p")), _int_field(kv, "s"), None
            )
    except ValueError as exc:
        raise SpecParseError(str(exc)) from None
    raise SpecParseError(f"unknown ring kind {kind!r}")

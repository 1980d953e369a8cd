"""Exact sparse polynomial arithmetic over Z in the hyperplane variables a_i^+, a_i^-.

A ground set of n hyperplanes carries 2n variables: hyperplane i (1-based)
owns the pair a_i^+, a_i^- at flat indices 2(i-1) and 2(i-1)+1.  Polynomials
store their terms sparsely as {packed exponent key: nonzero integer
coefficient}; coefficients are plain Python ints, so they never overflow.

The packed key keeps one 16-bit lane per variable, with variable 0 in the
most significant lane and the total degree stacked above the top lane.
Comparing two keys as integers is then exactly the graded lexicographic
order with variable sequence a1p, a1m, a2p, ...  Bit 15 of each lane is kept
clear in every valid key; a set bit flags lane overflow during
multiplication and a failed borrow during division, both of which are
reported instead of silently corrupting exponents.

All values here are immutable after construction and safe for concurrent
reads.
"""

from __future__ import annotations

import heapq
import re
from dataclasses import dataclass
from functools import lru_cache

LANE_BITS = 16
LANE_MASK = (1 << LANE_BITS) - 1
MAX_EXPONENT = (1 << (LANE_BITS - 1)) - 1


class ExactDivisionError(ArithmeticError):
    """The requested quotient does not exist in the integer polynomial ring."""


class ExponentOverflowError(OverflowError):
    """A packed exponent lane exceeded MAX_EXPONENT."""


@dataclass(frozen=True, order=True)
class VarId:
    """One of the two variables attached to a hyperplane.

    ``VarId(3, "+")`` is the variable a_3^+ and sits at flat index 4; the
    bijection with 0..2n-1 is 2(i-1) for "+" and 2(i-1)+1 for "-".
    """

    hyperplane: int
    sign: str

    def __post_init__(self):
        if self.hyperplane < 1:
            raise ValueError(f"hyperplane index must be >= 1, got {self.hyperplane}")
        if self.sign not in ("+", "-"):
            raise ValueError(f"sign must be '+' or '-', got {self.sign!r}")

    @property
    def index(self) -> int:
        return 2 * (self.hyperplane - 1) + (0 if self.sign == "+" else 1)

    @classmethod
    def from_index(cls, index: int) -> VarId:
        if index < 0:
            raise ValueError(f"variable index must be >= 0, got {index}")
        return cls(index // 2 + 1, "+" if index % 2 == 0 else "-")

    @property
    def label(self) -> str:
        return f"a{self.hyperplane}{'p' if self.sign == '+' else 'm'}"


def var_label(index: int) -> str:
    """Default printed name of the flat variable index ("a1p", "a1m", ...)."""
    return VarId.from_index(index).label


@lru_cache(maxsize=None)
def _guard_mask(nvars: int) -> int:
    guard = 0
    for v in range(nvars):
        guard |= (1 << (LANE_BITS - 1)) << (LANE_BITS * v)
    return guard


def _var_index(v) -> int:
    return v.index if isinstance(v, VarId) else int(v)


def pack_monomial(nvars: int, exponents) -> int:
    """Pack {variable: exponent} into a single ordered key.

    Keys accept flat indices or VarId; zero exponents are dropped.
    """
    key = 0
    degree = 0
    for v, e in exponents.items():
        v = _var_index(v)
        if not 0 <= v < nvars:
            raise ValueError(f"variable index {v} outside universe of {nvars} variables")
        e = int(e)
        if e == 0:
            continue
        if not 0 < e <= MAX_EXPONENT:
            raise ExponentOverflowError(f"exponent {e} outside 1..{MAX_EXPONENT}")
        key += e << (LANE_BITS * (nvars - 1 - v))
        degree += e
    return key + (degree << (LANE_BITS * nvars))


def unpack_monomial(nvars: int, key: int) -> dict[int, int]:
    """Inverse of pack_monomial; returns {flat variable index: exponent}."""
    out = {}
    for v in range(nvars):
        e = (key >> (LANE_BITS * (nvars - 1 - v))) & LANE_MASK
        if e:
            out[v] = e
    return out


def monomial_degree(nvars: int, key: int) -> int:
    return key >> (LANE_BITS * nvars)


def _accumulate_product(out: dict, a: dict, b: dict, sign: int):
    """Accumulate sign * a * b into out, without intermediate normalization.

    Lane overflow cannot corrupt neighbouring lanes (16-bit lanes hold sums
    of two 15-bit exponents), so the overflow check can run once at the end
    over the accumulated keys.
    """
    if len(a) < len(b):
        a, b = b, a
    get = out.get
    b_items = list(b.items())
    if sign == 1:
        for k1, c1 in a.items():
            for k2, c2 in b_items:
                k = k1 + k2
                out[k] = get(k, 0) + c1 * c2
    else:
        for k1, c1 in a.items():
            for k2, c2 in b_items:
                k = k1 + k2
                out[k] = get(k, 0) - c1 * c2


def _strip_and_check(nvars: int, out: dict) -> dict:
    guard = _guard_mask(nvars)
    clean = {}
    for k, c in out.items():
        if c:
            if k & guard:
                raise ExponentOverflowError(
                    f"monomial product exceeds exponent limit {MAX_EXPONENT}"
                )
            clean[k] = c
    return clean


def _divide_exact(nvars: int, rem: dict, qterms: dict) -> dict:
    """Destructively divide rem by qterms; both are raw term dicts."""
    if not qterms:
        raise ZeroDivisionError("polynomial division by zero")
    if not rem:
        return {}
    guard = _guard_mask(nvars)
    qlead = max(qterms)
    qlc = qterms[qlead]
    qrest = [(k, c) for k, c in qterms.items() if k != qlead]
    heap = [-k for k in rem]
    heapq.heapify(heap)
    out: dict[int, int] = {}
    while rem:
        while True:
            lead = -heap[0]
            if lead in rem:
                break
            heapq.heappop(heap)
        kdiff = lead - qlead
        if kdiff < 0 or (kdiff & guard):
            raise ExactDivisionError("leading monomial not divisible")
        coeff, r = divmod(rem[lead], qlc)
        if r:
            raise ExactDivisionError("leading coefficient not divisible")
        out[kdiff] = coeff
        del rem[lead]
        for k2, c2 in qrest:
            k = kdiff + k2
            if k & guard:
                raise ExponentOverflowError("exponent overflow during division")
            s = rem.get(k, 0) - coeff * c2
            if s:
                if k not in rem:
                    heapq.heappush(heap, -k)
                rem[k] = s
            elif k in rem:
                del rem[k]
    return out


def mul_sub_div(p, q, r, s, denominator):
    """(p*q - r*s) / denominator with the division known to be exact.

    This is the fraction-free elimination kernel; fusing the two products,
    the subtraction, and the division avoids three intermediate polynomials
    per matrix update.
    """
    for other in (q, r, s, denominator):
        if p.nvars != other.nvars:
            raise ValueError("variable universes differ")
    acc: dict[int, int] = {}
    _accumulate_product(acc, p._terms, q._terms, 1)
    _accumulate_product(acc, r._terms, s._terms, -1)
    num = _strip_and_check(p.nvars, acc)
    return IntPolynomial(p.nvars, _divide_exact(p.nvars, num, denominator._terms))


class IntPolynomial:
    """Immutable sparse multivariate polynomial with integer coefficients.

    Every polynomial lives in a fixed variable universe of ``nvars``
    variables; mixing universes in arithmetic is an error rather than a
    silent re-interpretation.
    """

    __slots__ = ("nvars", "_terms", "_hashval")

    def __init__(self, nvars: int, terms=None):
        if nvars < 0:
            raise ValueError("nvars must be nonnegative")
        self.nvars = nvars
        self._terms = {k: c for k, c in (terms or {}).items() if c}
        self._hashval = None

    # construction helpers

    @classmethod
    def zero(cls, nvars: int) -> IntPolynomial:
        return cls(nvars)

    @classmethod
    def const(cls, nvars: int, value: int) -> IntPolynomial:
        return cls(nvars, {0: int(value)})

    @classmethod
    def one(cls, nvars: int) -> IntPolynomial:
        return cls.const(nvars, 1)

    @classmethod
    def variable(cls, nvars: int, v) -> IntPolynomial:
        return cls.monomial(nvars, {v: 1})

    @classmethod
    def monomial(cls, nvars: int, exponents, coeff: int = 1) -> IntPolynomial:
        return cls(nvars, {pack_monomial(nvars, exponents): int(coeff)})

    # inspection

    def terms(self):
        """Yield (packed key, coefficient) in canonical order.

        Degrees ascend (constant term first); within a degree, monomials in
        earlier variables come first.
        """
        shift = LANE_BITS * self.nvars
        for key in sorted(self._terms, key=lambda k: (k >> shift, -k)):
            yield key, self._terms[key]

    def monomial_exponents(self):
        """Yield ({variable: exponent}, coefficient) in canonical order."""
        for key, coeff in self.terms():
            yield unpack_monomial(self.nvars, key), coeff

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_one(self) -> bool:
        return self._terms == {0: 1}

    @property
    def is_monomial(self) -> bool:
        return len(self._terms) == 1 and next(iter(self._terms.values())) == 1

    def __len__(self):
        return len(self._terms)

    def constant_term(self) -> int:
        return self._terms.get(0, 0)

    def total_degree(self) -> int:
        if not self._terms:
            return 0
        return monomial_degree(self.nvars, max(self._terms))

    def variables(self) -> frozenset[int]:
        used = set()
        for key in self._terms:
            used.update(unpack_monomial(self.nvars, key))
        return frozenset(used)

    # ring operations

    def _check_universe(self, other: IntPolynomial):
        if self.nvars != other.nvars:
            raise ValueError(
                f"variable universes differ: {self.nvars} vs {other.nvars}"
            )

    def _coerce(self, other):
        if isinstance(other, IntPolynomial):
            self._check_universe(other)
            return other
        if isinstance(other, int):
            return IntPolynomial.const(self.nvars, other)
        return None

    def __add__(self, other):
        q = self._coerce(other)
        if q is None:
            return NotImplemented
        out = dict(self._terms)
        for k, c in q._terms.items():
            s = out.get(k, 0) + c
            if s:
                out[k] = s
            elif k in out:
                del out[k]
        return IntPolynomial(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return IntPolynomial(self.nvars, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        q = self._coerce(other)
        if q is None:
            return NotImplemented
        return self + (-q)

    def __rsub__(self, other):
        q = self._coerce(other)
        if q is None:
            return NotImplemented
        return q + (-self)

    def __mul__(self, other):
        q = self._coerce(other)
        if q is None:
            return NotImplemented
        out: dict[int, int] = {}
        _accumulate_product(out, self._terms, q._terms, 1)
        return IntPolynomial(self.nvars, _strip_and_check(self.nvars, out))

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError(f"exponent must be a nonnegative integer, got {exponent!r}")
        result = IntPolynomial.one(self.nvars)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def exact_div(self, divisor) -> IntPolynomial:
        """Exact quotient self / divisor; raises ExactDivisionError otherwise."""
        q = self._coerce(divisor)
        if q is None:
            raise TypeError(f"cannot divide by {divisor!r}")
        return IntPolynomial(
            self.nvars, _divide_exact(self.nvars, dict(self._terms), q._terms)
        )

    # homomorphisms

    def substitute(self, mapping, nvars: int | None = None) -> IntPolynomial:
        """Homomorphic image under {variable: polynomial-or-int}.

        Variables absent from the mapping are kept as themselves, which is
        only meaningful when the target universe equals the source one.
        """
        images: dict[int, IntPolynomial] = {}
        target = nvars
        for v, img in mapping.items():
            v = _var_index(v)
            if isinstance(img, IntPolynomial):
                if target is None:
                    target = img.nvars
                elif img.nvars != target:
                    raise ValueError("substitution images live in different universes")
                images[v] = img
            else:
                images[v] = int(img)  # resolved once target is known
        if target is None:
            target = self.nvars
        for v, img in images.items():
            if isinstance(img, int):
                images[v] = IntPolynomial.const(target, img)
        result = IntPolynomial.zero(target)
        for exps, coeff in self.monomial_exponents():
            term = IntPolynomial.const(target, coeff)
            for v, e in exps.items():
                img = images.get(v)
                if img is None:
                    if target != self.nvars:
                        raise ValueError(
                            f"variable {var_label(v)} has no image in the target universe"
                        )
                    img = IntPolynomial.variable(target, v)
                term = term * img**e
            result = result + term
        return result

    def eval_mod(self, assignment, prime: int) -> int:
        """Value of the polynomial at {variable: residue}, in the prime field."""
        if prime <= 2:
            raise ValueError(f"prime must exceed 2, got {prime}")
        values = {_var_index(v): int(r) % prime for v, r in assignment.items()}
        total = 0
        for exps, coeff in self.monomial_exponents():
            term = coeff % prime
            for v, e in exps.items():
                if v not in values:
                    raise KeyError(f"no residue assigned to {var_label(v)}")
                term = term * pow(values[v], e, prime) % prime
            total = (total + term) % prime
        return total

    # comparisons and display

    def __eq__(self, other):
        if isinstance(other, int):
            return self._terms == ({0: other} if other else {})
        if not isinstance(other, IntPolynomial):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self):
        if self._hashval is None:
            object.__setattr__(
                self, "_hashval", hash((self.nvars, frozenset(self._terms.items())))
            )
        return self._hashval

    def __bool__(self):
        return bool(self._terms)

    def sort_key(self):
        """Deterministic total order key (used to canonicalize factor lists).

        Orders by total degree, then so that polynomials in earlier
        variables come first (larger packed keys sort earlier).
        """
        return (self.total_degree(), tuple(sorted((-k, c) for k, c in self._terms.items())))

    def __str__(self):
        return poly_str(self)

    def __repr__(self):
        return f"IntPolynomial({self.nvars}, {poly_str(self)!r})"


def _resolve_name(v: int, names) -> str:
    if names is None:
        return var_label(v)
    if isinstance(names, dict):
        return names.get(v, var_label(v))
    return names[v]


def poly_str(p: IntPolynomial, names=None) -> str:
    """Canonical text form: terms ascending in graded lex, '*' and '^' syntax."""
    if p.is_zero:
        return "0"
    parts = []
    for exps, coeff in p.monomial_exponents():
        factors = []
        for v in sorted(exps):
            name = _resolve_name(v, names)
            e = exps[v]
            factors.append(name if e == 1 else f"{name}^{e}")
        mon = "*".join(factors)
        mag = abs(coeff)
        if not mon:
            body = str(mag)
        elif mag == 1:
            body = mon
        else:
            body = f"{mag}*{mon}"
        if not parts:
            parts.append(f"-{body}" if coeff < 0 else body)
        else:
            parts.append(f" - {body}" if coeff < 0 else f" + {body}")
    return "".join(parts)


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9]*)|(\^)|(\*)|(\+)|(-))")


def parse_poly(text: str, nvars: int | None = None) -> IntPolynomial:
    """Parse the canonical text syntax back into a polynomial.

    Variables are "a{i}p" / "a{i}m", or the single collapsed symbol "a"
    (universe of one variable).  Round-trips poly_str output.
    """
    tokens: list[tuple[str, str]] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            if text[pos:].strip():
                raise ValueError(f"cannot tokenize polynomial text at {text[pos:]!r}")
            break
        pos = m.end()
        if m.group(1):
            tokens.append(("int", m.group(1)))
        elif m.group(2):
            tokens.append(("var", m.group(2)))
        elif m.group(3):
            tokens.append(("pow", "^"))
        elif m.group(4):
            tokens.append(("mul", "*"))
        elif m.group(5):
            tokens.append(("plus", "+"))
        elif m.group(6):
            tokens.append(("minus", "-"))

    collapsed = any(kind == "var" and text == "a" for kind, text in tokens)
    indexed = any(kind == "var" and text != "a" for kind, text in tokens)
    if collapsed and indexed:
        raise ValueError("cannot mix the collapsed variable 'a' with indexed variables")

    def var_of(label: str) -> int:
        if label == "a":
            return 0
        m = re.fullmatch(r"a(\d+)([pm])", label)
        if m is None:
            raise ValueError(f"unknown variable {label!r}")
        return VarId(int(m.group(1)), "+" if m.group(2) == "p" else "-").index

    max_var = -1
    for kind, tok in tokens:
        if kind == "var":
            max_var = max(max_var, var_of(tok))
    if nvars is None:
        if collapsed:
            nvars = 1
        elif max_var >= 0:
            nvars = max_var + 1 + (max_var + 1) % 2  # whole a_i^+/a_i^- pairs
        else:
            nvars = 0
    elif max_var >= nvars:
        raise ValueError(f"variable index {max_var} outside universe of {nvars}")

    i = 0

    def peek():
        return tokens[i] if i < len(tokens) else (None, None)

    terms: dict[int, int] = {}
    while i < len(tokens):
        sign = 1
        kind, _ = peek()
        if kind == "plus":
            i += 1
        elif kind == "minus":
            sign = -1
            i += 1
        coeff = sign
        exps: dict[int, int] = {}
        saw_factor = False
        while True:
            kind, tok = peek()
            if kind == "int":
                coeff *= int(tok)
                i += 1
            elif kind == "var":
                v = var_of(tok)
                i += 1
                e = 1
                if peek()[0] == "pow":
                    i += 1
                    pk, ptok = peek()
                    if pk != "int":
                        raise ValueError("expected integer exponent after '^'")
                    e = int(ptok)
                    i += 1
                exps[v] = exps.get(v, 0) + e
            else:
                raise ValueError("expected a coefficient or variable")
            saw_factor = True
            if peek()[0] == "mul":
                i += 1
                continue
            break
        if not saw_factor:
            raise ValueError("empty term")
        key = pack_monomial(nvars, exps)
        s = terms.get(key, 0) + coeff
        if s:
            terms[key] = s
        elif key in terms:
            del terms[key]
    return IntPolynomial(nvars, terms)


class FactoredPoly:
    """A product of polynomial powers, kept in canonical merged-and-sorted form.

    Equal bases are merged by adding exponents, zero exponents are dropped,
    and factors are ordered by (total degree, term list) so equal products
    print identically.
    """

    __slots__ = ("nvars", "factors")

    def __init__(self, nvars: int, factors=()):
        merged: dict[IntPolynomial, int] = {}
        for base, exp in factors:
            if base.nvars != nvars:
                raise ValueError("factor universe differs from the product universe")
            exp = int(exp)
            if exp < 0:
                raise ValueError("factor exponents must be nonnegative")
            if exp == 0 or base.is_one:
                continue
            merged[base] = merged.get(base, 0) + exp
        self.nvars = nvars
        self.factors = tuple(
            sorted(merged.items(), key=lambda item: item[0].sort_key())
        )

    def expand(self) -> IntPolynomial:
        result = IntPolynomial.one(self.nvars)
        for base, exp in self.factors:
            result = result * base**exp
        return result

    def substitute(self, mapping, nvars: int | None = None) -> FactoredPoly:
        subbed = [(base.substitute(mapping, nvars), exp) for base, exp in self.factors]
        target = subbed[0][0].nvars if subbed else (nvars if nvars is not None else self.nvars)
        return FactoredPoly(target, subbed)

    def eval_mod(self, assignment, prime: int) -> int:
        total = 1
        for base, exp in self.factors:
            total = total * pow(base.eval_mod(assignment, prime), exp, prime) % prime
        return total

    def total_degree(self) -> int:
        return sum(exp * base.total_degree() for base, exp in self.factors)

    def __eq__(self, other):
        if not isinstance(other, FactoredPoly):
            return NotImplemented
        return self.nvars == other.nvars and self.factors == other.factors

    def __hash__(self):
        return hash((self.nvars, self.factors))

    def __str__(self):
        return factored_str(self)

    def __repr__(self):
        return f"FactoredPoly({self.nvars}, {factored_str(self)!r})"


def factored_str(f: FactoredPoly, names=None) -> str:
    if not f.factors:
        return "1"
    parts = []
    for base, exp in f.factors:
        body = f"({poly_str(base, names)})"
        parts.append(body if exp == 1 else f"{body}^{exp}")
    return " * ".join(parts)


@dataclass(frozen=True)
class Specialization:
    """A variable substitution plus the bookkeeping needed to print its output.

    ``mapping`` sends flat variable indices to polynomials in the target
    universe; ``names`` overrides printed variable names there.
    """

    mapping: tuple
    nvars: int
    names: tuple | None = None

    def _map(self) -> dict[int, IntPolynomial]:
        return dict(self.mapping)

    def apply_poly(self, p: IntPolynomial) -> IntPolynomial:
        return p.substitute(self._map(), self.nvars)

    def apply_factored(self, f: FactoredPoly) -> FactoredPoly:
        return f.substitute(self._map(), self.nvars)

    @classmethod
    def collapse_all(cls, nvars_in: int) -> Specialization:
        """Send every variable to the single symbol "a"."""
        a = IntPolynomial.variable(1, 0)
        return cls(tuple((v, a) for v in range(nvars_in)), 1, ("a",))

    @classmethod
    def constants(cls, nvars: int, values) -> Specialization:
        """Pin the listed variables to integers; others stay symbolic."""
        mapping = tuple(
            (_var_index(v), IntPolynomial.const(nvars, int(c))) for v, c in values.items()
        )
        return cls(mapping, nvars, None)

"""Sign vectors over {+,-,0}, covector-axiom validation, and topal fibers.

Conventions used throughout the package:

* Ground-set indices are 1-based in every public interface and message;
  a vector of length n is written as a string over "+-0", leftmost
  character = index 1.
* A sign vector is stored as two bitmasks (plus-set, minus-set) over the
  ground set, so composition, separation and the partial order are single
  bitwise expressions.  Ground sets are capped at 64 elements.
* The canonical total order on vectors of equal length is lexicographic
  with symbol order "-" < "0" < "+"; all iteration, matrix indexing, and
  file output follow it.

A covector set becomes "verified" once it passes the four axioms (zero
vector present, closure under negation, closure under composition,
elimination).  A topal fiber is the subset of covectors agreeing with an
anchor outside a free index set I; fibers produced by generators that never
materialize the ambient covector set (wiring diagrams, fiber-format files)
are validated structurally instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .polyring import VarId

MAX_GROUND_SET = 64

_SIGN_OF_CHAR = {"+": 1, "-": -1, "0": 0}
_CHAR_OF_SIGN = {1: "+", -1: "-", 0: "0"}


class FiberError(ValueError):
    """The input is not a valid oriented-matroid fiber."""


@dataclass(frozen=True)
class SignVector:
    """An element of {+,-,0}^n backed by plus/minus bitmasks."""

    n: int
    plus: int
    minus: int

    def __post_init__(self):
        if not 1 <= self.n <= MAX_GROUND_SET:
            raise ValueError(f"ground-set size must be in 1..{MAX_GROUND_SET}, got {self.n}")
        full = (1 << self.n) - 1
        if self.plus & ~full or self.minus & ~full:
            raise ValueError("sign mask has bits outside the ground set")
        if self.plus & self.minus:
            raise ValueError("an index cannot be both positive and negative")

    @classmethod
    def from_string(cls, text: str) -> SignVector:
        plus = minus = 0
        for pos, ch in enumerate(text):
            if ch not in _SIGN_OF_CHAR:
                raise ValueError(f"invalid sign character {ch!r} (expected one of '+-0')")
            if ch == "+":
                plus |= 1 << pos
            elif ch == "-":
                minus |= 1 << pos
        return cls(len(text), plus, minus)

    @classmethod
    def zero(cls, n: int) -> SignVector:
        return cls(n, 0, 0)

    def sign(self, i: int) -> int:
        """Sign at 1-based index i, as an integer in {-1, 0, +1}."""
        if not 1 <= i <= self.n:
            raise ValueError(f"index {i} outside 1..{self.n}")
        bit = 1 << (i - 1)
        if self.plus & bit:
            return 1
        if self.minus & bit:
            return -1
        return 0

    def to_string(self) -> str:
        return "".join(_CHAR_OF_SIGN[self.sign(i)] for i in range(1, self.n + 1))

    @property
    def support_mask(self) -> int:
        return self.plus | self.minus

    @property
    def zero_mask(self) -> int:
        return ((1 << self.n) - 1) & ~self.support_mask

    def support(self) -> frozenset[int]:
        return _mask_to_indices(self.support_mask)

    def zero_set(self) -> frozenset[int]:
        return _mask_to_indices(self.zero_mask)

    @property
    def is_tope(self) -> bool:
        return self.support_mask == (1 << self.n) - 1

    @property
    def is_zero(self) -> bool:
        return not self.support_mask

    def __neg__(self) -> SignVector:
        return SignVector(self.n, self.minus, self.plus)

    def sort_key(self) -> tuple[int, ...]:
        """Key for the canonical order: per-index rank with - < 0 < +."""
        return tuple(1 + self.sign(i) for i in range(1, self.n + 1))

    def __str__(self):
        return self.to_string()

    def __repr__(self):
        return f"SignVector({self.to_string()!r})"


def _mask_to_indices(mask: int) -> frozenset[int]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return frozenset(out)


def _indices_to_mask(indices, n: int) -> int:
    mask = 0
    for i in indices:
        if not 1 <= i <= n:
            raise ValueError(f"index {i} outside 1..{n}")
        mask |= 1 << (i - 1)
    return mask


def _check_same_length(u: SignVector, v: SignVector):
    if u.n != v.n:
        raise ValueError(f"length mismatch: {u.n} vs {v.n}")


def compose(u: SignVector, v: SignVector) -> SignVector:
    """u o v: take u's sign where nonzero, otherwise v's."""
    _check_same_length(u, v)
    open_ = ~u.support_mask
    return SignVector(u.n, u.plus | (v.plus & open_), u.minus | (v.minus & open_))


def _separation_mask(u: SignVector, v: SignVector) -> int:
    return (u.plus & v.minus) | (u.minus & v.plus)


def separation(u: SignVector, v: SignVector) -> frozenset[int]:
    """S(u, v): indices where u and v carry strictly opposite signs."""
    _check_same_length(u, v)
    return _mask_to_indices(_separation_mask(u, v))


def negate(u: SignVector) -> SignVector:
    return -u


def leq(u: SignVector, v: SignVector) -> bool:
    """Partial order: u <= v iff every u_i is 0 or equals v_i."""
    _check_same_length(u, v)
    return (u.plus & ~v.plus) == 0 and (u.minus & ~v.minus) == 0


@dataclass(frozen=True)
class CovectorSet:
    """A finite set of equal-length sign vectors in canonical order.

    ``verified`` records whether the set passed the covector axioms; it is
    excluded from equality so validation does not change set identity.
    """

    n: int
    members: tuple[SignVector, ...]
    verified: bool = field(default=False, compare=False)

    def __post_init__(self):
        for m in self.members:
            if m.n != self.n:
                raise ValueError("all members must share the ground-set size")

    @classmethod
    def of(cls, members, n: int | None = None, verified: bool = False) -> CovectorSet:
        members = list(members)
        if n is None:
            if not members:
                raise ValueError("cannot infer ground-set size from an empty set")
            n = members[0].n
        unique = sorted(set(members), key=SignVector.sort_key)
        return cls(n, tuple(unique), verified)

    @property
    def _index(self) -> frozenset[SignVector]:
        cached = getattr(self, "_index_cache", None)
        if cached is None:
            cached = frozenset(self.members)
            object.__setattr__(self, "_index_cache", cached)
        return cached

    def __contains__(self, v: SignVector) -> bool:
        return v in self._index

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)


def loops(s: CovectorSet) -> frozenset[int]:
    """Indices at which every member is zero."""
    mask = (1 << s.n) - 1
    for m in s.members:
        mask &= ~m.support_mask
        if not mask:
            break
    return _mask_to_indices(mask)


def topes(s) -> tuple[SignVector, ...]:
    """Members with no zero index, in canonical order.

    Accepts a CovectorSet or a FiberView.
    """
    if isinstance(s, FiberView):
        return s.topes
    return tuple(m for m in s.members if m.is_tope)


@dataclass(frozen=True)
class AxiomReport:
    """Outcome of the four covector axioms, with one witness per failure."""

    zero_ok: bool
    negation_ok: bool
    composition_ok: bool
    elimination_ok: bool
    negation_witness: SignVector | None = None
    composition_witness: tuple[SignVector, SignVector] | None = None
    elimination_witness: tuple[SignVector, SignVector, int] | None = None

    @property
    def ok(self) -> bool:
        return self.zero_ok and self.negation_ok and self.composition_ok and self.elimination_ok

    def lines(self) -> list[str]:
        out = []
        out.append(f"zero vector: {'PASS' if self.zero_ok else 'FAIL (all-zeros vector missing)'}")
        if self.negation_ok:
            out.append("negation closure: PASS")
        else:
            out.append(f"negation closure: FAIL (missing -u for u={self.negation_witness})")
        if self.composition_ok:
            out.append("composition closure: PASS")
        else:
            u, v = self.composition_witness
            out.append(f"composition closure: FAIL (missing u o v for u={u}, v={v})")
        if self.elimination_ok:
            out.append("elimination: PASS")
        else:
            u, v, j = self.elimination_witness
            out.append(f"elimination: FAIL (no eliminating covector for u={u}, v={v}, j={j})")
        return out


def check_covector_axioms(s: CovectorSet) -> AxiomReport:
    """Run the four covector axioms; marks the set verified when all pass.

    Failures are report content, not exceptions; each failed axiom carries
    one concrete witness.
    """
    full = (1 << s.n) - 1
    index = {(m.plus, m.minus) for m in s.members}
    vectors = [(m.plus, m.minus) for m in s.members]

    zero_ok = (0, 0) in index

    negation_ok = True
    negation_witness = None
    for m in s.members:
        if (m.minus, m.plus) not in index:
            negation_ok = False
            negation_witness = m
            break

    composition_ok = True
    composition_witness = None
    for up, um in vectors:
        open_ = ~(up | um)
        for vp, vm in vectors:
            if (up | (vp & open_), um | (vm & open_)) not in index:
                composition_ok = False
                composition_witness = (
                    SignVector(s.n, up, um),
                    SignVector(s.n, vp, vm),
                )
                break
        if not composition_ok:
            break

    # Elimination is symmetric in (u, v): S(u,v) = S(v,u) and the two
    # compositions agree outside S, so unordered pairs suffice.  Pairs that
    # share (S, composition-outside-S) pose the same requirement and are
    # deduplicated.
    elimination_ok = True
    elimination_witness = None
    seen: set[tuple[int, int, int]] = set()
    count = len(vectors)
    for a in range(count):
        up, um = vectors[a]
        for b in range(a + 1, count):
            vp, vm = vectors[b]
            sep = (up & vm) | (um & vp)
            if not sep:
                continue
            keep = full & ~sep
            open_ = ~(up | um)
            zp = (up | (vp & open_)) & keep
            zm = (um | (vm & open_)) & keep
            probe = (sep, zp, zm)
            if probe in seen:
                continue
            seen.add(probe)
            remaining = sep
            for wp, wm in vectors:
                if (wp & keep) == zp and (wm & keep) == zm:
                    remaining &= wp | wm
                    if not remaining:
                        break
            if remaining:
                elimination_ok = False
                j = remaining & -remaining
                elimination_witness = (
                    SignVector(s.n, up, um),
                    SignVector(s.n, vp, vm),
                    j.bit_length(),
                )
                break
        if not elimination_ok:
            break

    report = AxiomReport(
        zero_ok,
        negation_ok,
        composition_ok,
        elimination_ok,
        negation_witness,
        composition_witness,
        elimination_witness,
    )
    if report.ok:
        object.__setattr__(s, "verified", True)
    return report


def _chain_ranks(s: CovectorSet) -> dict[SignVector, int]:
    """Longest-chain length from the all-zeros vector to each member."""
    cached = getattr(s, "_chain_rank_cache", None)
    if cached is not None:
        return cached
    by_support = sorted(s.members, key=lambda m: (bin(m.support_mask).count("1"),) + m.sort_key())
    ranks: dict[SignVector, int] = {}
    for v in by_support:
        best = 0
        for u, r in ranks.items():
            if u != v and leq(u, v) and r + 1 > best:
                best = r + 1
        ranks[v] = best if v.support_mask else 0
    object.__setattr__(s, "_chain_rank_cache", ranks)
    return ranks


def rank(s: CovectorSet) -> int:
    """Length of a longest chain in (s, <=)."""
    if not s.verified:
        raise ValueError("rank requires a set that passed the covector axioms")
    if not s.members:
        return 0
    return max(_chain_ranks(s).values())


def poset_rank(s: CovectorSet, u: SignVector) -> int:
    """Length of a longest chain from the all-zeros vector up to u."""
    if not s.verified:
        raise ValueError("poset_rank requires a set that passed the covector axioms")
    ranks = _chain_ranks(s)
    if u not in ranks:
        raise ValueError(f"{u} is not a member of the set")
    return ranks[u]


@dataclass(frozen=True)
class FiberView:
    """The covectors of a base set that agree with an anchor outside I.

    ``free`` is the index set I; the complement is pinned to the anchor's
    (nonzero) signs.  The base may be a verified covector set or, for
    generators that only produce the fiber itself, the fiber members
    packaged as an unverified set.
    """

    base: CovectorSet
    free: frozenset[int]
    anchor: SignVector
    members: tuple[SignVector, ...]

    def __post_init__(self):
        object.__setattr__(self, "_cache", {})

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def fixed_indices(self) -> frozenset[int]:
        return frozenset(range(1, self.n + 1)) - self.free

    @property
    def free_mask(self) -> int:
        return _indices_to_mask(self.free, self.n)

    @property
    def _index(self) -> frozenset[SignVector]:
        cached = self._cache.get("index")
        if cached is None:
            cached = frozenset(self.members)
            self._cache["index"] = cached
        return cached

    def __contains__(self, v: SignVector) -> bool:
        return v in self._index

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    @property
    def topes(self) -> tuple[SignVector, ...]:
        cached = self._cache.get("topes")
        if cached is None:
            cached = tuple(m for m in self.members if m.is_tope)
            self._cache["topes"] = cached
        return cached


def topal_fiber(s: CovectorSet, free_indices, anchor: SignVector) -> FiberView:
    """Restrict s to the covectors agreeing with the anchor outside I."""
    free = frozenset(free_indices)
    free_mask = _indices_to_mask(free, s.n)
    fixed_mask = ((1 << s.n) - 1) & ~free_mask
    if anchor not in s:
        raise ValueError("fiber anchor is not a member of the covector set")
    if fixed_mask & ~anchor.support_mask:
        bad = _mask_to_indices(fixed_mask & ~anchor.support_mask)
        raise ValueError(f"anchor is zero at fixed indices {sorted(bad)}")
    members = tuple(
        m
        for m in s.members
        if (m.plus & fixed_mask) == (anchor.plus & fixed_mask)
        and (m.minus & fixed_mask) == (anchor.minus & fixed_mask)
    )
    return FiberView(s, free, anchor, members)


def fiber_of(members, free_indices=None, anchor: SignVector | None = None) -> FiberView:
    """Package raw fiber members (no ambient set available) as a FiberView."""
    unique = sorted(set(members), key=SignVector.sort_key)
    if not unique:
        raise FiberError("a fiber needs at least one member")
    base = CovectorSet.of(unique)
    n = base.n
    free = frozenset(free_indices) if free_indices is not None else frozenset(range(1, n + 1))
    if anchor is None:
        anchor = base.members[0]
    fiber = FiberView(base, free, anchor, base.members)
    problems = validate_fiber(fiber)
    if problems:
        raise FiberError("; ".join(problems))
    return fiber


def validate_fiber(f: FiberView) -> tuple[str, ...]:
    """Structural checks for fibers whose ambient set was never built.

    Returns a tuple of problems (empty means the checks passed): the anchor
    must be a member with nonzero signs at all fixed indices, every member
    must agree with it there, and the member set must be closed under
    composition (fibers of genuine oriented matroids are).
    """
    cached = f._cache.get("problems")
    if cached is not None:
        return cached
    problems: list[str] = []
    fixed_mask = _indices_to_mask(f.fixed_indices, f.n)
    if f.anchor not in f:
        problems.append("anchor is not a fiber member")
    if fixed_mask & ~f.anchor.support_mask:
        bad = sorted(_mask_to_indices(fixed_mask & ~f.anchor.support_mask))
        problems.append(f"anchor is zero at fixed indices {bad}")
    for m in f.members:
        if (m.plus & fixed_mask) != (f.anchor.plus & fixed_mask) or (
            m.minus & fixed_mask
        ) != (f.anchor.minus & fixed_mask):
            problems.append(f"member {m} disagrees with the anchor on a fixed index")
            break
    index = f._index
    done = False
    for u in f.members:
        for v in f.members:
            w = compose(u, v)
            if w not in index:
                problems.append(f"not closed under composition: {u} o {v} = {w} missing")
                done = True
                break
        if done:
            break
    result = tuple(problems)
    f._cache["problems"] = result
    return result


def _bmax_table(f: FiberView, i: int) -> dict[SignVector, SignVector | None]:
    """Per-tope maximum of the i-th boundary, cached on the fiber."""
    key = ("bmax", i)
    cached = f._cache.get(key)
    if cached is not None:
        return cached
    bit = 1 << (i - 1)
    on_hyperplane = [w for w in f.members if not (w.support_mask & bit)]
    table: dict[SignVector, SignVector | None] = {}
    for t in f.topes:
        cands = [w for w in on_hyperplane if leq(w, t)]
        if not cands:
            table[t] = None
            continue
        best = max(cands, key=lambda w: bin(w.support_mask).count("1"))
        for w in cands:
            if not leq(w, best):
                raise FiberError(
                    f"boundary of tope {t} at index {i} has no unique maximum "
                    f"({w} and {best} are incomparable); not a valid fiber"
                )
        table[t] = best
    f._cache[key] = table
    return table


def boundary_max(f: FiberView, t: SignVector, i: int) -> SignVector | None:
    """Unique maximum of {w in fiber | w <= t, w_i = 0}, or None when empty.

    A nonempty boundary without a unique maximum means the input is not a
    valid oriented-matroid fiber and raises FiberError.
    """
    if t not in f or not t.is_tope:
        raise ValueError(f"{t} is not a tope of the fiber")
    if i not in f.free:
        raise ValueError(f"index {i} is not in the fiber's free set")
    return _bmax_table(f, i)[t]


def multiplicity(f: FiberView, u: SignVector) -> int:
    """Half the number of fiber topes whose i-boundary maximum is u.

    Computed at the smallest admissible index, then cross-checked against
    every other index with u_i = 0; disagreement or an odd count signals an
    invalid fiber.
    """
    if u not in f:
        raise ValueError(f"{u} is not a fiber member")
    if u.is_tope:
        raise ValueError("multiplicity is defined for non-tope covectors only")
    admissible = sorted(i for i in u.zero_set() if i in f.free)
    if not admissible:
        raise FiberError(f"{u} has no zero index inside the free set")
    values = []
    for i in admissible:
        table = _bmax_table(f, i)
        count = sum(1 for t in f.topes if table[t] == u)
        if count % 2:
            raise FiberError(
                f"odd boundary count {count} for {u} at index {i}; not a valid fiber"
            )
        values.append(count // 2)
    if len(set(values)) > 1:
        detail = ", ".join(f"i={i}: {v}" for i, v in zip(admissible, values))
        raise FiberError(f"multiplicity of {u} depends on the index choice ({detail})")
    return values[0]


def weight_exponents(u: SignVector) -> tuple[VarId, ...]:
    """The variable pair {a_i^+, a_i^-} for every zero index of a non-tope."""
    if u.is_tope:
        raise ValueError("weight is undefined for topes")
    out = []
    for i in sorted(u.zero_set()):
        out.append(VarId(i, "+"))
        out.append(VarId(i, "-"))
    return tuple(out)


# .cov text format


def format_cov(obj) -> str:
    """Render a CovectorSet or FiberView in the .cov exchange format."""
    lines = []
    if isinstance(obj, FiberView):
        lines.append(f"n={obj.n}")
        lines.append("I=" + ",".join(str(i) for i in sorted(obj.free)))
        lines.append(f"u={obj.anchor}")
        members = obj.members
    else:
        lines.append(f"n={obj.n}")
        members = obj.members
    lines.extend(str(m) for m in members)
    return "\n".join(lines) + "\n"


def parse_cov(text: str):
    """Parse .cov text into a CovectorSet, or a FiberView when I/u are given.

    "#" starts a comment, blank lines are ignored, duplicate member lines
    are rejected, and n is capped at 64.
    """
    n = None
    free = None
    anchor_text = None
    raw_members: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("n="):
            if n is not None:
                raise ValueError(f"line {lineno}: duplicate n= header")
            n = int(line[2:])
            if not 1 <= n <= MAX_GROUND_SET:
                raise ValueError(f"line {lineno}: n must be in 1..{MAX_GROUND_SET}")
        elif line.startswith("I="):
            if free is not None:
                raise ValueError(f"line {lineno}: duplicate I= header")
            body = line[2:].strip()
            free = frozenset(int(tok) for tok in body.split(",") if tok.strip()) if body else frozenset()
        elif line.startswith("u="):
            if anchor_text is not None:
                raise ValueError(f"line {lineno}: duplicate u= header")
            anchor_text = line[2:].strip()
        else:
            if n is None:
                raise ValueError(f"line {lineno}: member line before the n= header")
            if len(line) != n:
                raise ValueError(f"line {lineno}: expected {n} signs, got {len(line)}")
            if line in raw_members:
                raise ValueError(f"line {lineno}: duplicate member {line!r}")
            raw_members.append(line)
    if n is None:
        raise ValueError("missing n= header")
    if (free is None) != (anchor_text is None):
        raise ValueError("fiber headers I= and u= must be given together")
    members = [SignVector.from_string(m) for m in raw_members]
    if free is not None:
        for i in free:
            if not 1 <= i <= n:
                raise ValueError(f"fiber index {i} outside 1..{n}")
        anchor = SignVector.from_string(anchor_text)
        if anchor.n != n:
            raise ValueError("anchor length does not match n")
        return fiber_of(members, free, anchor)
    return CovectorSet.of(members, n=n)

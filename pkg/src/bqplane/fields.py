"""Exact arithmetic in the toolkit's computable fields.

Three kinds of field are supported: the rationals Q, prime fields GF(p)
with p >= 7 prime (p = 1 mod 4 by default), and towers of quadratic
extensions built over Q by repeatedly adjoining a square root of a
non-square.  Elements carry canonical representations with decidable
equality, so every geometric identity downstream is checked exactly;
no floating point enters any verdict.

Field homomorphisms of a tower are generated by "level conjugations",
the maps that negate the coefficient of one adjoined radical.  The
catalog (identity, single conjugations, their compositions) is what the
decomposition pipelines match extracted coordinate maps against.  On a
prime field the identity is the only homomorphism.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from sympy import isprime
from sympy.ntheory.residue_ntheory import sqrt_mod

from .errors import (
    AlreadySquare,
    DivisionByZero,
    FieldMismatch,
    InvalidField,
    InvalidLevel,
    NoImaginaryPresentation,
    ZeroRadicand,
)

EXCLUDED_CHARACTERISTICS = (2, 3, 5)


class FieldElement:
    """An element of a FieldTower, wrapping a canonical representation.

    Representations: Fraction over Q, a residue int over GF(p), and a
    pair ``(a, b)`` of base representations meaning a + b*r over a
    quadratic extension with radical r.  Canonical representations make
    ``==`` and ``hash`` structural.
    """

    __slots__ = ("tower", "rep")

    def __init__(self, tower: "FieldTower", rep):
        self.tower = tower
        self.rep = rep

    def _operand(self, other) -> "FieldElement | None":
        if isinstance(other, FieldElement):
            if other.tower == self.tower:
                return other
            raise FieldMismatch(
                f"operands from different fields: {self.tower} vs {other.tower}")
        if isinstance(other, (int, Fraction)):
            return self.tower(other)
        return None

    def __add__(self, other):
        o = self._operand(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.tower, self.tower._add(self.rep, o.rep))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._operand(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.tower, self.tower._sub(self.rep, o.rep))

    def __rsub__(self, other):
        o = self._operand(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.tower, self.tower._sub(o.rep, self.rep))

    def __mul__(self, other):
        o = self._operand(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.tower, self.tower._mul(self.rep, o.rep))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._operand(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.tower, self.tower._mul(self.rep, self.tower._inv(o.rep)))

    def __rtruediv__(self, other):
        o = self._operand(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.tower, self.tower._mul(o.rep, self.tower._inv(self.rep)))

    def __neg__(self):
        return FieldElement(self.tower, self.tower._neg(self.rep))

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return FieldElement(self.tower, self.tower._inv(self.rep)) ** (-n)
        out = self.tower.one
        acc = self
        while n:
            if n & 1:
                out = out * acc
            n >>= 1
            if n:
                acc = acc * acc
        return out

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.tower == other.tower and self.rep == other.rep
        if isinstance(other, (int, Fraction)):
            return self.rep == self.tower._coerce(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.tower, self.rep))

    def __bool__(self):
        return not self.tower._is_zero(self.rep)

    @property
    def is_zero(self) -> bool:
        return self.tower._is_zero(self.rep)

    def __str__(self):
        return format_element(self)

    def __repr__(self):
        return f"<{format_element(self)} : {self.tower}>"


class FieldTower:
    """Abstract base for Q, GF(p) and quadratic extension towers."""

    depth = 0

    def __call__(self, value) -> FieldElement:
        if isinstance(value, FieldElement):
            if value.tower == self:
                return value
            return embed(value, self)
        return FieldElement(self, self._coerce(value))

    @property
    def zero(self) -> FieldElement:
        return FieldElement(self, self.zero_rep)

    @property
    def one(self) -> FieldElement:
        return FieldElement(self, self.one_rep)

    def __str__(self):
        return self.describe()

    def __repr__(self):
        return self.describe()

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq


class Rationals(FieldTower):
    """The rational numbers with fractions.Fraction representations."""

    characteristic = 0
    zero_rep = Fraction(0)
    one_rep = Fraction(1)

    def _coerce(self, v):
        if isinstance(v, Fraction):
            return v
        if isinstance(v, int):
            return Fraction(v)
        raise TypeError(f"cannot coerce {v!r} into Q")

    def _add(self, a, b):
        return a + b

    def _sub(self, a, b):
        return a - b

    def _neg(self, a):
        return -a

    def _mul(self, a, b):
        return a * b

    def _inv(self, a):
        if not a:
            raise DivisionByZero("division by zero in Q")
        return 1 / a

    def _is_zero(self, a):
        return not a

    def describe(self):
        return "Q"

    def __eq__(self, other):
        if isinstance(other, FieldTower):
            return isinstance(other, Rationals)
        return NotImplemented

    def __hash__(self):
        return hash("bqplane.Q")


class PrimeField(FieldTower):
    """GF(p) with residue representations in [0, p).

    p must be prime and outside {2, 3, 5}.  By default p = 1 mod 4 is
    required so that -1 is a square and the unit circle is full-sized;
    ``allow_3_mod_4=True`` lifts that restriction for negative-control
    experiments only.
    """

    characteristic: int

    def __init__(self, p: int, *, allow_3_mod_4: bool = False):
        if not isinstance(p, int) or p < 2 or not isprime(p):
            raise InvalidField(f"GF({p}): p must be prime")
        if p in EXCLUDED_CHARACTERISTICS:
            raise InvalidField(f"GF({p}): characteristic {p} is excluded")
        if p % 4 != 1 and not allow_3_mod_4:
            raise InvalidField(
                f"GF({p}): p = 3 mod 4 needs allow_3_mod_4=True (negative controls only)")
        self.p = p
        self.characteristic = p
        self.zero_rep = 0
        self.one_rep = 1 % p
        self._element_cache: list[FieldElement] | None = None

    def __call__(self, value) -> FieldElement:
        if isinstance(value, int):
            cache = self._element_cache
            if cache is None:
                cache = self._element_cache = [
                    FieldElement(self, r) for r in range(self.p)]
            return cache[value % self.p]
        return super().__call__(value)

    def _coerce(self, v):
        if isinstance(v, int):
            return v % self.p
        if isinstance(v, Fraction):
            den = v.denominator % self.p
            if den == 0:
                raise DivisionByZero(f"denominator divisible by {self.p}")
            return v.numerator * pow(den, -1, self.p) % self.p
        raise TypeError(f"cannot coerce {v!r} into GF({self.p})")

    def _add(self, a, b):
        return (a + b) % self.p

    def _sub(self, a, b):
        return (a - b) % self.p

    def _neg(self, a):
        return -a % self.p

    def _mul(self, a, b):
        return a * b % self.p

    def _inv(self, a):
        if a == 0:
            raise DivisionByZero(f"division by zero in GF({self.p})")
        return pow(a, -1, self.p)

    def _is_zero(self, a):
        return a == 0

    def describe(self):
        return f"GF({self.p})"

    def __eq__(self, other):
        if isinstance(other, FieldTower):
            return isinstance(other, PrimeField) and other.p == self.p
        return NotImplemented

    def __hash__(self):
        return hash(("bqplane.GF", self.p))


class QuadExt(FieldTower):
    """Quadratic extension base(sqrt(d)) with pair representations (a, b).

    The radicand d must be a nonzero non-square of the base; the base
    must have characteristic 0 (extensions of GF(p) are out of scope).
    ``level`` is the 1-based position of this adjunction in the tower.
    """

    characteristic = 0

    def __init__(self, base: FieldTower, d):
        if base.characteristic != 0:
            raise InvalidField("quadratic extensions of prime fields are out of scope")
        d = base(d)
        if d.is_zero:
            raise ZeroRadicand("cannot adjoin sqrt(0)")
        if sqrt_in_field(d) is not None:
            raise AlreadySquare(f"{d} already has a square root in {base}")
        self.base = base
        self.d = d
        self.depth = base.depth + 1
        self.level = self.depth
        self.zero_rep = (base.zero_rep, base.zero_rep)
        self.one_rep = (base.one_rep, base.zero_rep)

    def _coerce(self, v):
        return (self.base._coerce(v), self.base.zero_rep)

    def _add(self, a, b):
        base = self.base
        return (base._add(a[0], b[0]), base._add(a[1], b[1]))

    def _sub(self, a, b):
        base = self.base
        return (base._sub(a[0], b[0]), base._sub(a[1], b[1]))

    def _neg(self, a):
        base = self.base
        return (base._neg(a[0]), base._neg(a[1]))

    def _mul(self, a, b):
        base = self.base
        d = self.d.rep
        return (
            base._add(base._mul(a[0], b[0]), base._mul(base._mul(a[1], b[1]), d)),
            base._add(base._mul(a[0], b[1]), base._mul(a[1], b[0])),
        )

    def _inv(self, a):
        base = self.base
        d = self.d.rep
        # norm (a0 + a1 r)(a0 - a1 r) = a0^2 - d a1^2 vanishes only at zero
        # because d is a non-square.
        norm = base._sub(base._mul(a[0], a[0]),
                         base._mul(d, base._mul(a[1], a[1])))
        if base._is_zero(norm):
            raise DivisionByZero(f"division by zero in {self}")
        ninv = base._inv(norm)
        return (base._mul(a[0], ninv), base._neg(base._mul(a[1], ninv)))

    def _is_zero(self, a):
        base = self.base
        return base._is_zero(a[0]) and base._is_zero(a[1])

    @property
    def radical(self) -> FieldElement:
        """The adjoined square root of d as an element of this tower."""
        return FieldElement(self, (self.base.zero_rep, self.base.one_rep))

    def describe(self):
        if self.d == -1:
            return f"{self.base.describe()}[i]"
        return f"{self.base.describe()}[sqrt {format_element(self.d)}]"

    def __eq__(self, other):
        if isinstance(other, FieldTower):
            return (isinstance(other, QuadExt)
                    and other.d.rep == self.d.rep
                    and other.base == self.base)
        return NotImplemented

    def __hash__(self):
        return hash(("bqplane.QuadExt", hash(self.base), self.d.rep))


Q = Rationals()


# ----------------------------------------------------------- embeddings

def tower_levels(k: FieldTower) -> list[QuadExt]:
    """The QuadExt layers of k from the innermost adjunction outward."""
    out: list[QuadExt] = []
    while isinstance(k, QuadExt):
        out.append(k)
        k = k.base
    out.reverse()
    return out


def embed(x: FieldElement, target: FieldTower) -> FieldElement:
    """Lift x into target, which must extend x's tower by adjunctions."""
    wrappers: list[QuadExt] = []
    t = target
    while t != x.tower:
        if not isinstance(t, QuadExt):
            raise FieldMismatch(f"{target} does not extend {x.tower}")
        wrappers.append(t)
        t = t.base
    rep = x.rep
    for layer in reversed(wrappers):
        rep = (rep, layer.base.zero_rep)
    return FieldElement(target, rep)


def adjoin_sqrt(k: FieldTower, d) -> tuple[QuadExt, "callable"]:
    """Extend k by a square root of d; returns the new tower and the lift map."""
    ext = QuadExt(k, d)
    return ext, lambda x: embed(x, ext)


# ----------------------------------------------------------- square roots

def _flatten_coeffs(k: FieldTower, rep) -> list[Fraction]:
    if isinstance(k, Rationals):
        return [rep]
    if isinstance(k, QuadExt):
        return _flatten_coeffs(k.base, rep[0]) + _flatten_coeffs(k.base, rep[1])
    raise TypeError(f"{k} has no rational coefficient vector")


def coeff_vector(x: FieldElement) -> list[Fraction]:
    """Rational coefficients of x over the monomial basis of its tower.

    Index i holds the coefficient of the product of the radicals at the
    levels L with bit L-1 set in i.
    """
    return _flatten_coeffs(x.tower, x.rep)


def from_coeff_vector(k: FieldTower, vec) -> FieldElement:
    def build(t: FieldTower, chunk):
        if isinstance(t, Rationals):
            return Fraction(chunk[0])
        half = len(chunk) // 2
        return (build(t.base, chunk[:half]), build(t.base, chunk[half:]))

    if len(vec) != 1 << k.depth:
        raise ValueError(f"expected {1 << k.depth} coefficients, got {len(vec)}")
    return FieldElement(k, build(k, list(vec)))


def _canonical_sign(x: FieldElement) -> FieldElement:
    """Flip sign so the leading nonzero rational coefficient is positive."""
    for c in coeff_vector(x):
        if c > 0:
            return x
        if c < 0:
            return -x
    return x


def sqrt_in_field(x: FieldElement) -> FieldElement | None:
    """A square root of x in its own field, or None.

    The returned root is canonical: over GF(p) the smaller residue, over
    characteristic-0 towers the representative whose leading nonzero
    rational coefficient is positive.
    """
    k = x.tower
    if isinstance(k, Rationals):
        v = x.rep
        if v < 0:
            return None
        num, den = v.numerator, v.denominator
        rn, rd = math.isqrt(num), math.isqrt(den)
        if rn * rn == num and rd * rd == den:
            return FieldElement(k, Fraction(rn, rd))
        return None
    if isinstance(k, PrimeField):
        r = sqrt_mod(x.rep, k.p)
        if r is None:
            return None
        return k(min(r, k.p - r))
    if isinstance(k, QuadExt):
        base = k.base
        a = FieldElement(base, x.rep[0])
        b = FieldElement(base, x.rep[1])
        if b.is_zero:
            ra = sqrt_in_field(a)
            if ra is not None:
                return _canonical_sign(FieldElement(k, (ra.rep, base.zero_rep)))
            rb = sqrt_in_field(a / k.d)
            if rb is not None:
                return _canonical_sign(FieldElement(k, (base.zero_rep, rb.rep)))
            return None
        # (u + v r)^2 = x forces u^2 = (a +/- s)/2 with s^2 = a^2 - d b^2.
        s = sqrt_in_field(a * a - k.d * b * b)
        if s is None:
            return None
        for cand in (s, -s):
            u = sqrt_in_field((a + cand) / 2)
            if u is not None and not u.is_zero:
                v = b / (2 * u)
                root = FieldElement(k, (u.rep, v.rep))
                if root * root == x:
                    return _canonical_sign(root)
        return None
    raise TypeError(f"unsupported field {k}")


def imaginary_unit(k: FieldTower) -> FieldElement | None:
    """The canonical i with i*i = -1, when the field presents one.

    Present for GF(p) with p = 1 mod 4 (smaller residue) and for towers
    whose top adjunction is sqrt(-1).  Towers are conventionally built
    with the imaginary adjunction last, so only the top level is probed.
    """
    if isinstance(k, PrimeField):
        if k.p % 4 != 1:
            return None
        return sqrt_in_field(k(-1))
    if isinstance(k, QuadExt) and k.d == -1:
        return k.radical
    return None


def re_im(x: FieldElement) -> tuple[FieldElement, FieldElement]:
    """Split x = a + b*i over the real subfield of a tower topped by i."""
    k = x.tower
    if not (isinstance(k, QuadExt) and k.d == -1):
        raise NoImaginaryPresentation(
            f"{k} is not presented as a real tower extended by i")
    return FieldElement(k.base, x.rep[0]), FieldElement(k.base, x.rep[1])


def real_subfield(k: FieldTower) -> FieldTower:
    if not (isinstance(k, QuadExt) and k.d == -1):
        raise NoImaginaryPresentation(
            f"{k} is not presented as a real tower extended by i")
    return k.base


def in_prime_subfield(x: FieldElement) -> bool:
    """True when x lies in Q (resp. the full GF(p) for prime fields)."""
    if isinstance(x.tower, PrimeField):
        return True
    vec = coeff_vector(x)
    return all(c == 0 for c in vec[1:])


def rational_value(x: FieldElement) -> Fraction:
    if isinstance(x.tower, PrimeField):
        raise FieldMismatch("prime-field element has no rational value")
    vec = coeff_vector(x)
    if any(vec[1:]):
        raise FieldMismatch(f"{x} is not rational")
    return vec[0]


def is_real_tower(k: FieldTower) -> bool:
    """True when every radicand is a positive real (so k orders into R)."""
    if isinstance(k, Rationals):
        return True
    if isinstance(k, QuadExt):
        return is_real_tower(k.base) and real_value(k.d) > 0
    return False


def real_value(x: FieldElement) -> float:
    """Float image of x under the real embedding sending each radical to
    the positive square root.  Only meaningful on real towers; used for
    branching heuristics, never for verdicts."""
    k = x.tower
    if isinstance(k, Rationals):
        return float(x.rep)
    if isinstance(k, QuadExt):
        rd = real_value(k.d)
        if rd < 0:
            raise FieldMismatch(f"{k} has no real embedding")
        a = real_value(FieldElement(k.base, x.rep[0]))
        b = real_value(FieldElement(k.base, x.rep[1]))
        return a + b * math.sqrt(rd)
    raise FieldMismatch(f"{k} has no real embedding")


def ensure_sqrt(k: FieldTower, x: FieldElement, *, positive: bool = False):
    """A square root of x, adjoining one if needed.

    Returns (field, lift, root): ``field`` is k or a one-step extension,
    ``lift`` embeds old elements, and ``root`` is the chosen square root
    in ``field``.  With positive=True (real towers only) the root with
    positive real value is chosen.
    """
    x = k(x)
    r = sqrt_in_field(x)
    if r is not None:
        if positive and not r.is_zero and real_value(r) < 0:
            r = -r
        return k, (lambda e: e), r
    ext, lift = adjoin_sqrt(k, x)
    return ext, lift, ext.radical


# -------------------------------------------------------- homomorphisms

@dataclass(frozen=True)
class Identity:
    def __str__(self):
        return "hom(id)"


@dataclass(frozen=True)
class LevelConjugation:
    """Negate the coefficient of the radical adjoined at ``level``."""

    level: int

    def __str__(self):
        return f"hom(conj@{self.level})"


@dataclass(frozen=True)
class Composite:
    parts: tuple

    def __str__(self):
        return " . ".join(str(p) for p in self.parts) if self.parts else "hom(id)"


Homomorphism = Identity | LevelConjugation | Composite


def conjugated_levels(h: Homomorphism) -> frozenset[int]:
    """Normal form of h as the set of levels it conjugates."""
    if isinstance(h, Identity):
        return frozenset()
    if isinstance(h, LevelConjugation):
        return frozenset((h.level,))
    if isinstance(h, Composite):
        acc: frozenset[int] = frozenset()
        for part in h.parts:
            acc ^= conjugated_levels(part)
        return acc
    raise TypeError(f"not a homomorphism: {h!r}")


def hom_from_levels(levels) -> Homomorphism:
    levels = sorted(set(levels))
    if not levels:
        return Identity()
    if len(levels) == 1:
        return LevelConjugation(levels[0])
    return Composite(tuple(LevelConjugation(L) for L in levels))


def compose_homs(h1: Homomorphism, h2: Homomorphism) -> Homomorphism:
    return hom_from_levels(conjugated_levels(h1) ^ conjugated_levels(h2))


def _conjugate_rep(k: FieldTower, rep, level: int):
    if not isinstance(k, QuadExt):
        raise InvalidLevel(f"level {level} exceeds tower depth")
    if k.depth == level:
        return (rep[0], k.base._neg(rep[1]))
    return (_conjugate_rep(k.base, rep[0], level),
            _conjugate_rep(k.base, rep[1], level))


def apply_hom(h: Homomorphism, x: FieldElement) -> FieldElement:
    """Apply a catalog homomorphism to x.

    Level conjugations act structurally on the coefficient tree; whether
    the result is multiplicative depends on the tower (see
    ``conjugation_is_automorphism``), and ``hom_check`` certifies it.
    """
    levels = conjugated_levels(h)
    if not levels:
        return x
    k = x.tower
    for L in levels:
        if not 1 <= L <= k.depth:
            raise InvalidLevel(f"level {L} not in 1..{k.depth} for {k}")
    rep = x.rep
    for L in sorted(levels):
        rep = _conjugate_rep(k, rep, L)
    return FieldElement(k, rep)


def conjugation_is_automorphism(k: FieldTower, level: int) -> bool:
    """Negating level ``level`` is multiplicative iff every radicand
    adjoined above that level is fixed by the negation."""
    if not 1 <= level <= k.depth:
        raise InvalidLevel(f"level {level} not in 1..{k.depth} for {k}")
    for layer in tower_levels(k):
        if layer.level <= level:
            continue
        if layer.d.tower.depth >= level:
            if apply_hom(LevelConjugation(level), layer.d) != layer.d:
                return False
    return True


def catalog_homomorphisms(k: FieldTower) -> list[Homomorphism]:
    """All homomorphisms in the catalog that are valid for k.

    Identity first, then single conjugations by ascending level, then
    larger compositions in subset order.
    """
    if not isinstance(k, QuadExt):
        return [Identity()]
    valid = [L for L in range(1, k.depth + 1) if conjugation_is_automorphism(k, L)]
    out: list[Homomorphism] = [Identity()]
    for mask in range(1, 1 << len(valid)):
        levels = [valid[i] for i in range(len(valid)) if mask >> i & 1]
        out.append(hom_from_levels(levels))
    out.sort(key=lambda h: (len(conjugated_levels(h)), sorted(conjugated_levels(h))))
    return out


@dataclass
class HomCheckReport:
    ok: bool
    pairs_checked: int
    failures: list

    def __bool__(self):
        return self.ok


def hom_check(h, k: FieldTower, budget, *, seed: int = 0) -> HomCheckReport:
    """Certify additivity and multiplicativity of h on k.

    ``h`` may be a catalog Homomorphism or any callable on elements.
    ``budget`` is "exhaustive" (finite fields only) or a pair count for
    seeded sampling.  Failures carry (x, y, law) witnesses.
    """
    if isinstance(h, (Identity, LevelConjugation, Composite)):
        fn = lambda e: apply_hom(h, e)
    else:
        fn = h
    pairs = []
    if budget == "exhaustive":
        if not isinstance(k, PrimeField):
            raise InvalidField("exhaustive hom_check needs a finite field")
        elems = [k(v) for v in range(k.p)]
        pairs = [(x, y) for x in elems for y in elems]
    else:
        rng = random.Random(seed)
        for _ in range(int(budget)):
            pairs.append((random_element(k, rng), random_element(k, rng)))
    failures = []
    for x, y in pairs:
        if fn(x + y) != fn(x) + fn(y):
            failures.append((x, y, "additivity"))
        if fn(x * y) != fn(x) * fn(y):
            failures.append((x, y, "multiplicativity"))
        if len(failures) >= 10:
            break
    return HomCheckReport(not failures, len(pairs), failures)


# ------------------------------------------------------ random elements

def random_element(k: FieldTower, rng: random.Random, *, size: int = 9) -> FieldElement:
    """A seeded random element with numerators/denominators up to size."""
    if isinstance(k, PrimeField):
        return k(rng.randrange(k.p))
    if isinstance(k, Rationals):
        return k(Fraction(rng.randint(-size, size), rng.randint(1, size)))
    if isinstance(k, QuadExt):
        a = random_element(k.base, rng, size=size)
        b = random_element(k.base, rng, size=size)
        return FieldElement(k, (a.rep, b.rep))
    raise TypeError(f"unsupported field {k}")


def basis_monomials(k: FieldTower) -> list[FieldElement]:
    """1, each radical, and all products of radicals (char-0 towers)."""
    dim = 1 << k.depth
    out = []
    for idx in range(dim):
        vec = [Fraction(0)] * dim
        vec[idx] = Fraction(1)
        out.append(from_coeff_vector(k, vec))
    return out


def probe_elements(k: FieldTower, rng: random.Random, count: int) -> list[FieldElement]:
    """Deterministic probe set: basis monomials, their pairwise sums and
    products, then seeded random elements up to ``count``."""
    if isinstance(k, PrimeField):
        return [k(v) for v in range(min(count, k.p))]
    probes: list[FieldElement] = []
    seen = set()

    def push(e):
        key = (e.tower, e.rep)
        if key not in seen:
            seen.add(key)
            probes.append(e)

    basis = basis_monomials(k)
    for e in basis:
        push(e)
    for i, a in enumerate(basis):
        for b in basis[i:]:
            push(a + b)
            push(a * b)
    while len(probes) < count:
        push(random_element(k, rng))
    return probes[:count]


# ------------------------------------------------------------ formatting

def radical_names(k: FieldTower) -> list[str]:
    names = []
    for layer in tower_levels(k):
        names.append("i" if layer.d == -1 else f"r{layer.level}")
    return names


def _format_coeff_term(c: Fraction, mono: str) -> str:
    if not mono:
        return str(c)
    if c == 1:
        return mono
    if c == -1:
        return f"-{mono}"
    return f"{c}*{mono}"


def format_element(x: FieldElement) -> str:
    """Canonical text form, parseable by parsing.parse_element."""
    k = x.tower
    if isinstance(k, PrimeField):
        return str(x.rep)
    names = radical_names(k)
    terms = []
    for idx, c in enumerate(coeff_vector(x)):
        if c == 0:
            continue
        mono = "*".join(names[L] for L in range(k.depth) if idx >> L & 1)
        terms.append(_format_coeff_term(c, mono))
    if not terms:
        return "0"
    out = terms[0]
    for t in terms[1:]:
        out += f" - {t[1:]}" if t.startswith("-") else f" + {t}"
    return out

"""Unit-distance chains: sequences of points with squared distance
exactly 1 between consecutive entries.

Two builders are provided.  ``build_real_chain`` connects two points
with real coordinates, either by extending the field with the square
roots the straight-line walk needs (auto_extend) or, over Q only, by an
exact constructive decomposition into Pythagorean unit steps
(rational_only).  ``build_lemma3_chain`` connects a point with nonzero
imaginary part to (i, i) while certifying a nonzero imaginary pairing on
every edge; it is the chain the unit-distance rigidity argument rides on.

Float approximations are used only to pick step counts; every emitted
edge is certified exactly by ``verify_chain``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from sympy import factorint

from .errors import (
    FieldMismatch,
    NoImaginaryPresentation,
    PrimaryBranchUnavailable,
    SearchExhausted,
)
from .fields import (
    FieldElement,
    FieldTower,
    Q,
    QuadExt,
    ensure_sqrt,
    imaginary_unit,
    is_real_tower,
    rational_value,
    re_im,
    real_value,
)
from .geometry import Point, phi, point, psi


@dataclass
class Chain:
    """An ordered list of points, all in one field, claimed unit-distance."""

    points: list[Point]
    field: FieldTower
    reported_edge_bound: int | None = None

    def __post_init__(self):
        if len(self.points) < 2:
            raise ValueError("a chain needs at least two points")
        for p in self.points:
            if p.tower != self.field:
                raise FieldMismatch("chain point outside the chain's field")

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class EdgeCertificate:
    """Exact per-edge record: phi must be 1; psi_value is the imaginary
    pairing when the field presents one."""

    phi_value: FieldElement
    psi_value: FieldElement | None
    psi_nonzero: bool | None


@dataclass
class EdgeRecord:
    index: int
    phi_ok: bool
    psi_ok: bool | None
    phi_value: str
    psi_value: str | None


@dataclass
class ChainReport:
    edges: list[EdgeRecord]
    require_psi: bool

    @property
    def ok(self) -> bool:
        for e in self.edges:
            if not e.phi_ok:
                return False
            if self.require_psi and not e.psi_ok:
                return False
        return True


def verify_chain(c: Chain, *, require_psi: bool = False) -> ChainReport:
    """Recompute every edge exactly; with require_psi also demand the
    imaginary pairing be nonzero on each edge."""
    has_i = isinstance(c.field, QuadExt) and c.field.d == -1
    if require_psi and not has_i:
        raise NoImaginaryPresentation(
            f"{c.field} has no i presentation for psi certificates")
    records = []
    for idx in range(len(c.points) - 1):
        x, y = c.points[idx], c.points[idx + 1]
        pv = phi(x, y)
        psi_ok = None
        psi_text = None
        if has_i:
            sv = psi(x, y)
            psi_ok = not sv.is_zero
            psi_text = str(sv)
        records.append(EdgeRecord(idx, pv == 1, psi_ok, str(pv), psi_text))
    return ChainReport(records, require_psi)


# ------------------------------------------------------------ auto mode

def _strip_imaginary(s: Point, t: Point):
    """Move points given over F(i) with zero imaginary parts down to F."""
    k = s.tower
    if isinstance(k, QuadExt) and k.d == -1:
        coords = []
        for e in (s.x1, s.x2, t.x1, t.x2):
            re, im = re_im(e)
            if not im.is_zero:
                raise FieldMismatch("chain endpoints must have real coordinates")
            coords.append(re)
        return Point(coords[0], coords[1]), Point(coords[2], coords[3])
    return s, t


def _lift_point(p: Point, lift) -> Point:
    return Point(lift(p.x1), lift(p.x2))


def _auto_extend_chain(s: Point, t: Point) -> Chain:
    k = s.tower
    if not is_real_tower(k):
        raise FieldMismatch(f"{k} is not a real tower")
    dist2 = phi(s, t)
    if dist2.is_zero:
        step = point(k, 1, 0)
        return Chain([s, s + step, s], k, reported_edge_bound=2)
    if dist2 == 1:
        return Chain([s, t], k, reported_edge_bound=1)
    length = math.sqrt(real_value(dist2))
    steps_along = max(0, math.ceil(length - 1e-12) - 2)
    if steps_along == 0:
        # close S -> M -> T directly; the circle-intersection height only
        # needs sqrt((4 - D) / (4 D)), no sqrt(D)
        k2, lift, h = ensure_sqrt(
            k, (4 - dist2) / (4 * dist2), positive=True)
        s2, t2 = _lift_point(s, lift), _lift_point(t, lift)
        diff = t2 - s2
        half = k2(Fraction(1, 2))
        mid = Point(s2.x1 + half * diff.x1, s2.x2 + half * diff.x2)
        m = Point(mid.x1 - h * diff.x2, mid.x2 + h * diff.x1)
        return Chain([s2, m, t2], k2, reported_edge_bound=2)
    k1, lift1, root = ensure_sqrt(k, dist2, positive=True)
    s1, t1 = _lift_point(s, lift1), _lift_point(t, lift1)
    diff = t1 - s1
    u = Point(diff.x1 / root, diff.x2 / root)
    remainder = root - steps_along  # in (1, 2] by choice of steps_along
    k2, lift2, h = ensure_sqrt(
        k1, k1.one - remainder * remainder / 4, positive=True)
    u2 = _lift_point(u, lift2)
    s2 = _lift_point(s1, lift2)
    t2 = _lift_point(t1, lift2)
    rem2 = lift2(remainder)
    pts = [s2]
    for j in range(1, steps_along + 1):
        jj = k2(j)
        pts.append(Point(s2.x1 + jj * u2.x1, s2.x2 + jj * u2.x2))
    last = pts[-1]
    half_rem = rem2 / 2
    m = Point(last.x1 + half_rem * u2.x1 - h * u2.x2,
              last.x2 + half_rem * u2.x2 + h * u2.x1)
    pts.append(m)
    pts.append(t2)
    return Chain(pts, k2, reported_edge_bound=steps_along + 2)


# -------------------------------------------------------- rational mode

def _feasible_denominator(n: int) -> bool:
    return all(p % 4 == 1 for p in factorint(n))


def _two_squares(q: int) -> tuple[int, int]:
    """A primitive representation q = e^2 + f^2 for q an odd prime power
    with p = 1 mod 4, via Gaussian-integer powers of the prime's
    representation."""
    (p, k), = factorint(q).items()
    # find p = a^2 + b^2 by the Hermite-Serret walk
    a, b = p, _nonresidue_sqrt(p)
    while b * b > p:
        a, b = b, a % b
    a, b = b, a % b
    assert a * a + b * b == p
    e, f = a, b
    ge, gf = 1, 0
    for _ in range(k):
        ge, gf = ge * e - gf * f, ge * f + gf * e
    ge, gf = abs(ge), abs(gf)
    assert ge * ge + gf * gf == q and math.gcd(ge, gf) == 1
    return ge, gf


def _nonresidue_sqrt(p: int) -> int:
    # square root of -1 mod p (p = 1 mod 4)
    for g in range(2, p):
        r = pow(g, (p - 1) // 4, p)
        if r * r % p == p - 1:
            return r
    raise ValueError(f"no sqrt(-1) mod {p}")


def _axis_plan(v: Fraction) -> tuple[list[tuple[int, Fraction, Fraction]], int]:
    """Plan one axis: rhombus batches realizing each prime-power part of
    the denominator, plus the leftover integer displacement.

    Each batch is (signed rhombus count, long leg, short leg) where the
    legs are the components of the Pythagorean unit step; one rhombus is
    two unit steps whose short legs cancel, moving 2*long_leg along the
    axis.
    """
    batches = []
    remaining = v
    for q_prime, mult in factorint(v.denominator).items():
        q = q_prime ** mult
        rest = v.denominator // q
        c = v.numerator * pow(rest, -1, q) % q
        if c > q // 2:
            c -= q
        e, f = _two_squares(q)
        leg_long = Fraction(e * e - f * f, q)
        leg_short = Fraction(2 * e * f, q)
        # one rhombus moves 2*leg_long; solve for the count mod q
        s0 = c * pow(2 * (e * e - f * f), -1, q) % q
        if s0 > q // 2:
            s0 -= q
        batches.append((s0, leg_long, leg_short))
        remaining -= 2 * s0 * leg_long
    assert remaining.denominator == 1, "fractional part not fully realized"
    return batches, remaining.numerator


def _rational_chain_steps(v1: Fraction, v2: Fraction, budget: int) -> list[tuple[Fraction, Fraction]]:
    """Unit steps (as (dx, dy) pairs) summing exactly to (v1, v2)."""
    plan_x, whole_x = _axis_plan(v1)
    plan_y, whole_y = _axis_plan(v2)
    cost = sum(2 * abs(n) for n, _, _ in plan_x + plan_y) + abs(whole_x) + abs(whole_y)
    if cost > budget:
        raise SearchExhausted(
            f"constructive chain needs {cost} steps, budget {budget}")
    steps: list[tuple[Fraction, Fraction]] = []
    for count, leg_long, leg_short in plan_x:
        sign = 1 if count >= 0 else -1
        for _ in range(abs(count)):
            steps.append((sign * leg_long, leg_short))
            steps.append((sign * leg_long, -leg_short))
    for count, leg_long, leg_short in plan_y:
        sign = 1 if count >= 0 else -1
        for _ in range(abs(count)):
            steps.append((leg_short, sign * leg_long))
            steps.append((-leg_short, sign * leg_long))
    one = Fraction(1)
    zero = Fraction(0)
    sx = one if whole_x >= 0 else -one
    for _ in range(abs(whole_x)):
        steps.append((sx, zero))
    sy = one if whole_y >= 0 else -one
    for _ in range(abs(whole_y)):
        steps.append((zero, sy))
    return steps


def _rational_only_chain(s: Point, t: Point, budget: int) -> Chain:
    if s.tower != Q or t.tower != Q:
        raise FieldMismatch("rational_only chains need endpoints over Q")
    v1 = rational_value(t.x1 - s.x1)
    v2 = rational_value(t.x2 - s.x2)
    if v1 == 0 and v2 == 0:
        return Chain([s, s + point(Q, 1, 0), s], Q, reported_edge_bound=2)
    for coord in (v1, v2):
        if not _feasible_denominator(coord.denominator):
            raise SearchExhausted(
                f"displacement ({v1}, {v2}) is unreachable by rational unit steps: "
                "coordinate denominators must factor into primes = 1 mod 4 "
                "(rational unit vectors have no other denominators)",
                retriable=False)
    dist2 = v1 * v1 + v2 * v2
    if dist2 == 1:
        return Chain([s, t], Q, reported_edge_bound=1)
    if dist2 <= 4:
        two_step = _try_two_step(s, t, v1, v2, dist2)
        if two_step is not None:
            return two_step
    steps = _rational_chain_steps(v1, v2, budget)
    pts = [s]
    for dx, dy in steps:
        pts.append(Point(pts[-1].x1 + Q(dx), pts[-1].x2 + Q(dy)))
    assert pts[-1] == t, "constructive steps failed to land on the target"
    return Chain(pts, Q, reported_edge_bound=len(steps))


def _try_two_step(s: Point, t: Point, v1: Fraction, v2: Fraction,
                  dist2: Fraction) -> Chain | None:
    # midpoint circle intersection is rational iff (4 - r^2)/r^2 is a square
    ratio = (4 - dist2) / dist2
    num, den = ratio.numerator, ratio.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn != num or rd * rd != den:
        return None
    half_s = Fraction(rn, rd) / 2
    mid = Point(s.x1 + Q(v1 / 2), s.x2 + Q(v2 / 2))
    m = Point(mid.x1 - Q(half_s * v2), mid.x2 + Q(half_s * v1))
    return Chain([s, m, t], Q, reported_edge_bound=2)


def build_real_chain(s: Point, t: Point, mode: str = "auto_extend", *,
                     budget: int = 10_000) -> Chain:
    """Connect s to t by exact unit steps.

    mode "auto_extend": walk the segment in unit steps, adjoining the
    square roots the direction and the final two-circle closure need.
    mode "rational_only": endpoints over Q, all intermediate points
    rational; raises SearchExhausted (non-retriable) when the exact
    feasibility test shows no rational chain exists.
    """
    if s.tower != t.tower:
        raise FieldMismatch("endpoints in different fields")
    s, t = _strip_imaginary(s, t)
    if mode == "auto_extend":
        return _auto_extend_chain(s, t)
    if mode == "rational_only":
        return _rational_only_chain(s, t, budget)
    raise ValueError(f"unknown chain mode {mode!r}")


# ------------------------------------------------------- connector chain

def build_lemma3_chain(x: Point, target: Point | None = None
                       ) -> tuple[Chain, list[EdgeCertificate]]:
    """Chain from a point with nonzero imaginary part to (i, i), with the
    imaginary pairing certified nonzero on every edge.

    The first coordinate must have a nonzero imaginary part; when only
    the second does, the construction runs on swapped coordinates and
    swaps back (the target is symmetric).  Fully real points have no
    such chain and raise PrimaryBranchUnavailable.
    """
    k = x.tower
    if not (isinstance(k, QuadExt) and k.d == -1):
        raise NoImaginaryPresentation(f"{k} must be presented as F(i)")
    a1, b1 = re_im(x.x1)
    a2, b2 = re_im(x.x2)
    swapped = False
    if b1.is_zero:
        if b2.is_zero:
            raise PrimaryBranchUnavailable(
                f"{x} has no imaginary part; no pairing-certified chain exists")
        a1, b1, a2, b2 = a2, b2, a1, b1
        swapped = True
    base = k.base
    if target is not None:
        i0 = imaginary_unit(k)
        if target != Point(i0, i0):
            raise ValueError("only the (i, i) target is supported")

    f1, lift1, s1 = ensure_sqrt(base, base.one + b2 * b2, positive=True)
    a1, b1, a2, b2 = (lift1(e) for e in (a1, b1, a2, b2))
    f2, lift2, s2 = ensure_sqrt(
        f1, f1.one + (b1 - 1) * (b1 - 1), positive=True)
    a1, b1, a2, b2, s1 = (lift2(e) for e in (a1, b1, a2, b2, s1))
    f3, lift3, s3 = ensure_sqrt(f2, f2(2), positive=True)
    a1, b1, a2, b2, s1, s2 = (lift3(e) for e in (a1, b1, a2, b2, s1, s2))

    start = Point(a1 + s1, a2 + s2)
    goal = Point(s3, f3.zero)
    real_chain = _auto_extend_chain(start, goal)
    f4 = real_chain.field
    a1, b1, a2, b2, s1 = (f4(e) for e in (a1, b1, a2, b2, s1))

    top = QuadExt(f4, -1)
    i = imaginary_unit(top)

    def cx(re_part: FieldElement, im_part: FieldElement) -> FieldElement:
        return top(re_part) + top(im_part) * i

    pts = [Point(cx(a1, b1), cx(a2, b2)),
           Point(cx(a1 + s1, b1), top(a2))]
    for real_pt in real_chain.points:
        pts.append(Point(cx(real_pt.x1, f4.one), top(real_pt.x2)))
    pts.append(Point(i, i))
    if swapped:
        pts = [Point(p.x2, p.x1) for p in pts]
    chain = Chain(pts, top,
                  reported_edge_bound=(real_chain.reported_edge_bound or 0) + 4)
    certs = []
    for idx in range(len(pts) - 1):
        pv = phi(pts[idx], pts[idx + 1])
        sv = psi(pts[idx], pts[idx + 1])
        certs.append(EdgeCertificate(pv, sv, not sv.is_zero))
    return chain, certs

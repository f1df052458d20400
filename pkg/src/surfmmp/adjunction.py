"""Induced boundaries on curves, inversion of adjunction, non-klt loci.

The boundary induced on a coefficient-one curve reads off the total
boundary (strict boundary plus crepant exceptionals) at each node of the
curve, with residue degrees inherited from the nodes. Inversion of
adjunction is checked two-sided: the ambient classification restricted
near the curve against coefficient bounds on the induced boundary, with
any disagreement treated as an internal contradiction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cone import Fibration, validate_fibration, vertical_curves
from .errors import InputError, InvariantViolation
from .lattice import HORIZONTAL, CurveDivisor
from .pullback import (
    CrepantData,
    Pair,
    crepant_coefficients,
    total_boundary,
)


def diff_divisor(pair: Pair, curve: str, crepant: CrepantData | None = None) -> CurveDivisor:
    """Boundary induced on a coefficient-one curve by adjunction.

    At each node of the curve the coefficient is the total boundary
    coefficient of the other branch; points keep their residue degrees.
    Nodes whose other branch carries no boundary are dropped.
    """
    config = pair.config
    config.index(curve)
    if pair.boundary.coefficient(curve) != 1:
        raise InputError(
            f"curve {curve} must appear in the boundary with coefficient 1"
        )
    if crepant is None:
        crepant = crepant_coefficients(pair)
    total = total_boundary(pair, crepant)
    points: dict[str, tuple[Fraction, int]] = {}
    for point in config.points_on(curve):
        other = point.curves[0] if point.curves[1] == curve else point.curves[1]
        coeff = total.coefficient(other)
        if coeff != 0:
            points[point.id] = (coeff, point.residue_degree)
    return CurveDivisor(curve, points)


# ---------------------------------------------------------------------------
# inversion of adjunction


@dataclass(frozen=True)
class AdjunctionReport:
    """Both sides of the adjunction biconditionals.

    ``ambient_*`` flags classify the pair near the curve on the ambient
    model; ``induced_*`` flags bound the induced boundary's coefficients.
    Construction fails if either biconditional breaks.
    """

    curve: str
    induced: CurveDivisor
    ambient_lc_near: bool
    ambient_plt_near: bool
    induced_lc: bool
    induced_klt: bool
    near_curves: tuple[str, ...]

    @property
    def lc_equivalence(self) -> bool:
        return self.ambient_lc_near == self.induced_lc

    @property
    def klt_equivalence(self) -> bool:
        return self.ambient_plt_near == self.induced_klt


def _near_data(pair: Pair, curve: str):
    """Curves whose image below meets the image of the given curve.

    One-step closure: direct neighbours, contracted bunches meeting the
    curve (their image is a point on it), and boundary curves hanging on
    those bunches (their image passes through that point).
    """
    config = pair.config
    near_components = [
        comp
        for comp in pair.model.components
        if any(config.pairing(curve, m) > 0 for m in comp)
    ]
    member_set = {m for comp in near_components for m in comp}
    near = {curve} | member_set
    for other in config.curve_ids():
        if other == curve or other in near:
            continue
        if config.pairing(curve, other) > 0:
            near.add(other)
        elif any(config.pairing(other, m) > 0 for m in member_set):
            near.add(other)
    return near, member_set


def inversion_of_adjunction(pair: Pair, curve: str) -> AdjunctionReport:
    """Two-sided adjunction check for a coefficient-one boundary curve.

    The ambient side classifies the pair near the curve: log canonical
    means total coefficients at most 1 on every curve whose image meets
    the curve; plt additionally needs crepant coefficients strictly below
    1 on bunches meeting the curve and no node near the curve joining two
    coefficient-one components. The induced side bounds the induced
    boundary's coefficients. The two sides are computed independently and
    must agree.
    """
    crepant = crepant_coefficients(pair)
    induced = diff_divisor(pair, curve, crepant)
    config = pair.config
    total = total_boundary(pair, crepant)
    near, members = _near_data(pair, curve)

    ambient_lc = all(total.coefficient(c) <= 1 for c in near)

    def near_nodes():
        for point in config.points:
            a, b = point.curves
            if curve in (a, b) or a in members or b in members:
                yield point

    ambient_plt = (
        ambient_lc
        and all(crepant.e(m) < 1 for m in members)
        and not any(
            total.coefficient(p.curves[0]) == 1
            and total.coefficient(p.curves[1]) == 1
            for p in near_nodes()
        )
    )

    coefficients = [c for c, _ in induced.points.values()]
    induced_lc = all(c <= 1 for c in coefficients)
    induced_klt = all(c < 1 for c in coefficients)

    report = AdjunctionReport(
        curve=curve,
        induced=induced,
        ambient_lc_near=ambient_lc,
        ambient_plt_near=ambient_plt,
        induced_lc=induced_lc,
        induced_klt=induced_klt,
        near_curves=tuple(sorted(near, key=config.index)),
    )
    if not report.lc_equivalence:
        raise InvariantViolation(
            f"adjunction broke for {curve}: ambient lc-near={ambient_lc} but "
            f"induced boundary lc={induced_lc}"
        )
    if not report.klt_equivalence:
        raise InvariantViolation(
            f"adjunction broke for {curve}: ambient plt-near={ambient_plt} "
            f"but induced boundary klt={induced_klt}"
        )
    return report


# ---------------------------------------------------------------------------
# non-klt locus


@dataclass(frozen=True)
class NkltLocus:
    """Curves with total boundary coefficient at least one, and the nodes
    joining two of them."""

    curves: frozenset[str]
    points: tuple[str, ...]

    def is_empty(self) -> bool:
        return not self.curves


def nklt_locus(pair: Pair, crepant: CrepantData | None = None) -> NkltLocus:
    total = total_boundary(pair, crepant)
    config = pair.config
    curves = frozenset(
        c for c, v in total.coefficients.items() if v >= 1
    )
    points = tuple(
        p.id
        for p in config.points
        if p.curves[0] in curves and p.curves[1] in curves
    )
    return NkltLocus(curves, points)


# ---------------------------------------------------------------------------
# connectedness


@dataclass(frozen=True)
class ConnectednessReport:
    """Per-base-point verdicts for the fibrewise non-klt locus.

    Verdicts: ``connected`` (dual-graph level), ``empty``,
    ``hypotheses-not-met`` and ``VIOLATION``. The last one only appears
    when the verified hypotheses hold and a fibre locus still falls apart,
    which the theory forbids.
    """

    verdicts: dict[str, str]
    hypotheses_met: bool
    hypothesis_detail: str
    locus: NkltLocus
    fiber_members: dict[str, tuple[str, ...]]
    note: str = "connectedness is checked at the dual-graph level"


def _anti_lc_nef_big(pair: Pair, fib: Fibration) -> tuple[bool, str]:
    from .cone import log_canonical_positivity

    try:
        flags, detail = log_canonical_positivity(pair, fib, negate=True)
    except InputError as exc:
        return False, str(exc)
    return flags.nef and flags.big, detail


def connectedness_check(pair: Pair, fib: Fibration) -> ConnectednessReport:
    """Check fibrewise connectedness of the non-klt locus.

    First verifies the hypotheses (minus the log canonical class is
    relatively nef and big); when they hold, each declared fibre's slice
    of the locus is collected, contracted bunches acting as junction
    points, and its dual graph must be empty or connected.
    """
    validate_fibration(pair.model, fib)
    crepant = crepant_coefficients(pair)
    locus = nklt_locus(pair, crepant)
    config = pair.config

    met, detail = _anti_lc_nef_big(pair, fib)
    if not met:
        return ConnectednessReport(
            verdicts={s: "hypotheses-not-met" for s in fib.base_points},
            hypotheses_met=False,
            hypothesis_detail=detail,
            locus=locus,
            fiber_members={},
        )

    contracted = pair.model.contracted
    verdicts: dict[str, str] = {}
    members: dict[str, tuple[str, ...]] = {}
    for s in fib.base_points:
        fiber_locus_curves = [
            c
            for c in vertical_curves(config, s)
            if c not in contracted and c in locus.curves
        ]
        comps_over_s = [
            comp
            for comp in pair.model.components
            if config.curve(comp[0]).vertical_over == s
        ]
        horizontal_locus = [
            c
            for c in locus.curves
            if c not in contracted and config.curve(c).vertical_over == HORIZONTAL
        ]

        vertices: list[tuple] = [("curve", c) for c in fiber_locus_curves]
        comp_vertices = []
        for comp in comps_over_s:
            is_locus = any(crepant.e(m) >= 1 for m in comp)
            touching = [
                c
                for c in locus.curves
                if c not in contracted
                and any(config.pairing(c, m) > 0 for m in comp)
            ]
            if is_locus or touching:
                comp_vertices.append((comp, touching))
        vertices.extend(("comp", comp) for comp, _ in comp_vertices)
        crossing = [
            ("point", h, p.id)
            for h in horizontal_locus
            for p in config.points_on(h)
            if (
                (other := p.curves[0] if p.curves[1] == h else p.curves[1])
                not in contracted
                and config.curve(other).vertical_over == s
                and other not in locus.curves
            )
        ]
        vertices.extend(crossing)

        adjacency: dict[tuple, set[tuple]] = {v: set() for v in vertices}
        for i, c in enumerate(fiber_locus_curves):
            for d in fiber_locus_curves[i + 1 :]:
                if config.pairing(c, d) > 0:
                    adjacency[("curve", c)].add(("curve", d))
                    adjacency[("curve", d)].add(("curve", c))
        for comp, touching in comp_vertices:
            for c in touching:
                if ("curve", c) in adjacency:
                    adjacency[("comp", comp)].add(("curve", c))
                    adjacency[("curve", c)].add(("comp", comp))

        if not vertices:
            verdicts[s] = "empty"
            members[s] = ()
            continue
        seen: set[tuple] = set()
        pieces = 0
        for v in vertices:
            if v in seen:
                continue
            pieces += 1
            stack = [v]
            seen.add(v)
            while stack:
                cur = stack.pop()
                for nxt in adjacency[cur]:
                    if nxt not in seen:
                        seen.add(nxt)
                        stack.append(nxt)
        verdicts[s] = "connected" if pieces == 1 else "VIOLATION"
        members[s] = tuple(
            sorted(fiber_locus_curves, key=config.index)
        ) + tuple(f"{v[1]}@{v[2]}" for v in crossing)

    return ConnectednessReport(
        verdicts=verdicts,
        hypotheses_met=True,
        hypothesis_detail=detail,
        locus=locus,
        fiber_members=members,
    )

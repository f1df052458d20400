"""Relative curve classes, extremal rays and positivity predicates.

The relative setting is declared, not discovered: every curve is marked
vertical over a named base point or horizontal, and for a fibration onto
a curve the full fibre class over each base point is part of the input.
Numerical classes pair curves against the surviving curves of the current
model through the Mumford pullback, and extremal rays are decided by
exact rational feasibility with verified separating functionals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .errors import BasisInsufficiency, InputError, InvariantViolation
from .lattice import HORIZONTAL, Configuration, Divisor, intersect
from .linalg import determinant, rank, solve_nonnegative
from .pullback import (
    Model,
    Pair,
    crepant_coefficients,
    log_canonical_pairing,
    log_canonical_pairing_curve,
    numerical_pullback,
    total_boundary,
)


@dataclass(frozen=True)
class Fibration:
    """Declared relative structure of the model over a base.

    ``target_dim`` is the dimension of the image: 0 (over a point),
    1 (onto a curve, with declared fibre classes) or 2 (birational).
    Vertical assignments live on the configuration's curves.
    """

    target_dim: int
    base_points: tuple[str, ...]
    fiber_classes: dict[str, Divisor]

    def __post_init__(self) -> None:
        if self.target_dim not in (0, 1, 2):
            raise InputError("target_dim must be 0, 1 or 2")
        if len(set(self.base_points)) != len(self.base_points):
            raise InputError("duplicate base point ids")


def vertical_curves(config: Configuration, base_point: str) -> tuple[str, ...]:
    return tuple(
        c.id for c in config.curves if c.vertical_over == base_point
    )


def all_vertical_curves(config: Configuration) -> tuple[str, ...]:
    return tuple(
        c.id
        for c in config.curves
        if c.vertical_over not in (None, HORIZONTAL)
    )


def _assert_semi_negative(config: Configuration, curves: tuple[str, ...]) -> None:
    # Zariski semi-negativity of a full fibre; brute-force principal minor
    # check, only run at desk scale
    if len(curves) > 8:
        return
    idx = [config.index(c) for c in curves]
    neg = [[-Fraction(config.matrix[i][j]) for j in idx] for i in idx]
    for size in range(1, len(curves) + 1):
        for rows in combinations(range(len(curves)), size):
            minor = determinant([[neg[i][j] for j in rows] for i in rows])
            if minor < 0:
                raise InputError(
                    f"fibre over-determined: curves {curves} are not "
                    "semi-negative definite"
                )


def validate_fibration(model: Model, fib: Fibration) -> None:
    """Check a fibration against a model; raises on inconsistency."""
    config = model.config
    declared = set(fib.base_points)
    for curve in config.curves:
        v = curve.vertical_over
        if v is None:
            raise InputError(
                f"curve {curve.id} has no vertical/horizontal assignment"
            )
        if v != HORIZONTAL and v not in declared:
            raise InputError(
                f"curve {curve.id} is vertical over undeclared base point {v}"
            )
    for component in model.components:
        over = {config.curve(c).vertical_over for c in component}
        if len(over) != 1 or HORIZONTAL in over:
            raise InputError(
                f"contracted component {component} must be vertical over a "
                "single base point"
            )
    for point in config.points:
        va = config.curve(point.curves[0]).vertical_over
        vb = config.curve(point.curves[1]).vertical_over
        if va != vb and HORIZONTAL not in (va, vb):
            raise InputError(
                f"point {point.id} joins vertical curves over distinct base "
                f"points {va} and {vb}"
            )
    if fib.target_dim == 0:
        if len(fib.base_points) != 1:
            raise InputError("target_dim 0 needs exactly one base point")
        if any(c.vertical_over == HORIZONTAL for c in config.curves):
            raise InputError("no curve is horizontal over a point")
    if fib.target_dim == 1:
        for s in fib.base_points:
            fiber = fib.fiber_classes.get(s)
            if fiber is None:
                raise InputError(f"missing fibre class over {s}")
            verts = set(vertical_curves(config, s))
            if fiber.support() != verts:
                raise InputError(
                    f"fibre class over {s} must be supported on exactly the "
                    f"vertical curves {sorted(verts)}"
                )
            for cid, coeff in fiber.coefficients.items():
                if coeff.denominator != 1 or coeff <= 0:
                    raise InputError(
                        f"fibre multiplicity on {cid} must be a positive integer"
                    )
            for cid in verts:
                value = intersect(
                    config, fiber, Divisor({cid: Fraction(1)})
                )
                if value != 0:
                    raise InputError(
                        f"fibre class over {s} pairs to {value} with {cid}; "
                        "full fibres are orthogonal to their components"
                    )
            _assert_semi_negative(config, tuple(sorted(verts, key=config.index)))
    if fib.target_dim == 2:
        from .lattice import is_negative_definite

        for s in fib.base_points:
            verts = vertical_curves(config, s)
            if verts and not is_negative_definite(config, verts):
                raise InputError(
                    f"vertical curves over {s} are not negative definite; a "
                    "birational target needs contractible fibres"
                )


# ---------------------------------------------------------------------------
# curve classes


@dataclass(frozen=True)
class CurveClass:
    curve: str
    vector: tuple[Fraction, ...]

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.vector)


def curve_classes(model: Model, fib: Fibration) -> tuple[list[CurveClass], int]:
    """Class vectors of the surviving vertical curves, plus their rank.

    The pairing basis is every surviving curve of the model, in
    configuration order; entries are Mumford-pullback intersections. A
    vertical curve with identically zero class means the declared basis
    cannot see it, which is reported, never repaired.
    """
    validate_fibration(model, fib)
    config = model.config
    basis = model.remaining_curves()
    pulled = {b: numerical_pullback(model, Divisor({b: Fraction(1)})) for b in basis}
    classes = []
    for cid in basis:
        if config.curve(cid).vertical_over in (None, HORIZONTAL):
            continue
        one = Divisor({cid: Fraction(1)})
        vector = tuple(intersect(config, pulled[b], one) for b in basis)
        cc = CurveClass(cid, vector)
        if cc.is_zero():
            raise BasisInsufficiency(
                f"vertical curve {cid} has zero class against the declared "
                "basis; add a separating horizontal divisor"
            )
        classes.append(cc)
    rho = rank([list(c.vector) for c in classes]) if classes else 0
    return classes, rho


# ---------------------------------------------------------------------------
# extremal rays


@dataclass(frozen=True)
class ExtremalRay:
    """A negative extremal generator with its exact certificates.

    ``separator`` is a rational functional that is nonpositive on every
    other generator and positive on this one; it witnesses that the ray
    is not a nonnegative combination of the rest.
    """

    curve: str
    vector: tuple[Fraction, ...]
    pairing: Fraction
    separator: tuple[Fraction, ...]


def _proportional_positive(v: tuple[Fraction, ...], w: tuple[Fraction, ...]) -> bool:
    pivot = next((k for k, x in enumerate(v) if x != 0), None)
    if pivot is None or w[pivot] == 0 or (v[pivot] > 0) != (w[pivot] > 0):
        return False
    return all(v[pivot] * w[k] == w[pivot] * v[k] for k in range(len(v)))


def _check_pointed(classes: list[CurveClass]) -> None:
    dim = len(classes[0].vector)
    columns = [list(c.vector) + [Fraction(1)] for c in classes]
    target = [Fraction(0)] * dim + [Fraction(1)]
    x, _ = solve_nonnegative(columns, target)
    if x is not None:
        raise InputError(
            "cone of curve classes contains a line; the declared basis does "
            "not separate effective classes"
        )


def negative_extremal_rays(pair: Pair, fib: Fibration) -> list[ExtremalRay]:
    """Extremal generators of the vertical cone that pair negatively with
    the log canonical class.

    Extremality of a generator means it is not a nonnegative combination
    of the generators off its ray, decided by exact feasibility; the
    infeasibility witness is returned and re-verified. Among generators on
    one ray the lowest configuration index represents it.
    """
    classes, _ = curve_classes(pair.model, fib)
    if not classes:
        return []
    _check_pointed(classes)
    config = pair.config

    groups: list[list[CurveClass]] = []
    for cc in classes:
        for group in groups:
            if _proportional_positive(group[0].vector, cc.vector):
                group.append(cc)
                break
        else:
            groups.append([cc])

    rays = []
    for group in groups:
        rep = min(group, key=lambda cc: config.index(cc.curve))
        members = {cc.curve for cc in group}
        others = [cc for cc in classes if cc.curve not in members]
        if others:
            columns = [list(cc.vector) for cc in others]
            x, farkas = solve_nonnegative(columns, list(rep.vector))
            if x is not None:
                continue  # redundant generator, inside the cone of the rest
            separator = tuple(-y for y in farkas)
        else:
            separator = rep.vector
        assert sum(a * b for a, b in zip(separator, rep.vector)) > 0
        assert all(
            sum(a * b for a, b in zip(separator, cc.vector)) <= 0
            for cc in others
        )
        pairing = log_canonical_pairing_curve(pair, rep.curve)
        if pairing < 0:
            rays.append(ExtremalRay(rep.curve, rep.vector, pairing, separator))
    rays.sort(key=lambda r: config.index(r.curve))
    return rays


# ---------------------------------------------------------------------------
# positivity


@dataclass(frozen=True)
class PositivityFlags:
    nef: bool
    ample: bool
    big: bool


def positivity(
    model: Model,
    divisor: Divisor,
    fib: Fibration,
    decomposition: tuple[Divisor, Divisor] | None = None,
) -> PositivityFlags:
    """Relative nef / ample / big flags of a divisor on the current model.

    Nef and ample test pairings against surviving vertical curves; over a
    point ampleness and bigness additionally need positive
    self-intersection. Bigness over a curve tests the fibre classes; the
    birational case is always big. A user-supplied ``ample + effective``
    decomposition certifies bigness in any case, after its pairings are
    checked to match.
    """
    validate_fibration(model, fib)
    config = model.config
    pulled = numerical_pullback(model, divisor)
    verts = [
        c for c in model.remaining_curves()
        if config.curve(c).vertical_over not in (None, HORIZONTAL)
    ]
    values = {
        c: intersect(config, pulled, Divisor({c: Fraction(1)})) for c in verts
    }
    nef = all(v >= 0 for v in values.values())
    strictly = all(v > 0 for v in values.values())
    self_int = intersect(config, pulled, pulled)

    if fib.target_dim == 0:
        ample = strictly and self_int > 0
        big = nef and self_int > 0
    elif fib.target_dim == 1:
        ample = strictly
        big = nef and all(
            intersect(config, pulled, fib.fiber_classes[s]) > 0
            for s in fib.base_points
        )
    else:
        ample = strictly
        big = True

    if not big and decomposition is not None:
        ample_part, effective_part = decomposition
        matches = all(
            intersect(
                config,
                numerical_pullback(model, ample_part + effective_part),
                Divisor({b: Fraction(1)}),
            )
            == intersect(config, pulled, Divisor({b: Fraction(1)}))
            for b in model.remaining_curves()
        )
        if (
            matches
            and effective_part.is_effective()
            and positivity(model, ample_part, fib).ample
        ):
            big = True
    return PositivityFlags(nef, ample, big)


def log_canonical_positivity(
    pair: Pair, fib: Fibration, negate: bool = True
) -> tuple[PositivityFlags, str]:
    """Positivity flags of the (negated) log canonical class of a pair.

    The class K + boundary is not curve-supported, so its pairings go
    through the crepant pullback instead of ``positivity``. Over a point
    the square needs the declared canonical self-intersection; without it
    bigness cannot be verified and an error is raised.
    """
    validate_fibration(pair.model, fib)
    config = pair.config
    crepant = crepant_coefficients(pair)
    sign = -1 if negate else 1
    verts = [
        c
        for c in pair.model.remaining_curves()
        if config.curve(c).vertical_over not in (None, HORIZONTAL)
    ]
    values = {
        c: sign * log_canonical_pairing_curve(pair, c, crepant) for c in verts
    }
    nef = all(v >= 0 for v in values.values())
    strictly = all(v > 0 for v in values.values())
    bad = {c: v for c, v in values.items() if v < 0}
    label = "-(K+boundary)" if negate else "K+boundary"

    if fib.target_dim == 2:
        detail = (
            f"{label} not relatively nef: negative pairings {bad}"
            if bad
            else f"{label} relatively nef; big automatic for a birational target"
        )
        return PositivityFlags(nef, strictly, True), detail
    if fib.target_dim == 1:
        fiber_values = {
            s: sign * log_canonical_pairing(pair, fib.fiber_classes[s], crepant)
            for s in fib.base_points
        }
        big = nef and all(v > 0 for v in fiber_values.values())
        if bad:
            detail = f"{label} not relatively nef: negative pairings {bad}"
        elif not big:
            detail = f"{label} not relatively big: fibre pairings {fiber_values}"
        else:
            detail = f"{label} nef with positive fibre pairings {fiber_values}"
        return PositivityFlags(nef, strictly, big), detail
    if config.canon_self_int is None:
        raise InputError(
            "cannot compute the square of the log canonical class over a "
            "point: the configuration does not declare canon_self_int"
        )
    total = total_boundary(pair, crepant)
    from .lattice import canonical_pairing

    square = (
        Fraction(config.canon_self_int)
        + 2 * canonical_pairing(config, total)
        + intersect(config, total, total)
    )
    ample = strictly and square > 0
    big = nef and square > 0
    if bad:
        detail = f"{label} not nef: negative pairings {bad}"
    else:
        detail = f"{label} nef with square {square}"
    return PositivityFlags(nef, ample, big), detail


# ---------------------------------------------------------------------------
# fibre semi-negativity witness


def fiber_seminegative_witness(
    model: Model, fib: Fibration, base_point: str, divisor: Divisor
) -> str:
    """Find a fibre component with positive coefficient pairing
    nonpositively with the divisor.

    The divisor must be supported on the surviving fibre curves over the
    base point and must have some positive coefficient. A witness always
    exists because the surviving fibre is orthogonal to its components;
    search order is ascending configuration index, so the answer is
    deterministic.
    """
    validate_fibration(model, fib)
    if fib.target_dim != 1:
        raise InputError("fibre witnesses require a one-dimensional target")
    config = model.config
    fiber_curves = [
        c
        for c in vertical_curves(config, base_point)
        if c not in model.contracted
    ]
    if not fiber_curves:
        raise InputError(f"no surviving fibre curves over {base_point}")
    if not set(divisor.support()) <= set(fiber_curves):
        raise InputError(
            "divisor must be supported on the surviving fibre curves over "
            f"{base_point}"
        )
    if divisor.is_zero() or not any(
        v > 0 for v in divisor.coefficients.values()
    ):
        raise InputError("divisor has no positive part; the lemma needs D not <= 0")
    pulled = numerical_pullback(model, divisor)
    for cid in sorted(fiber_curves, key=config.index):
        if divisor.coefficient(cid) > 0:
            value = intersect(config, pulled, Divisor({cid: Fraction(1)}))
            if value <= 0:
                return cid
    raise InvariantViolation(
        "no fibre component witnesses semi-negativity; the fibre data is "
        "inconsistent"
    )

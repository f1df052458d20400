"""Exact intersection theory on a regular ambient surface model.

The ambient model is a configuration: a finite set of curves, a symmetric
integer intersection matrix over the base field, the canonical pairing
vector (K.C for each curve), and transverse incidence points weighted by
residue-field degrees. Everything downstream (pullbacks, discrepancies,
cones, MMP runs) is a pure function of this data.

Conventions enforced throughout:

* at most two distinct curves pass through an incidence point, and the
  off-diagonal matrix entry equals the sum of residue degrees of the
  shared points;
* ``self_int + canon_int`` is even for every curve, so the derived
  ``chi = -(self_int + canon_int)/2`` is an integer;
* all divisor coefficients are exact rationals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import InputError
from .linalg import (
    congruence_diagonalize,
    leading_principal_minors,
    quadratic_form,
)

HORIZONTAL = "horizontal"

RationalLike = Fraction | int | str


def as_fraction(value: RationalLike) -> Fraction:
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise InputError(f"not an exact rational: {value!r}") from exc


@dataclass(frozen=True)
class Curve:
    """One irreducible curve of the ambient model.

    ``self_int`` is C.C over the base field, ``canon_int`` is K.C, and
    ``vertical_over`` names the base point the curve sits over (or
    ``"horizontal"``) when a fibration is in play.
    """

    id: str
    self_int: int
    canon_int: int
    vertical_over: str | None = None

    @property
    def chi(self) -> int:
        if (self.self_int + self.canon_int) % 2 != 0:
            raise InputError(
                f"curve {self.id}: self_int + canon_int must be even"
            )
        return -(self.self_int + self.canon_int) // 2


@dataclass(frozen=True)
class IncidencePoint:
    """A transverse intersection point of exactly two distinct curves."""

    id: str
    curves: tuple[str, str]
    residue_degree: int = 1


@dataclass(frozen=True)
class Configuration:
    curves: tuple[Curve, ...]
    matrix: tuple[tuple[int, ...], ...]
    points: tuple[IncidencePoint, ...]
    chi_structure: int | None = None
    canon_self_int: int | None = None
    _index: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self) -> None:
        index = {curve.id: i for i, curve in enumerate(self.curves)}
        if len(index) != len(self.curves):
            raise InputError("duplicate curve ids in configuration")
        point_ids = {p.id for p in self.points}
        if len(point_ids) != len(self.points):
            raise InputError("duplicate point ids in configuration")
        object.__setattr__(self, "_index", index)

    # -- lookups ---------------------------------------------------------

    def index(self, curve_id: str) -> int:
        try:
            return self._index[curve_id]
        except KeyError:
            raise InputError(f"unknown curve id: {curve_id}") from None

    def curve(self, curve_id: str) -> Curve:
        return self.curves[self.index(curve_id)]

    def has_curve(self, curve_id: str) -> bool:
        return curve_id in self._index

    def point(self, point_id: str) -> IncidencePoint:
        for p in self.points:
            if p.id == point_id:
                return p
        raise InputError(f"unknown point id: {point_id}")

    def pairing(self, a: str, b: str) -> int:
        return self.matrix[self.index(a)][self.index(b)]

    def points_between(self, a: str, b: str) -> tuple[IncidencePoint, ...]:
        pair = {a, b}
        return tuple(p for p in self.points if set(p.curves) == pair)

    def points_on(self, curve_id: str) -> tuple[IncidencePoint, ...]:
        return tuple(p for p in self.points if curve_id in p.curves)

    def curve_ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.curves)

    def canon_vector(self) -> tuple[int, ...]:
        return tuple(c.canon_int for c in self.curves)


@dataclass(frozen=True)
class Divisor:
    """Rational divisor supported on configuration curves.

    Zero coefficients are dropped at construction, so two divisors are
    equal exactly when they have identical supported coefficients.
    """

    coefficients: Mapping[str, Fraction]

    def __post_init__(self) -> None:
        cleaned = {
            cid: as_fraction(v)
            for cid, v in self.coefficients.items()
            if as_fraction(v) != 0
        }
        object.__setattr__(self, "coefficients", cleaned)

    @staticmethod
    def zero() -> "Divisor":
        return Divisor({})

    @staticmethod
    def of(**coeffs: RationalLike) -> "Divisor":
        return Divisor({k: as_fraction(v) for k, v in coeffs.items()})

    def coefficient(self, curve_id: str) -> Fraction:
        return self.coefficients.get(curve_id, Fraction(0))

    def support(self) -> frozenset[str]:
        return frozenset(self.coefficients)

    def is_zero(self) -> bool:
        return not self.coefficients

    def is_effective(self) -> bool:
        return all(v >= 0 for v in self.coefficients.values())

    def __add__(self, other: "Divisor") -> "Divisor":
        merged = dict(self.coefficients)
        for cid, v in other.coefficients.items():
            merged[cid] = merged.get(cid, Fraction(0)) + v
        return Divisor(merged)

    def __sub__(self, other: "Divisor") -> "Divisor":
        return self + other.scale(-1)

    def scale(self, factor: RationalLike) -> "Divisor":
        f = as_fraction(factor)
        return Divisor({cid: f * v for cid, v in self.coefficients.items()})

    def restrict(self, keep: Iterable[str]) -> "Divisor":
        keep = set(keep)
        return Divisor({c: v for c, v in self.coefficients.items() if c in keep})

    def drop(self, remove: Iterable[str]) -> "Divisor":
        remove = set(remove)
        return Divisor(
            {c: v for c, v in self.coefficients.items() if c not in remove}
        )

    # -- coefficient filters (threshold splits, round-downs) -------------

    def filter_le(self, a: RationalLike) -> "Divisor":
        t = as_fraction(a)
        return Divisor({c: v for c, v in self.coefficients.items() if v <= t})

    def filter_ge(self, a: RationalLike) -> "Divisor":
        t = as_fraction(a)
        return Divisor({c: v for c, v in self.coefficients.items() if v >= t})

    def filter_lt(self, a: RationalLike) -> "Divisor":
        t = as_fraction(a)
        return Divisor({c: v for c, v in self.coefficients.items() if v < t})

    def filter_gt(self, a: RationalLike) -> "Divisor":
        t = as_fraction(a)
        return Divisor({c: v for c, v in self.coefficients.items() if v > t})

    def floor(self) -> "Divisor":
        return Divisor(
            {c: Fraction(math.floor(v)) for c, v in self.coefficients.items()}
        )

    def ceil(self) -> "Divisor":
        return Divisor(
            {c: Fraction(math.ceil(v)) for c, v in self.coefficients.items()}
        )

    def fractional(self) -> "Divisor":
        return self - self.floor()

    def truncate_at_one(self) -> "Divisor":
        return Divisor(
            {c: min(v, Fraction(1)) for c, v in self.coefficients.items()}
        )


def coefficient_filter(divisor: Divisor, op: str, threshold: RationalLike) -> Divisor:
    """Threshold split of a divisor: keep coefficients satisfying ``op``.

    ``op`` is one of ``"<="``, ``">="``, ``"<"``, ``">"``.
    """
    table = {
        "<=": divisor.filter_le,
        ">=": divisor.filter_ge,
        "<": divisor.filter_lt,
        ">": divisor.filter_gt,
    }
    if op not in table:
        raise InputError(f"unknown filter operator: {op!r}")
    return table[op](threshold)


@dataclass(frozen=True)
class CurveDivisor:
    """Point-supported divisor on a single curve.

    Each point carries its residue degree, so the degree of the divisor
    is the weighted sum of coefficients.
    """

    host: str
    points: Mapping[str, tuple[Fraction, int]]

    def __post_init__(self) -> None:
        cleaned = {}
        for pid, (coeff, degree) in self.points.items():
            coeff = as_fraction(coeff)
            if degree <= 0:
                raise InputError(f"point {pid}: residue degree must be positive")
            if coeff != 0:
                cleaned[pid] = (coeff, int(degree))
        object.__setattr__(self, "points", cleaned)

    def coefficient(self, point_id: str) -> Fraction:
        return self.points.get(point_id, (Fraction(0), 1))[0]

    def coefficients(self) -> dict[str, Fraction]:
        return {pid: coeff for pid, (coeff, _) in self.points.items()}

    def is_integral(self) -> bool:
        return all(coeff.denominator == 1 for coeff, _ in self.points.values())


def degree_on_curve(divisor: CurveDivisor) -> Fraction:
    """Degree of a point divisor: sum of coefficient * residue degree."""
    return sum(
        (coeff * degree for coeff, degree in divisor.points.values()),
        Fraction(0),
    )


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    code: str
    location: str
    message: str

    def __str__(self) -> str:
        return f"[{self.code}] {self.location}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def passed(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.passed


def validate_configuration(config: Configuration) -> ValidationReport:
    """Check every structural invariant of an ambient model.

    Report-valued: callers that need hard failure raise on a non-empty
    report. Checks cover matrix shape and symmetry, diagonal consistency,
    nonnegative off-diagonal entries, adjunction parity, point discipline
    and the incidence sums matching the matrix.
    """
    bad: list[Violation] = []
    n = len(config.curves)
    ids = config.curve_ids()

    if len(config.matrix) != n or any(len(row) != n for row in config.matrix):
        bad.append(
            Violation(
                "matrix-shape",
                "matrix",
                f"expected a {n}x{n} matrix matching the curve list",
            )
        )
        return ValidationReport(tuple(bad))

    for i in range(n):
        for j in range(n):
            if not isinstance(config.matrix[i][j], int):
                bad.append(
                    Violation(
                        "matrix-not-integer",
                        f"matrix[{i}][{j}]",
                        f"entry {config.matrix[i][j]!r} is not an integer",
                    )
                )
    for i in range(n):
        for j in range(i + 1, n):
            if config.matrix[i][j] != config.matrix[j][i]:
                bad.append(
                    Violation(
                        "matrix-asymmetric",
                        f"matrix[{i}][{j}]",
                        f"{config.matrix[i][j]} != {config.matrix[j][i]}",
                    )
                )
            if config.matrix[i][j] < 0:
                bad.append(
                    Violation(
                        "negative-off-diagonal",
                        f"matrix[{i}][{j}]",
                        f"distinct curves {ids[i]}, {ids[j]} pair to "
                        f"{config.matrix[i][j]} < 0",
                    )
                )
    for i, curve in enumerate(config.curves):
        if config.matrix[i][i] != curve.self_int:
            bad.append(
                Violation(
                    "diagonal-mismatch",
                    f"curves[{i}]",
                    f"{curve.id}: matrix diagonal {config.matrix[i][i]} "
                    f"!= self_int {curve.self_int}",
                )
            )
        if (curve.self_int + curve.canon_int) % 2 != 0:
            bad.append(
                Violation(
                    "parity",
                    f"curves[{i}]",
                    f"{curve.id}: self_int + canon_int = "
                    f"{curve.self_int + curve.canon_int} is odd",
                )
            )

    sums: dict[frozenset[str], int] = {}
    for k, point in enumerate(config.points):
        a, b = point.curves
        if a == b:
            bad.append(
                Violation(
                    "point-curves-not-distinct",
                    f"points[{k}]",
                    f"{point.id}: both branches name curve {a}",
                )
            )
            continue
        missing = [c for c in (a, b) if c not in config._index]
        if missing:
            bad.append(
                Violation(
                    "point-curve-unknown",
                    f"points[{k}]",
                    f"{point.id}: unknown curve(s) {', '.join(missing)}",
                )
            )
            continue
        if point.residue_degree <= 0:
            bad.append(
                Violation(
                    "residue-degree-nonpositive",
                    f"points[{k}]",
                    f"{point.id}: residue degree {point.residue_degree}",
                )
            )
            continue
        key = frozenset((a, b))
        sums[key] = sums.get(key, 0) + point.residue_degree

    if not any(v.code == "matrix-shape" for v in bad):
        for i in range(n):
            for j in range(i + 1, n):
                expected = config.matrix[i][j]
                got = sums.pop(frozenset((ids[i], ids[j])), 0)
                if expected != got:
                    bad.append(
                        Violation(
                            "incidence-sum",
                            f"matrix[{i}][{j}]",
                            f"{ids[i]}.{ids[j]} = {expected} but incidence "
                            f"degrees sum to {got}",
                        )
                    )
    return ValidationReport(tuple(bad))


def require_valid(config: Configuration) -> None:
    report = validate_configuration(config)
    if not report.passed:
        raise InputError(
            "invalid configuration: " + "; ".join(str(v) for v in report.violations)
        )


# ---------------------------------------------------------------------------
# pairings


def intersect(config: Configuration, d1: Divisor, d2: Divisor) -> Fraction:
    """Bilinear extension of the intersection matrix; exact and symmetric."""
    total = Fraction(0)
    for a, va in d1.coefficients.items():
        i = config.index(a)
        for b, vb in d2.coefficients.items():
            total += va * vb * config.matrix[i][config.index(b)]
    return total


def canonical_pairing(config: Configuration, d: Divisor) -> Fraction:
    """K.D computed from the canonical pairing vector."""
    return sum(
        (v * config.curve(c).canon_int for c, v in d.coefficients.items()),
        Fraction(0),
    )


# ---------------------------------------------------------------------------
# negative definiteness


@dataclass(frozen=True)
class DefinitenessCertificate:
    """Outcome of a definiteness test, always accompanied by evidence.

    When negative definite: the leading principal minors, which strictly
    alternate in sign starting negative. Otherwise: an exact vector v with
    v^T M v >= 0.
    """

    curve_ids: tuple[str, ...]
    negative_definite: bool
    leading_minors: tuple[Fraction, ...]
    witness: tuple[Fraction, ...] | None = None
    witness_value: Fraction | None = None

    def __bool__(self) -> bool:
        return self.negative_definite


def is_negative_definite(
    config: Configuration, subset: Iterable[str]
) -> DefinitenessCertificate:
    """Decide negative definiteness of a principal submatrix exactly.

    The subset is ordered by configuration index. The positive answer is
    certified by alternating leading principal minors; the negative one by
    an explicit vector with nonnegative value under the form.
    """
    ids = sorted(set(subset), key=config.index)
    if not ids:
        raise InputError("empty subset: definiteness is undefined")
    idx = [config.index(c) for c in ids]
    sub = [[Fraction(config.matrix[i][j]) for j in idx] for i in idx]
    minors = leading_principal_minors(sub)
    alternating = all(
        (minor > 0 if k % 2 else minor < 0) for k, minor in enumerate(minors)
    )
    if alternating:
        return DefinitenessCertificate(tuple(ids), True, tuple(minors))
    diag, basis = congruence_diagonalize(sub)
    for k, value in enumerate(diag):
        if value >= 0:
            witness = tuple(basis[k])
            check = quadratic_form(sub, witness)
            assert check == value and check >= 0
            return DefinitenessCertificate(
                tuple(ids), False, tuple(minors), witness, check
            )
    raise AssertionError("minor test and diagonalization disagree")


# ---------------------------------------------------------------------------
# blowup


def blowup_at_node(
    config: Configuration,
    point_id: str,
    new_curve_id: str | None = None,
) -> Configuration:
    """Blow up a transverse node of residue degree d.

    The exceptional curve E gets E.E = -d and K.E = -d; both branches lose
    d from their self-intersection and mutual pairing, gain d on the
    canonical pairing, and meet E in one new degree-d node each. All
    parity and incidence invariants are preserved, and chi of the surface
    is unchanged while K.K drops by d when declared.
    """
    point = config.point(point_id)
    a, b = point.curves
    d = point.residue_degree
    ia, ib = config.index(a), config.index(b)

    if new_curve_id is None:
        new_curve_id = f"exc_{point_id}"
        while config.has_curve(new_curve_id):
            new_curve_id += "_"
    elif config.has_curve(new_curve_id):
        raise InputError(f"curve id already used: {new_curve_id}")

    def vertical_for_exceptional() -> str | None:
        va = config.curves[ia].vertical_over
        vb = config.curves[ib].vertical_over
        verticals = {v for v in (va, vb) if v not in (None, HORIZONTAL)}
        if len(verticals) > 1:
            raise InputError(
                f"node {point_id} joins curves over distinct base points"
            )
        if verticals:
            return verticals.pop()
        if va is None and vb is None:
            return None
        # two horizontal branches: the node sits over an undeclared base
        # point, so the exceptional curve cannot be placed in any declared
        # fibre
        raise InputError(
            f"node {point_id} joins two horizontal curves; the exceptional "
            "curve has no declared base point"
        )

    new_curves = list(config.curves)
    new_curves[ia] = Curve(
        a,
        config.curves[ia].self_int - d,
        config.curves[ia].canon_int + d,
        config.curves[ia].vertical_over,
    )
    new_curves[ib] = Curve(
        b,
        config.curves[ib].self_int - d,
        config.curves[ib].canon_int + d,
        config.curves[ib].vertical_over,
    )
    vertical = None
    if any(c.vertical_over is not None for c in config.curves):
        vertical = vertical_for_exceptional()
    new_curves.append(Curve(new_curve_id, -d, -d, vertical))

    n = len(config.curves)
    new_matrix = [list(row) + [0] for row in config.matrix]
    new_matrix.append([0] * (n + 1))
    new_matrix[ia][ib] -= d
    new_matrix[ib][ia] -= d
    new_matrix[ia][ia] -= d
    new_matrix[ib][ib] -= d
    new_matrix[ia][n] = new_matrix[n][ia] = d
    new_matrix[ib][n] = new_matrix[n][ib] = d
    new_matrix[n][n] = -d

    existing = {p.id for p in config.points}

    def fresh_point_id(base: str) -> str:
        pid = base
        while pid in existing:
            pid += "_"
        existing.add(pid)
        return pid

    new_points = [p for p in config.points if p.id != point_id]
    new_points.append(
        IncidencePoint(fresh_point_id(f"{point_id}_{a}"), (a, new_curve_id), d)
    )
    new_points.append(
        IncidencePoint(fresh_point_id(f"{point_id}_{b}"), (b, new_curve_id), d)
    )

    result = Configuration(
        curves=tuple(new_curves),
        matrix=tuple(tuple(row) for row in new_matrix),
        points=tuple(new_points),
        chi_structure=config.chi_structure,
        canon_self_int=(
            None if config.canon_self_int is None else config.canon_self_int - d
        ),
    )
    require_valid(result)
    return result


def pullback_through_blowup(
    config: Configuration, point_id: str, divisor: Divisor, new_curve_id: str
) -> Divisor:
    """Total transform of a divisor under one node blowup.

    The exceptional coefficient is the sum of the two branch coefficients,
    which keeps all pairings of pulled-back divisors unchanged.
    """
    point = config.point(point_id)
    a, b = point.curves
    extra = divisor.coefficient(a) + divisor.coefficient(b)
    coeffs = dict(divisor.coefficients)
    if extra != 0:
        coeffs[new_curve_id] = extra
    return Divisor(coeffs)

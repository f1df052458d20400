"""Numerical pullback, crepant coefficients and singularity classes.

A model is the ambient configuration plus a declared set of contracted
curves; it stands for the normal surface obtained by contracting them.
Each connected bunch of contracted curves must be negative definite, which
makes the orthogonal correction of any divisor unique and lets every
intersection number on the contracted surface be computed upstairs.

The crepant coefficients e_j solve, per bunch,

    (K + strict boundary + sum_j e_j E_j) . E_k = 0   for every k,

and everything about singularities of the pair is read off from them:
discrepancy -e_j, log discrepancy 1 - e_j, and the classification flags.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InputError, InvariantViolation
from .lattice import (
    Configuration,
    DefinitenessCertificate,
    Divisor,
    canonical_pairing,
    intersect,
    is_negative_definite,
    require_valid,
)
from .linalg import solve_square


@dataclass(frozen=True)
class Model:
    """A configuration together with the curves contracted below it.

    Connected components of the contracted set are computed from the
    intersection matrix; each must be negative definite and the
    certificates are kept. ``q_factorial`` is a user declaration carried
    through contractions, never derived.
    """

    config: Configuration
    contracted: frozenset[str]
    q_factorial: bool | None = None
    components: tuple[tuple[str, ...], ...] = ()
    certificates: tuple[DefinitenessCertificate, ...] = ()

    def __post_init__(self) -> None:
        require_valid(self.config)
        contracted = frozenset(self.contracted)
        object.__setattr__(self, "contracted", contracted)
        for cid in contracted:
            self.config.index(cid)
        components = _connected_components(self.config, contracted)
        certificates = []
        for component in components:
            cert = is_negative_definite(self.config, component)
            if not cert:
                raise InputError(
                    f"contracted component {component} is not negative definite; "
                    f"witness {cert.witness} has value {cert.witness_value}"
                )
            certificates.append(cert)
        object.__setattr__(self, "components", tuple(components))
        object.__setattr__(self, "certificates", tuple(certificates))

    def remaining_curves(self) -> tuple[str, ...]:
        return tuple(
            c.id for c in self.config.curves if c.id not in self.contracted
        )

    def component_of(self, curve_id: str) -> tuple[str, ...]:
        for component in self.components:
            if curve_id in component:
                return component
        raise InputError(f"curve {curve_id} is not contracted")

    def contract_also(self, curve_id: str) -> "Model":
        if curve_id in self.contracted:
            raise InputError(f"curve {curve_id} is already contracted")
        return Model(
            self.config, self.contracted | {curve_id}, q_factorial=self.q_factorial
        )


def _connected_components(
    config: Configuration, subset: frozenset[str]
) -> list[tuple[str, ...]]:
    ordered = sorted(subset, key=config.index)
    seen: set[str] = set()
    components = []
    for start in ordered:
        if start in seen:
            continue
        stack, bunch = [start], []
        seen.add(start)
        while stack:
            cur = stack.pop()
            bunch.append(cur)
            for other in ordered:
                if other not in seen and config.pairing(cur, other) > 0:
                    seen.add(other)
                    stack.append(other)
        components.append(tuple(sorted(bunch, key=config.index)))
    return components


@dataclass(frozen=True)
class Pair:
    """A model with an effective rational boundary on non-contracted curves."""

    model: Model
    boundary: Divisor

    def __post_init__(self) -> None:
        for cid, coeff in self.boundary.coefficients.items():
            self.model.config.index(cid)
            if cid in self.model.contracted:
                raise InputError(
                    f"boundary touches contracted curve {cid}; boundaries live "
                    "on the model below"
                )
            if coeff < 0:
                raise InputError(f"boundary coefficient on {cid} is negative")

    @property
    def config(self) -> Configuration:
        return self.model.config

    def push_forward_through(self, curve_id: str) -> "Pair":
        return Pair(
            self.model.contract_also(curve_id), self.boundary.drop({curve_id})
        )


# ---------------------------------------------------------------------------
# Mumford pullback


def numerical_pullback(model: Model, divisor: Divisor) -> Divisor:
    """Unique extension of a divisor orthogonal to every contracted curve.

    Solves one exact linear system per contracted bunch; negative
    definiteness guarantees a unique solution.
    """
    for cid in divisor.support():
        if cid in model.contracted:
            raise InputError(
                f"divisor touches contracted curve {cid}; pull back only "
                "divisors from the model below"
            )
        model.config.index(cid)
    corrections: dict[str, Fraction] = {}
    for component in model.components:
        rhs = [
            -sum(
                (
                    coeff * model.config.pairing(cid, ek)
                    for cid, coeff in divisor.coefficients.items()
                ),
                Fraction(0),
            )
            for ek in component
        ]
        if all(v == 0 for v in rhs):
            continue
        matrix = [
            [Fraction(model.config.pairing(ej, ek)) for ej in component]
            for ek in component
        ]
        solution = solve_square(matrix, rhs)
        for ej, value in zip(component, solution):
            if value != 0:
                corrections[ej] = value
    return divisor + Divisor(corrections)


def model_intersect(model: Model, d1: Divisor, d2: Divisor) -> Fraction:
    """Intersection number on the contracted surface via pullbacks."""
    return intersect(model.config, numerical_pullback(model, d1), d2)


def model_self_intersection(model: Model, curve_id: str) -> Fraction:
    one = Divisor({curve_id: Fraction(1)})
    return model_intersect(model, one, one)


# ---------------------------------------------------------------------------
# crepant coefficients


@dataclass(frozen=True)
class ComponentSystem:
    """The defining linear system of one contracted bunch, kept as a
    certificate: matrix * e = rhs re-substitutes exactly."""

    curves: tuple[str, ...]
    matrix: tuple[tuple[Fraction, ...], ...]
    rhs: tuple[Fraction, ...]
    solution: tuple[Fraction, ...]


@dataclass(frozen=True)
class CrepantData:
    coefficients: dict[str, Fraction]
    systems: tuple[ComponentSystem, ...]

    def e(self, curve_id: str) -> Fraction:
        return self.coefficients[curve_id]

    def discrepancies(self) -> dict[str, Fraction]:
        return {cid: -e for cid, e in self.coefficients.items()}

    def log_discrepancies(self) -> dict[str, Fraction]:
        return {cid: 1 - e for cid, e in self.coefficients.items()}

    def as_divisor(self) -> Divisor:
        return Divisor(dict(self.coefficients))


def crepant_coefficients(pair: Pair) -> CrepantData:
    """Solve the crepant system of the pair, one bunch at a time."""
    config = pair.config
    coefficients: dict[str, Fraction] = {}
    systems = []
    for component in pair.model.components:
        matrix = [
            [Fraction(config.pairing(ej, ek)) for ej in component]
            for ek in component
        ]
        rhs = [
            -(
                Fraction(config.curve(ek).canon_int)
                + sum(
                    (
                        coeff * config.pairing(cid, ek)
                        for cid, coeff in pair.boundary.coefficients.items()
                    ),
                    Fraction(0),
                )
            )
            for ek in component
        ]
        solution = solve_square(matrix, rhs)
        systems.append(
            ComponentSystem(
                component,
                tuple(tuple(row) for row in matrix),
                tuple(rhs),
                tuple(solution),
            )
        )
        coefficients.update(dict(zip(component, solution)))
    return CrepantData(coefficients, tuple(systems))


def total_boundary(pair: Pair, crepant: CrepantData | None = None) -> Divisor:
    """Strict boundary plus crepant exceptional coefficients, upstairs."""
    if crepant is None:
        crepant = crepant_coefficients(pair)
    return pair.boundary + crepant.as_divisor()


def log_canonical_pairing(
    pair: Pair, divisor: Divisor, crepant: CrepantData | None = None
) -> Fraction:
    """(K + boundary) . D computed on the contracted surface.

    The crepant pullback of K + boundary is K + boundary + sum e_j E_j
    upstairs, so the pairing is a plain ambient computation. For divisors
    supported on contracted curves the answer is 0 by construction.
    """
    total = total_boundary(pair, crepant)
    return canonical_pairing(pair.config, divisor) + intersect(
        pair.config, total, divisor
    )


def log_canonical_pairing_curve(
    pair: Pair, curve_id: str, crepant: CrepantData | None = None
) -> Fraction:
    return log_canonical_pairing(
        pair, Divisor({curve_id: Fraction(1)}), crepant
    )


# ---------------------------------------------------------------------------
# classification


CLASS_ORDER = ("terminal", "canonical", "klt", "plt", "dlt", "lc")


@dataclass(frozen=True)
class Classification:
    """Strongest singularity class of a pair plus the individual flags.

    The dlt flag uses a conservative fixed-model criterion (boundary at
    most 1 and every crepant coefficient strictly below 1), which can
    under-report dlt for models contracting curves over regular points of
    the pair; ``dlt_status`` records that. ``numerically_lc`` is computed
    alongside lc and asserted equal.
    """

    strongest: str
    flags: dict[str, bool]
    numerically_lc: bool
    crepant: CrepantData
    dlt_status: str = "conservative"

    def is_at_least_lc(self) -> bool:
        return self.flags["lc"]


def classify_pair(pair: Pair) -> Classification:
    config = pair.config
    crepant = crepant_coefficients(pair)
    boundary = pair.boundary
    total = total_boundary(pair, crepant)
    e_values = list(crepant.coefficients.values())
    delta_values = list(boundary.coefficients.values())

    lc = all(v <= 1 for v in delta_values) and all(v <= 1 for v in e_values)
    numerically_lc = all(v <= 1 for v in total.coefficients.values())
    if numerically_lc != lc:
        raise InvariantViolation(
            "numerically-lc and lc flags disagree on a fixed model"
        )
    klt = all(v < 1 for v in delta_values) and all(v < 1 for v in e_values)
    dlt = all(v <= 1 for v in delta_values) and all(v < 1 for v in e_values)

    def node_coefficient_pairs():
        for point in config.points:
            a, b = point.curves
            yield total.coefficient(a), total.coefficient(b)

    plt = (
        lc
        and all(v < 1 for v in e_values)
        and not any(ca == 1 and cb == 1 for ca, cb in node_coefficient_pairs())
    )
    canonical = (
        all(v <= 0 for v in e_values)
        and all(v <= 1 for v in delta_values)
        and all(ca + cb <= 1 for ca, cb in node_coefficient_pairs())
    )
    boundary_support = boundary.support()
    terminal = (
        all(v < 0 for v in e_values)
        and all(v < 1 for v in delta_values)
        and not any(
            config.pairing(c, e) > 0
            for c in boundary_support
            for e in pair.model.contracted
        )
        and all(
            boundary.coefficient(p.curves[0]) + boundary.coefficient(p.curves[1]) < 1
            for p in config.points
            if p.curves[0] in boundary_support and p.curves[1] in boundary_support
        )
    )

    flags = {
        "terminal": terminal,
        "canonical": canonical,
        "klt": klt,
        "plt": plt,
        "dlt": dlt,
        "lc": lc,
    }
    strongest = next((name for name in CLASS_ORDER if flags[name]), "none")
    return Classification(strongest, flags, numerically_lc, crepant)


# ---------------------------------------------------------------------------
# multiplier divisor


def multiplier_divisor(pair: Pair, crepant: CrepantData | None = None) -> Divisor:
    """Round-up of minus the total boundary, the divisor cutting out the
    multiplier ideal upstairs. All coefficients are nonnegative exactly
    when the pair is klt."""
    total = total_boundary(pair, crepant)
    return total.scale(-1).ceil()


# ---------------------------------------------------------------------------
# negativity lemma


@dataclass(frozen=True)
class NegativityVerdict:
    verdict: str  # "effective-forced" | "not-applicable" | "contradiction"
    detail: str
    component_placement: dict[tuple[str, ...], str]


def negativity_check(
    model: Model, divisor: Divisor, base: Model | None = None
) -> NegativityVerdict:
    """Check a divisor against the negativity lemma for a contraction.

    With ``base`` omitted the contraction is ambient model -> model. A
    base model (same configuration, smaller contracted set) checks the
    induced contraction between the two models instead; intersections are
    then computed on the base model via pullback.

    Applicability: minus the divisor pairs nonnegatively with every
    exceptional curve, and the push-forward (coefficients away from the
    exceptional locus) is effective. When applicable the lemma forces the
    divisor itself to be effective and each exceptional bunch to lie
    entirely inside or entirely outside its support; ``contradiction``
    reports a violation of that conclusion and means a bug or an invalid
    model.
    """
    config = model.config
    if base is None:
        base = Model(config, frozenset())
    if not base.contracted <= model.contracted:
        raise InputError("base model must contract a subset of the model")
    exceptional = model.contracted - base.contracted

    def pairing(d: Divisor, curve_id: str) -> Fraction:
        return intersect(
            config, numerical_pullback(base, d), Divisor({curve_id: Fraction(1)})
        )

    for cid in divisor.support():
        if cid in base.contracted:
            raise InputError(
                f"divisor touches curve {cid} contracted on the base model"
            )

    not_nef = [ek for ek in sorted(exceptional) if pairing(divisor, ek) > 0]
    if not_nef:
        return NegativityVerdict(
            "not-applicable",
            f"-B fails relative nefness against {', '.join(not_nef)}",
            {},
        )
    push = divisor.drop(exceptional)
    if not push.is_effective():
        return NegativityVerdict(
            "not-applicable", "push-forward of B is not effective", {}
        )

    if not divisor.is_effective():
        return NegativityVerdict(
            "contradiction",
            "push-forward effective and -B relatively nef, yet B has a "
            "negative coefficient",
            {},
        )

    placement: dict[tuple[str, ...], str] = {}
    support = divisor.support()
    # adjacency on the base model: bunches joined through base-contracted
    # points count as connected
    ordered = sorted(exceptional, key=config.index)
    seen: set[str] = set()
    components = []
    for start in ordered:
        if start in seen:
            continue
        stack, bunch = [start], []
        seen.add(start)
        while stack:
            cur = stack.pop()
            bunch.append(cur)
            for other in ordered:
                if other not in seen and pairing(
                    Divisor({cur: Fraction(1)}), other
                ) > 0:
                    seen.add(other)
                    stack.append(other)
        components.append(tuple(sorted(bunch, key=config.index)))
    for component in components:
        inside = [c for c in component if c in support]
        touched = bool(inside) or any(
            pairing(Divisor({c: Fraction(1)}), ek) > 0
            for c in support - set(component)
            for ek in component
        )
        if not touched:
            placement[component] = "disjoint"
        elif len(inside) == len(component):
            placement[component] = "inside"
        else:
            return NegativityVerdict(
                "contradiction",
                f"component {component} meets Supp B but is not contained in it",
                {},
            )
    return NegativityVerdict("effective-forced", "B is effective", placement)

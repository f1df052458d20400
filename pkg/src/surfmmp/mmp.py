"""Extremal contractions, the MMP loop and dlt blowups.

A contraction is bookkeeping: the chosen curve joins the contracted set
and the boundary drops its coefficient. Every step re-derives the facts
the contraction theorem promises (the Picard rank drops by exactly one,
classes orthogonal to the contracted curve descend, exactly one curve is
contracted) instead of trusting the construction, and the loop stops at
either a minimal model or a Mori fibre space, which is verified too.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cone import (
    ExtremalRay,
    Fibration,
    curve_classes,
    negative_extremal_rays,
    validate_fibration,
)
from .errors import ContractionRefused, InputError, InvariantViolation
from .lattice import HORIZONTAL, Divisor, intersect
from .pullback import (
    Model,
    Pair,
    classify_pair,
    crepant_coefficients,
    log_canonical_pairing_curve,
    model_self_intersection,
    negativity_check,
    numerical_pullback,
)

QF = "QF"
LC = "LC"


@dataclass(frozen=True)
class MMPStep:
    curve: str
    rho_before: int
    rho_after: int
    pairing: Fraction
    self_intersection: Fraction
    certificate: ExtremalRay

    def __post_init__(self) -> None:
        if self.rho_after != self.rho_before - 1:
            raise InvariantViolation(
                f"contracting {self.curve} changed the Picard rank from "
                f"{self.rho_before} to {self.rho_after}, not by one"
            )


@dataclass(frozen=True)
class MoriFibreSpace:
    witness: str
    pairing: Fraction
    self_intersection: Fraction
    rho_final: int
    rho_base: int


@dataclass(frozen=True)
class MMPTrace:
    steps: tuple[MMPStep, ...]
    endpoint: str  # "minimal-model" | "mori-fibre-space"
    final_pair: Pair
    mode: str
    rho_sequence: tuple[int, ...]
    mori: MoriFibreSpace | None = None
    nef_values: dict[str, Fraction] | None = None


def _descent_check(pair: Pair, new_pair: Pair, curve: str) -> None:
    # classes orthogonal to the contracted curve must pull back from the
    # new model: for each surviving B, the C-orthogonal combination of B
    # and C has equal pullbacks computed before and after the contraction
    model, new_model = pair.model, new_pair.model
    c_one = Divisor({curve: Fraction(1)})
    c_self = model_self_intersection(model, curve)
    pull_c = numerical_pullback(model, c_one)
    for b in new_model.remaining_curves():
        b_one = Divisor({b: Fraction(1)})
        t = intersect(model.config, numerical_pullback(model, b_one), c_one)
        before = numerical_pullback(model, b_one) - pull_c.scale(t / c_self)
        after = numerical_pullback(new_model, b_one)
        if before != after:
            raise InvariantViolation(
                f"divisor {b} orthogonalised against {curve} does not descend"
            )


def contract_extremal(
    pair: Pair, fib: Fibration, curve: str
) -> tuple[Pair, MMPStep]:
    """Contract one negative extremal curve and certify the step.

    Refused unless the curve spans a negative extremal ray of the current
    cone and has negative self-intersection on the current model; a
    nonnegative self-intersection means the correct move is declaring a
    Mori fibre space.
    """
    model = pair.model
    if curve in model.contracted:
        raise ContractionRefused(f"curve {curve} is already contracted")
    model.config.index(curve)

    rays = negative_extremal_rays(pair, fib)
    certificate = next((r for r in rays if r.curve == curve), None)
    if certificate is None:
        matching = next(
            (
                r
                for r in rays
                if _same_ray(pair, fib, r, curve)
            ),
            None,
        )
        if matching is None:
            raise ContractionRefused(
                f"curve {curve} does not span a negative extremal ray"
            )
        certificate = matching
    self_int = model_self_intersection(model, curve)
    if self_int >= 0:
        raise ContractionRefused(
            f"curve {curve} has self-intersection {self_int} >= 0 on the "
            "current model; declare a Mori fibre space instead"
        )

    _, rho_before = curve_classes(model, fib)
    new_pair = pair.push_forward_through(curve)
    _, rho_after = curve_classes(new_pair.model, fib)

    if len(new_pair.model.contracted) != len(model.contracted) + 1:
        raise InvariantViolation("a step must contract exactly one curve")
    _descent_check(pair, new_pair, curve)

    step = MMPStep(
        curve=curve,
        rho_before=rho_before,
        rho_after=rho_after,
        pairing=log_canonical_pairing_curve(pair, curve),
        self_intersection=self_int,
        certificate=certificate,
    )
    return new_pair, step


def _same_ray(pair: Pair, fib: Fibration, ray: ExtremalRay, curve: str) -> bool:
    classes, _ = curve_classes(pair.model, fib)
    vec = next((c.vector for c in classes if c.curve == curve), None)
    if vec is None:
        return False
    from .cone import _proportional_positive

    return _proportional_positive(ray.vector, vec)


def _check_mode(pair: Pair, mode: str, stage: str) -> None:
    if mode == LC:
        if not classify_pair(pair).is_at_least_lc():
            if stage == "input":
                raise InputError(
                    "LC mode needs a log canonical input pair"
                )
            raise InvariantViolation(
                f"{stage}: the pair left the log canonical class during an "
                "LC-mode run"
            )
    elif mode == QF:
        bad = [
            c
            for c, v in pair.boundary.coefficients.items()
            if not 0 <= v <= 1
        ]
        if bad:
            message = (
                f"boundary coefficients outside [0, 1] on {', '.join(bad)}"
            )
            if stage == "input":
                raise InputError("QF mode: " + message)
            raise InvariantViolation(f"{stage}: {message}")
        if stage == "input" and pair.model.q_factorial is not True:
            raise InputError(
                "QF mode needs the model's q_factorial declaration"
            )
    else:
        raise InputError(f"unknown MMP mode: {mode!r}")


def run_mmp(
    pair: Pair,
    fib: Fibration,
    mode: str = QF,
    ray_policy: list[str] | None = None,
) -> MMPTrace:
    """Run the MMP loop to a minimal model or Mori fibre space.

    Each round enumerates the negative extremal rays. With none left the
    pair is a minimal model (relative nefness is re-verified). Otherwise
    the first ray by configuration index is chosen, unless ``ray_policy``
    lists preferred curve ids, and a negative witness is contracted while
    a nonnegative one ends the run as a Mori fibre space. Mode LC keeps
    every intermediate pair log canonical; mode QF keeps the boundary in
    [0, 1] and carries the q-factorial declaration.
    """
    validate_fibration(pair.model, fib)
    _check_mode(pair, mode, "input")
    config = pair.config
    steps: list[MMPStep] = []
    _, rho = curve_classes(pair.model, fib)
    rho_sequence = [rho]
    budget = len(config.curves)

    current = pair
    while True:
        if len(steps) > budget:
            raise InvariantViolation(
                "MMP exceeded the curve count; contraction bookkeeping broke"
            )
        rays = negative_extremal_rays(current, fib)
        if not rays:
            nef_values = {
                c: log_canonical_pairing_curve(current, c)
                for c in current.model.remaining_curves()
                if config.curve(c).vertical_over != HORIZONTAL
            }
            negative = {c: v for c, v in nef_values.items() if v < 0}
            if negative:
                raise InvariantViolation(
                    f"no negative extremal ray, yet pairings {negative} are "
                    "negative"
                )
            return MMPTrace(
                steps=tuple(steps),
                endpoint="minimal-model",
                final_pair=current,
                mode=mode,
                rho_sequence=tuple(rho_sequence),
                nef_values=nef_values,
            )
        chosen = _choose_ray(config, rays, ray_policy)
        self_int = model_self_intersection(current.model, chosen.curve)
        if self_int >= 0:
            _, rho_final = curve_classes(current.model, fib)
            if self_int > 0 and rho_final != 1:
                raise InvariantViolation(
                    f"witness {chosen.curve} has positive self-intersection "
                    f"but the rank is {rho_final}, not 1"
                )
            mori = MoriFibreSpace(
                witness=chosen.curve,
                pairing=chosen.pairing,
                self_intersection=self_int,
                rho_final=rho_final,
                rho_base=rho_final - 1,
            )
            return MMPTrace(
                steps=tuple(steps),
                endpoint="mori-fibre-space",
                final_pair=current,
                mode=mode,
                rho_sequence=tuple(rho_sequence),
                mori=mori,
            )
        current, step = contract_extremal(current, fib, chosen.curve)
        steps.append(step)
        rho_sequence.append(step.rho_after)
        _check_mode(current, mode, f"after contracting {step.curve}")


def _choose_ray(config, rays: list[ExtremalRay], policy: list[str] | None):
    if policy:
        available = {r.curve: r for r in rays}
        for wanted in policy:
            if wanted in available:
                return available[wanted]
    return min(rays, key=lambda r: config.index(r.curve))


# ---------------------------------------------------------------------------
# dlt blowup


@dataclass(frozen=True)
class DltBlowup:
    """Result of a dlt blowup: the crepant-nef model over the input pair.

    ``pair`` is the end model with boundary (truncated strict boundary
    plus surviving reduced exceptionals), ``correction`` the effective
    divisor restoring relative numerical triviality against the full
    boundary, and ``certificates`` records the independently re-checked
    facts, including whether the input was numerically log canonical.
    """

    pair: Pair
    correction: Divisor
    trace: MMPTrace
    certificates: dict


def dlt_blowup(pair: Pair) -> DltBlowup:
    """Build the dlt blowup of a pair presented on its snc ambient model.

    The ambient model doubles as the log resolution: run the MMP of
    (truncated boundary + reduced exceptional locus) relative to the pair,
    then certify the outcome with the independent classifiers: the end
    pair is q-factorial dlt by the conservative criterion, its log
    canonical class is relatively nef, and the effective correction
    vanishes exactly when the input pair is numerically log canonical.
    """
    config = pair.config
    contracted = pair.model.contracted
    truncated = pair.boundary.truncate_at_one()
    reduced_exceptional = Divisor({c: Fraction(1) for c in contracted})

    base_points = {}
    assignments = {}
    for k, component in enumerate(pair.model.components):
        name = f"pt{k}"
        while any(c.vertical_over == name for c in config.curves):
            name += "_"
        base_points[component] = name
        for cid in component:
            assignments[cid] = name

    relabelled = _with_verticals(config, assignments)
    resolution = Model(relabelled, frozenset(), q_factorial=True)
    working = Pair(resolution, truncated + reduced_exceptional)
    fib = Fibration(
        target_dim=2,
        base_points=tuple(base_points.values()),
        fiber_classes={},
    )

    trace = run_mmp(working, fib, mode=QF)
    if trace.endpoint != "minimal-model":
        raise InvariantViolation(
            "the relative MMP of a dlt blowup must end on a minimal model"
        )

    final = trace.final_pair
    survivors = tuple(
        c for c in sorted(contracted, key=config.index)
        if c not in final.model.contracted
    )

    crepant = crepant_coefficients(pair)
    correction = Divisor(
        {c: crepant.e(c) - 1 for c in survivors if crepant.e(c) != 1}
    )

    # certificate (1): q-factorial dlt end pair
    classification = classify_pair(final)
    if not classification.flags["dlt"]:
        raise InvariantViolation(
            "dlt blowup produced a pair the conservative dlt criterion rejects"
        )

    # certificate (2): relative nefness of the truncated log canonical class
    nef_values = {
        c: log_canonical_pairing_curve(final, c) for c in survivors
    }
    if any(v < 0 for v in nef_values.values()):
        raise InvariantViolation(
            f"log canonical class of the dlt blowup is not relatively nef: "
            f"{nef_values}"
        )

    # certificate (3): the correction restores numerical triviality against
    # the full boundary and passes the negativity lemma
    full = Pair(final.model, pair.boundary + Divisor({c: Fraction(1) for c in survivors}))
    residuals = {
        c: log_canonical_pairing_curve(full, c)
        + _pairing_on_model(final.model, correction, c)
        for c in survivors
    }
    if any(v != 0 for v in residuals.values()):
        raise InvariantViolation(
            f"correction fails numerical triviality: residuals {residuals}"
        )
    if not correction.is_effective():
        raise InvariantViolation("correction divisor is not effective")
    if survivors:
        verdict = negativity_check(
            Model(relabelled, contracted, q_factorial=pair.model.q_factorial),
            correction,
            base=final.model,
        )
        if verdict.verdict == "contradiction":
            raise InvariantViolation(
                f"negativity lemma rejects the correction: {verdict.detail}"
            )

    input_nlc = correction.is_zero() and truncated == pair.boundary
    classifier_lc = classify_pair(pair).is_at_least_lc()
    if input_nlc != classifier_lc:
        raise InvariantViolation(
            "correction-based and classifier-based log canonicity disagree"
        )

    certificates = {
        "classification": classification,
        "nef_values": nef_values,
        "correction_residuals": residuals,
        "correction_effective": correction.is_effective(),
        "input_numerically_lc": input_nlc,
    }
    # hand back the end pair on the caller's configuration, with the
    # caller's vertical assignments intact
    result_pair = Pair(
        Model(config, final.model.contracted, q_factorial=True),
        final.boundary,
    )
    return DltBlowup(result_pair, correction, trace, certificates)


def _with_verticals(config, assignments: dict[str, str]):
    from .lattice import Configuration, Curve

    curves = tuple(
        Curve(
            c.id,
            c.self_int,
            c.canon_int,
            assignments.get(c.id, HORIZONTAL),
        )
        for c in config.curves
    )
    return Configuration(
        curves=curves,
        matrix=config.matrix,
        points=config.points,
        chi_structure=config.chi_structure,
        canon_self_int=config.canon_self_int,
    )


def _pairing_on_model(model: Model, divisor: Divisor, curve: str) -> Fraction:
    return intersect(
        model.config,
        numerical_pullback(model, divisor),
        Divisor({curve: Fraction(1)}),
    )

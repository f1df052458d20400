"""Shared fixtures and random model builders for the test suite.

The builders produce structurally valid configurations by construction
(parity, incidence sums and symmetry hold automatically) and use seeded
``random.Random`` instances so every run sees the same family.
"""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from surfmmp import (
    HORIZONTAL,
    Configuration,
    Curve,
    Divisor,
    Fibration,
    IncidencePoint,
    Model,
    Pair,
    blowup_at_node,
    is_negative_definite,
)


def build_config(
    curve_specs,
    edges,
    chi_structure=None,
    canon_self_int=None,
):
    """Assemble a configuration from curve specs and weighted edges.

    ``curve_specs``: (id, self_int, canon_int[, vertical_over]) tuples.
    ``edges``: (id_a, id_b, residue_degree) tuples, one incidence point
    each; repeat a pair for several points. The matrix is derived, so the
    incidence-sum invariant holds by construction.
    """
    curves = []
    for spec in curve_specs:
        cid, self_int, canon_int = spec[:3]
        vertical = spec[3] if len(spec) > 3 else None
        curves.append(Curve(cid, self_int, canon_int, vertical))
    index = {c.id: i for i, c in enumerate(curves)}
    n = len(curves)
    matrix = [[0] * n for _ in range(n)]
    for i, c in enumerate(curves):
        matrix[i][i] = c.self_int
    points = []
    for k, (a, b, degree) in enumerate(edges):
        matrix[index[a]][index[b]] += degree
        matrix[index[b]][index[a]] += degree
        points.append(IncidencePoint(f"p{k}_{a}_{b}", (a, b), degree))
    return Configuration(
        curves=tuple(curves),
        matrix=tuple(tuple(row) for row in matrix),
        points=tuple(points),
        chi_structure=chi_structure,
        canon_self_int=canon_self_int,
    )


@pytest.fixture
def a2_config():
    return build_config(
        [("E1", -2, 0), ("E2", -2, 0)],
        [("E1", "E2", 1)],
        chi_structure=1,
    )


@pytest.fixture
def a2_pair(a2_config):
    return Pair(Model(a2_config, frozenset({"E1", "E2"})), Divisor.zero())


def cusp_pair():
    config = build_config([("C", -2, 2)], [], chi_structure=1)
    return Pair(Model(config, frozenset({"C"})), Divisor.zero())


def non_lc_pair():
    config = build_config([("C", -1, 3)], [], chi_structure=1)
    return Pair(Model(config, frozenset({"C"})), Divisor.zero())


def fiber_pair_with_section():
    """Ruled-surface slice: section H, one fibre split into A + B."""
    config = build_config(
        [
            ("H", -1, -1, HORIZONTAL),
            ("A", -1, -1, "s0"),
            ("B", -1, -1, "s0"),
        ],
        [("H", "A", 1), ("A", "B", 1)],
        chi_structure=1,
    )
    model = Model(config, frozenset(), q_factorial=True)
    fib = Fibration(
        target_dim=1,
        base_points=("s0",),
        fiber_classes={"s0": Divisor.of(A=1, B=1)},
    )
    return Pair(model, Divisor.zero()), fib


# ---------------------------------------------------------------------------
# random families


def chain_weights(rng: random.Random, n: int) -> list[int]:
    return [rng.randint(-5, -2) for _ in range(n)]


def random_negative_definite_config(
    rng: random.Random,
    max_curves: int = 8,
    allow_cycles: bool = True,
    extra_boundary: int = 0,
):
    """Random tree or cycle of curves with a negative definite bunch.

    Curves named X0..X{n-1} form the bunch; B0.. are optional boundary
    curves hung onto it. Self-intersections at most -2, one forced at
    most -3 for cycles; rejection keeps only definite bunches.
    """
    while True:
        n = rng.randint(1, max_curves)
        cycle = allow_cycles and n >= 3 and rng.random() < 0.3
        weights = chain_weights(rng, n)
        if cycle:
            weights[rng.randrange(n)] = rng.randint(-5, -3)
        specs = []
        for i, w in enumerate(weights):
            chi = rng.choice((1, 1, 0))
            specs.append((f"X{i}", w, -w - 2 * chi))
        edges = []
        if cycle:
            for i in range(n):
                edges.append((f"X{i}", f"X{(i + 1) % n}", rng.choice((1, 1, 2))))
        else:
            for i in range(1, n):
                parent = rng.randrange(i)
                edges.append((f"X{parent}", f"X{i}", rng.choice((1, 1, 2))))
        for b in range(extra_boundary):
            target = rng.randrange(n)
            self_int = rng.randint(-4, -1)
            chi = 1
            specs.append((f"B{b}", self_int, -self_int - 2 * chi))
            edges.append((f"B{b}", f"X{target}", rng.choice((1, 2))))
        config = build_config(specs, edges, chi_structure=1)
        bunch = tuple(f"X{i}" for i in range(n))
        if is_negative_definite(config, bunch):
            return config, bunch


def random_boundary(rng: random.Random, config, exclude, choices=None):
    if choices is None:
        choices = [
            Fraction(0),
            Fraction(1, 4),
            Fraction(1, 2),
            Fraction(3, 4),
            Fraction(1),
        ]
    coeffs = {}
    for curve in config.curves:
        if curve.id in exclude:
            continue
        value = rng.choice(choices)
        if value:
            coeffs[curve.id] = value
    return Divisor(coeffs)


def random_fibered_surface(rng: random.Random, max_blowups: int = 4):
    """Fibred surface grown from irreducible fibres by node blowups.

    Starts with one or two irreducible fibres of square zero plus a
    section, then blows up nodes involving a vertical branch, updating
    fibre classes by total transform. Returns (config, fibration).
    """
    n_fibers = rng.choice((1, 1, 2))
    base_points = tuple(f"s{i}" for i in range(n_fibers))
    specs = [("H", -rng.randint(1, 3), None, HORIZONTAL)]
    edges = []
    fiber_coeffs: dict[str, dict[str, int]] = {}
    for i, s in enumerate(base_points):
        fid = f"F{i}"
        chi = rng.choice((1, 0))
        specs.append((fid, 0, 2 * chi * -1, s))
        edges.append(("H", fid, 1))
        fiber_coeffs[s] = {fid: 1}
    # section: rational, K.H from parity
    h_self = specs[0][1]
    specs[0] = ("H", h_self, -h_self - 2, HORIZONTAL)

    config = build_config(specs, edges, chi_structure=1)
    classes = {
        s: Divisor({c: Fraction(v) for c, v in fiber_coeffs[s].items()})
        for s in base_points
    }
    for _ in range(rng.randint(0, max_blowups)):
        candidates = [
            p
            for p in config.points
            if any(
                config.curve(c).vertical_over != HORIZONTAL for c in p.curves
            )
        ]
        if not candidates:
            break
        point = rng.choice(candidates)
        new_id = f"E{len(config.curves)}"
        blown = blowup_at_node(config, point.id, new_id)
        from surfmmp import pullback_through_blowup

        classes = {
            s: pullback_through_blowup(config, point.id, d, new_id)
            for s, d in classes.items()
        }
        config = blown
    fib = Fibration(target_dim=1, base_points=base_points, fiber_classes=classes)
    return config, fib

"""Random-point identity oracle and seeded generators for fields and scalars.

Sample points are small rationals (numerators and denominators bounded by 7)
so exact arithmetic stays fast; a pole at a sample point triggers a resample
rather than a failure.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Sequence

from .calculus import bracket_pairing_sides
from .fields import Chart, DifferentialForm, MultiVectorField
from .report import CheckReport, failed, passed
from .scalars import MultiPoly, PoleError, RationalFn


def random_rational(rng: random.Random, bound: int = 7) -> Fraction:
    num = rng.randint(-bound, bound)
    den = rng.randint(1, bound)
    return Fraction(num, den)


def random_point(rng: random.Random, nvars: int, bound: int = 7) -> tuple[Fraction, ...]:
    return tuple(random_rational(rng, bound) for _ in range(nvars))


def random_point_avoiding_poles(
    rng: random.Random,
    functions: Sequence[RationalFn],
    nvars: int,
    attempts: int = 200,
) -> tuple[Fraction, ...]:
    for _ in range(attempts):
        pt = random_point(rng, nvars)
        try:
            for f in functions:
                f.evaluate(pt)
        except PoleError:
            continue
        return pt
    raise PoleError("could not sample a common non-pole point")


def random_poly(
    rng: random.Random,
    nvars: int,
    max_degree: int = 2,
    max_terms: int = 4,
    bound: int = 3,
) -> MultiPoly:
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        exps = [0] * nvars
        for _ in range(rng.randint(0, max_degree)):
            exps[rng.randrange(nvars)] += 1
        coeff = Fraction(rng.randint(-bound, bound))
        if coeff:
            terms[tuple(exps)] = terms.get(tuple(exps), Fraction(0)) + coeff
    return MultiPoly(nvars, {e: c for e, c in terms.items() if c})


def random_scalar(rng: random.Random, chart: Chart, max_degree: int = 2) -> RationalFn:
    return RationalFn(random_poly(rng, chart.dim, max_degree))


def random_multivector(
    rng: random.Random, chart: Chart, grade: int, max_degree: int = 2, density: float = 0.8
) -> MultiVectorField:
    coeffs = {}
    for idx in itertools.combinations(range(chart.dim), grade):
        if rng.random() < density:
            coeffs[idx] = RationalFn(random_poly(rng, chart.dim, max_degree))
    return MultiVectorField(chart, grade, coeffs)


def random_form(
    rng: random.Random, chart: Chart, grade: int, max_degree: int = 2, density: float = 0.8
) -> DifferentialForm:
    coeffs = {}
    for idx in itertools.combinations(range(chart.dim), grade):
        if rng.random() < density:
            coeffs[idx] = RationalFn(random_poly(rng, chart.dim, max_degree))
    return DifferentialForm(chart, grade, coeffs)


def pairing_oracle(
    P: MultiVectorField,
    Q: MultiVectorField,
    w: DifferentialForm,
    points: Sequence[tuple[Fraction, ...]],
    name: str = "pairing-oracle",
) -> CheckReport:
    """Evaluate both sides of the bracket pairing identity at sample points.

    Passes iff the sides agree exactly at every point.  A pole at a point is
    reported for the caller to resample.
    """
    left, right = bracket_pairing_sides(P, Q, w)
    diff = left - right
    bad = []
    for pt in points:
        value = diff.evaluate(pt)
        if value != 0:
            bad.append(pt)
    if not bad:
        return passed(name)
    return failed(
        name,
        f"pairing sides differ at {len(bad)} of {len(points)} points",
        tuple(bad),
    )


def run_pairing_oracle(
    P: MultiVectorField,
    Q: MultiVectorField,
    samples: int,
    rng: random.Random,
    test_forms: int = 3,
    name: str = "pairing-oracle",
) -> list[CheckReport]:
    """Pairing oracle against freshly sampled test forms and points."""
    chart = P.chart
    w_grade = P.grade + Q.grade - 1
    if w_grade < 0 or w_grade > chart.dim:
        return [passed(f"{name}-degenerate-grades")]
    reports = []
    all_coeffs = list(P.coeffs.values()) + list(Q.coeffs.values())
    for k in range(test_forms):
        w = random_form(rng, chart, w_grade)
        pts = []
        for _ in range(samples):
            pts.append(
                random_point_avoiding_poles(
                    rng, all_coeffs + list(w.coeffs.values()), chart.dim
                )
            )
        reports.append(pairing_oracle(P, Q, w, pts, f"{name}-form-{k}"))
    return reports

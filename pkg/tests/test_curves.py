import random

import pytest

from curveavg.curves import (AffineTransform, Curve, CurveError, Shear,
                             TransformError, apply_transform, curve_to_text,
                             eval_curve, moment_curve, parse_curve, project,
                             reduce_canonical, total_degree)
from curveavg.polynomials import parse_poly


def test_moment_curve_evaluation():
    assert eval_curve(moment_curve(3), 2) == (2, 4, 8)


def test_negative_argument():
    assert eval_curve(parse_curve("n,n^2"), -1) == (-1, 1)


def test_eval_matches_independent_componentwise_oracle(rng):
    c = parse_curve("n,2n^3-n+5")
    for _ in range(50):
        n = rng.randint(-40, 40)
        expected = tuple(sum(cf * n ** i for i, cf in enumerate(p.coeffs))
                         for p in c.components)
        assert c(n) == expected


def test_total_degree_examples():
    assert total_degree(moment_curve(3)) == 6
    assert total_degree(parse_curve("n^2")) == 2
    assert total_degree(parse_curve("n,n^3+2")) == 4


def test_degree_separation_enforced():
    with pytest.raises(CurveError):
        parse_curve("n,2n")
    with pytest.raises(CurveError):
        parse_curve("n^2,n")
    with pytest.raises(CurveError):
        parse_curve("n,3")  # constant component
    c = Curve.unchecked((parse_poly("n"), parse_poly("2n")))
    assert not c.degrees_separated
    with pytest.raises(CurveError):
        c.require_separated()


def test_curve_text_roundtrip():
    for text in ("n,n^2,n^3", "n^2", "n,2n^3-n"):
        assert curve_to_text(parse_curve(text)) == text


def test_dilation_scales_coefficients():
    c = apply_transform(parse_curve("n^2"), AffineTransform.dilation(2))
    assert curve_to_text(c) == "2n^2"


def test_shear_subtracts_components():
    c = apply_transform(parse_curve("n,n^2+n"), AffineTransform.shear(2, 1, 1))
    assert curve_to_text(c) == "n,n^2"


def test_composed_transform_matches_sequential(rng):
    c = parse_curve("n,n^2,n^3")
    t1 = AffineTransform.dilation(2, -1, 3)
    t2 = AffineTransform.shear(3, 1, 2)
    t3 = AffineTransform.translation(1, -4, 0)
    combined = apply_transform(c, t1.then(t2).then(t3))
    stepwise = apply_transform(apply_transform(apply_transform(c, t1), t2), t3)
    assert combined.components == stepwise.components


def test_transform_point_equivariance(rng):
    c = parse_curve("n,n^3")
    for _ in range(40):
        steps = AffineTransform.dilation(rng.choice([1, 2, -3]), rng.choice([1, -1]))
        steps = steps.then(AffineTransform.shear(2, 1, rng.randint(-3, 3)))
        steps = steps.then(AffineTransform.translation(rng.randint(-5, 5), 0))
        tc = apply_transform(c, steps)
        n = rng.randint(-10, 10)
        assert tc(n) == steps.apply_point(c(n))


def test_transform_constant_component_error():
    with pytest.raises(TransformError):
        apply_transform(Curve.unchecked((parse_poly("n"), parse_poly("2n"))),
                        AffineTransform.shear(2, 1, 2))


def test_shear_can_break_separation_but_is_flagged():
    c = apply_transform(parse_curve("n,n^2"), AffineTransform.shear(1, 2, 1))
    assert not c.degrees_separated


def test_projection():
    g = moment_curve(3)
    assert curve_to_text(project(g, {1, 2})) == "n,n^2"
    assert project(g, {1, 2, 3}).components == g.components
    assert curve_to_text(project(parse_curve("n,n^3"), {2})) == "n^3"
    with pytest.raises(CurveError):
        project(g, set())


def test_reduce_canonical_shears_out_linear_part():
    res = reduce_canonical(parse_curve("n,n^2+n"))
    assert curve_to_text(res.curve) == "n,n^2"
    assert res.transform.steps == (Shear(2, 1, 1),)
    assert res.diagnostics == ()
    # replaying the transform on the original reproduces the reduced curve
    replay = apply_transform(parse_curve("n,n^2+n"), res.transform)
    assert replay.components == res.curve.components


def test_reduce_canonical_no_op():
    res = reduce_canonical(parse_curve("n^2"))
    assert res.curve.components == parse_curve("n^2").components
    assert res.transform.steps == ()


def test_reduce_canonical_degenerate_input():
    c = Curve.unchecked((parse_poly("n"), parse_poly("2n")))
    res = reduce_canonical(c)
    assert res.curve.components == c.components
    assert res.transform.steps == ()
    assert any("constant component" in d for d in res.diagnostics)


def test_inverse_of_lattice_bijection(rng):
    t = AffineTransform.shear(2, 1, 3).then(AffineTransform.translation(4, -1))
    inv = t.inverse()
    for _ in range(20):
        x = (rng.randint(-9, 9), rng.randint(-9, 9))
        assert inv.apply_point(t.apply_point(x)) == x
    with pytest.raises(TransformError):
        AffineTransform.dilation(2, 1).inverse()

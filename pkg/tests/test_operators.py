from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from scipy.integrate import quad
from scipy.optimize import brentq

from stribola import (
    ClassError,
    DegenerateInputError,
    DomainError,
    GridFunction,
    area,
    area_T,
    canonical_knots,
    classify,
    constant_one,
    d_inf,
    evaluate,
    from_callable,
    iterate_T,
    op_D,
    op_I,
    op_T,
    pseudo_inverse,
    resample,
    richardson,
    stride,
    zero_onset,
)
from stribola.fixtures import convex_fixtures
from stribola.monotone_fn import DEFAULT_TOL

from .conftest import e_functions, sampled, strict_functions

N = 4096


def h3_closed(x):
    return 1 - 3 * x + 2 * x**1.5


def plus_part_oracle(f, y):
    """(Tf)(y) from the layer-cake form: int (f - y)^+ dx / area f, by adaptive quadrature."""
    num, _ = quad(lambda x: max(float(evaluate(f, x)) - y, 0.0), 0, 1, points=f.knots[1:-1], limit=200)
    return num / area(f)


# -- op_I ------------------------------------------------------------------

def test_op_I_examples(h1):
    np.testing.assert_array_equal(op_I(constant_one()).values, [1.0, 0.0])
    assert np.abs(op_I(h1).values - (1 - h1.knots) ** 2).max() <= N**-2


def test_op_I_of_h2_inverse_is_h3():
    inv = sampled(lambda y: 1 - np.sqrt(y))
    got = op_I(inv)
    assert np.abs(got.values - h3_closed(got.knots)).max() <= 1e-6


def test_op_I_rejects_zero_area():
    with pytest.raises(DegenerateInputError):
        op_I(GridFunction([0, 1], [0, 0]))


@given(e_functions())
def test_op_I_output_is_convex_and_in_C(g):
    c = classify(op_I(g))
    assert c.in_C and c.is_convex


# -- op_D ------------------------------------------------------------------

def test_op_D_of_h2(h2):
    assert d_inf(op_D(h2), GridFunction(h2.knots, 1 - h2.knots)) <= 1 / N


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0])
def test_D_inverts_I(p):
    g = sampled(lambda x: np.clip(1 - x, 0, 1) ** p * 0.5 + 0.5 * (1 - x))
    assert d_inf(op_D(op_I(g)), g) <= 1 / N


def test_area_of_D_is_stride():
    for name, f in convex_fixtures(N).items():
        assert abs(area(op_D(f)) - stride(f)) <= 1 / N, name


def test_op_D_errors(one):
    with pytest.raises(ClassError):
        op_D(sampled(lambda x: 1 - x**2, 64))
    with pytest.raises(DegenerateInputError):
        op_D(one)


# -- op_T ------------------------------------------------------------------

def test_op_T_of_h1_is_node_exact(h1):
    t = op_T(h1)
    np.testing.assert_allclose(t.values, (1 - t.knots) ** 2, rtol=0, atol=1e-15)


def test_op_T_of_h2_is_h3(h2):
    t = resample(op_T(h2), canonical_knots(N))
    assert np.abs(t.values - h3_closed(t.knots)).max() <= N**-2


def test_op_T_knots_are_ordinates(h2):
    t = op_T(h2)
    np.testing.assert_array_equal(t.knots, np.unique(h2.values))


@given(e_functions())
def test_op_T_matches_layer_cake_oracle(f):
    t = op_T(f)
    # T f is quadratic between the image knots, so compare node values
    ys = t.knots[np.unique(np.linspace(0, t.knots.size - 1, 9).round().astype(int))]
    got = evaluate(t, ys)
    want = [plus_part_oracle(f, y) for y in ys]
    np.testing.assert_allclose(got, want, atol=1e-9)


@given(e_functions())
def test_op_T_output_is_convex_and_in_C(f):
    c = classify(op_T(f))
    assert c.in_C and c.is_convex


def test_op_T_envelope_on_convex_fixtures():
    for name, g in convex_fixtures(1024).items():
        t = op_T(g)
        a = area(g)
        assert np.all(t.values >= 1 - t.knots / a - 1e-12), name
        assert np.all(t.values <= 1 - t.knots + 1e-12), name
        assert classify(t).in_D, name


def test_op_T_rejects_non_E():
    with pytest.raises(ClassError):
        op_T(GridFunction([0, 1], [0.5, 0.0]))


@given(strict_functions())
def test_area_T_matches_area_of_exact_T(g):
    # area(T g) = int_0^1 x g*(x) dx / area g, by quadrature of the inverse
    inv = pseudo_inverse(g)
    num, _ = quad(lambda y: y * float(evaluate(inv, y)), 0, 1, points=inv.knots[1:-1], limit=200)
    assert area_T(g) == pytest.approx(num / area(g), abs=1e-10)


def test_zero_onset():
    g = GridFunction([0, 0.5, 0.75, 1], [1, 0.5, 0, 0])
    assert zero_onset(g) == 0.75
    assert zero_onset(sampled(lambda x: 1 - x, 64)) == 1.0
    # a value inside the band is refined to the segment's zero crossing
    assert zero_onset(GridFunction([0, 0.5, 1], [1, 1e-12, 0])) == pytest.approx(0.5, abs=1e-11)


# -- iteration -------------------------------------------------------------

@pytest.fixture(scope="module")
def canonical_run():
    keep = []
    f, trace = iterate_T(constant_one(), 4, DEFAULT_TOL.with_(n_grid=N), keep=keep)
    return f, trace, keep


def kappa4_by_quadrature():
    """kappa_4 = int_0^1 y h3*(y) dy / kappa_3 with h3* by root finding."""
    def inv(y):
        if y >= 1:
            return 0.0
        return brentq(lambda x: h3_closed(x) - y, 0.0, 1.0, xtol=1e-15)

    num, _ = quad(lambda y: y * inv(y), 0, 1, limit=200, epsabs=1e-13)
    return num / 0.3


def test_kappa_oracles():
    h3sq, _ = quad(lambda x: h3_closed(x) ** 2, 0, 1, epsabs=1e-14)
    assert h3sq == pytest.approx(6 / 35, abs=1e-10)
    assert h3sq / (2 * 0.3) == pytest.approx(2 / 7, abs=1e-10)
    assert kappa4_by_quadrature() == pytest.approx(2 / 7, abs=1e-9)


def test_iterate_kappas(canonical_run):
    _, trace, _ = canonical_run
    want = [Fraction(1), Fraction(1, 2), Fraction(1, 3), Fraction(3, 10), Fraction(2, 7)]
    np.testing.assert_allclose(trace.kappa, [float(w) for w in want], atol=1e-6)
    assert trace.n == [0, 1, 2, 3, 4]
    assert np.isnan(trace.step_dinf[0])
    assert all(np.diff(trace.kappa) <= 1e-9)


def test_iterate_closed_forms(canonical_run):
    _, _, keep = canonical_run
    x = keep[3].knots
    assert np.abs(keep[2].values - (1 - x) ** 2).max() <= 1e-6
    assert np.abs(keep[3].values - h3_closed(x)).max() <= 1e-6


def test_stride_of_T_h1(h1):
    f, _ = iterate_T(h1, 1, DEFAULT_TOL.with_(n_grid=N))
    assert stride(f) == pytest.approx(0.5, abs=1e-3)


def test_iterate_zero_steps_returns_seed(h2):
    f, trace = iterate_T(h2, 0)
    assert f is h2 and len(trace) == 1


@pytest.mark.parametrize("n", [-1, DEFAULT_TOL.max_iter + 1])
def test_iterate_count_bounds(n):
    with pytest.raises(DomainError):
        iterate_T(constant_one(), n)


def test_trace_csv(canonical_run, tmp_path):
    _, trace, _ = canonical_run
    text = trace.to_csv(tmp_path / "trace.csv")
    lines = text.splitlines()
    assert lines[0] == "n,kappa,stride,step_dinf"
    assert len(lines) == 6
    assert lines[1].startswith("0,1,1,nan")
    assert (tmp_path / "trace.csv").read_text() == text


# -- Richardson ------------------------------------------------------------

def test_richardson_identity():
    assert richardson(0.3, 0.3) == pytest.approx(0.3, abs=1e-16)
    with pytest.raises(DomainError):
        richardson(float("nan"), 1.0)


def kappa2(n):
    _, trace = iterate_T(constant_one(), 2, DEFAULT_TOL.with_(n_grid=n))
    return trace.kappa[2]


def test_richardson_on_kappa2():
    assert abs(richardson(kappa2(2048), kappa2(4096)) - 1 / 3) <= 1e-9


def test_h3_closed_form_sampled_area():
    assert area(from_callable(h3_closed, N)) == pytest.approx(0.3, abs=1e-6)

import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from hsx import characteristics as ch
from hsx.initial_data import (ATOM, DataError, EquationForm, VelocityProfile, build, constant, example_compact,
                              example_dirac, example_kink, example_sine_tail, load, load_json, parse_example,
                              save, save_json, sine_tail_mass)
from hsx.measure import cdf, total_mass

from oracles import brute_xbar, data


def test_dirac_example_matches_constant_plus_atom():
    d = example_dirac(1.0, 4.0, 0.0)
    assert d.u.left_value == d.u.right_value == 1.0
    assert d.mass == 4.0
    assert d.atoms.tolist() == [[0.0, 4.0]]
    assert ch.xbar(d, 2.0) == 0.0
    assert ch.weight(d, 2.0) == 1.0
    assert ch.xbar(d, -3.0) == -3.0
    assert ch.xbar(d, 6.0) == 2.0


def test_dirac_rejects_nonpositive_mass():
    with pytest.raises(DataError):
        example_dirac(1.0, 0.0, 0.0)


def test_compact_example():
    d = example_compact()
    assert total_mass(d.mu) == 1.0
    assert d.u(-5.0) == 0.0 and d.u(3.0) == -1.0
    assert d.mu.density_values.tolist() == [1.0]
    assert ch.blowup_times(d) == [2.0]


def test_trivial_data():
    d = build([[0.0, 0.0]])
    assert d.mass == 0.0
    assert ch.xbar(d, 1.5) == 1.5
    c = constant(2.5)
    assert c.u(100.0) == 2.5


def test_segments_follow_label_order():
    d = build([[0.0, 0.0], [1.0, 2.0]], [[0.0, 1.0], [1.0, 0.5], [3.0, 2.0]])
    s = d.segments
    assert s.kind.tolist() == [ATOM, 1 - ATOM, ATOM, 1 - ATOM, ATOM]
    assert s.gap[-1] == pytest.approx(d.mass, rel=1e-15)
    assert np.all(np.diff(s.alpha) > 0)
    assert np.all(np.diff(s.xbar) >= 0)


def test_velocity_profile_rejects_unsorted_nodes():
    with pytest.raises(DataError, match="index 2"):
        VelocityProfile([[0, 0], [1, 1], [1, 2]])
    with pytest.raises(DataError):
        VelocityProfile(np.empty((0, 2)))


def test_atoms_rejected_when_malformed():
    with pytest.raises(DataError, match="nonpositive"):
        build([[0, 0]], [[1.0, -1.0]])
    with pytest.raises(DataError, match="duplicate"):
        build([[0, 0]], [[1.0, 1.0], [1.0, 2.0]])


def test_save_dirac_document():
    doc = save(example_dirac(1.0, 4.0, 0.0))
    assert doc["atoms"] == [[0.0, 4.0]]
    assert doc["u_nodes"] == [[0.0, 1.0]]


def test_round_trip(tmp_path):
    d = example_compact()
    assert load(save(d)) == d
    p = tmp_path / "c.json"
    save_json(d, p)
    assert load_json(p) == d
    assert json.loads(p.read_text())["meta"]["name"] == "compact"


def test_load_reports_incompatible_density():
    doc = {"u_nodes": [[0, 0], [1, 1]], "density_values": [2.0]}
    with pytest.raises(DataError, match=r"segment 0: density 2\.0 != slope\^2 1\.0"):
        load(doc)
    doc["density_values"] = [1.0]
    assert load(doc).mass == 1.0


@pytest.mark.parametrize("doc, msg", [
    ([], "JSON object"),
    ({}, "u_nodes"),
    ({"u_nodes": []}, "at least one"),
    ({"u_nodes": [[0, 1, 2]]}, r"u_nodes\[0\]"),
    ({"u_nodes": [[0, 1], [0, 2]]}, "strictly increasing"),
    ({"u_nodes": [[0, 1]], "atoms": [[0, True]]}, r"atoms\[0\]"),
    ({"u_nodes": [[0, 1]], "meta": {"name": 3}}, "meta"),
])
def test_load_schema_errors(doc, msg):
    with pytest.raises(DataError, match=msg):
        load(doc)


def test_load_json_invalid(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(DataError, match="invalid JSON"):
        load_json(p)


def test_build_density_argument_is_checked():
    with pytest.raises(DataError, match="compatibility"):
        build([[0, 0], [1, 1]], density=[1.5])
    with pytest.raises(DataError, match="entries"):
        build([[0, 0], [1, 1]], density=[1.0, 1.0])
    assert build([[0, 0], [1, 1]], density=[1.0 + 1e-13]).mass == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("name, mass", [
    ("compact", 1.0), ("dirac:1,4,0", 4.0), ("kink:3", 3.0), ("const:2", 0.0),
])
def test_parse_example(name, mass):
    assert parse_example(name).mass == mass


@pytest.mark.parametrize("name", ["dirac:1,2", "nope", "dirac:a,b,c", "compact:1"])
def test_parse_example_rejects(name):
    with pytest.raises(DataError):
        parse_example(name)


def test_kink_example():
    d = example_kink(4.0)
    assert d.name == "kink:4"
    assert d.atoms.tolist() == [[0.0, 4.0]]


# -- sine-tail data against quadrature ------------------------------------------

def _sine_u(x, a):
    f = lambda y: math.sin(y) / abs(y) ** a  # noqa: E731
    n = max(4, int(abs(x) / 3))
    edges = np.linspace(0.0, x, n + 1)
    return math.fsum(integrate.quad(f, lo, hi, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
                     for lo, hi in zip(edges[:-1], edges[1:]))


@pytest.mark.parametrize("a", [2 / 3, 1.0])
def test_sine_tail_profile_matches_quadrature(a):
    d = example_sine_tail(a, 40.0, 4)
    assert d.u(0.0) == 0.0
    for x in (0.25, 1.0, 3.0, 17.5, -7.0, -40.0):
        assert d.u(x) == pytest.approx(_sine_u(x, a), abs=1e-10)
    assert d.meta["theta"] == pytest.approx(1 / a - 1)
    assert d.approximate and d.truncation_radius == 40.0


@pytest.mark.parametrize("a, R", [(2 / 3, 50.0), (1.0, 50.0), (0.8, 1e3), (2 / 3, 1e5)])
def test_sine_tail_mass_matches_fourier_quadrature(a, R):
    p = 2 * a
    # sin^2 = (1 - cos 2y)/2; the oscillatory half goes through QAWF
    osc = integrate.quad(lambda y: y ** -p, R, np.inf, weight="cos", wvar=2.0)[0]
    exact = 0.5 * R ** (1 - p) / (p - 1) - 0.5 * osc
    # first neglected term of the asymptotic expansion
    assert sine_tail_mass(R, a) == pytest.approx(exact, abs=p * (p + 1) * R ** (-p - 2))


def test_sine_tail_carries_compensating_atoms():
    d = example_sine_tail(1.0, 20.0, 2)
    m = sine_tail_mass(20.0, 1.0)
    assert d.atoms.tolist() == [[-20.0, m], [20.0, m]]
    bare = example_sine_tail(1.0, 20.0, 2, tail_atoms=False)
    assert len(bare.atoms) == 0
    assert ch.blowup_times(bare) == ch.blowup_times(d)


def test_sine_tail_rejects_parameters():
    with pytest.raises(DataError):
        example_sine_tail(0.5, 10, 2)
    with pytest.raises(DataError):
        example_sine_tail(1.0, 10, 1)


# -- label decomposition invariants ---------------------------------------------

@given(data(), st.floats(-15, 15))
def test_xbar_matches_bisection(d, alpha):
    assert ch.xbar(d, alpha) == pytest.approx(brute_xbar(d, alpha), abs=1e-11)


@given(data(), st.floats(-15, 15))
def test_xbar_sandwich(d, alpha):
    xb = ch.xbar(d, alpha)
    tol = 1e-11 * max(1.0, abs(alpha))
    assert xb + cdf(d.mu, xb) <= alpha + tol
    assert alpha <= xb + cdf(d.mu, xb, closed=True) + tol


@given(data(), st.floats(-15, 15), st.floats(-15, 15))
def test_xbar_is_monotone_and_1_lipschitz(d, a, b):
    lo, hi = min(a, b), max(a, b)
    dx = ch.xbar(d, hi) - ch.xbar(d, lo)
    assert -1e-12 <= dx <= hi - lo + 1e-12


@given(data(), st.floats(-15, 15))
def test_gap_range(d, alpha):
    g = ch.gap(d, alpha)
    assert -1e-12 <= g <= d.mass + 1e-12
    assert g == pytest.approx(alpha - ch.xbar(d, alpha), abs=1e-12)


@given(data())
def test_weight_integrates_to_mass(d):
    s = d.segments
    assert math.fsum(s.weight * np.diff(s.alpha)) == pytest.approx(d.mass, rel=1e-12, abs=1e-12)


@given(data(), st.sampled_from(list(EquationForm)))
def test_json_round_trip_preserves_data(d, form):
    back = load(json.loads(json.dumps(save(d))))
    assert back == d
    assert np.array_equal(back.segments.alpha, d.segments.alpha)

import math
import warnings
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from coneindex.errors import CompletenessError, WeightOnSpectrumError
from coneindex.fredholm import (
    Classification,
    MSIModel,
    admissible_tau_range,
    classify_generic,
    cone_model,
    dual_weight,
    duality_check,
    effective_morse_index,
    football_model,
    fredholm_index,
    simons_validators,
    sweep,
)
from coneindex.spectra import clifford_torus_spectrum, user_spectrum


def count_index(msi, tau):
    """Oracle: anchored value minus every real part between the anchor and tau, signed."""
    lo = max(float(c.indicial.gamma_minus_of_cone) for c in msi.cones)
    anchor = (lo + 1) / 2
    total = -msi.N * msi.Q - sum(effective_morse_index(c) for c in msi.cones)
    for c in msi.cones:
        for v, m in c.indicial.entries:
            if anchor < v < tau:
                total -= m
            elif tau < v < anchor:
                total += m
    return total


@pytest.fixture(scope="module")
def football():
    return football_model()


@pytest.mark.parametrize("tau,index", [
    (-1.5, 10), (-0.75, 2), (-0.25, -2), (0.5, -10), (1.5, -18), (2.5, -42), (-2.5, 18),
])
def test_football_indices(football, tau, index):
    assert fredholm_index(football, tau).index == index


def test_football_anchored_report(football):
    rep = fredholm_index(football, 0.5)
    assert rep.provenance == "anchored"
    assert rep.hat_index == -2
    assert rep.per_cone_I == (1, 1)
    assert rep.tau_interval == (0.0, 1.0)
    assert rep.crossings == ()


def test_football_transport_crossings(football):
    rep = fredholm_index(football, 1.5)
    assert rep.provenance == "transported"
    assert rep.crossings == ((1.0, 8),)


def test_football_range_and_class(football):
    rng = admissible_tau_range(football)
    assert (rng.lo, rng.hi) == (0, 1)
    assert 0.3 in rng and 1 not in rng
    assert classify_generic(football) is Classification.GENERICALLY_EXCLUDED
    assert all(ok for _, ok in simons_validators(football.cones[0]))


@pytest.mark.parametrize("tau", [0.0, 1.0, -0.5, 1 + 1e-10])
def test_weight_on_root_raises(football, tau):
    with pytest.raises(WeightOnSpectrumError):
        fredholm_index(football, tau)


@pytest.mark.parametrize("tau", [-4.5, 3.2])
def test_outside_window_raises(football, tau):
    with pytest.raises(CompletenessError):
        fredholm_index(football, tau)


def test_smooth_model():
    msi = MSIModel(N=4, n=3)
    rep = fredholm_index(msi, 0.5)
    assert (rep.index, rep.hat_index) == (0, 0)
    assert classify_generic(msi) is Classification.SMOOTH
    assert [r["index"] for r in sweep(msi, -2, 2, 8)] == [0] * 9


def test_missing_translation_root_is_rejected():
    # only lambda = -4 and 0: the real part 0 from lambda = -(n-1) is absent
    spec = user_spectrum([(-4, 1), (0, 4)], 3, 4, cutoff=1)
    msi = MSIModel(N=4, n=3, cones=(cone_model(spec),))
    with pytest.raises(ValueError, match="translations"):
        fredholm_index(msi, 0.5)


def test_negative_effective_index_is_invalid():
    spec = user_spectrum([(-2, 2), (0, 4)], 3, 4, cutoff=1)
    msi = MSIModel(N=4, n=3, cones=(cone_model(spec),))
    with pytest.raises(ValueError, match="Simons"):
        classify_generic(msi)


def test_borderline_class():
    spec = user_spectrum([(-3, 5), (0, 1)], 4, 5, cutoff=1)
    msi = MSIModel(N=5, n=4, cones=(cone_model(spec),))
    assert classify_generic(msi) is Classification.BORDERLINE_INDEX_N


def test_mismatched_cone_dimension():
    spec = user_spectrum([(-3, 5)], 4, 5, cutoff=1)
    with pytest.raises(ValueError):
        MSIModel(N=4, n=3, cones=(cone_model(spec),))


def test_dual_weight():
    assert dual_weight(0.5, 3) == -1.5
    assert dual_weight(dual_weight(0.3, 5), 5) == pytest.approx(0.3)


def synthetic_msi(draw_entries, n, N, copies):
    spec = user_spectrum(draw_entries, n, N, cutoff=40)
    cone = cone_model(spec)
    return MSIModel(N=N, n=n, cones=(cone,) * copies)


@st.composite
def models(draw):
    n = draw(st.integers(2, 6))
    N = draw(st.integers(n + 1, n + 3))
    entries = [(-(n - 1), draw(st.integers(N, N + 3)))]
    entries += draw(st.lists(st.tuples(st.integers(-20, 35), st.integers(1, 6)), max_size=6))
    entries = [(v, m) for v, m in entries if v != -(n - 1) or m >= N]
    return synthetic_msi(entries, n, N, draw(st.integers(1, 3)))


@settings(max_examples=150, deadline=None)
@given(models(), st.floats(-6, 6))
def test_duality_and_oracle(msi, tau):
    dual = dual_weight(tau, msi.n)
    try:
        a = fredholm_index(msi, tau)
        b = fredholm_index(msi, dual)
    except (WeightOnSpectrumError, CompletenessError):
        return
    assert a.index == -b.index
    assert a.index == count_index(msi, tau)
    assert duality_check(msi, tau)


def test_sweep_football(football):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rows = sweep(football, -2, 2, 40)
    assert len(rows) == 41
    assert any("indicial real part" in str(w.message) for w in caught)
    values = {}
    for row in rows:
        if row["flag"] == "outside_window":
            continue
        values.setdefault(row["interval_id"], set()).add(row["index"])
    assert all(len(v) == 1 for v in values.values())
    seq = [next(iter(values[k])) for k in sorted(values)]
    assert [a - b for a, b in zip(seq, seq[1:])] == [8, 4, 8, 8]
    assert rows[0]["flag"] == "nudged" and rows[0]["tau"] > -2


def test_sweep_flags_outside_rows(football):
    rows = sweep(football, 2.5, 3.5, 2)
    assert [r["flag"] for r in rows][-1] == "outside_window"
    assert rows[-1]["index"] is None


def test_sweep_single_cone_duality():
    cone = cone_model(clifford_torus_spectrum(10))
    msi = MSIModel(N=4, n=3, cones=(cone,))
    rows = sweep(msi, -2.45, 1.45, 13)
    for row in rows:
        dual = fredholm_index(msi, dual_weight(row["tau"], 3)).index
        assert row["index"] + dual == 0


def test_density(football):
    assert football.cones[0].density == pytest.approx(math.pi / 2, rel=1e-12)
    assert Fraction(football.cones[0].indicial.gamma_minus_of_cone) == 0

import numpy as np
import pytest

import dtil


def test_lattice_spec():
    spec = dtil.LatticeSpec(4, 0.5)
    assert spec.sites == 4**6
    assert spec.period == 2.0
    with pytest.raises(ValueError):
        dtil.LatticeSpec(3, 1.0)


def test_trivial_state():
    s = dtil.FieldState(dtil.LatticeSpec(4))
    assert s.energy().total == 0.0
    assert s.residuals() == (0.0, 0.0)
    assert s.density().shape == (4,) * 6
    assert s.connection.shape == (4,) * 6 + (6, 2, 2)


def test_field_round_trip_through_numpy():
    s = dtil.random_rough_state(dtil.LatticeSpec(4), 0.3, 2)
    t = dtil.FieldState(s.spec)
    t.connection = s.connection
    t.higgs = s.higgs
    np.testing.assert_allclose(t.connection, s.connection, atol=1e-15)
    np.testing.assert_allclose(t.higgs, s.higgs, atol=1e-15)
    # density integrates to 2 L
    assert np.sum(s.density()) * s.spec.spacing**6 == pytest.approx(2 * s.energy().total)


def test_flow_descends():
    s = dtil.random_smooth_state(dtil.LatticeSpec(4), amplitude=1e-2, seed=11)
    out, trace = dtil.minimize(s, {"max_steps": 40})
    assert trace["status"] == "max_steps"
    assert np.all(np.diff(trace["L"]) < 0)
    assert out.energy().total == trace["L"][-1]
    with pytest.raises(ValueError):
        dtil.minimize(s, {"no_such_option": 1})


def test_identities_and_monotonicity():
    r = dtil.identity_sweep(2000, 4)
    assert r["identity_failures"] == 0 and r["inequality_failures"] == 0
    s = dtil.FieldState(dtil.LatticeSpec(4))
    m = dtil.monotonicity(s, [0] * 6, [1.0, 1.5, 2.0])
    assert m["violations"] == 0
    with pytest.raises(ValueError):
        dtil.monotonicity(s, [0] * 6, [1.0, 2.5])


def test_snapshot(tmp_path):
    s = dtil.random_rough_state(dtil.LatticeSpec(4), 0.2, 9)
    p = tmp_path / "s.snap"
    dtil.write_snapshot(str(p), s)
    assert dtil.read_state(str(p)) == s
    assert p.read_bytes() == dtil.snapshot_bytes(s)
    bad = tmp_path / "bad.snap"
    bad.write_bytes(b"XXXX" + p.read_bytes()[4:])
    with pytest.raises(IOError):
        dtil.read_state(str(bad))

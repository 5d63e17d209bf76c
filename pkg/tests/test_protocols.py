import numpy as np
import pytest

from qubitengine.errors import DomainError, InfeasibleProtocolError, ValidityWarning
from qubitengine.open_dynamics import BathSpec, EigenFrameState, evolve_name
from qubitengine.protocols import (STERequest, const_mu_schedule, phi_quadratic_legacy, phi_smoothstep,
                                   ste_polynomial, synthesize_ste, target_c_chi)
from qubitengine.schedule import DEFAULT_STEP, Schedule, schedule_export, schedule_import
from qubitengine.su2 import thermal_state

BATH = BathSpec(10.0, 0.01)


def test_smoothstep_shape():
    phi, phidot = phi_smoothstep(np.pi / 2, 4.0, np.array([0.0, 2.0, 4.0]))
    assert phi == pytest.approx([0.0, np.pi / 4, np.pi / 2])
    assert phidot[0] == 0.0 and phidot[2] == pytest.approx(0.0, abs=1e-15)
    assert phidot[1] == pytest.approx(3 * (np.pi / 2) / (2 * 4.0))


def test_quadratic_legacy():
    a, tau = 0.3, 5.0
    phi, phidot = phi_quadratic_legacy(a, tau, np.array([0.0, tau]))
    assert phi[-1] == pytest.approx(a * tau / 3)
    assert phidot[0] == pytest.approx(a)


def test_const_mu_schedule():
    sch = const_mu_schedule(5.0, 5.0, 0.0, np.pi / 2, 3.0)
    assert np.allclose(sch.mu, -np.pi / (2 * 5.0 * 3.0))
    ramp = const_mu_schedule(8.0, 6.0, 0.0, 0.0, 1.0)
    assert np.all(ramp.mu == 0)
    g = const_mu_schedule(9.0, 20 / 3, 0.3, 0.3 + np.pi / 2, 4.0)
    assert sch.is_constant_mu() and g.is_constant_mu()
    assert g.phi[-1] == pytest.approx(0.3 + np.pi / 2, abs=1e-12)


def test_trivial_ste():
    req = STERequest(9.0, 9.0, 5.0, BATH, Phi=0.0)
    sch = synthesize_ste(req)
    assert np.allclose(sch.Omega, 9.0, rtol=1e-9)


@pytest.mark.parametrize("units", [10, 20, 40])
def test_ste_closure(units):
    tau = units * 2 * np.pi / 8.0
    sch = synthesize_ste(STERequest(12.0, 8.0, tau, BATH))
    c0, c1 = target_c_chi([12.0, 8.0], 10.0)
    poly, _ = ste_polynomial(c0, c1, sch.t / tau)
    et = evolve_name(EigenFrameState(float(c0), 0, 0, float(sch.mu[0]), 12.0), sch, BATH)
    assert np.max(np.abs(et.c_chi - poly)) < 1e-6
    assert np.max(np.abs(et.c_sigma)) < 1e-10
    target = thermal_state(8.0, 10.0).components / 8.0
    assert np.linalg.norm(et.final.u() - target) < 1e-6
    assert np.all(sch.alpha >= sch.Omega)
    flat = sch.phidot == 0
    assert np.allclose(sch.alpha[flat], sch.Omega[flat])


def test_ste_cold_compression():
    sch = synthesize_ste(STERequest(4.0, 6.0, 20 * 2 * np.pi / 4.0, BathSpec(5.0, 0.01), Phi=-np.pi / 2))
    assert sch.Omega[0] == pytest.approx(4.0, rel=1e-9) and sch.Omega[-1] == pytest.approx(6.0, rel=1e-9)


def test_ste_shape_deviates_midstroke():
    tau = 20 * 2 * np.pi / 4.0
    sch = synthesize_ste(STERequest(12.0, 8.0, tau, BATH))
    quasi = 12.0 + (8.0 - 12.0) * (sch.t / tau)
    assert np.max(np.abs(sch.Omega - quasi)) > 0.1
    mid = sch.t.size // 2
    assert abs(sch.Omega[mid] - quasi[mid]) > 0.0


def test_short_heating_stroke_is_infeasible():
    with pytest.raises(InfeasibleProtocolError) as err:
        synthesize_ste(STERequest(12.0, 8.0, 1.0, BATH))
    assert err.value.args


def test_quadratic_profile_warns():
    with pytest.warns(ValidityWarning):
        synthesize_ste(STERequest(12.0, 8.0, 40.0, BATH, profile="quadratic"))


def test_request_validation():
    with pytest.raises(DomainError):
        STERequest(12.0, 8.0, -1.0, BATH)
    with pytest.raises(DomainError):
        STERequest(12.0, 8.0, 1.0, BATH, profile="cubic")


def test_schedule_round_trip(tmp_path):
    sch = Schedule.constant(7.0, 1.0)
    text = schedule_export(sch, tmp_path / "s.csv", {"note": "x"})
    back = schedule_import(tmp_path / "s.csv")
    assert np.array_equal(back.t, sch.t) and np.array_equal(back.Omega, sch.Omega)
    assert np.array_equal(back.phi, sch.phi) and back.kind == sch.kind
    assert "# note=x\n" in text
    assert np.allclose(np.diff(sch.t), DEFAULT_STEP)


def test_ste_export_reimport_reintegrates():
    tau = 20 * 2 * np.pi / 8.0
    sch = synthesize_ste(STERequest(12.0, 8.0, tau, BATH))
    back = schedule_import(schedule_export(sch))
    c0 = float(target_c_chi(12.0, 10.0))
    a = evolve_name(EigenFrameState(c0, 0, 0, float(sch.mu[0]), 12.0), sch, BATH)
    b = evolve_name(EigenFrameState(c0, 0, 0, float(back.mu[0]), 12.0), back, BATH)
    assert np.linalg.norm(a.final.u() - b.final.u()) < 1e-6


def test_schedule_validation():
    with pytest.raises(DomainError):
        Schedule([0.0, 1.0], [1.0, -1.0], 0.0, 0.0)
    with pytest.raises(DomainError):
        Schedule([0.0, 0.0], [1.0, 1.0], 0.0, 0.0)
    with pytest.raises(DomainError):
        Schedule([0.0, 1.0], [1.0, 1.0], 0.0, 0.0, kind="bogus")

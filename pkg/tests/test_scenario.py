import math

import numpy as np
import pytest

from twomode.scenario import (AllConstantScenario, ConstantDrive,
                              ConstantPhaseScenario, CosineDrive,
                              FresnelNormScenario, GeneralPhaseScenario,
                              IsotropicConstantScenario, LinearPhaseScenario,
                              LogRhoScenario, QuadraticPhaseScenario,
                              RhoConstantScenario, RotatingDrive,
                              TabulatedScenario, alpha_rho,
                              check_phase_condition, eta, eval_coeffs)

ALL_CASES = [
    ConstantPhaseScenario(eta0=1.0, phi0=0.3, w11=0.2, w22=0.05),
    LinearPhaseScenario(eta0=1.0, w0=1.0, phi0=0.3, w11=0.15, w22=0.05),
    GeneralPhaseScenario(eta0=0.8, w0=1.2, phi0=0.2, theta0=1.0, nu=0.2),
    AllConstantScenario(w11=0.7, w22=0.3, w12=0.25 + 0.1j),
    IsotropicConstantScenario(alpha=0.6, beta=0.8j),
    RhoConstantScenario(rho0=0.5, eta0=0.8, w0=1.0, theta_alpha0=0.3,
                        theta_beta0=-0.2),
    LogRhoScenario(t0=1.0, eta0=0.9, w0=0.7),
    QuadraticPhaseScenario(eta0=1.0, theta0=0.5),
    FresnelNormScenario(w12_0=1.0, nu=0.4, theta_v0=0.1, theta_u0=-0.2),
]


def test_w21_is_conjugate_everywhere():
    for sc in ALL_CASES:
        for t in (0.0, 0.41, 1.37):
            sample = eval_coeffs(sc, t)
            assert sample.w21 == np.conj(sample.w12)


def test_eta_relation():
    # eta(s) = -i w12(s) e^{i rho(s)} for every case
    for sc in ALL_CASES:
        for t in (0.2, 0.9):
            sample = eval_coeffs(sc, t)
            _, rho = alpha_rho(sc, t)
            want = -1j * sample.w12 * np.exp(1j * rho)
            assert abs(eta(sc, t) - want) < 1e-12


def test_diag_integrals_match_quadrature():
    from scipy.integrate import quad
    for sc in ALL_CASES:
        t_end = 1.3
        alpha, rho = alpha_rho(sc, t_end)
        alpha_q, _ = quad(lambda s: eval_coeffs(sc, s).w11
                          + eval_coeffs(sc, s).w22, 0.0, t_end, limit=200)
        rho_q, _ = quad(lambda s: eval_coeffs(sc, s).w11
                        - eval_coeffs(sc, s).w22, 0.0, t_end, limit=200)
        assert abs(alpha - alpha_q) < 1e-9
        assert abs(rho - rho_q) < 1e-9


def test_all_constant_frozen_integrals():
    sc = AllConstantScenario(w11=0.7, w22=0.3, w12=0.1)
    alpha, rho = alpha_rho(sc, 2.0)
    assert abs(alpha - 2.0) < 1e-12
    assert abs(rho - 0.8) < 1e-12


def test_log_rho_initial_coefficients():
    sc = LogRhoScenario(t0=1.0, eta0=0.9, w0=0.7)
    sample = eval_coeffs(sc, 0.0)
    assert abs(sample.w11 - 0.5) < 1e-12
    assert abs(sample.w22 - 0.5) < 1e-12
    assert abs(abs(sample.w12) - 0.5) < 1e-12
    assert abs(sc.mixing_angle0() - math.pi / 4.0) < 1e-12


def test_phase_condition_holds_for_every_case_model():
    grid = np.linspace(0.0, 2.0, 41)
    for sc in ALL_CASES:
        report = check_phase_condition(sc, grid)
        assert report.satisfied, (sc.case, report.max_violation)
        assert report.max_violation < 1e-9


def test_phase_condition_negative_control():
    # constant coefficients with unequal diagonals fail the constant-phase
    # chart condition: theta12 is frozen but rho(t) advances linearly
    grid = np.linspace(0.0, 2.0, 21)
    bad = AllConstantScenario(w11=0.7, w22=0.3, w12=0.25 + 0.1j)
    phi0 = float(np.angle(-1j * bad.w12))
    report = check_phase_condition(bad, grid, reference=lambda t: phi0)
    assert not report.satisfied
    assert abs(report.max_violation - 0.8) < 1e-9  # (w11 - w22) * t_end

    good = AllConstantScenario(w11=0.4, w22=0.4, w12=0.25 + 0.1j)
    phi0 = float(np.angle(-1j * good.w12))
    report = check_phase_condition(good, grid, reference=lambda t: phi0)
    assert report.satisfied


def test_phase_condition_explicit_reference():
    sc = LinearPhaseScenario(eta0=1.0, w0=0.7, phi0=0.2)
    grid = np.linspace(0.0, 1.5, 16)
    good = check_phase_condition(sc, grid,
                                 reference=lambda t: 0.2 + 0.7 * t)
    assert good.satisfied
    bad = check_phase_condition(sc, grid, reference=lambda t: 0.2)
    assert not bad.satisfied


def test_general_phase_validation():
    with pytest.raises(ValueError):
        GeneralPhaseScenario(eta0=1.0, w0=1.0, theta0=0.0)
    with pytest.raises(ValueError):
        GeneralPhaseScenario(eta0=1.0, w0=1.0, theta0=1.0, nu=-0.3)
    with pytest.raises(ValueError):
        GeneralPhaseScenario(eta0=-1.0, w0=1.0)
    # same signs are fine, including the all-negative branch
    GeneralPhaseScenario(eta0=1.0, w0=1.0, theta0=-1.0, nu=-0.2)


def test_general_phase_reduces_to_linear():
    gp = GeneralPhaseScenario(eta0=1.0, w0=1.0, phi0=0.3, theta0=1.0, nu=0.0)
    lp = LinearPhaseScenario(eta0=1.0, w0=1.0, phi0=0.3)
    for t in np.linspace(0.0, 1.2, 7):
        assert abs(eta(gp, t) - eta(lp, t)) < 1e-12


def test_general_phase_norm_tracks_phase_speed():
    sc = GeneralPhaseScenario(eta0=0.8, w0=1.2, theta0=1.0, nu=0.2)
    for t in (0.0, 0.5, 1.1):
        sample = eval_coeffs(sc, t)
        dphi = sc.theta0 + 2.0 * sc.nu * t
        assert abs(abs(sample.w12) - (sc.eta0 / sc.w0) * dphi) < 1e-12


def test_isotropic_constructors():
    sc = IsotropicConstantScenario.from_polar(0.7, theta_alpha0=0.3,
                                              theta_beta0=-0.2)
    assert abs(abs(sc.alpha) ** 2 + abs(sc.beta) ** 2 - 1.0) < 1e-12
    assert abs(np.angle(sc.alpha) - 0.3) < 1e-12
    with pytest.raises(ValueError):
        IsotropicConstantScenario(alpha=1.0, beta=1.0)


def test_isotropic_coupling_and_integrals():
    sc = IsotropicConstantScenario(alpha=1 / math.sqrt(2),
                                   beta=1 / math.sqrt(2))
    sample = eval_coeffs(sc, 0.7)
    assert abs(sample.w12 - 0.5) < 1e-12
    assert abs(eta(sc, 0.7) + 0.5j) < 1e-12
    alpha, rho = alpha_rho(sc, 1.7)
    assert abs(alpha - 1.7) < 1e-12
    assert abs(rho) < 1e-12


def test_rho_constant_structure():
    sc = RhoConstantScenario(rho0=math.pi / 6.0, eta0=0.8, w0=1.0)
    sample = eval_coeffs(sc, 0.9)
    assert abs(sample.w11 - math.cos(math.pi / 6) ** 2) < 1e-12
    assert abs(sample.w22 - math.sin(math.pi / 6) ** 2) < 1e-12
    assert abs(abs(sample.w12)
               - math.sin(math.pi / 6) * math.cos(math.pi / 6)) < 1e-12
    assert abs(sc.delta - math.hypot(1.6, 1.0)) < 1e-12
    with pytest.raises(ValueError):
        RhoConstantScenario(rho0=0.0, eta0=1.0, w0=1.0)
    with pytest.raises(ValueError):
        RhoConstantScenario(rho0=0.5, eta0=-1.0, w0=1.0)


def test_rho_constant_zero_drift_ratio():
    # 2 eta0 / w0 = tan(2 rho0) freezes the coupling phase entirely
    rho0 = math.pi / 6.0
    sc = RhoConstantScenario(rho0=rho0, eta0=math.sqrt(3) / 2.0, w0=1.0)
    assert abs(sc.theta_drift) < 1e-12
    s0 = eval_coeffs(sc, 0.0)
    s1 = eval_coeffs(sc, 1.7)
    assert abs(np.angle(s1.w12) - np.angle(s0.w12)) < 1e-12


def test_log_rho_validation_and_rho_formula():
    with pytest.raises(ValueError):
        LogRhoScenario(t0=0.0, eta0=1.0, w0=1.0)
    sc = LogRhoScenario(t0=1.0, eta0=0.9, w0=0.7)
    for t in (0.3, 1.4):
        _, rho = alpha_rho(sc, t)
        want = 2 * math.atan(t + 1.0) - 2 * math.atan(1.0) - t
        assert abs(rho - want) < 1e-12


def test_quadratic_phase_eta():
    sc = QuadraticPhaseScenario(eta0=1.3, theta0=0.5)
    for t in (0.0, 0.6, 1.1):
        want = 1.3 * np.exp(-1j * 0.5 * t * t)
        assert abs(eta(sc, t) - want) < 1e-12
    with pytest.raises(ValueError):
        QuadraticPhaseScenario(eta0=1.0, theta0=0.0)


def test_fresnel_norm_profile():
    sc = FresnelNormScenario(w12_0=0.8, nu=0.6)
    for t in (0.0, 0.5, 1.2):
        sample = eval_coeffs(sc, t)
        assert abs(abs(sample.w12)
                   - 0.8 * abs(math.cos(0.6 * t * t))) < 1e-12
    assert abs(sc.norm_integral(0.0)) == 0.0
    # psi is increasing and below the unconstrained-norm line
    psis = [sc.norm_integral(t) for t in (0.3, 0.6, 0.9)]
    assert psis[0] < psis[1] < psis[2]
    assert psis[2] <= 0.8 * 0.9 + 1e-12
    with pytest.raises(ValueError):
        FresnelNormScenario(w12_0=0.0, nu=0.5)


def test_drives_evaluate():
    const = ConstantDrive(0.2 + 0.1j)
    rot = RotatingDrive(0.1, 1.0, 0.4)
    cos = CosineDrive(0.3, 2.0, 0.1)
    assert const(1.7) == 0.2 + 0.1j
    assert abs(rot(0.7) - 0.1 * np.exp(1j * (0.7 + 0.4))) < 1e-15
    assert abs(cos(0.7) - 0.3 * math.cos(2.0 * 0.7 + 0.1)) < 1e-15


def test_scalar_drive_must_be_real():
    with pytest.raises(ValueError):
        AllConstantScenario(w11=0.1, w22=0.1, w12=0.1,
                            b=ConstantDrive(0.1 + 0.2j))
    AllConstantScenario(w11=0.1, w22=0.1, w12=0.1, b=ConstantDrive(0.1))


def test_drives_enter_samples():
    sc = AllConstantScenario(w11=0.1, w22=0.1, w12=0.1,
                             f1=RotatingDrive(0.1, 1.0, 0.0),
                             f2=ConstantDrive(0.2j),
                             b=CosineDrive(0.5, 1.0, 0.0))
    sample = eval_coeffs(sc, 0.9)
    assert abs(sample.f1 - 0.1 * np.exp(0.9j)) < 1e-15
    assert sample.f2 == 0.2j
    assert abs(sample.b - 0.5 * math.cos(0.9)) < 1e-15


def test_tabulated_roundtrip_against_closed_case():
    base = LinearPhaseScenario(eta0=1.0, w0=1.0, phi0=0.3, w11=0.15, w22=0.05)
    ts = np.linspace(0.0, 2.0, 81)
    samples = [eval_coeffs(base, t) for t in ts]
    tab = TabulatedScenario.from_samples(
        ts,
        w11=[s.w11 for s in samples],
        w22=[s.w22 for s in samples],
        w12=[s.w12 for s in samples])
    for t in (0.37, 1.12, 1.91):
        a, b = eval_coeffs(base, t), eval_coeffs(tab, t)
        assert abs(a.w11 - b.w11) < 1e-6
        assert abs(a.w12 - b.w12) < 1e-6
    alpha_a, rho_a = alpha_rho(base, 1.7)
    alpha_b, rho_b = alpha_rho(tab, 1.7)
    assert abs(alpha_a - alpha_b) < 1e-6
    assert abs(rho_a - rho_b) < 1e-6


def test_tabulated_validation():
    ts = np.array([0.0, 0.5, 1.0])
    with pytest.raises(ValueError):
        TabulatedScenario.from_samples(ts, w11=[0, 0, 0], w22=[0, 0, 0],
                                       w12=[0, 0, 0])
    ts = np.array([0.0, 0.5, 0.5, 1.0])
    with pytest.raises(ValueError):
        TabulatedScenario.from_samples(ts, w11=np.zeros(4), w22=np.zeros(4),
                                       w12=np.zeros(4))
    tab = TabulatedScenario.from_samples(
        np.linspace(0, 1, 5), w11=np.zeros(5), w22=np.zeros(5),
        w12=np.full(5, 0.5))
    with pytest.raises(ValueError):
        eval_coeffs(tab, 1.5)


def test_tabulated_csv(tmp_path):
    path = tmp_path / "coeffs.csv"
    rows = ["t,w11,w22,re_w12,im_w12,re_F1,im_F1,re_F2,im_F2,B"]
    for t in np.linspace(0.0, 1.0, 9):
        rows.append(f"{t},0.3,0.3,0.2,0.1,0.05,0.0,0.0,0.0,0.1")
    path.write_text("\n".join(rows) + "\n")
    tab = TabulatedScenario.from_csv(path)
    sample = eval_coeffs(tab, 0.5)
    assert abs(sample.w12 - (0.2 + 0.1j)) < 1e-9
    assert abs(sample.f1 - 0.05) < 1e-9
    assert abs(sample.b - 0.1) < 1e-9

    bad = tmp_path / "missing.csv"
    bad.write_text("t,w11\n0,0\n1,0\n2,0\n3,0\n")
    with pytest.raises(ValueError):
        TabulatedScenario.from_csv(bad)

"""Coefficient scenarios: time profiles of the quadratic coupling matrix
W(t) = [[w11, w12], [w21, w22]], the linear drives F1, F2, and the scalar
term B for a pair of coupled driven modes.

Each scenario is a frozen dataclass with closed-form diagonal integrals
alpha(t) = int (w11 + w22) and rho(t) = int (w11 - w22).  The effective
coupling entering the off-diagonal Riccati flow is

    eta(s) = -i w12(s) e^{i rho(s)},

and the named closed-form families fix the phase of eta:
constant, linear in s, quadratic in s, or slaved to a mixing angle rho(s).
The condition theta12(s) = phi(s) + pi/2 - rho(s) (mod 2pi) ties the raw
coupling phase theta12 to the eta phase model phi; check_phase_condition
measures the residual on a grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# drives

@dataclass(frozen=True)
class ConstantDrive:
    value: complex = 0j

    def __call__(self, t):
        return self.value


@dataclass(frozen=True)
class RotatingDrive:
    """amplitude * exp(i (omega t + phase)), the standard rotating drive."""

    amplitude: complex
    omega: float
    phase: float = 0.0

    def __call__(self, t):
        return self.amplitude * np.exp(1j * (self.omega * t + self.phase))


@dataclass(frozen=True)
class CosineDrive:
    """Real cosine profile, meant for the scalar term B."""

    amplitude: float
    omega: float
    phase: float = 0.0

    def __call__(self, t):
        return self.amplitude * np.cos(self.omega * t + self.phase)


NO_DRIVE = ConstantDrive(0j)


def drive_is_zero(drive) -> bool:
    return isinstance(drive, ConstantDrive) and drive.value == 0


# ---------------------------------------------------------------------------
# samples and reports

@dataclass(frozen=True)
class CoeffSample:
    """All Hamiltonian coefficients at one instant."""

    t: float
    w11: float
    w22: float
    w12: complex
    f1: complex
    f2: complex
    b: float

    @property
    def w21(self) -> complex:
        return np.conj(self.w12)


@dataclass(frozen=True)
class PhaseConditionReport:
    satisfied: bool
    max_violation: float
    t: np.ndarray
    violation: np.ndarray


# ---------------------------------------------------------------------------
# scenario base

@dataclass(frozen=True)
class Scenario:
    """Base for all coefficient scenarios.  Subclasses provide coupling()
    and diag_integrals(); drives default to zero."""

    f1: object = field(default=NO_DRIVE, kw_only=True)
    f2: object = field(default=NO_DRIVE, kw_only=True)
    b: object = field(default=NO_DRIVE, kw_only=True)

    case = "?"

    def __post_init__(self):
        for probe in (0.33, 1.7):
            bval = complex(self.b(probe))
            if abs(bval.imag) > 1e-12:
                raise ValueError("scalar drive B must be real-valued")

    def coupling(self, t: float) -> tuple[float, float, complex]:
        raise NotImplementedError

    def diag_integrals(self, t: float) -> tuple[float, float]:
        """(alpha, rho) = (int_0^t (w11+w22), int_0^t (w11-w22))."""
        raise NotImplementedError

    def phase_reference(self, t: float) -> float:
        """Model phase phi(t) of eta used by check_phase_condition."""
        raise NotImplementedError

    def eta(self, t: float) -> complex:
        _, rho = self.diag_integrals(t)
        _, _, w12 = self.coupling(t)
        return -1j * w12 * np.exp(1j * rho)


def eval_coeffs(scenario: Scenario, t: float) -> CoeffSample:
    w11, w22, w12 = scenario.coupling(t)
    return CoeffSample(t=float(t), w11=w11, w22=w22, w12=w12,
                       f1=complex(scenario.f1(t)), f2=complex(scenario.f2(t)),
                       b=float(complex(scenario.b(t)).real))


def eta(scenario: Scenario, t: float) -> complex:
    return scenario.eta(t)


def alpha_rho(scenario: Scenario, t: float) -> tuple[float, float]:
    return scenario.diag_integrals(t)


def check_phase_condition(scenario: Scenario, grid, tol: float = 1e-9,
                          reference: Callable[[float], float] | None = None,
                          ) -> PhaseConditionReport:
    """Residual of theta12(t) - (phi(t) + pi/2 - rho(t)) wrapped to (-pi, pi].

    Points where w12 vanishes carry no phase information and contribute
    zero residual.  An explicit reference phi(t) overrides the scenario's
    own phase model.
    """
    grid = np.asarray(grid, dtype=float)
    phi = reference if reference is not None else scenario.phase_reference
    residual = np.zeros_like(grid)
    for i, t in enumerate(grid):
        _, _, w12 = scenario.coupling(t)
        if abs(w12) < 1e-300:
            continue
        _, rho = scenario.diag_integrals(t)
        target = phi(t) + math.pi / 2.0 - rho
        diff = np.angle(w12) - target
        residual[i] = (diff + math.pi) % TWO_PI - math.pi
    max_violation = float(np.max(np.abs(residual))) if grid.size else 0.0
    return PhaseConditionReport(satisfied=bool(max_violation <= tol),
                                max_violation=max_violation,
                                t=grid, violation=residual)


# ---------------------------------------------------------------------------
# closed-form families: constant / linear / general phase of eta

@dataclass(frozen=True)
class ConstantPhaseScenario(Scenario):
    """Coupling norm eta0 with a time-independent eta phase phi0.

    w12(s) = eta0 e^{i(phi0 + pi/2 - (w11-w22)s)}; diagonals are constant.
    """

    eta0: float
    phi0: float = 0.0
    w11: float = 0.0
    w22: float = 0.0

    case = "ConstantPhase"

    def __post_init__(self):
        super().__post_init__()
        if self.eta0 < 0:
            raise ValueError("eta0 must be non-negative")

    def coupling(self, t):
        theta12 = self.phi0 + math.pi / 2.0 - (self.w11 - self.w22) * t
        return self.w11, self.w22, self.eta0 * np.exp(1j * theta12)

    def diag_integrals(self, t):
        return (self.w11 + self.w22) * t, (self.w11 - self.w22) * t

    def phase_reference(self, t):
        return self.phi0

    def phi(self, t):
        return self.phi0

    def phi_tilde(self, t):
        return 0.0


@dataclass(frozen=True)
class LinearPhaseScenario(Scenario):
    """eta = eta0 e^{i(phi0 + w0 s)}: linearly drifting phase, constant norm."""

    eta0: float
    w0: float
    phi0: float = 0.0
    w11: float = 0.0
    w22: float = 0.0

    case = "LinearPhase"

    def __post_init__(self):
        super().__post_init__()
        if self.eta0 < 0:
            raise ValueError("eta0 must be non-negative")

    def coupling(self, t):
        theta12 = self.phi(t) + math.pi / 2.0 - (self.w11 - self.w22) * t
        return self.w11, self.w22, self.eta0 * np.exp(1j * theta12)

    def diag_integrals(self, t):
        return (self.w11 + self.w22) * t, (self.w11 - self.w22) * t

    def phase_reference(self, t):
        return self.phi(t)

    def phi(self, t):
        return self.phi0 + self.w0 * t

    def phi_tilde(self, t):
        return self.w0 * t


@dataclass(frozen=True)
class GeneralPhaseScenario(Scenario):
    """eta phase phi(s) = phi0 + theta0 s + nu s^2 with norm slaved to the
    phase speed: |w12(s)| = eps (eta0/w0) dphi/ds, eps = sign(theta0).

    dphi/ds must keep one sign for s >= 0, so theta0 and nu may not pull in
    opposite directions; a sign change would make the norm cross zero and
    the closed factors lose their meaning.
    """

    eta0: float
    w0: float
    phi0: float = 0.0
    theta0: float = 1.0
    nu: float = 0.0
    w11: float = 0.0
    w22: float = 0.0

    case = "GeneralPhase"

    def __post_init__(self):
        super().__post_init__()
        if self.eta0 <= 0 or self.w0 <= 0:
            raise ValueError("eta0 and w0 must be positive")
        if self.theta0 == 0:
            raise ValueError("theta0 must be nonzero (phase speed at s=0)")
        if self.nu != 0 and (self.nu > 0) != (self.theta0 > 0):
            raise ValueError("dphi/ds would cross zero at s = "
                             f"{-self.theta0 / (2 * self.nu):.6g}; rejected")

    @property
    def eps(self) -> int:
        return 1 if self.theta0 > 0 else -1

    def coupling(self, t):
        norm = self.eps * (self.eta0 / self.w0) * (self.theta0 + 2 * self.nu * t)
        theta12 = self.phi(t) + math.pi / 2.0 - (self.w11 - self.w22) * t
        return self.w11, self.w22, norm * np.exp(1j * theta12)

    def diag_integrals(self, t):
        return (self.w11 + self.w22) * t, (self.w11 - self.w22) * t

    def phase_reference(self, t):
        return self.phi(t)

    def phi(self, t):
        return self.phi0 + self.theta0 * t + self.nu * t * t

    def phi_tilde(self, t):
        return self.theta0 * t + self.nu * t * t


# ---------------------------------------------------------------------------
# constant Hamiltonian and the isotropic special case

@dataclass(frozen=True)
class AllConstantScenario(Scenario):
    """Every Hamiltonian coefficient frozen in time."""

    w11: float
    w22: float
    w12: complex

    case = "AllConstant"

    def coupling(self, t):
        return self.w11, self.w22, self.w12

    def diag_integrals(self, t):
        return (self.w11 + self.w22) * t, (self.w11 - self.w22) * t

    def phase_reference(self, t):
        # constant coefficients map onto the linearly-drifting-phase chart:
        # eta = -i w12 e^{i (w11 - w22) t}.  Probing the constant-phase chart
        # instead is done by passing an explicit constant reference.
        phi0 = float(np.angle(-1j * self.w12)) if self.w12 != 0 else 0.0
        return phi0 + (self.w11 - self.w22) * t

    @property
    def rabi(self) -> float:
        return math.hypot(self.w11 - self.w22, 2.0 * abs(self.w12))


@dataclass(frozen=True)
class IsotropicConstantScenario(Scenario):
    """H = A^dag A for the dressed mode A = alpha a1 + beta a2 with
    |alpha|^2 + |beta|^2 = 1.  Coupling w12 = conj(alpha) beta, unit Rabi
    frequency, spectrum 0, 1, 2, ...
    """

    alpha: complex
    beta: complex
    z0: complex = 0j

    case = "IsotropicConstant"

    def __post_init__(self):
        super().__post_init__()
        if abs(abs(self.alpha) ** 2 + abs(self.beta) ** 2 - 1.0) > 1e-12:
            raise ValueError("|alpha|^2 + |beta|^2 must equal 1")

    @classmethod
    def from_polar(cls, rho0: float, theta_alpha0: float = 0.0,
                   theta_beta0: float = 0.0, z0: complex = 0j, **drives):
        alpha = math.cos(rho0) * np.exp(1j * theta_alpha0)
        beta = math.sin(rho0) * np.exp(1j * theta_beta0)
        return cls(alpha=complex(alpha), beta=complex(beta), z0=z0, **drives)

    def coupling(self, t):
        return (abs(self.alpha) ** 2, abs(self.beta) ** 2,
                np.conj(self.alpha) * self.beta)

    def diag_integrals(self, t):
        d = abs(self.alpha) ** 2 - abs(self.beta) ** 2
        return t, d * t

    def phase_reference(self, t):
        w12 = np.conj(self.alpha) * self.beta
        phi0 = float(np.angle(-1j * w12)) if w12 != 0 else 0.0
        return phi0 + (abs(self.alpha) ** 2 - abs(self.beta) ** 2) * t


# ---------------------------------------------------------------------------
# time-dependent isotropic families (mixing angle rho(s))

@dataclass(frozen=True)
class RhoConstantScenario(Scenario):
    """Isotropic-form coefficients with a frozen mixing angle rho0 and a
    linearly drifting coupling phase.

    w11 = cos^2 rho0, w22 = sin^2 rho0, |w12| = sin(rho0) cos(rho0),
    theta12(s) = theta_beta0 - theta_alpha0 + Theta_dot s with
    Theta_dot = (w0 / 2 eta0) sin(2 rho0) - cos(2 rho0).  Only the ratio
    w0/eta0 is physical; the norm condition holds for any positive pair.
    """

    rho0: float
    eta0: float
    w0: float
    theta_alpha0: float = 0.0
    theta_beta0: float = 0.0
    z0: complex = 0j

    case = "RhoConstant"

    def __post_init__(self):
        super().__post_init__()
        if not 0.0 < self.rho0 < math.pi / 2.0:
            raise ValueError("rho0 must lie in (0, pi/2)")
        if self.eta0 <= 0 or self.w0 <= 0:
            raise ValueError("eta0 and w0 must be positive")

    @property
    def delta(self) -> float:
        return math.hypot(2.0 * self.eta0, self.w0)

    @property
    def theta_drift(self) -> float:
        r2 = 2.0 * self.rho0
        return (self.w0 / (2.0 * self.eta0)) * math.sin(r2) - math.cos(r2)

    def coupling(self, t):
        c, s = math.cos(self.rho0), math.sin(self.rho0)
        theta12 = (self.theta_beta0 - self.theta_alpha0
                   + self.theta_drift * t)
        return c * c, s * s, c * s * np.exp(1j * theta12)

    def diag_integrals(self, t):
        return t, math.cos(2.0 * self.rho0) * t

    def phi(self, t):
        phi0 = self.theta_beta0 - self.theta_alpha0 - math.pi / 2.0
        slope = (self.w0 / (2.0 * self.eta0)) * math.sin(2.0 * self.rho0)
        return phi0 + slope * t

    def phi_tilde(self, t):
        return (self.w0 / (2.0 * self.eta0)) * math.sin(2.0 * self.rho0) * t

    def phase_reference(self, t):
        return self.phi(t)

    def big_phi(self, t) -> float:
        """Phase angle Phi(t) = (delta / 4 eta0) int_0^t sin(2 rho)."""
        return (self.delta / (4.0 * self.eta0)) * math.sin(2.0 * self.rho0) * t

    def theta_beta_alpha(self, t) -> float:
        return self.theta_drift * t

    def mixing_angle0(self) -> float:
        return self.rho0


@dataclass(frozen=True)
class LogRhoScenario(Scenario):
    """Isotropic-form coefficients with mixing angle rho(s) = arctan(t0 + s).

    w11 = 1/(1+(s+t0)^2), w22 = (s+t0)^2/(1+(s+t0)^2),
    |w12| = (s+t0)/(1+(s+t0)^2); the coupling phase picks up a logarithmic
    drift (w0 / 2 eta0) ln[(1+(s+t0)^2)/(1+t0^2)] on top of the geometric
    piece, so that eta keeps the general-phase structure.
    """

    t0: float
    eta0: float
    w0: float
    theta_alpha0: float = 0.0
    theta_beta0: float = 0.0
    z0: complex = 0j

    case = "LogRho"

    def __post_init__(self):
        super().__post_init__()
        if self.t0 <= 0:
            raise ValueError("t0 must be positive")
        if self.eta0 <= 0 or self.w0 <= 0:
            raise ValueError("eta0 and w0 must be positive")

    @property
    def delta(self) -> float:
        return math.hypot(2.0 * self.eta0, self.w0)

    def _log_term(self, t: float) -> float:
        u = t + self.t0
        return math.log((1.0 + u * u) / (1.0 + self.t0 * self.t0))

    def coupling(self, t):
        u = t + self.t0
        den = 1.0 + u * u
        theta12 = (self.theta_beta0 - self.theta_alpha0
                   + (self.w0 / (2.0 * self.eta0)) * self._log_term(t)
                   + t + 2.0 * math.atan(self.t0) - 2.0 * math.atan(u))
        return 1.0 / den, u * u / den, (u / den) * np.exp(1j * theta12)

    def diag_integrals(self, t):
        u = t + self.t0
        rho = 2.0 * math.atan(u) - 2.0 * math.atan(self.t0) - t
        return t, rho

    def phi(self, t):
        phi0 = self.theta_beta0 - self.theta_alpha0 - math.pi / 2.0
        return phi0 + (self.w0 / (2.0 * self.eta0)) * self._log_term(t)

    def phi_tilde(self, t):
        return (self.w0 / (2.0 * self.eta0)) * self._log_term(t)

    def phase_reference(self, t):
        return self.phi(t)

    def big_phi(self, t) -> float:
        return (self.delta / (4.0 * self.eta0)) * self._log_term(t)

    def theta_beta_alpha(self, t) -> float:
        u = t + self.t0
        return ((self.w0 / (2.0 * self.eta0)) * self._log_term(t)
                + t + 2.0 * math.atan(self.t0) - 2.0 * math.atan(u))

    def mixing_angle0(self) -> float:
        return math.atan(self.t0)


# ---------------------------------------------------------------------------
# alternative-ordering showcase families

@dataclass(frozen=True)
class QuadraticPhaseScenario(Scenario):
    """Vanishing diagonals, eta = eta0 e^{-i theta0 s^2}.  The alternative
    ordering solves this through confluent hypergeometric functions."""

    eta0: float
    theta0: float

    case = "QuadraticPhase"

    def __post_init__(self):
        super().__post_init__()
        if self.eta0 <= 0:
            raise ValueError("eta0 must be positive")
        if self.theta0 == 0:
            raise ValueError("theta0 must be nonzero (constant phase otherwise)")

    def coupling(self, t):
        theta12 = math.pi / 2.0 - self.theta0 * t * t
        return 0.0, 0.0, self.eta0 * np.exp(1j * theta12)

    def diag_integrals(self, t):
        return 0.0, 0.0

    def phase_reference(self, t):
        return -self.theta0 * t * t


@dataclass(frozen=True)
class FresnelNormScenario(Scenario):
    """Vanishing diagonals, |w12(s)| = w12_0 |cos(nu s^2)|, with the
    coupling phase slaved so the alternative ordering closes through
    Fresnel integrals: theta12 = 3 q - tan(q) + theta_v0 - theta_u0 - pi/2
    where q(s) is the Gudermannian of psi(s) = int_0^s |w12|.
    """

    w12_0: float
    nu: float
    theta_v0: float = 0.0
    theta_u0: float = 0.0

    case = "FresnelNorm"

    def __post_init__(self):
        super().__post_init__()
        if self.w12_0 <= 0 or self.nu <= 0:
            raise ValueError("w12_0 and nu must be positive")

    def norm_integral(self, t: float) -> float:
        """psi(t) = int_0^t w12_0 |cos(nu s^2)| ds by adaptive quadrature."""
        if t == 0.0:
            return 0.0
        val, _ = quad(lambda s: self.w12_0 * abs(math.cos(self.nu * s * s)),
                      0.0, t, epsabs=1e-12, epsrel=1e-12, limit=200)
        return val

    def tilt_angle(self, t: float) -> float:
        """q(t) = gd(psi(t)) = 2 arctan(tanh(psi/2))."""
        return 2.0 * math.atan(math.tanh(0.5 * self.norm_integral(t)))

    def coupling(self, t):
        q = self.tilt_angle(t)
        theta12 = (3.0 * q - math.tan(q) + self.theta_v0 - self.theta_u0
                   - math.pi / 2.0)
        norm = self.w12_0 * abs(math.cos(self.nu * t * t))
        return 0.0, 0.0, norm * np.exp(1j * theta12)

    def diag_integrals(self, t):
        return 0.0, 0.0

    def phase_reference(self, t):
        q = self.tilt_angle(t)
        return 3.0 * q - math.tan(q) + self.theta_v0 - self.theta_u0 - math.pi


# ---------------------------------------------------------------------------
# tabulated coefficients

@dataclass(frozen=True)
class TabulatedScenario(Scenario):
    """Coefficients sampled on a grid, interpolated by cubic splines.
    Diagonal integrals come from the spline antiderivatives, so alpha and
    rho are exactly consistent with the interpolated w11 and w22."""

    grid: np.ndarray
    _w11: CubicSpline
    _w22: CubicSpline
    _w12re: CubicSpline
    _w12im: CubicSpline
    _sum_int: CubicSpline
    _diff_int: CubicSpline

    case = "Tabulated"

    @classmethod
    def from_samples(cls, t, w11, w22, w12, f1=None, f2=None, b=None):
        t = np.asarray(t, dtype=float)
        if t.size < 4:
            raise ValueError("need at least 4 samples for cubic interpolation")
        if np.any(np.diff(t) <= 0):
            raise ValueError("sample times must be strictly increasing")
        w11 = np.asarray(w11, dtype=float)
        w22 = np.asarray(w22, dtype=float)
        w12 = np.asarray(w12, dtype=complex)
        s11 = CubicSpline(t, w11)
        s22 = CubicSpline(t, w22)
        drives = {}
        if f1 is not None:
            drives["f1"] = _SplineDrive.build(t, np.asarray(f1, dtype=complex))
        if f2 is not None:
            drives["f2"] = _SplineDrive.build(t, np.asarray(f2, dtype=complex))
        if b is not None:
            drives["b"] = _SplineDrive.build(t, np.asarray(b, dtype=complex))
        return cls(grid=t, _w11=s11, _w22=s22,
                   _w12re=CubicSpline(t, w12.real),
                   _w12im=CubicSpline(t, w12.imag),
                   _sum_int=CubicSpline(t, w11 + w22).antiderivative(),
                   _diff_int=CubicSpline(t, w11 - w22).antiderivative(),
                   **drives)

    @classmethod
    def from_csv(cls, path):
        data = np.genfromtxt(path, delimiter=",", names=True)
        cols = ("t", "w11", "w22", "re_w12", "im_w12",
                "re_F1", "im_F1", "re_F2", "im_F2", "B")
        missing = [c for c in cols if c not in (data.dtype.names or ())]
        if missing:
            raise ValueError(f"tabulated file missing columns {missing}")
        return cls.from_samples(
            data["t"], data["w11"], data["w22"],
            data["re_w12"] + 1j * data["im_w12"],
            f1=data["re_F1"] + 1j * data["im_F1"],
            f2=data["re_F2"] + 1j * data["im_F2"],
            b=data["B"])

    def _check_domain(self, t):
        lo, hi = self.grid[0], self.grid[-1]
        if t < lo - 1e-9 or t > hi + 1e-9:
            raise ValueError(f"time {t} outside tabulated domain [{lo}, {hi}]")

    def coupling(self, t):
        self._check_domain(t)
        return (float(self._w11(t)), float(self._w22(t)),
                complex(self._w12re(t) + 1j * self._w12im(t)))

    def diag_integrals(self, t):
        self._check_domain(t)
        t0 = self.grid[0]
        return (float(self._sum_int(t) - self._sum_int(t0)),
                float(self._diff_int(t) - self._diff_int(t0)))

    def phase_reference(self, t):
        t0 = float(self.grid[0])
        _, _, w12 = self.coupling(t0)
        return float(np.angle(-1j * w12)) if w12 != 0 else 0.0


@dataclass(frozen=True)
class _SplineDrive:
    re: CubicSpline
    im: CubicSpline

    @classmethod
    def build(cls, t, values):
        return cls(re=CubicSpline(t, values.real), im=CubicSpline(t, values.imag))

    def __call__(self, t):
        return complex(self.re(t) + 1j * self.im(t))

"""Brute-force reference propagators and comparison helpers.

These deliberately avoid the factorization machinery: the only ingredients
are midpoint sampling of the Hamiltonian and exact exponentials of frozen
Hermitian matrices (by eigendecomposition, so every step is unitary to
roundoff).  Agreement between this route and the closed forms is the main
evidence the factorization is right; the two routes must stay independent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fock import FockSpace, annihilator, interior_mask, number_diagonals
from .scenario import Scenario, eval_coeffs


class InsufficientSamples(Exception):
    """Too few samples for the requested finite-difference stencil."""


def _step_unitary(h: np.ndarray, dt: float) -> np.ndarray:
    # exp(-i h dt) for Hermitian h via eigendecomposition
    vals, vecs = np.linalg.eigh(h)
    return (vecs * np.exp(-1j * vals * dt)) @ vecs.conj().T


def hamiltonian_matrix(space: FockSpace, scenario: Scenario, t: float,
                       ops: dict | None = None) -> np.ndarray:
    """Dense H(t) on the truncated space, drives and scalar term included."""
    if ops is None:
        ops = hamiltonian_ops(space)
    c = eval_coeffs(scenario, t)
    h = (c.w11 * ops["n1"] + c.w22 * ops["n2"]
         + c.w12 * ops["k12"] + np.conj(c.w12) * ops["k12"].conj().T)
    if c.f1 != 0:
        h = h + c.f1 * ops["a1"].conj().T + np.conj(c.f1) * ops["a1"]
    if c.f2 != 0:
        h = h + c.f2 * ops["a2"].conj().T + np.conj(c.f2) * ops["a2"]
    if c.b != 0:
        h = h + c.b * np.eye(space.dim)
    return h


def hamiltonian_ops(space: FockSpace) -> dict:
    a1 = annihilator(space, 1)
    a2 = annihilator(space, 2)
    n1, n2 = number_diagonals(space)
    return {"a1": a1, "a2": a2, "n1": np.diag(n1).astype(complex),
            "n2": np.diag(n2).astype(complex), "k12": a1.conj().T @ a2}


def brute_force_propagator(space: FockSpace, scenario: Scenario, t: float,
                           n_steps: int) -> np.ndarray:
    """Time-ordered product of midpoint-frozen step unitaries on the
    truncated Fock space.  Second order accurate in t/n_steps."""
    if n_steps < 1:
        raise InsufficientSamples("n_steps must be at least 1")
    ops = hamiltonian_ops(space)
    dt = t / n_steps
    u = np.eye(space.dim, dtype=complex)
    for k in range(n_steps):
        mid = (k + 0.5) * dt
        h = hamiltonian_matrix(space, scenario, mid, ops)
        u = _step_unitary(h, dt) @ u
    return u


def brute_force_smatrix(scenario: Scenario, t: float, n_steps: int) -> np.ndarray:
    """Same midpoint product for the 2x2 coefficient matrix W(s)."""
    if n_steps < 1:
        raise InsufficientSamples("n_steps must be at least 1")
    dt = t / n_steps
    s = np.eye(2, dtype=complex)
    for k in range(n_steps):
        c = eval_coeffs(scenario, (k + 0.5) * dt)
        w = np.array([[c.w11, c.w12], [np.conj(c.w12), c.w22]], dtype=complex)
        s = _step_unitary(w, dt) @ s
    return s


def ode_residual(ts, values, rhs) -> float:
    """Max deviation of centered differences from rhs(t, y) on a uniform
    grid.  values may be scalar samples (shape (n,)) or a system (n, m)."""
    ts = np.asarray(ts, dtype=float)
    values = np.asarray(values, dtype=complex)
    if ts.size < 3:
        raise InsufficientSamples("need at least 3 samples for a centered stencil")
    h = np.diff(ts)
    if np.max(np.abs(h - h[0])) > 1e-9 * max(abs(h[0]), 1e-300):
        raise ValueError("ode_residual expects a uniform grid")
    worst = 0.0
    for i in range(1, ts.size - 1):
        deriv = (values[i + 1] - values[i - 1]) / (ts[i + 1] - ts[i - 1])
        dev = np.max(np.abs(deriv - np.asarray(rhs(ts[i], values[i]))))
        worst = max(worst, float(dev))
    return worst


@dataclass(frozen=True)
class ComparisonReport:
    max_entry_deviation: float
    fidelities: np.ndarray
    det_ratio: complex
    det_deviation: float
    notes: str = ""


def compare_operators(a: np.ndarray, b: np.ndarray, test_states,
                      space: FockSpace | None = None,
                      margin: int = 2) -> ComparisonReport:
    """Entrywise deviation on the interior block, per-state fidelities
    |<a psi | b psi>|^2, and the determinant ratio det(a)/det(b).

    A pure global phase between a and b shows up only in det_ratio; the
    fidelities and (generally) the entry deviation expose real mismatches.
    Rows and columns within `margin` quanta of the cutoff are excluded
    from the entry deviation when a space is given.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if space is not None:
        mask = interior_mask(space, margin)
        diff = np.abs(a - b)[np.ix_(mask, mask)]
    else:
        diff = np.abs(a - b)
    max_entry = float(diff.max()) if diff.size else 0.0

    fids = []
    for psi in test_states:
        x = a @ psi
        y = b @ psi
        nx = np.linalg.norm(x)
        ny = np.linalg.norm(y)
        if nx == 0.0 or ny == 0.0:
            fids.append(0.0)
            continue
        fids.append(float(abs(np.vdot(x, y)) ** 2 / (nx * nx * ny * ny)))
    fids = np.asarray(fids)

    sign_a, logdet_a = np.linalg.slogdet(a)
    sign_b, logdet_b = np.linalg.slogdet(b)
    if sign_b == 0:
        det_ratio = complex(np.inf)
        det_dev = float("inf")
        notes = "det(b) vanishes"
    else:
        det_ratio = complex(sign_a / sign_b * np.exp(logdet_a - logdet_b))
        det_dev = abs(det_ratio - 1.0)
        notes = ""
    return ComparisonReport(max_entry_deviation=max_entry, fidelities=fids,
                            det_ratio=det_ratio, det_deviation=det_dev,
                            notes=notes)

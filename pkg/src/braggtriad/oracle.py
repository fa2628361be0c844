"""Brute-force check: truncated three-mode Fock space in the quasiparticle basis.

Modes are (alpha_q, alpha_{-q}, c). The dimensionless Hamiltonian is

    H = n1 + n2 - delta n3 + eta (b3^dag (b1^dag + b2) + h.c.)

and the state obeys i d psi / d tau = H psi. Bogoliubov dressing enters only
through the particle-number operators used for observables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from .condensate import ModeCoefficients
from .observables import UNDEFINED_TOL, ObservableRecord, ProbeState

MAX_DIMENSION = 10**6
LEAK_TOLERANCE = 1e-6


class TruncationError(RuntimeError):
    """Population reached the edge of the truncated space."""


@dataclass(frozen=True)
class TruncationSpec:
    cutoffs: tuple = (24, 24, 24)

    def __post_init__(self):
        cut = tuple(int(c) for c in self.cutoffs)
        if len(cut) != 3 or min(cut) < 1:
            raise ValueError(f"need three positive cutoffs, got {self.cutoffs}")
        if math.prod(cut) > MAX_DIMENSION:
            raise ValueError(f"truncated dimension {math.prod(cut)} exceeds {MAX_DIMENSION}")
        object.__setattr__(self, "cutoffs", cut)

    @property
    def dimension(self) -> int:
        return math.prod(self.cutoffs)


@dataclass(frozen=True)
class FockState:
    amplitudes: np.ndarray
    spec: TruncationSpec

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def leak(self) -> float:
        """Probability on the outermost retained layer of any mode."""
        prob = np.abs(self.amplitudes.reshape(self.spec.cutoffs)) ** 2
        edge = np.zeros(prob.shape, dtype=bool)
        for axis, c in enumerate(self.spec.cutoffs):
            index = [slice(None)] * 3
            index[axis] = c - 1
            edge[tuple(index)] = True
        return float(prob[edge].sum())


def _lowering(cutoff):
    return sp.diags(np.sqrt(np.arange(1, cutoff)), 1, shape=(cutoff, cutoff), format="csr")


def ladder_ops(spec: TruncationSpec):
    """Annihilators (b1, b2, b3) on the product space."""
    eyes = [sp.identity(c, format="csr") for c in spec.cutoffs]
    ops = []
    for k, c in enumerate(spec.cutoffs):
        factors = list(eyes)
        factors[k] = _lowering(c)
        ops.append(sp.kron(sp.kron(factors[0], factors[1]), factors[2], format="csr"))
    return ops


def build_hamiltonian(eta: float, delta: float, spec: TruncationSpec):
    b1, b2, b3 = ladder_ops(spec)
    n1, n2, n3 = (b.T @ b for b in (b1, b2, b3))
    coupling = b3.T @ (b1.T + b2)
    h = n1 + n2 - delta * n3 + eta * (coupling + coupling.T)
    return h.tocsr()


def probe_amplitudes(probe: ProbeState, cutoff: int) -> np.ndarray:
    amp = np.zeros(cutoff, dtype=complex)
    if probe.kind == "vacuum":
        amp[0] = 1.0
    elif probe.kind == "fock":
        if probe.number >= cutoff:
            raise TruncationError(f"Fock {probe.number} does not fit in cutoff {cutoff}")
        amp[probe.number] = 1.0
    else:
        beta = probe.amplitude
        n = np.arange(cutoff)
        log_mag = -0.5 * abs(beta) ** 2 - 0.5 * np.array([math.lgamma(k + 1) for k in n])
        amp = np.exp(log_mag) * beta**n if beta != 0 else (n == 0).astype(complex)
        amp = amp / np.linalg.norm(amp)
    return amp


def initial_state(probe: ProbeState, spec: TruncationSpec) -> FockState:
    c1, c2, c3 = spec.cutoffs
    psi = np.zeros((c1, c2, c3), dtype=complex)
    psi[0, 0, :] = probe_amplitudes(probe, c3)
    return FockState(psi.reshape(-1), spec)


def check_leak(state: FockState, tolerance: float = LEAK_TOLERANCE):
    leak = state.leak()
    if leak > tolerance:
        raise TruncationError(
            f"edge population {leak:.3e} exceeds {tolerance:.1e}; raise cutoffs {state.spec.cutoffs}"
        )
    return leak


def evolve(state: FockState, hamiltonian, tau: float, dt: float = 0.01, method: str = "expm"):
    """Propagate by ``tau``; ``method`` is ``expm`` (exact action) or ``rk4``."""
    if tau < 0:
        raise ValueError("tau must be >= 0")
    if dt > 0.01 or dt <= 0:
        raise ValueError("dt must lie in (0, 0.01]")
    psi = state.amplitudes
    if tau > 0:
        if method == "expm":
            psi = expm_multiply(-1j * tau * hamiltonian, psi)
        elif method == "rk4":
            steps = max(1, math.ceil(tau / dt - 1e-12))
            h = tau / steps
            rhs = lambda y: -1j * (hamiltonian @ y)
            for _ in range(steps):
                k1 = rhs(psi)
                k2 = rhs(psi + 0.5 * h * k1)
                k3 = rhs(psi + 0.5 * h * k2)
                k4 = rhs(psi + h * k3)
                psi = psi + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        else:
            raise ValueError(f"unknown method {method!r}")
    out = FockState(psi, state.spec)
    check_leak(out)
    return out


def number_operators(coeffs: ModeCoefficients, spec: TruncationSpec):
    """Particle-number operators (n_q, n_{-q}, n_k2) in the quasiparticle basis."""
    b1, b2, b3 = ladder_ops(spec)
    eye = sp.identity(spec.dimension, format="csr")
    n1, n2, n3 = (b.T @ b for b in (b1, b2, b3))
    pair = b1.T @ b2.T + b2 @ b1
    u, v = coeffs.u, coeffs.v
    n_q = u * u * n1 - u * v * pair + v * v * (n2 + eye)
    n_mq = u * u * n2 - u * v * pair + v * v * (n1 + eye)
    return n_q.tocsr(), n_mq.tocsr(), n3.tocsr()


def _expect(op, psi) -> float:
    return float(np.vdot(psi, op @ psi).real)


def oracle_observables(state: FockState, coeffs: ModeCoefficients, tau=math.nan, t=math.nan, ops=None):
    ops = ops or number_operators(coeffs, state.spec)
    psi = state.amplitudes / state.norm
    vecs = [op @ psi for op in ops]
    means = [float(np.vdot(psi, w).real) for w in vecs]

    def xi(i, j):
        denom = means[i] + means[j]
        if denom < UNDEFINED_TOL:
            return None
        diff = vecs[i] - vecs[j]
        return float((np.vdot(diff, diff).real - (means[i] - means[j]) ** 2) / denom)

    q = None
    if means[2] >= UNDEFINED_TOL:
        q = float((np.vdot(vecs[2], vecs[2]).real - means[2] ** 2) / means[2])
    return ObservableRecord(
        t=t, tau=tau, n_q=means[0], n_mq=means[1], n_k2=means[2],
        xi_q_mq=xi(0, 1), xi_q_k2=xi(0, 2), xi_mq_k2=xi(1, 2), q_mandel=q,
    )


def oracle_series(eta, delta, coeffs, probe, taus, spec=TruncationSpec()):
    """Oracle records on a sorted grid of dimensionless times."""
    h = build_hamiltonian(eta, delta, spec)
    ops = number_operators(coeffs, spec)
    state = initial_state(probe, spec)
    check_leak(state)
    out, now = [], 0.0
    for tau in taus:
        if tau < now:
            raise ValueError("taus must be sorted")
        state = evolve(state, h, tau - now)
        now = tau
        out.append(oracle_observables(state, coeffs, tau=tau, ops=ops))
    return out


RECORD_FIELDS = ("n_q", "n_mq", "n_k2", "xi_q_mq", "xi_q_k2", "xi_mq_k2", "q_mandel")


def discrepancy(a, b, field: str, rel: float = 1e-6, abs_floor: float = 1e-9) -> float:
    """Relative difference of one record field, floored so that an absolute
    error of ``abs_floor`` scores exactly ``rel``. Both undefined scores 0."""
    x, y = getattr(a, field), getattr(b, field)
    if x is None or y is None:
        return 0.0 if x is None and y is None else math.inf
    return abs(x - y) / max(abs(x), abs(y), abs_floor / rel)

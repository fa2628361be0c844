"""Occupations, number-difference witnesses and Mandel Q of the evolved modes.

The initial state is the quasiparticle vacuum for both side modes times a
probe state. Particle operators follow from the evolved quasiparticle
operators through a_q = u alpha_q - v alpha_{-q}^dag and its mirror.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernel
from .condensate import CondensateParams, ModeCoefficients, effective_coupling, mode_coefficients
from .kernel import ANNIHILATE, CREATE, Mode
from .triad import Propagator, build_model, propagator

UNDEFINED_TOL = 1e-12
MAX_FOCK = 2

_MODE_ALIASES = {
    "q": Mode.SIDE_Q,
    "+q": Mode.SIDE_Q,
    "-q": Mode.SIDE_MINUS_Q,
    "mq": Mode.SIDE_MINUS_Q,
    "k2": Mode.PROBE,
    "probe": Mode.PROBE,
}


def as_mode(mode) -> Mode:
    if isinstance(mode, str):
        try:
            return _MODE_ALIASES[mode.lower()]
        except KeyError:
            raise ValueError(f"unknown mode {mode!r}") from None
    return Mode(mode)


@dataclass(frozen=True)
class ProbeState:
    """Initial probe-field state: vacuum, coherent(amplitude) or fock(number)."""

    kind: str = "vacuum"
    amplitude: complex = 0j
    number: int = 0

    def __post_init__(self):
        if self.kind not in ("vacuum", "coherent", "fock"):
            raise ValueError(f"unknown probe kind {self.kind!r}")
        if self.kind == "coherent" and not np.isfinite(complex(self.amplitude)):
            raise ValueError("coherent amplitude must be finite")
        if self.kind == "fock" and not 0 <= self.number <= MAX_FOCK:
            raise ValueError(f"Fock probe supports n in 0..{MAX_FOCK}, got {self.number}")

    @classmethod
    def vacuum(cls):
        return cls("vacuum")

    @classmethod
    def coherent(cls, beta):
        return cls("coherent", amplitude=complex(beta))

    @classmethod
    def fock(cls, n):
        return cls("fock", number=int(n))

    @classmethod
    def parse(cls, text: str) -> "ProbeState":
        """Parse ``vacuum``, ``coherent:<re>,<im>`` or ``fock:<n>``."""
        kind, _, arg = text.strip().partition(":")
        kind = kind.lower()
        try:
            if kind == "vacuum" and not arg:
                return cls.vacuum()
            if kind == "coherent":
                re_, _, im = arg.partition(",")
                return cls.coherent(complex(float(re_), float(im or 0.0)))
            if kind == "fock":
                return cls.fock(int(arg))
        except ValueError as exc:
            raise ValueError(f"bad probe spec {text!r}: {exc}") from None
        raise ValueError(f"bad probe spec {text!r}")

    def __str__(self):
        if self.kind == "coherent":
            return f"coherent:{self.amplitude.real!r},{self.amplitude.imag!r}"
        if self.kind == "fock":
            return f"fock:{self.number}"
        return "vacuum"

    @property
    def mean_photons(self) -> float:
        if self.kind == "coherent":
            return abs(self.amplitude) ** 2
        if self.kind == "fock":
            return float(self.number)
        return 0.0


def moment_table(state: ProbeState) -> kernel.MomentTable:
    if state.kind == "coherent":
        return kernel.coherent_table(state.amplitude)
    if state.kind == "fock":
        return kernel.fock_table(state.number)
    return kernel.vacuum_table()


def initial_tables(probe: ProbeState):
    return (kernel.vacuum_table(), kernel.vacuum_table(), moment_table(probe))


@lru_cache(maxsize=32)
def _tensors(probe: ProbeState):
    tables = initial_tables(probe)
    return kernel.moment_tensor(tables, 2), kernel.moment_tensor(tables, 4)


@dataclass(frozen=True)
class ObservableRecord:
    t: float
    tau: float
    n_q: float
    n_mq: float
    n_k2: float
    xi_q_mq: float | None
    xi_q_k2: float | None
    xi_mq_k2: float | None
    q_mandel: float | None

    def xi(self, i, j):
        pair = frozenset((as_mode(i), as_mode(j)))
        return {
            frozenset((Mode.SIDE_Q, Mode.SIDE_MINUS_Q)): self.xi_q_mq,
            frozenset((Mode.SIDE_Q, Mode.PROBE)): self.xi_q_k2,
            frozenset((Mode.SIDE_MINUS_Q, Mode.PROBE)): self.xi_mq_k2,
        }[pair]


# --- evolved operators --------------------------------------------------------

# Initial-time symbols of the triad X = (alpha_q, alpha_{-q}^dag, c^dag).
_TRIAD_SYMBOLS = (
    kernel.symbol(Mode.SIDE_Q, ANNIHILATE),
    kernel.symbol(Mode.SIDE_MINUS_Q, CREATE),
    kernel.symbol(Mode.PROBE, CREATE),
)


def _row_form(row) -> np.ndarray:
    form = np.zeros(kernel.N_SYMBOLS, dtype=complex)
    form[list(_TRIAD_SYMBOLS)] = row
    return form


def evolved_forms(prop: Propagator, coeffs: ModeCoefficients):
    """Particle annihilators (a_q, a_{-q}, c) at time tau as linear forms."""
    s = np.asarray(prop.s if isinstance(prop, Propagator) else prop)
    alpha_q = _row_form(s[0])
    alpha_mq_dag = _row_form(s[1])
    c_dag = _row_form(s[2])
    a_q = coeffs.u * alpha_q - coeffs.v * alpha_mq_dag
    a_mq = coeffs.u * kernel.adjoint_form(alpha_mq_dag) - coeffs.v * kernel.adjoint_form(alpha_q)
    return a_q, a_mq, kernel.adjoint_form(c_dag)


def _moments(prop, coeffs, probe):
    """Means <n_i> and second moments <n_i n_j> via moment-tensor contraction."""
    w2, w4 = _tensors(probe)
    ann = np.array(evolved_forms(prop, coeffs))
    cre = np.array([kernel.adjoint_form(f) for f in ann])
    means = np.einsum("ia,ib,ab->i", cre, ann, w2).real
    second = np.einsum("ia,ib,jc,jd,abcd->ij", cre, ann, cre, ann, w4).real
    return means, second


def _xi(means, second, i, j):
    denom = means[i] + means[j]
    if denom < UNDEFINED_TOL:
        return None
    diff_mean = means[i] - means[j]
    var = second[i, i] + second[j, j] - 2.0 * second[i, j] - diff_mean**2
    return float(var / denom)


def _q(means, second):
    k = Mode.PROBE
    if means[k] < UNDEFINED_TOL:
        return None
    return float((second[k, k] - means[k] ** 2) / means[k])


def mean_occupation(mode, prop, coeffs, probe) -> float:
    means, _ = _moments(prop, coeffs, probe)
    return float(means[as_mode(mode)])


def entanglement_parameter(i, j, prop, coeffs, probe):
    """<[Delta(n_i - n_j)]^2> / (<n_i> + <n_j>), or None if the mean vanishes."""
    i, j = as_mode(i), as_mode(j)
    if i == j:
        raise ValueError("entanglement parameter needs two distinct modes")
    means, second = _moments(prop, coeffs, probe)
    return _xi(means, second, i, j)


def mandel_q(prop, coeffs, probe):
    means, second = _moments(prop, coeffs, probe)
    return _q(means, second)


def record_from_moments(t, tau, means, second) -> ObservableRecord:
    q, mq, k2 = Mode.SIDE_Q, Mode.SIDE_MINUS_Q, Mode.PROBE
    return ObservableRecord(
        t=float(t),
        tau=float(tau),
        n_q=float(means[q]),
        n_mq=float(means[mq]),
        n_k2=float(means[k2]),
        xi_q_mq=_xi(means, second, q, mq),
        xi_q_k2=_xi(means, second, q, k2),
        xi_mq_k2=_xi(means, second, mq, k2),
        q_mandel=_q(means, second),
    )


def record_at(prop: Propagator, coeffs: ModeCoefficients, probe: ProbeState, t=math.nan):
    means, second = _moments(prop, coeffs, probe)
    return record_from_moments(t, prop.tau, means, second)


def evolve_dimensionless(eta, delta, coeffs, probe, taus):
    """Records on a grid of dimensionless times (t is left as NaN)."""
    model = build_model(eta, delta)
    return [record_at(propagator(model, tau), coeffs, probe) for tau in taus]


def evolve_series(params: CondensateParams, probe: ProbeState, t_grid):
    """Records at laboratory times ``t_grid`` in seconds."""
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(t_grid < 0) or np.any(np.diff(t_grid) < 0):
        raise ValueError("t_grid must be sorted and non-negative")
    scales = effective_coupling(params)
    coeffs = mode_coefficients(params.momentum_x)
    model = build_model(scales.eta_tilde, scales.delta_tilde)
    out = []
    for t in t_grid:
        tau = scales.omega_b * t
        out.append(record_at(propagator(model, tau), coeffs, probe, t=t))
    return out


def operator_mean(forms_adj_ann, probe) -> complex:
    """Slow reference path: expand a product of forms and take its expectation."""
    return kernel.expectation(kernel.multiply_forms(forms_adj_ann), initial_tables(probe))

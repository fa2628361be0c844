"""Normal-ordered ladder-operator algebra over three bosonic modes.

A *symbol* is one ladder operator of one initial mode. Linear forms are
complex vectors over the six symbols, indexed ``2 * mode + kind`` with
kind 0 = creation, 1 = annihilation. A normal-ordered *word* is a tuple of
per-mode exponent pairs ``((m0, n0), (m1, n1), (m2, n2))`` standing for
prod_mode (a^dag)^m a^n.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_ORDER = 4
PRUNE = 1e-15
N_MODES = 3
N_SYMBOLS = 2 * N_MODES

CREATE = 0
ANNIHILATE = 1


class UnsupportedOrderError(ValueError):
    """Operator order exceeds what the moment tables cover."""


class Mode(enum.IntEnum):
    SIDE_Q = 0
    SIDE_MINUS_Q = 1
    PROBE = 2


def symbol(mode: int, kind: int) -> int:
    return 2 * int(mode) + kind


def symbol_name(index: int) -> str:
    mode, kind = divmod(index, 2)
    base = ("aq", "amq", "c")[mode]
    return base + ("^dag" if kind == CREATE else "")


# --- linear forms -----------------------------------------------------------


def linear_form(coeffs=None) -> np.ndarray:
    """Linear form from ``{symbol_index: coefficient}`` (or zeros)."""
    out = np.zeros(N_SYMBOLS, dtype=complex)
    for k, c in (coeffs or {}).items():
        out[k] += c
    return out


def adjoint_form(form: np.ndarray) -> np.ndarray:
    """Formal adjoint: conjugate coefficients, swap a <-> a^dag per mode."""
    form = np.asarray(form, dtype=complex)
    return form.conj().reshape(N_MODES, 2)[:, ::-1].reshape(N_SYMBOLS).copy()


# --- single-mode normal ordering -------------------------------------------


@lru_cache(maxsize=None)
def normal_order_single(kinds: tuple) -> tuple:
    """Normal-order a single-mode word given as a tuple of kinds.

    Returns a tuple of ((m, n), integer coefficient) pairs. Uses
    a a^dag -> a^dag a + 1 on the leftmost out-of-order pair.
    """
    for i in range(len(kinds) - 1):
        if kinds[i] == ANNIHILATE and kinds[i + 1] == CREATE:
            swapped = kinds[:i] + (CREATE, ANNIHILATE) + kinds[i + 2 :]
            contracted = kinds[:i] + kinds[i + 2 :]
            acc = {}
            for word, c in normal_order_single(swapped) + normal_order_single(contracted):
                acc[word] = acc.get(word, 0) + c
            return tuple((w, c) for w, c in sorted(acc.items()) if c)
    m = kinds.count(CREATE)
    return (((m, len(kinds) - m), 1),)


def _word_kinds(word):
    """Per-mode kind sequences for a normal-ordered word."""
    return [(CREATE,) * m + (ANNIHILATE,) * n for m, n in word]


def normal_order_symbols(symbols) -> dict:
    """Normal-order a product of symbol indices into {word: coefficient}."""
    per_mode = [[] for _ in range(N_MODES)]
    for s in symbols:
        mode, kind = divmod(s, 2)
        per_mode[mode].append(kind)
    factors = [normal_order_single(tuple(k)) for k in per_mode]
    out = {}
    for combo in itertools.product(*factors):
        word = tuple(w for w, _ in combo)
        coeff = math.prod(c for _, c in combo)
        out[word] = out.get(word, 0) + coeff
    return out


# --- polynomials ------------------------------------------------------------


def _check_word(word):
    for m, n in word:
        if m + n > MAX_ORDER:
            raise UnsupportedOrderError(
                f"per-mode order {m + n} exceeds the supported maximum {MAX_ORDER}"
            )


class OperatorPolynomial:
    """Sum of complex-weighted normal-ordered words."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        for word, c in (terms or {}).items():
            word = tuple(tuple(p) for p in word)
            _check_word(word)
            self.terms[word] = self.terms.get(word, 0) + complex(c)
        self._prune()

    def _prune(self):
        self.terms = {w: c for w, c in self.terms.items() if abs(c) >= PRUNE}

    @classmethod
    def identity(cls):
        return cls({((0, 0),) * N_MODES: 1.0})

    @classmethod
    def from_symbols(cls, symbols, coeff=1.0):
        if len(symbols) > MAX_ORDER:
            raise UnsupportedOrderError(f"{len(symbols)} operators exceed order {MAX_ORDER}")
        return cls({w: coeff * c for w, c in normal_order_symbols(symbols).items()})

    def __add__(self, other):
        if not isinstance(other, OperatorPolynomial):
            other = OperatorPolynomial.identity() * other
        acc = dict(self.terms)
        for w, c in other.terms.items():
            acc[w] = acc.get(w, 0) + c
        return OperatorPolynomial(acc)

    __radd__ = __add__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, OperatorPolynomial):
            return OperatorPolynomial({w: c * other for w, c in self.terms.items()})
        acc = {}
        for (w1, c1), (w2, c2) in itertools.product(self.terms.items(), other.terms.items()):
            kinds = [a + b for a, b in zip(_word_kinds(w1), _word_kinds(w2))]
            if any(len(k) > MAX_ORDER for k in kinds):
                raise UnsupportedOrderError("product exceeds the supported operator order")
            factors = [normal_order_single(k) for k in kinds]
            for combo in itertools.product(*factors):
                word = tuple(w for w, _ in combo)
                acc[word] = acc.get(word, 0) + c1 * c2 * math.prod(c for _, c in combo)
        return OperatorPolynomial(acc)

    def __rmul__(self, other):
        return self * other

    def adjoint(self):
        return OperatorPolynomial(
            {tuple((n, m) for m, n in w): c.conjugate() for w, c in self.terms.items()}
        )

    def normal_ordered(self):
        """Re-normal-order every word (the identity on a valid polynomial)."""
        acc = OperatorPolynomial()
        for w, c in self.terms.items():
            acc = acc + OperatorPolynomial(
                {
                    tuple(x for x, _ in combo): c * math.prod(k for _, k in combo)
                    for combo in itertools.product(
                        *[normal_order_single(k) for k in _word_kinds(w)]
                    )
                }
            )
        return acc

    def isclose(self, other, atol=1e-12):
        diff = self - other
        return all(abs(c) <= atol for c in diff.terms.values())

    def __repr__(self):
        return f"OperatorPolynomial({self.terms!r})"


def multiply_forms(forms) -> OperatorPolynomial:
    """Expand a product of 1..4 linear forms and normal-order it."""
    forms = [np.asarray(f, dtype=complex) for f in forms]
    if not 1 <= len(forms) <= MAX_ORDER:
        raise UnsupportedOrderError(f"need 1..{MAX_ORDER} forms, got {len(forms)}")
    supports = [np.flatnonzero(f) for f in forms]
    acc = {}
    for symbols in itertools.product(*supports):
        weight = math.prod(forms[i][s] for i, s in enumerate(symbols))
        for word, c in normal_order_symbols(symbols).items():
            acc[word] = acc.get(word, 0) + weight * c
    return OperatorPolynomial(acc)


# --- moment tables ----------------------------------------------------------


@dataclass(frozen=True)
class MomentTable:
    """<(a^dag)^m a^n> for m + n <= 4 in a single-mode state."""

    entries: dict

    def __getitem__(self, key):
        m, n = key
        if m + n > MAX_ORDER:
            raise UnsupportedOrderError(f"moment ({m}, {n}) outside table")
        return self.entries.get((m, n), 0j)


def _table(fn):
    return MomentTable(
        {(m, n): complex(fn(m, n)) for m in range(MAX_ORDER + 1) for n in range(MAX_ORDER + 1 - m)}
    )


def vacuum_table() -> MomentTable:
    return _table(lambda m, n: 1.0 if m == n == 0 else 0.0)


def coherent_table(beta: complex) -> MomentTable:
    beta = complex(beta)
    if not np.isfinite(beta):
        raise ValueError("coherent amplitude must be finite")
    return _table(lambda m, n: beta.conjugate() ** m * beta**n)


def fock_table(k: int) -> MomentTable:
    if k < 0:
        raise ValueError(f"Fock number must be >= 0, got {k}")
    return _table(lambda m, n: math.perm(k, m) if m == n and m <= k else 0.0)


def expectation(poly: OperatorPolynomial, tables) -> complex:
    """Expectation of a polynomial in a product state given per-mode tables."""
    total = 0j
    for word, c in poly.terms.items():
        total += c * math.prod(t[mn] for t, mn in zip(tables, word))
    return total


def moment_tensor(tables, order: int) -> np.ndarray:
    """W[s1, ..., s_order] = <s1 s2 ... s_order> over all symbol products.

    Contracting W with ``order`` linear forms reproduces
    ``expectation(multiply_forms(forms), tables)`` exactly, since both
    sides are multilinear in the forms.
    """
    if not 1 <= order <= MAX_ORDER:
        raise UnsupportedOrderError(f"order must be 1..{MAX_ORDER}")
    w = np.zeros((N_SYMBOLS,) * order, dtype=complex)
    for symbols in itertools.product(range(N_SYMBOLS), repeat=order):
        w[symbols] = sum(
            c * math.prod(t[mn] for t, mn in zip(tables, word))
            for word, c in normal_order_symbols(symbols).items()
        )
    return w

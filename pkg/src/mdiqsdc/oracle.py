"""Exact dense-amplitude oracle for small measurement scenarios.

Used only by tests, as the independent ground truth for every probabilistic
rule in :mod:`mdiqsdc.quantum`. States are unnormalized amplitude vectors
with ``fractions.Fraction`` entries (all states of interest here have real
rational amplitudes up to normalization), so outcome probabilities are exact
rationals and can be compared with ``==``.

Scenarios are limited to four qubits (16 amplitudes), which covers every
configuration the symbolic rules can produce: one or two pairs, product
qubits, and single/Bell measurement plans over them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .quantum import BELL_ORDER, Basis, BellLabel, ProductQubit

MAX_QUBITS = 4


class UnsupportedScenarioError(Exception):
    """Scenario uses more qubits than the oracle supports."""


@dataclass(frozen=True)
class Pair:
    """Two qubits prepared in the given Bell state."""

    label: BellLabel


@dataclass(frozen=True)
class Single:
    """One qubit prepared in a Z- or X-basis eigenstate."""

    qubit: ProductQubit


@dataclass
class Scenario:
    """Preparation, optional single-qubit ops, and a measurement plan.

    ``parts`` assign qubit indices in order (a Pair takes two consecutive
    indices). ``ops`` are (gate, qubit) with gate in {I,X,Y,Z,H,YH}, applied
    in list order. ``plan`` steps are ("single", qubit, Basis) or
    ("bell", qubit, qubit).
    """

    parts: list
    plan: list
    ops: list = field(default_factory=list)


# Unnormalized single-qubit states / 2x2 gates with integer entries.
_STATE = {
    (Basis.Z, 0): (1, 0),
    (Basis.Z, 1): (0, 1),
    (Basis.X, 0): (1, 1),
    (Basis.X, 1): (1, -1),
}
_GATE = {
    "I": ((1, 0), (0, 1)),
    "X": ((0, 1), (1, 0)),
    "Y": ((0, 1), (-1, 0)),   # iY = |0><1| - |1><0|
    "Z": ((1, 0), (0, -1)),
    "H": ((1, 1), (1, -1)),   # unnormalized Hadamard
}
_GATE["YH"] = None  # resolved to Y after H in _apply_gate

# Unnormalized Bell vectors on two qubits (amplitude index = bit_hi*2+bit_lo).
_BELL_VEC = {
    BellLabel.PHI_PLUS: (1, 0, 0, 1),
    BellLabel.PHI_MINUS: (1, 0, 0, -1),
    BellLabel.PSI_PLUS: (0, 1, 1, 0),
    BellLabel.PSI_MINUS: (0, 1, -1, 0),
}


def _kron(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    return [x * y for x in a for y in b]


def _initial_state(parts) -> tuple[list[Fraction], int]:
    vec = [Fraction(1)]
    n = 0
    for part in parts:
        if isinstance(part, Pair):
            vec = _kron(vec, [Fraction(v) for v in _BELL_VEC[part.label]])
            n += 2
        elif isinstance(part, Single):
            vec = _kron(vec, [Fraction(v) for v in _STATE[(part.qubit.basis, part.qubit.bit)]])
            n += 1
        else:
            raise TypeError(f"unknown scenario part: {part!r}")
    if n > MAX_QUBITS:
        raise UnsupportedScenarioError(f"{n} qubits exceeds the {MAX_QUBITS}-qubit oracle")
    return vec, n


def _apply_gate(vec: list[Fraction], n: int, gate: str, qubit: int) -> list[Fraction]:
    if gate == "YH":
        vec = _apply_gate(vec, n, "H", qubit)
        return _apply_gate(vec, n, "Y", qubit)
    m = _GATE[gate]
    out = [Fraction(0)] * len(vec)
    shift = n - 1 - qubit  # qubit 0 is the most significant bit
    for idx, amp in enumerate(vec):
        if amp == 0:
            continue
        b = (idx >> shift) & 1
        for nb in (0, 1):
            coeff = m[nb][b]
            if coeff:
                out[idx ^ ((b ^ nb) << shift)] += coeff * amp
    return out


def _norm_sq(vec: list[Fraction]) -> Fraction:
    return sum(a * a for a in vec)


def _project(vec, n, qubits, phi):
    """Project onto the (unnormalized) state phi of the given qubits.

    Returns the unnormalized post-measurement vector; the outcome probability
    is norm_sq(post) / (norm_sq(phi) * norm_sq(vec)).
    """
    shifts = [n - 1 - q for q in qubits]
    k = len(qubits)
    overlap: dict[int, Fraction] = {}
    for idx, amp in enumerate(vec):
        if amp == 0:
            continue
        sub = 0
        for s in shifts:
            sub = (sub << 1) | ((idx >> s) & 1)
        coeff = phi[sub]
        if coeff == 0:
            continue
        rest = idx
        for s in shifts:
            rest &= ~(1 << s)
        overlap[rest] = overlap.get(rest, Fraction(0)) + coeff * amp
    post = [Fraction(0)] * len(vec)
    for rest, s_amp in overlap.items():
        if s_amp == 0:
            continue
        for sub in range(1 << k):
            coeff = phi[sub]
            if coeff == 0:
                continue
            idx = rest
            for pos, s in enumerate(shifts):
                if (sub >> (k - 1 - pos)) & 1:
                    idx |= 1 << s
            post[idx] = coeff * s_amp
    return post


def _step_outcomes(step):
    kind = step[0]
    if kind == "single":
        _, qubit, basis = step
        return [(bit, (qubit,), [Fraction(v) for v in _STATE[(basis, bit)]])
                for bit in (0, 1)]
    if kind == "bell":
        _, qa, qb = step
        return [(label, (qa, qb), [Fraction(v) for v in _BELL_VEC[label]])
                for label in BELL_ORDER]
    raise ValueError(f"unknown plan step: {step!r}")


def oracle_distribution(scenario: Scenario) -> dict[tuple, Fraction]:
    """Exact joint distribution of the scenario's measurement plan outcomes.

    Keys are tuples with one entry per plan step (an int bit for single
    measurements, a BellLabel for Bell measurements); values are exact
    probabilities summing to 1.
    """
    vec, n = _initial_state(scenario.parts)
    for gate, qubit in scenario.ops:
        vec = _apply_gate(vec, n, gate, qubit)
    dist: dict[tuple, Fraction] = {}

    def recurse(state, norm, plan, prefix):
        if not plan:
            dist[prefix] = dist.get(prefix, Fraction(0)) + norm
            return
        step, rest = plan[0], plan[1:]
        state_sq = _norm_sq(state)
        for outcome, qubits, phi in _step_outcomes(step):
            post = _project(state, n, qubits, phi)
            post_sq = _norm_sq(post)
            if post_sq == 0:
                continue
            prob = post_sq / (_norm_sq(phi) ** 2 * state_sq)
            recurse(post, norm * prob, rest, prefix + (outcome,))

    recurse(vec, Fraction(1), list(scenario.plan), ())
    return dist

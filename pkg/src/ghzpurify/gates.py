"""Gate application and projective measurement on pure states and ensembles.

Kernels reshape the amplitude vector to (2,)*n so register position k is
tensor axis k. Measured qubits stay in the register, projected onto the
observed outcome; use discard() to drop spectator qubits that sit in a
definite basis state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import RegisterError
from .states import Ensemble, PureState, Register

# outcomes below this probability are treated as impossible
OUTCOME_EPS = 1e-12

_SQRT2 = np.sqrt(2.0)
_H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / _SQRT2
_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
_PAULI = {"I": np.eye(2, dtype=np.complex128), "X": _X, "Y": _Y, "Z": _Z}


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Paulis, keyed by label. Identity implied."""

    ops: Mapping[str, str]

    def __post_init__(self) -> None:
        ops = dict(self.ops)
        for lab, p in ops.items():
            if p not in _PAULI:
                raise ValueError(f"unknown Pauli {p!r} on {lab!r}")
        object.__setattr__(self, "ops", ops)


@dataclass(frozen=True)
class MeasurementRecord:
    label: str
    outcome: int
    probability: float


def _apply_single(s: PureState, label: str, mat: np.ndarray) -> PureState:
    q = s.register.index_of(label)
    n = s.n_qubits
    t = s.amps.reshape((2,) * n)
    t = np.tensordot(mat, t, axes=([1], [q]))
    t = np.moveaxis(t, 0, q)
    return PureState(s.register, t.reshape(-1))


def apply_h(s: PureState, label: str) -> PureState:
    return _apply_single(s, label, _H)


def apply_x(s: PureState, label: str) -> PureState:
    return _apply_single(s, label, _X)


def apply_z(s: PureState, label: str) -> PureState:
    return _apply_single(s, label, _Z)


def apply_pauli(s: PureState, p: PauliString) -> PureState:
    for lab, name in p.ops.items():
        if name != "I":
            s = _apply_single(s, lab, _PAULI[name])
    return s


def apply_cnot(s: PureState, control: str, target: str) -> PureState:
    if control == target:
        raise RegisterError("control and target must differ")
    c = s.register.index_of(control)
    t = s.register.index_of(target)
    n = s.n_qubits
    arr = s.amps.reshape((2,) * n).copy()
    sel: list[slice | int] = [slice(None)] * n
    sel[c] = 1
    sub = arr[tuple(sel)]
    axis = t - 1 if t > c else t
    arr[tuple(sel)] = np.flip(sub, axis=axis)
    return PureState(s.register, arr.reshape(-1))


def apply_circuit(s: PureState, ops: Iterable[tuple]) -> PureState:
    """Run ("h", q), ("x", q), ("z", q), ("cnot", c, t) descriptors in order."""
    for op in ops:
        kind = op[0]
        if kind == "h":
            s = apply_h(s, op[1])
        elif kind == "x":
            s = apply_x(s, op[1])
        elif kind == "z":
            s = apply_z(s, op[1])
        elif kind == "cnot":
            s = apply_cnot(s, op[1], op[2])
        else:
            raise ValueError(f"unknown op {op!r}")
    return s


def outcome_probability(s: PureState, label: str, outcome: int) -> float:
    q = s.register.index_of(label)
    t = np.abs(s.amps.reshape((2,) * s.n_qubits)) ** 2
    axes = tuple(i for i in range(s.n_qubits) if i != q)
    marg = t.sum(axis=axes)
    return float(marg[outcome])


def project(s: PureState, label: str, outcome: int) -> tuple[float, PureState | None]:
    """Project one qubit onto |outcome>. Returns (probability, renormalized state).

    The qubit stays in the register. Probability below OUTCOME_EPS yields
    (0.0, None).
    """
    if outcome not in (0, 1):
        raise ValueError(f"outcome must be 0 or 1, got {outcome}")
    q = s.register.index_of(label)
    p = outcome_probability(s, label, outcome)
    if p <= OUTCOME_EPS:
        return 0.0, None
    arr = s.amps.reshape((2,) * s.n_qubits).copy()
    sel: list[slice | int] = [slice(None)] * s.n_qubits
    sel[q] = 1 - outcome
    arr[tuple(sel)] = 0.0
    return p, PureState(s.register, arr.reshape(-1) / np.sqrt(p))


def measure(s: PureState, label: str) -> list[tuple[MeasurementRecord, PureState]]:
    """Computational-basis measurement of one qubit.

    Returns one entry per outcome with nonzero probability; the qubit is
    kept in the register, projected onto the outcome.
    """
    results = []
    for outcome in (0, 1):
        p, post = project(s, label, outcome)
        if post is not None:
            results.append((MeasurementRecord(label, outcome, p), post))
    return results


def measure_ensemble(
    e: Ensemble, labels: Sequence[str]
) -> dict[tuple[int, ...], tuple[float, Ensemble]]:
    """Joint measurement of several qubits across all branches.

    Returns {outcome tuple: (probability, renormalized ensemble)} with
    probabilities weighted by branch weights. Outcome keys are sorted.
    """
    if not labels:
        raise ValueError("need at least one label")
    total = e.weight_sum
    collected: dict[tuple[int, ...], list[tuple[float, PureState]]] = {}
    for w, s in e.branches:
        partial: list[tuple[tuple[int, ...], float, PureState]] = [((), w, s)]
        for lab in labels:
            nxt = []
            for outcome_prefix, wp, sp in partial:
                for outcome in (0, 1):
                    p, post = project(sp, lab, outcome)
                    if post is not None:
                        nxt.append((outcome_prefix + (outcome,), wp * p, post))
            partial = nxt
        for outcome_bits, wp, sp in partial:
            collected.setdefault(outcome_bits, []).append((wp, sp))
    out: dict[tuple[int, ...], tuple[float, Ensemble]] = {}
    for outcome_bits in sorted(collected):
        branches = collected[outcome_bits]
        prob = sum(w for w, _ in branches) / total
        ens = Ensemble(tuple((w / (prob * total), s) for w, s in branches))
        out[outcome_bits] = (prob, ens)
    return out


def discard(s: PureState, labels: Sequence[str]) -> PureState:
    """Drop qubits that sit in a definite computational basis state.

    Rejects qubits still in superposition or entangled with the rest, since
    discarding those would not leave a pure state.
    """
    drop = set(labels)
    if not drop:
        return s
    keep_positions = []
    fixed: dict[int, int] = {}
    for k, lab in enumerate(s.register.labels):
        if lab not in drop:
            keep_positions.append(k)
            continue
        p1 = outcome_probability(s, lab, 1)
        if p1 <= OUTCOME_EPS:
            fixed[k] = 0
        elif p1 >= 1.0 - OUTCOME_EPS:
            fixed[k] = 1
        else:
            raise RegisterError(f"qubit {lab!r} is not in a definite basis state")
    missing = drop - set(s.register.labels)
    if missing:
        raise RegisterError(f"labels {sorted(missing)} not in register")
    if not keep_positions:
        raise RegisterError("cannot discard every qubit")
    sel: list[slice | int] = [slice(None)] * s.n_qubits
    for k, v in fixed.items():
        sel[k] = v
    sub = s.amps.reshape((2,) * s.n_qubits)[tuple(sel)].reshape(-1)
    norm = np.linalg.norm(sub)
    reg = Register(tuple(s.register.labels[k] for k in keep_positions))
    return PureState(reg, sub / norm)


def reset_qubit(s: PureState, label: str) -> PureState:
    """Re-prepare a qubit that is in a definite basis state as |0>."""
    p1 = outcome_probability(s, label, 1)
    if p1 >= 1.0 - OUTCOME_EPS:
        return apply_x(s, label)
    if p1 <= OUTCOME_EPS:
        return s
    raise RegisterError(f"qubit {label!r} is not in a definite basis state")

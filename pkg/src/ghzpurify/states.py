"""Registers, pure states, ensembles, and density matrices.

States live on named qubit registers (mode labels such as a1, a2, b1, ...).
Amplitude vectors are big-endian: the qubit at register position k maps to
bit (n_qubits - 1 - k) of the basis index, so the leftmost label is the most
significant bit and basis index i spells the ket left to right.

Mixed states are represented as ensembles of weighted pure branches; dense
density matrices exist only as a cross-check representation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import RegisterError

MAX_QUBITS = 24
DENSITY_MAX_QUBITS = 12

# exact branch algebra vs density-matrix cross-checks
EXACT_TOL = 1e-12
ORACLE_TOL = 1e-10

_NORM_TOL = 1e-9
_SQRT2 = np.sqrt(2.0)

BELL_KINDS = ("phi+", "phi-", "psi+", "psi-")


@dataclass(frozen=True)
class Register:
    """Ordered collection of unique qubit labels."""

    labels: tuple[str, ...]
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        if len(labels) == 0:
            raise RegisterError("register needs at least one qubit")
        if len(labels) > MAX_QUBITS:
            raise RegisterError(f"register exceeds the {MAX_QUBITS}-qubit cap")
        index = {}
        for k, lab in enumerate(labels):
            if not lab:
                raise RegisterError("empty label")
            if lab in index:
                raise RegisterError(f"duplicate label {lab!r}")
            index[lab] = k
        object.__setattr__(self, "_index", index)

    @property
    def n_qubits(self) -> int:
        return len(self.labels)

    def __contains__(self, label: str) -> bool:
        return label in self._index

    def index_of(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise RegisterError(f"label {label!r} not in register") from None

    def positions(self, labels: Iterable[str]) -> list[int]:
        return [self.index_of(lab) for lab in labels]


def make_register(groups: Sequence[tuple[str, int]]) -> Register:
    """Build a register from (prefix, count) groups: ("a", 2) -> a1, a2."""
    seen = set()
    labels: list[str] = []
    for prefix, count in groups:
        if not prefix:
            raise RegisterError("empty prefix")
        if prefix in seen:
            raise RegisterError(f"duplicate prefix {prefix!r}")
        if count < 1:
            raise RegisterError(f"group {prefix!r} needs at least one qubit")
        seen.add(prefix)
        labels.extend(f"{prefix}{i}" for i in range(1, count + 1))
    return Register(tuple(labels))


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized statevector on a register. Treated as immutable."""

    register: Register
    amps: np.ndarray

    def __post_init__(self) -> None:
        amps = np.array(self.amps, dtype=np.complex128)
        if amps.shape != (2**self.register.n_qubits,):
            raise RegisterError(
                f"amplitude vector of length {amps.shape} does not match "
                f"{self.register.n_qubits}-qubit register"
            )
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > _NORM_TOL:
            raise ValueError(f"state is not normalized (norm^2 = {norm2})")
        amps.flags.writeable = False
        object.__setattr__(self, "amps", amps)

    @property
    def n_qubits(self) -> int:
        return self.register.n_qubits

    def amplitude(self, bits: str | Sequence[int]) -> complex:
        """Amplitude of one computational basis ket, leftmost bit first."""
        return complex(self.amps[_bits_to_index(bits, self.n_qubits)])


def _bits_to_index(bits: str | Sequence[int], n: int) -> int:
    vals = [int(b) for b in bits]
    if len(vals) != n or any(v not in (0, 1) for v in vals):
        raise ValueError(f"need {n} bits, got {bits!r}")
    idx = 0
    for v in vals:
        idx = (idx << 1) | v
    return idx


def basis_state(register: Register, bits: str | Sequence[int]) -> PureState:
    amps = np.zeros(2**register.n_qubits, dtype=np.complex128)
    amps[_bits_to_index(bits, register.n_qubits)] = 1.0
    return PureState(register, amps)


def _bell_vector(kind: str) -> np.ndarray:
    if kind not in BELL_KINDS:
        raise ValueError(f"unknown Bell kind {kind!r}")
    sign = 1.0 if kind.endswith("+") else -1.0
    v = np.zeros(4, dtype=np.complex128)
    if kind.startswith("phi"):
        v[0b00], v[0b11] = 1 / _SQRT2, sign / _SQRT2
    else:
        v[0b01], v[0b10] = 1 / _SQRT2, sign / _SQRT2
    return v


def make_bell(kind: str, labels: tuple[str, str] = ("q1", "q2")) -> PureState:
    """Physical two-qubit Bell state: phi+/- = (|00> +- |11>)/sqrt2, psi+/- = (|01> +- |10>)/sqrt2."""
    return PureState(Register(tuple(labels)), _bell_vector(kind))


def make_ghz(n: int, sign: str = "+", prefix: str = "g") -> PureState:
    """n-qubit GHZ state (|0...0> +- |1...1>)/sqrt2."""
    if n < 1:
        raise ValueError("need at least one qubit")
    if sign not in ("+", "-"):
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    amps = np.zeros(2**n, dtype=np.complex128)
    amps[0] = 1 / _SQRT2
    amps[-1] = (1 / _SQRT2) if sign == "+" else (-1 / _SQRT2)
    return PureState(make_register([(prefix, n)]), amps)


def make_logic_bell(
    n: int, kind: str, prefixes: tuple[str, str] = ("a", "b")
) -> PureState:
    """Logic Bell state on 2n qubits, each logic qubit an n-qubit GHZ block.

    The first n register qubits form logic qubit A, the last n logic qubit B:
        phi+/- = (G+ G+ +- G- G-)/sqrt2
        psi+/- = (G+ G- +- G- G+)/sqrt2
    with G+- the n-qubit GHZ states.
    """
    if n < 2:
        raise ValueError("logic qubits need n >= 2 physical qubits")
    if kind not in BELL_KINDS:
        raise ValueError(f"unknown logic Bell kind {kind!r}")
    gp = make_ghz(n, "+").amps
    gm = make_ghz(n, "-").amps
    sign = 1.0 if kind.endswith("+") else -1.0
    if kind.startswith("phi"):
        amps = (np.kron(gp, gp) + sign * np.kron(gm, gm)) / _SQRT2
    else:
        amps = (np.kron(gp, gm) + sign * np.kron(gm, gp)) / _SQRT2
    reg = make_register([(prefixes[0], n), (prefixes[1], n)])
    return PureState(reg, amps)


def _check_same_register(a: Register, b: Register) -> None:
    if a.labels != b.labels:
        raise RegisterError(f"register mismatch: {a.labels} vs {b.labels}")


def overlap(s1: PureState, s2: PureState) -> complex:
    """Signed inner product <s1|s2>; registers must match exactly."""
    _check_same_register(s1.register, s2.register)
    return complex(np.vdot(s1.amps, s2.amps))


def tensor(s1: PureState, s2: PureState) -> PureState:
    """Kronecker product; s1's qubits become the leading register positions."""
    common = set(s1.register.labels) & set(s2.register.labels)
    if common:
        raise RegisterError(f"overlapping labels {sorted(common)}")
    reg = Register(s1.register.labels + s2.register.labels)
    return PureState(reg, np.kron(s1.amps, s2.amps))


def with_labels(s: PureState, labels: Sequence[str]) -> PureState:
    """Same amplitudes on a renamed register (order preserved)."""
    if len(labels) != s.n_qubits:
        raise RegisterError("label count mismatch")
    return PureState(Register(tuple(labels)), s.amps)


def permute(s: PureState, labels: Sequence[str]) -> PureState:
    """Reorder the register qubits into the given label order."""
    new = tuple(labels)
    if sorted(new) != sorted(s.register.labels):
        raise RegisterError(
            f"permutation must use exactly the labels {s.register.labels}"
        )
    if new == s.register.labels:
        return s
    src = s.register.positions(new)
    t = s.amps.reshape((2,) * s.n_qubits).transpose(src)
    return PureState(Register(new), np.ascontiguousarray(t).reshape(-1))


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Weighted mixture of pure branches on a common register.

    Weights are strictly positive and normally sum to 1. Post-selection
    intermediates are sub-normalized: their weight sum is the probability
    of reaching them. An empty ensemble marks an impossible outcome.
    """

    branches: tuple[tuple[float, PureState], ...]

    def __post_init__(self) -> None:
        branches = tuple((float(w), s) for w, s in self.branches)
        object.__setattr__(self, "branches", branches)
        for w, _ in branches:
            if not w > 0.0:
                raise ValueError(f"branch weight must be positive, got {w}")
        if branches:
            reg = branches[0][1].register
            for _, s in branches[1:]:
                _check_same_register(reg, s.register)
        if self.weight_sum > 1.0 + _NORM_TOL:
            raise ValueError(f"weights sum to {self.weight_sum} > 1")

    @staticmethod
    def pure(state: PureState, weight: float = 1.0) -> Ensemble:
        return Ensemble(((weight, state),))

    @property
    def register(self) -> Register:
        if not self.branches:
            raise ValueError("empty ensemble has no register")
        return self.branches[0][1].register

    @property
    def weight_sum(self) -> float:
        return float(sum(w for w, _ in self.branches))

    def scaled(self, factor: float) -> Ensemble:
        return Ensemble(tuple((w * factor, s) for w, s in self.branches))


def map_branches(e: Ensemble, fn: Callable[[PureState], PureState]) -> Ensemble:
    return Ensemble(tuple((w, fn(s)) for w, s in e.branches))


def tensor_ensembles(e1: Ensemble, e2: Ensemble) -> Ensemble:
    branches = tuple(
        (w1 * w2, tensor(s1, s2)) for w1, s1 in e1.branches for w2, s2 in e2.branches
    )
    return Ensemble(branches)


def fidelity(e: Ensemble, target: PureState) -> float:
    """Sum over branches of weight times squared overlap with the target."""
    return float(
        sum(w * abs(overlap(target, s)) ** 2 for w, s in e.branches)
    )


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Dense density operator, used only for cross-checking the branch engine."""

    register: Register
    matrix: np.ndarray

    def __post_init__(self) -> None:
        if self.register.n_qubits > DENSITY_MAX_QUBITS:
            raise RegisterError(
                f"density matrices are capped at {DENSITY_MAX_QUBITS} qubits"
            )
        dim = 2**self.register.n_qubits
        mat = np.array(self.matrix, dtype=np.complex128)
        if mat.shape != (dim, dim):
            raise RegisterError(f"matrix shape {mat.shape} does not match register")
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)

    @property
    def n_qubits(self) -> int:
        return self.register.n_qubits

    def validate(self, tol: float = EXACT_TOL, check_psd: bool = False) -> None:
        """Raise if not Hermitian/unit-trace (and PSD when requested)."""
        m = self.matrix
        if np.max(np.abs(m - m.conj().T)) > tol:
            raise ValueError("matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > tol or abs(np.trace(m).imag) > tol:
            raise ValueError(f"trace is {np.trace(m)}, expected 1")
        if check_psd:
            eigs = np.linalg.eigvalsh(m)
            if eigs.min() < -ORACLE_TOL:
                raise ValueError(f"negative eigenvalue {eigs.min()}")


def to_density_matrix(e: Ensemble, normalize: bool = False) -> DensityMatrix:
    """Sum of weighted branch projectors; trace equals the weight sum."""
    if not e.branches:
        raise ValueError("cannot build a density matrix from an empty ensemble")
    dim = 2**e.register.n_qubits
    mat = np.zeros((dim, dim), dtype=np.complex128)
    for w, s in e.branches:
        mat += w * np.outer(s.amps, s.amps.conj())
    if normalize:
        mat /= np.trace(mat).real
    return DensityMatrix(e.register, mat)


def dm_fidelity(dm: DensityMatrix, target: PureState) -> float:
    """<target| rho |target>, the standard pure-target fidelity."""
    _check_same_register(dm.register, target.register)
    return float(np.vdot(target.amps, dm.matrix @ target.amps).real)

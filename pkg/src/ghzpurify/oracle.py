"""Brute-force density-matrix engine used to cross-check the branch engine.

Everything here works on dense matrices: gates are applied by conjugation
using slice arithmetic on the matrix reshaped to (2,)*(2k) (ket axes first,
then bra axes), measurements are diagonal projectors. The purification
pipeline below rebuilds the whole protocol from scratch on this
representation so the two engines share no evolution code.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import RegisterError
from .states import (
    DensityMatrix,
    Ensemble,
    Register,
    make_logic_bell,
    make_register,
    to_density_matrix,
)

_SQRT2 = np.sqrt(2.0)


def _h_axis(t: np.ndarray, axis: int) -> None:
    lo = np.take(t, 0, axis=axis).copy()
    hi = np.take(t, 1, axis=axis)
    sel: list[slice | int] = [slice(None)] * t.ndim
    sel[axis] = 0
    t[tuple(sel)] = (lo + hi) / _SQRT2
    sel[axis] = 1
    t[tuple(sel)] = (lo - hi) / _SQRT2


def _x_axis(t: np.ndarray, axis: int) -> None:
    lo = np.take(t, 0, axis=axis).copy()
    sel: list[slice | int] = [slice(None)] * t.ndim
    sel[axis] = 0
    hi = np.take(t, 1, axis=axis)
    t[tuple(sel)] = hi
    sel[axis] = 1
    t[tuple(sel)] = lo


def _z_axis(t: np.ndarray, axis: int) -> None:
    sel: list[slice | int] = [slice(None)] * t.ndim
    sel[axis] = 1
    t[tuple(sel)] *= -1.0


def _cnot_axes(t: np.ndarray, control_axis: int, target_axis: int) -> None:
    sel: list[slice | int] = [slice(None)] * t.ndim
    sel[control_axis] = 1
    sub = t[tuple(sel)]
    axis = target_axis - 1 if target_axis > control_axis else target_axis
    t[tuple(sel)] = np.flip(sub, axis=axis)


def _apply_ops(t: np.ndarray, n: int, ops: Iterable[tuple], reg: Register) -> None:
    """Conjugate in place: each gate hits the ket axis, then the bra axis.

    All gates used here have real matrices, so the bra side needs no
    conjugation.
    """
    for op in ops:
        kind = op[0]
        if kind == "cnot":
            c, tq = reg.index_of(op[1]), reg.index_of(op[2])
            _cnot_axes(t, c, tq)
            _cnot_axes(t, n + c, n + tq)
            continue
        q = reg.index_of(op[1])
        fn = {"h": _h_axis, "x": _x_axis, "z": _z_axis}.get(kind)
        if fn is None:
            raise ValueError(f"unknown op {op!r}")
        fn(t, q)
        fn(t, n + q)


def evolve_density(dm: DensityMatrix, ops: Sequence[tuple]) -> DensityMatrix:
    """Apply ("h", q) / ("x", q) / ("z", q) / ("cnot", c, t) descriptors."""
    n = dm.n_qubits
    t = dm.matrix.reshape((2,) * (2 * n)).copy()
    _apply_ops(t, n, ops, dm.register)
    return DensityMatrix(dm.register, t.reshape(2**n, 2**n))


def _diag_probability(mat: np.ndarray, n: int, q: int, outcome: int) -> float:
    diag = np.einsum("ii->i", mat).real.reshape((2,) * n)
    return float(np.take(diag, outcome, axis=q).sum())


def postselect_density(
    dm: DensityMatrix, label: str, outcome: int
) -> tuple[float, DensityMatrix | None]:
    """Project one qubit onto |outcome| and renormalize.

    Returns (probability, state); an impossible outcome gives (0.0, None).
    """
    if outcome not in (0, 1):
        raise ValueError(f"outcome must be 0 or 1, got {outcome}")
    n = dm.n_qubits
    q = dm.register.index_of(label)
    p = _diag_probability(dm.matrix, n, q, outcome)
    if p <= 1e-15:
        return 0.0, None
    t = dm.matrix.reshape((2,) * (2 * n)).copy()
    sel: list[slice | int] = [slice(None)] * (2 * n)
    sel[q] = 1 - outcome
    t[tuple(sel)] = 0.0
    sel = [slice(None)] * (2 * n)
    sel[n + q] = 1 - outcome
    t[tuple(sel)] = 0.0
    return p, DensityMatrix(dm.register, t.reshape(2**n, 2**n) / p)


def compare(e: Ensemble, dm: DensityMatrix) -> float:
    """Largest entrywise deviation between an ensemble and a density matrix."""
    own = to_density_matrix(e)
    if own.register.labels != dm.register.labels:
        raise RegisterError("register mismatch")
    return float(np.max(np.abs(own.matrix - dm.matrix)))


def _logic_pair_density(n: int, f: float, error_kind: str) -> np.ndarray:
    good = make_logic_bell(n, "phi+").amps
    bad = make_logic_bell(n, error_kind).amps
    return f * np.outer(good, good.conj()) + (1.0 - f) * np.outer(bad, bad.conj())


def oracle_purify_round(
    n: int, basis: str, f: float
) -> tuple[float, float, DensityMatrix]:
    """One full purification round computed entirely on density matrices.

    Returns (success probability, output fidelity, kept-pair density matrix
    after tracing out the sacrificed copy). Independent of the branch
    engine: the circuit is spelled out here and evolution is conjugation.
    """
    if basis not in ("bit", "phase"):
        raise ValueError(f"basis must be 'bit' or 'phase', got {basis!r}")
    reg = make_register([("a", n), ("b", n), ("c", n), ("d", n)])
    pair = _logic_pair_density(n, f, "psi+" if basis == "bit" else "phi-")
    system = DensityMatrix(reg, np.kron(pair, pair))

    ops: list[tuple] = []
    for pa, pb in (("a", "b"), ("c", "d")):
        for k in range(2, n + 1):
            ops.append(("cnot", f"{pa}1", f"{pa}{k}"))
        for k in range(2, n + 1):
            ops.append(("cnot", f"{pb}1", f"{pb}{k}"))
        ops.append(("h", f"{pa}1"))
        ops.append(("h", f"{pb}1"))
    if basis == "phase":
        ops.extend([("h", "a1"), ("h", "b1"), ("h", "c1"), ("h", "d1")])
    ops.extend([("cnot", "a1", "c1"), ("cnot", "b1", "d1")])
    system = evolve_density(system, ops)

    kept_parts = []
    p_total = 0.0
    for outcome in (0, 1):
        p1, after1 = postselect_density(system, "c1", outcome)
        if after1 is None:
            continue
        p2, after2 = postselect_density(after1, "d1", outcome)
        if after2 is None:
            continue
        kept_parts.append((p1 * p2, after2))
        p_total += p1 * p2
    if not kept_parts:
        return 0.0, 0.0, DensityMatrix(reg, np.zeros_like(system.matrix))
    mixed = sum(p * dm.matrix for p, dm in kept_parts) / p_total
    system = DensityMatrix(reg, mixed)

    recover: list[tuple] = [("h", "a1"), ("h", "b1")]
    for k in range(2, n + 1):
        recover.append(("cnot", "a1", f"a{k}"))
    for k in range(2, n + 1):
        recover.append(("cnot", "b1", f"b{k}"))
    system = evolve_density(system, recover)

    dim_ab = 2 ** (2 * n)
    dim_cd = 2 ** (2 * n)
    blocks = system.matrix.reshape(dim_ab, dim_cd, dim_ab, dim_cd)
    reduced = np.einsum("icjc->ij", blocks)
    target = make_logic_bell(n, "phi+").amps
    fid = float(np.vdot(target, reduced @ target).real)
    reg_ab = make_register([("a", n), ("b", n)])
    return p_total, fid, DensityMatrix(reg_ab, reduced)

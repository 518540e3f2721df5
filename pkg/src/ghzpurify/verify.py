"""Self-check suite: invariants the simulator must satisfy exactly.

Each check returns a CheckResult with its worst observed deviation; the CLI
prints one line per check and fails the run if any check fails. Randomized
checks use a fixed seed so a given build either always passes or always fails.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .gates import apply_cnot, apply_h, apply_x, apply_z
from .noise import ErrorKind, ErrorModel, apply_error_model
from .oracle import compare, oracle_purify_round
from .protocol import (
    BASES,
    PurifyConfig,
    copy_modes,
    correct_physical_bitflip,
    iterate_rounds,
    one_round_fidelity_map,
    one_round_success_probability,
    purify_round,
    recover_logic,
    reduce_copy,
)
from .states import (
    BELL_KINDS,
    Ensemble,
    PureState,
    Register,
    basis_state,
    make_bell,
    make_logic_bell,
    overlap,
    permute,
    tensor,
)

VERIFY_SEED = 20240917
ORACLE_TOL = 1e-10
EXACT_TOL = 1e-12


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    max_deviation: float
    tolerance: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status} {self.name}: max deviation {self.max_deviation:.3e}"
            f" (tolerance {self.tolerance:.1e})"
        )


def _result(name: str, dev: float, tol: float) -> CheckResult:
    return CheckResult(name, bool(dev <= tol), float(dev), float(tol))


def _random_state(rng: np.random.Generator, labels: tuple[str, ...]) -> PureState:
    dim = 2 ** len(labels)
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return PureState(Register(labels), v / np.linalg.norm(v))


def check_bell_orthonormal(ns: tuple[int, ...]) -> CheckResult:
    dev = 0.0
    states = [make_bell(k) for k in BELL_KINDS]
    for i, s1 in enumerate(states):
        for j, s2 in enumerate(states):
            want = 1.0 if i == j else 0.0
            dev = max(dev, abs(overlap(s1, s2) - want))
    return _result("bell_states_orthonormal", dev, EXACT_TOL)


def check_logic_bell_orthonormal(ns: tuple[int, ...]) -> CheckResult:
    dev = 0.0
    for n in ns:
        states = [make_logic_bell(n, k) for k in BELL_KINDS]
        for i, s1 in enumerate(states):
            for j, s2 in enumerate(states):
                want = 1.0 if i == j else 0.0
                dev = max(dev, abs(overlap(s1, s2) - want))
    return _result("logic_bell_orthonormal", dev, EXACT_TOL)


def check_gates_preserve_norm(ns: tuple[int, ...]) -> CheckResult:
    rng = np.random.default_rng(VERIFY_SEED)
    labels = tuple(f"q{i}" for i in range(1, 6))
    dev = 0.0
    for _ in range(40):
        s = _random_state(rng, labels)
        for _ in range(8):
            pick = rng.integers(0, 4)
            q = labels[rng.integers(0, len(labels))]
            if pick == 0:
                s = apply_h(s, q)
            elif pick == 1:
                s = apply_x(s, q)
            elif pick == 2:
                s = apply_z(s, q)
            else:
                t = labels[rng.integers(0, len(labels))]
                if t != q:
                    s = apply_cnot(s, q, t)
        dev = max(dev, abs(np.linalg.norm(s.amps) - 1.0))
    return _result("gates_preserve_norm", dev, EXACT_TOL)


def check_gates_self_inverse(ns: tuple[int, ...]) -> CheckResult:
    rng = np.random.default_rng(VERIFY_SEED + 1)
    labels = ("q1", "q2", "q3")
    dev = 0.0
    for _ in range(25):
        s = _random_state(rng, labels)
        for twice in (
            lambda t: apply_h(apply_h(t, "q2"), "q2"),
            lambda t: apply_x(apply_x(t, "q1"), "q1"),
            lambda t: apply_z(apply_z(t, "q3"), "q3"),
            lambda t: apply_cnot(apply_cnot(t, "q1", "q3"), "q1", "q3"),
        ):
            dev = max(dev, float(np.max(np.abs(twice(s).amps - s.amps))))
    return _result("gates_self_inverse", dev, EXACT_TOL)


def check_reduction_concentrates(ns: tuple[int, ...]) -> CheckResult:
    """reduce_copy must send each logic Bell kind to the matching physical
    Bell pair on the first modes, all other modes exactly |0>."""
    dev = 0.0
    for n in ns:
        modes = copy_modes(n, "a", "b")
        for kind in BELL_KINDS:
            got = reduce_copy(make_logic_bell(n, kind), modes)
            bell = make_bell(kind, ("a1", "b1"))
            zeros_labels = modes[0][1:] + modes[1][1:]
            zeros = basis_state(Register(zeros_labels), [0] * len(zeros_labels))
            expected = permute(tensor(bell, zeros), got.register.labels)
            dev = max(dev, abs(overlap(expected, got) - 1.0))
    return _result("reduction_concentrates", dev, EXACT_TOL)


def check_recovery_inverts_reduction(ns: tuple[int, ...]) -> CheckResult:
    dev = 0.0
    for n in ns:
        modes = copy_modes(n, "a", "b")
        for kind in BELL_KINDS:
            original = make_logic_bell(n, kind)
            reduced = reduce_copy(original, modes)
            back = recover_logic(Ensemble.pure(reduced), modes)
            for _, branch in back.branches:
                dev = max(dev, abs(overlap(original, branch) - 1.0))
    return _result("recovery_inverts_reduction", dev, EXACT_TOL)


def check_bennett_maps(ns: tuple[int, ...]) -> CheckResult:
    """Bilateral CNOT between two physical Bell pairs: the four golden maps."""
    cases = {
        ("phi+", "phi+"): ("phi+", "phi+"),
        ("phi+", "psi+"): ("phi+", "psi+"),
        ("psi+", "phi+"): ("psi+", "psi+"),
        ("psi+", "psi+"): ("psi+", "phi+"),
    }
    dev = 0.0
    for (k1, k2), (w1, w2) in cases.items():
        kept = make_bell(k1, ("a1", "b1"))
        sac = make_bell(k2, ("c1", "d1"))
        s = tensor(kept, sac)
        s = apply_cnot(s, "a1", "c1")
        s = apply_cnot(s, "b1", "d1")
        want = tensor(make_bell(w1, ("a1", "b1")), make_bell(w2, ("c1", "d1")))
        dev = max(dev, abs(overlap(want, s) - 1.0))
    return _result("bennett_maps", dev, EXACT_TOL)


def check_purify_map_grid(ns: tuple[int, ...]) -> CheckResult:
    """Engine output must match f^2/(f^2+(1-f)^2) and the success formula."""
    grid = [0.0, 0.25, 0.5, 0.55, 0.6, 0.68, 0.75, 0.8, 0.9, 0.95, 1.0]
    dev = 0.0
    for n in ns:
        if n > 3:
            continue
        for basis in BASES:
            for f in grid:
                cfg = PurifyConfig(
                    n=n, error_basis=basis, input_fidelity=f, rounds=1
                )
                out = purify_round(cfg)
                dev = max(
                    dev,
                    abs(out.success_probability - one_round_success_probability(f)),
                )
                if out.success_probability > 0:
                    dev = max(dev, abs(out.fidelity - one_round_fidelity_map(f)))
    return _result("purify_map_grid", dev, EXACT_TOL)


def check_improvement_region(ns: tuple[int, ...]) -> CheckResult:
    """One round strictly improves fidelity exactly when f > 1/2."""
    dev = 0.0
    for f in np.linspace(0.02, 0.98, 49):
        fp = one_round_fidelity_map(float(f))
        if f > 0.5 and not fp > f:
            dev = max(dev, f - fp + 1.0)
        if f < 0.5 and not fp < f:
            dev = max(dev, fp - f + 1.0)
    dev = max(dev, abs(one_round_fidelity_map(0.5) - 0.5))
    return _result("improvement_strictly_above_half", dev, EXACT_TOL)


def check_iteration_composes(ns: tuple[int, ...]) -> CheckResult:
    """Multi-round engine fidelities equal the composed one-round map."""
    dev = 0.0
    cfg = PurifyConfig(n=2, error_basis="bit", input_fidelity=0.8, rounds=3)
    outs = iterate_rounds(cfg)
    f = 0.8
    for out in outs:
        f = one_round_fidelity_map(f)
        dev = max(dev, abs(out.fidelity - f))
    return _result("iteration_composes", dev, EXACT_TOL)


def check_bitflip_correction(ns: tuple[int, ...]) -> CheckResult:
    """Both correction paths restore phi+ deterministically for every
    non-control flip position."""
    dev = 0.0
    for n in ns:
        target = make_logic_bell(n, "phi+")
        for position in range(1, n):
            model = ErrorModel(
                kind=ErrorKind.PHYS_BITFLIP,
                fidelity=0.0,
                target="A",
                position=position,
            )
            flipped = apply_error_model(Ensemble.pure(target), model, n)
            for path in ("qnd", "destructive"):
                out = correct_physical_bitflip(
                    flipped, suspected_logic_qubit="A", path=path,
                    flip_position=position,
                )
                dev = max(dev, abs(out.fidelity - 1.0))
                dev = max(dev, abs(out.success_probability - 1.0))
        clean = correct_physical_bitflip(
            Ensemble.pure(target), suspected_logic_qubit="A", path="qnd"
        )
        dev = max(dev, abs(clean.fidelity - 1.0))
    return _result("bitflip_correction_deterministic", dev, EXACT_TOL)


def check_physical_phase_is_logic_bitflip(ns: tuple[int, ...]) -> CheckResult:
    """A single-mode phase flip turns phi+ into exactly psi+, any position."""
    dev = 0.0
    for n in ns:
        target = make_logic_bell(n, "psi+")
        for logic_target in ("A", "B"):
            for position in range(n):
                model = ErrorModel(
                    kind=ErrorKind.PHYS_PHASEFLIP,
                    fidelity=0.0,
                    target=logic_target,
                    position=position,
                )
                errored = apply_error_model(
                    Ensemble.pure(make_logic_bell(n, "phi+")), model, n
                )
                for _, branch in errored.branches:
                    dev = max(dev, abs(abs(overlap(target, branch)) - 1.0))
    return _result("phase_flip_equals_logic_bitflip", dev, EXACT_TOL)


def check_logic_phaseflip_operator(ns: tuple[int, ...]) -> CheckResult:
    """X on every mode of one logic qubit turns phi+ into exactly phi-."""
    dev = 0.0
    for n in ns:
        target = make_logic_bell(n, "phi-")
        for logic_target in ("A", "B"):
            model = ErrorModel(
                kind=ErrorKind.LOGIC_PHASEFLIP, fidelity=0.0, target=logic_target
            )
            errored = apply_error_model(
                Ensemble.pure(make_logic_bell(n, "phi+")), model, n
            )
            for _, branch in errored.branches:
                dev = max(dev, abs(abs(overlap(target, branch)) - 1.0))
    return _result("logic_phaseflip_operator", dev, EXACT_TOL)


def check_oracle_round_agreement(ns: tuple[int, ...]) -> CheckResult:
    """Branch engine vs the dense density-matrix engine, n=2 full round."""
    dev = 0.0
    for basis in BASES:
        for f in (0.3, 0.68, 0.8, 0.95):
            cfg = PurifyConfig(n=2, error_basis=basis, input_fidelity=f, rounds=1)
            out = purify_round(cfg)
            p_or, f_or, dm = oracle_purify_round(2, basis, f)
            dev = max(dev, abs(out.success_probability - p_or))
            dev = max(dev, abs(out.fidelity - f_or))
            dev = max(dev, compare(out.output, dm))
    return _result("oracle_round_agreement", dev, ORACLE_TOL)


CHECK_FUNCS: list[Callable[[tuple[int, ...]], CheckResult]] = [
    check_bell_orthonormal,
    check_logic_bell_orthonormal,
    check_gates_preserve_norm,
    check_gates_self_inverse,
    check_reduction_concentrates,
    check_recovery_inverts_reduction,
    check_bennett_maps,
    check_purify_map_grid,
    check_improvement_region,
    check_iteration_composes,
    check_bitflip_correction,
    check_physical_phase_is_logic_bitflip,
    check_logic_phaseflip_operator,
]


def run_verify(max_n: int = 3, oracle: bool = False) -> list[CheckResult]:
    """Run every check for n = 2 .. max_n; oracle adds the dense cross-check."""
    if max_n < 2:
        raise ValueError("max_n must be at least 2")
    ns = tuple(range(2, max_n + 1))
    results = [func(ns) for func in CHECK_FUNCS]
    if oracle:
        results.append(check_oracle_round_agreement(ns))
    return results

"""Purification and correction procedures for logic Bell pairs.

One protocol round takes two identically prepared noisy pairs. Each copy is
first reduced: within every logic qubit the first mode controls a CNOT onto
each of the other modes, then the first mode gets a Hadamard. That leaves the
pair's Bell content on the two first modes (phi+/- and psi+/- map to their
physical counterparts) and every other mode in |0>. The two kept modes of the
first copy then control CNOTs onto the kept modes of the second copy, the
second copy's modes are measured, and runs with unequal outcomes are thrown
away. Surviving states are lifted back to logic Bell pairs by the inverse of
the reduction.

Bit-type errors (psi+ admixtures) purify directly. Phase-type errors (phi-
admixtures) are first converted to bit type by Hadamards on the kept modes
after reduction. A single physical bit flip inside one logic qubit is not
purified but corrected outright: the intra-logic CNOT fan-out is applied, the
non-control modes are measured, and a flagged mode is flipped back (or
re-prepared) before the fan-out re-entangles the block.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import RegisterError, UnsupportedInputError
from .gates import (
    OUTCOME_EPS,
    apply_cnot,
    apply_h,
    apply_x,
    discard,
    measure_ensemble,
    outcome_probability,
    reset_qubit,
)
from .noise import ErrorKind, ErrorModel, apply_error_model
from .states import (
    Ensemble,
    PureState,
    fidelity,
    make_logic_bell,
    map_branches,
    tensor_ensembles,
    with_labels,
)

Modes = tuple[tuple[str, ...], tuple[str, ...]]

BASES = ("bit", "phase")


def copy_modes(n: int, a_prefix: str = "a", b_prefix: str = "b") -> Modes:
    """Mode labels of one logic Bell pair: n for each logic qubit."""
    return (
        tuple(f"{a_prefix}{i}" for i in range(1, n + 1)),
        tuple(f"{b_prefix}{i}" for i in range(1, n + 1)),
    )


def _validate_modes(s: PureState, modes: Modes) -> None:
    a, b = modes
    if len(a) != len(b):
        raise RegisterError("logic qubits must have equal mode counts")
    if len(a) < 2:
        raise RegisterError("logic qubits need at least two modes")
    labels = list(a) + list(b)
    if len(set(labels)) != len(labels):
        raise RegisterError("copy modes overlap")
    s.register.positions(labels)


def reduce_copy(s: PureState, modes: Modes) -> PureState:
    """Concentrate one copy's Bell content onto its two first modes.

    Applies the intra-logic CNOT fan-out (first mode controls) in both logic
    qubits, then a Hadamard on each first mode. Logic phi+/- map to physical
    phi+/- on the first modes and psi+/- to psi+/-, with all other modes
    left in |0>.
    """
    _validate_modes(s, modes)
    for group in modes:
        for target in group[1:]:
            s = apply_cnot(s, group[0], target)
    for group in modes:
        s = apply_h(s, group[0])
    return s


def recover_logic(e: Ensemble, modes: Modes) -> Ensemble:
    """Inverse of reduce_copy, lifting a physical Bell pair back to a logic pair.

    Every non-first mode must be in |0>; anything else is rejected because
    the lift is only defined on reduced states.
    """
    def lift(s: PureState) -> PureState:
        _validate_modes(s, modes)
        for group in modes:
            for anc in group[1:]:
                if outcome_probability(s, anc, 1) > OUTCOME_EPS:
                    raise UnsupportedInputError(f"mode {anc!r} is not in |0>")
        for group in modes:
            s = apply_h(s, group[0])
        for group in modes:
            for target in group[1:]:
                s = apply_cnot(s, group[0], target)
        return s

    return map_branches(e, lift)


def bennett_step(
    e: Ensemble,
    kept_pair: tuple[str, str],
    sacrificed_pair: tuple[str, str],
) -> dict[tuple[int, ...], tuple[float, Ensemble]]:
    """Bilateral CNOT from the kept Bell pair onto the sacrificed one, then
    measurement of the sacrificed modes.

    Returns the outcome map of measure_ensemble keyed by (alice, bob) bits.
    """
    labels = set(kept_pair) | set(sacrificed_pair)
    if len(labels) != 4:
        raise RegisterError("kept and sacrificed pairs must use four distinct modes")
    e = map_branches(
        e,
        lambda s: apply_cnot(
            apply_cnot(s, kept_pair[0], sacrificed_pair[0]),
            kept_pair[1],
            sacrificed_pair[1],
        ),
    )
    return measure_ensemble(e, list(sacrificed_pair))


def postselect_equal(
    outcomes: dict[tuple[int, ...], tuple[float, Ensemble]]
) -> tuple[float, Ensemble]:
    """Keep the equal-outcome events (00 and 11) and renormalize.

    The merged sub-normalized ensemble carries the success probability as
    its weight sum; it is renormalized explicitly and the probability
    returned alongside. Impossible post-selection gives (0.0, empty).
    """
    sub: list[tuple[float, PureState]] = []
    for key in ((0, 0), (1, 1)):
        if key in outcomes:
            prob, ens = outcomes[key]
            sub.extend((prob * w, s) for w, s in ens.branches)
    subnorm = Ensemble(tuple(sub))
    p = subnorm.weight_sum
    if p <= OUTCOME_EPS:
        return 0.0, Ensemble(())
    return p, subnorm.scaled(1.0 / p)


def one_round_fidelity_map(f: float) -> float:
    """Post-selected fidelity after one round on a fidelity-f pair."""
    if not 0.0 <= f <= 1.0:
        raise ValueError(f"fidelity must lie in [0, 1], got {f}")
    return f**2 / (f**2 + (1.0 - f) ** 2)


def one_round_success_probability(f: float) -> float:
    """Probability that the sacrificed-pair outcomes agree."""
    if not 0.0 <= f <= 1.0:
        raise ValueError(f"fidelity must lie in [0, 1], got {f}")
    return f**2 + (1.0 - f) ** 2


@dataclass(frozen=True)
class PurifyConfig:
    """Parameters of an exact purification run."""

    n: int
    error_basis: str
    input_fidelity: float
    rounds: int = 1

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"n must be at least 2, got {self.n}")
        if self.error_basis not in BASES:
            raise ValueError(f"error_basis must be one of {BASES}")
        if not 0.0 <= self.input_fidelity <= 1.0:
            raise ValueError(f"fidelity must lie in [0, 1], got {self.input_fidelity}")
        if self.rounds < 1:
            raise ValueError(f"rounds must be at least 1, got {self.rounds}")


@dataclass(frozen=True)
class ProtocolOutcome:
    success_probability: float
    output: Ensemble
    fidelity: float
    rounds_used: int


def canonical_pair(n: int, basis: str, f: float) -> Ensemble:
    """Two-branch noisy pair: phi+ with weight f, the basis error otherwise."""
    if basis not in BASES:
        raise ValueError(f"basis must be one of {BASES}")
    good = make_logic_bell(n, "phi+")
    if f == 1.0:
        return Ensemble.pure(good)
    bad = make_logic_bell(n, "psi+" if basis == "bit" else "phi-")
    if f == 0.0:
        return Ensemble.pure(bad)
    return Ensemble(((f, good), (1.0 - f, bad)))


def _run_single_round(n: int, basis: str, pair: Ensemble) -> ProtocolOutcome:
    a, b = copy_modes(n, "a", "b")
    c, d = copy_modes(n, "c", "d")
    expected = a + b
    if pair.register.labels != expected:
        raise RegisterError(
            f"input pair must live on {expected}, got {pair.register.labels}"
        )
    second = map_branches(pair, lambda s: with_labels(s, c + d))
    system = tensor_ensembles(pair, second)
    system = map_branches(
        system, lambda s: reduce_copy(reduce_copy(s, (a, b)), (c, d))
    )
    if basis == "phase":
        for lab in (a[0], b[0], c[0], d[0]):
            system = map_branches(system, lambda s, lab=lab: apply_h(s, lab))
    outcomes = bennett_step(system, (a[0], b[0]), (c[0], d[0]))
    p, kept = postselect_equal(outcomes)
    if p == 0.0:
        return ProtocolOutcome(0.0, kept, 0.0, 1)
    kept = recover_logic(kept, (a, b))
    kept = map_branches(kept, lambda s: discard(s, c + d))
    target = make_logic_bell(n, "phi+")
    return ProtocolOutcome(p, kept, fidelity(kept, target), 1)


def iterate_rounds(
    cfg: PurifyConfig, input_pair: Ensemble | None = None
) -> list[ProtocolOutcome]:
    """Run the configured number of rounds, one outcome per round.

    Surviving pairs are assumed re-prepared i.i.d. between rounds, so each
    round starts from the canonical two-branch mixture at the previous
    round's output fidelity. A phase-basis round leaves a bit-type residual
    (the conversion Hadamards turn phi- into psi+), so later rounds always
    purify in the bit basis.
    """
    results: list[ProtocolOutcome] = []
    f = cfg.input_fidelity
    for r in range(cfg.rounds):
        basis = cfg.error_basis if r == 0 else "bit"
        if r == 0 and input_pair is not None:
            pair = input_pair
        else:
            pair = canonical_pair(cfg.n, basis, f)
        out = _run_single_round(cfg.n, basis, pair)
        out = ProtocolOutcome(
            out.success_probability, out.output, out.fidelity, r + 1
        )
        results.append(out)
        f = out.fidelity
    return results


def purify_round(
    cfg: PurifyConfig, input_pair: Ensemble | None = None
) -> ProtocolOutcome:
    """Run all configured rounds and return the final round's outcome."""
    return iterate_rounds(cfg, input_pair)[-1]


def correct_physical_bitflip(
    state: PureState | Ensemble,
    suspected_logic_qubit: str = "A",
    path: str = "qnd",
    flip_position: int | None = None,
) -> ProtocolOutcome:
    """Detect and undo a single physical bit flip inside one logic qubit.

    The first mode of the suspected logic qubit controls a CNOT onto each of
    its other modes, the non-control modes are measured, and a mode reading 1
    locates the flip. The flip is undone either by a classically controlled X
    on the flagged mode (path="qnd") or by re-preparing that mode in |0>
    (path="destructive"); both yield the same state here. The CNOT fan-out is
    then re-applied to restore the logic pair. Deterministic: no runs are
    discarded.

    A flip on the control mode itself is outside the corrected domain and is
    rejected, as is any flag pattern showing more than one flip.
    """
    if path not in ("qnd", "destructive"):
        raise ValueError(f"path must be 'qnd' or 'destructive', got {path!r}")
    if suspected_logic_qubit not in ("A", "B"):
        raise ValueError("suspected logic qubit must be 'A' or 'B'")
    e = Ensemble.pure(state) if isinstance(state, PureState) else state
    labels = e.register.labels
    if len(labels) % 2 != 0 or len(labels) < 4:
        raise RegisterError("expected a 2n-qubit logic Bell pair register")
    n = len(labels) // 2
    modes = labels[:n] if suspected_logic_qubit == "A" else labels[n:]
    if flip_position is not None:
        if flip_position == 0:
            raise UnsupportedInputError(
                "a flip on the control mode cannot be corrected by this circuit"
            )
        if not 0 < flip_position < n:
            raise RegisterError(f"flip position {flip_position} out of range for n={n}")
    control, ancillas = modes[0], modes[1:]

    def detect(s: PureState) -> PureState:
        for anc in ancillas:
            s = apply_cnot(s, control, anc)
        return s

    outcomes = measure_ensemble(map_branches(e, detect), list(ancillas))
    corrected: list[tuple[float, PureState]] = []
    for bits, (prob, ens) in outcomes.items():
        flagged = [anc for anc, bit in zip(ancillas, bits) if bit == 1]
        if len(flagged) > 1:
            raise UnsupportedInputError(
                f"flag pattern {bits} shows more than one flip"
            )
        for w, s in ens.branches:
            for anc in flagged:
                s = apply_x(s, anc) if path == "qnd" else reset_qubit(s, anc)
            for anc in ancillas:
                s = apply_cnot(s, control, anc)
            corrected.append((prob * w, s))
    output = Ensemble(tuple(corrected))
    target = with_labels(make_logic_bell(n, "phi+"), labels)
    return ProtocolOutcome(1.0, output, fidelity(output, target), 1)


@dataclass(frozen=True)
class Route:
    """Which procedure handles a given error model."""

    procedure: str
    basis: str | None


def classify_and_route(model: ErrorModel) -> Route:
    """Pick purification basis or outright correction for an error kind.

    Logic bit flips and physical phase flips act identically on phi+ (both
    turn it into psi+), so both purify in the bit basis. Logic phase flips
    purify in the phase basis. Physical bit flips are corrected directly.
    """
    if model.kind is ErrorKind.PHYS_BITFLIP:
        return Route("correct", None)
    if model.kind is ErrorKind.LOGIC_PHASEFLIP:
        return Route("purify", "phase")
    return Route("purify", "bit")


def run_routed(
    model: ErrorModel, n: int, rounds: int = 1, path: str = "qnd"
) -> ProtocolOutcome:
    """Apply the model to a fresh phi+ pair and run its routed procedure."""
    route = classify_and_route(model)
    pair = apply_error_model(
        Ensemble.pure(make_logic_bell(n, "phi+")), model, n
    )
    if route.procedure == "correct":
        return correct_physical_bitflip(
            pair,
            suspected_logic_qubit=model.target,
            path=path,
            flip_position=model.position,
        )
    cfg = PurifyConfig(
        n=n,
        error_basis=route.basis,
        input_fidelity=model.fidelity,
        rounds=rounds,
    )
    return purify_round(cfg, input_pair=pair)

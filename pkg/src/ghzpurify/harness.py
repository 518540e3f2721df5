"""Experiment harness: configs, parameter sweeps, sampling, CSV output.

Output rows are fully deterministic for a fixed config and seed. Monte Carlo
randomness is counter-based: shot i of stream s draws from a Philox generator
keyed by the seed with counter (s << 128) + (i << 64), so every shot's
randomness is a pure function of (seed, stream, shot) regardless of execution
order. The wall_time_ms CSV column is written as 0 to keep output files
byte-reproducible; actual timing goes to stderr.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .noise import ErrorKind, ErrorModel, apply_error_model
from .protocol import (
    PurifyConfig,
    canonical_pair,
    classify_and_route,
    copy_modes,
    correct_physical_bitflip,
    iterate_rounds,
    reduce_copy,
)
from .gates import apply_cnot, apply_h, discard, project
from .states import (
    Ensemble,
    PureState,
    make_logic_bell,
    overlap,
    tensor,
    with_labels,
)

CSV_COLUMNS = (
    "n",
    "error_kind",
    "round",
    "input_fidelity",
    "output_fidelity",
    "success_probability",
    "shots",
    "seed",
    "wall_time_ms",
)

ERROR_ALIASES = {
    "logic-bit": ErrorKind.LOGIC_BITFLIP,
    "logic-phase": ErrorKind.LOGIC_PHASEFLIP,
    "phys-bit": ErrorKind.PHYS_BITFLIP,
    "phys-phase": ErrorKind.PHYS_PHASEFLIP,
}
for _kind in ErrorKind:
    ERROR_ALIASES[_kind.value] = _kind

_CONFIG_KEYS = {
    "n": int,
    "error": str,
    "fidelity": float,
    "f-min": float,
    "f-max": float,
    "steps": int,
    "rounds": int,
    "shots": int,
    "seed": int,
    "oracle": bool,
    "out": str,
    "flip-position": int,
}


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


@dataclass(frozen=True)
class ResultRow:
    """One sweep point and round, as written to CSV."""

    n: int
    error_kind: str
    round: int
    input_fidelity: float
    output_fidelity: float
    success_probability: float
    shots: int
    seed: int
    wall_time_ms: float = 0.0

    def to_csv(self) -> str:
        return ",".join(
            (
                str(self.n),
                self.error_kind,
                str(self.round),
                _fmt(self.input_fidelity),
                _fmt(self.output_fidelity),
                _fmt(self.success_probability),
                str(self.shots),
                str(self.seed),
                _fmt(self.wall_time_ms),
            )
        )

    @staticmethod
    def from_csv(line: str) -> ResultRow:
        parts = line.strip().split(",")
        if len(parts) != len(CSV_COLUMNS):
            raise ValueError(f"expected {len(CSV_COLUMNS)} fields, got {len(parts)}")
        return ResultRow(
            n=int(parts[0]),
            error_kind=parts[1],
            round=int(parts[2]),
            input_fidelity=float(parts[3]),
            output_fidelity=float(parts[4]),
            success_probability=float(parts[5]),
            shots=int(parts[6]),
            seed=int(parts[7]),
            wall_time_ms=float(parts[8]),
        )


def render_csv(rows: list[ResultRow]) -> str:
    lines = [",".join(CSV_COLUMNS)]
    lines.extend(row.to_csv() for row in rows)
    return "\n".join(lines) + "\n"


def write_results(rows: list[ResultRow], out: str, config: dict) -> None:
    """Write the CSV plus a JSON sidecar holding the resolved config."""
    path = Path(out)
    path.write_text(render_csv(rows), encoding="utf-8", newline="")
    sidecar = path.with_suffix(".json")
    sidecar.write_text(
        json.dumps(config, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved parameters of one harness invocation."""

    mode: str
    n: int = 2
    error: ErrorKind = ErrorKind.LOGIC_BITFLIP
    fidelity: float | None = None
    f_min: float | None = None
    f_max: float | None = None
    steps: int | None = None
    rounds: int = 1
    shots: int = 0
    seed: int = 0
    oracle: bool = False
    out: str | None = None
    flip_position: int | None = None

    def validate(self) -> None:
        if self.mode not in ("purify", "sweep", "correct", "verify"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.n < 2:
            raise ConfigError(f"n must be at least 2, got {self.n}")
        if self.rounds < 1:
            raise ConfigError(f"rounds must be at least 1, got {self.rounds}")
        if self.shots < 0:
            raise ConfigError(f"shots must be non-negative, got {self.shots}")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        if self.fidelity is not None and not 0.0 <= self.fidelity <= 1.0:
            raise ConfigError(f"fidelity {self.fidelity} outside [0, 1]")
        if self.mode == "purify":
            if self.fidelity is None:
                raise ConfigError("purify needs --fidelity")
            if self.error is ErrorKind.PHYS_BITFLIP:
                raise ConfigError("phys-bit is handled by the correct command")
        if self.mode == "sweep":
            if self.f_min is None or self.f_max is None or self.steps is None:
                raise ConfigError("sweep needs --f-min, --f-max and --steps")
            if not 0.0 <= self.f_min <= self.f_max <= 1.0:
                raise ConfigError(
                    f"need 0 <= f-min <= f-max <= 1, got [{self.f_min}, {self.f_max}]"
                )
            if self.steps < 1:
                raise ConfigError(f"steps must be at least 1, got {self.steps}")
            if self.error is ErrorKind.PHYS_BITFLIP:
                raise ConfigError("phys-bit is handled by the correct command")
        if self.mode == "correct":
            if self.flip_position is None:
                raise ConfigError("correct needs --flip-position")
            if self.error is not ErrorKind.PHYS_BITFLIP:
                raise ConfigError("correct only handles phys-bit errors")
            if not 1 <= self.flip_position <= self.n:
                raise ConfigError(
                    f"flip-position must name a mode 1..{self.n}, got {self.flip_position}"
                )
        if self.flip_position is not None and self.flip_position > self.n:
            raise ConfigError(f"flip-position {self.flip_position} exceeds n={self.n}")

    def as_dict(self) -> dict:
        d = {}
        for f in fields(self):
            v = getattr(self, f.name)
            d[f.name] = v.value if isinstance(v, ErrorKind) else v
        return d


def parse_config_file(path: str) -> dict:
    """Read flat `key = value` lines; '#' starts a comment, blanks skipped."""
    values: dict = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        caster = _CONFIG_KEYS[key]
        try:
            if caster is bool:
                if val.lower() in ("1", "true", "yes", "on"):
                    parsed = True
                elif val.lower() in ("0", "false", "no", "off"):
                    parsed = False
                else:
                    raise ValueError(val)
            else:
                parsed = caster(val)
        except ValueError:
            raise ConfigError(f"{path}:{lineno}: bad value {val!r} for {key}") from None
        values[key] = parsed
    return values


def resolve_config(mode: str, flag_values: dict, config_path: str | None) -> ExperimentConfig:
    """Merge config-file values with flags; explicitly given flags win."""
    merged: dict = {}
    if config_path is not None:
        merged.update(parse_config_file(config_path))
    for key, val in flag_values.items():
        if val is not None:
            merged[key] = val
    if "error" in merged:
        name = str(merged["error"])
        if name not in ERROR_ALIASES:
            raise ConfigError(f"unknown error kind {name!r}")
        merged["error"] = ERROR_ALIASES[name]
    kwargs = {k.replace("-", "_"): v for k, v in merged.items()}
    try:
        cfg = ExperimentConfig(mode=mode, **kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    cfg.validate()
    return cfg


def shot_rng(seed: int, stream: int, shot: int) -> np.random.Generator:
    """Counter-based per-shot generator; see the module docstring."""
    counter = (stream << 128) + (shot << 64)
    return np.random.Generator(np.random.Philox(key=seed, counter=counter))


@dataclass(frozen=True)
class SampleEstimate:
    success_probability: float
    fidelity: float
    kept_shots: int
    shots: int


def _shot_tables(n: int, basis: str) -> list[tuple[np.ndarray, list[bool], list[float]]]:
    """Per branch combination: outcome CDF, keep flags, kept-state fidelity.

    Branch combinations are indexed 2*s1 + s2 with s = 0 for the clean state
    and 1 for the errored one. Outcomes are indexed 2*o1 + o2.
    """
    a, b = copy_modes(n, "a", "b")
    c, d = copy_modes(n, "c", "d")
    clean = canonical_pair(n, basis, 1.0).branches[0][1]
    errored = canonical_pair(n, basis, 0.0).branches[0][1]
    states = (clean, errored)
    target = make_logic_bell(n, "phi+")
    tables = []
    for s1 in (0, 1):
        for s2 in (0, 1):
            two = tensor(states[s1], with_labels(states[s2], c + d))
            two = reduce_copy(reduce_copy(two, (a, b)), (c, d))
            if basis == "phase":
                for lab in (a[0], b[0], c[0], d[0]):
                    two = apply_h(two, lab)
            two = apply_cnot(two, a[0], c[0])
            two = apply_cnot(two, b[0], d[0])
            probs, keeps, fids = [], [], []
            for o1 in (0, 1):
                p1, after1 = project(two, c[0], o1)
                for o2 in (0, 1):
                    if after1 is None:
                        probs.append(0.0)
                        keeps.append(False)
                        fids.append(0.0)
                        continue
                    p2, after2 = project(after1, d[0], o2)
                    keep = o1 == o2
                    probs.append(p1 * p2)
                    keeps.append(keep)
                    if keep and after2 is not None:
                        lifted = apply_h(after2, a[0])
                        lifted = apply_h(lifted, b[0])
                        for k in range(1, n):
                            lifted = apply_cnot(lifted, a[0], a[k])
                            lifted = apply_cnot(lifted, b[0], b[k])
                        fids.append(abs(_overlap_on_kept(lifted, target)) ** 2)
                    else:
                        fids.append(0.0)
            tables.append((np.cumsum(probs), keeps, fids))
    return tables


def _overlap_on_kept(s: PureState, target: PureState) -> complex:
    """Overlap with the target after dropping the measured sacrificed modes."""
    trimmed = discard(
        s, [lab for lab in s.register.labels if lab not in target.register.labels]
    )
    return overlap(target, trimmed)


def sample_purify(
    n: int, basis: str, f: float, shots: int, seed: int, stream: int = 0
) -> SampleEstimate:
    """Monte Carlo estimate of one round's success probability and fidelity.

    Each shot draws both copies' branches, then the sacrificed-pair outcome,
    and keeps the shot when the outcomes agree.
    """
    if shots < 1:
        raise ValueError("sampling needs at least one shot")
    tables = _shot_tables(n, basis)
    kept = 0
    fid_sum = 0.0
    for i in range(shots):
        u = shot_rng(seed, stream, i).random(3)
        s1 = 0 if u[0] < f else 1
        s2 = 0 if u[1] < f else 1
        cdf, keeps, fids = tables[2 * s1 + s2]
        outcome = int(np.searchsorted(cdf, u[2] * cdf[-1], side="right"))
        outcome = min(outcome, 3)
        if keeps[outcome]:
            kept += 1
            fid_sum += fids[outcome]
    p_hat = kept / shots
    f_hat = fid_sum / kept if kept else math.nan
    return SampleEstimate(p_hat, f_hat, kept, shots)


def _purify_input(cfg: ExperimentConfig, f: float) -> tuple[str, Ensemble]:
    """Round-1 basis and input ensemble for the configured error kind."""
    position = None
    if cfg.error.is_physical or cfg.flip_position is not None:
        position = (cfg.flip_position - 1) if cfg.flip_position is not None else 0
    model = ErrorModel(kind=cfg.error, fidelity=f, target="B", position=position)
    route = classify_and_route(model)
    pair = apply_error_model(
        Ensemble.pure(make_logic_bell(cfg.n, "phi+")), model, cfg.n
    )
    return route.basis, pair


def run_purify(cfg: ExperimentConfig) -> list[ResultRow]:
    return _sweep_rows(cfg, [cfg.fidelity])


def run_sweep(cfg: ExperimentConfig) -> list[ResultRow]:
    grid = [float(x) for x in np.linspace(cfg.f_min, cfg.f_max, cfg.steps)]
    return _sweep_rows(cfg, grid)


def _sweep_rows(cfg: ExperimentConfig, grid: list[float]) -> list[ResultRow]:
    rows: list[ResultRow] = []
    stream = 0
    for f in grid:
        if cfg.shots == 0:
            basis, pair = _purify_input(cfg, f)
            pcfg = PurifyConfig(
                n=cfg.n, error_basis=basis, input_fidelity=f, rounds=cfg.rounds
            )
            outs = iterate_rounds(pcfg, input_pair=pair)
            f_in = f
            for r, out in enumerate(outs, start=1):
                rows.append(
                    ResultRow(
                        n=cfg.n,
                        error_kind=cfg.error.value,
                        round=r,
                        input_fidelity=f_in,
                        output_fidelity=out.fidelity,
                        success_probability=out.success_probability,
                        shots=0,
                        seed=cfg.seed,
                    )
                )
                f_in = out.fidelity
        else:
            basis, _ = _purify_input(cfg, f)
            f_in = f
            for r in range(1, cfg.rounds + 1):
                round_basis = basis if r == 1 else "bit"
                est = sample_purify(
                    cfg.n, round_basis, f_in, cfg.shots, cfg.seed, stream
                )
                stream += 1
                rows.append(
                    ResultRow(
                        n=cfg.n,
                        error_kind=cfg.error.value,
                        round=r,
                        input_fidelity=f_in,
                        output_fidelity=est.fidelity,
                        success_probability=est.success_probability,
                        shots=cfg.shots,
                        seed=cfg.seed,
                    )
                )
                f_in = est.fidelity
    return rows


def run_correct(cfg: ExperimentConfig) -> list[ResultRow]:
    """Build the flipped pair and run the deterministic correction circuit.

    With --fidelity the input is the two-branch mixture at that fidelity;
    without it the definite single-flip state is used. Correction is exact
    and deterministic, so rows always carry shots = 0.
    """
    f = 0.0 if cfg.fidelity is None else cfg.fidelity
    position = cfg.flip_position - 1
    model = ErrorModel(
        kind=ErrorKind.PHYS_BITFLIP, fidelity=f, target="A", position=position
    )
    pair = apply_error_model(
        Ensemble.pure(make_logic_bell(cfg.n, "phi+")), model, cfg.n
    )
    outcome = correct_physical_bitflip(
        pair, suspected_logic_qubit="A", path="qnd", flip_position=position
    )
    row = ResultRow(
        n=cfg.n,
        error_kind=cfg.error.value,
        round=1,
        input_fidelity=f,
        output_fidelity=outcome.fidelity,
        success_probability=outcome.success_probability,
        shots=0,
        seed=cfg.seed,
    )
    return [row]

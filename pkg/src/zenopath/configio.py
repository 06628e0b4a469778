"""Instance/experiment file parsing and report serialization.

Files are TOML. An instance file has an [instance] table selecting either a
generator family (rotating-projector, stabilizer-path, sat-projector,
random-ff) or family = "explicit" with endpoint Hamiltonians spelled out
term by term. An experiment file adds [protocol] and [outputs] tables whose
field names mirror the corresponding dataclasses.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import ConfigError
from .hamiltonians import (
    FrustrationFreeHamiltonian,
    FrustrationFreeReport,
    InterpolationPath,
    LocalTerm,
)
from .instances import InstanceSpec, parse_dimacs, pauli_string_matrix, sat_projector_instance
from .measurement import RepetitionPolicy
from .protocol import ProtocolConfig, ProtocolReport
from .schedule import GapPoint, ScheduleAnalysis
from .spectral import HermitianOperator

FORMATS = ("json", "csv")


def load_toml(path: str | Path) -> dict:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"{path}: file not found") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _require(table: dict, key: str, context: str) -> Any:
    if key not in table:
        raise ConfigError(f"missing field {context}.{key}")
    return table[key]


def _parse_term(table: dict, index: int) -> LocalTerm:
    context = f"terms[{index}]"
    support = tuple(int(q) for q in _require(table, "support", context))
    weight = float(_require(table, "weight", context))
    generator = _require(table, "generator", context)
    if generator == "pauli-projector":
        string = _require(table, "pauli", context)
        if len(string) != len(support):
            raise ConfigError(f"{context}: pauli string length != support size")
        mat = (np.eye(2 ** len(support)) - pauli_string_matrix(string)) / 2
    elif generator == "computational-projector":
        bits = str(_require(table, "bits", context))
        if len(bits) != len(support) or set(bits) - {"0", "1"}:
            raise ConfigError(f"{context}: bits must be a 0/1 string matching the support size")
        idx = int(bits, 2)
        mat = np.zeros((2 ** len(support), 2 ** len(support)), dtype=complex)
        mat[idx, idx] = 1.0
    elif generator == "matrix":
        real = np.array(_require(table, "real", context), dtype=float)
        imag_raw = table.get("imag")
        imag = np.zeros_like(real) if imag_raw is None else np.array(imag_raw, dtype=float)
        if real.shape != imag.shape:
            raise ConfigError(f"{context}: real and imag shapes differ")
        mat = real + 1j * imag
    else:
        raise ConfigError(
            f"{context}: unknown generator {generator!r}; expected "
            "pauli-projector, computational-projector, or matrix"
        )
    try:
        return LocalTerm(support, HermitianOperator(mat), weight)
    except Exception as exc:
        raise ConfigError(f"{context}: {exc}") from exc


def parse_hamiltonian_table(table: dict, context: str) -> FrustrationFreeHamiltonian:
    n_qubits = int(_require(table, "n_qubits", context))
    raw_terms = _require(table, "terms", context)
    if not isinstance(raw_terms, list) or not raw_terms:
        raise ConfigError(f"{context}.terms must be a non-empty array of tables")
    terms = [_parse_term(t, i) for i, t in enumerate(raw_terms)]
    try:
        return FrustrationFreeHamiltonian(n_qubits, terms)
    except Exception as exc:
        raise ConfigError(f"{context}: {exc}") from exc


def parse_instance(
    table: dict, base_dir: Path
) -> InterpolationPath | FrustrationFreeHamiltonian:
    """Build the object described by an [instance] table."""
    family = _require(table, "family", "instance")
    if family == "explicit":
        if "hamiltonian" in table:
            return parse_hamiltonian_table(table["hamiltonian"], "instance.hamiltonian")
        kind = table.get("path_kind", "linear")
        if kind != "linear":
            raise ConfigError(f"instance.path_kind: only 'linear' is supported, got {kind!r}")
        initial = parse_hamiltonian_table(
            _require(table, "initial", "instance"), "instance.initial"
        )
        final = parse_hamiltonian_table(_require(table, "final", "instance"), "instance.final")
        try:
            return InterpolationPath.linear(initial, final)
        except Exception as exc:
            raise ConfigError(f"instance: {exc}") from exc

    if family == "sat-projector" and "dimacs" in table:
        dimacs_path = base_dir / str(table["dimacs"])
        try:
            clauses, n_vars = parse_dimacs(dimacs_path.read_text())
        except FileNotFoundError as exc:
            raise ConfigError(f"instance.dimacs: {dimacs_path} not found") from exc
        except ValueError as exc:
            raise ConfigError(f"instance.dimacs: {exc}") from exc
        return sat_projector_instance(clauses, n_vars)

    parameters = {k: v for k, v in table.items() if k not in ("family", "seed")}
    if family == "sat-projector" and "clauses" in parameters:
        parameters["clauses"] = _signed_clauses(parameters["clauses"])
    try:
        spec = InstanceSpec(family, parameters, seed=int(table.get("seed", 0)))
        return spec.build()
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"instance: {exc}") from exc


def _signed_clauses(raw) -> list:
    """DIMACS-style signed 1-based literal lists to (variables, negation) clauses."""
    clauses = []
    for i, lits in enumerate(raw):
        try:
            lits = [int(l) for l in lits]
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"instance.clauses[{i}]: literals must be integers") from exc
        if any(l == 0 for l in lits):
            raise ConfigError(f"instance.clauses[{i}]: literal 0 is not allowed")
        clauses.append((tuple(abs(l) - 1 for l in lits), tuple(l < 0 for l in lits)))
    return clauses


def parse_repetition(table: dict) -> RepetitionPolicy:
    mode = _require(table, "mode", "protocol.repetition")
    try:
        if mode == "fixed-k":
            return RepetitionPolicy.fixed(
                int(_require(table, "k", "protocol.repetition")),
                k_max=int(table["k_max"]) if "k_max" in table else None,
            )
        if mode == "adaptive":
            target = table.get("target_distance")
            return RepetitionPolicy.adaptive(
                alpha=float(_require(table, "alpha", "protocol.repetition")),
                target_distance=None if target is None else float(target),
                k_max=int(table.get("k_max", 100_000)),
            )
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"protocol.repetition: {exc}") from exc
    raise ConfigError(f"protocol.repetition.mode: unknown mode {mode!r}")


def parse_protocol(table: dict, path: InterpolationPath) -> ProtocolConfig:
    known = {
        "epsilon",
        "delta",
        "N",
        "trajectories",
        "seed",
        "mode",
        "degeneracy_tol",
        "ff_tol",
        "enforce_frustration_free",
        "repetition",
    }
    unknown = set(table) - known
    if unknown:
        raise ConfigError(f"protocol: unknown fields {sorted(unknown)}")
    repetition = parse_repetition(table["repetition"]) if "repetition" in table else None
    try:
        return ProtocolConfig(
            path=path,
            epsilon=float(_require(table, "epsilon", "protocol")),
            delta=float(table.get("delta", 0.0)),
            N=int(table["N"]) if "N" in table else None,
            repetition=repetition,
            trajectories=int(table.get("trajectories", 0)),
            seed=int(table.get("seed", 0)),
            mode=str(table.get("mode", "exact-channel")),
            degeneracy_tol=float(table.get("degeneracy_tol", 1e-10)),
            ff_tol=float(table.get("ff_tol", 1e-9)),
            enforce_frustration_free=bool(table.get("enforce_frustration_free", True)),
        )
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"protocol: {exc}") from exc


@dataclass(frozen=True)
class ExperimentConfig:
    """Parsed experiment file: instance + protocol + output options."""

    instance: InterpolationPath | FrustrationFreeHamiltonian
    protocol_table: dict
    output_dir: Path
    formats: tuple[str, ...]
    verbosity: int = 0


def parse_experiment(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    data = load_toml(path)
    if "instance" not in data:
        raise ConfigError(f"{path}: missing [instance] table")
    instance = parse_instance(data["instance"], path.parent)
    outputs = data.get("outputs", {})
    formats = tuple(outputs.get("formats", ["json", "csv"]))
    bad = set(formats) - set(FORMATS)
    if bad:
        raise ConfigError(f"outputs.formats: unknown formats {sorted(bad)}")
    return ExperimentConfig(
        instance=instance,
        protocol_table=data.get("protocol", {}),
        output_dir=Path(outputs.get("directory", ".")),
        formats=formats,
        verbosity=int(outputs.get("verbosity", 0)),
    )


def as_constant_path(h: FrustrationFreeHamiltonian) -> InterpolationPath:
    """Wrap a single Hamiltonian as the constant path H -> H."""
    return InterpolationPath.linear(h, h)


def schedule_csv(analysis: ScheduleAnalysis) -> str:
    lines = ["n,s,gap,delta_norm,ratio"]
    for r in analysis.per_step:
        lines.append(f"{r.n},{r.s!r},{r.gap!r},{r.delta_norm!r},{r.ratio!r}")
    return "\n".join(lines) + "\n"


def per_step_csv(report: ProtocolReport) -> str:
    lines = ["n,p_n,epsilon_n,bound_epsilon_n,overlap_after,k_used,distance_to_ground"]
    for r in report.per_step:
        lines.append(
            f"{r.n},{r.p_n!r},{r.epsilon_n!r},{r.bound_epsilon_n!r},"
            f"{r.overlap_after!r},{r.k_used},{r.distance_to_ground!r}"
        )
    return "\n".join(lines) + "\n"


def gap_profile_csv(points: Sequence[GapPoint]) -> str:
    lines = ["s,gap,ground_energy"]
    for p in points:
        gap = "nan" if p.gap is None else repr(p.gap)
        lines.append(f"{p.s!r},{gap},{p.ground_energy!r}")
    return "\n".join(lines) + "\n"


def report_json(report: ProtocolReport, timestamp: str) -> str:
    """Full report as JSON; the timestamp is the only run-dependent field."""
    return json.dumps({"timestamp": timestamp, "report": report.to_dict()}, indent=2) + "\n"


def ff_report_json(report: FrustrationFreeReport) -> str:
    return json.dumps(report.to_dict(), indent=2) + "\n"

"""Instance generators: Hamiltonian families with known analytic structure.

Four families ship as fixtures and benchmarks:
  * rotating-projector: one qubit, a rank-1 projector rotating in the Z-X
    plane; frustration-free at every s with gap exactly 1.
  * stabilizer-path: linear interpolation between two commuting-Pauli
    Hamiltonians; terms are projectors, so measurements are projective.
    Mid-path frustration-freeness is checked, never assumed.
  * sat-projector: one rank-1 computational projector per CNF clause, onto
    the clause's unique violating assignment.
  * random-ff: random local PSD terms built to annihilate a planted product
    state, giving certified frustration-free fixtures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

import numpy as np

from .errors import (
    ConstructionFailed,
    DependentGenerators,
    NonCommutingGenerators,
    UnsatisfiableInstance,
)
from .hamiltonians import (
    FrustrationFreeHamiltonian,
    InterpolationPath,
    LocalTerm,
    normalize_term,
    verify_frustration_free,
)
from .spectral import HermitianOperator

_PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

FAMILIES = ("rotating-projector", "stabilizer-path", "sat-projector", "random-ff")

Clause = tuple[tuple[int, ...], tuple[bool, ...]]


def pauli_string_matrix(string: str) -> np.ndarray:
    """Dense matrix of a Pauli string, first character on qubit 0 (most significant)."""
    if not string or any(c not in _PAULI_MATRICES for c in string):
        raise ValueError(f"invalid Pauli string {string!r}")
    out = _PAULI_MATRICES[string[0]]
    for c in string[1:]:
        out = np.kron(out, _PAULI_MATRICES[c])
    return out


def _symplectic_bits(string: str) -> np.ndarray:
    """GF(2) representation (x bits | z bits) of a Pauli string."""
    x = [1 if c in "XY" else 0 for c in string]
    z = [1 if c in "ZY" else 0 for c in string]
    return np.array(x + z, dtype=np.uint8)


def _strings_commute(a: str, b: str) -> bool:
    va, vb = _symplectic_bits(a), _symplectic_bits(b)
    n = len(a)
    sym = int(np.dot(va[:n], vb[n:]) + np.dot(va[n:], vb[:n]))
    return sym % 2 == 0


def _gf2_rank(rows: np.ndarray) -> int:
    m = rows.copy().astype(np.uint8)
    rank = 0
    n_rows, n_cols = m.shape
    for col in range(n_cols):
        pivot = None
        for r in range(rank, n_rows):
            if m[r, col]:
                pivot = r
                break
        if pivot is None:
            continue
        m[[rank, pivot]] = m[[pivot, rank]]
        for r in range(n_rows):
            if r != rank and m[r, col]:
                m[r] ^= m[rank]
        rank += 1
        if rank == n_rows:
            break
    return rank


def _validate_generators(generators: Sequence[str], n_qubits: int) -> None:
    for g in generators:
        if len(g) != n_qubits:
            raise ValueError(f"generator {g!r} does not have {n_qubits} characters")
        if set(g) <= {"I"}:
            raise DependentGenerators("identity string is not an admissible generator")
    for i, a in enumerate(generators):
        for b in generators[i + 1 :]:
            if not _strings_commute(a, b):
                raise NonCommutingGenerators(f"{a!r} and {b!r} anticommute")
    rows = np.array([_symplectic_bits(g) for g in generators], dtype=np.uint8)
    if _gf2_rank(rows) != len(generators):
        raise DependentGenerators("generator set is linearly dependent over GF(2)")


def _stabilizer_hamiltonian(generators: Sequence[str], n_qubits: int) -> FrustrationFreeHamiltonian:
    weight = 1.0 / len(generators)
    terms = []
    for g in generators:
        support = tuple(q for q, c in enumerate(g) if c != "I")
        local = pauli_string_matrix("".join(g[q] for q in support))
        op = HermitianOperator((np.eye(local.shape[0]) - local) / 2)
        terms.append(LocalTerm(support, op, weight))
    h = FrustrationFreeHamiltonian(n_qubits, terms)
    h._mark_frustration_free(True)  # commuting independent generators always share a +1 eigenspace
    return h


def rotating_ground_state(theta: float) -> np.ndarray:
    """Closed-form ground vector cos(theta)|0> + sin(theta)|1> of the rotating projector."""
    return np.array([math.cos(theta), math.sin(theta)], dtype=complex)


def _rotating_hamiltonian(theta: float) -> FrustrationFreeHamiltonian:
    excited = np.array([-math.sin(theta), math.cos(theta)], dtype=complex)
    op = HermitianOperator(np.outer(excited, excited.conj()))
    h = FrustrationFreeHamiltonian(1, [LocalTerm((0,), op, 1.0)])
    h._mark_frustration_free(True)
    return h


def rotating_projector_path(total_angle: float) -> InterpolationPath:
    """Rank-1 projector rotating by total_angle in the Z-X plane.

    H(s) projects onto the direction at angle s * total_angle from |1>; the
    ground state rotates from |0> accordingly. Gap is 1 at every s.
    """
    if not 0 < total_angle <= math.pi / 2 + 1e-12:
        raise ValueError(f"total_angle must lie in (0, pi/2], got {total_angle}")

    def sampler(s: float) -> FrustrationFreeHamiltonian:
        return _rotating_hamiltonian(s * total_angle)

    return InterpolationPath.from_sampler(
        _rotating_hamiltonian(0.0), _rotating_hamiltonian(total_angle), sampler
    )


def stabilizer_path(
    generators_initial: Sequence[str],
    generators_final: Sequence[str],
    n_qubits: int,
    ff_samples: int = 33,
) -> InterpolationPath:
    """Linear path between two stabilizer Hamiltonians, terms (I - S)/2.

    Endpoints are frustration-free by construction. The interior usually is
    not when the generator groups fail to commute with each other, so a grid
    report is attached to the returned path instead of being assumed.
    """
    if not generators_initial or not generators_final:
        raise ValueError("both generator lists must be non-empty")
    _validate_generators(generators_initial, n_qubits)
    _validate_generators(generators_final, n_qubits)
    path = InterpolationPath.linear(
        _stabilizer_hamiltonian(generators_initial, n_qubits),
        _stabilizer_hamiltonian(generators_final, n_qubits),
    )
    path.ff_report = verify_frustration_free(path, n_samples=ff_samples)
    return path


def _normalize_clause(clause) -> Clause:
    variables, negated = clause
    variables = tuple(int(v) for v in variables)
    negated = tuple(bool(b) for b in negated)
    if len(variables) != len(negated):
        raise ValueError(f"clause {clause!r}: variables and negation mask differ in length")
    if not 1 <= len(variables) <= 3:
        raise ValueError(f"clause {clause!r}: only 1 to 3 literals are supported")
    if len(set(variables)) != len(variables):
        raise ValueError(f"clause {clause!r}: repeated variable")
    return variables, negated


def count_satisfying(clauses: Sequence[Clause], n_vars: int) -> int:
    """Number of satisfying assignments, by vectorized enumeration (n_vars <= 20)."""
    if n_vars > 20:
        raise ValueError("brute-force enumeration is capped at 20 variables")
    idx = np.arange(2**n_vars, dtype=np.int64)
    ok = np.ones(2**n_vars, dtype=bool)
    for variables, negated in clauses:
        violated = np.ones(2**n_vars, dtype=bool)
        for v, neg in zip(variables, negated):
            bit = (idx >> (n_vars - 1 - v)) & 1  # variable 0 is the most significant bit
            violated &= bit == (1 if neg else 0)
        ok &= ~violated
    return int(np.count_nonzero(ok))


def sat_projector_instance(
    clauses: Sequence, n_vars: int, require_satisfiable: bool = False
) -> FrustrationFreeHamiltonian:
    """CNF encoded as uniform-weight projectors onto violating assignments.

    Each clause contributes the rank-1 computational projector onto the one
    local assignment that falsifies all its literals, so the ground space is
    exactly the span of satisfying assignments and the instance is
    frustration-free iff the formula is satisfiable. Satisfiability is checked
    by brute force; an unsatisfiable formula is returned flagged unless
    require_satisfiable is set.
    """
    if n_vars < 1:
        raise ValueError("n_vars must be >= 1")
    normalized = [_normalize_clause(c) for c in clauses]
    if not normalized:
        raise ValueError("at least one clause is required")
    for variables, _ in normalized:
        if any(v < 0 or v >= n_vars for v in variables):
            raise ValueError(f"clause variables {variables} outside 0..{n_vars - 1}")
    weight = 1.0 / len(normalized)
    terms = []
    for variables, negated in normalized:
        k = len(variables)
        violating = 0
        for j, neg in enumerate(negated):
            if neg:
                violating |= 1 << (k - 1 - j)
        mat = np.zeros((2**k, 2**k), dtype=complex)
        mat[violating, violating] = 1.0
        terms.append(LocalTerm(tuple(variables), HermitianOperator(mat), weight))
    n_solutions = count_satisfying(normalized, n_vars)
    h = FrustrationFreeHamiltonian(
        n_vars,
        terms,
        metadata={"satisfying_count": n_solutions, "clauses": tuple(normalized)},
    )
    h._mark_frustration_free(n_solutions > 0)
    if n_solutions == 0 and require_satisfiable:
        raise UnsatisfiableInstance("formula has no satisfying assignment")
    return h


def parse_dimacs(text: str) -> tuple[list[Clause], int]:
    """DIMACS CNF to clause list; 1-based signed literals, negatives negated."""
    n_vars = None
    clauses: list[Clause] = []
    pending: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"line {lineno}: malformed problem line {line!r}")
            n_vars = int(parts[2])
            continue
        for token in line.split():
            lit = int(token)
            if lit == 0:
                if pending:
                    variables = tuple(abs(l) - 1 for l in pending)
                    negated = tuple(l < 0 for l in pending)
                    clauses.append((variables, negated))
                    pending = []
            else:
                pending.append(lit)
    if pending:
        variables = tuple(abs(l) - 1 for l in pending)
        clauses.append((variables, tuple(l < 0 for l in pending)))
    if n_vars is None:
        raise ValueError("missing 'p cnf' problem line")
    return clauses, n_vars


def _random_single_qubit_states(rng: np.random.Generator, n: int) -> list[np.ndarray]:
    states = []
    for _ in range(n):
        z = rng.normal(size=2) + 1j * rng.normal(size=2)
        states.append(z / np.linalg.norm(z))
    return states


def random_ff_instance(
    n_qubits: int, m_terms: int, seed: int, max_retries: int = 50
) -> FrustrationFreeHamiltonian:
    """Random frustration-free fixture with a planted product ground state.

    A random product state |phi> is drawn, and each term is a random local PSD
    operator conjugated by the projector orthogonal to |phi>'s factor on the
    term's support, so every term annihilates |phi> by construction. The
    planted vector is stored under metadata["planted_state"]; ground-energy
    and termwise annihilation are re-verified numerically before returning.
    """
    if not 1 <= n_qubits <= 4:
        raise ValueError("random fixtures are limited to 1..4 qubits")
    if m_terms < 1:
        raise ValueError("m_terms must be >= 1")
    rng = np.random.default_rng(seed)
    factors = _random_single_qubit_states(rng, n_qubits)
    planted = factors[0]
    for f in factors[1:]:
        planted = np.kron(planted, f)

    raw_weights = rng.uniform(0.5, 1.5, size=m_terms)
    weights = raw_weights / raw_weights.sum()

    terms = []
    for w in weights:
        for attempt in range(max_retries + 1):
            k = int(rng.integers(1, min(3, n_qubits) + 1))
            support = tuple(sorted(int(q) for q in rng.choice(n_qubits, size=k, replace=False)))
            local_planted = factors[support[0]]
            for q in support[1:]:
                local_planted = np.kron(local_planted, factors[q])
            q_proj = np.eye(2**k) - np.outer(local_planted, local_planted.conj())
            a = rng.normal(size=(2**k, 2**k)) + 1j * rng.normal(size=(2**k, 2**k))
            candidate = q_proj @ (a @ a.conj().T) @ q_proj
            op = HermitianOperator((candidate + candidate.conj().T) / 2)
            if op.max_eigenvalue > 1e-8:
                terms.append(LocalTerm(support, normalize_term(op), float(w)))
                break
        else:
            raise ConstructionFailed(f"no usable term after {max_retries} retries")

    h = FrustrationFreeHamiltonian(n_qubits, terms, metadata={"planted_state": planted})
    if h.ground_energy() > 1e-10:
        raise ConstructionFailed(f"ground energy {h.ground_energy():.3e} above 1e-10")
    for t in terms:
        residual = float(np.linalg.norm(t.embedded(n_qubits) @ planted))
        if residual > 1e-10:
            raise ConstructionFailed(f"term on {t.support} fails to annihilate the planted state")
    h._mark_frustration_free(True)
    return h


@dataclass(frozen=True)
class InstanceSpec:
    """Declarative description of a generated instance (family + parameters)."""

    family: str
    parameters: Mapping[str, Any]
    seed: int = 0

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        object.__setattr__(self, "parameters", dict(self.parameters))
        required = {
            "rotating-projector": {"total_angle"},
            "stabilizer-path": {"generators_initial", "generators_final", "n_qubits"},
            "sat-projector": {"clauses", "n_vars"},
            "random-ff": {"n_qubits", "m_terms"},
        }[self.family]
        missing = required - set(self.parameters)
        if missing:
            raise ValueError(f"family {self.family!r} missing parameters {sorted(missing)}")

    def build(self) -> InterpolationPath | FrustrationFreeHamiltonian:
        p = self.parameters
        if self.family == "rotating-projector":
            return rotating_projector_path(float(p["total_angle"]))
        if self.family == "stabilizer-path":
            return stabilizer_path(
                list(p["generators_initial"]),
                list(p["generators_final"]),
                int(p["n_qubits"]),
                ff_samples=int(p.get("ff_samples", 33)),
            )
        if self.family == "sat-projector":
            return sat_projector_instance(
                list(p["clauses"]),
                int(p["n_vars"]),
                require_satisfiable=bool(p.get("require_satisfiable", False)),
            )
        return random_ff_instance(int(p["n_qubits"]), int(p["m_terms"]), int(self.seed))

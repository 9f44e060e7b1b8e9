"""Conservation laws and inequalities tying entanglement to discord.

A law is a relation (equality or inequality) between two sums of correlation
terms evaluated on a multipartite pure state. The catalog holds the fixed
named laws; generators build the arbitrary-N cycle, discord, and one-measured
families. certify() proves equality laws symbolically by telescoping
purification identities; evaluate() measures both sides numerically.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Iterable

from .hilbert import (
    InvalidPartitionError,
    PureState,
    conditional_entropy,
    mutual_information,
    partial_trace,
    reduced_state,
    subsystem_set,
    von_neumann_entropy,
)
from .measures import (
    TOL_LARGE_CONVEX_ROOF,
    TOL_SINGLE_OPTIMIZER,
    TOL_STACKED_OPTIMIZERS,
    OptimizerConfig,
    classical_correlation,
    ef_convex_roof,
    ef_pure,
    ef_two_qubit,
)
from .states import derive_seed

__all__ = [
    "TERM_KINDS",
    "CorrelationTerm",
    "LawSpec",
    "Certificate",
    "CertificationError",
    "TermValue",
    "EvalReport",
    "catalog",
    "law_by_name",
    "resolve_laws",
    "gen_odd_cycle_law",
    "gen_even_cycle_law",
    "gen_discord_law",
    "gen_one_measured_law",
    "certify",
    "default_tolerance",
    "evaluate",
    "evaluate_term",
    "relabel_law",
    "laws_equivalent",
]

TERM_KINDS = ("EF", "Discord", "ClassicalCorr", "Entropy", "CondEntropy")

_SYMBOL = {
    "EF": "E",
    "Discord": "D",
    "ClassicalCorr": "J",
    "Entropy": "S",
    "CondEntropy": "S",
}

_RELATION_SYMBOL = {"Eq": "=", "Le": "<=", "Ge": ">="}

_PURITY_ATOL = 1e-12


class CertificationError(Exception):
    """A law's terms do not telescope to a pure-entropy residue."""


def _fmt(indices: tuple[int, ...]) -> str:
    return ",".join(str(i) for i in indices)


@dataclass(frozen=True)
class CorrelationTerm:
    """One summand of a law.

    ``other`` is the second side of the bipartition for EF, the measured side
    for Discord/ClassicalCorr (the arrow points from ``other`` to ``target``),
    and the conditioning side for CondEntropy; empty for plain Entropy.
    """

    kind: str
    target: tuple[int, ...]
    other: tuple[int, ...] = ()
    coefficient: int = 1

    def __post_init__(self) -> None:
        if self.kind not in TERM_KINDS:
            raise ValueError(f"unknown term kind {self.kind!r}")
        target = tuple(sorted(int(i) for i in self.target))
        other = tuple(sorted(int(i) for i in self.other))
        if not target:
            raise ValueError("term target must be non-empty")
        if self.kind == "Entropy":
            if other:
                raise ValueError("Entropy terms take no second subsystem set")
        elif not other:
            raise ValueError(f"{self.kind} terms need a non-empty second set")
        if set(target) & set(other):
            raise ValueError(f"target {target} and other {other} overlap")
        if self.coefficient == 0:
            raise ValueError("coefficient must be nonzero")
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "other", other)
        object.__setattr__(self, "coefficient", int(self.coefficient))

    def text(self) -> str:
        body = _fmt(self.target)
        if self.kind != "Entropy":
            body += "|" + _fmt(self.other)
        base = f"{_SYMBOL[self.kind]}({body})"
        if self.coefficient == 1:
            return base
        if self.coefficient == -1:
            return f"-{base}"
        return f"{self.coefficient}*{base}"


@dataclass(frozen=True)
class LawSpec:
    """Named relation between two sums of correlation terms on n parties."""

    name: str
    n_parties: int
    relation: str  # Eq | Le | Ge
    lhs: tuple[CorrelationTerm, ...]
    rhs: tuple[CorrelationTerm, ...]

    def __post_init__(self) -> None:
        if self.relation not in _RELATION_SYMBOL:
            raise ValueError(f"unknown relation {self.relation!r}")
        lhs = tuple(self.lhs)
        rhs = tuple(self.rhs)
        if not lhs or not rhs:
            raise ValueError("laws need at least one term on each side")
        for term in lhs + rhs:
            indices = term.target + term.other
            if max(indices) >= self.n_parties or min(indices) < 0:
                raise ValueError(
                    f"term {term.text()} out of range for {self.n_parties} parties"
                )
        object.__setattr__(self, "lhs", lhs)
        object.__setattr__(self, "rhs", rhs)

    def terms(self) -> tuple[CorrelationTerm, ...]:
        return self.lhs + self.rhs

    def text(self) -> str:
        left = " + ".join(t.text() for t in self.lhs)
        right = " + ".join(t.text() for t in self.rhs)
        return f"{left} {_RELATION_SYMBOL[self.relation]} {right}"


@dataclass(frozen=True)
class Certificate:
    """Symbolic proof record for a law.

    Each kw_instances entry is a (target, kept, measured) triple: one use of
    the purification identity relating a discord-type term on
    (target | measured) to the entanglement primitive on (target | kept).
    The residue is the leftover integer combination of subset entropies,
    canonicalized; empty for certified equalities, the subadditivity
    combination for inequalities.
    """

    law_name: str
    kw_instances: tuple[tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]], ...]
    residue: tuple[tuple[int, tuple[int, ...]], ...]

    @property
    def is_zero(self) -> bool:
        return not self.residue

    def residue_text(self) -> str:
        if not self.residue:
            return "0"
        parts = []
        for coef, subset in self.residue:
            mag = abs(coef)
            body = f"S({_fmt(subset)})" if mag == 1 else f"{mag}*S({_fmt(subset)})"
            if not parts:
                parts.append(body if coef > 0 else f"-{body}")
            else:
                parts.append(("+ " if coef > 0 else "- ") + body)
        return " ".join(parts)


def _canonical_subset(indices: Iterable[int], n_parties: int) -> tuple[int, ...] | None:
    """Lexicographically smaller of a subset and its complement; None if trivial.

    Global purity makes complementary subsets carry equal entropy, and the
    entropy of the empty or full set is zero.
    """
    subset = tuple(sorted(set(indices)))
    if not subset or len(subset) == n_parties:
        return None
    complement = tuple(i for i in range(n_parties) if i not in subset)
    return min(subset, complement)


def _pair_key(
    x: tuple[int, ...], y: tuple[int, ...]
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    return tuple(sorted((tuple(sorted(x)), tuple(sorted(y)))))


@lru_cache(maxsize=None)
def certify(law: LawSpec) -> Certificate:
    """Prove a law by rewriting every term into entanglement primitives.

    Discord and classical-correlation terms are rewritten through the
    purification identity against the complement of the parties they involve:
    D(X|Z) becomes E(X|Y) - S(X+Z) + S(Z) and J(X|Z) becomes S(X) - E(X|Y)
    with Y the purifying remainder. EF terms are primitives keyed by their
    unordered bipartition, so cancellation is exact integer bookkeeping.
    Raises CertificationError if primitives fail to cancel, or if an equality
    law leaves a nonzero entropy residue.
    """
    n = law.n_parties
    everyone = frozenset(range(n))
    primitives: dict[tuple[tuple[int, ...], tuple[int, ...]], int] = {}
    entropies: dict[tuple[int, ...], int] = {}
    instances: list[tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]] = []

    def add_entropy(indices: Iterable[int], weight: int) -> None:
        key = _canonical_subset(indices, n)
        if key is not None:
            entropies[key] = entropies.get(key, 0) + weight

    def add_primitive(x: tuple[int, ...], y: tuple[int, ...], weight: int) -> None:
        key = _pair_key(x, y)
        primitives[key] = primitives.get(key, 0) + weight

    for sign, side in ((1, law.lhs), (-1, law.rhs)):
        for term in side:
            w = sign * term.coefficient
            if term.kind == "EF":
                add_primitive(term.target, term.other, w)
            elif term.kind == "Entropy":
                add_entropy(term.target, w)
            elif term.kind == "CondEntropy":
                add_entropy(term.target + term.other, w)
                add_entropy(term.other, -w)
            else:
                x, z = term.target, term.other
                kept = tuple(sorted(everyone - set(x) - set(z)))
                if not kept:
                    raise CertificationError(
                        f"{term.text()}: term spans every party, leaving no "
                        "purifying remainder to rewrite against"
                    )
                instances.append((x, kept, z))
                if term.kind == "Discord":
                    add_primitive(x, kept, w)
                    add_entropy(x + z, -w)
                    add_entropy(z, w)
                else:  # ClassicalCorr
                    add_entropy(x, w)
                    add_primitive(x, kept, -w)

    leftover = {k: v for k, v in primitives.items() if v != 0}
    if leftover:
        bad = ", ".join(
            f"{v:+d}*E({_fmt(x)}|{_fmt(y)})" for (x, y), v in sorted(leftover.items())
        )
        raise CertificationError(
            f"{law.name}: entanglement primitives do not cancel: {bad}"
        )
    residue = tuple(
        (coef, subset)
        for subset, coef in sorted(entropies.items(), key=lambda kv: (len(kv[0]), kv[0]))
        if coef != 0
    )
    if law.relation == "Eq" and residue:
        probe = Certificate(law.name, tuple(instances), residue)
        raise CertificationError(
            f"{law.name}: equality law leaves residue {probe.residue_text()}"
        )
    return Certificate(law.name, tuple(instances), residue)


# ---------------------------------------------------------------------------
# catalog

def _tup(x) -> tuple[int, ...]:
    return (x,) if isinstance(x, int) else tuple(x)


def _E(target, other) -> CorrelationTerm:
    return CorrelationTerm("EF", _tup(target), _tup(other))


def _D(target, other) -> CorrelationTerm:
    return CorrelationTerm("Discord", _tup(target), _tup(other))


@lru_cache(maxsize=1)
def catalog() -> tuple[LawSpec, ...]:
    """The fixed named laws. Every Eq entry certifies; Ge/Le store residues."""
    laws: list[LawSpec] = [
        LawSpec(
            "tri_conservation", 3, "Eq",
            (_E(0, 1), _E(0, 2)),
            (_D(0, 1), _D(0, 2)),
        ),
        LawSpec(
            "tri_cycle", 3, "Eq",
            (_E(0, 1), _E(1, 2), _E(2, 0)),
            (_D(1, 0), _D(2, 1), _D(0, 2)),
        ),
        LawSpec(
            "tri_discord_cycle", 3, "Eq",
            (_D(0, 1), _D(1, 2), _D(2, 0)),
            (_D(1, 0), _D(2, 1), _D(0, 2)),
        ),
        LawSpec(
            "four_central_ge", 4, "Ge",
            (_E(0, (1, 2)), _E(0, (2, 3))),
            (_D(0, 3), _D(0, 1)),
        ),
        LawSpec(
            "four_central_le", 4, "Le",
            (_E(0, 1), _E(0, 3)),
            (_D(0, (1, 2)), _D(0, (2, 3))),
        ),
        LawSpec(
            "four_all_ge", 4, "Ge",
            (_E(0, (1, 2)), _E(0, (2, 3)), _E(0, (1, 3))),
            (_D(0, 1), _D(0, 2), _D(0, 3)),
        ),
        LawSpec(
            "four_all_le", 4, "Le",
            (_E(0, 1), _E(0, 2), _E(0, 3)),
            (_D(0, (2, 3)), _D(0, (1, 3)), _D(0, (1, 2))),
        ),
        LawSpec(
            "four_cycle_ge", 4, "Ge",
            (_E(0, (1, 2)), _E(1, (2, 3)), _E(2, (0, 3)), _E(3, (0, 1))),
            (_D(0, 3), _D(3, 2), _D(2, 1), _D(1, 0)),
        ),
        LawSpec(
            "four_cycle_le", 4, "Le",
            (_E(0, 1), _E(1, 2), _E(2, 3), _E(3, 0)),
            (_D(0, (2, 3)), _D(1, (0, 3)), _D(2, (0, 1)), _D(3, (1, 2))),
        ),
    ]
    pairings = (((1, 2), (3, 4)), ((1, 3), (2, 4)), ((1, 4), (2, 3)))
    for k, (p, q) in enumerate(pairings, start=1):
        laws.append(
            LawSpec(
                f"five_central_triplet_{k}", 5, "Eq",
                (_E(0, p), _E(0, q)),
                (_D(0, p), _D(0, q)),
            )
        )
    all_pairs = tuple(p for pairing in pairings for p in pairing)
    laws.append(
        LawSpec(
            "five_central_triplet_sum", 5, "Eq",
            tuple(_E(0, p) for p in all_pairs),
            tuple(_D(0, p) for p in all_pairs),
        )
    )
    laws.extend(
        [
            LawSpec(
                "five_cycle", 5, "Eq",
                tuple(_E(i, ((i + 1) % 5, (i + 2) % 5)) for i in range(5)),
                tuple(_D(i, ((i + 3) % 5, (i + 4) % 5)) for i in range(5)),
            ),
            LawSpec(
                "four_alternating", 4, "Eq",
                (_E(0, (1, 2)), _E(2, 3), _E(3, (0, 1)), _E(1, 2)),
                (_D(0, 3), _D(2, (0, 1)), _D(3, 2), _D(1, (0, 3))),
            ),
            LawSpec(
                "four_mixed_conservation", 4, "Eq",
                tuple(
                    t
                    for i in range(4)
                    for t in (_E(i, (i + 1) % 4), _E(i, ((i + 1) % 4, (i + 2) % 4)))
                ),
                tuple(
                    t
                    for i in range(4)
                    for t in (_D(i, ((i + 2) % 4, (i + 3) % 4)), _D(i, (i + 3) % 4))
                ),
            ),
            LawSpec(
                "four_mixed_symmetric", 4, "Eq",
                tuple(
                    t
                    for i in range(4)
                    for t in (_E(i, (i + 1) % 4), _E(i, ((i + 1) % 4, (i + 2) % 4)))
                ),
                tuple(
                    t
                    for i in range(4)
                    for t in (_D(i, (i + 3) % 4), _D(i, ((i + 1) % 4, (i + 2) % 4)))
                ),
            ),
            LawSpec(
                "four_discord", 4, "Eq",
                (_D(0, (1, 2)), _D(1, (2, 3)), _D(2, (0, 3)), _D(3, (0, 1))),
                (_D(0, (2, 3)), _D(1, (0, 3)), _D(2, (0, 1)), _D(3, (1, 2))),
            ),
            LawSpec(
                "five_discord", 5, "Eq",
                tuple(
                    _D(i, tuple(j for j in range(5) if j not in (i, (i + 1) % 5)))
                    for i in range(5)
                ),
                tuple(
                    _D(i, tuple(j for j in range(5) if j not in (i, (i - 1) % 5)))
                    for i in range(5)
                ),
            ),
            LawSpec(
                "four_one_measured", 4, "Eq",
                (_E((1, 2), 0), _E((2, 3), 1), _E((0, 3), 2), _E((0, 1), 3)),
                (_D((1, 2), 3), _D((2, 3), 0), _D((0, 3), 1), _D((0, 1), 2)),
            ),
        ]
    )
    return tuple(laws)


def law_by_name(name: str) -> LawSpec:
    for law in catalog():
        if law.name == name:
            return law
    raise ValueError(f"unknown law name {name!r}")


# ---------------------------------------------------------------------------
# generated families

def _cyc(start: int, offsets: Iterable[int], n: int) -> tuple[int, ...]:
    return tuple(sorted((start + k) % n for k in offsets))


def gen_odd_cycle_law(n_parties: int) -> LawSpec:
    """Cycle law for odd N: forward entanglement blocks of (N-1)/2 parties
    against backward discord blocks of the same size."""
    if n_parties < 3 or n_parties % 2 == 0:
        raise ValueError(f"odd-cycle generator needs odd N >= 3, got {n_parties}")
    half = (n_parties - 1) // 2
    lhs = tuple(
        _E(i, _cyc(i, range(1, half + 1), n_parties)) for i in range(n_parties)
    )
    rhs = tuple(
        _D(i, _cyc(i, range(-half, 0), n_parties)) for i in range(n_parties)
    )
    return LawSpec(f"gen:odd:{n_parties}", n_parties, "Eq", lhs, rhs)


def gen_even_cycle_law(n_parties: int) -> LawSpec:
    """Cycle law for even N: per party, forward blocks of N/2-1 and N/2
    parties against backward discord blocks of N/2 and N/2-1 parties."""
    if n_parties < 4 or n_parties % 2 == 1:
        raise ValueError(f"even-cycle generator needs even N >= 4, got {n_parties}")
    half = n_parties // 2
    lhs = tuple(
        term
        for i in range(n_parties)
        for term in (
            _E(i, _cyc(i, range(1, half), n_parties)),
            _E(i, _cyc(i, range(1, half + 1), n_parties)),
        )
    )
    rhs = tuple(
        term
        for i in range(n_parties)
        for term in (
            _D(i, _cyc(i, range(-half, 0), n_parties)),
            _D(i, _cyc(i, range(-(half - 1), 0), n_parties)),
        )
    )
    return LawSpec(f"gen:even:{n_parties}", n_parties, "Eq", lhs, rhs)


def gen_discord_law(n_parties: int) -> LawSpec:
    """Discord-only conservation law: measuring everything left of each party
    versus everything right of it (N-2 parties either way)."""
    if n_parties < 3:
        raise ValueError(f"discord generator needs N >= 3, got {n_parties}")
    lhs = tuple(
        _D(i, _cyc(i, range(-(n_parties - 2), 0), n_parties))
        for i in range(n_parties)
    )
    rhs = tuple(
        _D(i, _cyc(i, range(1, n_parties - 1), n_parties)) for i in range(n_parties)
    )
    return LawSpec(f"gen:discord:{n_parties}", n_parties, "Eq", lhs, rhs)


def gen_one_measured_law(n_parties: int) -> LawSpec:
    """Law whose discords all measure a single party: blocks of N-2 parties
    conditioned on one neighbor."""
    if n_parties < 3:
        raise ValueError(f"one-measured generator needs N >= 3, got {n_parties}")
    lhs = tuple(
        _E(_cyc(k, range(1, n_parties - 1), n_parties), k) for k in range(n_parties)
    )
    rhs = tuple(
        _D(_cyc(k, range(2, n_parties), n_parties), k) for k in range(n_parties)
    )
    return LawSpec(f"gen:onemeasured:{n_parties}", n_parties, "Eq", lhs, rhs)


_GENERATORS = {
    "odd": gen_odd_cycle_law,
    "even": gen_even_cycle_law,
    "discord": gen_discord_law,
    "onemeasured": gen_one_measured_law,
}

_TRIPLET_GROUP = (
    "five_central_triplet_1",
    "five_central_triplet_2",
    "five_central_triplet_3",
    "five_central_triplet_sum",
)


def resolve_laws(identifier: str) -> tuple[LawSpec, ...]:
    """Map a law identifier to LawSpecs.

    Accepts catalog names, the group alias ``five_central_triplet`` (its
    three pairings plus their sum), ``all`` for the whole catalog, and
    generated names ``gen:odd:N`` / ``gen:even:N`` / ``gen:discord:N`` /
    ``gen:onemeasured:N``. Raises ValueError for anything else.
    """
    if identifier == "all":
        return catalog()
    if identifier == "five_central_triplet":
        return tuple(law_by_name(n) for n in _TRIPLET_GROUP)
    if identifier.startswith("gen:"):
        parts = identifier.split(":")
        if len(parts) != 3 or parts[1] not in _GENERATORS:
            raise ValueError(f"malformed generated-law identifier {identifier!r}")
        try:
            n = int(parts[2])
        except ValueError:
            raise ValueError(f"malformed generated-law identifier {identifier!r}")
        return (_GENERATORS[parts[1]](n),)
    return (law_by_name(identifier),)


# ---------------------------------------------------------------------------
# numerical evaluation

def default_tolerance(law: LawSpec) -> float:
    """Per-law slack tolerance in bits, sized to the optimizers involved.

    Inequalities get the single-optimizer budget (their error biases the safe
    way); equalities needing convex roofs beyond two qubits or discords with
    multi-party measured sides get the large budget; the rest the stacked one.
    """
    if law.relation != "Eq":
        return TOL_SINGLE_OPTIMIZER
    for term in law.terms():
        if term.kind == "EF":
            full = len(term.target) + len(term.other) == law.n_parties
            if not full and len(term.target) + len(term.other) > 2:
                return TOL_LARGE_CONVEX_ROOF
        elif term.kind in ("Discord", "ClassicalCorr") and len(term.other) > 1:
            return TOL_LARGE_CONVEX_ROOF
    return TOL_STACKED_OPTIMIZERS


@dataclass(frozen=True)
class TermValue:
    term: CorrelationTerm
    value: float  # bits, excluding the coefficient
    converged: bool

    def to_dict(self) -> dict:
        return {
            "term": self.term.text(),
            "value": self.value,
            "converged": self.converged,
        }


@dataclass(frozen=True)
class EvalReport:
    """Numerical verdict for one law on one state."""

    law: LawSpec
    state_id: str
    tolerance: float
    config: OptimizerConfig
    lhs_terms: tuple[TermValue, ...]
    rhs_terms: tuple[TermValue, ...]
    lhs_sum: float
    rhs_sum: float
    slack: float
    status: str  # pass | fail

    @property
    def converged(self) -> bool:
        return all(t.converged for t in self.lhs_terms + self.rhs_terms)

    def to_dict(self) -> dict:
        return {
            "law": self.law.name,
            "relation": self.law.relation,
            "state": self.state_id,
            "tolerance": self.tolerance,
            "config": {
                "restarts": self.config.restarts,
                "max_iterations": self.config.max_iterations,
                "convergence_tol": self.config.convergence_tol,
                "seed": self.config.seed,
                "ensemble_size_factor": self.config.ensemble_size_factor,
            },
            "lhs_terms": [t.to_dict() for t in self.lhs_terms],
            "rhs_terms": [t.to_dict() for t in self.rhs_terms],
            "lhs_sum": self.lhs_sum,
            "rhs_sum": self.rhs_sum,
            "slack": self.slack,
            "status": self.status,
            "converged": self.converged,
        }


def _local_positions(union: tuple[int, ...], subset: tuple[int, ...]) -> list[int]:
    return [union.index(i) for i in subset]


def evaluate_term(
    term: CorrelationTerm, psi: PureState, cfg: OptimizerConfig | None = None
) -> TermValue:
    """Value in bits of a single term on a pure state (coefficient excluded).

    EF picks the cheapest exact route available: marginal entropy across a
    pure cut, the two-qubit closed form, then the convex roof. Discord and
    classical correlation reduce to the parties involved and optimize there.
    """
    cfg = cfg or OptimizerConfig()
    subsystem_set(term.target + term.other, psi.n_subsystems)  # bounds check
    if term.kind == "Entropy":
        return TermValue(term, von_neumann_entropy(reduced_state(psi, term.target)), True)
    if term.kind == "CondEntropy":
        return TermValue(term, conditional_entropy(psi, term.target, term.other), True)
    union = tuple(sorted(term.target + term.other))
    if term.kind == "EF":
        if len(union) == psi.n_subsystems:
            return TermValue(term, ef_pure(psi, term.target), True)
        rho = reduced_state(psi, union)
        if rho.dims == (2, 2):
            return TermValue(term, ef_two_qubit(rho), True)
        purity = float((rho.matrix @ rho.matrix).trace().real)
        if purity >= 1.0 - _PURITY_ATOL:
            marginal = partial_trace(rho, _local_positions(union, term.target))
            return TermValue(term, von_neumann_entropy(marginal), True)
        value, ensemble = ef_convex_roof(rho, _local_positions(union, term.target), cfg)
        return TermValue(term, value, ensemble.converged)
    rho = reduced_state(psi, union)
    lx = _local_positions(union, term.target)
    lz = _local_positions(union, term.other)
    j, basis = classical_correlation(rho, lx, lz, cfg)
    if term.kind == "ClassicalCorr":
        return TermValue(term, j, basis.converged)
    return TermValue(term, mutual_information(rho, lx, lz) - j, basis.converged)


def evaluate(
    law: LawSpec,
    psi: PureState,
    cfg: OptimizerConfig | None = None,
    tol: float | None = None,
    state_id: str = "",
) -> EvalReport:
    """Measure both sides of a law on a pure state and judge the relation.

    Each term gets its own optimizer seed derived from (cfg.seed, term index),
    so reports are reproducible and independent of evaluation order. Optimizer
    non-convergence is reported through the per-term flags, never raised.
    """
    cfg = cfg or OptimizerConfig()
    if psi.n_subsystems != law.n_parties:
        raise InvalidPartitionError(
            f"law {law.name} relates {law.n_parties} parties, "
            f"state has {psi.n_subsystems}"
        )
    if tol is None:
        tol = default_tolerance(law)
    values: list[TermValue] = []
    for k, term in enumerate(law.terms()):
        term_cfg = replace(cfg, seed=int(derive_seed(cfg.seed, k)))
        values.append(evaluate_term(term, psi, term_cfg))
    lhs_values = tuple(values[: len(law.lhs)])
    rhs_values = tuple(values[len(law.lhs) :])
    lhs_sum = sum(tv.term.coefficient * tv.value for tv in lhs_values)
    rhs_sum = sum(tv.term.coefficient * tv.value for tv in rhs_values)
    slack = lhs_sum - rhs_sum
    if law.relation == "Eq":
        ok = abs(slack) <= tol
    elif law.relation == "Ge":
        ok = slack >= -tol
    else:
        ok = slack <= tol
    return EvalReport(
        law=law,
        state_id=state_id,
        tolerance=float(tol),
        config=cfg,
        lhs_terms=lhs_values,
        rhs_terms=rhs_values,
        lhs_sum=lhs_sum,
        rhs_sum=rhs_sum,
        slack=slack,
        status="pass" if ok else "fail",
    )


def relabel_law(law: LawSpec, perm: Iterable[int]) -> LawSpec:
    """Apply a party relabeling (old index -> perm[old]) to every term."""
    p = tuple(int(i) for i in perm)
    if sorted(p) != list(range(law.n_parties)):
        raise InvalidPartitionError(
            f"{p} is not a permutation of 0..{law.n_parties - 1}"
        )
    def remap(term: CorrelationTerm) -> CorrelationTerm:
        return CorrelationTerm(
            term.kind,
            tuple(p[i] for i in term.target),
            tuple(p[i] for i in term.other),
            term.coefficient,
        )
    return LawSpec(
        law.name,
        law.n_parties,
        law.relation,
        tuple(remap(t) for t in law.lhs),
        tuple(remap(t) for t in law.rhs),
    )


def laws_equivalent(a: LawSpec, b: LawSpec) -> bool:
    """Same relation content as term multisets, allowing Eq side swaps and
    matched Ge/Le flips."""
    if a.n_parties != b.n_parties:
        return False
    def key(side: tuple[CorrelationTerm, ...]):
        return sorted((t.kind, t.target, t.other, t.coefficient) for t in side)
    sides_a = (key(a.lhs), key(a.rhs))
    sides_b = (key(b.lhs), key(b.rhs))
    swapped = (sides_b[1], sides_b[0])
    if a.relation == b.relation:
        if a.relation == "Eq":
            return sides_a in (sides_b, swapped)
        return sides_a == sides_b
    if {a.relation, b.relation} == {"Ge", "Le"}:
        return sides_a == swapped
    return False

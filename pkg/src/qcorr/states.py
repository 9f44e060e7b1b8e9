"""Benchmark states, seeded samplers, and the on-disk state format."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from math import prod, sqrt
from typing import Iterable, Sequence

import numpy as np

from .hilbert import PureState

__all__ = [
    "StateFormatError",
    "StateSpec",
    "ghz",
    "w_state",
    "haar_random",
    "product_random",
    "relabel",
    "parse_state_spec",
    "realize",
    "state_id",
    "read_state",
    "write_state",
]


class StateFormatError(ValueError):
    """A state file or state spec string could not be parsed."""


def derive_seed(*parts: int) -> int:
    """Fold integer keys into one reproducible 64-bit seed."""
    entropy = [int(p) & 0xFFFFFFFFFFFFFFFF for p in parts]
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])


def ghz(n: int) -> PureState:
    """n-qubit state (|0...0> + |1...1>)/sqrt(2)."""
    if n < 2:
        raise ValueError("ghz needs at least 2 qubits")
    amps = np.zeros(2**n, dtype=np.complex128)
    amps[0] = amps[-1] = 1.0 / sqrt(2.0)
    return PureState((2,) * n, amps)


def w_state(n: int) -> PureState:
    """n-qubit state with a single excitation shared equally."""
    if n < 2:
        raise ValueError("w_state needs at least 2 qubits")
    amps = np.zeros(2**n, dtype=np.complex128)
    for k in range(n):
        amps[1 << (n - 1 - k)] = 1.0 / sqrt(n)
    return PureState((2,) * n, amps)


def haar_random(dims: Sequence[int], seed: int) -> PureState:
    """Haar-random pure state: normalized i.i.d. complex Gaussian amplitudes.

    Deterministic for a given ``(dims, seed)`` pair.
    """
    dims = tuple(int(d) for d in dims)
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(prod(dims)) + 1j * rng.standard_normal(prod(dims))
    return PureState(dims, z / np.linalg.norm(z))


def product_random(dims: Sequence[int], seed: int) -> PureState:
    """Tensor product of independent Haar-random single-subsystem states."""
    dims = tuple(int(d) for d in dims)
    rng = np.random.default_rng(seed)
    amps = np.ones(1, dtype=np.complex128)
    for d in dims:
        z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        amps = np.kron(amps, z / np.linalg.norm(z))
    return PureState(dims, amps)


def relabel(psi: PureState, perm: Sequence[int]) -> PureState:
    """Move subsystem ``i`` to position ``perm[i]``."""
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(psi.n_subsystems)):
        raise ValueError(f"{perm} is not a permutation of {psi.n_subsystems} subsystems")
    inverse = tuple(int(i) for i in np.argsort(perm))
    dims = tuple(psi.dims[i] for i in inverse)
    return PureState(dims, psi.tensor().transpose(inverse).reshape(-1))


@dataclass(frozen=True)
class StateSpec:
    """Parsed description of one state source for campaigns and the CLI."""

    kind: str  # ghz | w | haar | product | file
    dims: tuple[int, ...]
    seed: int = 0
    path: str | None = None

    @property
    def n_parties(self) -> int:
        return len(self.dims)


def parse_state_spec(text: str, seed: int = 0) -> StateSpec:
    """Parse ``ghz:N``, ``w:N``, ``haar:d0,d1,...``, ``product:d0,...`` or ``file:PATH``."""
    kind, _, arg = text.partition(":")
    kind = kind.strip().lower()
    if not arg:
        raise StateFormatError(f"state spec {text!r} is missing an argument")
    if kind == "file":
        psi = read_state(arg)
        return StateSpec("file", psi.dims, seed=seed, path=arg)
    try:
        if kind in ("ghz", "w"):
            n = int(arg)
            if n < 2:
                raise ValueError
            return StateSpec(kind, (2,) * n, seed=seed)
        if kind in ("haar", "product"):
            dims = tuple(int(p) for p in arg.split(","))
            if not dims or any(d < 2 for d in dims):
                raise ValueError
            return StateSpec(kind, dims, seed=seed)
    except ValueError:
        raise StateFormatError(f"bad argument in state spec {text!r}") from None
    raise StateFormatError(f"unknown state kind {kind!r} in {text!r}")


def realize(spec: StateSpec, index: int = 0) -> PureState:
    """Produce sample ``index`` of the spec. Random kinds derive a per-sample seed."""
    if spec.kind == "ghz":
        return ghz(spec.n_parties)
    if spec.kind == "w":
        return w_state(spec.n_parties)
    if spec.kind == "haar":
        return haar_random(spec.dims, derive_seed(spec.seed, index))
    if spec.kind == "product":
        return product_random(spec.dims, derive_seed(spec.seed, index))
    if spec.kind == "file":
        return read_state(spec.path)
    raise StateFormatError(f"unknown state kind {spec.kind!r}")


def state_id(spec: StateSpec, index: int) -> str:
    if spec.kind == "file":
        return f"file:{spec.path}#{index}"
    if spec.kind in ("ghz", "w"):
        return f"{spec.kind}:{spec.n_parties}#{index}"
    return f"{spec.kind}:{','.join(str(d) for d in spec.dims)}#{index}"


def write_state(psi: PureState, path: str | os.PathLike) -> None:
    """Write dims and amplitudes as JSON with full float precision."""
    doc = {
        "dims": list(psi.dims),
        "amplitudes": [[float(a.real), float(a.imag)] for a in psi.amplitudes],
    }
    with open(path, "w", encoding="ascii") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def read_state(path: str | os.PathLike) -> PureState:
    """Read a state file written by :func:`write_state`, validating its contents."""
    try:
        with open(path, "r", encoding="ascii") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise StateFormatError(f"cannot read state file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise StateFormatError(f"state file {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "dims" not in doc or "amplitudes" not in doc:
        raise StateFormatError(f"state file {path} must contain dims and amplitudes")
    dims = doc["dims"]
    pairs = doc["amplitudes"]
    if (
        not isinstance(dims, list)
        or not dims
        or not all(isinstance(d, int) and d >= 2 for d in dims)
    ):
        raise StateFormatError(f"state file {path}: dims must be integers >= 2")
    if not isinstance(pairs, list) or any(
        not isinstance(p, list) or len(p) != 2 for p in pairs
    ):
        raise StateFormatError(f"state file {path}: amplitudes must be [re, im] pairs")
    if len(pairs) != prod(dims):
        raise StateFormatError(
            f"state file {path}: {len(pairs)} amplitudes for dims {dims}"
        )
    amps = np.array([complex(re, im) for re, im in pairs], dtype=np.complex128)
    norm2 = float(np.vdot(amps, amps).real)
    if abs(norm2 - 1.0) > 1e-9:
        raise StateFormatError(
            f"state file {path}: |psi|^2 = {norm2!r} violates normalization"
        )
    return PureState(tuple(dims), amps)

"""Dense state containers and entropy primitives for small multipartite systems.

Conventions used throughout the package:

* subsystem 0 is the most significant tensor factor, so a pure state's
  amplitude vector is row-major over the subsystem indices;
* all entropies are in bits (base-2 logarithms), with 0*log(0) = 0;
* subsystem sets are strictly increasing tuples of indices.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Iterable

import numpy as np

__all__ = [
    "DimensionError",
    "InvalidPartitionError",
    "PureState",
    "DensityMatrix",
    "subsystem_set",
    "tensor_product",
    "partial_trace",
    "reduced_state",
    "von_neumann_entropy",
    "conditional_entropy",
    "mutual_information",
]

NORM_ATOL = 1e-12
HERMITICITY_ATOL = 1e-10
TRACE_ATOL = 1e-10
EIGENVALUE_SLACK = 1e-9


class InvalidPartitionError(ValueError):
    """Subsystem indices are out of range, duplicated, or overlap."""


class DimensionError(ValueError):
    """Array shape does not match the declared subsystem dimensions."""


def subsystem_set(indices: Iterable[int], n_subsystems: int) -> tuple[int, ...]:
    """Normalize ``indices`` to a strictly increasing tuple in ``[0, n)``."""
    idx = tuple(int(i) for i in indices)
    out = tuple(sorted(idx))
    if len(set(out)) != len(out):
        raise InvalidPartitionError(f"duplicate subsystem indices in {idx}")
    if out and (out[0] < 0 or out[-1] >= n_subsystems):
        raise InvalidPartitionError(
            f"subsystem indices {idx} out of range for {n_subsystems} subsystems"
        )
    return out


def _disjoint(a: tuple[int, ...], b: tuple[int, ...]) -> None:
    overlap = set(a) & set(b)
    if overlap:
        raise InvalidPartitionError(f"subsystem sets overlap on {sorted(overlap)}")


@dataclass(frozen=True)
class PureState:
    """Normalized state vector over a list of subsystem dimensions."""

    dims: tuple[int, ...]
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 2 for d in dims):
            raise DimensionError(f"subsystem dimensions must all be >= 2, got {dims}")
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 1 or amps.size != prod(dims):
            raise DimensionError(
                f"amplitude vector of length {amps.size} does not match dims {dims}"
            )
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > 1e-9:
            raise ValueError(f"state vector is not normalized: |psi|^2 = {norm2!r}")
        if abs(norm2 - 1.0) > NORM_ATOL:
            amps = amps / np.sqrt(norm2)
        amps.flags.writeable = False
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_subsystems(self) -> int:
        return len(self.dims)

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per subsystem (subsystem 0 first)."""
        return self.amplitudes.reshape(self.dims)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite operator on a tensor space."""

    dims: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 2 for d in dims):
            raise DimensionError(f"subsystem dimensions must all be >= 2, got {dims}")
        d = prod(dims)
        mat = np.ascontiguousarray(self.matrix, dtype=np.complex128)
        if mat.shape != (d, d):
            raise DimensionError(f"matrix shape {mat.shape} does not match dims {dims}")
        herm = float(np.abs(mat - mat.conj().T).max())
        if herm > HERMITICITY_ATOL:
            raise ValueError(f"matrix is not Hermitian: max deviation {herm:.3e}")
        tr = complex(np.trace(mat))
        if abs(tr - 1.0) > TRACE_ATOL:
            raise ValueError(f"matrix trace {tr!r} is not 1")
        lo = float(np.linalg.eigvalsh(mat).min())
        if lo < -EIGENVALUE_SLACK:
            raise ValueError(f"matrix has eigenvalue {lo:.3e} below -{EIGENVALUE_SLACK}")
        mat.flags.writeable = False
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", mat)

    @property
    def n_subsystems(self) -> int:
        return len(self.dims)

    @property
    def dim(self) -> int:
        return prod(self.dims)


def tensor_product(a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    """Kronecker product; ``a``'s subsystems become the most significant block."""
    return DensityMatrix(a.dims + b.dims, np.kron(a.matrix, b.matrix))


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Trace out every subsystem not in ``keep``.

    The result's subsystems are ordered by increasing original index.
    """
    kept = subsystem_set(keep, rho.n_subsystems)
    if not kept:
        raise InvalidPartitionError("must keep at least one subsystem")
    if len(kept) == rho.n_subsystems:
        return rho
    reduced = _partial_trace_raw(rho.matrix, rho.dims, kept)
    return DensityMatrix(tuple(rho.dims[i] for i in kept), reduced)


def _partial_trace_raw(
    matrix: np.ndarray, dims: tuple[int, ...], kept: tuple[int, ...]
) -> np.ndarray:
    tensor = matrix.reshape(dims + dims)
    remaining = list(range(len(dims)))
    for idx in sorted(set(range(len(dims))) - set(kept), reverse=True):
        axis = remaining.index(idx)
        tensor = np.trace(tensor, axis1=axis, axis2=axis + len(remaining))
        remaining.pop(axis)
    d = prod(dims[i] for i in kept)
    return tensor.reshape(d, d)


def reduced_state(psi: PureState, keep: Iterable[int]) -> DensityMatrix:
    """Reduced density matrix of ``keep``, without forming the full projector."""
    kept = subsystem_set(keep, psi.n_subsystems)
    if not kept:
        raise InvalidPartitionError("must keep at least one subsystem")
    rest = tuple(i for i in range(psi.n_subsystems) if i not in kept)
    block = psi.tensor().transpose(kept + rest).reshape(
        prod(psi.dims[i] for i in kept), -1
    )
    return DensityMatrix(tuple(psi.dims[i] for i in kept), block @ block.conj().T)


def _spectrum_entropy(eigenvalues: np.ndarray) -> float:
    """Shannon entropy in bits of an eigenvalue vector, validating its range."""
    w = np.asarray(eigenvalues, dtype=np.float64)
    if w.size and (w.min() < -EIGENVALUE_SLACK or w.max() > 1.0 + EIGENVALUE_SLACK):
        raise ValueError(
            f"eigenvalues outside [0, 1] beyond tolerance: min {w.min():.3e}, "
            f"max {w.max():.6f}"
        )
    w = np.clip(w, 0.0, 1.0)
    nz = w[w > 0.0]
    return float(-(nz * np.log2(nz)).sum())


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """Von Neumann entropy in bits. Eigenvalues within 1e-9 of [0, 1] are clamped."""
    return _spectrum_entropy(np.linalg.eigvalsh(rho.matrix))


def conditional_entropy(psi: PureState, a: Iterable[int], b: Iterable[int]) -> float:
    """S(A|B) = S(AB) - S(B) for disjoint subsystem sets of a pure state.

    May be negative; equals -S(A) when A union B covers everything.
    """
    sa = subsystem_set(a, psi.n_subsystems)
    sb = subsystem_set(b, psi.n_subsystems)
    _disjoint(sa, sb)
    if not sa or not sb:
        raise InvalidPartitionError("conditional entropy needs two non-empty sets")
    return von_neumann_entropy(reduced_state(psi, sa + sb)) - von_neumann_entropy(
        reduced_state(psi, sb)
    )


def mutual_information(rho: DensityMatrix, a: Iterable[int], c: Iterable[int]) -> float:
    """I(A:C) = S(A) + S(C) - S(AC) for a bipartition of ``rho``'s subsystems."""
    sa = subsystem_set(a, rho.n_subsystems)
    sc = subsystem_set(c, rho.n_subsystems)
    _disjoint(sa, sc)
    if len(sa) + len(sc) != rho.n_subsystems or not sa or not sc:
        raise InvalidPartitionError("A and C must partition the subsystems of rho")
    return (
        von_neumann_entropy(partial_trace(rho, sa))
        + von_neumann_entropy(partial_trace(rho, sc))
        - von_neumann_entropy(rho)
    )


def _block_form(
    matrix: np.ndarray, dims: tuple[int, ...], first: tuple[int, ...]
) -> np.ndarray:
    """Reorder ``matrix`` so subsystems in ``first`` form the leading block.

    Returns a 4-axis view ``(d_first, d_rest, d_first, d_rest)``.
    """
    n = len(dims)
    rest = tuple(i for i in range(n) if i not in first)
    perm = first + rest
    tensor = matrix.reshape(dims + dims)
    tensor = tensor.transpose(perm + tuple(n + p for p in perm))
    d_first = prod(dims[i] for i in first)
    d_rest = prod(dims[i] for i in rest) if rest else 1
    return np.ascontiguousarray(tensor).reshape(d_first, d_rest, d_first, d_rest)

"""Named qubit registers and the index bookkeeping built on them.

A layout is an ordered list of named segments.  The first segment owns the
most significant qubits (matching ``numpy.kron`` order), so a basis index
decomposes big-endian across segments.  Block-encoding projections always
target trailing segments; partial traces and embeddings work on any subset.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatchError, UnknownSegmentError
from .linalg import as_complex_matrix

DEFAULT_QUBIT_BUDGET = 14


@dataclass(frozen=True)
class RegisterLayout:
    """Ordered named segments (name, qubit-count); names are unique."""

    segments: tuple[tuple[str, int], ...]

    def __post_init__(self):
        segs = tuple((str(n), int(q)) for n, q in self.segments)
        object.__setattr__(self, "segments", segs)
        names = [n for n, _ in segs]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate segment names in {names}")
        for n, q in segs:
            if q < 0:
                raise ValueError(f"segment {n!r} has negative qubit count {q}")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.segments)

    @property
    def total_qubits(self) -> int:
        return sum(q for _, q in self.segments)

    @property
    def dim(self) -> int:
        return 1 << self.total_qubits

    def qubits(self, name: str) -> int:
        for n, q in self.segments:
            if n == name:
                return q
        raise UnknownSegmentError(f"no segment {name!r} in {self.names}")

    def segment_dims(self) -> tuple[int, ...]:
        return tuple(1 << q for _, q in self.segments)

    def index_of(self, name: str) -> int:
        for i, (n, _) in enumerate(self.segments):
            if n == name:
                return i
        raise UnknownSegmentError(f"no segment {name!r} in {self.names}")

    def check(self, names: Iterable[str]) -> tuple[str, ...]:
        names = tuple(names)
        for n in names:
            self.index_of(n)
        return names

    def strides(self) -> tuple[int, ...]:
        """Index stride of each segment (big-endian)."""
        dims = self.segment_dims()
        out = []
        acc = 1
        for d in reversed(dims):
            out.append(acc)
            acc *= d
        return tuple(reversed(out))


def layout(*segments: tuple[str, int]) -> RegisterLayout:
    return RegisterLayout(tuple(segments))


def _check_square(m: np.ndarray, lay: RegisterLayout):
    if m.shape != (lay.dim, lay.dim):
        raise DimensionMismatchError(
            f"matrix shape {m.shape} does not match layout dim {lay.dim}"
        )


def zero_block_indices(lay: RegisterLayout, zero_segments: Sequence[str]) -> np.ndarray:
    """Basis indices whose digits on the named segments are all zero.

    Results are sorted; the surviving segments keep their big-endian order,
    so slicing a matrix with these indices equals the <0|.|0> projection.
    """
    zero = set(lay.check(zero_segments))
    idx = np.array([0], dtype=np.intp)
    for (name, _), d, stride in zip(lay.segments, lay.segment_dims(), lay.strides()):
        if name in zero or d == 1:
            continue
        idx = (idx[:, None] + np.arange(d, dtype=np.intp)[None, :] * stride).reshape(-1)
    return idx


def project_zero(m: np.ndarray, lay: RegisterLayout, zero_segments: Sequence[str]) -> np.ndarray:
    """<0|m|0> block over the named segments (matrix) or subvector (vector)."""
    m = np.asarray(m, dtype=complex)
    idx = zero_block_indices(lay, zero_segments)
    if m.ndim == 1:
        if m.shape[0] != lay.dim:
            raise DimensionMismatchError(
                f"vector length {m.shape[0]} does not match layout dim {lay.dim}"
            )
        return m[idx]
    _check_square(m, lay)
    return m[np.ix_(idx, idx)]


def partial_trace(m: np.ndarray, lay: RegisterLayout, keep: Sequence[str]) -> np.ndarray:
    """Trace out every segment not named in ``keep``; kept order is preserved."""
    m = as_complex_matrix(m)
    _check_square(m, lay)
    keep = set(lay.check(keep))
    dims = lay.segment_dims()
    s = len(dims)
    t = m.reshape(dims + dims)
    # Contract traced axes pairwise, starting from the rightmost so axis
    # numbers for the remaining segments stay valid.
    traced = [i for i, (n, _) in enumerate(lay.segments) if n not in keep]
    remaining = s
    for i in reversed(traced):
        t = np.trace(t, axis1=i, axis2=i + remaining)
        remaining -= 1
    d_keep = int(np.prod([dims[i] for i in range(s) if lay.segments[i][0] in keep], initial=1))
    return t.reshape(d_keep, d_keep)


def embed_operator(op: np.ndarray, lay: RegisterLayout, on: Sequence[str]) -> np.ndarray:
    """Lift an operator acting on the named segments (in the order given) to
    the full space, tensoring identity on the rest.

    The segments in ``on`` need not be contiguous in the layout.
    """
    op = as_complex_matrix(op)
    on = lay.check(on)
    if len(set(on)) != len(on):
        raise ValueError(f"repeated segment names in {on}")
    dims = lay.segment_dims()
    d_on = int(np.prod([dims[lay.index_of(n)] for n in on], initial=1))
    if op.shape != (d_on, d_on):
        raise DimensionMismatchError(
            f"operator shape {op.shape} does not match segments {on} (dim {d_on})"
        )
    rest = [n for n in lay.names if n not in on]
    d_rest = lay.dim // d_on
    full = np.kron(op, np.eye(d_rest, dtype=complex))
    # Map each layout-ordered index to its position in the [on..., rest...] ordering.
    reordered = list(on) + rest
    digits = {}
    ar = np.arange(lay.dim, dtype=np.intp)
    for name, d, stride in zip(lay.names, dims, lay.strides()):
        digits[name] = (ar // stride) % d
    sigma = np.zeros(lay.dim, dtype=np.intp)
    acc = 1
    for name in reversed(reordered):
        sigma += digits[name] * acc
        acc *= dims[lay.index_of(name)]
    return full[np.ix_(sigma, sigma)]


def basis_state(lay: RegisterLayout, index: int = 0) -> np.ndarray:
    v = np.zeros(lay.dim, dtype=complex)
    v[index] = 1.0
    return v

"""Exact tensor-network contraction over numpy object arrays.

Entries are any exact ring elements (``LaurentPoly``, ``Fraction``, int).
The contraction order only affects speed: the default picks, at every
step, the pair whose result is smallest.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

__all__ = ["LabeledTensor", "contract", "self_trace"]


@dataclass
class LabeledTensor:
    data: np.ndarray
    labels: Tuple[str, ...]

    def __post_init__(self):
        self.labels = tuple(self.labels)
        if self.data.ndim != len(self.labels):
            raise ValueError(f"tensor of rank {self.data.ndim} given {len(self.labels)} labels")

    @property
    def size(self) -> int:
        return int(self.data.size)


def self_trace(t: LabeledTensor) -> LabeledTensor:
    """Contract every label that occurs twice on the same tensor."""
    data, labels = t.data, list(t.labels)
    while True:
        seen = {}
        pair = None
        for i, l in enumerate(labels):
            if l in seen:
                pair = (seen[l], i)
                break
            seen[l] = i
        if pair is None:
            return LabeledTensor(data, tuple(labels))
        i, j = pair
        data = np.trace(data, axis1=i, axis2=j)
        if not isinstance(data, np.ndarray):
            data = np.array(data, dtype=object)
        labels = [l for k, l in enumerate(labels) if k not in (i, j)]


def _dims(t: LabeledTensor):
    return dict(zip(t.labels, t.data.shape))


def _result_size(a: LabeledTensor, b: LabeledTensor) -> int:
    shared = set(a.labels) & set(b.labels)
    size = 1
    for t in (a, b):
        for l, d in zip(t.labels, t.data.shape):
            if l not in shared:
                size *= d
    return size


def _pair(a: LabeledTensor, b: LabeledTensor) -> LabeledTensor:
    shared = [l for l in a.labels if l in b.labels]
    ia = [a.labels.index(l) for l in shared]
    ib = [b.labels.index(l) for l in shared]
    data = np.tensordot(a.data, b.data, axes=(ia, ib))
    if not isinstance(data, np.ndarray):
        data = np.array(data, dtype=object)
    labels = tuple(l for l in a.labels if l not in shared) + tuple(l for l in b.labels if l not in shared)
    return self_trace(LabeledTensor(data, labels))


def contract(tensors: Iterable[LabeledTensor], output: Sequence[str] = (), order: Optional[int] = None) -> np.ndarray:
    """Contract all shared labels and return the tensor on ``output``.

    ``order=None`` is the greedy smallest-result strategy. An integer seeds a
    random pair order instead; the exact result is the same either way.
    """
    work: List[LabeledTensor] = [self_trace(t) for t in tensors]
    rng = random.Random(order) if order is not None else None
    if not work:
        return np.array(1, dtype=object)
    while len(work) > 1:
        candidates = []
        for i in range(len(work)):
            for j in range(i + 1, len(work)):
                if set(work[i].labels) & set(work[j].labels):
                    candidates.append((i, j))
        if not candidates:  # disconnected pieces: outer product
            candidates = [(0, 1)]
        if rng is None:
            i, j = min(candidates, key=lambda p: (_result_size(work[p[0]], work[p[1]]), p))
        else:
            i, j = rng.choice(candidates)
        merged = _pair(work[i], work[j])
        work = [t for k, t in enumerate(work) if k not in (i, j)] + [merged]
    final = work[0]
    if sorted(final.labels) != sorted(output):
        raise ValueError(f"open labels {final.labels} do not match requested output {tuple(output)}")
    perm = [final.labels.index(l) for l in output]
    return final.data.transpose(perm) if perm else final.data

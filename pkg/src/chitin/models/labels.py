"""Lexicographic label encoding (name <-> contiguous index)."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LabelEncoding:
    names: tuple  # sorted lexicographically

    @property
    def n_classes(self):
        return len(self.names)

    def encode(self, labels):
        index = {name: i for i, name in enumerate(self.names)}
        return np.array([index[l] for l in labels], dtype=np.int64)

    def decode(self, indices):
        return [self.names[i] for i in indices]


def encode_labels(names):
    distinct = sorted(set(names))
    if not distinct:
        raise ValueError("need at least one class name")
    return LabelEncoding(names=tuple(distinct))

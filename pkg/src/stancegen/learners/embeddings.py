"""Static word-embedding tables and the averaged tweet representation."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np


@dataclass
class EmbeddingTable:
    """word -> dense vector, all of one dimension."""

    dimension: int
    vectors: dict[str, np.ndarray]

    def __post_init__(self) -> None:
        for word, vec in self.vectors.items():
            if vec.shape != (self.dimension,):
                raise ValueError(
                    f"vector for {word!r} has shape {vec.shape}, expected ({self.dimension},)"
                )

    def __contains__(self, word: str) -> bool:
        return word in self.vectors

    def __len__(self) -> int:
        return len(self.vectors)

    def get(self, word: str) -> Optional[np.ndarray]:
        return self.vectors.get(word)

    @classmethod
    def from_pairs(cls, pairs: Mapping[str, Sequence[float]]) -> "EmbeddingTable":
        vectors = {w: np.asarray(v, dtype=np.float64) for w, v in pairs.items()}
        if not vectors:
            raise ValueError("empty embedding table")
        dim = len(next(iter(vectors.values())))
        return cls(dimension=dim, vectors=vectors)

    def to_json_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "vectors": {w: v.tolist() for w, v in sorted(self.vectors.items())},
        }

    @classmethod
    def from_json_dict(cls, d) -> "EmbeddingTable":
        return cls(
            dimension=int(d["dimension"]),
            vectors={w: np.asarray(v, dtype=np.float64) for w, v in d["vectors"].items()},
        )


def load_embeddings(
    path: str | Path,
    limit: Optional[int] = None,
    vocabulary: Optional[Iterable[str]] = None,
) -> EmbeddingTable:
    """Read the textual format: a ``count dim`` header then one word per line.

    ``limit`` caps the number of rows read; ``vocabulary`` keeps only listed
    words (both make the 2M-word distribution files tractable).
    """
    path = Path(path)
    keep = set(vocabulary) if vocabulary is not None else None
    vectors: dict[str, np.ndarray] = {}
    with path.open(encoding="utf-8", errors="replace") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: expected 'vocab_count dimension' header")
        dim = int(header[1])
        for line in fh:
            if limit is not None and len(vectors) >= limit:
                break
            parts = line.rstrip("\n").split(" ")
            if len(parts) != dim + 1:
                continue  # malformed or multi-token "word"; skip
            word = parts[0]
            if keep is not None and word not in keep:
                continue
            vectors[word] = np.asarray(parts[1:], dtype=np.float64)
    if not vectors:
        raise ValueError(f"{path}: no usable vectors read")
    return EmbeddingTable(dimension=dim, vectors=vectors)


def embed_average(tokens: Sequence[str], table: EmbeddingTable) -> np.ndarray:
    """Mean of the in-vocabulary token vectors; zero vector when none hit."""
    hits = [table.vectors[t] for t in tokens if t in table.vectors]
    if not hits:
        return np.zeros(table.dimension)
    return np.mean(hits, axis=0)


def embed_matrix(docs: Sequence[Sequence[str]], table: EmbeddingTable) -> np.ndarray:
    return np.vstack([embed_average(doc, table) for doc in docs]) if docs else np.zeros((0, table.dimension))

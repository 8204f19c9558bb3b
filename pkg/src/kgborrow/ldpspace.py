"""Vector representations of textual relations.

The borrower scores textual relations against entity-pair encodings in a
fixed vector space (768-d by default, matching common sentence encoders).
Vectors normally come from an external encoder export; the deterministic
fallback encoder keeps the rest of the toolkit independent of any such
export by hashing path tokens into pseudo-random unit vectors.
"""

import hashlib
import logging

import numpy as np

from .dumps import (
    read_keyed_vectors_binary,
    read_keyed_vectors_text,
    write_keyed_vectors_binary,
    write_keyed_vectors_text,
)
from .kg import Vocabulary

logger = logging.getLogger(__name__)

DEFAULT_DIM = 768


class LdpVectorStore:
    """One vector per textual relation, aligned with an LDP vocabulary."""

    def __init__(self, ldps: Vocabulary, vectors: np.ndarray, provenance: str):
        if vectors.shape[0] != len(ldps):
            raise ValueError(f"{vectors.shape[0]} vectors for {len(ldps)} LDPs")
        if not np.all(np.isfinite(vectors)):
            raise ValueError("LDP vectors must be finite")
        self.ldps = ldps
        self.vectors = np.asarray(vectors, dtype=np.float32)
        self.provenance = provenance

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def vector(self, ldp_id: int) -> np.ndarray:
        return self.vectors[ldp_id]

    def __len__(self) -> int:
        return self.vectors.shape[0]

    def save(self, path, binary: bool = False) -> None:
        write = write_keyed_vectors_binary if binary else write_keyed_vectors_text
        write(path, self.ldps.surfaces(), self.vectors)


def load_vectors(path, ldps: Vocabulary, binary: bool = False) -> LdpVectorStore:
    """Load an LDP vector file and align it with the given vocabulary.

    Rows whose key is not in the vocabulary are skipped with a logged
    count; vocabulary LDPs with no row in the file are an error, listing
    the missing strings.
    """
    read = read_keyed_vectors_binary if binary else read_keyed_vectors_text
    keys, matrix = read(path)
    vectors = np.zeros((len(ldps), matrix.shape[1]), dtype=np.float32)
    found = np.zeros(len(ldps), dtype=bool)
    skipped = 0
    for key, row in zip(keys, matrix):
        if key not in ldps:
            skipped += 1
            continue
        idx = ldps.id_of(key)
        vectors[idx] = row
        found[idx] = True
    if skipped:
        logger.info("%s: skipped %d vectors for LDPs outside the vocabulary", path, skipped)
    if not found.all():
        missing = [ldps.surface_of(i) for i in np.nonzero(~found)[0]]
        preview = ", ".join(missing[:10])
        raise ValueError(f"{path}: no vector for {len(missing)} vocabulary LDPs: {preview}")
    return LdpVectorStore(ldps, vectors, provenance="external-export")


def _token_vector(token: str, position: int, dim: int, seed: int) -> np.ndarray:
    digest = hashlib.blake2b(f"{seed}|{position}|{token}".encode("utf-8"), digest_size=8).digest()
    rng = np.random.Generator(np.random.PCG64(int.from_bytes(digest, "little")))
    v = rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def fallback_encode(ldp: str, dim: int = DEFAULT_DIM, seed: int = 0) -> np.ndarray:
    """Deterministic stand-in encoder for an LDP string.

    The string is split on ``:``; each (position, token) pair hashes to a
    pseudo-random unit vector and the output is the L2-normalised mean.
    The same token sequence always encodes to the same vector, and because
    the hash covers the position, swapping two distinct tokens changes the
    output.
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    if not ldp:
        raise ValueError("cannot encode an empty LDP string")
    tokens = ldp.split(":")
    mean = np.zeros(dim)
    for position, token in enumerate(tokens):
        mean += _token_vector(token, position, dim, seed)
    mean /= len(tokens)
    norm = np.linalg.norm(mean)
    if norm == 0.0:
        raise ValueError(f"token vectors of {ldp!r} cancelled out")
    return (mean / norm).astype(np.float32)


def build_fallback_store(ldps: Vocabulary, dim: int = DEFAULT_DIM, seed: int = 0) -> LdpVectorStore:
    """Encode every vocabulary LDP with the fallback encoder."""
    vectors = np.empty((len(ldps), dim), dtype=np.float32)
    for idx, surface in enumerate(ldps.surfaces()):
        vectors[idx] = fallback_encode(surface, dim, seed)
    return LdpVectorStore(ldps, vectors, provenance="fallback")

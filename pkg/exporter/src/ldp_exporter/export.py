"""Batch-encode LDP strings and write them in the keyed vector format.

The output file starts with an ``N D`` header followed by one
``ldp<TAB>f1 f2 ... fD`` row per distinct input string, in input order.
Floats are serialised with 8 significant digits so identical model
versions produce byte-identical files across runs.
"""

import logging
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)

RENDER_MODES = ("raw", "joined")


@dataclass
class ExportJob:
    input_path: str
    model_name: str
    output_path: str
    batch_size: int = 64
    render: str = "raw"

    def __post_init__(self):
        if self.render not in RENDER_MODES:
            raise ValueError(f"render must be one of {RENDER_MODES}, got {self.render!r}")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


def read_ldp_list(path) -> list[str]:
    """Distinct LDP strings in first-seen order; duplicates warn."""
    ldps: list[str] = []
    seen: set[str] = set()
    duplicates = 0
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            ldp = line.rstrip("\n")
            if not ldp:
                continue
            if ldp in seen:
                duplicates += 1
                continue
            seen.add(ldp)
            ldps.append(ldp)
    if duplicates:
        logger.warning("%s: ignored %d duplicate LDP lines", path, duplicates)
    if not ldps:
        raise ValueError(f"{path}: no LDP strings to encode")
    return ldps


def render_ldp(ldp: str, mode: str) -> str:
    """``raw`` passes the path string through; ``joined`` feeds the encoder
    a space-separated token sequence instead."""
    if mode == "raw":
        return ldp
    return " ".join(token for token in ldp.split(":") if token)


def encode_ldps(ldps: list[str], model_name: str, batch_size: int, render: str) -> np.ndarray:
    """Run the sentence encoder over the rendered strings, in input order."""
    from sentence_transformers import SentenceTransformer

    model = SentenceTransformer(model_name)
    model.eval()
    rendered = [render_ldp(ldp, render) for ldp in ldps]
    vectors = model.encode(
        rendered,
        batch_size=batch_size,
        convert_to_numpy=True,
        show_progress_bar=False,
    )
    return np.asarray(vectors, dtype=np.float32)


def write_vectors(path, ldps: list[str], vectors: np.ndarray) -> None:
    n, d = vectors.shape
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{n} {d}\n")
        for ldp, row in zip(ldps, vectors):
            values = " ".join(f"{float(v):.8g}" for v in row)
            fh.write(f"{ldp}\t{values}\n")


def export(job: ExportJob) -> int:
    """Encode the job's LDP list and write the vector file.

    Returns the number of rows written. Inference only: identical inputs
    and model version reproduce the output byte for byte.
    """
    ldps = read_ldp_list(job.input_path)
    vectors = encode_ldps(ldps, job.model_name, job.batch_size, job.render)
    write_vectors(job.output_path, ldps, vectors)
    logger.info("%s: wrote %d vectors of dimension %d", job.output_path, *vectors.shape)
    return vectors.shape[0]

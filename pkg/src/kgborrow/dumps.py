"""On-disk formats for embedding matrices and loss traces.

Two closely related formats:

* **id-keyed matrix** (entity/relation tables): text header ``N D kind``
  followed by ``id<TAB>f1 f2 ... fD`` rows. The binary variant keeps the
  same ASCII header line and stores the rows as one little-endian float32
  block with ids implicit (row i is id i), so the file size is exactly
  ``len(header) + N*D*4`` bytes.
* **string-keyed vectors** (LDP stores, exporter output): text header
  ``N D`` followed by ``key<TAB>floats`` rows. The binary variant stores
  the header line, then the N key lines, then the float32 block.

Text floats are written with ``repr`` so float64 values round-trip
exactly; the binary path is float32 and round-trips bit-exactly for
float32 data.
"""

import csv

import numpy as np

from .kg import TsvFormatError


def _format_row(values) -> str:
    return " ".join(repr(float(v)) for v in values)


def write_matrix_text(path, matrix: np.ndarray, kind: str | None = None) -> None:
    """Write an id-keyed matrix; ``kind`` is the third header field if given."""
    n, d = matrix.shape
    header = f"{n} {d}" if kind is None else f"{n} {d} {kind}"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for i in range(n):
            fh.write(f"{i}\t{_format_row(matrix[i])}\n")


def write_matrix_binary(path, matrix: np.ndarray, kind: str | None = None) -> None:
    n, d = matrix.shape
    header = f"{n} {d}" if kind is None else f"{n} {d} {kind}"
    with open(path, "wb") as fh:
        fh.write((header + "\n").encode("ascii"))
        fh.write(np.ascontiguousarray(matrix, dtype="<f4").tobytes())


def read_matrix_text(path) -> tuple[np.ndarray, str | None]:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) not in (2, 3):
            raise TsvFormatError(path, 1, f"expected 'N D [kind]' header, got {header!r}")
        n, d = int(header[0]), int(header[1])
        kind = header[2] if len(header) == 3 else None
        matrix = np.empty((n, d), dtype=np.float64)
        for i in range(n):
            line = fh.readline()
            if not line:
                raise TsvFormatError(path, i + 2, f"expected {n} rows, file ended after {i}")
            fields = line.rstrip("\n").split("\t")
            if len(fields) != 2:
                raise TsvFormatError(path, i + 2, "expected 'id<TAB>floats'")
            values = fields[1].split()
            if len(values) != d:
                raise TsvFormatError(path, i + 2, f"expected {d} values, got {len(values)}")
            matrix[int(fields[0])] = [float(v) for v in values]
    return matrix, kind


def read_matrix_binary(path) -> tuple[np.ndarray, str | None]:
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii").split()
        if len(header) not in (2, 3):
            raise TsvFormatError(path, 1, f"expected 'N D [kind]' header, got {header!r}")
        n, d = int(header[0]), int(header[1])
        kind = header[2] if len(header) == 3 else None
        data = np.frombuffer(fh.read(n * d * 4), dtype="<f4")
        if data.size != n * d:
            raise TsvFormatError(path, 1, f"expected {n * d} float32 values, got {data.size}")
    return data.reshape(n, d).astype(np.float64), kind


def write_keyed_vectors_text(path, keys: list[str], matrix: np.ndarray) -> None:
    """Write string-keyed vectors with an ``N D`` header."""
    n, d = matrix.shape
    if len(keys) != n:
        raise ValueError(f"{len(keys)} keys for {n} rows")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{n} {d}\n")
        for key, row in zip(keys, matrix):
            fh.write(f"{key}\t{_format_row(row)}\n")


def write_keyed_vectors_binary(path, keys: list[str], matrix: np.ndarray) -> None:
    n, d = matrix.shape
    if len(keys) != n:
        raise ValueError(f"{len(keys)} keys for {n} rows")
    with open(path, "wb") as fh:
        fh.write(f"{n} {d}\n".encode("ascii"))
        for key in keys:
            fh.write(key.encode("utf-8") + b"\n")
        fh.write(np.ascontiguousarray(matrix, dtype="<f4").tobytes())


def read_keyed_vectors_text(path) -> tuple[list[str], np.ndarray]:
    keys: list[str] = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise TsvFormatError(path, 1, f"expected 'N D' header, got {header!r}")
        n, d = int(header[0]), int(header[1])
        matrix = np.empty((n, d), dtype=np.float32)
        for i in range(n):
            line = fh.readline()
            if not line:
                raise TsvFormatError(path, i + 2, f"expected {n} rows, file ended after {i}")
            fields = line.rstrip("\n").split("\t")
            if len(fields) != 2:
                raise TsvFormatError(path, i + 2, "expected 'key<TAB>floats'")
            values = fields[1].split()
            if len(values) != d:
                raise TsvFormatError(path, i + 2, f"expected {d} values, got {len(values)}")
            keys.append(fields[0])
            matrix[i] = [float(v) for v in values]
    return keys, matrix


def read_keyed_vectors_binary(path) -> tuple[list[str], np.ndarray]:
    keys: list[str] = []
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii").split()
        if len(header) != 2:
            raise TsvFormatError(path, 1, f"expected 'N D' header, got {header!r}")
        n, d = int(header[0]), int(header[1])
        for i in range(n):
            line = fh.readline()
            if not line:
                raise TsvFormatError(path, i + 2, f"expected {n} key lines, file ended after {i}")
            keys.append(line.rstrip(b"\n").decode("utf-8"))
        data = np.frombuffer(fh.read(n * d * 4), dtype="<f4")
        if data.size != n * d:
            raise TsvFormatError(path, 1, f"expected {n * d} float32 values, got {data.size}")
    return keys, data.reshape(n, d).copy()


def write_loss_trace(path, losses: list[float]) -> None:
    """Write per-epoch mean losses as an ``epoch,mean_loss`` CSV."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["epoch", "mean_loss"])
        for epoch, loss in enumerate(losses):
            writer.writerow([epoch, repr(float(loss))])


def read_loss_trace(path) -> list[float]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["epoch", "mean_loss"]:
            raise TsvFormatError(path, 1, f"expected 'epoch,mean_loss' header, got {header!r}")
        return [float(row[1]) for row in reader]

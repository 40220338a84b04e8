"""Loading expression count matrices and turning them into spectra."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DegenerateInput, ParseError, ShapeError
from .simulate import sample_cov_spectrum
from .spectrum import EigenSpectrum

__all__ = ["ExpressionMatrix", "load_matrix", "transform_and_spectrum"]


@dataclass
class ExpressionMatrix:
    """Read counts (positions x samples) with their shifted-log transform."""

    counts: np.ndarray
    transformed: np.ndarray
    gene_id: str
    d: int
    n: int


def load_matrix(path, fmt="csv", has_header=False, has_rownames=False,
                gene_id=None, transpose=False):
    """Parse a rectangular nonnegative-integer count matrix.

    Rows are positions (variables) and columns are samples; ``transpose``
    flips an input stored the other way around.  Malformed cells are
    reported with 1-based coordinates of the original file.
    """
    path = Path(path)
    delim = {"csv": ",", "tsv": "\t"}.get(fmt)
    if delim is None:
        raise ValueError(f"format must be 'csv' or 'tsv', got {fmt!r}")
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh, delimiter=delim)
        for line_no, row in enumerate(reader, start=1):
            if not row or all(c.strip() == "" for c in row):
                continue
            rows.append((line_no, [c.strip() for c in row]))
    if has_header and rows:
        rows = rows[1:]
    if not rows:
        raise ShapeError(f"{path}: no data rows")

    width = len(rows[0][1])
    body = []
    for line_no, row in rows:
        if len(row) != width:
            raise ShapeError(
                f"{path}: line {line_no} has {len(row)} fields, expected {width}"
            )
        body.append(row)

    col_offset = 1 if has_rownames else 0
    counts = np.empty((len(body), width - col_offset), dtype=np.int64)
    for i, (line_no, row) in enumerate(zip((r[0] for r in rows), body)):
        for j, cell in enumerate(row[col_offset:]):
            try:
                value = int(cell)
            except ValueError:
                raise ParseError(
                    f"{path}: non-numeric cell {cell!r} at row {line_no}, "
                    f"column {j + 1 + col_offset}",
                    row=line_no, col=j + 1 + col_offset,
                ) from None
            if value < 0:
                raise ParseError(
                    f"{path}: negative count {value} at row {line_no}, "
                    f"column {j + 1 + col_offset}",
                    row=line_no, col=j + 1 + col_offset,
                )
            counts[i, j] = value
    if transpose:
        counts = counts.T
    d, n = counts.shape
    transformed = np.log10(counts + 1.0)
    return ExpressionMatrix(
        counts=counts,
        transformed=transformed,
        gene_id=gene_id or path.stem,
        d=d,
        n=n,
    )


def transform_and_spectrum(em: ExpressionMatrix) -> EigenSpectrum:
    """Center the shifted-log matrix per position and take its spectrum.

    The covariance divisor is n, matching the uncentered population model;
    centering costs one rank, so the smallest retained eigenvalue is a
    structural zero when d >= n.
    """
    if em.n < 2:
        raise DegenerateInput("need at least two samples")
    return sample_cov_spectrum(em.transformed, center=True, gene_id=em.gene_id)

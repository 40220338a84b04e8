"""Container for sample covariance eigenvalue spectra."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["EigenSpectrum"]

# Relative cutoff below which trailing eigenvalues count as numerically zero.
_ZERO_RTOL = 1e-9


@dataclass
class EigenSpectrum:
    """Descending eigenvalues of ``(1/n) X X^T`` with size metadata.

    ``values_desc`` holds the ``min(d, n)`` potentially nonzero eigenvalues;
    the remaining ``d - n`` structural zeros (present when ``d > n``) are
    implied and included by moment computations.
    """

    values_desc: np.ndarray
    d: int
    n: int
    centered: bool = False
    gene_id: str | None = None

    def __post_init__(self):
        v = np.asarray(self.values_desc, dtype=float).copy()
        if v.ndim != 1:
            raise ValueError("values_desc must be 1-d")
        if len(v) != min(self.d, self.n):
            raise ValueError(
                f"expected {min(self.d, self.n)} eigenvalues, got {len(v)}"
            )
        if np.any(v < -1e-10 * max(1.0, abs(v).max(initial=1.0))):
            raise ValueError("eigenvalues must be nonnegative up to roundoff")
        v = np.maximum(v, 0.0)
        v.sort()
        self.values_desc = v[::-1].copy()

    @property
    def y(self):
        return self.d / self.n

    @property
    def structural_zeros(self):
        return max(self.d - self.n, 0)

    @property
    def nonzero_values(self):
        """Leading eigenvalues above numerical-zero, descending."""
        v = self.values_desc
        if len(v) == 0 or v[0] <= 0:
            return v[:0]
        return v[v > _ZERO_RTOL * v[0]]

    def scaled(self, c):
        return EigenSpectrum(self.values_desc * c, self.d, self.n,
                             self.centered, self.gene_id)

    def to_json_dict(self):
        out = {
            "d": self.d,
            "n": self.n,
            "centered": self.centered,
            "values_desc": self.values_desc.tolist(),
        }
        if self.gene_id is not None:
            out["gene_id"] = self.gene_id
        return out

    @classmethod
    def from_json_dict(cls, obj):
        return cls(
            np.asarray(obj["values_desc"], dtype=float),
            obj["d"],
            obj["n"],
            obj.get("centered", False),
            obj.get("gene_id"),
        )

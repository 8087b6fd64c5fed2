"""Lattice index schemes, periodicity cells, profiles, and cone operations.

Sites are indexed by integers (on-site) or half-integers (inter-site).
Indices are stored internally as doubled integers 2j so both schemes share
exact integer arithmetic. A periodicity cell of length N is a run of N
consecutive sites chosen so that (N-1)/2 <= max(cell) <= N/2; the symmetrized
cell is its intersection with its own mirror image.

The admissible profiles form the cone of non-negative, even, unimodal
sequences; the flow preserves it, and ``project_cone`` is available as an
optional safeguard for large discrete steps.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from enum import Enum

import numpy as np


class IndexScheme(Enum):
    ON_SITE = "onsite"
    INTER_SITE = "intersite"


@dataclass(frozen=True)
class Cell:
    """A finite periodicity cell (n sites) or a truncated infinite lattice.

    Finite cells wrap periodically; infinite cells hold values on |j| <= j_max
    and are implicitly zero beyond the truncation.
    """

    scheme: IndexScheme
    n: int | None = None
    j_max: float | None = None

    def __post_init__(self):
        if (self.n is None) == (self.j_max is None):
            raise ValueError("exactly one of n (periodic) or j_max (truncated) required")
        if self.n is not None and self.n < 1:
            raise ValueError("cell length must be positive")
        if self.j_max is not None and self.j_max <= 0:
            raise ValueError("truncation half-width must be positive")

    @staticmethod
    def periodic(scheme: IndexScheme, n: int) -> "Cell":
        return Cell(scheme, n=int(n))

    @staticmethod
    def truncated(scheme: IndexScheme, j_max: float) -> "Cell":
        return Cell(scheme, j_max=float(j_max))

    @property
    def is_finite(self) -> bool:
        return self.n is not None

    def doubled_indices(self) -> np.ndarray:
        """Ordered site indices as exact doubled integers 2j."""
        if self.is_finite:
            n = self.n
            if self.scheme is IndexScheme.ON_SITE:
                start = -2 * ((n - 1) // 2)
            else:
                start = (-n + 1) if n % 2 == 0 else (-n + 2)
            return start + 2 * np.arange(n, dtype=np.int64)
        if self.scheme is IndexScheme.ON_SITE:
            m = int(np.floor(self.j_max))
            return 2 * np.arange(-m, m + 1, dtype=np.int64)
        k = int(np.floor(self.j_max - 0.5))
        if k < 0:
            raise ValueError("inter-site truncation must cover |j| = 1/2")
        return 2 * np.arange(-k, k + 2, dtype=np.int64) - 1

    def indices(self) -> np.ndarray:
        return self.doubled_indices() / 2.0

    @property
    def size(self) -> int:
        return self.n if self.is_finite else self.doubled_indices().size

    def symmetric_doubled_max(self) -> int:
        """Largest doubled index D with both +-D in the cell (edge of the symmetrized cell)."""
        d = self.doubled_indices()
        return int(min(-d[0], d[-1]))


def cell_indices(cell: Cell) -> list:
    """Ordered cell indices as numbers (ints on-site, half-integer floats inter-site)."""
    if not cell.is_finite:
        raise ValueError("cell_indices is defined for finite cells")
    d = cell.doubled_indices()
    if cell.scheme is IndexScheme.ON_SITE:
        return [int(x) // 2 for x in d]
    return [float(x) / 2.0 for x in d]


@dataclass(frozen=True)
class Profile:
    """Real-valued amplitudes aligned with the ordered index list of a cell."""

    cell: Cell
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size != self.cell.size:
            raise ValueError(
                f"expected {self.cell.size} values for the cell, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("profile values must be finite")
        object.__setattr__(self, "values", vals)

    @property
    def periodic(self) -> bool:
        return self.cell.is_finite

    def with_values(self, values) -> "Profile":
        return Profile(self.cell, np.asarray(values, dtype=float))


def neighbor_sum(values: np.ndarray, periodic: bool) -> np.ndarray:
    """u_{j+1} + u_{j-1} with periodic wrap or zero-Dirichlet boundary."""
    if periodic:
        return np.roll(values, -1) + np.roll(values, 1)
    out = np.zeros_like(values)
    out[:-1] += values[1:]
    out[1:] += values[:-1]
    return out


def cone_slack(u: Profile) -> float:
    """Largest violation of non-negativity, evenness, or unimodality (0 on the cone)."""
    v = u.values
    if v.size == 0:
        return 0.0
    worst = max(0.0, -float(np.min(v)))
    d = u.cell.doubled_indices()
    sym = u.cell.symmetric_doubled_max()
    mask = np.abs(d) <= sym
    block = v[mask]
    if block.size:
        worst = max(worst, float(np.max(np.abs(block - block[::-1]))))
    right = v[d >= 0]
    if right.size >= 2:
        worst = max(worst, float(np.max(np.diff(right))))
    return worst


def in_cone(u: Profile, tol: float = 0.0) -> bool:
    """True iff u is non-negative, even on the symmetrized cell, and unimodal."""
    return cone_slack(u) <= tol


def _pav_nonincreasing(y: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Weighted least-squares isotonic fit, non-increasing (pool adjacent violators)."""
    n = y.size
    means = list(y.astype(float))
    weights = list(w.astype(float))
    counts = [1] * n
    i = 0
    while i < len(means) - 1:
        if means[i] < means[i + 1]:
            tot = weights[i] + weights[i + 1]
            merged = (means[i] * weights[i] + means[i + 1] * weights[i + 1]) / tot
            means[i:i + 2] = [merged]
            weights[i:i + 2] = [tot]
            counts[i:i + 2] = [counts[i] + counts[i + 1]]
            i = max(i - 1, 0)
        else:
            i += 1
    return np.repeat(means, counts)


def project_cone(u: Profile) -> Profile:
    """Symmetrize, clip negatives, and enforce unimodality by isotonic regression.

    The monotone fit is least squares with site multiplicities as weights, so
    mirrored pairs count twice. Idempotent on cone members.
    """
    if not u.cell.is_finite:
        raise ValueError("project_cone is defined for finite cells")
    v = u.values.copy()
    d = u.cell.doubled_indices()
    sym = u.cell.symmetric_doubled_max()
    mask = np.abs(d) <= sym
    block = v[mask]
    v[mask] = 0.5 * (block + block[::-1])
    np.clip(v, 0.0, None, out=v)

    right_mask = d >= 0
    right = v[right_mask]
    # weight 2 for sites with a mirrored partner, 1 for center/unpaired sites
    w = np.where((d[right_mask] > 0) & (d[right_mask] <= sym), 2.0, 1.0)
    fitted = _pav_nonincreasing(right, w)
    v[right_mask] = fitted
    mirror = (d < 0) & mask
    v[mirror] = fitted[np.searchsorted(d[right_mask], -d[mirror])]
    np.clip(v, 0.0, None, out=v)
    return u.with_values(v)


def restrict(u: Profile, target: Cell) -> Profile:
    """Zero-extend u beyond its symmetrized cell and re-index on the target cell."""
    src_d = u.cell.doubled_indices()
    sym = u.cell.symmetric_doubled_max()
    lookup = {int(dd): val for dd, val in zip(src_d, u.values) if abs(dd) <= sym}
    tgt_d = target.doubled_indices()
    tsym = target.symmetric_doubled_max() if target.is_finite else None
    out = np.zeros(tgt_d.size)
    for i, dd in enumerate(tgt_d):
        if tsym is not None and abs(int(dd)) > tsym:
            continue
        out[i] = lookup.get(int(dd), 0.0)
    return Profile(target, out)


def embed(u: Profile, target: Cell) -> Profile:
    """Periodic continuation of the restriction of u onto a finite cell."""
    if not target.is_finite:
        raise ValueError("embed targets a finite cell")
    return restrict(u, target)


def stagger(u: Profile) -> Profile:
    """Alternate signs site by site: u_j -> (-1)^j u_j (inter-site: (-1)^(j-1/2))."""
    d = u.cell.doubled_indices()
    if u.cell.scheme is IndexScheme.ON_SITE:
        expo = d // 2
    else:
        expo = (d - 1) // 2
    signs = np.where(expo % 2 == 0, 1.0, -1.0)
    return u.with_values(u.values * signs)


def _format_index(dd: int, scheme: IndexScheme) -> str:
    if scheme is IndexScheme.ON_SITE:
        return str(int(dd) // 2)
    return f"{dd / 2:.1f}"


def profile_to_csv(u: Profile, path_or_buf) -> None:
    """Write the profile as CSV with header ``j,u`` (full-precision values)."""
    own = isinstance(path_or_buf, (str, bytes)) or hasattr(path_or_buf, "__fspath__")
    fh = open(path_or_buf, "w", newline="") if own else path_or_buf
    try:
        writer = csv.writer(fh)
        writer.writerow(["j", "u"])
        for dd, val in zip(u.cell.doubled_indices(), u.values):
            writer.writerow([_format_index(int(dd), u.cell.scheme), repr(float(val))])
    finally:
        if own:
            fh.close()


def profile_from_csv(path_or_buf, periodic: bool | None = None) -> Profile:
    """Parse a ``j,u`` CSV back into a Profile.

    The scheme is inferred from the indices. With ``periodic=None`` the cell
    is read as periodic when the index list matches a periodicity cell and as
    a truncated lattice otherwise.
    """
    own = isinstance(path_or_buf, (str, bytes)) or hasattr(path_or_buf, "__fspath__")
    fh = open(path_or_buf, "r", newline="") if own else path_or_buf
    try:
        rows = list(csv.reader(fh))
    finally:
        if own:
            fh.close()
    if not rows or rows[0] != ["j", "u"]:
        raise ValueError("expected CSV header 'j,u'")
    js = np.array([float(r[0]) for r in rows[1:]])
    us = np.array([float(r[1]) for r in rows[1:]])
    d = np.round(2 * js).astype(np.int64)
    if np.max(np.abs(d / 2.0 - js)) > 0:
        raise ValueError("indices must be integers or half-integers")
    scheme = IndexScheme.ON_SITE if np.all(d % 2 == 0) else IndexScheme.INTER_SITE
    if np.any(d % 2 == 0) and np.any(d % 2 != 0):
        raise ValueError("mixed integer and half-integer indices")

    n = d.size
    candidate = Cell.periodic(scheme, n)
    matches_periodic = np.array_equal(candidate.doubled_indices(), d)
    if periodic is True or (periodic is None and matches_periodic):
        if not matches_periodic:
            raise ValueError("index list is not a periodicity cell")
        return Profile(candidate, us)
    trunc = Cell.truncated(scheme, d[-1] / 2.0)
    if not np.array_equal(trunc.doubled_indices(), d):
        raise ValueError("index list is not a symmetric truncated lattice")
    return Profile(trunc, us)

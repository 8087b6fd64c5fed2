"""Energies of lattice profiles and the building blocks of the constrained flow.

For a profile u on a cell the relevant functionals are

    power      N(u) = sum u_j^2
    coupling   L(u) = sum u_j (u_{j+1} + u_{j-1}) = 2 sum u_j u_{j+1}
    potential  W(u) = sum psi(u_j^2)
    energy     P(u) = alpha L(u) + W(u)
    hamiltonian H(u) = 2 alpha N(u) - P(u)
    t_value    T = P(u) / (alpha N(u))

Finite cells wrap periodically; truncated lattices use zero-Dirichlet
boundaries, matching the zero extension of restricted profiles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lattice import Cell, IndexScheme, Profile, neighbor_sum
from .potentials import Potential


class DegenerateProfileError(ValueError):
    """Raised for quantities that are undefined on the zero profile."""


@dataclass(frozen=True)
class EnergyBreakdown:
    power: float
    coupling: float
    potential_energy: float
    p_total: float
    hamiltonian: float
    t_value: float | None

    def to_dict(self) -> dict:
        return {
            "power": self.power,
            "coupling": self.coupling,
            "potential_energy": self.potential_energy,
            "p_total": self.p_total,
            "hamiltonian": self.hamiltonian,
            "t_value": self.t_value,
        }


def power(u: Profile) -> float:
    v = u.values
    return float(v @ v)


def coupling(u: Profile) -> float:
    v = u.values
    if u.periodic:
        return float(2.0 * (v @ np.roll(v, -1)))
    return float(2.0 * (v[:-1] @ v[1:]))


def potential_energy(u: Profile, p: Potential) -> float:
    v = u.values
    return float(np.sum(p.psi(v * v)))


def energy(u: Profile, p: Potential, alpha: float) -> EnergyBreakdown:
    """Full energy breakdown; t_value is None for the zero profile."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    n = power(u)
    lc = coupling(u)
    w = potential_energy(u, p)
    ptot = alpha * lc + w
    tv = ptot / (alpha * n) if n > 0 else None
    return EnergyBreakdown(power=n, coupling=lc, potential_energy=w,
                           p_total=ptot, hamiltonian=2.0 * alpha * n - ptot,
                           t_value=tv)


def grad_p(u: Profile, p: Potential, alpha: float) -> Profile:
    """Gradient of P: component j is 2 alpha (u_{j+1}+u_{j-1}) + 2 dpsi(u_j^2) u_j."""
    v = u.values
    g = 2.0 * alpha * neighbor_sum(v, u.periodic) + 2.0 * p.dpsi(v * v) * v
    return u.with_values(g)


def sigma(u: Profile, p: Potential, alpha: float) -> float:
    """Rayleigh-type flow multiplier <grad P(u), u> / ||u||^2.

    At a standing wave this equals twice the wave frequency, since the
    gradient there is twice the frequency times the profile.
    """
    v = u.values
    n = float(v @ v)
    if n == 0.0:
        raise DegenerateProfileError("multiplier undefined for the zero profile")
    g = grad_p(u, p, alpha).values
    return float(g @ v) / n


def residual(u: Profile, sig: float, p: Potential, alpha: float) -> float:
    """Sup norm of sigma*u_j - alpha (u_{j+1}+u_{j-1}) - dpsi(u_j^2) u_j."""
    v = u.values
    r = sig * v - alpha * neighbor_sum(v, u.periodic) - p.dpsi(v * v) * v
    return float(np.max(np.abs(r))) if v.size else 0.0


def participation_ratio(u: Profile) -> float:
    """(sum u^2)^2 / (n_sites * sum u^4); 1 for flat profiles, 1/N for one site."""
    v = u.values
    q = float(np.sum(v**4))
    if q == 0.0:
        raise DegenerateProfileError("participation ratio undefined for the zero profile")
    return float(v @ v) ** 2 / (u.cell.size * q)


def box_profile(scheme: IndexScheme, rho: float, m: int, j_max: float | None = None) -> Profile:
    """Normalized plateau profile on a truncated lattice.

    On-site: value sqrt(rho/(2m+1)) on |j| <= m (m >= 0). Inter-site: value
    sqrt(rho/(2m)) on |j| <= m - 1/2 (m >= 1).
    """
    if scheme is IndexScheme.ON_SITE:
        if m < 0:
            raise ValueError("on-site plateau needs m >= 0")
        height = math.sqrt(rho / (2 * m + 1))
        half_width = m
    else:
        if m < 1:
            raise ValueError("inter-site plateau needs m >= 1")
        height = math.sqrt(rho / (2 * m))
        half_width = m - 0.5
    cell = Cell.truncated(scheme, j_max if j_max is not None else half_width + 2)
    j = cell.indices()
    vals = np.where(np.abs(j) <= half_width + 1e-9, height, 0.0)
    return Profile(cell, vals)


def exp_profile(scheme: IndexScheme, rho: float, zeta: float, j_max: float | None = None) -> Profile:
    """Normalized exponential profile c * exp(-zeta |j|) on a truncated lattice.

    Truncated at j_max = max(50, 20/zeta) by default; the dropped tail is far
    below machine precision, and the profile is renormalized to the sphere.
    """
    if zeta <= 0:
        raise ValueError("decay rate zeta must be positive")
    cell = Cell.truncated(scheme, j_max if j_max is not None else max(50.0, 20.0 / zeta))
    j = cell.indices()
    vals = np.exp(-zeta * np.abs(j))
    vals *= math.sqrt(rho) / math.sqrt(float(vals @ vals))
    return Profile(cell, vals)


def t_lower_bounds(p: Potential, alpha: float, rho: float, m_max: int,
                   zeta_grid, scheme: IndexScheme = IndexScheme.ON_SITE) -> float:
    """Best lower bound for the normalized maximal energy on the infinite lattice.

    Evaluates P/(alpha*rho) for the plateau family m = 0..m_max (inter-site:
    1..m_max) and the exponential family over zeta_grid, all numerically at
    sufficient truncation.
    """
    if alpha <= 0 or rho <= 0 or m_max < 0:
        raise ValueError("alpha, rho must be positive and m_max non-negative")
    best = -math.inf
    m_lo = 0 if scheme is IndexScheme.ON_SITE else 1
    for m in range(m_lo, m_max + 1):
        ptot = energy(box_profile(scheme, rho, m), p, alpha).p_total
        best = max(best, ptot / (alpha * rho))
    for zeta in zeta_grid:
        ptot = energy(exp_profile(scheme, rho, float(zeta)), p, alpha).p_total
        best = max(best, ptot / (alpha * rho))
    return best

"""Nonlinear on-site potentials and numerical checks of their growth assumptions.

A potential is a pair (psi, dpsi) defined on x >= 0 with psi(0) = dpsi(0) = 0.
The energy maximization relies on three structural properties:

  normalization    psi(0) = dpsi(0) = 0
  super-linearity  x * dpsi(x) >= psi(x) >= 0
  non-degeneracy   psi(x) > 0 for x > 0

Catalog entries satisfy all three; user-defined potentials are verified
numerically by ``check_assumptions``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np


class DomainError(ValueError):
    """Raised when a potential is evaluated at x < 0."""


class PotentialKind(Enum):
    POWER = "power"
    SATURABLE_LOG = "saturable-log"
    SATURABLE_ARCTAN = "saturable-arctan"
    EXP_QUADRATIC = "exp-quadratic"
    NONCONVEX_RATIONAL = "nonconvex-rational"
    QUARTIC = "quartic"
    CUSTOM = "custom"


@dataclass(frozen=True)
class Potential:
    """Immutable potential; safe to share across concurrent evaluations.

    ``psi`` and ``dpsi`` are vectorized callables on non-negative arguments.
    ``smooth`` declares that the pair is continuously differentiable, which
    enables the finite-difference consistency check.
    """

    kind: PotentialKind
    psi: Callable[[np.ndarray], np.ndarray]
    dpsi: Callable[[np.ndarray], np.ndarray]
    params: dict = field(default_factory=dict)
    smooth: bool = True

    @property
    def label(self) -> str:
        if self.kind is PotentialKind.POWER:
            return "power:eta={eta},c={c}".format(**self.params)
        if self.kind is PotentialKind.CUSTOM:
            return self.params.get("name", "custom")
        return self.kind.value


def power_law(eta: float, c: float = 1.0) -> Potential:
    """psi(x) = c x^(1+eta)/(1+eta), dpsi(x) = c x^eta with eta, c > 0."""
    if eta <= 0 or c <= 0:
        raise ValueError("power potential needs eta > 0 and c > 0")
    return Potential(
        PotentialKind.POWER,
        psi=lambda x: c * x ** (1.0 + eta) / (1.0 + eta),
        dpsi=lambda x: c * x**eta,
        params={"eta": eta, "c": c},
    )


def saturable_log() -> Potential:
    """psi(x) = x - log(1+x), dpsi(x) = x/(1+x)."""
    return Potential(
        PotentialKind.SATURABLE_LOG,
        psi=lambda x: x - np.log1p(x),
        dpsi=lambda x: x / (1.0 + x),
    )


def saturable_arctan() -> Potential:
    """psi(x) = x - arctan(x), dpsi(x) = x^2/(1+x^2)."""
    return Potential(
        PotentialKind.SATURABLE_ARCTAN,
        psi=lambda x: x - np.arctan(x),
        dpsi=lambda x: x * x / (1.0 + x * x),
    )


def exp_quadratic() -> Potential:
    """psi(x) = e^x - x^2/2 - x - 1, dpsi(x) = e^x - x - 1."""
    return Potential(
        PotentialKind.EXP_QUADRATIC,
        psi=lambda x: np.expm1(x) - 0.5 * x * x - x,
        dpsi=lambda x: np.expm1(x) - x,
    )


def nonconvex_rational() -> Potential:
    """psi(x) = x^3/(1+x^2), dpsi(x) = x^2 (3+x^2)/(1+x^2)^2; not convex."""
    return Potential(
        PotentialKind.NONCONVEX_RATIONAL,
        psi=lambda x: x**3 / (1.0 + x * x),
        dpsi=lambda x: x * x * (3.0 + x * x) / (1.0 + x * x) ** 2,
    )


def quartic() -> Potential:
    """psi(x) = x^4, dpsi(x) = 4 x^3."""
    return Potential(
        PotentialKind.QUARTIC,
        psi=lambda x: x**4,
        dpsi=lambda x: 4.0 * x**3,
    )


def custom(psi, dpsi, name: str = "custom", smooth: bool = True) -> Potential:
    """Wrap a user-supplied (psi, dpsi) callback pair.

    Consistency of the pair is not assumed; run ``check_assumptions`` to
    validate normalization, growth, and the finite-difference match.
    """
    return Potential(PotentialKind.CUSTOM, psi=psi, dpsi=dpsi,
                     params={"name": name}, smooth=smooth)


CATALOG = {
    "saturable-log": saturable_log,
    "saturable-arctan": saturable_arctan,
    "exp-quadratic": exp_quadratic,
    "nonconvex-rational": nonconvex_rational,
    "quartic": quartic,
}


def parse_potential_spec(spec: str) -> Potential:
    """Parse a CLI potential name, e.g. ``quartic`` or ``power:eta=1.5,c=2``."""
    spec = spec.strip()
    if spec in CATALOG:
        return CATALOG[spec]()
    if spec.startswith("power:") or spec == "power":
        kv = {}
        body = spec.partition(":")[2]
        for item in filter(None, body.split(",")):
            key, _, val = item.partition("=")
            kv[key.strip()] = float(val)
        return power_law(eta=kv.get("eta", 1.0), c=kv.get("c", 1.0))
    raise ValueError(
        f"unknown potential {spec!r}; expected one of "
        f"{sorted(CATALOG)} or power:eta=<r>,c=<r>"
    )


def _check_domain(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise DomainError("potential evaluated at x < 0")
    return arr


def eval_psi(p: Potential, x):
    """Evaluate psi(x) for x >= 0; raises DomainError for negative input."""
    arr = _check_domain(x)
    out = p.psi(arr)
    return float(out) if np.isscalar(x) or np.ndim(x) == 0 else np.asarray(out)


def eval_dpsi(p: Potential, x):
    """Evaluate dpsi(x) for x >= 0; raises DomainError for negative input."""
    arr = _check_domain(x)
    out = p.dpsi(arr)
    return float(out) if np.isscalar(x) or np.ndim(x) == 0 else np.asarray(out)


class Check(Enum):
    NORMALIZATION = "normalization"
    SUPER_LINEARITY = "super-linearity"
    NON_NEGATIVITY = "non-negativity"
    NON_DEGENERACY = "non-degeneracy"
    CONSISTENCY = "consistency"


@dataclass(frozen=True)
class Violation:
    x: float
    check: Check
    lhs: float
    rhs: float


@dataclass(frozen=True)
class AssumptionReport:
    passed: bool
    violations: list
    grid: str

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "grid": self.grid,
            "violations": [
                {"x": v.x, "check": v.check.value, "lhs": v.lhs, "rhs": v.rhs}
                for v in self.violations
            ],
        }


# absolute slack on inequality checks; roundoff in psi/dpsi stays well below
SLACK = 1e-12


def check_assumptions(p: Potential, x_max: float, samples: int) -> AssumptionReport:
    """Verify the growth assumptions on a geometric-plus-linear grid over (0, x_max].

    Reports every violated inequality with both sides. The finite-difference
    consistency of (psi, dpsi) is checked away from zero for smooth potentials.
    """
    if x_max <= 0:
        raise ValueError("x_max must be positive")
    if samples < 2:
        raise ValueError("samples must be at least 2")

    n_geo = samples // 2
    n_lin = samples - n_geo
    geo = np.geomspace(1e-8, x_max, max(n_geo, 2))
    lin = np.linspace(x_max / n_lin, x_max, max(n_lin, 2))
    xs = np.unique(np.concatenate([geo, lin]))
    violations: list[Violation] = []

    def bad(x, check, lhs, rhs):
        violations.append(Violation(float(x), check, float(lhs), float(rhs)))

    # normalization at x = 0 (values must be finite and vanish)
    try:
        psi0 = float(p.psi(np.asarray(0.0)))
        dpsi0 = float(p.dpsi(np.asarray(0.0)))
    except (ArithmeticError, ValueError):
        psi0, dpsi0 = np.nan, np.nan
    if not np.isfinite(psi0) or abs(psi0) > SLACK:
        bad(0.0, Check.NORMALIZATION, psi0, 0.0)
    if not np.isfinite(dpsi0) or abs(dpsi0) > SLACK:
        bad(0.0, Check.NORMALIZATION, dpsi0, 0.0)

    with np.errstate(all="ignore"):
        psi_vals = np.asarray(p.psi(xs), dtype=float)
        dpsi_vals = np.asarray(p.dpsi(xs), dtype=float)

    # super-linearity makes {psi > 0} an up-set, so a vanishing value is a
    # decidable degeneracy exactly when it sits above a measurably positive
    # one (well clear of the rounding noise of O(x) intermediates); near zero
    # a very flat psi rounds to 0.0 and positivity is unknowable
    noise = 8.0 * np.finfo(float).eps * xs
    positive = np.flatnonzero(np.isfinite(psi_vals) & (psi_vals > noise))
    first_positive = xs[positive[0]] if positive.size else np.inf

    for x, ps, dps in zip(xs, psi_vals, dpsi_vals):
        if not (np.isfinite(ps) and np.isfinite(dps)):
            bad(x, Check.NORMALIZATION, ps if np.isfinite(dps) else dps, 0.0)
            continue
        if ps < -SLACK:
            bad(x, Check.NON_NEGATIVITY, ps, 0.0)
        if x * dps - ps < -SLACK:
            bad(x, Check.SUPER_LINEARITY, x * dps, ps)
        if ps <= 0.0 and x > first_positive:
            bad(x, Check.NON_DEGENERACY, ps, 0.0)
    if not positive.size:
        bad(x_max, Check.NON_DEGENERACY, float(psi_vals[-1]), 0.0)

    if p.smooth:
        fd_xs = np.geomspace(0.05 * x_max, x_max, 64)
        h = 6e-6 * fd_xs
        with np.errstate(all="ignore"):
            fd = (np.asarray(p.psi(fd_xs + h), float)
                  - np.asarray(p.psi(fd_xs - h), float)) / (2.0 * h)
            exact = np.asarray(p.dpsi(fd_xs), float)
        scale = np.maximum(np.abs(exact), 1e-300)
        rel = np.abs(fd - exact) / scale
        for x, f, e, r in zip(fd_xs, fd, exact, rel):
            if not np.isfinite(r) or r > 1e-6:
                bad(x, Check.CONSISTENCY, f, e)

    grid = (f"geometric 1e-08..{x_max:g} plus uniform, {xs.size} points; "
            f"fd check on [{0.05 * x_max:g}, {x_max:g}]"
            + ("" if p.smooth else " (skipped: declared non-smooth)"))
    return AssumptionReport(passed=not violations, violations=violations, grid=grid)

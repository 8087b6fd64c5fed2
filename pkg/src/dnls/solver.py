"""Constrained maximization of the lattice energy on the sphere of fixed power.

The engine maximizes P(u) = alpha*L(u) + W(u) over profiles with
sum u_j^2 = rho inside the cone of non-negative even unimodal sequences.
One update step is the normalized ascent map

    I(u) = sqrt(rho) * (u + tau*F(u)) / ||u + tau*F(u)||,
    F(u) = grad P(u) - sigma(u) * u,   sigma(u) = <grad P(u), u> / ||u||^2,

which preserves the constraint exactly. Fixed points solve the standing-wave
equation sigma*u_j = alpha*(u_{j+1}+u_{j-1}) + dpsi(u_j^2)*u_j with frequency
sigma(u)/2 (the gradient of P at a wave is twice the frequency times u).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .functionals import (DegenerateProfileError, EnergyBreakdown, energy,
                          residual)
from .lattice import (Cell, IndexScheme, Profile, cone_slack, in_cone,
                      neighbor_sum, project_cone, restrict)
from .potentials import Potential, check_assumptions


class TailTooShortError(RuntimeError):
    """Raised when a profile has no usable exponential tail to fit."""


class ConeGuard(Enum):
    OFF = "off"
    MONITOR = "monitor"
    PROJECT = "project"


# acceptance slack for the monotone-energy backtracking test; for energies
# beyond ~45 the nominal 1e-14 would be sub-ulp and acceptance would turn
# into a rounding lottery, so the slack never falls below one part in 2^52
_ENERGY_SLACK = 1e-14


def _energy_slack(p0: float) -> float:
    return max(_ENERGY_SLACK, np.finfo(float).eps * abs(p0))
_MAX_HALVINGS = 30
# sup-distance to the flat profile below which a run counts as near-constant
_NEAR_CONSTANT_TOL = 1e-8
# slack used when monitoring cone membership of iterates
_CONE_MONITOR_TOL = 1e-12


@dataclass
class SolverConfig:
    alpha: float
    rho: float
    scheme: IndexScheme = IndexScheme.ON_SITE
    n: int = 25
    tau: float = 1.0
    tol_residual: float = 1e-10
    tol_step: float = 1e-12
    max_iters: int = 1_000_000
    cone_guard: ConeGuard = ConeGuard.MONITOR
    backtracking: bool = True
    ansatz_samples: int = 100
    seed: int = 0  # reserved for randomized tie-breaking; ties are currently deterministic

    def validate(self) -> None:
        if not isinstance(self.n, int) or self.n < 2:
            raise ValueError("N must be >= 2")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.rho <= 0:
            raise ValueError("rho must be positive")
        if not 0 < self.tau <= 1e3:
            raise ValueError("tau must lie in (0, 1e3]")
        if self.tol_residual <= 0 or self.tol_step <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")
        if self.ansatz_samples < 1:
            raise ValueError("ansatz_samples must be positive")

    def cell(self) -> Cell:
        return Cell.periodic(self.scheme, self.n)

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "rho": self.rho,
            "scheme": self.scheme.value,
            "n": self.n,
            "tau": self.tau,
            "tol_residual": self.tol_residual,
            "tol_step": self.tol_step,
            "max_iters": self.max_iters,
            "cone_guard": self.cone_guard.value,
            "backtracking": self.backtracking,
            "ansatz_samples": self.ansatz_samples,
            "seed": self.seed,
        }

    @staticmethod
    def from_dict(data: dict) -> "SolverConfig":
        kwargs = dict(data)
        if "scheme" in kwargs:
            kwargs["scheme"] = IndexScheme(kwargs["scheme"])
        if "cone_guard" in kwargs:
            kwargs["cone_guard"] = ConeGuard(kwargs["cone_guard"])
        return SolverConfig(**kwargs)


@dataclass(frozen=True)
class DecayFit:
    fitted_rate: float
    bound_rate: float
    linear_rate: float
    tail_window: tuple
    fit_residual: float

    def to_dict(self) -> dict:
        return {
            "fitted_rate": self.fitted_rate,
            "bound_rate": self.bound_rate,
            "linear_rate": self.linear_rate,
            "tail_window": list(self.tail_window),
            "fit_residual": self.fit_residual,
        }


@dataclass
class RunDiagnostics:
    """Per-run monitors: constraint drift, energy monotonicity, cone membership."""

    max_power_drift: float = 0.0          # relative to rho
    min_energy_increment: float = math.inf
    cone_violations: int = 0
    max_cone_slack: float = 0.0
    max_halvings: int = 0
    restarted: bool = False
    stop_reason: str = ""

    def to_dict(self) -> dict:
        inc = self.min_energy_increment
        return {
            "max_power_drift": self.max_power_drift,
            "min_energy_increment": None if math.isinf(inc) else inc,
            "cone_violations": self.cone_violations,
            "max_cone_slack": self.max_cone_slack,
            "max_halvings": self.max_halvings,
            "restarted": self.restarted,
            "stop_reason": self.stop_reason,
        }


@dataclass
class WaveSolution:
    profile: Profile
    sigma: float
    energies: EnergyBreakdown
    residual: float
    iterations: int
    converged: bool
    in_cone: bool
    near_constant: bool
    decay: DecayFit | None
    diagnostics: RunDiagnostics

    def to_dict(self, cfg: SolverConfig | None = None) -> dict:
        out = {
            "sigma": self.sigma,
            "residual": self.residual,
            "iterations": self.iterations,
            "converged": self.converged,
            "in_cone": self.in_cone,
            "near_constant": self.near_constant,
            "energies": self.energies.to_dict(),
            "decay": self.decay.to_dict() if self.decay else None,
            "diagnostics": self.diagnostics.to_dict(),
        }
        if cfg is not None:
            out = {"config": cfg.to_dict(), **out}
        return out


def _p_value(v: np.ndarray, p: Potential, alpha: float) -> float:
    # compensated summation: step acceptance compares energies whose true
    # difference can sit below the roundoff of a naive sum
    terms = np.concatenate([2.0 * alpha * v * np.roll(v, -1), p.psi(v * v)])
    return math.fsum(terms)


def _flow(v: np.ndarray, p: Potential, alpha: float):
    """Gradient, flow multiplier, constrained field, and standing-wave residual."""
    g = 2.0 * alpha * neighbor_sum(v, True) + 2.0 * p.dpsi(v * v) * v
    n = float(v @ v)
    sig_flow = float(g @ v) / n
    f = g - sig_flow * v
    res = 0.5 * float(np.max(np.abs(f)))
    return sig_flow, f, res


def _simplex_weights(n_samples: int) -> np.ndarray:
    """All non-negative integer 4-tuples with the smallest sum whose count reaches n_samples."""
    total = 1
    while math.comb(total + 3, 3) < n_samples:
        total += 1
    rows = [
        (a, b, c, total - a - b - c)
        for a in range(total + 1)
        for b in range(total + 1 - a)
        for c in range(total + 1 - a - b)
    ]
    return np.asarray(rows, dtype=float)


def _ansatz_candidates(cfg: SolverConfig, p: Potential):
    """All ansatz candidates (rescaled to power rho) and their energies."""
    cell = cfg.cell()
    aj = np.abs(cell.indices())
    terms = np.stack([
        np.ones_like(aj),
        (aj < 1.0).astype(float),
        1.0 + np.cos(np.pi * aj / cfg.n),
        np.exp(-20.0 * (aj / cfg.n) ** 2),
    ])
    cands = _simplex_weights(cfg.ansatz_samples) @ terms
    norms = np.einsum("ij,ij->i", cands, cands)
    cands *= np.sqrt(cfg.rho / norms)[:, None]
    p_vals = (2.0 * cfg.alpha * np.einsum("ij,ij->i", cands, np.roll(cands, -1, axis=1))
              + np.sum(p.psi(cands * cands), axis=1))
    return cands, p_vals


def initial_ansatz(cfg: SolverConfig, p: Potential) -> Profile:
    """Best starting profile from a four-term family of even unimodal shapes.

    Candidates are kappa_1 + kappa_2*chi_j + kappa_3*(1+cos(pi j/N))
    + kappa_4*exp(-20 (j/N)^2) with chi the indicator of |j| < 1, sampled on a
    deterministic simplex grid of at least ``ansatz_samples`` weight tuples.
    Each candidate is rescaled to power rho; the energy maximizer wins, ties
    broken by enumeration order.
    """
    cell = cfg.cell()
    cands, p_vals = _ansatz_candidates(cfg, p)
    best = Profile(cell, cands[int(np.argmax(p_vals))])
    if not in_cone(best):
        best = project_cone(best)
        best = best.with_values(best.values * math.sqrt(cfg.rho / (best.values @ best.values)))
    return best


# energy gains above this relative scale are clearly measurable; below it
# they drown in the roundoff of evaluating the energy terms
_GROWTH_EVIDENCE = 1e-12
# allowed per-step relative growth of the residual: the sup-residual may rise
# a little on the legitimate path (the leading site can switch), while an
# unstable step size multiplies it by a visibly larger factor
_RES_GROWTH = 1e-2


def _step(v: np.ndarray, cfg: SolverConfig, p: Potential, flow0, cell: Cell,
          tau: float, p0: float | None = None):
    """One normalized ascent step with backtracking.

    The trial step is halved (up to 30 times) until the candidate is
    admissible: the energy must not decrease beyond slack, the candidate must
    stay in the cone (unless the guard is off), and, once energy gains are
    too small to measure, the standing-wave residual must not grow by more
    than a token factor. The continuous flow satisfies all three, so a
    violation marks a too-large discrete step; the residual test keeps the
    endgame contracting where energy comparisons drown in roundoff. If no
    admissible step is found the input is returned unchanged (surfaced as
    stagnation by the caller).

    Returns (w, flow_of_w, p0, p1, cone_slack, tau_used, halvings, stalled);
    flow_of_w carries (multiplier, field, residual) at the accepted point.
    """
    sqrt_rho = math.sqrt(cfg.rho)
    if p0 is None:
        # baseline energy of the renormalized point: candidates pass through
        # the same normalization, so its ulp-level radial shift of P (about
        # rho*sigma*eps) cancels out of the comparison and the gain vanishes
        # as tau goes to zero
        base = v * (sqrt_rho / float(np.sqrt(v @ v)))
        p0 = _p_value(base, p, cfg.alpha)
    # the smooth 2-norm of the field serves as the contraction measure; the
    # sup residual can rise at a kink when the leading site switches. The
    # ulp-level renormalization jitter shifts the field by about
    # eps*multiplier*sqrt(rho), which the comparison must tolerate.
    res0 = float(np.linalg.norm(flow0[1]))
    res_limit = res0 * (1.0 + _RES_GROWTH) \
        + 8.0 * np.finfo(float).eps * abs(flow0[0]) * sqrt_rho
    check_cone = cfg.cone_guard is not ConeGuard.OFF
    halvings = 0
    f = flow0[1]
    for attempt in range(_MAX_HALVINGS + 1):
        w = v + tau * f
        norm = float(np.sqrt(w @ w))
        if norm == 0.0:
            raise DegenerateProfileError("ascent step collapsed to the zero profile")
        w *= sqrt_rho / norm
        p1 = _p_value(w, p, cfg.alpha)
        slack = cone_slack(Profile(cell, w)) if check_cone else 0.0
        flow_w = _flow(w, p, cfg.alpha)
        if not cfg.backtracking:
            return w, flow_w, p0, p1, slack, tau, halvings, False
        gain = p1 - p0
        admissible = gain >= -_energy_slack(p0) and slack <= _CONE_MONITOR_TOL
        if admissible and (gain > _GROWTH_EVIDENCE * max(1.0, abs(p1))
                           or float(np.linalg.norm(flow_w[1])) <= res_limit):
            return w, flow_w, p0, p1, slack, tau, halvings, False
        tau *= 0.5
        halvings = attempt + 1
    return v, flow0, p0, p0, 0.0, tau, halvings, True


def iterate_once(u: Profile, cfg: SolverConfig, p: Potential) -> Profile:
    """Apply the normalized ascent map once (with backtracking if enabled)."""
    v = u.values
    if float(v @ v) == 0.0:
        raise DegenerateProfileError("iteration undefined for the zero profile")
    flow0 = _flow(v, p, cfg.alpha)
    w, _, _, _, slack, _, _, _ = _step(v.copy(), cfg, p, flow0, u.cell, cfg.tau)
    if cfg.cone_guard is ConeGuard.PROJECT and slack > _CONE_MONITOR_TOL:
        proj = project_cone(Profile(u.cell, w)).values
        w = proj * math.sqrt(cfg.rho / float(proj @ proj))
    return u.with_values(w)


def _run(v: np.ndarray, cfg: SolverConfig, p: Potential, cell: Cell,
         diag: RunDiagnostics, budget: int):
    """Iterate to a stopping rule; returns (values, flow multiplier, residual, steps).

    The accepted step size is carried to the next trial with one doubling
    (capped at the configured tau); oversized trials are cut back by the
    admissibility tests inside the step. Fixed points of the map do not
    depend on the step size.
    """
    flow0 = _flow(v, p, cfg.alpha)
    sig_flow, f, res = flow0
    steps = 0
    guard = cfg.cone_guard
    tau_trial = cfg.tau
    tiny_streak = 0
    for _ in range(budget):
        if res <= cfg.tol_residual:
            diag.stop_reason = "residual"
            return v, sig_flow, res, steps
        w, flow_w, p0, p1, slack, tau_used, halvings, stalled = _step(
            v, cfg, p, flow0, cell, tau_trial)
        steps += 1
        diag.min_energy_increment = min(diag.min_energy_increment, p1 - p0)
        diag.max_halvings = max(diag.max_halvings, halvings)
        if guard is not ConeGuard.OFF:
            diag.max_cone_slack = max(diag.max_cone_slack, slack)
            if slack > _CONE_MONITOR_TOL:
                diag.cone_violations += 1
                if guard is ConeGuard.PROJECT:
                    proj = project_cone(Profile(cell, w)).values
                    w = proj * math.sqrt(cfg.rho / float(proj @ proj))
                    flow_w = _flow(w, p, cfg.alpha)
        drift = abs(float(w @ w) - cfg.rho) / cfg.rho
        diag.max_power_drift = max(diag.max_power_drift, drift)
        step_size = float(np.max(np.abs(w - v)))
        v = w
        flow0 = flow_w
        sig_flow, f, res = flow0
        if cfg.backtracking:
            # one freak deep backtrack must not destroy the carried size
            tau_trial = min(cfg.tau, max(2.0 * tau_used, 0.25 * tau_trial))
        # a tiny step only counts as stagnation when nothing bigger was on
        # offer (a full-size trial barely moved, an exact no-op, or every
        # size rejected) or when it persists across many iterations
        tiny_streak = tiny_streak + 1 if step_size <= cfg.tol_step else 0
        if (stalled or step_size == 0.0 or tiny_streak >= 40
                or (tiny_streak and tau_used >= cfg.tau)):
            diag.stop_reason = "residual" if res <= cfg.tol_residual else "stagnation"
            return v, sig_flow, res, steps
    diag.stop_reason = "residual" if res <= cfg.tol_residual else "max_iters"
    return v, sig_flow, res, steps


def _is_near_constant(v: np.ndarray, cfg: SolverConfig) -> bool:
    return float(np.max(np.abs(v - math.sqrt(cfg.rho / cfg.n)))) <= _NEAR_CONSTANT_TOL


def solve(cfg: SolverConfig, p: Potential) -> WaveSolution:
    """Maximize the energy at fixed power and return the converged standing wave.

    The run starts from the best ansatz candidate and stops on the
    standing-wave residual (primary) or iterate stagnation (secondary). The
    flat profile is always a fixed point; a run that lands within
    sup-distance 1e-8 of it is flagged near_constant and retried once from a
    small center-weighted perturbation, keeping the higher-energy outcome.
    The small kick deliberately stays inside the basin of a genuinely flat
    local maximum. Non-convergence is reported through the returned flags,
    not raised.
    """
    cfg.validate()
    report = check_assumptions(p, x_max=max(cfg.rho, 1.0), samples=400)
    if not report.passed:
        kinds = sorted({v.check.value for v in report.violations})
        raise ValueError(f"potential violates growth assumptions on [0, rho]: {kinds}")

    cell = cfg.cell()
    diag = RunDiagnostics()
    v0 = initial_ansatz(cfg, p).values.copy()
    v, sig_flow, res, steps = _run(v0, cfg, p, cell, diag, cfg.max_iters)
    iterations = steps

    if _is_near_constant(v, cfg) and iterations < cfg.max_iters:
        diag.restarted = True
        kicked = v.copy()
        d = np.abs(cell.doubled_indices())
        kicked[d == d.min()] += 1e-3 * math.sqrt(cfg.rho)
        kicked *= math.sqrt(cfg.rho / float(kicked @ kicked))
        v2, sig2, res2, steps2 = _run(kicked, cfg, p, cell, diag,
                                      cfg.max_iters - iterations)
        iterations += steps2
        if _p_value(v2, p, cfg.alpha) >= _p_value(v, p, cfg.alpha):
            v, sig_flow, res = v2, sig2, res2

    profile = Profile(cell, v)
    freq = 0.5 * sig_flow
    final_residual = residual(profile, freq, p, cfg.alpha)
    converged = final_residual <= cfg.tol_residual
    sol = WaveSolution(
        profile=profile,
        sigma=freq,
        energies=energy(profile, p, cfg.alpha),
        residual=final_residual,
        iterations=iterations,
        converged=converged,
        in_cone=in_cone(profile, tol=_CONE_MONITOR_TOL),
        near_constant=_is_near_constant(v, cfg),
        decay=None,
        diagnostics=diag,
    )
    if converged and sol.sigma > 2.0 * cfg.alpha:
        try:
            sol.decay = decay_fit(sol, cfg)
        except TailTooShortError:
            sol.decay = None
    return sol


def decay_fit(sol: WaveSolution, cfg: SolverConfig) -> DecayFit:
    """Affine fit of log u_j against |j| over the exponential tail.

    The window runs from the first index where u drops below 0.1*max(u) out
    to the last index with u above 1e-13*sqrt(rho); on periodic cells the
    outer edge additionally stays two sites clear of the cell boundary, where
    the periodic image flattens the tail. Reports the fitted rate, the
    a-priori rate -log(alpha/(sigma-alpha)), and the rate of the linearized
    tail recurrence sigma = alpha*(kappa + 1/kappa).
    """
    if not sol.converged:
        raise ValueError("decay fit requires a converged solution")
    alpha, sig = cfg.alpha, sol.sigma
    if sig <= 2.0 * alpha:
        raise ValueError("decay fit requires sigma > 2*alpha")

    prof = sol.profile
    j = prof.cell.indices()
    v = prof.values
    right = j > 0
    jr, vr = j[right], v[right]
    order = np.argsort(jr)
    jr, vr = jr[order], vr[order]

    floor = 1e-13 * math.sqrt(cfg.rho)
    inner_mask = vr < 0.1 * float(np.max(v))
    usable = (vr > floor) & inner_mask
    if prof.cell.is_finite:
        usable &= jr <= prof.cell.symmetric_doubled_max() / 2.0 - 2.0
    jw, vw = jr[usable], vr[usable]
    if jw.size < 4:
        raise TailTooShortError(f"only {jw.size} tail points available")

    slope, intercept = np.polyfit(jw, np.log(vw), 1)
    fit_res = float(np.max(np.abs(np.log(vw) - (intercept + slope * jw))))
    kappa_lin = (sig - math.sqrt(sig * sig - 4.0 * alpha * alpha)) / (2.0 * alpha)
    return DecayFit(
        fitted_rate=float(-slope),
        bound_rate=-math.log(alpha / (sig - alpha)),
        linear_rate=-math.log(kappa_lin),
        tail_window=(float(jw[0]), float(jw[-1])),
        fit_residual=fit_res,
    )


class HomoclinicVerdict(Enum):
    LOCALIZED = "localized"
    DELOCALIZING = "delocalizing"
    UNDETERMINED = "undetermined"


@dataclass
class HomoclinicResult:
    solutions: list
    restricted: list
    n_sequence: list
    t_values: list
    sup_diffs: list
    tail_fractions: list
    max_amplitudes: list
    verdict: HomoclinicVerdict
    margin: float

    def to_dict(self) -> dict:
        return {
            "n_sequence": list(self.n_sequence),
            "t_values": list(self.t_values),
            "sup_diffs": list(self.sup_diffs),
            "tail_fractions": list(self.tail_fractions),
            "max_amplitudes": list(self.max_amplitudes),
            "verdict": self.verdict.value,
            "margin": self.margin,
        }


def homoclinic(cfg: SolverConfig, p: Potential, n_sequence,
               margin: float = 1e-3) -> HomoclinicResult:
    """Solve along increasing cell sizes and classify the infinite-size limit.

    Each maximizer is zero-extended to a common truncated lattice; the runs
    are classified Localized when every normalized energy stays above
    2 + margin and successive extended profiles approach each other, and
    Delocalizing when the normalized energy decays towards 2 while the peak
    amplitude shrinks.
    """
    n_sequence = [int(n) for n in n_sequence]
    if len(n_sequence) < 2 or any(b <= a for a, b in zip(n_sequence, n_sequence[1:])):
        raise ValueError("n_sequence must be at least two strictly increasing sizes")

    common = Cell.truncated(cfg.scheme, max(n_sequence) / 2.0 + 1.0)
    solutions, restricted = [], []
    for n in n_sequence:
        sol = solve(replace(cfg, n=n), p)
        solutions.append(sol)
        restricted.append(restrict(sol.profile, common))

    t_values = [s.energies.t_value for s in solutions]
    max_amps = [float(np.max(s.profile.values)) for s in solutions]
    sup_diffs = [float(np.max(np.abs(b.values - a.values)))
                 for a, b in zip(restricted, restricted[1:])]
    tail_fracs = []
    for n, s in zip(n_sequence, solutions):
        jj = np.abs(s.profile.cell.indices())
        mass = float(np.sum(s.profile.values[jj > n / 4.0] ** 2))
        tail_fracs.append(mass / cfg.rho)

    diffs_shrink = all(b <= a + 1e-12 for a, b in zip(sup_diffs, sup_diffs[1:]))
    if all(t >= 2.0 + margin for t in t_values) and diffs_shrink:
        verdict = HomoclinicVerdict.LOCALIZED
    elif (all(b < a for a, b in zip(t_values, t_values[1:]))
          and all(b < a for a, b in zip(max_amps, max_amps[1:]))
          and t_values[-1] < 2.0 + margin):
        verdict = HomoclinicVerdict.DELOCALIZING
    else:
        verdict = HomoclinicVerdict.UNDETERMINED
    return HomoclinicResult(solutions, restricted, n_sequence, t_values,
                            sup_diffs, tail_fracs, max_amps, verdict, margin)


def oracle_maximize(cfg: SolverConfig, p: Potential, grid_points: int = 2000):
    """Brute-force maximum of P on cone-and-sphere for cells of at most 4 sites.

    After symmetrization and normalization at most two amplitude ratios
    remain free; those are scanned on a uniform grid with ``grid_points``
    samples per dimension and sharpened by windowed refinement. Returns the
    best profile and its energy, independent of the ascent iteration.
    """
    cfg.validate()
    if cfg.n > 4:
        raise ValueError("the brute-force oracle covers N <= 4 only")
    cell = cfg.cell()
    d = np.abs(cell.doubled_indices())
    levels = np.unique(d)
    site_level = np.searchsorted(levels, d)
    mult = np.bincount(site_level).astype(float)
    dims = levels.size - 1

    def best_on(grids):
        mesh = np.meshgrid(*grids, indexing="ij") if grids else []
        ratios = np.stack([m.ravel() for m in mesh], axis=1) if grids else np.zeros((1, 0))
        amps = np.cumprod(np.hstack([np.ones((ratios.shape[0], 1)), ratios]), axis=1)
        scale = np.sqrt(cfg.rho / np.einsum("ij,j,ij->i", amps, mult, amps))
        amps *= scale[:, None]
        vals = amps[:, site_level]
        p_all = (2.0 * cfg.alpha * np.einsum("ij,ij->i", vals, np.roll(vals, -1, axis=1))
                 + np.sum(p.psi(vals * vals), axis=1))
        k = int(np.argmax(p_all))
        return ratios[k], float(p_all[k]), vals[k]

    g = max(int(grid_points), 3)
    if dims == 2:
        g = min(g, 701)  # refinement recovers the resolution of a huge flat grid
    if dims == 0:
        _, p_best, v_best = best_on([])
        return Profile(cell, v_best), p_best

    grids = [np.linspace(0.0, 1.0, g) for _ in range(dims)]
    spacing = [1.0 / (g - 1)] * dims
    r_best, p_best, v_best = best_on(grids)
    for _ in range(5):
        grids = []
        for i in range(dims):
            lo = max(0.0, r_best[i] - 2.0 * spacing[i])
            hi = min(1.0, r_best[i] + 2.0 * spacing[i])
            grids.append(np.linspace(lo, hi, g))
            spacing[i] = (hi - lo) / (g - 1)
        r_best, p_best, v_best = best_on(grids)
    return Profile(cell, v_best), p_best

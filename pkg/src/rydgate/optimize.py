"""Pulse-parameter search: minimum-duration gates per pulse family,
fixed-duration infidelity minimization, the dCRAB super-iteration loop, and
one-variable sweeps with warm starts.

Objectives are evaluated on the idealized three-level model (decay-free Bell
infidelity plus leakage) through the compiled fast path; error-budget
evaluation of found pulses uses the full model elsewhere.

Minimum-duration searches exploit the structure of the landscape: at fixed
duration the pulse parameters can close the gate (drive the leaked
amplitudes to their floor), while the controlled-phase condition selects
isolated durations. The search therefore anchors a solution branch from
family seeds, marches the duration down (and up) re-closing the gate at
each step, and bisects on the sign of the phase defect; a least-squares
polish of the closure residuals then pins the phase condition to ~1e-6.

For sharp-envelope families (constant drive switched off instantly) the
closure floor is set by a residual doubly-excited amplitude that cannot be
removed at finite blockade strength; at V/(hbar Omega0) ~ 21 this floor is
~1e-5 in total leakage, which is why the default feasibility threshold is
2.5e-5 rather than an idealized 1e-6 (smoothly ramped envelopes close the
gate exactly and pass far below the threshold).
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import least_squares, minimize

from ._fast import (IdealGate, bell_infidelity_ideal, ideal_gate,
                    leakage_ideal, phase_defect_ideal)
from .pulses import Family, PulseShape, random_frequencies

PHASE_TOLERANCE = 1e-5
TAU_RESOLUTION = 1e-3
DEFAULT_FEASIBILITY = 2.5e-5

OBJECTIVES = ("min_duration_feasible", "min_bell_infidelity", "min_rydberg_time")

# Branch anchors per family: (parameters, anchor duration). These sit on the
# solution branch that reproduces the reference gates at V/(hbar Omega0) = 21;
# the march and warm-started sweeps carry them to other settings.
_ANCHORS = {
    Family.DELTA_JUMP: (((0.41, -2.35), 8.60),
                        ((-0.41, 2.35), 8.60)),
    Family.TRIANGLE: (((1.09, -1.92, 0.92), 7.70),
                      ((-1.09, 1.92, 0.92), 7.70)),
    Family.GAUSSIAN: (((1.20, -1.85, 1.69), 7.72),
                      ((-1.20, 1.85, 1.69), 7.72)),
    Family.GAUSSIAN_RAMPED: (((1.20, -1.85, 1.69), 7.72),
                             ((-1.20, 1.85, 1.69), 7.72)),
}

# How far the duration march explores around its anchor; branches of
# interest live within a fraction of a Rabi period of the seed.
_MARCH_SPAN = 0.6


@dataclass
class OptimizationProblem:
    """One search setup: family, objective and blockade strength.

    ``fixed`` pins pulse parameters the search must not vary (the Gaussian
    width along a width sweep, kappa for the ramped family, tau for
    fixed-duration objectives). ``bounds`` overrides per-parameter search
    bounds. Feasibility requires the decay-free Bell infidelity and the
    total leakage below ``feasibility_threshold`` and the controlled-phase
    condition within PHASE_TOLERANCE.
    """

    family: Family
    v: float
    objective: str = "min_duration_feasible"
    feasibility_threshold: float = DEFAULT_FEASIBILITY
    fixed: dict = field(default_factory=dict)
    bounds: dict = field(default_factory=dict)
    tau_range: tuple = (6.8, 10.0)
    n_restarts: int = 5
    march_step: float = 0.025
    search_rtol: float = 1e-9
    polish_rtol: float = 1e-12
    dcrab_components: int = 4
    dcrab_f_max: float = 3.0 / (2.0 * math.pi)

    def __post_init__(self):
        if self.objective not in OBJECTIVES:
            raise ValueError(f"unknown objective {self.objective!r}")
        if self.feasibility_threshold <= 0:
            raise ValueError("feasibility threshold must be positive")
        if self.family is Family.GAUSSIAN_RAMPED and "kappa" not in self.fixed:
            raise ValueError("gaussian_ramped search requires fixed['kappa']")
        if self.objective != "min_duration_feasible" and "tau" not in self.fixed:
            raise ValueError(f"{self.objective} requires fixed['tau']")


@dataclass
class OptimizationResult:
    pulse: PulseShape
    params: dict
    feasible: bool
    objective_value: float
    bell_infidelity: float
    leakage: float
    phase_defect: float
    tau: float
    t_r_01: float
    t_r_11: float
    t_rr: float
    tbar_r: float
    evaluations: int
    trace: list
    seed: int | None = None

    def trace_rows(self):
        """Convergence-trace rows: (evaluation, objective, parameters...)."""
        return [(n, obj) + tuple(x) for n, obj, x in self.trace]


def _param_names(problem: OptimizationProblem) -> tuple:
    if problem.family in (Family.GAUSSIAN, Family.GAUSSIAN_RAMPED):
        names = ("delta0", "amp", "width")
    elif problem.family is Family.TRIANGLE:
        names = ("delta0", "height", "base_frac")
    elif problem.family is Family.DELTA_JUMP:
        names = ("delta0", "theta")
    else:
        n = len(problem.fixed.get("active_freqs", ())) or problem.dcrab_components
        names = ("delta0",) + tuple(f"amp_{k}" for k in range(n))
    return tuple(n for n in names if n not in problem.fixed)


def _default_bound(name: str, problem: OptimizationProblem) -> tuple:
    if name in problem.bounds:
        return problem.bounds[name]
    if name == "delta0":
        return (-4.0, 4.0)
    if name == "width":
        return (0.05, 4.0)
    if name in ("amp", "height"):
        w = problem.fixed.get("width")
        lim = max(8.0, 4.5 / max(w, 0.03)) if w else 8.0
        return (-lim, lim)
    if name == "base_frac":
        return (0.05, 1.0)
    if name == "theta":
        return (-math.pi, math.pi)
    return (-3.0, 3.0)  # dcrab component amplitudes


class _Search:
    """Shared evaluation state: pulse construction, counters, trace."""

    def __init__(self, problem: OptimizationProblem):
        self.problem = problem
        self.names = _param_names(problem)
        self.lower = np.array([_default_bound(n, problem)[0] for n in self.names])
        self.upper = np.array([_default_bound(n, problem)[1] for n in self.names])
        self.evaluations = 0
        self.trace = []
        self._best = math.inf

    def pulse(self, tau: float, x) -> PulseShape:
        p = dict(self.problem.fixed)
        p.update(zip(self.names, x))
        fam = self.problem.family
        if fam in (Family.GAUSSIAN, Family.GAUSSIAN_RAMPED):
            kw = dict(delta0=p["delta0"], amp=p["amp"], width=p["width"])
            if fam is Family.GAUSSIAN_RAMPED:
                kw["kappa"] = p["kappa"]
        elif fam is Family.TRIANGLE:
            kw = dict(delta0=p["delta0"], height=p["height"],
                      base=min(1.0, max(p["base_frac"], 1e-3)) * tau)
        elif fam is Family.DELTA_JUMP:
            kw = dict(delta0=p["delta0"],
                      jump_points=((tau / 2.0, p["theta"]),))
        else:
            amps = tuple(p.get("frozen_amps", ())) + tuple(
                p[f"amp_{k}"] for k in range(len(p.get("active_freqs", ()))))
            freqs = tuple(p.get("frozen_freqs", ())) + tuple(p.get("active_freqs", ()))
            kw = dict(delta0=p["delta0"], amplitudes=amps, frequencies=freqs)
        return PulseShape(family=fam, tau=tau, **kw)

    def gate(self, tau: float, x, rtol=None) -> IdealGate:
        rtol = rtol or self.problem.search_rtol
        self.evaluations += 1
        return ideal_gate(self.pulse(tau, x), self.problem.v,
                          rtol=rtol, atol=rtol * 1e-2)

    def record(self, x, value):
        if value < self._best:
            self._best = value
            self.trace.append((self.evaluations, value, tuple(float(v) for v in x)))

    def parts(self, tau: float, x, rtol=None):
        g = self.gate(tau, x, rtol or self.problem.polish_rtol)
        return bell_infidelity_ideal(g), leakage_ideal(g), phase_defect_ideal(g), g

    def feasible(self, parts) -> bool:
        eps = self.problem.feasibility_threshold
        return (parts[0] <= eps and parts[1] <= eps
                and abs(parts[2]) <= PHASE_TOLERANCE)

    # -- inner solvers ------------------------------------------------------

    def _leak_residuals(self, tau: float, x, rtol=None):
        g = self.gate(tau, x, rtol or 1e-10)
        return np.array([g.c_0r.real, g.c_0r.imag, g.c_w.real, g.c_w.imag,
                         g.c_rr.real, g.c_rr.imag])

    def close_gate(self, tau: float, x0, rtol=None):
        """Minimize the leaked amplitudes at fixed tau (gate closure)."""
        res = least_squares(
            lambda p: self._leak_residuals(tau, p, rtol),
            np.clip(x0, self.lower, self.upper),
            bounds=(self.lower, self.upper), method="trf",
            xtol=1e-15, ftol=1e-15, gtol=1e-15, diff_step=1e-6, max_nfev=160)
        return res.x

    def polish(self, tau: float, x0):
        """Least squares on closure residuals plus the phase defect."""
        def residuals(p):
            g = self.gate(tau, p, self.problem.polish_rtol)
            return np.array([g.c_0r.real, g.c_0r.imag, g.c_w.real, g.c_w.imag,
                             g.c_rr.real, g.c_rr.imag, phase_defect_ideal(g)])
        res = least_squares(residuals, np.clip(x0, self.lower, self.upper),
                            bounds=(self.lower, self.upper), method="trf",
                            xtol=3e-16, ftol=3e-16, gtol=1e-15,
                            diff_step=1e-6, max_nfev=250)
        return res.x

    def nelder_mead(self, tau: float, x0, leak_only=False, maxfev=None):
        if leak_only:
            def fun(x):
                return leakage_ideal(self.gate(tau, x))
        else:
            def fun(x):
                g = self.gate(tau, x)
                val = bell_infidelity_ideal(g) + leakage_ideal(g)
                self.record(x, val)
                return val
        res = minimize(fun, np.clip(x0, self.lower, self.upper),
                       method="Nelder-Mead",
                       bounds=list(zip(self.lower, self.upper)),
                       options={"xatol": 1e-7, "fatol": 1e-13,
                                "maxfev": maxfev or 250 * len(x0),
                                "adaptive": True})
        return res.x

    def anchors(self, rng, warm=None, tau_hint=None):
        """Start candidates: warm point first, then family anchors, then
        random draws. Each is (x, anchor_tau)."""
        out = []
        if warm is not None:
            out.append((np.asarray(warm["x"], dtype=float), warm["tau"]))
        for params, tau_a in _ANCHORS.get(self.problem.family, ()):
            full = {
                Family.DELTA_JUMP: ("delta0", "theta"),
                Family.TRIANGLE: ("delta0", "height", "base_frac"),
                Family.GAUSSIAN: ("delta0", "amp", "width"),
                Family.GAUSSIAN_RAMPED: ("delta0", "amp", "width"),
            }[self.problem.family]
            named = dict(zip(full, params))
            if all(n in named for n in self.names):
                out.append((np.array([named[n] for n in self.names]),
                            tau_hint or tau_a))
        mid = 0.5 * (self.problem.tau_range[0] + self.problem.tau_range[1])
        for _ in range(self.problem.n_restarts):
            out.append((rng.uniform(self.lower, self.upper), tau_hint or mid))
        return out


def _tbar(g: IdealGate) -> float:
    return (2.0 * g.t_r_01 + g.t_r_11) / 3.0


def _result(search: _Search, tau, x, parts, seed, feasible=None) -> OptimizationResult:
    bell, leak, defect, g = parts
    return OptimizationResult(
        pulse=search.pulse(tau, x),
        params=dict(zip(search.names, (float(v) for v in x))),
        feasible=search.feasible(parts) if feasible is None else feasible,
        objective_value=bell + leak,
        bell_infidelity=bell, leakage=leak, phase_defect=defect,
        tau=float(tau), t_r_01=g.t_r_01, t_r_11=g.t_r_11, t_rr=g.t_rr,
        tbar_r=_tbar(g), evaluations=search.evaluations,
        trace=search.trace, seed=seed,
    )


# ---------------------------------------------------------------------------
# Minimum-duration search: branch march + phase-defect bisection


def _march_branch(search: _Search, tau0, x0, direction, tau_limit):
    """Follow a closure branch in tau, returning rows (tau, x, defect, leak).

    The step adapts to keep successive parameter moves small (the branch
    parameters drift steeply with tau); a row is dropped and the step halved
    when the closure jumps to a different branch.
    """
    step = search.problem.march_step
    min_step = max(TAU_RESOLUTION, search.problem.march_step / 16.0)
    rows = []
    g = search.gate(tau0, x0, 1e-10)
    rows.append((tau0, np.array(x0), phase_defect_ideal(g), leakage_ideal(g)))
    tau, x = tau0, np.array(x0)
    while True:
        tau_next = tau + direction * step
        if (direction < 0 and tau_next < tau_limit) or \
           (direction > 0 and tau_next > tau_limit):
            break
        x_next = search.close_gate(tau_next, x)
        guard = 0.35 + 20.0 * step
        if np.linalg.norm(x_next - x) > guard:
            if step > min_step:
                step = max(step / 2.0, min_step)
                continue
            # cannot follow the branch further
            break
        g = search.gate(tau_next, x_next, 1e-10)
        leak = leakage_ideal(g)
        if leak > 1e-3:
            break
        rows.append((tau_next, x_next, phase_defect_ideal(g), leak))
        tau, x = tau_next, x_next
        step = min(step * 1.4, search.problem.march_step)
    return rows


def _bisect_crossing(search: _Search, row_a, row_b):
    """Locate the phase-defect zero between two branch rows."""
    (t0, x0, d0, _), (t1, x1, d1, _) = row_a, row_b
    while abs(t1 - t0) > TAU_RESOLUTION:
        tm = 0.5 * (t0 + t1)
        xm = search.close_gate(tm, x0 if abs(tm - t0) < abs(tm - t1) else x1)
        g = search.gate(tm, xm, 1e-10)
        dm = phase_defect_ideal(g)
        if dm * d0 >= 0:
            t0, x0, d0 = tm, xm, dm
        else:
            t1, x1, d1 = tm, xm, dm
    tau = 0.5 * (t0 + t1)
    x = search.polish(tau, x0 if abs(d0) < abs(d1) else x1)
    # secant refinement in tau when the fixed-duration polish cannot absorb
    # the remaining phase defect
    slope = (d1 - d0) / (t1 - t0) if t1 != t0 else 0.0
    for _ in range(2):
        d = search.parts(tau, x)[2]
        if abs(d) <= 0.5 * PHASE_TOLERANCE or slope == 0.0:
            break
        tau = tau - np.clip(d / slope, -5 * TAU_RESOLUTION, 5 * TAU_RESOLUTION)
        x = search.polish(tau, search.close_gate(tau, x))
    return tau, x


def _crossings(rows):
    out = []
    for a, b in zip(rows, rows[1:]):
        if a[2] * b[2] < 0 and abs(a[2] - b[2]) < 1.5:
            out.append((a, b))
    return out


def _min_duration(search: _Search, rng, warm=None, seed=None) -> OptimizationResult:
    problem = search.problem
    tau_lo, tau_hi = problem.tau_range
    best = None
    fallback = None

    for x0, tau_a in search.anchors(rng, warm=warm):
        tau_a = min(max(tau_a, tau_lo), tau_hi)
        x = search.close_gate(tau_a, x0)
        if leakage_ideal(search.gate(tau_a, x, 1e-10)) > 1e-4:
            x = search.nelder_mead(tau_a, x0, leak_only=True)
            x = search.close_gate(tau_a, x)
            if leakage_ideal(search.gate(tau_a, x, 1e-10)) > 1e-4:
                continue  # this start does not close the gate
        rows = _march_branch(search, tau_a, x, -1, max(tau_lo, tau_a - _MARCH_SPAN))
        candidates = _crossings(rows)
        if not candidates:
            rows_up = _march_branch(search, tau_a, x, +1,
                                    min(tau_hi, tau_a + 1.2 * _MARCH_SPAN))
            candidates = _crossings(rows_up)
        for pair in candidates:
            tau_c, x_c = _bisect_crossing(search, *pair)
            parts = search.parts(tau_c, x_c)
            search.record(x_c, parts[0] + parts[1])
            if search.feasible(parts):
                if best is None or tau_c < best[0] - 1e-9 or \
                        (abs(tau_c - best[0]) <= 1e-9 and _tbar(parts[3]) < _tbar(best[2][3])):
                    best = (tau_c, x_c, parts)
            elif fallback is None or abs(parts[2]) < abs(fallback[2][2]):
                fallback = (tau_c, x_c, parts)
        if best is not None:
            break  # the seeded branch produced a feasible minimum

    if best is not None:
        return _result(search, best[0], best[1], best[2], seed)
    if fallback is not None:
        return _result(search, fallback[0], fallback[1], fallback[2], seed,
                       feasible=False)
    mid = 0.5 * (tau_lo + tau_hi)
    x = search.nelder_mead(mid, search.anchors(rng, warm=warm)[0][0])
    return _result(search, mid, x, search.parts(mid, x), seed, feasible=False)


def direct_search(problem: OptimizationProblem, seed: int = 0,
                  warm=None) -> OptimizationResult:
    """Direct-search optimization of one pulse family; deterministic for a
    given (problem, seed).

    Minimum-duration searches follow a gate-closure branch in tau and bisect
    on the sign of the phase defect; fixed-duration objectives run
    Nelder-Mead restarts with a least-squares polish. Infeasible outcomes
    are reported with the best found parameters rather than raised.
    """
    rng = np.random.default_rng(seed)

    if problem.family is Family.GAUSSIAN_RAMPED and warm is None \
            and problem.objective == "min_duration_feasible":
        # Continue the branch from the sharp-envelope limit: small ramps
        # perturb the gaussian solution only weakly, and the minimal
        # duration grows roughly linearly with the ramp time.
        kappa = problem.fixed["kappa"]
        chain = [k for k in np.arange(0.08, kappa, 0.1)] + [kappa]
        res, k_prev = None, 0.0
        for k in chain:
            sub = replace(problem, fixed={**problem.fixed, "kappa": float(k)})
            w = None
            if res is not None:
                w = {"x": np.array(list(res.params.values())),
                     "tau": res.tau + 1.8 * (k - k_prev) + 0.05}
            if k == kappa:
                warm = w
                break
            res = _min_duration(_Search(sub), np.random.default_rng(seed), warm=w,
                                seed=seed)
            k_prev = k

    search = _Search(problem)
    if problem.objective == "min_duration_feasible":
        return _min_duration(search, rng, warm=warm, seed=seed)

    tau = problem.fixed["tau"]
    starts = search.anchors(rng, warm=warm, tau_hint=tau)
    if problem.objective == "min_rydberg_time":
        eps = problem.feasibility_threshold

        def fun(x):
            g = search.gate(tau, x)
            excess = max(0.0, bell_infidelity_ideal(g) + leakage_ideal(g) - eps)
            return _tbar(g) + 1e4 * excess

        best_x, best_val = None, math.inf
        for x0, _ in starts:
            res = minimize(fun, np.clip(x0, search.lower, search.upper),
                           method="Nelder-Mead",
                           bounds=list(zip(search.lower, search.upper)),
                           options={"xatol": 1e-7, "fatol": 1e-12,
                                    "maxfev": 300 * len(x0), "adaptive": True})
            if res.fun < best_val:
                best_x, best_val = res.x, res.fun
        x = search.polish(tau, best_x)
        return _result(search, tau, x, search.parts(tau, x), seed)

    # min_bell_infidelity at fixed tau
    best_x, best_parts, best_key = None, None, None
    for x0, _ in starts:
        x = search.nelder_mead(tau, x0)
        x = search.polish(tau, x)
        parts = search.parts(tau, x)
        key = (0, _tbar(parts[3])) if search.feasible(parts) \
            else (1, parts[0] + parts[1])
        if best_key is None or key < best_key:
            best_x, best_parts, best_key = x, parts, key
    return _result(search, tau, best_x, best_parts, seed)


def _warm_from(result: OptimizationResult):
    return {"x": np.array(list(result.params.values())), "tau": result.tau}


# ---------------------------------------------------------------------------
# dCRAB super-iterations


def _fit_cosine_seed(pulse: PulseShape, delta0: float, freqs, tau: float) -> np.ndarray:
    """Project a pulse's detuning curve onto a cosine basis; carries the
    search state into a super-iteration with fresh frequencies."""
    t = np.linspace(0.0, tau, 257)
    target = np.asarray(pulse.delta(np.clip(t, 0, pulse.tau))) - delta0
    basis = np.stack([np.cos(2.0 * math.pi * f * (t - tau / 2.0)) for f in freqs],
                     axis=1)
    coef, *_ = np.linalg.lstsq(basis, target, rcond=None)
    return coef


@dataclass
class DCRABResult:
    best: OptimizationResult
    history: list  # (super-iteration, best tau, best objective)
    evaluations: int
    seed: int


def dcrab_optimize(problem: OptimizationProblem, n_superiterations: int,
                   seed: int = 0) -> DCRABResult:
    """dCRAB loop: per super-iteration draw fresh random frequencies bounded
    by f_max, then direct-search the new amplitudes plus the baseline
    (plus tau for minimum-duration objectives) starting from the previous
    best pulse; earlier components are frozen into the pulse, so the best
    objective is non-increasing across super-iterations.

    Super-iteration zero is the Gaussian-family baseline; with
    ``n_superiterations = 0`` that baseline is returned unchanged.
    """
    if problem.family is not Family.DCRAB:
        raise ValueError("dcrab_optimize requires a dcrab-family problem")
    rng = np.random.default_rng(seed)

    base_problem = replace(problem, family=Family.GAUSSIAN,
                           fixed={k: v for k, v in problem.fixed.items()
                                  if k in ("tau", "width")})
    base = direct_search(base_problem, seed=seed)
    best = base
    history = [(0, base.tau, base.objective_value)]
    evaluations = base.evaluations
    frozen_amps: tuple = ()
    frozen_freqs: tuple = ()
    min_duration = problem.objective == "min_duration_feasible"

    for k in range(1, n_superiterations + 1):
        freqs = random_frequencies(rng, problem.dcrab_components, problem.dcrab_f_max)
        fixed = dict(problem.fixed)
        fixed.update(active_freqs=freqs, frozen_amps=frozen_amps,
                     frozen_freqs=frozen_freqs)
        sub = replace(problem, fixed=fixed)
        search = _Search(sub)

        if frozen_freqs:
            seed_amp = np.zeros(len(freqs))  # zero amps reproduce the best pulse
        else:
            seed_amp = np.clip(_fit_cosine_seed(
                best.pulse, best.params.get("delta0", 0.0), freqs, best.tau),
                search.lower[1:], search.upper[1:])
        warm = {"x": np.concatenate(([best.params.get("delta0", 0.0)], seed_amp)),
                "tau": best.tau + 0.03}

        if min_duration:
            sub.fixed.pop("tau", None)
            cand = _min_duration(search, rng, warm=warm, seed=seed)
        else:
            tau = sub.fixed["tau"]
            starts = [warm["x"]] + [rng.uniform(search.lower, search.upper)
                                    for _ in range(sub.n_restarts)]
            best_x, best_parts = None, None
            for x0 in starts:
                x = search.nelder_mead(tau, x0)
                x = search.polish(tau, x)
                parts = search.parts(tau, x)
                if best_parts is None or parts[0] + parts[1] < best_parts[0] + best_parts[1]:
                    best_x, best_parts = x, parts
            cand = _result(search, tau, best_x, best_parts, seed)
        evaluations += search.evaluations

        if cand.feasible and (
                (min_duration and (not best.feasible or cand.tau < best.tau - 1e-9))
                or (not min_duration and cand.objective_value < best.objective_value)):
            best = cand
            frozen_amps = tuple(best.pulse.amplitudes)
            frozen_freqs = tuple(best.pulse.frequencies)
        history.append((k, best.tau, best.objective_value))

    return DCRABResult(best=best, history=history, evaluations=evaluations,
                       seed=seed)


# ---------------------------------------------------------------------------
# Sweeps


SWEEP_VARIABLES = ("width", "kappa", "v")


def sweep(problem: OptimizationProblem, sweep_variable: str, grid,
          seed: int = 0) -> list:
    """Re-optimize the remaining free parameters at each grid point of one
    swept variable, warm-starting from the neighboring point (process the
    grid in branch-following order). Infeasible points are returned flagged
    rather than dropped."""
    if sweep_variable not in SWEEP_VARIABLES:
        raise ValueError(f"unknown sweep variable {sweep_variable!r}")
    grid = list(grid)
    if not grid:
        raise ValueError("sweep grid must not be empty")

    results = []
    warm = None
    prev_value = None
    for k, value in enumerate(grid):
        if sweep_variable == "v":
            sub = replace(problem, v=float(value))
        else:
            fixed = dict(problem.fixed)
            fixed[sweep_variable] = float(value)
            sub = replace(problem, fixed=fixed)
        if warm is not None and sweep_variable == "kappa":
            # the minimal duration grows roughly linearly with the ramp time
            warm = {"x": warm["x"],
                    "tau": warm["tau"] + 1.8 * (float(value) - prev_value) + 0.05}
        elif warm is not None and sweep_variable == "width":
            # keep the detuning-peak area while the width changes
            x = np.array(warm["x"], dtype=float)
            names = _param_names(sub)
            if "amp" in names:
                x[names.index("amp")] *= prev_value / float(value)
            warm = {"x": x, "tau": warm["tau"]}
        res = direct_search(sub, seed=seed + k, warm=warm)
        results.append(res)
        if res.feasible:
            warm = _warm_from(res)
            prev_value = float(value)
    return results

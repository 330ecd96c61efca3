"""
Randomized property suites: positivity, local-unitary invariance, measurement
monotonicity, partial-trace comparison and superadditivity.

Each suite draws ``trials`` instances from per-trial seeds spawned off one
master seed, so reports are reproducible and independent of evaluation order.
A suite is *gating* when a failure must fail the run; exploratory suites are
reported but never fail it.
"""
import logging

import numpy as np

from .bloch_tensor import correlation_tensor, k_mode_product
from .errors import BudgetError
from .local_ops import (
    apply_local_unitaries,
    induced_rotation,
    measure_local,
    random_local_povm,
    random_local_unitary,
    trace_out_and_compare,
)
from .measure import check_superadditivity, et_pure
from .qudit_state import ghz_state, random_pure_state
from .su_algebra import build_generators

log = logging.getLogger(__name__)

MAX_DIMENSION = 10 ** 5
SUPPORTED_D = (2, 3, 4)
# Joint tensor size allowed for superadditivity trials.
SUPERADDITIVITY_ENTRIES = 1 << 22

POSITIVITY_SLACK = 1e-9
LU_TOL = 1e-8
ROTATION_TOL = 1e-9
MONOTONICITY_SLACK = 1e-8
TRACE_OUT_SLACK = 1e-9
SUPERADDITIVITY_SLACK = 1e-9
MULTIPLICATIVITY_RTOL = 1e-8


def _rngs(seed, tag, trials):
    return [np.random.default_rng(s) for s in np.random.SeedSequence([seed, tag]).spawn(trials)]


def _summary(margins, slack, gating, **extra):
    margins = np.asarray(margins, dtype=float)
    failed = int(np.sum(margins < -slack))
    out = {
        "gating": gating,
        "trials": int(margins.size),
        "passed": int(margins.size) - failed,
        "failed": failed,
        "worst_margin": float(margins.min()) if margins.size else None,
    }
    out.update(extra)
    return out


def positivity_suite(d, n, seed, trials):
    margins = [et_pure(random_pure_state(d, n, rng)).et for rng in _rngs(seed, 0, trials)]
    return _summary(margins, POSITIVITY_SLACK, True)


def lu_invariance_trial(psi, rng):
    """One local-unitary trial; returns (|dE|, worst rotation defect, route gap)."""
    gs = build_generators(psi.d)
    us = [random_local_unitary(psi.d, k, rng) for k in range(1, psi.n + 1)]
    rotated = apply_local_unitaries(psi, us)
    delta = abs(et_pure(rotated).et - et_pure(psi).et)
    t = correlation_tensor(psi)
    defect = 0.0
    for u in us:
        o = induced_rotation(u, gs)
        defect = max(defect, float(np.abs(o.T @ o - np.eye(gs.size)).max()))
        t = k_mode_product(t, o.T, u.site)
    route = float(np.abs(t.values - correlation_tensor(rotated).values).max())
    return delta, defect, route


def lu_invariance_suite(d, n, seed, trials):
    margins, defects, routes = [], [], []
    for rng in _rngs(seed, 1, trials):
        delta, defect, route = lu_invariance_trial(random_pure_state(d, n, rng), rng)
        # a trial passes only if all three checks pass
        margins.append(min(LU_TOL - delta, ROTATION_TOL - defect, LU_TOL - route))
        defects.append(defect)
        routes.append(route)
    return _summary(margins, 0.0, True,
                    worst_rotation_defect=max(defects, default=None),
                    worst_route_gap=max(routes, default=None))


def monotonicity_trial(psi, povm):
    """``E(psi) - sum_i p_i E(phi_i)`` for one local measurement."""
    outcomes = measure_local(psi, povm)
    return et_pure(psi).et - sum(p * et_pure(s).et for p, s in outcomes)


def monotonicity_suite(d, n, seed, trials, general_kraus=False):
    margins = []
    for rng in _rngs(seed, 2, trials):
        psi = random_pure_state(d, n, rng)
        site = int(rng.integers(1, n + 1))
        outcomes = int(rng.integers(2, d + 1)) if not general_kraus else int(rng.integers(2, d + 2))
        povm = random_local_povm(d, site, outcomes, rng, general=general_kraus)
        margins.append(monotonicity_trial(psi, povm))
    kind = "general_kraus" if general_kraus else "normal_projective"
    return _summary(margins, MONOTONICITY_SLACK, not general_kraus, family=kind,
                    status="exploratory" if general_kraus else "gating")


def trace_out_suite(d, n, seed, trials):
    if n < 2:
        return {"gating": True, "trials": 0, "passed": 0, "failed": 0, "worst_margin": None,
                "skipped": "needs at least two qudits"}
    ghz, generic = [], []
    violations = []
    for rng in _rngs(seed, 3, trials):
        site = int(rng.integers(1, n + 1))
        c = rng.standard_normal(d)
        c /= np.linalg.norm(c)
        before, after = trace_out_and_compare(ghz_state(d, n, c), site)
        ghz.append(before - after)
        psi = random_pure_state(d, n, rng)
        before, after = trace_out_and_compare(psi, site)
        generic.append(before - after)
        if before - after < -TRACE_OUT_SLACK:
            violations.append({"site": site, "margin": before - after,
                               "amplitudes": [[float(a.real), float(a.imag)]
                                              for a in psi.amplitudes]})
            log.warning("partial-trace norm increase on a random state (margin %.3g)",
                        before - after)
    out = _summary(ghz, TRACE_OUT_SLACK, True, family="ghz")
    out["exploratory_random"] = _summary(generic, TRACE_OUT_SLACK, False, family="random",
                                         violations=violations)
    return out


def superadditivity_suite(d, n, seed, trials):
    m = n
    while m > 1 and (d * d - 1) ** (2 * m) > SUPERADDITIVITY_ENTRIES:
        m -= 1
    margins, gaps = [], []
    for rng in _rngs(seed, 4, trials):
        psi, phi = random_pure_state(d, m, rng), random_pure_state(d, m, rng)
        rep = check_superadditivity(psi, phi, max_entries=SUPERADDITIVITY_ENTRIES)
        rel = rep.multiplicativity_gap / rep.norm_product
        gaps.append(rel)
        margins.append(min(rep.margin + SUPERADDITIVITY_SLACK, MULTIPLICATIVITY_RTOL - rel))
    return _summary(margins, 0.0, True, part_qudits=m,
                    worst_multiplicativity_rel=max(gaps, default=None))


def run_property_suites(seed=0, trials=100, d=3, n=3, general_kraus=False):
    """Run every suite and return a JSON-ready report.

    ``passed`` is True when no gating suite recorded a failure.
    """
    if d not in SUPPORTED_D:
        raise BudgetError(f"d must be one of {SUPPORTED_D}, got {d}")
    if n < 1 or d ** n > MAX_DIMENSION:
        raise BudgetError(f"need n >= 1 and d**n <= {MAX_DIMENSION}, got d={d}, n={n}")
    if trials < 0:
        raise BudgetError("trials must be nonnegative")
    suites = {}
    if trials:
        suites["positivity"] = positivity_suite(d, n, seed, trials)
        suites["lu_invariance"] = lu_invariance_suite(d, n, seed, trials)
        suites["povm_monotonicity"] = monotonicity_suite(d, n, seed, trials, general_kraus)
        suites["trace_out"] = trace_out_suite(d, n, seed, trials)
        suites["superadditivity"] = superadditivity_suite(d, n, seed, trials)
    passed = all(s["failed"] == 0 for s in suites.values() if s["gating"])
    return {"seed": seed, "trials": trials, "d": d, "n": n, "suites": suites, "passed": passed}

"""
Convex-roof extension of the measure to mixed states.

``E(rho) = min sum_i p_i E(psi_i)`` over pure-state decompositions of ``rho``.
Every decomposition of length ``L`` is obtained from the eigendecomposition
``rho = sum_j q_j |e_j><e_j|`` through an ``L x r`` isometry ``V``:
``|psi~_i> = sum_j V_ij sqrt(q_j) |e_j>``.  The search runs a derivative-free
coordinate descent over a Givens-rotation parameterization of ``V``, from the
eigendecomposition and from seeded random restarts.

Every value returned is the cost of an explicit decomposition, so it is an
upper bound on the roof, never a certified minimum.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .bloch_tensor import batch_full_norms, product_norm
from .errors import DomainError
from .measure import et_pure
from .qudit_state import DensityMatrix, PureState, validate_density

RANK_CUTOFF = 1e-10
ISOMETRY_TOL = 1e-9
RELATIVE_IMPROVEMENT = 1e-7
ZERO_WEIGHT = 1e-14
# The measure is nonnegative; a cost this small cannot be improved on.
ZERO_COST = 1e-12


@dataclass(frozen=True)
class RoofBudget:
    restarts: int = 20
    iterations: int = 500
    max_length: int = None
    seed: int = 0


@dataclass(frozen=True, eq=False)
class Decomposition:
    weights: np.ndarray
    states: list

    def density(self):
        mat = sum(w * np.outer(s.amplitudes, s.amplitudes.conj())
                  for w, s in zip(self.weights, self.states))
        return np.asarray(mat)

    def reconstruction_error(self, rho):
        return float(np.abs(self.density() - rho.matrix).max())

    def cost(self):
        return float(sum(w * et_pure(s).et for w, s in zip(self.weights, self.states)))


@dataclass(frozen=True, eq=False)
class RoofResult:
    value: float
    decomposition: Decomposition
    eigen_value: float
    restarts_used: int
    iterations: int
    converged: bool
    upper_bound: bool = field(default=True)

    def to_dict(self):
        return {
            "value": self.value,
            "upper_bound": True,
            "eigendecomposition_value": self.eigen_value,
            "restarts_used": self.restarts_used,
            "iterations": self.iterations,
            "converged": self.converged,
            "decomposition": {
                "weights": [float(w) for w in self.decomposition.weights],
                "states": [[[float(a.real), float(a.imag)] for a in s.amplitudes]
                           for s in self.decomposition.states],
            },
        }


def _eigen(rho):
    q, e = np.linalg.eigh(rho.matrix)
    keep = q > RANK_CUTOFF
    # descending weights for a stable ordering
    order = np.argsort(-q[keep], kind="stable")
    return q[keep][order], e[:, keep][:, order]


def numerical_rank(rho):
    return int(np.sum(np.linalg.eigvalsh(rho.matrix) > RANK_CUTOFF))


def _subnormalized(q, e, v):
    # rows are |psi~_i>
    return (v * np.sqrt(q)[None, :]) @ e.T


def decomposition_from_isometry(rho, v):
    """Decomposition of ``rho`` induced by the ``L x r`` isometry ``v``.

    Zero-weight rows are dropped.
    """
    q, e = _eigen(rho)
    v = np.asarray(v, dtype=np.complex128)
    if v.ndim != 2 or v.shape[1] != q.size:
        raise DomainError(f"isometry needs {q.size} columns (numerical rank), got shape {v.shape}")
    dev = np.abs(v.conj().T @ v - np.eye(q.size)).max()
    if dev > ISOMETRY_TOL:
        raise DomainError(f"V is not an isometry (deviation {dev:.3g})")
    rows = _subnormalized(q, e, v)
    p = np.sum(np.abs(rows) ** 2, axis=1)
    keep = p > ZERO_WEIGHT
    states = [PureState(rho.d, rho.m, r / np.sqrt(w)) for r, w in zip(rows[keep], p[keep])]
    weights = p[keep] / p[keep].sum()
    return Decomposition(weights, states)


def _pairs(length):
    return [(j, k) for j in range(length) for k in range(j + 1, length)]


def isometry_from_angles(params, length, rank):
    """``L x r`` isometry from Givens angles/phases (``2`` per row pair).

    ``params`` is laid out as ``[theta_0, phi_0, theta_1, phi_1, ...]``.
    """
    v = np.zeros((length, rank), dtype=np.complex128)
    v[np.arange(rank), np.arange(rank)] = 1.0
    for idx, (j, k) in enumerate(_pairs(length)):
        theta, phi = params[2 * idx], params[2 * idx + 1]
        c, s = np.cos(theta), np.sin(theta)
        ph = np.exp(1j * phi)
        rj, rk = v[j].copy(), v[k]
        v[j] = c * rj - np.conj(ph) * s * rk
        v[k] = ph * s * rj + c * rk
    return v


class _Objective:
    def __init__(self, rho, length):
        self.q, self.e = _eigen(rho)
        self.d, self.n = rho.d, rho.m
        self.length = length
        self.baseline = product_norm(rho.d, rho.m)
        self.evaluations = 0

    def cost_of_isometry(self, v):
        self.evaluations += 1
        rows = _subnormalized(self.q, self.e, v)
        p = np.sum(np.abs(rows) ** 2, axis=1)
        keep = p > ZERO_WEIGHT
        norms = batch_full_norms(rows[keep], self.d, self.n)
        return float(np.dot(p[keep], norms - self.baseline) / p[keep].sum())

    def __call__(self, params):
        return self.cost_of_isometry(isometry_from_angles(params, self.length, self.q.size))


def _descend(objective, params, max_sweeps):
    """Coordinate-wise bounded Brent line searches; returns (value, params, sweeps, converged)."""
    params = params.copy()
    value = objective(params)
    for sweep in range(1, max_sweeps + 1):
        start = value
        for i in range(params.size):
            half = np.pi / 2 if i % 2 == 0 else np.pi
            x0 = params[i]

            def line(x, i=i):
                trial = params.copy()
                trial[i] = x
                return objective(trial)

            res = minimize_scalar(line, bounds=(x0 - half, x0 + half), method="bounded",
                                  options={"xatol": 1e-7})
            if res.fun < value:
                params[i] = res.x
                value = float(res.fun)
        if value <= ZERO_COST or start - value <= RELATIVE_IMPROVEMENT * max(abs(start), 1e-12):
            return value, params, sweep, True
    return value, params, max_sweeps, False


def et_mixed(rho, budget=None):
    """Upper-bound estimate of the convex roof of the measure at ``rho``.

    The result is the best cost over the eigendecomposition and
    ``budget.restarts`` locally optimized random isometries of length
    ``budget.max_length`` (default ``rank**2``).  Restart ``i`` always uses the
    ``i``-th child seed of ``budget.seed``, so raising the budget never makes
    the reported value worse.
    """
    budget = budget or RoofBudget()
    if not isinstance(rho, DensityMatrix):
        raise DomainError("et_mixed expects a DensityMatrix")
    validate_density(rho.matrix)
    rank = numerical_rank(rho)
    length = rank * rank if budget.max_length is None else int(budget.max_length)
    if length < rank:
        raise DomainError(f"decomposition length {length} is below the rank {rank}")

    eye = np.zeros((length, rank), dtype=np.complex128)
    eye[np.arange(rank), np.arange(rank)] = 1.0
    eigen_dec = decomposition_from_isometry(rho, eye)
    objective = _Objective(rho, length)
    eigen_value = objective.cost_of_isometry(eye)
    best_value, best_v = eigen_value, eye
    sweeps_total = 0
    converged = True
    restarts_used = 0

    n_params = 2 * len(_pairs(length))
    if rank > 1 and n_params and best_value > ZERO_COST:
        children = np.random.SeedSequence(budget.seed).spawn(budget.restarts)
        for child in children:
            if best_value <= ZERO_COST:
                break
            rng = np.random.default_rng(child)
            start = rng.uniform(0.0, 2 * np.pi, n_params)
            value, params, sweeps, ok = _descend(objective, start, budget.iterations)
            restarts_used += 1
            sweeps_total += sweeps
            converged = converged and ok
            if value < best_value:
                best_value = value
                best_v = isometry_from_angles(params, length, rank)

    dec = eigen_dec if best_v is eye else decomposition_from_isometry(rho, best_v)
    return RoofResult(
        value=float(best_value),
        decomposition=dec,
        eigen_value=float(eigen_value),
        restarts_used=restarts_used,
        iterations=sweeps_total,
        converged=converged,
    )


def check_mixed_monotonicity(rho, povm, budget=None):
    """Compare ``sum_k p_k E(rho_k)`` with ``E(rho)`` under a local measurement.

    Both sides are optimizer upper bounds, so the margin ``E(rho) - sum`` is
    only meaningful (``gating``) when every optimization converged.  Rank-one
    inputs reduce to the exact pure-state comparison.
    """
    from .local_ops import measure_local, measure_local_density

    budget = budget or RoofBudget()
    q, e = _eigen(rho)
    if q.size == 1:
        psi = PureState.normalized(rho.d, rho.m, e[:, 0])
        before = et_pure(psi).et
        outcomes = measure_local(psi, povm)
        after = sum(p * et_pure(s).et for p, s in outcomes)
        return {"before": before, "after": after, "margin": before - after,
                "outcomes": len(outcomes), "gating": True, "upper_bounds": False}
    total = et_mixed(rho, budget)
    outcomes = measure_local_density(rho, povm)
    parts = [(p, et_mixed(r, budget)) for p, r in outcomes]
    after = sum(p * res.value for p, res in parts)
    gating = total.converged and all(res.converged for _, res in parts)
    return {"before": total.value, "after": after, "margin": total.value - after,
            "outcomes": len(outcomes), "gating": gating, "upper_bounds": True}

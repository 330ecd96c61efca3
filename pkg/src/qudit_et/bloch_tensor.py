"""
Bloch vectors, correlation tensors and the multilinear algebra acting on them.

For a state on ``N`` qudits and a subsystem ``S = (k_1, ..., k_M)`` the
correlation tensor has entries

    t[a_1, ..., a_M] = (d/2)**M * Tr(rho  l_{a_1}^(k_1) ... l_{a_M}^(k_M))

with 0-based generator indices ``a`` (entry ``[0, 0, 0]`` is ``t_111``).  Axis
``i`` of the array belongs to qudit ``k_i``; subsystems are kept sorted.
"""
from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement, permutations
from math import comb

import numpy as np

from .errors import DomainError, SymmetryError
from .qudit_state import DensityMatrix, PureState, _normalize_sites, partial_trace, to_density
from .su_algebra import build_generators

IMAG_TOL = 1e-9
SYMMETRY_TOL = 1e-8


def pure_bloch_radius(d):
    """Euclidean norm of the Bloch vector of any pure qudit state."""
    return np.sqrt(d * (d - 1) / 2.0)


def inner_ball_radius(d):
    """Radius of the ball of Bloch vectors that are all valid states."""
    return np.sqrt(d / (2.0 * (d - 1)))


def product_norm(d, n):
    """Full-tensor norm shared by every ``n``-qudit product state."""
    return (d * (d - 1) / 2.0) ** (n / 2.0)


@dataclass(frozen=True, eq=False)
class BlochVector:
    d: int
    s: np.ndarray

    @property
    def norm(self):
        return float(np.linalg.norm(self.s))


@dataclass(frozen=True, eq=False)
class CorrelationTensor:
    """Dense real correlation tensor over ``subsystem``.

    ``evaluated_entries`` records how many entries were computed directly when
    the tensor came from the symmetric shortcut; ``None`` otherwise.
    """

    d: int
    subsystem: tuple
    values: np.ndarray
    evaluated_entries: int = field(default=None, compare=False)

    @property
    def order(self):
        return self.values.ndim

    def norm(self):
        return tensor_norm(self)


@dataclass(frozen=True, eq=False)
class ExtendedTensor:
    """All ``2**n`` Bloch sectors of a state, keyed by sorted site tuples.

    The empty tuple maps to the scalar 1.
    """

    d: int
    n: int
    sectors: dict

    def __getitem__(self, sites):
        return self.sectors[tuple(sorted(sites))]


def _real(values, what="tensor"):
    imag = np.abs(values.imag).max() if values.size else 0.0
    if imag > IMAG_TOL:
        raise DomainError(f"{what} has imaginary residue {imag:.3g}; entries must be real")
    return np.ascontiguousarray(values.real)


def bloch_vector(rho):
    """Bloch vector ``s_i = (d/2) Tr(rho l_i)`` of a single-qudit state.

    Accepts a one-qudit :class:`DensityMatrix` or :class:`PureState`.
    """
    if isinstance(rho, PureState):
        rho = to_density(rho)
    if rho.m != 1:
        raise DomainError(f"bloch_vector needs a single-qudit state, got {rho.m} qudits")
    gs = build_generators(rho.d)
    s = (rho.d / 2.0) * np.einsum("ab,kba->k", rho.matrix, gs.lambdas)
    return BlochVector(rho.d, _real(s, "Bloch vector"))


def _apply_generators(psi_t, sites, lambdas):
    """Stack of ``l_{a_1}^(k_1) ... l_{a_j}^(k_j) |psi>`` for every index tuple.

    Returns shape ``(G**len(sites), d**N)`` with earlier sites varying slowest.
    """
    x = psi_t[None]
    for k in sites:
        moved = np.moveaxis(x, k + 1, -1)
        y = np.einsum("gij,b...j->bg...i", lambdas, moved)
        y = np.moveaxis(y, -1, k + 2)
        x = y.reshape((-1,) + psi_t.shape)
    return x.reshape(x.shape[0], -1)


def correlation_tensor(psi, subsystem=None):
    """Correlation tensor of a pure state over ``subsystem`` (default: all).

    Generators are applied to the state vector; no ``d**M``-dimensional
    observable is ever formed.  The sites are split in two halves ``L, R`` and
    ``t[a_L, a_R] = <l_{a_L} psi | l_{a_R} psi>`` is read off one matrix product,
    which is valid because the two halves act on different qudits.
    """
    if isinstance(psi, DensityMatrix):
        return correlation_tensor_density(psi, subsystem)
    sites = list(range(1, psi.n + 1)) if subsystem is None else _normalize_sites(
        subsystem, psi.n, "site")
    d = psi.d
    gs = build_generators(d)
    psi_t = psi.as_tensor()
    half = (len(sites) + 1) // 2
    left = _apply_generators(psi_t, [k - 1 for k in sites[:half]], gs.lambdas)
    right = _apply_generators(psi_t, [k - 1 for k in sites[half:]], gs.lambdas)
    t = (d / 2.0) ** len(sites) * (left.conj() @ right.T)
    values = _real(t).reshape((gs.size,) * len(sites))
    return CorrelationTensor(d, tuple(sites), values)


def correlation_tensor_density(rho, subsystem=None):
    """Correlation tensor of a (possibly mixed) state by trace contraction."""
    if isinstance(rho, PureState):
        rho = to_density(rho)
    sites = list(range(1, rho.m + 1)) if subsystem is None else _normalize_sites(
        subsystem, rho.m, "site")
    red = partial_trace(rho, sites)
    d, m = rho.d, len(sites)
    lam = build_generators(d).lambdas
    x = red.matrix.reshape((d,) * (2 * m))
    for step in range(m):
        # remaining axes: (i_step.., j_step.., g_0..g_{step-1}); Tr(rho l) = sum rho_ij l_ji
        x = np.tensordot(x, lam, axes=([0, m - step], [2, 1]))
    values = _real((d / 2.0) ** m * x)
    return CorrelationTensor(d, tuple(sites), values)


def _symmetry_residual(psi):
    t = psi.as_tensor()
    worst = 0.0
    sign = None
    for k in range(psi.n - 1):
        swapped = np.swapaxes(t, k, k + 1)
        plus = np.abs(t - swapped).max()
        minus = np.abs(t + swapped).max()
        s = 1 if plus <= minus else -1
        if sign is None:
            sign = s
        elif s != sign:
            return np.inf
        worst = max(worst, min(plus, minus))
    return worst


def is_permutation_symmetric(psi, tol=SYMMETRY_TOL):
    """True if ``psi`` is symmetric or antisymmetric under every transposition.

    Adjacent transpositions generate the symmetric group, so testing those
    suffices.
    """
    return _symmetry_residual(psi) <= tol


def symmetric_entry_count(d, n):
    """Number of index multisets of size ``n`` over ``d**2 - 1`` generators."""
    return comb(d * d - 1 + n - 1, n)


def _expectation(psi_t, lambdas, indices):
    x = psi_t
    for k, a in enumerate(indices):
        x = np.moveaxis(np.tensordot(lambdas[a], x, axes=([1], [k])), 0, k)
    return np.vdot(psi_t, x)


def correlation_tensor_symmetric(psi):
    """Full correlation tensor of a (anti)symmetric state via its supersymmetry.

    Only one entry per index multiset is evaluated; the rest are filled by
    permuting indices.
    """
    if _symmetry_residual(psi) > SYMMETRY_TOL:
        raise SymmetryError("state is not permutation symmetric or antisymmetric")
    d, n = psi.d, psi.n
    lam = build_generators(d).lambdas
    g = lam.shape[0]
    psi_t = psi.as_tensor()
    scale = (d / 2.0) ** n
    values = np.empty((g,) * n)
    evaluated = 0
    for rep in combinations_with_replacement(range(g), n):
        v = _expectation(psi_t, lam, rep)
        if abs(v.imag) > IMAG_TOL:
            raise DomainError(f"entry {rep} has imaginary residue {abs(v.imag):.3g}")
        evaluated += 1
        for perm in set(permutations(rep)):
            values[perm] = scale * v.real
    return CorrelationTensor(d, tuple(range(1, n + 1)), values, evaluated_entries=evaluated)


def extended_tensor(rho):
    """Every Bloch sector of ``rho``: scalar 1, Bloch vectors, all correlation tensors."""
    if isinstance(rho, PureState):
        rho = to_density(rho)
    sectors = {(): CorrelationTensor(rho.d, (), np.array(1.0))}
    for size in range(1, rho.m + 1):
        for sites in combinations(range(1, rho.m + 1), size):
            sectors[sites] = correlation_tensor_density(rho, sites)
    return ExtendedTensor(rho.d, rho.m, sectors)


def reconstruct_density(ext):
    """Rebuild the density matrix from its Bloch sectors.

    ``rho = d**-N * sum_S sum_a t_S[a] (x)_k (l_{a_k} if k in S else I)``.
    """
    d, n = ext.d, ext.n
    lam = build_generators(d).lambdas
    dim = d ** n
    rho = np.zeros((dim, dim), dtype=np.complex128)
    eye = np.eye(d, dtype=np.complex128)
    for sites, tensor in ext.sectors.items():
        op = np.ones((1, 1), dtype=np.complex128)
        # contract one generator axis at a time: op has shape (G**r, D, D) as we go
        op = op[None]
        vals = tensor.values
        for k in range(1, n + 1):
            if k in sites:
                op = np.einsum("gab,hcd->ghacbd", op, lam).reshape(
                    op.shape[0] * lam.shape[0], op.shape[1] * d, op.shape[2] * d)
            else:
                op = np.einsum("gab,cd->gacbd", op, eye).reshape(
                    op.shape[0], op.shape[1] * d, op.shape[2] * d)
        rho += np.tensordot(vals.ravel(), op, axes=(0, 0))
    return rho / d ** n


def tensor_norm(t):
    """Hilbert-Schmidt (Euclidean) norm of all entries."""
    values = t.values if isinstance(t, CorrelationTensor) else np.asarray(t)
    return float(np.sqrt(np.sum(values * values)))


def _mode_axis(order, k):
    if int(k) != k or not 1 <= k <= order:
        raise DomainError(f"mode must be in 1..{order}, got {k!r}")
    return int(k) - 1


def matrix_unfolding(t, k):
    """Mode-``k`` unfolding (1-based): mode-``k`` fibers become columns."""
    values = t.values if isinstance(t, CorrelationTensor) else np.asarray(t)
    axis = _mode_axis(values.ndim, k)
    return np.moveaxis(values, axis, 0).reshape(values.shape[axis], -1)


def fold(matrix, k, shape):
    """Inverse of :func:`matrix_unfolding` for a tensor of the given shape."""
    axis = _mode_axis(len(shape), k)
    rest = tuple(s for i, s in enumerate(shape) if i != axis)
    return np.moveaxis(np.asarray(matrix).reshape((shape[axis],) + rest), 0, axis)


def k_mode_product(t, matrix, k):
    """``t x_k M``: ``out[.., i, ..] = sum_j M[i, j] t[.., j, ..]`` along mode ``k``."""
    is_tensor = isinstance(t, CorrelationTensor)
    values = t.values if is_tensor else np.asarray(t)
    axis = _mode_axis(values.ndim, k)
    m = np.asarray(matrix)
    if m.ndim != 2 or m.shape[1] != values.shape[axis]:
        raise DomainError(
            f"matrix of shape {m.shape} does not act on mode {k} of size {values.shape[axis]}")
    out = np.moveaxis(np.tensordot(m, values, axes=([1], [axis])), 0, axis)
    if is_tensor:
        return CorrelationTensor(t.d, t.subsystem, out)
    return out


def outer_product(vectors):
    """Outer product ``u1 o u2 o ... o uM`` of real vectors."""
    out = np.ones(())
    for v in vectors:
        v = v.s if isinstance(v, BlochVector) else np.asarray(v)
        out = np.multiply.outer(out, v)
    return out


def product_residual(psi):
    """Largest deviation of the full tensor from the outer product of Bloch vectors."""
    t = correlation_tensor(psi).values
    rho = to_density(psi)
    svecs = [bloch_vector(partial_trace(rho, [k])) for k in range(1, psi.n + 1)]
    return float(np.abs(t - outer_product(svecs)).max())


def purities(psi):
    """``Tr(rho_S**2)`` for every subsystem ``S`` of a pure state, keyed by site tuple."""
    n, d = psi.n, psi.d
    t = psi.as_tensor()
    out = {(): 1.0, tuple(range(1, n + 1)): 1.0}
    for size in range(1, n):
        for sites in combinations(range(n), size):
            rest = [k for k in range(n) if k not in sites]
            m = np.transpose(t, list(sites) + rest).reshape(d ** size, -1)
            # purity of rho_S equals purity of its complement
            small = m @ m.conj().T if m.shape[0] <= m.shape[1] else m.conj().T @ m
            out[tuple(k + 1 for k in sites)] = float(np.sum(np.abs(small) ** 2))
    return out


def full_norm_from_purities(psi):
    """Full-tensor norm from subsystem purities, without any tensor entries.

    Uses the completeness relation ``sum_a l_a (x) l_a = 2 SWAP - (2/d) I``,
    which gives ``||T||**2 = (d**2/2)**N sum_S (-1/d)**(N-|S|) Tr(rho_S**2)``.
    """
    d, n = psi.d, psi.n
    total = sum((-1.0 / d) ** (n - len(s)) * p for s, p in purities(psi).items())
    return float(np.sqrt(max(total, 0.0) * (d * d / 2.0) ** n))


def batch_full_norms(states, d, n):
    """Purity-route full-tensor norms of a stack of state vectors ``(B, d**n)``.

    Vectors need not be normalized; each is normalized internally.
    """
    x = np.asarray(states, dtype=np.complex128)
    x = x / np.linalg.norm(x, axis=1, keepdims=True)
    b = x.shape[0]
    t = x.reshape((b,) + (d,) * n)
    total = np.full(b, 1.0 + (-1.0 / d) ** n)
    for size in range(1, n):
        for sites in combinations(range(n), size):
            rest = [k for k in range(n) if k not in sites]
            m = np.transpose(t, [0] + [k + 1 for k in sites] + [k + 1 for k in rest])
            m = m.reshape(b, d ** size, -1)
            small = np.einsum("bij,bkj->bik", m, m.conj())
            pur = np.sum(np.abs(small) ** 2, axis=(1, 2))
            total += (-1.0 / d) ** (n - size) * pur
    return np.sqrt(np.maximum(total, 0.0) * (d * d / 2.0) ** n)

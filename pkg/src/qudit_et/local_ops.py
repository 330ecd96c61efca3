"""
Local unitaries, local measurements and partial-trace comparisons.

Sites are 1-based.  A unitary ``U`` on one qudit acts on the Bloch data through
the orthogonal matrix ``O[a, b] = Tr(U l_a U^dag l_b) / 2``; the correlation
tensor of ``U psi`` is the tensor of ``psi`` mode-multiplied by ``O.T`` at
that site.
"""
from dataclasses import dataclass

import numpy as np
from scipy.stats import unitary_group

from .bloch_tensor import correlation_tensor, correlation_tensor_density, tensor_norm
from .errors import DomainError
from .qudit_state import PureState, partial_trace, to_density

UNITARY_TOL = 1e-10
POVM_TOL = 1e-9
PRUNE_PROBABILITY = 1e-12


@dataclass(frozen=True, eq=False)
class LocalUnitary:
    d: int
    site: int
    matrix: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.matrix, dtype=np.complex128)
        if u.shape != (self.d, self.d):
            raise DomainError(f"unitary must be {self.d}x{self.d}, got {u.shape}")
        dev = np.abs(u.conj().T @ u - np.eye(self.d)).max()
        if dev > UNITARY_TOL:
            raise DomainError(f"matrix is not unitary (deviation {dev:.3g})")
        object.__setattr__(self, "matrix", u)


@dataclass(frozen=True, eq=False)
class LocalPOVM:
    """Kraus operators ``L_i`` on one site with ``sum L_i^dag L_i = I``.

    ``normal`` is True when every ``L_i`` commutes with its adjoint, the class
    of measurements the monotonicity statement covers.
    """

    d: int
    site: int
    kraus: tuple

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=np.complex128) for k in self.kraus)
        if not ops:
            raise DomainError("POVM needs at least one Kraus operator")
        if any(k.shape != (self.d, self.d) for k in ops):
            raise DomainError(f"Kraus operators must be {self.d}x{self.d}")
        total = sum(k.conj().T @ k for k in ops)
        dev = np.abs(total - np.eye(self.d)).max()
        if dev > POVM_TOL:
            raise DomainError(f"Kraus operators do not resolve the identity (deviation {dev:.3g})")
        object.__setattr__(self, "kraus", ops)

    @property
    def normal(self):
        return self.normality_residual() <= POVM_TOL

    def normality_residual(self):
        return max(float(np.abs(k @ k.conj().T - k.conj().T @ k).max()) for k in self.kraus)


def _apply_local(psi_t, op, site):
    axis = site - 1
    return np.moveaxis(np.tensordot(op, psi_t, axes=([1], [axis])), 0, axis)


def _check_site(site, n):
    if int(site) != site or not 1 <= site <= n:
        raise DomainError(f"site must be in 1..{n}, got {site!r}")


def apply_local_unitaries(psi, unitaries):
    """Apply at most one unitary per site and return the rotated state."""
    seen = set()
    x = psi.as_tensor()
    for u in unitaries:
        if u.d != psi.d:
            raise DomainError(f"unitary dimension {u.d} does not match d={psi.d}")
        _check_site(u.site, psi.n)
        if u.site in seen:
            raise DomainError(f"more than one unitary on site {u.site}")
        seen.add(u.site)
        x = _apply_local(x, u.matrix, u.site)
    return PureState.normalized(psi.d, psi.n, x.ravel())


def random_local_unitary(d, site, seed=None):
    """Haar-random unitary on one site."""
    rng = np.random.default_rng(seed)
    return LocalUnitary(d, site, unitary_group.rvs(d, random_state=rng))


def induced_rotation(u, gs):
    """Orthogonal matrix ``O[a, b] = Tr(U l_a U^dag l_b) / 2`` of a local unitary."""
    if u.d != gs.d:
        raise DomainError(f"unitary dimension {u.d} does not match generators d={gs.d}")
    m = u.matrix
    rotated = np.einsum("ij,ajk,lk->ail", m, gs.lambdas, m.conj())
    o = np.einsum("aij,bji->ab", rotated, gs.lambdas) / 2
    return np.ascontiguousarray(o.real)


def _embedded_apply(psi, op, site):
    return _apply_local(psi.as_tensor(), op, site).ravel()


def measure_local(psi, povm):
    """Outcomes ``(p_i, phi_i)`` of a local measurement on ``povm.site``.

    ``p_i = ||M_i psi||**2`` with ``M_i`` the site-embedded Kraus operator;
    outcomes with ``p_i < 1e-12`` are dropped and residual states renormalized.
    """
    if povm.d != psi.d:
        raise DomainError(f"POVM dimension {povm.d} does not match d={psi.d}")
    _check_site(povm.site, psi.n)
    out = []
    for k in povm.kraus:
        v = _embedded_apply(psi, k, povm.site)
        p = float(np.vdot(v, v).real)
        if p < PRUNE_PROBABILITY:
            continue
        out.append((p, PureState(psi.d, psi.n, v / np.sqrt(p))))
    return out


def measure_local_density(rho, povm):
    """Outcomes ``(p_k, rho_k)`` of a local measurement on a density matrix."""
    from .qudit_state import DensityMatrix

    if povm.d != rho.d:
        raise DomainError(f"POVM dimension {povm.d} does not match d={rho.d}")
    _check_site(povm.site, rho.m)
    d, m = rho.d, rho.m
    out = []
    for k in povm.kraus:
        full = np.kron(np.kron(np.eye(d ** (povm.site - 1)), k), np.eye(d ** (m - povm.site)))
        mat = full @ rho.matrix @ full.conj().T
        p = float(np.trace(mat).real)
        if p < PRUNE_PROBABILITY:
            continue
        mat = mat / p
        out.append((p, DensityMatrix(d, m, (mat + mat.conj().T) / 2)))
    return out


def _group_sizes(d, outcomes):
    base, extra = divmod(d, outcomes)
    return [base + (1 if i < extra else 0) for i in range(outcomes)]


def random_local_povm(d, site, outcomes=None, seed=None, general=False):
    """Random measurement on one site.

    Default: projectors onto groups of a Haar-rotated basis, ``L_i = U P_i U^dag``
    (Hermitian, hence normal).  ``outcomes < d`` merges basis vectors into
    higher-rank projectors.  ``general=True`` instead slices a random isometry
    into Kraus operators, which are generically not normal.
    """
    outcomes = d if outcomes is None else int(outcomes)
    rng = np.random.default_rng(seed)
    if general:
        if outcomes < 1:
            raise DomainError("need at least one outcome")
        v = unitary_group.rvs(d * outcomes, random_state=rng)[:, :d] if outcomes > 1 else \
            unitary_group.rvs(d, random_state=rng)
        kraus = [v[i * d:(i + 1) * d] for i in range(outcomes)]
        return LocalPOVM(d, site, tuple(kraus))
    if not 1 <= outcomes <= d:
        raise DomainError(f"projective family needs 1 <= outcomes <= d, got {outcomes}")
    u = unitary_group.rvs(d, random_state=rng)
    kraus = []
    start = 0
    for size in _group_sizes(d, outcomes):
        cols = u[:, start:start + size]
        kraus.append(cols @ cols.conj().T)
        start += size
    return LocalPOVM(d, site, tuple(kraus))


def trace_out_and_compare(psi, site):
    """Norms ``(||T^(N)(psi)||, ||T^(N-1)(rho)||)`` with ``rho`` the state left after
    discarding ``site``."""
    if psi.n < 2:
        raise DomainError("need at least two qudits to trace one out")
    _check_site(site, psi.n)
    before = tensor_norm(correlation_tensor(psi))
    keep = [k for k in range(1, psi.n + 1) if k != site]
    reduced = partial_trace(to_density(psi), keep)
    after = tensor_norm(correlation_tensor_density(reduced))
    return before, after


def append_ancilla(psi, ancilla):
    """``psi (x) ancilla`` with the ancilla as the last qudit."""
    from .qudit_state import tensor_product

    return tensor_product(psi, ancilla)

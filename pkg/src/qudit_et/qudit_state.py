"""
Pure states and density matrices of N qudits.

Basis index convention: big-endian base ``d`` with qudit 1 the most
significant digit, i.e. amplitude ``psi[i_1 * d**(n-1) + ... + i_n]``.
Qudit (site) labels are 1-based throughout the package.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

NORM_TOL = 1e-10
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_FLOOR = -1e-9


def _frozen(arr):
    arr = np.array(arr, dtype=np.complex128, copy=True)
    arr.setflags(write=False)
    return arr


def _check_d_n(d, n):
    if int(d) != d or d < 2:
        raise DomainError(f"local dimension must be an integer >= 2, got {d!r}")
    if int(n) != n or n < 1:
        raise DomainError(f"qudit count must be an integer >= 1, got {n!r}")


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized state vector of ``n`` qudits of dimension ``d``."""

    d: int
    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        _check_d_n(self.d, self.n)
        amps = _frozen(np.ravel(self.amplitudes))
        if amps.size != self.d ** self.n:
            raise DomainError(
                f"amplitude count mismatch: expected {self.d ** self.n}, got {amps.size}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise DomainError(f"state is not normalized (norm = {norm:.12g})")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, d, n, amplitudes):
        """Build a state after rescaling ``amplitudes`` to unit norm."""
        amps = np.asarray(amplitudes, dtype=np.complex128).ravel()
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise DomainError("cannot normalize the zero vector")
        return cls(d, n, amps / norm)

    def as_tensor(self):
        """Amplitudes reshaped to ``(d,) * n``."""
        return self.amplitudes.reshape((self.d,) * self.n)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix on ``m`` qudits."""

    d: int
    m: int
    matrix: np.ndarray
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        _check_d_n(self.d, self.m)
        mat = _frozen(self.matrix)
        dim = self.d ** self.m
        if mat.shape != (dim, dim):
            raise DomainError(f"density matrix must be {dim}x{dim}, got {mat.shape}")
        if self.check:
            validate_density(mat)
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self):
        return self.d ** self.m

    def rank(self, cutoff=1e-10):
        return int(np.sum(np.linalg.eigvalsh(self.matrix) > cutoff))


def validate_density(mat, herm_tol=HERMITIAN_TOL, trace_tol=TRACE_TOL, psd_floor=PSD_FLOOR):
    """Raise :class:`DomainError` unless ``mat`` is a valid density matrix."""
    herm = np.abs(mat - mat.conj().T).max()
    if herm > herm_tol:
        raise DomainError(f"matrix is not Hermitian (max deviation {herm:.3g})")
    tr = np.trace(mat)
    if abs(tr - 1.0) > trace_tol:
        raise DomainError(f"trace must be 1, got {tr.real:.12g}")
    lo = np.linalg.eigvalsh((mat + mat.conj().T) / 2).min()
    if lo < psd_floor:
        raise DomainError(f"matrix is not positive semidefinite (min eigenvalue {lo:.3g})")


def basis_state(d, digits):
    """Computational basis state ``|digits>`` with 0-based local levels."""
    n = len(digits)
    _check_d_n(d, n)
    index = 0
    for x in digits:
        if not 0 <= x < d:
            raise DomainError(f"level {x} out of range for d={d}")
        index = index * d + int(x)
    amps = np.zeros(d ** n, dtype=np.complex128)
    amps[index] = 1.0
    return PureState(d, n, amps)


def product_state(vectors):
    """Tensor product of single-qudit vectors (each normalized here)."""
    vecs = [np.asarray(v, dtype=np.complex128).ravel() for v in vectors]
    if not vecs:
        raise DomainError("need at least one factor")
    d = vecs[0].size
    if any(v.size != d for v in vecs):
        raise DomainError("all factors must share the local dimension")
    amps = np.ones(1, dtype=np.complex128)
    for v in vecs:
        amps = np.kron(amps, v / np.linalg.norm(v))
    return PureState(d, len(vecs), amps)


def ghz_state(d, n, coeffs):
    """Generalized GHZ state ``sum_j c_j |jj...j>`` with real coefficients."""
    _check_d_n(d, n)
    c = np.asarray(coeffs, dtype=float).ravel()
    if c.size != d:
        raise DomainError(f"need {d} coefficients, got {c.size}")
    total = float(np.sum(c * c))
    if abs(total - 1.0) > NORM_TOL:
        raise DomainError(f"coefficients are not normalized (sum of squares {total:.12g})")
    amps = np.zeros(d ** n, dtype=np.complex128)
    # index of |jj...j> is j * (1 + d + ... + d**(n-1))
    stride = sum(d ** p for p in range(n))
    amps[np.arange(d) * stride] = c
    return PureState(d, n, amps)


def tensor_product(a, b):
    """``a (x) b`` with the qudits of ``a`` first."""
    if a.d != b.d:
        raise DomainError(f"local dimensions differ: {a.d} vs {b.d}")
    return PureState(a.d, a.n + b.n, np.kron(a.amplitudes, b.amplitudes))


def to_density(psi):
    """Rank-one projector ``|psi><psi|``."""
    amps = psi.amplitudes
    return DensityMatrix(psi.d, psi.n, np.outer(amps, amps.conj()), check=False)


def _normalize_sites(sites, n, what="index"):
    try:
        sites = [int(s) for s in sites]
    except TypeError:
        raise DomainError(f"{what} set must be iterable") from None
    out = sorted(set(sites))
    if not out:
        raise DomainError(f"{what} set must be nonempty")
    if out[0] < 1 or out[-1] > n:
        raise DomainError(f"{what} out of range 1..{n}: {out}")
    if len(out) != len(sites):
        raise DomainError(f"duplicate {what} in {sites}")
    return out


def partial_trace(rho, keep):
    """Reduce ``rho`` onto the qudits in ``keep`` (1-based labels).

    The kept qudits stay in increasing order.
    """
    keep = _normalize_sites(keep, rho.m)
    m, d = rho.m, rho.d
    if len(keep) == m:
        return rho
    t = rho.matrix.reshape((d,) * (2 * m))
    traced = [k for k in range(1, m + 1) if k not in keep]
    letters = [chr(ord("a") + i) for i in range(2 * m)]
    for k in traced:
        letters[m + k - 1] = letters[k - 1]
    out = "".join(letters[k - 1] for k in keep) + "".join(letters[m + k - 1] for k in keep)
    red = np.einsum("".join(letters) + "->" + out, t)
    dk = d ** len(keep)
    return DensityMatrix(d, len(keep), red.reshape(dk, dk), check=False)


def random_pure_state(d, n, seed=None):
    """Unitarily invariant random state from normalized complex Gaussians."""
    _check_d_n(d, n)
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(d ** n) + 1j * rng.standard_normal(d ** n)
    return PureState(d, n, z / np.linalg.norm(z))


def random_product_state(d, n, seed=None):
    """Product of ``n`` independent random single-qudit states."""
    rng = np.random.default_rng(seed)
    return product_state([random_pure_state(d, 1, rng).amplitudes for _ in range(n)])


def random_density_matrix(d, m, rank=None, seed=None):
    """Random density matrix of the given rank (full rank by default)."""
    _check_d_n(d, m)
    dim = d ** m
    rank = dim if rank is None else int(rank)
    if not 1 <= rank <= dim:
        raise DomainError(f"rank must be in 1..{dim}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    return DensityMatrix(d, m, (rho + rho.conj().T) / 2)


def mixture(weights, states):
    """Density matrix ``sum_i p_i rho_i``; entries may be pure states or density matrices."""
    p = np.asarray(weights, dtype=float)
    if len(states) != p.size or p.size == 0:
        raise DomainError("weights and states must have the same nonzero length")
    mats = [to_density(s) if isinstance(s, PureState) else s for s in states]
    d, n = mats[0].d, mats[0].m
    mat = np.zeros((d ** n, d ** n), dtype=np.complex128)
    for w, r in zip(p, mats):
        if (r.d, r.m) != (d, n):
            raise DomainError("all states must share (d, n)")
        mat += w * r.matrix
    return DensityMatrix(d, n, mat)

"""
Generalized Gell-Mann generators of SU(d) and their structure constants.

Generators are normalized so that ``Tr(l_i l_j) = 2 delta_ij``.  For ``d == 3``
the order is the standard Gell-Mann order ``l_1 ... l_8``; for every other ``d``
the order is pair-major: for each pair ``j < k`` (lexicographic) the symmetric
generator ``|j><k| + |k><j|`` followed by the antisymmetric one
``-i(|j><k| - |k><j|)``, then the ``d - 1`` diagonal generators.  At ``d == 2``
this gives the Pauli matrices ``X, Y, Z`` in that order.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError


@dataclass(frozen=True, eq=False)
class GeneratorSet:
    """Immutable SU(d) generator set.

    Attributes
    ----------
    d : int
        Local dimension.
    lambdas : ndarray, shape (d**2 - 1, d, d)
        Traceless Hermitian generators.
    f, g : ndarray, shape (d**2 - 1,) * 3
        Antisymmetric and symmetric structure constants.
    """

    d: int
    lambdas: np.ndarray
    f: np.ndarray
    g: np.ndarray

    @property
    def size(self):
        return self.d * self.d - 1

    def __len__(self):
        return self.size


def _symmetric(d, j, k):
    m = np.zeros((d, d), dtype=np.complex128)
    m[j, k] = m[k, j] = 1.0
    return m


def _antisymmetric(d, j, k):
    m = np.zeros((d, d), dtype=np.complex128)
    m[j, k] = -1j
    m[k, j] = 1j
    return m


def _diagonal(d, l):
    # l = 1 .. d-1
    diag = np.zeros(d)
    diag[:l] = 1.0
    diag[l] = -l
    return np.sqrt(2.0 / (l * (l + 1))) * np.diag(diag).astype(np.complex128)


def _generator_list(d):
    if d == 3:
        return [
            _symmetric(3, 0, 1), _antisymmetric(3, 0, 1), _diagonal(3, 1),
            _symmetric(3, 0, 2), _antisymmetric(3, 0, 2),
            _symmetric(3, 1, 2), _antisymmetric(3, 1, 2), _diagonal(3, 2),
        ]
    out = []
    for j in range(d):
        for k in range(j + 1, d):
            out.append(_symmetric(d, j, k))
            out.append(_antisymmetric(d, j, k))
    out.extend(_diagonal(d, l) for l in range(1, d))
    return out


def structure_constants(gs):
    """Return ``(f, g)`` computed from the generators of ``gs``.

    ``f_ijk = Tr([l_i, l_j] l_k) / 4i`` and ``g_ijk = Tr({l_i, l_j} l_k) / 4``,
    so that ``l_i l_j = (2/d) delta_ij I + (i f_ijk + g_ijk) l_k``.
    """
    lam = gs.lambdas if isinstance(gs, GeneratorSet) else np.asarray(gs)
    # p[i, j, k] = Tr(l_i l_j l_k)
    prod = np.einsum("iab,jbc->ijac", lam, lam)
    p = np.einsum("ijac,kca->ijk", prod, lam)
    pt = p.transpose(1, 0, 2)
    f = ((p - pt) / 4j).real
    g = ((p + pt) / 4).real
    return f, g


@lru_cache(maxsize=None)
def build_generators(d):
    """Build the ``d**2 - 1`` generators of SU(d) with structure constants.

    Results are cached per ``d``; the returned arrays are read-only.
    """
    if isinstance(d, bool) or not isinstance(d, (int, np.integer)) or d < 2:
        raise DomainError(f"local dimension must be an integer >= 2, got {d!r}")
    d = int(d)
    lambdas = np.array(_generator_list(d))
    f, g = structure_constants(lambdas)
    for arr in (lambdas, f, g):
        arr.setflags(write=False)
    return GeneratorSet(d=d, lambdas=lambdas, f=f, g=g)


def reconstruct_product(gs, i, j):
    """``l_i l_j`` rebuilt from the identity part and the structure constants."""
    d = gs.d
    out = (2.0 / d) * (i == j) * np.eye(d, dtype=np.complex128)
    coeff = 1j * gs.f[i, j] + gs.g[i, j]
    return out + np.einsum("k,kab->ab", coeff, gs.lambdas)


def check_generators(gs, atol=1e-12):
    """Evaluate the generator-set invariants and return a dict of residuals.

    Keys map to the worst deviation observed; ``"ok"`` is True when every
    residual is within ``atol`` (product-rule reconstruction uses ``1e-10``).
    """
    lam = gs.lambdas
    n = gs.d * gs.d - 1
    herm = float(np.abs(lam - lam.conj().transpose(0, 2, 1)).max())
    trace = float(np.abs(np.einsum("kaa->k", lam)).max())
    gram = np.einsum("iab,jba->ij", lam, lam)
    ortho = float(np.abs(gram - 2 * np.eye(n)).max())
    f_anti = max(float(np.abs(gs.f + gs.f.transpose(perm)).max())
                 for perm in ((1, 0, 2), (0, 2, 1), (2, 1, 0)))
    g_sym = max(float(np.abs(gs.g - gs.g.transpose(perm)).max())
                for perm in ((1, 0, 2), (0, 2, 1), (2, 1, 0)))
    direct = np.einsum("iab,jbc->ijac", lam, lam)
    rebuilt = ((2.0 / gs.d) * np.einsum("ij,ac->ijac", np.eye(n), np.eye(gs.d))
               + np.einsum("ijk,kac->ijac", 1j * gs.f + gs.g, lam))
    product_rule = float(np.abs(direct - rebuilt).max())
    report = {
        "d": gs.d,
        "count": int(lam.shape[0]),
        "hermitian": herm,
        "traceless": trace,
        "orthonormal": ortho,
        "f_antisymmetric": f_anti,
        "g_symmetric": g_sym,
        "product_rule": product_rule,
    }
    report["ok"] = bool(
        report["count"] == n
        and max(herm, trace, ortho, f_anti, g_sym) <= atol
        and product_rule <= 1e-10
    )
    return report

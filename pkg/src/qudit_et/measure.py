"""
The correlation-tensor entanglement measure for pure states.

``E_T(psi) = ||T^(N)|| - (d(d-1)/2)**(N/2)`` where ``T^(N)`` is the full
correlation tensor.  Also hosts the closed forms for the qutrit GHZ family
``a|11..1> + b|22..2> + c|33..3>`` and the two-qutrit concurrence relation.
"""
import logging
from dataclasses import asdict, dataclass
from math import comb

import numpy as np

from .bloch_tensor import (
    correlation_tensor,
    correlation_tensor_symmetric,
    product_norm,
    tensor_norm,
)
from .errors import BudgetError, DomainError
from .qudit_state import NORM_TOL, PureState, ghz_state, tensor_product

log = logging.getLogger(__name__)

# Largest full tensor (number of entries) built by check_superadditivity.
DEFAULT_MAX_ENTRIES = 1 << 24


@dataclass(frozen=True)
class MeasureReport:
    tensor_norm: float
    baseline: float
    et: float

    def to_dict(self):
        return asdict(self)


def et_pure(psi, symmetric=False):
    """Evaluate the measure on a pure state.

    With ``symmetric=True`` the tensor is built by the supersymmetric shortcut,
    which requires a permutation (anti)symmetric state.
    """
    if not isinstance(psi, PureState):
        raise DomainError("et_pure expects a PureState")
    norm = np.linalg.norm(psi.amplitudes)
    if abs(norm - 1.0) > NORM_TOL:
        raise DomainError(f"state is not normalized (norm = {norm:.12g})")
    t = correlation_tensor_symmetric(psi) if symmetric else correlation_tensor(psi)
    tn = tensor_norm(t)
    base = product_norm(psi.d, psi.n)
    return MeasureReport(tn, base, tn - base)


def _check_coeffs(alpha, beta, gamma):
    total = alpha * alpha + beta * beta + gamma * gamma
    if abs(total - 1.0) > NORM_TOL:
        raise DomainError(
            f"coefficients must satisfy a^2 + b^2 + c^2 = 1 (got {total:.12g})")


def ghz_norm_squared(n, alpha, beta, gamma, literal_limits=False):
    """Squared full-tensor norm of the N-qutrit GHZ family, term by term.

    Nonzero entries come in five families: even numbers of l_2 (l_5, l_7)
    among l_1 (l_4, l_6); ``2k`` l_3 with the rest l_8 (k >= 1); ``2k+1`` l_3
    with the rest l_8; and all l_8.  The odd-l_3 family runs over
    ``k = 0 .. floor((N-1)/2)``.  ``literal_limits=True`` stops it at
    ``floor(N/2) - 1`` instead, which drops the all-l_3 entry for odd ``N``;
    that variant is kept only to expose the discrepancy.
    """
    if int(n) != n or n < 2:
        raise DomainError(f"n must be an integer >= 2, got {n!r}")
    _check_coeffs(alpha, beta, gamma)
    n = int(n)
    a2, b2, c2 = alpha * alpha, beta * beta, gamma * gamma
    half = n // 2
    off_diag = sum(comb(n, 2 * k) for k in range(half + 1)) * 4 * (a2 * b2 + a2 * c2 + b2 * c2)
    even3 = sum(comb(n, 2 * k) * (1 / 3) ** (n - 2 * k) for k in range(1, half + 1)) * (a2 + b2) ** 2
    top = half - 1 if literal_limits else (n - 1) // 2
    odd3 = sum(comb(n, 2 * k + 1) * (1 / 3) ** (n - 2 * k - 1) for k in range(top + 1)) * (a2 - b2) ** 2
    all8 = (1 / 3) ** n * (a2 + b2 + (-2) ** n * c2) ** 2
    return (1.5 ** n) ** 2 * (off_diag + even3 + odd3 + all8)


def et_ghz_closed_form(n, alpha, beta, gamma, literal_limits=False):
    """Closed-form measure of ``alpha|1..1> + beta|2..2> + gamma|3..3>`` on n qutrits."""
    return float(np.sqrt(ghz_norm_squared(n, alpha, beta, gamma, literal_limits)) - 3 ** (n / 2))


def et_ghz3_expanded(alpha, beta, gamma):
    """Three-qutrit GHZ measure from the expanded (n = 3 only) polynomial."""
    _check_coeffs(alpha, beta, gamma)
    a2, b2, c2 = alpha * alpha, beta * beta, gamma * gamma
    bracket = (27 * (a2 * b2 + a2 * c2 + b2 * c2)
               + 9 / 4 * (a2 - b2) ** 2
               + 27 / 16 * (a2 + b2) ** 2
               + 1 / 16 * (a2 + b2 - 8 * c2) ** 2)
    return float(np.sqrt(27) / 2 * np.sqrt(bracket) - np.sqrt(27))


def et_ghz_bruteforce(n, alpha, beta, gamma):
    """GHZ-family measure from the explicitly enumerated tensor."""
    return et_pure(ghz_state(3, n, [alpha, beta, gamma])).et


def ghz_comparison(n, alpha, beta, gamma):
    """Closed form vs brute force (and the n = 3 expanded form) with deltas.

    Brute force is authoritative; deltas are ``value - bruteforce``.
    """
    brute = et_ghz_bruteforce(n, alpha, beta, gamma)
    out = {
        "bruteforce": brute,
        "closed_form": et_ghz_closed_form(n, alpha, beta, gamma),
        "closed_form_literal_limits": et_ghz_closed_form(n, alpha, beta, gamma, True),
    }
    if n == 3:
        out["expanded_n3"] = et_ghz3_expanded(alpha, beta, gamma)
    for key in [k for k in out if k != "bruteforce"]:
        out[f"delta_{key}"] = out[key] - brute
        if abs(out[f"delta_{key}"]) > 1e-8:
            log.info("GHZ %s differs from brute force by %.3g at (%g, %g, %g)",
                     key, out[f"delta_{key}"], alpha, beta, gamma)
    return out


def concurrence_2qutrit(alpha, beta, gamma):
    """Concurrence of ``alpha|11> + beta|22> + gamma|33>``."""
    _check_coeffs(alpha, beta, gamma)
    a2, b2, c2 = alpha * alpha, beta * beta, gamma * gamma
    return float(np.sqrt(4 * (a2 * b2 + a2 * c2 + b2 * c2)))


def et_from_concurrence_2qutrit(alpha, beta, gamma):
    """Two-qutrit GHZ measure written through the concurrence."""
    c = concurrence_2qutrit(alpha, beta, gamma)
    a2, b2, c2 = alpha * alpha, beta * beta, gamma * gamma
    bracket = (2 * c * c + (1 - c2) ** 2 + 2 / 3 * (a2 - b2) ** 2
               + 1 / 9 * (1 + 3 * c2) ** 2)
    return float(9 / 4 * np.sqrt(bracket) - 3)


@dataclass(frozen=True)
class SuperadditivityReport:
    et_psi: float
    et_phi: float
    et_joint: float
    margin: float
    holds: bool
    norm_joint: float
    norm_product: float
    multiplicativity_gap: float

    def to_dict(self):
        return asdict(self)


def check_superadditivity(psi, phi, max_entries=DEFAULT_MAX_ENTRIES, slack=1e-9):
    """Compare the measure of ``psi (x) phi`` with the sum of the parts.

    The joint tensor is built directly and its norm is cross-checked against
    ``||T_psi|| * ||T_phi||``.  ``margin = E(joint) - E(psi) - E(phi)``.
    """
    if psi.d != phi.d:
        raise DomainError(f"local dimensions differ: {psi.d} vs {phi.d}")
    entries = (psi.d ** 2 - 1) ** (psi.n + phi.n)
    if entries > max_entries:
        raise BudgetError(
            f"joint tensor would have {entries} entries (budget {max_entries})")
    r_psi, r_phi = et_pure(psi), et_pure(phi)
    r_joint = et_pure(tensor_product(psi, phi))
    prod = r_psi.tensor_norm * r_phi.tensor_norm
    margin = r_joint.et - r_psi.et - r_phi.et
    return SuperadditivityReport(
        et_psi=r_psi.et,
        et_phi=r_phi.et,
        et_joint=r_joint.et,
        margin=margin,
        holds=bool(margin >= -slack),
        norm_joint=r_joint.tensor_norm,
        norm_product=prod,
        multiplicativity_gap=abs(r_joint.tensor_norm - prod),
    )

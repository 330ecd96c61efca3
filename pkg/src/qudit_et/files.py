"""
JSON state and density-matrix files.

State file::

    {"d": 3, "n": 2, "amplitudes": [[re, im], ...], "normalize": false}

``amplitudes`` has ``d**n`` entries in big-endian base-``d`` order (qudit 1
most significant).  ``normalize`` is optional; without it the vector must
already have unit norm within 1e-8.

Density file::

    {"d": 3, "m": 2, "matrix": [[[re, im], ...], ...]}

with ``d**m`` rows of ``d**m`` pairs; Hermiticity, unit trace and positivity
are checked at 1e-8.
"""
import json

import numpy as np

from .errors import DomainError
from .qudit_state import DensityMatrix, PureState, validate_density

FILE_TOL = 1e-8


def _read(source):
    if isinstance(source, dict):
        return source
    try:
        with open(source) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise DomainError(f"invalid JSON: {exc}") from None


def _int_field(data, key):
    if key not in data:
        raise DomainError(f"missing field {key!r}")
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise DomainError(f"field {key!r} must be an integer")
    return value


def _complex_list(pairs, what):
    try:
        arr = np.asarray(pairs, dtype=float)
    except (TypeError, ValueError):
        raise DomainError(f"{what} must be [re, im] pairs") from None
    if arr.ndim < 1 or arr.shape[-1] != 2:
        raise DomainError(f"{what} must be [re, im] pairs")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{what} contains non-finite numbers")
    return arr[..., 0] + 1j * arr[..., 1]


def load_state(source, normalize=False):
    """Parse a state file (path or already-decoded dict) into a :class:`PureState`."""
    data = _read(source)
    d, n = _int_field(data, "d"), _int_field(data, "n")
    if d < 2 or n < 1:
        raise DomainError("need d >= 2 and n >= 1")
    if "amplitudes" not in data:
        raise DomainError("missing field 'amplitudes'")
    amps = _complex_list(data["amplitudes"], "amplitudes")
    if amps.ndim != 1 or amps.size != d ** n:
        raise DomainError(
            f"amplitude count mismatch: expected {d ** n}, got {amps.size if amps.ndim == 1 else amps.shape}")
    norm = np.linalg.norm(amps)
    if normalize or data.get("normalize", False) is True:
        return PureState.normalized(d, n, amps)
    if abs(norm - 1.0) > FILE_TOL:
        raise DomainError(f"state is not normalized (norm = {norm:.12g}); pass --normalize to rescale")
    return PureState(d, n, amps / norm)


def load_density(source):
    """Parse a density file into a :class:`DensityMatrix`."""
    data = _read(source)
    d, m = _int_field(data, "d"), _int_field(data, "m")
    if d < 2 or m < 1:
        raise DomainError("need d >= 2 and m >= 1")
    if "matrix" not in data:
        raise DomainError("missing field 'matrix'")
    mat = _complex_list(data["matrix"], "matrix")
    dim = d ** m
    if mat.shape != (dim, dim):
        raise DomainError(f"matrix shape mismatch: expected {dim}x{dim}, got {mat.shape}")
    validate_density(mat, herm_tol=FILE_TOL, trace_tol=FILE_TOL, psd_floor=-FILE_TOL)
    mat = (mat + mat.conj().T) / 2
    w, v = np.linalg.eigh(mat)
    if w.min() < 0:
        # negative eigenvalues within the file tolerance are rounding noise
        mat = (v * np.clip(w, 0, None)) @ v.conj().T
    mat = mat / np.trace(mat).real
    return DensityMatrix(d, m, mat)


def state_to_dict(psi):
    return {"d": psi.d, "n": psi.n,
            "amplitudes": [[float(a.real), float(a.imag)] for a in psi.amplitudes]}


def density_to_dict(rho):
    return {"d": rho.d, "m": rho.m,
            "matrix": [[[float(a.real), float(a.imag)] for a in row] for row in rho.matrix]}


def dump(obj, path):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")

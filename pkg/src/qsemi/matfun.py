"""Dense complex matrix functions: exp, principal log, cos/tan/arctan,
branch-tracked sqrt(det cos), rank-revealing null spaces, PSD tests.

All routines are dense and target matrices of size at most ~40x40; inputs are
validated for finiteness and shape, never mutated.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import (
    BranchCut,
    ConjugatePointOnPath,
    InsufficientSteps,
    NonSquare,
    SingularCos,
    SpectralRadiusTooLarge,
)

DEFAULT_TOL = 1e-9

_MOD = "matfun"


def as_square(A, *, operation: str = "") -> np.ndarray:
    """Validate and return a finite square complex matrix (copy-free view)."""
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NonSquare(f"expected square matrix, got shape {A.shape}",
                        module=_MOD, operation=operation)
    if not np.all(np.isfinite(A.real)) or not np.all(np.isfinite(A.imag)):
        raise NonSquare("matrix has non-finite entries",
                        module=_MOD, operation=operation)
    return A


def mat_exp(A) -> np.ndarray:
    """Matrix exponential (scaling-and-squaring Pade via scipy)."""
    A = as_square(A, operation="mat_exp")
    return sla.expm(A)


def mat_log_principal(A, *, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Principal matrix logarithm.

    Raises BranchCut when an eigenvalue sits on (or numerically hugs) the
    closed negative real half-line, where the principal branch is ill-defined.
    """
    A = as_square(A, operation="mat_log_principal")
    w = np.linalg.eigvals(A)
    scale = max(np.abs(w).max(), 1.0)
    for lam in w:
        if abs(lam) < tol * scale:
            raise BranchCut(f"eigenvalue {lam} too close to 0",
                            module=_MOD, operation="mat_log_principal")
        if lam.real < 0 and abs(lam.imag) < tol * abs(lam):
            raise BranchCut(f"eigenvalue {lam} on the negative real axis",
                            module=_MOD, operation="mat_log_principal")
    L = sla.logm(A)
    return np.asarray(L, dtype=complex)


def mat_cos(A) -> np.ndarray:
    """cos(A) = (exp(iA) + exp(-iA)) / 2."""
    A = as_square(A, operation="mat_cos")
    return (sla.expm(1j * A) + sla.expm(-1j * A)) / 2


def mat_sin(A) -> np.ndarray:
    """sin(A) = (exp(iA) - exp(-iA)) / 2i."""
    A = as_square(A, operation="mat_sin")
    return (sla.expm(1j * A) - sla.expm(-1j * A)) / 2j


def mat_tan(A, *, tol: float = DEFAULT_TOL) -> np.ndarray:
    """tan(A) = cos(A)^{-1} sin(A), computed by a solve, not an inverse.

    cos and sin of the same matrix commute, so left and right quotients agree.
    """
    A = as_square(A, operation="mat_tan")
    C = mat_cos(A)
    S = mat_sin(A)
    d = np.linalg.det(C)
    if abs(d) < tol:
        raise SingularCos(f"|det cos(A)| = {abs(d):.3e} below tolerance",
                          module=_MOD, operation="mat_tan")
    return np.linalg.solve(C, S)


def mat_arctan(A, *, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Matrix arctangent on the spectral-radius < 1 regime.

    Evaluated as (2i)^{-1} log((I + iA)(I - iA)^{-1}) with the principal log,
    which matches the power series on its disc of convergence and tolerates
    defective (e.g. nilpotent) arguments.
    """
    A = as_square(A, operation="mat_arctan")
    rho = np.abs(np.linalg.eigvals(A)).max() if A.size else 0.0
    if rho >= 1.0 - tol:
        raise SpectralRadiusTooLarge(
            f"spectral radius {rho:.6f} not strictly below 1",
            module=_MOD, operation="mat_arctan")
    n = A.shape[0]
    I = np.eye(n)
    Z = np.linalg.solve((I - 1j * A).T, (I + 1j * A).T).T
    return mat_log_principal(Z, tol=tol) / 2j


@dataclass
class BranchTrackedScalar:
    """A continuously tracked branch of s -> sqrt(det cos(s J Q)).

    value at path_parameter 0 is exactly 1; refining the step count changes
    the value by less than the per-step continuity margin enforced below.
    """
    value: complex
    path_parameter: float
    steps_used: int


# per-step phase budget for det along the path; the square root then moves by
# less than pi/4 per step, which pins the branch uniquely
_PHASE_BUDGET = np.pi / 2
_MAX_STEPS = 1 << 14


def sqrt_det_cos_tracked(Q, t: float, steps: int = 16, *,
                         tol: float = DEFAULT_TOL) -> BranchTrackedScalar:
    """Track the branch of sqrt(det cos(s J Q)) continuously from s=0 to s=t.

    Uniform subdivision with per-step phase monitoring; the step count doubles
    automatically until each det ratio rotates by less than pi/2.
    """
    from .quadform import standard_J  # local import to avoid a cycle

    Q = as_square(Q, operation="sqrt_det_cos_tracked")
    if t < 0:
        raise ConjugatePointOnPath("path parameter must be nonnegative",
                                   module=_MOD, operation="sqrt_det_cos_tracked")
    n2 = Q.shape[0]
    if n2 % 2 != 0:
        raise NonSquare("Q must be 2n x 2n", module=_MOD,
                        operation="sqrt_det_cos_tracked")
    if t == 0:
        return BranchTrackedScalar(1.0 + 0j, 0.0, 0)
    J = standard_J(n2 // 2)
    JQ = J @ Q

    steps = max(int(steps), 1)
    while steps <= _MAX_STEPS:
        value = 1.0 + 0j
        prev_det = 1.0 + 0j
        peak = 1.0
        ok = True
        for k in range(1, steps + 1):
            s = t * k / steps
            d = np.linalg.det(mat_cos(s * JQ))
            peak = max(peak, abs(d))
            # scale-aware zero test: a double zero of the det pinches through
            # 0 with no phase jump, so a collapse relative to the path peak
            # must also count as a conjugate point
            if abs(d) < max(tol, 1e-6 * peak):
                raise ConjugatePointOnPath(
                    f"det cos vanishes near s = {s:.6g} (|det| = {abs(d):.3e})",
                    module=_MOD, operation="sqrt_det_cos_tracked")
            ratio = d / prev_det
            # both the phase and the modulus of det must move slowly per
            # step; a modulus jump marks an under-resolved dip or spike
            if (abs(np.angle(ratio)) >= _PHASE_BUDGET
                    or not 0.25 < abs(ratio) < 4.0):
                ok = False
                break
            value *= np.sqrt(ratio)
            prev_det = d
        if ok:
            return BranchTrackedScalar(value, float(t), steps)
        steps *= 2
    raise InsufficientSteps(
        f"per-step phase stayed above pi/2 even at {_MAX_STEPS} steps",
        module=_MOD, operation="sqrt_det_cos_tracked")


def null_space(A, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the numerical kernel of A.

    Singular values below tol * sigma_max are treated as zero (absolute tol
    when sigma_max is itself below tol).  May return a (cols, 0) matrix.
    """
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2:
        raise NonSquare("expected a 2-d array", module=_MOD, operation="null_space")
    if A.size == 0:
        return np.eye(A.shape[1], dtype=complex)
    _, s, vh = np.linalg.svd(A)
    smax = s[0] if s.size else 0.0
    thresh = tol * smax if smax >= tol else tol
    rank = int((s >= thresh).sum())
    basis = vh[rank:].conj().T
    if np.abs(basis.imag).max(initial=0.0) == 0.0:
        basis = basis.real.astype(complex)
    return basis


def psd_check(H, tol: float = DEFAULT_TOL) -> tuple[bool, float]:
    """(is_psd, lambda_min) for the Hermitian symmetrization of H."""
    H = as_square(H, operation="psd_check")
    Hs = (H + H.conj().T) / 2
    lam_min = float(np.linalg.eigvalsh(Hs).min()) if H.size else 0.0
    return lam_min >= -tol, lam_min


def spectral_norm(A) -> float:
    """Operator 2-norm."""
    A = np.asarray(A, dtype=complex)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))

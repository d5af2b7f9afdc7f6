"""Gaussian symbols and kernels for quadratic semigroups.

Symbols: exp(-t q^w) acts, when det cos(tJQ) != 0, as c (e^{-m})^w with
c = det cos(tJQ)^{-1/2} (branch tracked from t = 0) and m the form of
J^{-1} tan(tJQ).

Kernels: whenever the xi-xi block of m has positive-definite real part, the
operator (e^{-m})^w is an integral transform with kernel

    g(x, y) = (2 pi)^{-n/2} det(B)^{-1/2}
              exp(-k((x+y)/2)/2 - B^{-1}(x-y).(x-y)/2
                  - i (x-y).B^{-1} L (x+y)/2),

with k of matrix R - L^T B^{-1} L.  Kernels are stored as a prefactor plus a
complex symmetric matrix on the stacked variable (x, y), so composition,
application to Gaussian states, and sup-norm extraction are plain linear
algebra.  Square roots of determinants of complex symmetric matrices with
positive-definite real part follow the branch that is positive on real
positive-definite matrices (eigenvalue-wise principal square root).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import (
    DegenerateTime,
    DimensionMismatch,
    NonIntegrableComposition,
    NonIntegrableSymbol,
    PathFailure,
    SeriesRegimeViolated,
)
from .matfun import (
    DEFAULT_TOL,
    ConjugatePointOnPath,
    InsufficientSteps,
    mat_cos,
    mat_sin,
    spectral_norm,
    sqrt_det_cos_tracked,
)
from .quadform import QuadraticForm, block_decompose, standard_J

_MOD = "mehler"


@dataclass
class MehlerSymbol:
    """Symbol data (c, M, t): exp(-t q^w) = c (e^{-m})^w with m(X) = MX.X."""
    n: int
    c: complex
    M: np.ndarray
    t: float


@dataclass
class GaussianKernel:
    """Kernel g(x, y) = c * exp(-K(x,y).(x,y)/2) on the stacked variable."""
    n: int
    c: complex
    K: np.ndarray

    def __call__(self, x, y) -> complex:
        z = np.concatenate([np.atleast_1d(x), np.atleast_1d(y)]).astype(complex)
        return self.c * np.exp(-0.5 * z @ self.K @ z)


@dataclass
class KernelDiagnostics:
    """The (P, V, M, N) matrices of the real-part normal form of a kernel.

    Re k(x, y) = v((x+y)/2) + p(Mleft x - Nright y) with p of matrix P and
    v of matrix V; Ker V has the dimension of the singular space.
    """
    P: np.ndarray
    V: np.ndarray
    Mleft: np.ndarray
    Nright: np.ndarray


def sqrt_det_pd(A) -> complex:
    """sqrt(det A) for complex symmetric A with positive-definite real part.

    Every eigenvalue has positive real part, so the product of principal
    square roots is the continuous deformation of the positive branch on
    real positive-definite matrices.
    """
    w = np.linalg.eigvals(np.asarray(A, dtype=complex))
    if (w.real <= 0).any():
        raise NonIntegrableSymbol(
            "matrix has an eigenvalue with nonpositive real part",
            module=_MOD, operation="sqrt_det_pd")
    return complex(np.exp(0.5 * np.sum(np.log(w))))


#: positive-definiteness is judged relative to the block scale so that
#: legitimately tiny smoothing blocks (order t^(2 k0 + 1)) are not rejected,
#: while exact zeros (graph condition failing) always are
_PD_RELATIVE = 1e-12


def _check_re_pd(A, *, operation: str, what: str) -> None:
    A = np.asarray(A, dtype=complex)
    H = (A.real + A.real.T) / 2
    lam = float(np.linalg.eigvalsh(H).min())
    if lam <= _PD_RELATIVE * np.linalg.norm(H, 2):
        raise NonIntegrableSymbol(
            f"{what} must have positive-definite real part "
            f"(lambda_min = {lam:.3e})", module=_MOD, operation=operation)


def mehler_symbol(q: QuadraticForm, t: float, *, steps: int = 16,
                  tol: float = DEFAULT_TOL) -> MehlerSymbol:
    """Symbol of exp(-t q^w): prefactor 1/sqrt(det cos(tJQ)) and form of
    J^{-1} tan(tJQ), with the determinant branch tracked along [0, t]."""
    if t < 0:
        raise DegenerateTime("t must be nonnegative", module=_MOD,
                             operation="mehler_symbol")
    J = standard_J(q.n)
    if t == 0:
        return MehlerSymbol(q.n, 1.0 + 0j, np.zeros((2 * q.n, 2 * q.n), complex), 0.0)
    try:
        tracked = sqrt_det_cos_tracked(q.Q, t, steps=steps, tol=tol)
    except ConjugatePointOnPath as exc:
        raise DegenerateTime(str(exc), module=_MOD, operation="mehler_symbol") from exc
    except InsufficientSteps as exc:
        raise PathFailure(str(exc), module=_MOD, operation="mehler_symbol") from exc
    A = t * (J @ q.Q)
    C = mat_cos(A)
    S = mat_sin(A)
    M = np.linalg.solve(J, np.linalg.solve(C, S))
    M = (M + M.T) / 2
    return MehlerSymbol(q.n, 1.0 / tracked.value, M, float(t))


def kernel_from_symbol(sym: MehlerSymbol, *, tol: float = DEFAULT_TOL) -> GaussianKernel:
    """Gaussian kernel of sym.c * (e^{-m})^w; requires Re B positive-definite.

    Raises NonIntegrableSymbol exactly when the graph condition fails for the
    underlying form (degenerate Re B), in which case the operator has no
    locally integrable Gaussian kernel.
    """
    n = sym.n
    bf = block_decompose(sym.M)
    R, L, B = bf.R, bf.L, bf.B
    _check_re_pd(B, operation="kernel_from_symbol",
                 what="xi-xi block of the symbol")
    Binv = np.linalg.inv(B)
    Kk = R - L.T @ Binv @ L
    I = np.eye(n)
    E_mid = np.hstack([I, I]) / 2.0      # (x, y) -> (x + y)/2
    E_diff = np.hstack([I, -I])          # (x, y) -> x - y
    K = E_mid.T @ Kk @ E_mid + E_diff.T @ Binv @ E_diff
    cross = E_diff.T @ (Binv @ L) @ E_mid
    K = K + 1j * (cross + cross.T)
    c = sym.c * (2 * np.pi) ** (-n / 2) / sqrt_det_pd(B)
    return GaussianKernel(n, complex(c), K)


def twisted_kernel(N, eps: float) -> GaussianKernel:
    """Exact kernel of (e^{-(eps/2) |xi - Nx|^2})^w for N real skew-symmetric:

        (2 pi eps)^{-n/2} exp(-|x - y|^2 / (2 eps) + i (x - y).Nx).
    """
    N = np.asarray(N, dtype=float)
    n = N.shape[0]
    if N.shape != (n, n) or np.linalg.norm(N + N.T) > 1e-12 * max(1.0, np.linalg.norm(N)):
        raise DimensionMismatch("N must be real skew-symmetric",
                                module=_MOD, operation="twisted_kernel")
    if eps <= 0:
        raise NonIntegrableSymbol("eps must be positive",
                                  module=_MOD, operation="twisted_kernel")
    I = np.eye(n)
    Kxy = -I / eps - 1j * N
    K = np.block([[I / eps, Kxy], [Kxy.T, I / eps]]).astype(complex)
    c = (2 * np.pi * eps) ** (-n / 2)
    return GaussianKernel(n, complex(c), K)


def twisted_form_matrix(N) -> np.ndarray:
    """Matrix of |xi - Nx|^2 on R^{2n}: [[N^T N, N], [-N, I]] for N skew."""
    N = np.asarray(N, dtype=float)
    n = N.shape[0]
    return np.block([[N.T @ N, N], [-N, np.eye(n)]])


def diagnostics_PVMN(sym: MehlerSymbol, *, tol: float = DEFAULT_TOL) -> KernelDiagnostics:
    """P, V and the left/right warp matrices of the kernel's real part."""
    bf = block_decompose(sym.M)
    R, L, B = bf.R, bf.L, bf.B
    _check_re_pd(B, operation="diagnostics_PVMN",
                 what="xi-xi block of the symbol")
    ReB, ImB = B.real, B.imag
    ReL, ImL = L.real, L.imag
    ReB_inv = np.linalg.inv(ReB)
    P = np.linalg.inv(ReB + ImB @ ReB_inv @ ImB)
    V = R.real - ReL.T @ ReB_inv @ ReL
    Mleft = np.eye(sym.n) - ImL / 2 + ImB @ ReB_inv @ ReL / 2
    Nright = np.eye(sym.n) + ImL / 2 - ImB @ ReB_inv @ ReL / 2
    return KernelDiagnostics(P=P, V=(V + V.T) / 2, Mleft=Mleft, Nright=Nright)


def compose_kernels(k1: GaussianKernel, k2: GaussianKernel, *,
                    tol: float = DEFAULT_TOL) -> GaussianKernel:
    """Exact composition g(x, y) = int g1(x, z) g2(z, y) dz.

    The z-quadratic block must have positive-definite real part; the result
    follows by completing the square (Schur complement) with the deformation
    branch of the determinant square root.
    """
    if k1.n != k2.n:
        raise DimensionMismatch("kernel dimensions differ", module=_MOD,
                                operation="compose_kernels")
    n = k1.n
    P1, Q1, R1 = k1.K[:n, :n], k1.K[:n, n:], k1.K[n:, n:]
    P2, Q2, R2 = k2.K[:n, :n], k2.K[:n, n:], k2.K[n:, n:]
    W = R1 + P2
    H = (W.real + W.real.T) / 2
    lam = float(np.linalg.eigvalsh(H).min())
    if lam <= _PD_RELATIVE * np.linalg.norm(H, 2):
        raise NonIntegrableComposition(
            f"middle-variable real part not positive-definite "
            f"(lambda_min = {lam:.3e})", module=_MOD, operation="compose_kernels")
    Winv = np.linalg.inv(W)
    C = np.hstack([Q1.T, Q2])  # linear coefficient of z as a map of (x, y)
    Z = np.zeros((n, n))
    K = np.block([[P1, Z], [Z, R2]]) - C.T @ Winv @ C
    c = k1.c * k2.c * (2 * np.pi) ** (n / 2) / sqrt_det_pd(W)
    return GaussianKernel(n, complex(c), K)


def mehler_inverse_twisted(N, s: float, *, tol: float = DEFAULT_TOL,
                           ) -> tuple[np.ndarray, float]:
    """Write the twisted diffusion as an evolution operator:

        (e^{-s |xi - Nx|^2})^w = sqrt(det cos(s J R_s)) exp(-s r_s^w),

    returning (R_s, prefactor) with R_s = (sJ)^{-1} arctan(s J NN) evaluated
    through the manifestly symmetric series sum_k F^kT NN F^k / (2k+1),
    F = s J NN.  Requires s |NN| < 2^{-1/2} (series regime).
    """
    NN = twisted_form_matrix(N)
    n2 = NN.shape[0]
    if s < 0:
        raise SeriesRegimeViolated("s must be nonnegative", module=_MOD,
                                   operation="mehler_inverse_twisted")
    nrm = spectral_norm(NN)
    if s * nrm >= 2 ** -0.5:
        raise SeriesRegimeViolated(
            f"s |NN| = {s * nrm:.4f} >= 2^(-1/2)", module=_MOD,
            operation="mehler_inverse_twisted")
    if s == 0 or nrm == 0:
        return NN.copy(), 1.0
    F = s * standard_J(n2 // 2) @ NN
    Rs = np.zeros_like(NN)
    term_left = np.eye(n2)
    for k in range(256):
        term = term_left.T @ NN @ term_left / (2 * k + 1)
        Rs += term
        if np.linalg.norm(term) < 1e-18 * max(1.0, np.linalg.norm(Rs)):
            break
        term_left = F @ term_left
    Rs = (Rs + Rs.T) / 2
    tracked = sqrt_det_cos_tracked(Rs, s, tol=tol)
    pf = tracked.value
    if abs(pf.imag) > 1e-10 * abs(pf):
        raise SeriesRegimeViolated(
            f"prefactor not real: {pf}", module=_MOD,
            operation="mehler_inverse_twisted")
    return Rs, float(pf.real)


# --- analytic actions of phase / transport / dispersion factors ------------
# These close the Gaussian kernel class under the unitary-side factors of the
# main decomposition without ever forming a distributional kernel.

def kernel_left_phase(k: GaussianKernel, theta) -> GaussianKernel:
    """Left-multiply by the multiplication operator exp(i theta x.x / 2)."""
    theta = np.asarray(theta, dtype=float)
    K = k.K.copy()
    n = k.n
    K[:n, :n] = K[:n, :n] - 1j * (theta + theta.T) / 2
    return GaussianKernel(n, k.c, K)


def kernel_right_phase(k: GaussianKernel, theta) -> GaussianKernel:
    """Right-compose with the multiplication operator exp(i theta y.y / 2)."""
    theta = np.asarray(theta, dtype=float)
    K = k.K.copy()
    n = k.n
    K[n:, n:] = K[n:, n:] - 1j * (theta + theta.T) / 2
    return GaussianKernel(n, k.c, K)


def kernel_right_transport(k: GaussianKernel, M, t: float) -> GaussianKernel:
    """Right-compose with the transport flow u -> u(e^{tM} .)."""
    M = np.asarray(M, dtype=float)
    n = k.n
    T = sla.expm(-t * M)
    E = np.block([[np.eye(n), np.zeros((n, n))], [np.zeros((n, n)), T]])
    K = E.T @ k.K @ E
    c = k.c * np.exp(-t * np.trace(M))
    return GaussianKernel(n, complex(c), K)


def kernel_right_dispersion(k: GaussianKernel, D, t: float, *,
                            tol: float = DEFAULT_TOL) -> GaussianKernel:
    """Right-compose with exp(i t D grad.grad), D real symmetric.

    The y-slice of the kernel is a Gaussian with positive-definite real part,
    on which the Fourier multiplier exp(-i t D xi.xi) acts in closed form;
    degenerate (even zero) D is fine.
    """
    D = np.asarray(D, dtype=float)
    n = k.n
    A = k.K[n:, n:]
    Kyx = k.K[n:, :n]
    _check_re_pd(A, operation="kernel_right_dispersion",
                 what="y-y block of the kernel")
    Ainv = np.linalg.inv(A)
    Atil = Ainv + 2j * t * D
    SA = np.linalg.inv(Atil)
    mult = 1.0 / (sqrt_det_pd(A) * sqrt_det_pd(Atil))
    Mmid = Ainv - Ainv @ SA @ Ainv
    Kxx = k.K[:n, :n] - Kyx.T @ Mmid @ Kyx
    Kyx_new = SA @ Ainv @ Kyx
    K = np.block([[Kxx, Kyx_new.T], [Kyx_new, SA]])
    return GaussianKernel(n, complex(k.c * mult), K)

"""Applying Gaussian kernels to functions and measuring the smoothing.

Closed-form path: Gaussian states c exp(-Ax.x/2 + b.x) are closed under
kernel application, Fourier multipliers exp(i t D grad.grad), moduli and
convolutions, so every norm and derivative below is exact linear algebra.

Grid path: tensorized trapezoid quadrature on uniform grids (n <= 2) used to
cross-validate the closed forms and to evolve non-Gaussian inputs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    ExponentOrder,
    FixtureHasGraph,
    NonIntegrable,
    NonIntegrableSymbol,
    NonPositiveSample,
    ResolutionTooCoarse,
    TruncationTooLarge,
)
from .matfun import DEFAULT_TOL, spectral_norm
from .mehler import (
    GaussianKernel,
    kernel_from_symbol,
    mehler_symbol,
    sqrt_det_pd,
    twisted_kernel,
)
from .quadform import QuadraticForm
from .singular import graph_condition, singular_space

_MOD = "evolve"


@dataclass
class GaussianState:
    """u(x) = c exp(-Ax.x/2 + b.x), A complex symmetric with Re A > 0."""
    n: int
    c: complex
    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A, dtype=complex)
        b = np.asarray(self.b, dtype=complex).reshape(-1)
        if A.shape != (self.n, self.n) or b.shape != (self.n,):
            raise DimensionMismatch(f"A {A.shape} / b {b.shape} for n = {self.n}",
                                    module=_MOD, operation="GaussianState")
        A = (A + A.T) / 2
        lam = float(np.linalg.eigvalsh(A.real).min())
        if lam <= 0:
            raise NonIntegrable(f"Re A must be positive-definite "
                                f"(lambda_min = {lam:.3e})",
                                module=_MOD, operation="GaussianState")
        self.A, self.b = A, b

    def __call__(self, x) -> complex:
        x = np.asarray(x, dtype=complex).reshape(-1)
        return self.c * np.exp(-0.5 * x @ self.A @ x + self.b @ x)

    def modulus(self) -> "GaussianState":
        """|u| as a Gaussian state (real data)."""
        return GaussianState(self.n, abs(self.c), self.A.real.astype(complex),
                             self.b.real.astype(complex))


@dataclass
class GridFunction:
    """Samples on a uniform tensor grid; axes are (min, max, points) triples."""
    n: int
    axes: tuple
    samples: np.ndarray

    def __post_init__(self):
        if len(self.axes) != self.n:
            raise DimensionMismatch("axes/dimension mismatch",
                                    module=_MOD, operation="GridFunction")
        shape = tuple(int(a[2]) for a in self.axes)
        if any(p < 2 for p in shape):
            raise ResolutionTooCoarse("need at least 2 points per axis",
                                      module=_MOD, operation="GridFunction")
        self.samples = np.asarray(self.samples, dtype=complex).reshape(shape)

    def nodes(self, axis: int) -> np.ndarray:
        lo, hi, m = self.axes[axis]
        return np.linspace(lo, hi, int(m))

    def weights(self, axis: int) -> np.ndarray:
        lo, hi, m = self.axes[axis]
        h = (hi - lo) / (int(m) - 1)
        w = np.full(int(m), h)
        w[0] = w[-1] = h / 2
        return w


@dataclass
class NormFitReport:
    p: float
    q: float
    r: float
    cpq: float
    t_values: np.ndarray
    norms: np.ndarray
    fitted_slope: float
    r_squared: float


def sample_state(u: GaussianState, axes) -> GridFunction:
    """Evaluate a Gaussian state on a tensor grid."""
    grids = np.meshgrid(*[np.linspace(a[0], a[1], int(a[2])) for a in axes],
                        indexing="ij")
    X = np.stack([g.ravel() for g in grids])  # (n, Npts)
    quad = np.einsum("ik,ij,jk->k", X, u.A, X)
    vals = u.c * np.exp(-0.5 * quad + u.b @ X)
    return GridFunction(u.n, tuple(axes), vals.reshape(grids[0].shape))


# --------------------------------------------------------------------------
# closed-form Gaussian evolution

def apply_kernel_gaussian(k: GaussianKernel, u: GaussianState, *,
                          tol: float = DEFAULT_TOL) -> GaussianState:
    """Exact output of int g(x, y) u(y) dy for a Gaussian state u.

    Needs Re(K_yy + A) positive-definite; the kernel block alone may be
    degenerate (rank-deficient smoothing) as long as the input supplies the
    missing decay.
    """
    if k.n != u.n:
        raise DimensionMismatch("kernel/state dimension mismatch",
                                module=_MOD, operation="apply_kernel_gaussian")
    n = k.n
    Kyy = k.K[n:, n:]
    Kyx = k.K[n:, :n]
    W = Kyy + u.A
    H = (W.real + W.real.T) / 2
    lam = float(np.linalg.eigvalsh(H).min())
    if lam <= 1e-12 * np.linalg.norm(H, 2):
        raise NonIntegrable(f"combined y-quadratic not integrable "
                            f"(lambda_min = {lam:.3e})",
                            module=_MOD, operation="apply_kernel_gaussian")
    Winv = np.linalg.inv(W)
    A_out = k.K[:n, :n] - Kyx.T @ Winv @ Kyx
    b_out = -Kyx.T @ Winv @ u.b
    c_out = (k.c * u.c * (2 * np.pi) ** (n / 2) / sqrt_det_pd(W)
             * np.exp(0.5 * u.b @ Winv @ u.b))
    return GaussianState(n, complex(c_out), A_out, b_out)


def dispersion_gaussian(u: GaussianState, D, t: float) -> GaussianState:
    """exp(i t D grad.grad) u in closed form (Fourier multiplier)."""
    D = np.asarray(D, dtype=float)
    Ainv = np.linalg.inv(u.A)
    Atil = Ainv + 2j * t * D
    A_out = np.linalg.inv(Atil)
    v = Ainv @ u.b
    c_out = (u.c / (sqrt_det_pd(u.A) * sqrt_det_pd(Atil))
             * np.exp(0.5 * u.b @ v - 0.5 * v @ A_out @ v))
    b_out = A_out @ v
    return GaussianState(u.n, complex(c_out), A_out, b_out)


def convolve_gaussian(A_conv, u: GaussianState) -> GaussianState:
    """(f * u) for f(y) = exp(-A_conv y.y / 2), via the kernel f(x - y)."""
    A_conv = np.asarray(A_conv, dtype=complex)
    n = u.n
    K = np.block([[A_conv, -A_conv], [-A_conv, A_conv]])
    return apply_kernel_gaussian(GaussianKernel(n, 1.0 + 0j, K), u)


def lp_norm(u, p: float) -> float:
    """L^p norm, closed form for Gaussian states, quadrature sum for grids."""
    if not (1 <= p):
        raise ExponentOrder(f"p = {p} out of range", module=_MOD, operation="lp_norm")
    if isinstance(u, GaussianState):
        ReA = u.A.real
        Reb = u.b.real
        peak = float(np.exp(0.5 * Reb @ np.linalg.solve(ReA, Reb)))
        if np.isinf(p):
            return abs(u.c) * peak
        det = float(np.linalg.det(ReA))
        mass = (2 * np.pi) ** (u.n / 2) * p ** (-u.n / 2) / math.sqrt(det)
        return abs(u.c) * mass ** (1 / p) * peak
    if isinstance(u, GridFunction):
        if np.isinf(p):
            return float(np.abs(u.samples).max())
        w = u.weights(0)
        for ax in range(1, u.n):
            w = np.multiply.outer(w, u.weights(ax))
        return float((np.abs(u.samples) ** p * w).sum() ** (1 / p))
    raise DimensionMismatch(f"unsupported input {type(u)}", module=_MOD,
                            operation="lp_norm")


# --------------------------------------------------------------------------
# grid evolution

def apply_kernel_grid(k: GaussianKernel, u: GridFunction, *,
                      trunc_tol: float = 1e-6) -> GridFunction:
    """Tensorized trapezoid quadrature of int g(x, y) u(y) dy on u's grid.

    n = 1 evaluates the full exponent matrix; n = 2 factorizes the x-y
    coupling axis by axis, with Gaussian balancing of each factor so that no
    intermediate overflows even for sharply peaked kernels.  The boundary-ring
    mass of the integrand serves as the truncation-error estimate; the grid
    step must resolve the kernel scale 1/sqrt(|K|).
    """
    if k.n != u.n:
        raise DimensionMismatch("kernel/grid dimension mismatch",
                                module=_MOD, operation="apply_kernel_grid")
    if u.n > 2:
        raise DimensionMismatch("grid evolution is implemented for n <= 2",
                                module=_MOD, operation="apply_kernel_grid")
    n = u.n
    nodes = [u.nodes(ax) for ax in range(n)]
    steps = [nodes[ax][1] - nodes[ax][0] for ax in range(n)]
    width = float(np.linalg.norm(k.K, 2)) ** 0.5
    if max(steps) * width > 1.5:
        raise ResolutionTooCoarse(
            f"grid step {max(steps):.3g} too coarse for kernel scale "
            f"{1.0 / max(width, 1e-300):.3g}",
            module=_MOD, operation="apply_kernel_grid")
    Kxx, Kxy, Kyy = k.K[:n, :n], k.K[:n, n:], k.K[n:, n:]
    w = u.weights(0)
    for ax in range(1, n):
        w = np.multiply.outer(w, u.weights(ax))

    def ring_mask(shape):
        mask = np.zeros(shape, dtype=bool)
        for ax in range(len(shape)):
            sl = [slice(None)] * len(shape)
            sl[ax] = 0
            mask[tuple(sl)] = True
            sl[ax] = -1
            mask[tuple(sl)] = True
        return mask

    if n == 1:
        x = nodes[0]
        E = np.exp(-0.5 * (Kxx[0, 0] * x[:, None] ** 2
                           + 2 * Kxy[0, 0] * np.outer(x, x)
                           + Kyy[0, 0] * x[None, :] ** 2))
        V = u.samples * w
        out = k.c * (E @ V)
        ring = ring_mask(V.shape)
        tail = abs(k.c) * float((np.abs(E[:, ring]) @ np.abs(V[ring])).max())
    else:
        # balance: exp(-K_ab x y) = exp(-K_ab x y - c_ab (x^2+y^2)/2) times
        # compensating Gaussians folded into the one-sided fields
        C = np.abs(Kxy)

        def field(M, comp):
            X = np.stack([g.ravel() for g in np.meshgrid(*nodes, indexing="ij")])
            quad = np.einsum("ik,ij,jk->k", X, M, X)
            corr = comp @ (X ** 2)
            return np.exp(-0.5 * quad + 0.5 * corr).reshape(
                tuple(len(p) for p in nodes))

        Px = field(Kxx, C.sum(axis=1))
        Py = field(Kyy, C.sum(axis=0))
        Fs = [[np.exp(-Kxy[a, b] * np.outer(nodes[a], nodes[b])
                      - 0.5 * C[a, b] * (nodes[a][:, None] ** 2
                                         + nodes[b][None, :] ** 2))
               for b in range(2)] for a in range(2)]
        V = Py * u.samples * w
        T = np.einsum("ak,bk,jk->jab", Fs[0][1], Fs[1][1], V, optimize=True)
        out = k.c * Px * np.einsum("aj,bj,jab->ab", Fs[0][0], Fs[1][0], T,
                                   optimize=True)
        ring = ring_mask(V.shape)
        Vr = np.where(ring, np.abs(V), 0.0)
        Tr = np.einsum("ak,bk,jk->jab", np.abs(Fs[0][1]), np.abs(Fs[1][1]), Vr,
                       optimize=True)
        tail = (np.abs(Px) * np.einsum("aj,bj,jab->ab", np.abs(Fs[0][0]),
                                       np.abs(Fs[1][0]), Tr, optimize=True)).max()
        tail = abs(k.c) * float(tail)
    scale = max(np.abs(out).max(), 1e-300)
    if tail > trunc_tol * scale:
        raise TruncationTooLarge(
            f"boundary mass {tail:.3e} vs output scale {scale:.3e}",
            module=_MOD, operation="apply_kernel_grid")
    return GridFunction(n, u.axes, out)


# --------------------------------------------------------------------------
# norms, exponents, estimates

def op_norm_1_inf(k: GaussianKernel, *, tol: float = DEFAULT_TOL) -> float:
    """L^1 -> L^inf norm = sup |g|; the real part of K is PSD, so the
    supremum sits on the null space of Re K and equals |c|."""
    lam = float(np.linalg.eigvalsh((k.K.real + k.K.real.T) / 2).min())
    if lam < -tol * max(1.0, abs(k.c)):
        raise NonIntegrable(f"Re K has lambda_min = {lam:.3e}; sup |g| is "
                            "infinite", module=_MOD, operation="op_norm_1_inf")
    return abs(k.c)


def op_norm_lower_gaussian(k: GaussianKernel, p: float, q: float, *,
                           log_sigma_range=(-2.0, 2.0), points: int = 41,
                           refine: int = 40) -> float:
    """Lower bound on the L^p -> L^q norm over centered isotropic Gaussians,
    golden-section refined over the width."""
    def ratio(ls):
        u = GaussianState(k.n, 1.0, np.eye(k.n) * 10.0 ** (-2 * ls),
                          np.zeros(k.n))
        try:
            return lp_norm(apply_kernel_gaussian(k, u), q) / lp_norm(u, p)
        except (NonIntegrable, NonIntegrableSymbol):
            return 0.0

    grid = np.linspace(*log_sigma_range, points)
    vals = [ratio(ls) for ls in grid]
    i = int(np.argmax(vals))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    phi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c1 = b - phi * (b - a)
    c2 = a + phi * (b - a)
    f1, f2 = ratio(c1), ratio(c2)
    for _ in range(refine):
        if f1 < f2:
            a, c1, f1 = c1, c2, f2
            c2 = a + phi * (b - a)
            f2 = ratio(c2)
        else:
            b, c2, f2 = c2, c1, f1
            c1 = b - phi * (b - a)
            f1 = ratio(c1)
    return max(max(vals), f1, f2)


def compute_cpq(p: float, q: float, n: int, k0: int) -> float:
    """Short-time blow-up exponent of the L^p -> L^q norm.

    r = (1 - 1/p + 1/q)^{-1}; the two branches meet continuously at r = 2.
    """
    if not (1 <= p <= q):
        raise ExponentOrder(f"need 1 <= p <= q, got ({p}, {q})",
                            module=_MOD, operation="compute_cpq")
    rinv = 1 - (0.0 if np.isinf(p) else 1 / p) + (0.0 if np.isinf(q) else 1 / q)
    if rinv <= 0:
        r = np.inf
    else:
        r = 1 / rinv
    if r <= 2:
        return n * (2 * k0 + r - 1) / (2 * r)
    if np.isinf(r):
        return n * (2 * k0 + 1) / 2
    return n * (2 * k0 + 1) * (r - 1) / (2 * r)


def norm_fit_report(p: float, q: float, n: int, k0: int,
                    t_values, norms) -> NormFitReport:
    """Package a measured t-sweep with its derived exponent data."""
    rinv = 1 - (0.0 if np.isinf(p) else 1 / p) + (0.0 if np.isinf(q) else 1 / q)
    r = np.inf if rinv <= 0 else 1 / rinv
    slope, r2 = fit_exponent(t_values, norms)
    return NormFitReport(p=p, q=q, r=r, cpq=compute_cpq(p, q, n, k0),
                         t_values=np.asarray(t_values, float),
                         norms=np.asarray(norms, float),
                         fitted_slope=slope, r_squared=r2)


def fit_exponent(t_values, norms) -> tuple[float, float]:
    """Least-squares slope of log(norm) against log(t); returns (slope, R^2)."""
    t_values = np.asarray(t_values, dtype=float)
    norms = np.asarray(norms, dtype=float)
    if t_values.size < 3:
        raise NonPositiveSample("need at least 3 samples", module=_MOD,
                                operation="fit_exponent")
    if (t_values <= 0).any() or (norms <= 0).any():
        raise NonPositiveSample("t values and norms must be positive",
                                module=_MOD, operation="fit_exponent")
    x = np.log(t_values)
    y = np.log(norms)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot < 1e-30 else 1.0 - float((resid ** 2).sum()) / ss_tot
    return float(slope), r2


# --------------------------------------------------------------------------
# derivative growth

def _derivative_polys(u: GaussianState, m_max: int) -> list[dict]:
    """Coefficient arrays of p_alpha with d^alpha u = p_alpha(x) u(x).

    p_{alpha + e_j} = d_j p_alpha + p_alpha * (b_j - (Ax)_j); levels[m] maps
    each multi-index of order m to a dense coefficient array of shape
    (m+1,) * n in the numpy polynomial convention.
    """
    n = u.n
    levels = [{(0,) * n: np.ones((1,) * n, dtype=complex)}]
    for m in range(1, m_max + 1):
        prev = levels[-1]
        cur = {}
        for alpha in prev:
            for j in range(n):
                beta = tuple(a + (1 if i == j else 0) for i, a in enumerate(alpha))
                if beta in cur:
                    continue
                pa = prev[alpha]
                shape = tuple(s + 1 for s in pa.shape)
                out = np.zeros(shape, dtype=complex)
                # derivative d_j p_alpha
                sl_src = [slice(None)] * n
                sl_dst = [slice(None)] * n
                deg = pa.shape[j]
                if deg > 1:
                    sl_src[j] = slice(1, None)
                    sl_dst[j] = slice(0, deg - 1)
                    ks = np.arange(1, deg).reshape(
                        [-1 if i == j else 1 for i in range(n)])
                    pad = tuple(slice(0, s) for s in pa[tuple(sl_src)].shape)
                    out[tuple(sl_dst)][pad] += pa[tuple(sl_src)] * ks
                # + b_j p_alpha
                pad = tuple(slice(0, s) for s in pa.shape)
                out[pad] += u.b[j] * pa
                # - (A x)_j p_alpha  (shift by one in each x_i)
                for i in range(n):
                    if u.A[j, i] == 0:
                        continue
                    sl = [slice(0, s) for s in pa.shape]
                    sl[i] = slice(1, pa.shape[i] + 1)
                    out[tuple(sl)] -= u.A[j, i] * pa
                cur[beta] = out
        levels.append(cur)
    return levels


def _poly_eval(coeffs: np.ndarray, X: list[np.ndarray]) -> np.ndarray:
    from numpy.polynomial import polynomial as P
    if len(X) == 1:
        return P.polyval(X[0], coeffs)
    return P.polyval2d(X[0], X[1], coeffs)


def _frobenius_field(u: GaussianState, level: dict, X: list[np.ndarray]) -> np.ndarray:
    """|d^m u|_F evaluated on the point set X (list of coordinate arrays)."""
    pts = np.stack([x.ravel() for x in X])
    quad = (-0.5 * np.einsum("ik,ij,jk->k", pts, u.A, pts)
            + u.b @ pts).reshape(X[0].shape)
    gauss = np.abs(u.c * np.exp(quad))
    total = np.zeros(X[0].shape)
    m = sum(next(iter(level)))
    for alpha, coeffs in level.items():
        mult = math.factorial(m)
        for a in alpha:
            mult //= math.factorial(a)
        total += mult * np.abs(_poly_eval(coeffs, X)) ** 2
    return np.sqrt(total) * gauss


def derivative_growth_check(k: GaussianKernel, G, u: GaussianState,
                            m_max: int = 6, *, eps: float = 1.0) -> np.ndarray:
    """Ratios r_m = w(x*)^{-m} |d^m (k u)(x*)|_F / (eps^{-m/2} sqrt(m!) |u|_inf)
    for m = 0..m_max, with w(x) = (<Gx> + <G^T x>)/2 evaluated at the
    maximizer x* of the unweighted derivative norm.

    Derivatives are analytic (polynomial-times-Gaussian recurrences); the
    maximizer is located by a two-stage grid search, never finite differences.
    """
    G = np.asarray(G, dtype=float)
    out = apply_kernel_gaussian(k, u)
    n = out.n
    if n > 2:
        raise DimensionMismatch("derivative check implemented for n <= 2",
                                module=_MOD, operation="derivative_growth_check")
    levels = _derivative_polys(out, m_max)
    ReA = out.A.real
    center = np.linalg.solve(ReA, out.b.real)
    radius = 6.0 / math.sqrt(np.linalg.eigvalsh(ReA).min()) + np.abs(center).max()
    u_inf = lp_norm(u, np.inf)
    ratios = np.empty(m_max + 1)
    for m in range(m_max + 1):
        x_best = center.copy()
        span = radius
        for _stage in range(3):
            axes_pts = [np.linspace(x_best[i] - span, x_best[i] + span, 81)
                        for i in range(n)]
            X = list(np.meshgrid(*axes_pts, indexing="ij"))
            field = _frobenius_field(out, levels[m], X)
            idx = np.unravel_index(np.argmax(field), field.shape)
            x_best = np.array([axes_pts[i][idx[i]] for i in range(n)])
            best = field[idx]
            span /= 20.0
        wx = 0.5 * (math.sqrt(1 + float(np.sum((G @ x_best) ** 2)))
                    + math.sqrt(1 + float(np.sum((G.T @ x_best) ** 2))))
        ratios[m] = (wx ** (-m) * best
                     / (eps ** (-m / 2) * math.sqrt(math.factorial(m)) * u_inf))
    return ratios


# --------------------------------------------------------------------------
# twisted-vs-dispersion bound

def miraculous_bound_check(N, eps: float, D, u, axes=None) -> float:
    """Max over grid nodes of LHS - RHS for the pointwise bound

        |TW e^{(i/2) d(grad)} u(x)|
            <= (2 pi)^{-n/2} det(eps^2 I + D^2)^{-1/4}
               (e^{-eps r / 2} * |u|)(x - DNx),

    TW the twisted diffusion with parameter eps, r of matrix
    (eps^2 I + D^2)^{-1}.  Gaussian states evaluate both sides in closed
    form; grid inputs are supported for D = 0 only (no warp).
    """
    N = np.asarray(N, dtype=float)
    D = np.asarray(D, dtype=float)
    n = N.shape[0]
    ktw = twisted_kernel(N, eps)
    Rmat = np.linalg.inv(eps ** 2 * np.eye(n) + D @ D)
    pref = (2 * np.pi) ** (-n / 2) * float(np.linalg.det(
        eps ** 2 * np.eye(n) + D @ D)) ** (-0.25)
    if axes is None:
        axes = tuple((-8.0, 8.0, 65) for _ in range(n))

    if isinstance(u, GaussianState):
        lhs_state = apply_kernel_gaussian(ktw, _half_dispersion(u, D))
        rhs_state = convolve_gaussian(eps * Rmat, u.modulus())
        grids = np.meshgrid(*[np.linspace(a[0], a[1], int(a[2])) for a in axes],
                            indexing="ij")
        X = np.stack([g.ravel() for g in grids])
        lhs = np.abs([lhs_state(x) for x in X.T])
        warped = X - (D @ N) @ X
        rhs = pref * np.abs([rhs_state(x) for x in warped.T])
        return float((lhs - rhs).max())
    if isinstance(u, GridFunction):
        if spectral_norm(D) > 0:
            raise DimensionMismatch("grid path supports D = 0 only",
                                    module=_MOD, operation="miraculous_bound_check")
        lhs = np.abs(apply_kernel_grid(ktw, u).samples)
        conv_K = np.block([[eps * Rmat, -eps * Rmat], [-eps * Rmat, eps * Rmat]])
        mod = GridFunction(u.n, u.axes, np.abs(u.samples))
        rhs = pref * np.abs(apply_kernel_grid(
            GaussianKernel(n, 1.0 + 0j, conv_K.astype(complex)), mod).samples)
        return float((lhs - rhs).max())
    raise DimensionMismatch(f"unsupported input {type(u)}", module=_MOD,
                            operation="miraculous_bound_check")


def _half_dispersion(u: GaussianState, D) -> GaussianState:
    """exp((i/2) d(grad)) u, i.e. the Fourier multiplier exp(-(i/2) d(xi))."""
    return dispersion_gaussian(u, np.asarray(D, float), 0.5)


# --------------------------------------------------------------------------
# reciprocal demo

def counterexample_demo(q: QuadraticForm, t: float = 0.1, *,
                        points: int = 2001, domain: float = 4.0,
                        tol: float = DEFAULT_TOL) -> dict:
    """Evolve a jump discontinuity under a fixture violating the graph
    condition and report that no smoothing occurs.

    Requires a multiplication-type fixture (symbol supported on the physical
    variables), for which exp(-t q^w) is multiplication by exp(-t q(x, 0)).
    """
    report = singular_space(q, tol=tol)
    if graph_condition(report, tol=tol) is not None:
        raise FixtureHasGraph("fixture satisfies the graph condition; "
                              "nothing to demonstrate",
                              module=_MOD, operation="counterexample_demo")
    n = q.n
    if np.abs(q.Q[n:, :]).max() > tol or np.abs(q.Q[:n, n:]).max() > tol:
        raise DimensionMismatch(
            "demo implemented for multiplication-type fixtures (Q supported "
            "on the x-block)", module=_MOD, operation="counterexample_demo")
    if n != 1:
        raise DimensionMismatch("demo implemented for n = 1",
                                module=_MOD, operation="counterexample_demo")
    xs = np.linspace(-domain, domain, points)
    jump_at = 0.0
    u = np.where(xs >= jump_at, 1.0, 0.0) * np.exp(-xs ** 2)
    i_hi = int(np.searchsorted(xs, jump_at))
    jump_before = abs(u[i_hi] - u[i_hi - 1])
    mult = np.exp(-t * q.Q[0, 0].real * xs ** 2)
    v = mult * u
    jump_after = abs(v[i_hi] - v[i_hi - 1])

    kernel_error = None
    try:
        kernel_from_symbol(mehler_symbol(q, t), tol=tol)
    except NonIntegrableSymbol as exc:
        kernel_error = type(exc).__name__
    return {
        "t": t,
        "jump_before": float(jump_before),
        "jump_after": float(jump_after),
        "jump_preserved": bool(abs(jump_after - jump_before)
                               <= 1e-3 * max(jump_before, 1e-300)),
        "kernel_error": kernel_error,
    }

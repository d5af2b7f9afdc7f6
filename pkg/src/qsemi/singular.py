"""Singular space of an accretive quadratic form, its global index, and the
graph condition.

The singular space is the intersection of the kernels of Re(Q) (Im JQ)^l for
l = 0 .. 2n-1; the global index is the smallest l at which the intersection
stabilizes.  The graph condition asks whether this real subspace is the graph
{(x, Gx)} of a real n x n matrix acting on the physical variables.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .matfun import DEFAULT_TOL, null_space
from .quadform import QuadraticForm, hamilton_map

_MOD = "singular"


@dataclass
class SingularSpaceReport:
    """Orthonormal basis of S together with the index data and the SVD gap.

    sv_kept / sv_dropped expose the singular values bracketing the rank
    decision so borderline cases can be audited by callers.
    """
    basis: np.ndarray          # (2n, d), orthonormal real columns
    k0: int
    dim: int
    tol: float = field(repr=False, default=DEFAULT_TOL)
    sv_kept: float = field(repr=False, default=float("nan"))
    sv_dropped: float = field(repr=False, default=float("nan"))

    @property
    def gap_ratio(self) -> float:
        if self.sv_dropped == 0.0 or np.isnan(self.sv_dropped):
            return float("inf")
        return self.sv_kept / self.sv_dropped


@dataclass
class GraphCertificate:
    """G with S contained in {(x, Gx)}; N and Gsym are its skew/symmetric parts."""
    G: np.ndarray
    N: np.ndarray
    Gsym: np.ndarray


def singular_space(q: QuadraticForm, tol: float = DEFAULT_TOL) -> SingularSpaceReport:
    """Compute S, its dimension and the global index k0.

    All 2n iterates Re(Q) (Im F)^l are stacked and a single SVD kernel call
    produces S; k0 comes from the ranks of the incremental stacks, which are
    monotone, using one consistent absolute threshold.
    """
    n2 = 2 * q.n
    ReQ = q.Q.real
    ImF = hamilton_map(q).imag
    blocks = []
    P = np.eye(n2)
    for _ in range(n2):
        blocks.append(ReQ @ P)
        P = P @ ImF
    full = np.vstack(blocks)

    sv = np.linalg.svd(full, compute_uv=False)
    smax = sv[0] if sv.size else 0.0
    thresh = tol * smax if smax >= tol else tol
    rank_full = int((sv >= thresh).sum())
    dim_S = n2 - rank_full
    kept = float(sv[rank_full - 1]) if rank_full > 0 else float("nan")
    dropped = float(sv[rank_full]) if rank_full < sv.size else 0.0

    basis = null_space(full, tol=tol)
    if basis.shape[1] != dim_S:  # null_space uses its own threshold; same rule
        dim_S = basis.shape[1]
    basis = basis.real  # all stacked matrices are real, so S is a real subspace

    k0 = 0
    for k in range(n2):
        stack_k = np.vstack(blocks[: k + 1])
        sv_k = np.linalg.svd(stack_k, compute_uv=False)
        if n2 - int((sv_k >= thresh).sum()) == dim_S:
            k0 = k
            break
    return SingularSpaceReport(basis=basis, k0=k0, dim=dim_S, tol=tol,
                               sv_kept=kept, sv_dropped=dropped)


def graph_condition(report: SingularSpaceReport, tol: float = DEFAULT_TOL,
                    ) -> GraphCertificate | None:
    """Return the minimal-norm graph certificate, or None when S meets {0} x R^n.

    G solves G (Pi_x basis) = Pi_xi basis in the least-squares sense and is
    extended by zero off the projection of S, which is the minimal Frobenius
    norm choice.
    """
    basis = np.asarray(report.basis, dtype=float)
    n = basis.shape[0] // 2
    d = basis.shape[1]
    if d == 0:
        Z = np.zeros((n, n))
        return GraphCertificate(G=Z, N=Z.copy(), Gsym=Z.copy())
    X = basis[:n, :]
    Xi = basis[n:, :]
    sv = np.linalg.svd(X, compute_uv=False)
    smax = sv[0] if sv.size else 0.0
    thresh = tol * max(smax, 1.0)
    if int((sv >= thresh).sum()) < d:
        return None
    G = Xi @ np.linalg.pinv(X, rcond=tol)
    N = (G - G.T) / 2
    Gsym = (G + G.T) / 2
    return GraphCertificate(G=G, N=N, Gsym=Gsym)


def isotropic_cone_check(a, report: SingularSpaceReport) -> float:
    """max over basis columns v of |a(v)| for a real symmetric PSD matrix a.

    Zero (vacuously) when S is trivial; small residuals certify that the form
    a vanishes on S.
    """
    a = np.asarray(a, dtype=float)
    basis = np.asarray(report.basis, dtype=float)
    if basis.shape[1] == 0:
        return 0.0
    vals = np.einsum("ij,ik,kj->j", basis, a, basis)
    return float(np.abs(vals).max())

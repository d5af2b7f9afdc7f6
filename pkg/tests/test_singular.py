"""Singular space, global index and graph condition tests.

The independent oracle intersects the kernels of Re(Q)(Im F)^l one level at
a time with scipy's null_space (the package stacks all levels into a single
SVD), so the two paths share no code.
"""
import numpy as np
from scipy.linalg import null_space as scipy_null_space

from qsemi import (
    conjugate_by_linear,
    graph_condition,
    hamilton_map,
    isotropic_cone_check,
    shear_transform,
    singular_space,
)
from qsemi.decompose import polar_factors
from qsemi.fixtures import (
    fokker_planck,
    harmonic,
    heat,
    kolmogorov,
    shifted_diagonal,
    x_squared,
)


def iterated_kernel_oracle(q):
    """Intersect Ker(Re Q (Im F)^l) level by level; returns (basis, dims)."""
    n2 = 2 * q.n
    ReQ = q.Q.real
    ImF = hamilton_map(q).imag
    basis = np.eye(n2)
    dims = []
    for level in range(n2):
        M = ReQ @ np.linalg.matrix_power(ImF, level)
        if basis.shape[1] == 0:
            dims.append(0)
            continue
        K = scipy_null_space(M @ basis, rcond=1e-10)
        basis = basis @ K
        dims.append(basis.shape[1])
    return basis, dims


def oracle_k0(dims):
    final = dims[-1]
    for k, d in enumerate(dims):
        if d == final:
            return k
    return len(dims) - 1


def subspace_distance(B1, B2):
    def proj(B):
        if B.shape[1] == 0:
            return np.zeros((B.shape[0], B.shape[0]))
        Q, _ = np.linalg.qr(B)
        return Q @ Q.T
    return np.linalg.norm(proj(B1) - proj(B2), 2)


def test_shifted_diagonal_singular_space():
    rep = singular_space(shifted_diagonal())
    target = np.array([[1.0], [1.0]]) / np.sqrt(2)
    assert rep.dim == 1
    assert rep.k0 == 0
    assert subspace_distance(rep.basis, target) < 1e-10


def test_heat_singular_space():
    for n in (1, 2):
        rep = singular_space(heat(n))
        target = np.vstack([np.eye(n), np.zeros((n, n))])
        assert rep.dim == n
        assert rep.k0 == 0
        assert subspace_distance(rep.basis, target) < 1e-12


def test_kolmogorov_singular_space_vs_oracle():
    q = kolmogorov()
    rep = singular_space(q)
    basis, dims = iterated_kernel_oracle(q)
    assert rep.dim == basis.shape[1] == 2
    assert subspace_distance(rep.basis, basis) < 1e-10
    assert rep.k0 == oracle_k0(dims) == 1


def test_harmonic_singular_space_trivial():
    rep = singular_space(harmonic(1))
    assert rep.dim == 0
    assert rep.k0 == 0


def test_fokker_planck_singular_space():
    q = fokker_planck()
    rep = singular_space(q)
    basis, dims = iterated_kernel_oracle(q)
    assert rep.dim == basis.shape[1]
    assert subspace_distance(rep.basis, basis) < 1e-10
    assert rep.k0 == oracle_k0(dims)


def test_all_fixtures_match_oracle():
    for q in (heat(1), heat(2), harmonic(1), kolmogorov(), fokker_planck(),
              shifted_diagonal(), x_squared()):
        rep = singular_space(q)
        basis, dims = iterated_kernel_oracle(q)
        assert rep.dim == basis.shape[1]
        assert subspace_distance(rep.basis, basis) < 1e-9
        assert rep.k0 == oracle_k0(dims)


def test_graph_diagonal():
    cert = graph_condition(singular_space(shifted_diagonal()))
    assert cert is not None
    assert np.allclose(cert.G, [[1.0]], atol=1e-12)
    assert np.allclose(cert.N, [[0.0]], atol=1e-12)


def test_graph_absent_for_x_squared():
    assert graph_condition(singular_space(x_squared())) is None


def test_graph_trivial_space_gives_zero():
    cert = graph_condition(singular_space(harmonic(1)))
    assert cert is not None
    assert np.allclose(cert.G, 0, atol=1e-15)


def test_graph_kolmogorov_zero():
    cert = graph_condition(singular_space(kolmogorov()))
    assert cert is not None
    assert np.allclose(cert.G, np.zeros((2, 2)), atol=1e-12)


def test_graph_membership_characterization():
    # absent exactly when some (0, xi_0), xi_0 != 0, lies in S
    for q in (heat(1), kolmogorov(), shifted_diagonal(), x_squared()):
        rep = singular_space(q)
        cert = graph_condition(rep)
        n = q.n
        contains_vertical = False
        if rep.dim > 0:
            # (0, xi0) in span(basis) iff projecting out x leaves a vector
            X = rep.basis[:n, :]
            K = scipy_null_space(X, rcond=1e-10)
            contains_vertical = K.shape[1] > 0
        assert (cert is None) == contains_vertical


def test_isotropic_cone_heat():
    q = heat(2)
    rep = singular_space(q)
    assert isotropic_cone_check(q.Q.real, rep) < 1e-14


def test_isotropic_cone_empty_basis():
    rep = singular_space(kolmogorov())
    # vacuous on the trivial-subspace report of the harmonic oscillator
    rep0 = singular_space(harmonic(1))
    assert isotropic_cone_check(np.eye(2), rep0) == 0.0
    del rep


def test_isotropic_cone_polar_factor():
    q = shifted_diagonal()
    rep = singular_space(q)
    pol = polar_factors(q, 0.1)
    assert isotropic_cone_check(pol.A, rep) < 1e-9


def test_stability_under_perturbation():
    rng = np.random.default_rng(53)
    for q in (heat(1), kolmogorov(), shifted_diagonal()):
        rep = singular_space(q)
        delta = rng.standard_normal(q.Q.shape) + 1j * rng.standard_normal(q.Q.shape)
        delta = (delta + delta.T) / 2
        delta *= 1e-11 / np.linalg.norm(delta)
        try:
            qp = type(q)(q.n, q.Q + delta)
        except Exception:
            # accretivity can fail at the boundary; shift the real part up
            qp = type(q)(q.n, q.Q + delta + 2e-11 * np.eye(2 * q.n))
        repp = singular_space(qp)
        assert repp.dim == rep.dim
        assert repp.k0 == rep.k0


def test_transformation_law_under_shear():
    for q in (shifted_diagonal(), kolmogorov()):
        rep = singular_space(q)
        Gsym = np.eye(q.n)
        L = shear_transform(Gsym)
        qt = conjugate_by_linear(q, L)
        rept = singular_space(qt)
        target = np.linalg.inv(L) @ rep.basis
        assert subspace_distance(rept.basis, target) < 1e-8
        assert rept.k0 == rep.k0


def test_report_gap_is_exposed():
    rep = singular_space(kolmogorov())
    assert rep.gap_ratio > 1e6

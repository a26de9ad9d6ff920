import math

import numpy as np
import pytest

from ctqw.circuit import RY, H, basis_state, simulate
from ctqw.oracle import DenseHamiltonian
from ctqw.spectral import (
    Family,
    GraphSpec,
    bipartite_coefficients,
    bipartite_spectrum,
    complete_spectrum,
    hypercube_spectral,
    spectrum,
)
from ctqw.stateprep import (
    AlphaDecomposition,
    alphas_from_state,
    angles_from_alphas,
    block_basis,
    build_stateprep_circuit,
    prepare,
)


def _plan(alphas):
    a = np.asarray(alphas, dtype=float)
    return angles_from_alphas(AlphaDecomposition(a.size - 1, a))


def _angles_of(vec):
    return angles_from_alphas(alphas_from_state(vec)).theta


def test_block_basis_orthonormal():
    for n in range(1, 8):
        b = block_basis(n)
        assert np.allclose(b @ b.T, np.eye(n + 1), atol=1e-14)


def test_alphas_of_zero_state():
    dec = alphas_from_state(basis_state(4).real)
    assert np.allclose(dec.alphas, [1, 0, 0, 0, 0])
    assert dec.residual == 0


def test_alphas_of_uniform_state():
    dec = alphas_from_state(np.full(4, 0.5))
    assert np.allclose(dec.alphas, [0.5, 0.5, 1 / math.sqrt(2)], atol=1e-15)
    assert dec.residual < 1e-15


def test_alphas_reject_non_block_state():
    v = np.full(4, 0.5)
    v[2], v[3] = 0.7, 0.1
    with pytest.raises(ValueError, match="residual"):
        alphas_from_state(v)


def test_alphas_reject_zero_vector():
    with pytest.raises(ValueError):
        alphas_from_state(np.zeros(8))


def test_alphas_keep_norm():
    v = 3.0 * np.full(8, 1 / math.sqrt(8))
    dec = alphas_from_state(v)
    assert dec.norm == pytest.approx(3.0)
    assert float(dec.alphas @ dec.alphas) == pytest.approx(1.0, abs=1e-12)


def test_angles_of_zero_state():
    plan = _plan([1, 0, 0, 0, 0])
    assert plan.theta_prime[0] == math.pi / 2
    assert np.all(plan.theta_prime[1:] == 0)
    assert np.allclose(plan.theta, -math.pi / 2)


def test_angles_reject_unnormalised():
    with pytest.raises(ValueError):
        _plan([1.0, 0.5])


def test_degenerate_tail_gives_signed_right_angle():
    # alpha_2 exhausts the norm so the tail denominator vanishes for k = 2
    plan = _plan([0, 0, -1])
    assert plan.theta_prime[2] == pytest.approx(-math.pi / 2)
    assert plan.theta_prime[1] == 0


def test_reconstruction_identity(rng):
    for n in range(1, 11):
        a = rng.normal(size=n + 1)
        a /= np.linalg.norm(a)
        tp = _plan(a).theta_prime
        for k in range(1, n + 1):
            rebuilt = math.sin(tp[k]) * np.prod(np.cos(tp[k + 1:]))
            assert rebuilt == pytest.approx(a[k], abs=1e-12)


def test_theta_relation(rng):
    a = rng.normal(size=6)
    plan = _plan(a / np.linalg.norm(a))
    n = plan.n
    for k in range(1, n + 1):
        assert plan.theta[k - 1] == 2 * plan.theta_prime[n - k + 1] - math.pi / 2


def test_circuit_structure():
    n = 6
    c = build_stateprep_circuit(_plan(np.eye(n + 1)[0]))
    hs = [g for g in c.gates if g.kind == H]
    rots = [g for g in c.gates if g.kind == RY]
    assert len(hs) == n and len(rots) == n and len(c) == 2 * n
    for k, g in enumerate(rots, start=1):
        assert len(g.controls) == k - 1
        assert all(pol == 0 for _, pol in g.controls)


def test_prepare_zero_state():
    c, _ = prepare(basis_state(4).real)
    assert np.allclose(simulate(c), basis_state(4), atol=1e-12)


def test_round_trip_random_alphas(rng):
    for _ in range(200):
        n = int(rng.integers(1, 11))
        a = rng.normal(size=n + 1)
        a /= np.linalg.norm(a)
        psi = simulate(build_stateprep_circuit(_plan(a)))
        assert np.abs(psi.imag).max() < 1e-12
        back = alphas_from_state(psi.real).alphas
        assert np.abs(back - a).max() <= 1e-9


def test_complete_plus_at_n16_matches_dense_eigvec():
    model = complete_spectrum(4)
    c, _ = prepare(model.plus.vector)
    vals, vecs = DenseHamiltonian.for_graph(GraphSpec(Family.COMPLETE, 4)).eigh
    ref = vecs[:, np.argmin(np.abs(vals - (model.plus.value - model.shift)))]
    ref = ref * np.sign(ref[0])
    assert np.abs(simulate(c) - ref).max() <= 1e-10


def test_bipartite_lambda0_pattern():
    m, n = 4, 8
    lam0 = bipartite_spectrum(m).eigen[2].value
    a, b, cc = bipartite_coefficients(lam0, m)
    expect = np.r_[1.0, np.full(n - 1, a), np.full(n, b)] / math.sqrt(cc)
    circ, _ = prepare(bipartite_spectrum(m).eigen[2].vector)
    assert np.abs(simulate(circ) - expect).max() <= 1e-10


@pytest.mark.parametrize("family", list(Family))
def test_prepares_every_family_eigenvector(family):
    lo = 1 if family is Family.COMPLETE else 2
    for q in range(lo, 11):
        for pair in spectrum(GraphSpec(family, q)).eigen:
            c, dec = prepare(pair.vector)
            target = pair.vector / np.linalg.norm(pair.vector)
            assert np.linalg.norm(simulate(c) - target) <= 1e-10
            assert dec.norm == pytest.approx(np.linalg.norm(pair.vector), rel=1e-12)


# -- closed-form angles -----------------------------------------------------------

def _complete_form(k, N, s):
    return -s * 2 * math.atan(1 / math.sqrt(1 + 2**k - s * 2 ** (k + 1) / math.sqrt(N))) - math.pi / 2


def test_complete_closed_form_angles():
    for q in range(1, 11):
        model = complete_spectrum(q)
        for s, pair in ((-1, model.minus), (1, model.plus)):
            cf = [_complete_form(k, 2**q, s) for k in range(1, q + 1)]
            assert np.abs(_angles_of(pair.vector) - cf).max() <= 1e-9


def test_bipartite_closed_form_angles():
    # the b entry sits on the top block, which is ladder gate k = 1
    for m in range(2, 11):
        for pair in bipartite_spectrum(m).eigen:
            a, b, c = bipartite_coefficients(pair.value, m)
            cf = []
            for k in range(1, m + 1):
                d = 1.0 if k == 1 else 0.0
                den = math.sqrt(a * a * (1 - 2 ** (k - 1)) - b * b * 2 ** (k - 1) + c * 2 ** (k - m))
                cf.append(2 * math.atan((a * (1 - d) + b * d) / den) - math.pi / 2)
            assert np.abs(_angles_of(pair.vector) - cf).max() <= 1e-9


def test_hypercube_angles_exact_and_asymptotic():
    for q in range(2, 11):
        N = 2**q
        model = hypercube_spectral(q)
        for s, pair in ((-1, model.minus), (1, model.plus)):
            got = _angles_of(pair.vector)
            exact = [_complete_form(k, N, s) for k in range(1, q + 1)]
            short = [-s * 2 * math.atan(1 / math.sqrt(1 + 2**k)) - math.pi / 2 for k in range(1, q + 1)]
            assert np.abs(got - exact).max() <= 1e-9
            assert np.abs(got - short).max() <= 1.5 / math.sqrt(N)


def test_hypercube_first_angle():
    model = hypercube_spectral(10)
    for s, pair in ((-1, model.minus), (1, model.plus)):
        short = -s * 2 * math.atan(1 / math.sqrt(3)) - math.pi / 2
        assert short == pytest.approx(-s * math.pi / 3 - math.pi / 2, abs=1e-15)
        assert _angles_of(pair.vector)[0] == pytest.approx(short, abs=1.5 / 32)

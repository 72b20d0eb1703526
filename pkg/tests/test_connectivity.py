import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from covertgeo.connectivity import (
    CasLink,
    DasLink,
    conn_prob_cas,
    conn_prob_cas_approx,
    conn_prob_das,
    das_w_const,
    k_const,
    upsilon,
    upsilon_table,
)
from covertgeo.errors import DomainError, SingularityError
from covertgeo.model import AntennaLayout, NetworkConfig, PolarPoint, make_layout

DELTA = 0.5


def das_link(m=4, **cfg):
    return DasLink.from_config(NetworkConfig(**cfg), make_layout("das", m, 1.0))


def simplex_oracle(link: DasLink, beta: float) -> float:
    """``1 - C`` for M = 2 by adaptive quadrature of the simplex integral as written."""
    g = link.gains
    s, d = link.field.strength, link.delta

    def f(v2, v1):
        psi1 = g[0] * v1 * v1 + g[1] * v2 * v2
        psi2 = 4.0 * g[0] * g[1] * v1 * v2
        a = s * psi1 ** d * beta ** d
        terms = sum((d * a) ** n * upsilon(2, n, d) for n in (1, 2))
        return psi2 * math.exp(-a) / psi1 ** 2 * terms

    val, _ = integrate.dblquad(f, 0.0, 1.0, 0.0, lambda v1: 1.0 - v1, epsabs=1e-10, epsrel=1e-8)
    return val


class TestUpsilon:
    def test_diagonal(self):
        assert all(upsilon(m, m, DELTA) == 1.0 for m in range(1, 9))

    def test_small_cases(self):
        assert upsilon(2, 1, DELTA) == pytest.approx(1 - DELTA)
        assert upsilon(3, 1, DELTA) == pytest.approx((1 - DELTA) * (2 - DELTA))

    def test_errors(self):
        with pytest.raises(DomainError):
            upsilon(2, 3, DELTA)
        with pytest.raises(DomainError):
            upsilon(2, 0, DELTA)

    def test_table(self):
        t = upsilon_table(5, DELTA)
        assert len(t) == 15 and t[(4, 1)] == upsilon(4, 1, DELTA)

    def test_k_const(self):
        assert k_const(DELTA, 1) == 0.0
        assert k_const(DELTA, 2) == pytest.approx(0.5)
        # K equals delta * sum_m Upsilon_{m,1} / m!
        for m in range(1, 9):
            ref = DELTA * sum(upsilon(j, 1, DELTA) / math.factorial(j) for j in range(1, m))
            assert k_const(DELTA, m) == pytest.approx(ref)


class TestCas:
    def test_single_antenna(self):
        link = CasLink(0.7, 1, DELTA)
        assert conn_prob_cas(link, 2.0) == pytest.approx(math.exp(-0.7 * 2.0 ** DELTA))
        assert conn_prob_cas_approx(link, 2.0) == pytest.approx(math.exp(-0.7 * 2.0 ** DELTA))

    def test_small_beta(self):
        assert conn_prob_cas(CasLink(0.5, 4, DELTA), 1e-12) == pytest.approx(1.0, abs=1e-5)

    def test_from_config(self):
        link = CasLink.from_config(NetworkConfig(), make_layout("cas", 4, 1.0))
        # Rayleigh shot-noise exponent at alpha = 4: lambda pi Gamma(3/2) Gamma(1/2) = pi^2 lambda / 2
        assert link.phi == pytest.approx(math.pi ** 2 * 0.1 / 2)

    def test_m2_closed_form(self):
        # M = 2: exp(-x) (1 + delta x (1 - delta) + ...) with Upsilon_{1,1} = 1
        x = 0.3
        link = CasLink(x, 2, DELTA)
        assert conn_prob_cas(link, 1.0) == pytest.approx(math.exp(-x) * (1 + DELTA * x))

    def test_approx_point(self):
        x = 0.05
        link = CasLink(x, 4, DELTA)
        assert abs(conn_prob_cas_approx(link, 1.0) - conn_prob_cas(link, 1.0)) <= x ** 2

    @pytest.mark.parametrize("m", range(1, 9))
    def test_approx_band(self, m):
        for x in np.linspace(0.005, 0.2, 40):
            link = CasLink(float(x), m, DELTA)
            assert abs(conn_prob_cas_approx(link, 1.0) - conn_prob_cas(link, 1.0)) <= 2 * x ** 2

    def test_monotone(self):
        betas = np.geomspace(1e-3, 1e3, 60)
        for m in (1, 4, 8):
            vals = [conn_prob_cas(CasLink(0.5, m, DELTA), b) for b in betas]
            assert np.all(np.diff(vals) <= 1e-15)
        phis = np.linspace(0.01, 5, 40)
        vals = [conn_prob_cas(CasLink(p, 4, DELTA), 1.0) for p in phis]
        assert np.all(np.diff(vals) <= 1e-15)

    def test_diminishing_returns_in_m(self):
        c = [conn_prob_cas(CasLink(0.5, m, DELTA), 1.0) for m in range(1, 10)]
        inc = np.diff(c)
        assert np.all(inc > 0)
        assert np.all(np.diff(inc) <= 1e-15)

    @settings(max_examples=300)
    @given(
        st.floats(0.0, 50.0),
        st.floats(1e-6, 1e6),
        st.integers(1, 12),
    )
    def test_range(self, phi, beta, m):
        assert 0.0 <= conn_prob_cas(CasLink(phi, m, DELTA), beta) <= 1.0

    def test_errors(self):
        with pytest.raises(DomainError):
            conn_prob_cas(CasLink(0.5, 2, DELTA), 0.0)
        with pytest.raises(DomainError):
            CasLink(-1.0, 2, DELTA)
        with pytest.raises(DomainError):
            CasLink(1.0, 0, DELTA)


class TestDas:
    def test_matches_quadrature_m2(self):
        link = das_link(2)
        for beta in (0.1, 1.0, 10.0):
            est = conn_prob_das(link, beta)
            ref = 1.0 - simplex_oracle(link, beta)
            assert abs(est.value - ref) <= max(est.half_width, 1e-4)

    def test_single_antenna_matches_cas(self):
        cfg, lay = NetworkConfig(), make_layout("das", 1, 1.0)
        for beta in (0.1, 1.0, 5.0):
            est = conn_prob_das(DasLink.from_config(cfg, lay), beta)
            ref = conn_prob_cas(CasLink.from_config(cfg, lay), beta)
            assert est.value == pytest.approx(ref, abs=1e-9)

    def test_small_beta(self):
        assert conn_prob_das(das_link(4), 1e-12).value == pytest.approx(1.0, abs=1e-5)

    def test_near_parity_with_cas(self):
        cfg = NetworkConfig()
        for m in (2, 4, 8):
            for beta in (0.1, 1.0, 3.0):
                cas = conn_prob_cas(CasLink.from_config(cfg, make_layout("cas", m, 1.0)), beta)
                das = conn_prob_das(das_link(m), beta).value
                assert abs(cas - das) <= 0.03

    def test_nonincreasing_in_beta(self):
        link = das_link(4)
        vals = [conn_prob_das(link, b).value for b in np.geomspace(0.01, 100, 20)]
        assert np.all(np.diff(vals) <= 1e-12)

    def test_far_tail_positive_and_monotone(self):
        link = das_link(4)
        vals = [conn_prob_das(link, b).value for b in np.geomspace(1.0, 1e6, 25)]
        assert np.all(np.diff(vals) <= 1e-12)
        assert vals[-1] > 0.0

    def test_low_connectivity_matches_simulation(self):
        from covertgeo.montecarlo import TrialConfig, estimate_connectivity

        cfg, lay = NetworkConfig(), make_layout("das", 2, 1.0)
        est = conn_prob_das(DasLink.from_config(cfg, lay), 200.0)
        assert est.value < 0.3
        mc = estimate_connectivity(cfg, lay, 200.0, TrialConfig(trials=20_000, master_seed=5))
        assert mc.z_score(est.value, est.half_width / 3) < 4

    def test_w_linear_in_density(self):
        w1 = das_w_const(das_link(4, lambda_j=0.1)).value
        w2 = das_w_const(das_link(4, lambda_j=0.2)).value
        assert w2 == pytest.approx(2 * w1, rel=1e-12)
        assert das_w_const(das_link(4, lambda_j=0.0)).value == 0.0

    @pytest.mark.parametrize("m", [2, 4, 8])
    def test_w_small_beta_limit(self, m):
        link = das_link(m)
        beta = 1e-3
        w = das_w_const(link).value
        assert (1.0 - conn_prob_das(link, beta).value) / beta ** DELTA == pytest.approx(w, rel=0.05)

    def test_half_width_shrinks(self):
        link = das_link(4)
        small = conn_prob_das(link, 1.0, 4_000).half_width
        large = conn_prob_das(link, 1.0, 256_000).half_width
        assert large < small

    def test_errors(self):
        with pytest.raises(DomainError):
            conn_prob_das(das_link(2), 0.0)
        with pytest.raises(DomainError):
            conn_prob_das(das_link(2), 1.0, samples=10)
        lay = AntennaLayout.das([PolarPoint(0.0, 0.0), PolarPoint(1.0, 0.0)], [0.5, 0.5])
        with pytest.raises(SingularityError):
            DasLink.from_config(NetworkConfig(), lay)

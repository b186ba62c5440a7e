"""Oracle tests: known limits, certificate honesty (tightening the
tolerance moves the value by less than the prior bound), swap symmetry,
and the integrated-correlation growth diagnostics."""

import numpy as np
import pytest

from fracgauss import kernels as K
from fracgauss import oracle as O
from fracgauss.kernels import AlphaFunction, HurstFunction
from fracgauss.oracle import QuadratureCertificate, QuadratureConfig
from fracgauss.specfun import DomainError


TIGHT = QuadratureConfig(rel_tol=1e-11, abs_tol=1e-13)


class TestConfig:
    def test_validation(self):
        with pytest.raises(DomainError):
            QuadratureConfig(rel_tol=0.0)
        with pytest.raises(DomainError):
            QuadratureConfig(truncation_horizon=-1.0)

    def test_certificate_fields(self):
        c = O.oracle_fbm_cov(0.6, 1.0, 0.5)
        assert c.error_bound >= 0 and c.subdivisions_used >= 0
        assert c.tail_bound >= 0


class TestFbmOracle:
    def test_brownian_is_min(self):
        for t, s in [(2.0, 1.0), (0.7, 0.4), (3.0, 3.0)]:
            cert = O.oracle_fbm_cov(0.5, t, s)
            assert abs(cert.value - min(t, s)) <= cert.error_bound + 1e-9

    def test_zero_time(self):
        cert = O.oracle_fbm_cov(0.7, 0.0, 1.0)
        assert cert.value == 0.0 and cert.error_bound == 0.0

    def test_matches_closed_form(self):
        rng = np.random.default_rng(20)
        for _ in range(12):
            H = rng.uniform(0.08, 0.92)
            s, t = np.sort(rng.uniform(0.05, 4.0, 2))
            cert = O.oracle_fbm_cov(H, t, s)
            assert abs(K.fbm_cov(H, t, s) - cert.value) <= cert.error_bound + 1e-9

    def test_swap_symmetry(self):
        a = O.oracle_fbm_cov(0.7, 2.0, 1.0)
        b = O.oracle_fbm_cov(0.7, 1.0, 2.0)
        assert a.value == b.value


class TestRlOracle:
    def test_brownian_case(self):
        cert = O.oracle_rl_cov(0.5, 2.0, 1.0)
        assert abs(cert.value - 1.0) <= cert.error_bound + 1e-9

    def test_matches_closed_form_constant(self):
        cert = O.oracle_rl_cov(0.7, 2.0, 1.0)
        assert abs(K.rl_fbm_cov(0.7, 2.0, 1.0) - cert.value) <= cert.error_bound + 1e-9

    def test_diagonal(self):
        cert = O.oracle_rl_cov(0.35, 1.3, 1.3)
        assert abs(K.rl_fbm_cov(0.35, 1.3, 1.3) - cert.value) <= cert.error_bound + 1e-9

    def test_zero(self):
        assert O.oracle_rl_cov(0.6, 1.0, 0.0).value == 0.0


class TestFouOracle:
    def test_weyl_variance_classical(self):
        cert = O.oracle_fou_cov("weyl", 1.0, 1.0, 2.0, 2.0)
        assert abs(cert.value - 0.5) <= cert.error_bound + 1e-9

    def test_weyl_tail_bound_recorded(self):
        cert = O.oracle_fou_cov("weyl", 0.8, 1.0, 1.5, 1.0)
        assert cert.tail_bound > 0.0
        assert cert.error_bound >= cert.tail_bound

    def test_rl_classical(self):
        cert = O.oracle_fou_cov("rl", 1.0, 1.0, 2.0, 1.0)
        expected = np.exp(-3.0) * (np.exp(2.0) - 1.0) / 2.0
        assert abs(cert.value - expected) <= cert.error_bound + 1e-9

    def test_rl_zero(self):
        assert O.oracle_fou_cov("rl", 0.8, 1.0, 1.0, 0.0).value == 0.0

    def test_bad_kind(self):
        with pytest.raises(DomainError):
            O.oracle_fou_cov("left", 0.8, 1.0, 1.0, 0.5)


class TestFrbmOracle:
    def test_matches_closed_form(self):
        cert = O.oracle_frbm_cov(1.0, 0.2, 1.0, 0.5)
        assert abs(K.frbm_cov(1.0, 0.2, 1.0, 0.5) - cert.value) <= cert.error_bound + 1e-9

    def test_gamma_zero_route(self):
        cert = O.oracle_frbm_cov(0.8, 0.0, 1.0, 0.5)
        assert abs(K.frbm_cov(0.8, 0.0, 1.0, 0.5) - cert.value) <= cert.error_bound + 1e-9

    def test_variance(self):
        cert = O.oracle_frbm_cov(0.9, 0.3, 1.0, 0.0)
        assert abs(K.frbm_cov(0.9, 0.3, 1.0, 0.0) - cert.value) <= cert.error_bound + 1e-9


class TestGcOracle:
    def test_matches_closed_form(self):
        rng = np.random.default_rng(21)
        for _ in range(10):
            a = rng.uniform(0.2, 2.0)
            b = rng.uniform(0.2, 3.0)
            lag = rng.uniform(0.0, 5.0)
            cert = O.oracle_gc_cov(a, b, lag)
            assert abs(K.gc_cov(a, b, lag) - cert.value) <= cert.error_bound + 1e-9


class TestCertificateHonesty:
    """Re-running at rel_tol/10 moves the value by less than the prior bound."""

    def test_bound_covers_refinement(self):
        loose = QuadratureConfig(rel_tol=1e-8, abs_tol=1e-10)
        tight = QuadratureConfig(rel_tol=1e-9, abs_tol=1e-11)
        pairs = [
            (O.oracle_fbm_cov, (0.75, 2.0, 1.0)),
            (O.oracle_rl_cov, (0.3, 1.5, 0.8)),
            (O.oracle_fou_cov, ("weyl", 0.8, 1.0, 1.5, 1.0)),
            (O.oracle_fou_cov, ("rl", 1.2, 0.7, 2.0, 0.9)),
            (O.oracle_frbm_cov, (1.0, 0.2, 1.0, 0.5)),
            (O.oracle_gc_cov, (1.3, 0.8, 2.0)),
        ]
        for fn, args in pairs:
            c1 = fn(*args, cfg=loose)
            c2 = fn(*args, cfg=tight)
            assert abs(c1.value - c2.value) <= c1.error_bound + 1e-12


class TestLrdIntegral:
    def test_gc_lrd_grows_like_sqrt(self):
        grid = [2.0 ** k for k in range(1, 10)]
        partials, growth = O.oracle_lrd_integral(K.GC(1.0, 0.5), grid)
        assert growth == "growing"
        # I(T) ~ T^{1/2}: exponent from the last doubling
        expo = np.log2(partials[-1] / partials[-2])
        assert expo == pytest.approx(0.5, abs=0.12)

    def test_weyl_fou_converges(self):
        grid = [2.0 ** k for k in range(1, 8)]
        partials, growth = O.oracle_lrd_integral(K.WeylFOU(0.8, 1.0), grid)
        assert growth == "bounded"
        assert partials[-1] == pytest.approx(partials[-2], rel=1e-6)

    def test_gc_srd_converges(self):
        grid = [2.0 ** k for k in range(1, 10)]
        partials, growth = O.oracle_lrd_integral(K.GC(2.0, 1.0), grid)
        assert growth == "bounded"

    def test_consistency_with_memory_class(self):
        grid = [2.0 ** k for k in range(1, 9)]
        for spec in (K.GC(1.0, 0.5), K.GC(2.0, 1.0), K.WeylFOU(0.8, 1.0),
                     K.FRBM(1.0, 0.2, 1.0), K.FRBM(1.2, 0.0, 1.0)):
            _, growth = O.oracle_lrd_integral(spec, grid)
            expected = "growing" if K.memory_class(spec).label == "LRD" else "bounded"
            assert growth == expected, spec

    def test_rejects_nonstationary(self):
        with pytest.raises(DomainError):
            O.oracle_lrd_integral(K.FBM(0.7), [1.0, 2.0, 4.0, 8.0])


class TestAgreementReport:
    @pytest.mark.parametrize("family", O.LATTICE_FAMILIES)
    def test_small_lattice_passes(self, family):
        report = O.agreement_report(family, n_points=6, seed=3)
        assert report["all_pass"], [p for p in report["points"] if not p["pass"]]

    def test_report_schema(self):
        report = O.agreement_report("gc", n_points=3, seed=0)
        assert report["schema"] == 1
        assert {"params", "t", "s", "closed", "oracle", "bound", "pass"} <= \
            set(report["points"][0])

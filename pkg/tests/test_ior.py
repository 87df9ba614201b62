"""Refraction index, traversal times and arrival-time differences."""

from __future__ import annotations

import math

import pytest
import scipy.integrate

from reltoa.classical import kappa_c, qc_asymptotic, tau_top
from reltoa.kernels import BarrierSpec, barrier_free_gap
from reltoa.numerics import SeriesDivergenceError
from reltoa.wavepacket import GaussianPacket, momentum_density
from reltoa.ior import (
    Luminality,
    ior_direct,
    ior_momentum,
    ior_series,
    qc_expectation,
    superluminal_classify,
    tau_plus_consistency,
    toa_difference,
    traversal_time,
)


def narrow(k0: float) -> GaussianPacket:
    return GaussianPacket(q0=-20.0, sigma=0.5, k0=k0)


def wide(k0: float, sigma: float = 9.0) -> GaussianPacket:
    return GaussianPacket(q0=-40.0 * sigma, sigma=sigma, k0=k0)


class TestIorDirect:
    def test_reference_narrow_above_barrier(self):
        assert ior_direct(narrow(2.0), 0.2).value == pytest.approx(1.32442, abs=1e-4)

    def test_reference_near_unity(self):
        assert ior_direct(narrow(0.90), 0.3).value == pytest.approx(0.99882, abs=2e-4)

    def test_wide_packet_numerically_zero(self):
        res = ior_direct(wide(0.19), 0.3)
        assert abs(res.value) < 1e-10

    def test_rejects_supercritical(self):
        with pytest.raises(ValueError):
            ior_direct(narrow(2.0), 1.5)


class TestIorSeries:
    def test_reference_values(self):
        assert ior_series(narrow(2.0), 0.5).value == pytest.approx(1.48255, abs=1e-4)
        assert ior_series(narrow(2.0), 0.6).value == pytest.approx(1.52350, abs=1e-4)
        assert ior_series(narrow(3.0), 0.3).value == pytest.approx(1.24812, abs=2e-4)

    def test_wide_packet_diverges(self):
        with pytest.raises(SeriesDivergenceError):
            ior_series(wide(0.19), 0.3)

    def test_reports_terms_used(self):
        res = ior_series(narrow(2.0), 0.2)
        assert res.terms_used is not None and res.terms_used > 3


class TestIorMomentum:
    def test_reference_values(self):
        assert ior_momentum(narrow(2.0), 0.2).value == pytest.approx(1.32442, abs=1e-4)
        assert ior_momentum(narrow(0.15), 0.3).value == pytest.approx(0.18996, abs=1e-4)

    def test_wide_packet_tiny(self):
        res = ior_momentum(wide(0.19), 0.3)
        assert abs(res.value) < 1e-20
        # magnitude scale of the suppressed crossing weight
        assert 1e-31 < res.plus_part < 1e-27

    def test_decomposition_exact(self):
        res = ior_momentum(narrow(0.5), 0.3)
        assert res.plus_part >= 0.0
        assert res.minus_part >= 0.0
        assert res.value == res.plus_part - res.minus_part  # exact identity

    def test_methods_agree(self):
        for k0, v0 in ((2.0, 0.3), (0.25, 0.3)):
            a = ior_direct(narrow(k0), v0).value
            b = ior_series(narrow(k0), v0).value
            c = ior_momentum(narrow(k0), v0).value
            assert abs(a - c) < 1e-7
            assert abs(b - c) < 1e-7

    def test_rejects_zero_height(self):
        with pytest.raises(ValueError):
            ior_momentum(narrow(2.0), 0.0)


class TestQcExpectation:
    def test_wide_packet_reaches_gamma(self):
        packet = GaussianPacket(q0=-300.0, sigma=6.0, k0=2.0)
        assert qc_expectation(packet) == pytest.approx(math.sqrt(5.0), rel=1e-2)

    def test_slow_packet(self):
        packet = GaussianPacket(q0=-600.0, sigma=12.0, k0=0.5)
        assert qc_expectation(packet) == pytest.approx(math.sqrt(1.25), rel=1e-2)
        # no barrier argument exists: barrier independence holds by signature


class TestTraversalTime:
    barrier = BarrierSpec(v0=0.2, a=-21.0, b=-20.0)

    def test_reference_row_times_tc(self):
        packet = GaussianPacket(q0=-40.0, sigma=0.5, k0=2.0)
        tau, tau_plus, tau_minus = traversal_time(packet, self.barrier)
        t_c = self.barrier.length  # c = 1
        assert tau == pytest.approx(1.32442 * t_c, abs=2e-4 * t_c)
        assert tau == pytest.approx(tau_plus - tau_minus, rel=1e-14)

    def test_instantaneous_regime(self):
        barrier = BarrierSpec(v0=0.3, a=-400.0, b=-399.0)
        packet = GaussianPacket(q0=-500.0, sigma=9.0, k0=0.19)
        tau, _, _ = traversal_time(packet, barrier)
        assert abs(tau) < 1e-20 * barrier.length

    def test_plus_part_is_tau_top_average(self):
        # same integral, assembled independently (library route vs QUADPACK)
        barrier = BarrierSpec(v0=0.3, a=-300.0, b=-299.0)
        packet = GaussianPacket(q0=-400.0, sigma=6.0, k0=2.0)
        mine, via_my_engine = tau_plus_consistency(packet, barrier)
        assert mine == pytest.approx(via_my_engine, rel=1e-9)
        kc = kappa_c(barrier.v0)

        def integrand(u: float) -> float:
            k = kc + u * u
            return (
                2.0
                * u
                * momentum_density(packet, k, +1)
                * tau_top(k, barrier.v0, barrier.length)
            )

        oracle, _ = scipy.integrate.quad(integrand, 0.0, 12.0, limit=400,
                                         epsabs=1e-13, epsrel=1e-12)
        assert mine == pytest.approx(oracle, rel=1e-9)


class TestToaDifference:
    def test_vanishing_barrier(self):
        barrier = BarrierSpec(v0=1e-12, a=-30.0, b=-29.0)
        packet = GaussianPacket(q0=-60.0, sigma=0.5, k0=2.0)
        assert abs(toa_difference(packet, barrier)) < 1e-8 * barrier.length

    def test_linear_in_v0(self):
        packet = GaussianPacket(q0=-60.0, sigma=0.5, k0=2.0)
        d6 = toa_difference(packet, BarrierSpec(v0=1e-6, a=-30.0, b=-29.0))
        d5 = toa_difference(packet, BarrierSpec(v0=1e-5, a=-30.0, b=-29.0))
        assert d5 / d6 == pytest.approx(10.0, rel=1e-3)

    def test_wide_packet_asymptotic_assembly(self):
        # all components above the barrier: difference ~ (mu L / p0) gamma
        # minus the tau_top average
        barrier = BarrierSpec(v0=0.3, a=-400.0, b=-399.0)
        packet = GaussianPacket(q0=-500.0, sigma=6.0, k0=2.0)
        delta = toa_difference(packet, barrier)
        gamma = qc_asymptotic(packet.k0)
        _, tau_avg = tau_plus_consistency(packet, barrier)
        ref = barrier.length / packet.k0 * gamma - tau_avg
        assert delta == pytest.approx(ref, rel=1e-2)

    def test_instantaneous_regime_is_free_flight(self):
        # the barrier is crossed in zero time; the free flight is not
        barrier = BarrierSpec(v0=0.3, a=-400.0, b=-399.0)
        packet = GaussianPacket(q0=-500.0, sigma=9.0, k0=0.19)
        delta = toa_difference(packet, barrier)
        q_c = qc_expectation(packet)
        ref = barrier.length / packet.k0 * q_c  # mu L / p0 * Q_c
        assert delta == pytest.approx(ref, rel=1e-6)


class TestSuperluminalClassify:
    def test_deep_tunneling_is_superluminal(self):
        packet = GaussianPacket(q0=-300.0, sigma=6.0, k0=0.5)
        label, margin = superluminal_classify(packet, 0.99)
        assert label is Luminality.SUPERLUMINAL
        assert margin < 0.0

    def test_near_peak_is_subluminal(self):
        kc = kappa_c(0.99)
        packet = GaussianPacket(q0=-300.0, sigma=6.0, k0=kc + 1.0 / 12.0)
        label, margin = superluminal_classify(packet, 0.99)
        assert label is Luminality.SUBLUMINAL
        assert margin > 0.0

    def test_vanishing_barrier_is_subluminal(self):
        packet = GaussianPacket(q0=-300.0, sigma=6.0, k0=2.0)
        label, _ = superluminal_classify(packet, 1e-6)
        assert label is Luminality.SUBLUMINAL

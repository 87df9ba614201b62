"""Classical relativistic arrival-time oracles and asymptotic formulas.

These serve double duty: physics outputs in their own right, and
independent cross-checks for the quantum kernels.  The flight-time
integrand used here carries the launch kinetic energy in its numerator,

    rate(q') = (H - V(q_start)) / (c * sqrt((H - V(q'))^2 - mu^2 c^4)),

with H the conserved total energy.  That convention is what the closed
per-region formulas and the above-barrier crossing time tau_top realize,
and it is what the quantized kernels reproduce in their classical limit.
"""

from __future__ import annotations

import math

from reltoa.kernels import (
    NATURAL_UNITS,
    BarrierSpec,
    PhysicalParams,
    gb_factor,
)
from reltoa.numerics import (
    DEFAULT_SETTINGS,
    QuadratureSettings,
    _adaptive_gk,
    gen_binomial,
    hyp2f1_integral,
    integrate_semiinf_exp,
)

__all__ = [
    "ClassicallyForbiddenError",
    "crtoa_quadrature",
    "classical_toa_closed",
    "tau_top",
    "kappa_c",
    "rc_asymptotic",
    "qc_asymptotic",
    "rc_series_resummation",
]


class ClassicallyForbiddenError(ValueError):
    """The classical path hits a turning point (below-barrier input)."""


def _gamma_p(p: float, params: PhysicalParams) -> float:
    r = p / (params.mu * params.c)
    return math.sqrt(1.0 + r * r)


def crtoa_quadrature(
    q: float,
    p: float,
    barrier: BarrierSpec | None,
    params: PhysicalParams = NATURAL_UNITS,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
) -> float:
    """Arrival time at the origin by numerical quadrature of the flight-time
    integrand over [q, 0], split at the barrier edges.

    The potential is piecewise constant, so each section is integrated
    adaptively on its own; a section with (H - V)^2 <= (mu c^2)^2 raises
    ClassicallyForbiddenError.
    """
    if p == 0.0:
        raise ValueError("crtoa_quadrature requires p != 0")
    rest = params.rest_energy
    e_p = math.hypot(p * params.c, rest)

    def v_at(x: float) -> float:
        if barrier is not None and barrier.a < x < barrier.b:
            return barrier.v0
        return 0.0

    h_total = e_p + v_at(q)
    e_launch = e_p  # kinetic part at the start; H - V(q_start)

    lo, hi = (q, 0.0) if q < 0.0 else (0.0, q)
    cuts = [lo]
    if barrier is not None:
        for edge in (barrier.a, barrier.b):
            if lo < edge < hi:
                cuts.append(edge)
    cuts.append(hi)

    total = 0.0
    for left, right in zip(cuts, cuts[1:]):
        v_here = v_at(0.5 * (left + right))
        kin = h_total - v_here
        if kin * kin <= rest * rest:
            raise ClassicallyForbiddenError(
                f"turning point: (H - V)^2 <= (mu c^2)^2 on [{left}, {right}]"
            )

        def rate(_x: float, kin=kin) -> float:
            return e_launch / (params.c * math.sqrt(kin * kin - rest * rest))

        val, _err, _ = _adaptive_gk(rate, left, right, settings)
        total += val
    # t = -sgn(p) * int_0^q ... = sgn(p) * int_q^0 ...; for q > 0 the
    # orientation flip and the sgn factor combine the same way
    return math.copysign(1.0, p) * (total if q < 0.0 else -total)


def classical_toa_closed(
    region: str,
    q0: float,
    p0: float,
    barrier: BarrierSpec,
    params: PhysicalParams = NATURAL_UNITS,
) -> float:
    """Closed arrival-time expressions for starts in region I, II or III.

        I   (b < q0 < 0):  -mu q0 gamma / p0
        II  (a < q0 < b):  -mu (q0 - b) gamma / p0
                           - (b/c) sqrt(gamma^2 / ((gamma + vt)^2 - 1))
        III (q0 < a)    :  -mu (q0 + L) gamma / p0
                           + (L/c) sqrt(gamma^2 / ((gamma - vt)^2 - 1))

    with gamma = sqrt(1 + p0^2/(mu c)^2) and vt = V_o/(mu c^2).  Region III
    requires gamma - vt > 1 (above-barrier energy); region II is
    unconditional since gamma + vt > 1 always.
    """
    if p0 == 0.0:
        raise ValueError("classical_toa_closed requires p0 != 0")
    gamma = _gamma_p(p0, params)
    vt = barrier.v0 / params.rest_energy
    mu_over_p = params.mu / p0
    if region == "I":
        return -mu_over_p * q0 * gamma
    if region == "II":
        arg = (gamma + vt) ** 2 - 1.0
        return -mu_over_p * (q0 - barrier.b) * gamma - (
            barrier.b / params.c
        ) * math.sqrt(gamma * gamma / arg)
    if region == "III":
        arg = (gamma - vt) ** 2 - 1.0
        if arg <= 0.0:
            raise ClassicallyForbiddenError(
                "below-barrier classical input: (gamma - vt)^2 <= 1"
            )
        length = barrier.length
        return -mu_over_p * (q0 + length) * gamma + (
            length / params.c
        ) * math.sqrt(gamma * gamma / arg)
    raise ValueError("region must be 'I', 'II' or 'III'")


def kappa_c(
    v0: float,
    params: PhysicalParams = NATURAL_UNITS,
) -> float:
    """Critical wavenumber sqrt(2 mu v0 (1 + v0/(2 mu c^2))) / hbar.

    Components with |k| below kappa_c cross instantaneously; above it the
    square root in the momentum-space refraction index is real.  Satisfies
    (hbar kappa_c c)^2 + (mu c^2)^2 = (mu c^2 + v0)^2 exactly.
    """
    if not 0.0 < v0 < params.rest_energy:
        raise ValueError("kappa_c requires 0 < v0 < mu c^2")
    return math.sqrt(
        2.0 * params.mu * v0 * (1.0 + v0 / (2.0 * params.rest_energy))
    ) / params.hbar


def tau_top(
    k: float,
    v0: float,
    length: float,
    params: PhysicalParams = NATURAL_UNITS,
) -> float:
    """Above-barrier crossing time t_c sqrt(E_k^2 / ((E_k - v0)^2 - mu^2 c^4)).

    E_k = sqrt(hbar^2 k^2 c^2 + mu^2 c^4) and t_c = length/c.  Diverges as
    k -> kappa_c from above and tends to t_c as k -> inf.
    """
    rest = params.rest_energy
    e_k = math.hypot(params.hbar * k * params.c, rest)
    denom = (e_k - v0) ** 2 - rest * rest
    if denom <= 0.0:
        raise ClassicallyForbiddenError("tau_top requires k > kappa_c")
    t_c = length / params.c
    return t_c * math.sqrt(e_k * e_k / denom)


def rc_asymptotic(
    p0: float,
    v0: float,
    params: PhysicalParams = NATURAL_UNITS,
) -> float:
    """High-energy refraction index (p0/mu c) sqrt(E_p^2/((E_p-v0)^2 - mu^2 c^4))."""
    rest = params.rest_energy
    e_p = math.hypot(p0 * params.c, rest)
    denom = (e_p - v0) ** 2 - rest * rest
    if denom <= 0.0:
        raise ClassicallyForbiddenError("rc_asymptotic requires above-barrier p0")
    return p0 / (params.mu * params.c) * math.sqrt(e_p * e_p / denom)


def qc_asymptotic(p0: float, params: PhysicalParams = NATURAL_UNITS) -> float:
    """Relativistic correction sqrt(1 + p0^2/(mu c)^2) to the free arrival time."""
    return _gamma_p(p0, params)


def rc_series_resummation(
    p0: float,
    v0: float,
    j_max: int,
    params: PhysicalParams = NATURAL_UNITS,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
) -> float:
    """Partial resummation of the refraction-index double series.

    Each j-term pairs gamma^(k+1) against a Gauss-hypergeometric integral;
    the branch-cut contribution is added on top of the partial sum.  As
    j_max grows the result approaches rc_asymptotic whenever p0 sits well
    above the barrier threshold; below the barrier the terms grow and a
    SeriesDivergenceError propagates up from the inner machinery once the
    partial sums blow past floating range (the series has left its regime).
    """
    if j_max < 0:
        raise ValueError("j_max must be >= 0")
    x = (p0 / (params.mu * params.c)) ** 2
    gamma = math.sqrt(1.0 + x)
    rest = params.rest_energy
    series = 0.0
    for j in range(j_max + 1):
        outer = (
            math.factorial(2 * j)
            / (math.factorial(j) ** 2)
            * (params.mu * v0 / (2.0 * p0 * p0)) ** j
        )
        inner = 0.0
        for k in range(j + 1):
            bracket = gamma ** (k + 1) - x ** (j + 1) * gen_binomial(
                (k + 1) / 2.0, j + 1
            ) * hyp2f1_integral(1.0, 0.5 + j - 0.5 * k, j + 2.0, -x, settings)
            inner += (
                math.comb(j, k) * (-v0 / (2.0 * rest)) ** (j - k) * bracket
            )
        series += outer * inner

    def branch(z: float) -> float:
        return (
            x / (z * z + x)
            * math.sqrt(z * z - 1.0) / z
            * gb_factor(v0, z, params)
        )

    br, _err = integrate_semiinf_exp(branch, 1.0, 0.0, settings)
    return series + (2.0 / math.pi) * br

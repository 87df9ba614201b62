"""Quadrature engines and special functions used by the physics modules.

Everything here is deterministic and pure: identical inputs and settings
produce bit-identical outputs.  The semi-infinite integrators map onto a
finite interval with z = lower + t/(1-t) and refine adaptively with an
embedded Gauss-Kronrod (G7, K15) pair; the oscillatory sine transform sums
panels between successive zeros of sin(k*zeta) with Euler acceleration for
slowly decaying envelopes.
"""

from __future__ import annotations

import heapq
import math
import threading
from dataclasses import dataclass
from typing import Callable

import mpmath as mp

# mpmath's working precision is process-global state; every arbitrary-
# precision block in the package takes this lock so concurrent callers
# cannot corrupt one another's precision context
MP_LOCK = threading.RLock()

__all__ = [
    "QuadratureSettings",
    "DEFAULT_SETTINGS",
    "QuadratureError",
    "SeriesDivergenceError",
    "hyp0f1_one",
    "hyp2f1_integral",
    "csgn",
    "gen_binomial",
    "integrate_semiinf_exp",
    "sine_transform_decaying",
    "integrate_sqrt_endpoint",
]


class QuadratureError(RuntimeError):
    """Requested tolerance could not be met (subdivision/panel cap hit)."""


class SeriesDivergenceError(RuntimeError):
    """A series evaluation left its convergence regime."""


@dataclass(frozen=True)
class QuadratureSettings:
    """Tolerances and resource caps shared by all numerical operations.

    rel_tol / abs_tol are the target relative tolerance and absolute floor;
    max_subdivisions caps adaptive refinement per integral (the oscillatory
    transform may use up to 16x that many half-period panels);
    max_series_terms caps every power-series summation.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_subdivisions: int = 2000
    max_series_terms: int = 600

    def __post_init__(self) -> None:
        if not self.rel_tol > 0.0:
            raise ValueError("rel_tol must be > 0")
        if self.abs_tol < 0.0:
            raise ValueError("abs_tol must be >= 0")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if self.max_series_terms < 1:
            raise ValueError("max_series_terms must be >= 1")


DEFAULT_SETTINGS = QuadratureSettings()


# 15-point Kronrod extension of 7-point Gauss-Legendre (QUADPACK constants).
_XGK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
)
_WGK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
)
_WGK_CENTER = 0.209482141084727828012999174891714
_WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
)
_WG_CENTER = 0.417959183673469387755102040816327


def _gk15(f: Callable[[float], float], a: float, b: float) -> tuple[float, float, float]:
    """One Gauss-Kronrod (7, 15) pass over [a, b].

    Returns (kronrod_value, error_estimate, max_abs_integrand).
    """
    center = 0.5 * (a + b)
    half = 0.5 * (b - a)
    fc = f(center)
    res_k = _WGK_CENTER * fc
    res_g = _WG_CENTER * fc
    fmax = abs(fc)
    for i in range(7):
        dx = half * _XGK[i]
        f1 = f(center - dx)
        f2 = f(center + dx)
        res_k += _WGK[i] * (f1 + f2)
        if i % 2 == 1:
            res_g += _WG[i // 2] * (f1 + f2)
        m = max(abs(f1), abs(f2))
        if m > fmax:
            fmax = m
    return res_k * half, abs(res_k - res_g) * abs(half), fmax


def _adaptive_gk(
    f: Callable[[float], float],
    a: float,
    b: float,
    settings: QuadratureSettings,
    seeds: tuple[float, ...] = (),
) -> tuple[float, float, float]:
    """Globally adaptive bisection on [a, b] with the embedded G7/K15 pair.

    `seeds` lists interior breakpoints that receive their own initial
    segments; callers use them to mark narrow features (sharp peaks) the
    15-point opening pass would otherwise step over.  Returns
    (value, error_estimate, max_abs_integrand); raises QuadratureError when
    max_subdivisions segments cannot reach max(abs_tol, rel_tol * |value|).
    """
    points = [a, b]
    for s_pt in seeds:
        if a < s_pt < b:
            points.append(s_pt)
    points = sorted(set(points))
    heap = []
    total_val = 0.0
    total_err = 0.0
    fmax = 0.0
    counter = 0
    # heap entries: (-err, insertion_id, a, b, val, err); id breaks ties
    for sa, sb in zip(points, points[1:]):
        val, err, fm = _gk15(f, sa, sb)
        heap.append((-err, counter, sa, sb, val, err))
        counter += 1
        total_val += val
        total_err += err
        fmax = max(fmax, fm)
    heapq.heapify(heap)
    width_floor = 0.5 ** 45 * max(abs(a), abs(b), 1.0)
    while total_err > max(settings.abs_tol, settings.rel_tol * abs(total_val)):
        if counter >= settings.max_subdivisions:
            raise QuadratureError(
                f"tolerance not met within {settings.max_subdivisions} subdivisions "
                f"(err={total_err:.3e}, value={total_val:.6e})"
            )
        neg_err, _, sa, sb, sval, serr = heapq.heappop(heap)
        if -neg_err <= 0.0 or (sb - sa) < width_floor:
            # worst segment is unimprovable; accept the current estimate
            heapq.heappush(heap, (0.0, counter, sa, sb, sval, serr))
            break
        mid = 0.5 * (sa + sb)
        v1, e1, m1 = _gk15(f, sa, mid)
        v2, e2, m2 = _gk15(f, mid, sb)
        fmax = max(fmax, m1, m2)
        total_val += (v1 + v2) - sval
        total_err += (e1 + e2) - serr
        heapq.heappush(heap, (-e1, counter, sa, mid, v1, e1))
        counter += 1
        heapq.heappush(heap, (-e2, counter, mid, sb, v2, e2))
        counter += 1
    return total_val, total_err, fmax


def hyp0f1_one(x: float, settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    """Confluent limit function 0F1(;1;x) = sum_m x^m / (m!)^2.

    Converges for every finite x; for x < 0 it oscillates like a Bessel
    function of the first kind, which costs cancellation.  When the largest
    partial term exceeds what double precision can cancel, the sum is
    repeated in arbitrary precision so the contract relative error
    <= rel_tol holds on |x| <= 100 and beyond.
    """
    if not math.isfinite(x):
        raise ValueError("hyp0f1_one requires finite x")
    value, max_term, converged = _hyp0f1_float(x, settings)
    if converged and max_term <= 1e4 * max(abs(value), 1e-30):
        return value
    # cancellation ate the float result: redo with enough guard digits
    digits = int(math.log10(max_term + 1.0)) + 25
    with MP_LOCK, mp.workdps(max(digits, 30)):
        term = mp.mpf(1)
        total = mp.mpf(1)
        xm = mp.mpf(x)
        small = 0
        for m in range(1, settings.max_series_terms + 1):
            term = term * xm / (m * m)
            total += term
            if abs(term) <= settings.rel_tol * abs(total):
                small += 1
                if small >= 3:
                    return float(total)
            else:
                small = 0
    raise SeriesDivergenceError("hyp0f1_one did not converge within max_series_terms")


def _hyp0f1_float(x: float, settings: QuadratureSettings) -> tuple[float, float, bool]:
    # Kahan-compensated partial summation; reports the peak term magnitude
    # so the caller can judge cancellation.
    total = 1.0
    comp = 0.0
    term = 1.0
    max_term = 1.0
    small = 0
    for m in range(1, settings.max_series_terms + 1):
        term = term * x / (m * m)
        t = abs(term)
        if t > max_term:
            max_term = t
        y = term - comp
        s = total + y
        comp = (s - total) - y
        total = s
        if t <= settings.rel_tol * abs(total) + settings.abs_tol:
            small += 1
            if small >= 3:
                return total, max_term, True
        else:
            small = 0
    return total, max_term, False


def hyp2f1_integral(
    a: float,
    b: float,
    c: float,
    z: float,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
) -> float:
    """Gauss hypergeometric 2F1(a,b;c;z) by its real-line integral form.

    Uses Gamma(c)/(Gamma(b) Gamma(c-b)) * int_0^inf t^(c-b-1) (1+t)^(a-c)
    (t + 1 - z)^(-a) dt, valid for c > b > 0; only z <= 0 is accepted, which
    is the regime the resummation of the effective refraction index needs.
    """
    if not (c > b > 0.0):
        raise ValueError("hyp2f1_integral requires c > b > 0")
    if z > 0.0:
        raise ValueError("hyp2f1_integral requires z <= 0")
    if z == 0.0:
        return 1.0
    prefac = math.gamma(c) / (math.gamma(b) * math.gamma(c - b))
    one_minus_z = 1.0 - z

    def core(t: float) -> float:
        return t ** (c - b - 1.0) * (1.0 + t) ** (a - c) * (t + one_minus_z) ** (-a)

    # split at t = 1; both endpoint powers (t^(c-b-1) at 0, the s^(b-1)
    # tail after t = 1/s) are flattened by power substitutions so the
    # mapped integrands vanish or stay bounded at the interval ends
    kap0 = 1.0 if c - b >= 1.0 else 2.0 / (c - b)

    def piece_low(w: float) -> float:
        t = w**kap0
        if t <= 0.0:
            return 0.0
        return core(t) * kap0 * w ** (kap0 - 1.0)

    kap1 = 1.0 if b >= 1.0 else 2.0 / b

    def piece_high(w: float) -> float:
        s = w**kap1
        if s <= 0.0:
            return 0.0
        return core(1.0 / s) / (s * s) * kap1 * w ** (kap1 - 1.0)

    v_low, _e0, _ = _adaptive_gk(piece_low, 0.0, 1.0, settings)
    v_high, _e1, _ = _adaptive_gk(piece_high, 0.0, 1.0, settings)
    return prefac * (v_low + v_high)


def csgn(z: complex) -> int:
    """Complex signum: sign of Re z, falling back to sign of Im z on the axis."""
    if z == 0:
        raise ValueError("csgn undefined at 0")
    if z.real > 0.0:
        return 1
    if z.real < 0.0:
        return -1
    return 1 if z.imag > 0.0 else -1


def gen_binomial(alpha: float, n: int) -> float:
    """Generalized binomial coefficient C(alpha, n) = prod_{i<n}(alpha-i)/n!."""
    if n < 0:
        raise ValueError("gen_binomial requires n >= 0")
    out = 1.0
    for i in range(n):
        out *= (alpha - i) / (i + 1)
    return out


def integrate_semiinf_exp(
    f: Callable[[float], float],
    lower: float,
    decay: float,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
    seeds: tuple[float, ...] = (),
) -> tuple[float, float]:
    """Integral of f(z) * exp(-decay * z) over [lower, inf).

    The substitution z = lower + t/(1-t) maps the half line onto [0, 1);
    the exponential envelope keeps the mapped integrand bounded.  decay = 0
    is accepted for integrands that decay at least like z^-2 on their own
    (the residue-identity check needs this), in which case the same map
    handles the algebraic tail directly.  `seeds` marks z-locations of
    narrow features so the opening adaptive pass cannot miss them.
    """
    if decay < 0.0:
        raise ValueError("decay must be >= 0")
    log_tiny = math.log(2.2e-308)

    def mapped(t: float) -> float:
        onemt = 1.0 - t
        z = lower + t / onemt
        expo = -decay * z
        if expo < log_tiny:
            return 0.0
        return f(z) * math.exp(expo) / (onemt * onemt)

    t_seeds = tuple(
        (z - lower) / (1.0 + (z - lower)) for z in seeds if z > lower
    )
    val, err, _ = _adaptive_gk(mapped, 0.0, 1.0, settings, t_seeds)
    return val, err


def sine_transform_decaying(
    f: Callable[[float], float],
    k: float,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
) -> tuple[float, float]:
    """Integral of sin(k*zeta) * f(zeta) over [0, inf) for decaying f.

    Integrates panel by panel between the zeros of sin(k*zeta), stopping
    once the envelope stays below abs_tol.  f may behave like C/zeta at the
    origin (the sine factor regularizes the product) but must decay overall;
    panels whose magnitudes stop shrinking raise QuadratureError.  When the
    panel series decays slowly, Euler averaging of the alternating partial
    sums supplies the tail.
    """
    if k <= 0.0:
        raise ValueError("sine_transform_decaying requires k > 0")
    period = math.pi / k
    max_panels = max(64, 16 * settings.max_subdivisions)
    panel_tol = 0.1 * settings.abs_tol

    def integrand(z: float) -> float:
        s = math.sin(k * z)
        if s == 0.0:
            return 0.0
        return s * f(z)

    total = 0.0
    err = 0.0
    panels: list[float] = []
    partials: list[float] = []
    small = 0
    peak_mag = 0.0
    peak_at = 0
    for n in range(max_panels):
        a = n * period
        b = (n + 1) * period
        v, e, fmax = _adaptive_gk(integrand, a, b, settings)
        total += v
        err += e
        panels.append(v)
        partials.append(total)
        if abs(v) > peak_mag:
            peak_mag = abs(v)
            peak_at = n
        if fmax * period < panel_tol and abs(v) < panel_tol:
            small += 1
            if small >= 3:
                return total, err
        else:
            small = 0
        if n >= 64 and n % 16 == 0:
            window = [abs(p) for p in panels[-48:]]
            w_hi, w_lo = max(window), min(window)
            # flat magnitudes long after their peak mean the envelope is not
            # decaying (legitimate humps keep their maximum recent)
            if (
                n - peak_at >= 96
                and w_lo > 1e3 * panel_tol
                and w_hi < 1.1 * w_lo
            ):
                raise QuadratureError(
                    "sine transform: panel magnitudes are not shrinking "
                    f"(|panel|~{w_hi:.3e} after {n + 1} panels)"
                )
            # alternating, slowly decaying tails are summed by Euler
            # acceleration once enough panels establish the pattern
            if n >= 512 and w_hi < max(abs(p) for p in panels[-96:-48]):
                if _alternating(panels):
                    acc = _euler_accelerate(partials)
                    tail = abs(acc - total) + 1e-3 * abs(panels[-1])
                    if tail < 1e3 * max(settings.abs_tol, settings.rel_tol * abs(acc)):
                        return acc, err + tail
    if _alternating(panels):
        acc = _euler_accelerate(partials)
        tail = abs(acc - total) + abs(panels[-1])
        if tail < max(settings.abs_tol, settings.rel_tol * abs(acc)) * 1e3:
            return acc, err + tail
    raise QuadratureError(f"sine transform did not converge within {max_panels} panels")


def _alternating(panels: list[float]) -> bool:
    tail = [p for p in panels[-10:] if p != 0.0]
    if len(tail) < 4:
        return False
    return all(tail[i] * tail[i + 1] < 0.0 for i in range(len(tail) - 1))


def _euler_accelerate(partials: list[float]) -> float:
    # repeated pairwise averaging of the partial-sum sequence; for an
    # alternating tail each sweep roughly squares the convergence rate
    seq = list(partials[-12:])
    while len(seq) > 1:
        seq = [0.5 * (seq[i] + seq[i + 1]) for i in range(len(seq) - 1)]
    return seq[0]


def integrate_sqrt_endpoint(
    f: Callable[[float], float],
    a: float,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
    seeds: tuple[float, ...] = (),
) -> tuple[float, float]:
    """Integral over [a, inf) of an f with a 1/sqrt(k-a) endpoint singularity.

    The substitution k = a + u^2 removes the singularity exactly; the
    remaining semi-infinite u-integral rides on f's own decay (a Gaussian
    weight in every use here).  `seeds` marks k-locations of narrow
    features away from the endpoint (a tight momentum density, say), which
    the substitution squeezes into regions an unseeded opening pass can
    miss.  A stronger-than-inverse-square-root blowup is detected by
    probing the substituted integrand toward u = 0.
    """

    def g(u: float) -> float:
        return 2.0 * u * f(a + u * u)

    probe_big = abs(g(1e-3))
    probe_small = abs(g(1e-7))
    if probe_small > 100.0 * probe_big + 1.0:
        raise QuadratureError(
            "integrand singularity at the lower endpoint is stronger than 1/sqrt"
        )
    u_seeds = tuple(math.sqrt(k - a) for k in seeds if k > a)
    return integrate_semiinf_exp(g, 0.0, 0.0, settings, u_seeds)

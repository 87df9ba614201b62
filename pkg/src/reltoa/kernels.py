"""Time-kernel factors for the free and square-barrier arrival-time operators.

The free factor T_F and barrier factors F_B, G_B, T_B are assembled from a
branch-cut quadrature plus the residue power series.  The residue series is
reorganized as a single power series in zeta^2,

    F_B(v, zeta) = sum_p D_p(v) * zeta^(2p) / (2p)!,

whose coefficients D_p collect the triple sum over (l, m, n) with p = l - n
held fixed.  The coefficients depend only on (v, mu, c, hbar), so they are
computed once per barrier strength in arbitrary precision and cached; the
zeta series itself cancels like a Bessel function (partial terms reach
exp(~kappa*zeta) before collapsing to O(1)), so the evaluation escalates to
arbitrary precision whenever double precision cannot absorb it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp

from reltoa.numerics import (
    DEFAULT_SETTINGS,
    MP_LOCK,
    QuadratureSettings,
    SeriesDivergenceError,
    gen_binomial,
    integrate_semiinf_exp,
)

__all__ = [
    "PhysicalParams",
    "NATURAL_UNITS",
    "BarrierSpec",
    "KernelEval",
    "free_factor",
    "gb_factor",
    "fb_series",
    "barrier_factor",
    "barrier_free_gap",
    "region_kernel",
    "momentum_kernel_f",
    "momentum_kernel_g",
]


@dataclass(frozen=True)
class PhysicalParams:
    """Rest mass, light speed and reduced action defining the unit system."""

    mu: float = 1.0
    c: float = 1.0
    hbar: float = 1.0

    def __post_init__(self) -> None:
        if not (self.mu > 0.0 and self.c > 0.0 and self.hbar > 0.0):
            raise ValueError("mu, c and hbar must all be positive")

    @property
    def rest_energy(self) -> float:
        return self.mu * self.c * self.c


NATURAL_UNITS = PhysicalParams()


@dataclass(frozen=True)
class BarrierSpec:
    """Square barrier of height v0 on (a, b) with a < b < 0.

    The length is b - a > 0.  (The source convention "L = a - b" together
    with a < b would make the length negative; every formula downstream
    treats L as positive, so |b - a| is what this class exposes.)
    """

    v0: float
    a: float
    b: float

    def __post_init__(self) -> None:
        if not self.a < self.b < 0.0:
            raise ValueError("barrier edges must satisfy a < b < 0")
        if not self.v0 > 0.0:
            raise ValueError("barrier height v0 must be positive")

    @property
    def length(self) -> float:
        return self.b - self.a

    def is_subcritical(self, params: PhysicalParams) -> bool:
        """True when v0 sits below the rest-mass energy (the validity regime)."""
        return self.v0 < params.rest_energy

    def require_subcritical(self, params: PhysicalParams) -> None:
        if not self.is_subcritical(params):
            raise ValueError(
                f"barrier height {self.v0} is not below the rest-mass energy "
                f"{params.rest_energy}; outside the validity regime"
            )


@dataclass(frozen=True)
class KernelEval:
    """A kernel-factor sample: relative coordinate, value, error estimate."""

    zeta: float
    value: float
    err: float


def free_factor(
    zeta: float,
    params: PhysicalParams = NATURAL_UNITS,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
) -> KernelEval:
    """Free time-kernel factor T_F(zeta) = 1 + (2/pi) * branch-cut integral.

    Strictly decreasing in zeta, -> 1 as zeta -> inf, and diverging like
    2*hbar/(pi*mu*c*zeta) as zeta -> 0+.
    """
    if zeta <= 0.0:
        raise ValueError("free_factor requires zeta > 0")
    decay = params.mu * params.c * zeta / params.hbar
    val, err = integrate_semiinf_exp(_branch_envelope, 1.0, decay, settings)
    return KernelEval(zeta, 1.0 + (2.0 / math.pi) * val, (2.0 / math.pi) * err)


def _branch_envelope(z: float) -> float:
    return math.sqrt(z * z - 1.0) / z if z > 1.0 else 0.0


def gb_factor(
    v0: float,
    z: float,
    params: PhysicalParams = NATURAL_UNITS,
) -> float:
    """Branch-cut factor G_B(v0, z): the half-sum with its i -> -i partner.

    Equals Re[1 - (v0/mu c^2)^2/z^2 + 2i sqrt(z^2-1) (v0/mu c^2)/z^2]^(-1/2);
    real, finite, and even in v0 for |v0| below the rest-mass energy.
    """
    if z < 1.0:
        raise ValueError("gb_factor requires z >= 1")
    vt = v0 / params.rest_energy
    z2 = z * z
    w = complex(1.0 - vt * vt / z2, 2.0 * vt * math.sqrt(z2 - 1.0) / z2)
    return (w ** -0.5).real


# --- residue-series coefficients -------------------------------------------

_FB_CACHE: dict[tuple[float, float, float, float], "_FbCoeffs"] = {}


@dataclass
class _FbCoeffs:
    dps: int
    coeffs: list  # mpf values of D_p, valid at self.dps
    log10: list[float]  # log10 |D_p| (for fast magnitude scans); -inf for 0
    errs: list[float]  # truncation floor per coefficient (0 for clean exits)


def _fb_coeffs(
    v: float,
    params: PhysicalParams,
    n_needed: int,
    dps_needed: int,
    settings: QuadratureSettings,
) -> _FbCoeffs:
    key = (v, params.mu, params.c, params.hbar)
    with MP_LOCK:
        entry = _FB_CACHE.get(key)
        if entry is not None and entry.dps >= dps_needed and len(entry.coeffs) >= n_needed:
            return entry
        # rebuilding is a from-scratch job, so overshoot both axes and make
        # successive rebuilds geometric rather than per-request
        dps = max(dps_needed + 15, int(1.25 * dps_needed), entry.dps if entry else 0, 30)
        count = max(n_needed + 64, len(entry.coeffs) if entry else 0)
        entry = _build_fb_coeffs(v, params, count, dps, settings)
        _FB_CACHE[key] = entry
        return entry


def _build_fb_coeffs(
    v: float,
    params: PhysicalParams,
    count: int,
    dps: int,
    settings: QuadratureSettings,
) -> _FbCoeffs:
    with MP_LOCK, mp.workdps(dps):
        a_fac = mp.mpf(params.mu) * mp.mpf(v) / (2 * mp.mpf(params.hbar) ** 2)
        b_fac = mp.mpf(v) / (2 * mp.mpf(params.mu) * mp.mpf(params.c) ** 2)
        c_fac = -(mp.mpf(params.hbar) ** 2) / (mp.mpf(params.mu) * mp.mpf(params.c)) ** 2
        eps = mp.mpf(10) ** (-(dps - 8))
        b_pow = [mp.mpf(1)]
        gb_rows: dict[int, list] = {}

        def gbin(m: int, n: int):
            # generalized binomial C((m+1)/2, n), grown by recurrence
            row = gb_rows.get(m)
            if row is None:
                row = [mp.mpf(1)]
                gb_rows[m] = row
            alpha = mp.mpf(m + 1) / 2
            while len(row) <= n:
                k = len(row)
                row.append(row[-1] * (alpha - (k - 1)) / k)
            return row[n]

        coeffs = []
        errs = []
        for p in range(count):
            acc = mp.mpf(0)
            running = a_fac**p  # A^l * C^(l-p) at l = p
            small = 0
            l = p
            central = mp.mpf(math.comb(2 * p, p))
            # the l-sum humps (the peak drifts out like ~p/3), decays, and
            # for strong barriers eventually regrows: it is asymptotic in
            # that regime, so we keep the optimal-truncation state (the
            # deepest post-peak minimum) and its floor as the error
            peak_mag = mp.mpf(0)
            best_mag = None
            best_acc = None
            best_idx = p
            trunc_err = 0.0
            while True:
                while len(b_pow) <= l:
                    b_pow.append(b_pow[-1] * b_fac)
                n_idx = l - p
                # inner sum over m with Pascal-recurrence binomials; odd m
                # gives an integer upper binomial argument (m+1)/2 that
                # truncates, so those terms vanish once n exceeds it
                s = mp.mpf(0)
                binom_lm = mp.mpf(1)
                for m_idx in range(l + 1):
                    if m_idx > 0:
                        binom_lm = binom_lm * (l - m_idx + 1) / m_idx
                    if m_idx % 2 == 1 and (m_idx + 1) // 2 < n_idx:
                        continue
                    s += binom_lm * b_pow[l - m_idx] * gbin(m_idx, n_idx)
                term = central * running * s
                acc += term
                mag = abs(term)
                if mag > peak_mag:
                    peak_mag = mag
                    best_mag = None
                    best_acc = None
                    best_idx = l
                elif best_mag is None or mag < best_mag:
                    best_mag = mag
                    best_acc = acc
                    best_idx = l
                elif l - best_idx >= 20 and mag > 1e4 * best_mag:
                    # risen far above the post-peak floor: the sum is
                    # asymptotic here, so truncate at the floor
                    floor = float(best_mag)
                    if floor > 1e-9 * (1 + abs(float(best_acc))):
                        raise SeriesDivergenceError(
                            f"residue-series coefficient p={p} floors at "
                            f"{floor:.1e} for v={v}: barrier strength too "
                            "close to the rest-mass energy"
                        )
                    acc = best_acc
                    trunc_err = floor
                    break
                if mag <= eps * (1 + abs(acc)):
                    small += 1
                    if small >= 3:
                        break
                else:
                    small = 0
                if l - p >= 4 * settings.max_series_terms:
                    raise SeriesDivergenceError(
                        f"residue-series coefficient p={p} did not converge for v={v}"
                    )
                l += 1
                central = central * 2 * (2 * l - 1) / l  # comb(2l, l) update
                running *= a_fac * c_fac
            coeffs.append(acc)
            errs.append(trunc_err)
        logs = [float(mp.log10(abs(cf))) if cf != 0 else -math.inf for cf in coeffs]
    return _FbCoeffs(dps=dps, coeffs=coeffs, log10=logs, errs=errs)


def _fb_eval(
    v: float,
    zeta: float,
    params: PhysicalParams,
    settings: QuadratureSettings,
    drop_unity: bool = False,
) -> tuple[float, int, float]:
    """Evaluate the residue series at zeta; with drop_unity, return F_B - 1.

    Returns (value, terms_used, rounding_error_estimate).  Scans term
    magnitudes in log space first, then sums in float or, when the peak
    term towers over the result by more than ~12 digits, in arbitrary
    precision with enough guard digits.
    """
    z2 = zeta * zeta
    log_z2 = math.log10(z2) if z2 > 0.0 else -math.inf
    floor_log = math.log10(settings.abs_tol) - 6.0

    entry = _fb_coeffs(v, params, 48, 30, settings)
    max_log = -math.inf
    p = 0
    small = 0
    while True:
        if p >= len(entry.coeffs):
            if p >= settings.max_series_terms:
                raise SeriesDivergenceError(
                    f"residue series needs more than {settings.max_series_terms} terms"
                )
            entry = _fb_coeffs(v, params, len(entry.coeffs) + 48, entry.dps, settings)
        log_term = entry.log10[p] + p * log_z2 - _LGAMMA10(2 * p + 1)
        if log_term > max_log:
            max_log = log_term
        if log_term < floor_log and (p > 0 and p * log_z2 < _LGAMMA10(2 * p + 1)):
            small += 1
            if small >= 3:
                break
        else:
            small = 0
        p += 1
        if p > settings.max_series_terms:
            raise SeriesDivergenceError(
                f"residue series did not converge within {settings.max_series_terms} terms"
            )
    p_stop = p + 1

    # float pass first; escalate when cancellation eats more than ~6 digits
    total = 0.0
    comp = 0.0
    ratio = 1.0
    max_term = 0.0
    trunc = 0.0
    used = 0
    small = 0
    floats = [float(cf) for cf in entry.coeffs[:p_stop]]
    for q in range(p_stop):
        d_q = floats[q]
        if drop_unity and q == 0:
            d_q -= 1.0
        term = d_q * ratio
        if entry.errs[q]:
            trunc += entry.errs[q] * abs(ratio)
        if abs(term) > max_term:
            max_term = abs(term)
        y = term - comp
        s = total + y
        comp = (s - total) - y
        total = s
        used = q + 1
        if abs(term) <= settings.abs_tol * (1 + abs(total)):
            small += 1
            if small >= 3:
                break
        else:
            small = 0
        ratio = ratio * z2 / ((2 * q + 1) * (2 * q + 2))
    if math.isfinite(total) and max_term <= 1e6 * max(abs(total), 1e-300):
        err = max_term * 1e-15 * math.sqrt(used) + trunc
        return total, used, err

    dps = int(max(max_log, 1.0)) + 25
    entry = _fb_coeffs(v, params, p_stop, dps, settings)
    with MP_LOCK, mp.workdps(dps):
        total_mp = mp.mpf(0)
        ratio_mp = mp.mpf(1)  # zeta^(2p) / (2p)!
        z2_mp = mp.mpf(zeta) ** 2
        used = 0
        small = 0
        trunc = 0.0
        for q in range(p_stop):
            d_q = entry.coeffs[q]
            if drop_unity and q == 0:
                d_q = d_q - 1
            term = d_q * ratio_mp
            if entry.errs[q]:
                trunc += entry.errs[q] * float(ratio_mp)
            total_mp += term
            used = q + 1
            if abs(term) <= settings.abs_tol * (1 + abs(total_mp)):
                small += 1
                if small >= 3:
                    break
            else:
                small = 0
            ratio_mp = ratio_mp * z2_mp / ((2 * q + 1) * (2 * q + 2))
        value = float(total_mp)
    err = 10.0 ** (max_log - dps + 2) + trunc
    return value, used, err


def _LGAMMA10(n: int) -> float:
    return math.lgamma(n) / math.log(10.0)


def fb_series(
    v0: float,
    zeta: float,
    params: PhysicalParams = NATURAL_UNITS,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
) -> tuple[float, int]:
    """Residue factor F_B(v0, zeta) as its power series, with signed v0.

    The physics callers pass v0 = -V_o for a barrier of height V_o (the
    series is stated for T_B(-V_o, zeta)); passing +V_o flips both sign
    factors and yields the F_B entering T_B(+V_o, zeta).  Returns
    (value, terms_used) where terms_used counts zeta^(2p) terms.
    """
    if zeta < 0.0:
        raise ValueError("fb_series requires zeta >= 0")
    value, used, _err = _fb_eval(v0, zeta, params, settings)
    return value, used


def _branch_integral(
    v0: float,
    zeta: float,
    params: PhysicalParams,
    settings: QuadratureSettings,
) -> tuple[float, float]:
    # (2/pi) * int_1^inf exp(-mu c |zeta| z / hbar) sqrt(z^2-1)/z G_B(v0, z) dz
    decay = params.mu * params.c * abs(zeta) / params.hbar

    def integrand(z: float) -> float:
        return _branch_envelope(z) * gb_factor(v0, z, params)

    val, err = integrate_semiinf_exp(integrand, 1.0, decay, settings)
    return (2.0 / math.pi) * val, (2.0 / math.pi) * err


def barrier_factor(
    v0: float,
    zeta: float,
    params: PhysicalParams = NATURAL_UNITS,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
) -> KernelEval:
    """Barrier time-kernel factor T_B(v0, zeta) = F_B + branch-cut term.

    v0 is signed exactly as in fb_series; T_B(0, zeta) reduces to the free
    factor.
    """
    if zeta <= 0.0:
        raise ValueError("barrier_factor requires zeta > 0")
    fb_val, _used, fb_err = _fb_eval(v0, zeta, params, settings)
    br_val, br_err = _branch_integral(v0, zeta, params, settings)
    return KernelEval(zeta, fb_val + br_val, fb_err + br_err)


def barrier_free_gap(
    v0: float,
    zeta: float,
    params: PhysicalParams = NATURAL_UNITS,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
) -> float:
    """Difference T_F(zeta) - T_B(-v0, zeta) without forming either side.

    Both the series part (1 - F_B) and the branch part (quadrature of
    1 - G_B) are assembled from small differences, so the result stays
    accurate down to O(v0) and vanishes identically at v0 = 0.  This is
    what the arrival-time difference integrates against.
    """
    if zeta <= 0.0:
        raise ValueError("barrier_free_gap requires zeta > 0")
    series_part, _used, _err = _fb_eval(-v0, zeta, params, settings, drop_unity=True)
    decay = params.mu * params.c * zeta / params.hbar

    def integrand(z: float) -> float:
        return _branch_envelope(z) * (1.0 - gb_factor(v0, z, params))

    br_val, _br_err = integrate_semiinf_exp(integrand, 1.0, decay, settings)
    return -series_part + (2.0 / math.pi) * br_val


_REGIONS = ("I", "II", "III")


def region_kernel(
    region: str,
    eta: float,
    zeta: float,
    barrier: BarrierSpec,
    params: PhysicalParams = NATURAL_UNITS,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
) -> KernelEval:
    """Region kernels of the barrier arrival-time operator.

        I   : (eta/2) T_F(zeta)
        II  : ((eta+b)/2) T_F(zeta) - (b/2) T_B(+V_o, zeta)
        III : ((eta+L)/2) T_F(zeta) - (L/2) T_B(-V_o, zeta)

    Region I is the barrier-free strip b < eta < 0, II the barrier interior,
    III the incident side eta < a.  The tag is the caller's duty and is not
    validated against eta.
    """
    if region not in _REGIONS:
        raise ValueError(f"region must be one of {_REGIONS}")
    if zeta <= 0.0:
        raise ValueError("region_kernel requires zeta > 0")
    tf = free_factor(zeta, params, settings)
    if region == "I":
        return KernelEval(zeta, 0.5 * eta * tf.value, 0.5 * abs(eta) * tf.err)
    if region == "II":
        tb = barrier_factor(barrier.v0, zeta, params, settings)
        val = 0.5 * (eta + barrier.b) * tf.value - 0.5 * barrier.b * tb.value
        err = 0.5 * abs(eta + barrier.b) * tf.err + 0.5 * abs(barrier.b) * tb.err
        return KernelEval(zeta, val, err)
    length = barrier.length
    tb = barrier_factor(-barrier.v0, zeta, params, settings)
    val = 0.5 * (eta + length) * tf.value - 0.5 * length * tb.value
    err = 0.5 * abs(eta + length) * tf.err + 0.5 * length * tb.err
    return KernelEval(zeta, val, err)


def momentum_kernel_f(
    j: int,
    k: int,
    zeta: float,
    params: PhysicalParams = NATURAL_UNITS,
) -> float:
    """Residue building block f_{j,k}(zeta) of the momentum kernel.

    The pole contribution at zero momentum reduces to a finite sum: the
    z^0 coefficient of (1 + z^2/(mu c)^2)^((k+1)/2) (1 - i hbar y/(zeta z))^(2j)
    pairs even powers, and each y-moment integrates to (2a)!:

        f_{j,k} = (-1)^j zeta^(2j) / (hbar^(2j) (2j)!)
                  * sum_a C((k+1)/2, a) C(2j, 2a) (2a)! (-1)^a (hbar/(mu c zeta))^(2a)

    Exact up to floating-point rounding.
    """
    if j < 0 or k < 0:
        raise ValueError("momentum_kernel_f requires j >= 0 and k >= 0")
    if j == 0:
        return 1.0
    if zeta == 0.0:
        raise ValueError("momentum_kernel_f requires zeta != 0 when j > 0")
    scale = params.hbar / (params.mu * params.c * zeta)
    acc = 0.0
    for a in range(j + 1):
        acc += (
            gen_binomial((k + 1) / 2.0, a)
            * math.comb(2 * j, 2 * a)
            * math.factorial(2 * a)
            * (-1.0) ** a
            * scale ** (2 * a)
        )
    pref = (-1.0) ** j * zeta ** (2 * j) / (params.hbar ** (2 * j) * math.factorial(2 * j))
    return pref * acc


def momentum_kernel_g(
    j: int,
    k: int,
    zeta: float,
    params: PhysicalParams = NATURAL_UNITS,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
) -> float:
    """Branch-cut building block g_{j,k}(zeta) of the momentum kernel.

    Vanishes for odd k; for even k it is the damped half-line integral of
    (y^2-1)^((k+1)/2) / y^(2j+1) times (-1)^j i^k (mu c)^(-2j) (2/pi).
    """
    if j < 0 or k < 0:
        raise ValueError("momentum_kernel_g requires j >= 0 and k >= 0")
    if zeta <= 0.0:
        raise ValueError("momentum_kernel_g requires zeta > 0")
    if k % 2 == 1:
        return 0.0
    decay = params.mu * params.c * zeta / params.hbar
    half_k = (k + 1) / 2.0

    def integrand(y: float) -> float:
        if y <= 1.0:
            return 0.0
        return (y * y - 1.0) ** half_k / y ** (2 * j + 1)

    val, _err = integrate_semiinf_exp(integrand, 1.0, decay, settings)
    sign = (-1.0) ** j * (-1.0) ** (k // 2)
    return sign * (2.0 / math.pi) * val / (params.mu * params.c) ** (2 * j)

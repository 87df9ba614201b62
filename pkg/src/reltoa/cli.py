"""Command-line front end: table reproduction, scans, dumps and check suites.

Subcommands: table1, table2, scan, density, kernel, limits, point.
All numeric output is CSV with a unit-annotated header, 12 significant
digits, and per-value method/error columns; byte-stable across runs for a
fixed configuration.  Exit codes: 0 success, 1 invalid configuration,
2 numerical non-convergence, 3 property-check failure.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass

import numpy as np

from reltoa.classical import (
    ClassicallyForbiddenError,
    classical_toa_closed,
    crtoa_quadrature,
    kappa_c,
    qc_asymptotic,
    rc_asymptotic,
    rc_series_resummation,
)
from reltoa.kernels import (
    BarrierSpec,
    PhysicalParams,
    barrier_factor,
    free_factor,
    momentum_kernel_f,
    momentum_kernel_g,
)
from reltoa.numerics import (
    QuadratureError,
    QuadratureSettings,
    SeriesDivergenceError,
    hyp0f1_one,
    hyp2f1_integral,
    integrate_semiinf_exp,
)
from reltoa.wavepacket import GaussianPacket, momentum_density, phi_overlap
from reltoa.ior import (
    ior_direct,
    ior_momentum,
    ior_series,
    qc_expectation,
    superluminal_classify,
    toa_difference,
    traversal_time,
)

UNAVAILABLE = "---"

# Published narrow-packet reference grid (sigma = 0.5): (k0, v0) plus which
# rows the source table leaves blank in the direct-integral column.
TABLE1_ROWS = [
    (2.00, 0.2, True),
    (2.00, 0.3, True),
    (2.00, 0.5, False),
    (2.00, 0.6, False),
    (0.90, 0.3, True),
    (3.00, 0.3, True),
    (5.00, 0.3, True),
    (0.15, 0.3, True),
    (0.20, 0.3, True),
    (0.25, 0.3, True),
]
TABLE1_SIGMA = 0.5
TABLE2_SIGMA = 9.0
TABLE2_V0 = 0.3
TABLE2_K0 = (0.19, 0.25, 0.28)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERIC = 2
EXIT_CHECK = 3


@dataclass(frozen=True)
class RunConfig:
    """Validated run-wide configuration: units, tolerances, output target."""

    params: PhysicalParams
    settings: QuadratureSettings
    out: str | None


def fmt(x: float) -> str:
    return f"{x:.11e}"


def _parse_config_file(path: str) -> dict[str, str]:
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"bad config line (want key=value): {line!r}")
            key, _, val = line.partition("=")
            out[key.strip()] = val.strip()
    return out


def build_config(args: argparse.Namespace) -> RunConfig:
    raw: dict[str, str] = {}
    if args.config:
        raw = _parse_config_file(args.config)
    mu = float(raw.get("mu", 1.0))
    c = float(raw.get("c", 1.0))
    hbar = float(raw.get("hbar", 1.0))
    rel_tol = args.tol if args.tol is not None else float(raw.get("rel_tol", 1e-10))
    abs_tol = float(raw.get("abs_tol", 1e-14))
    max_sub = int(raw.get("max_subdivisions", 2000))
    max_terms = int(raw.get("max_series_terms", 600))
    params = PhysicalParams(mu=mu, c=c, hbar=hbar)
    settings = QuadratureSettings(
        rel_tol=rel_tol,
        abs_tol=abs_tol,
        max_subdivisions=max_sub,
        max_series_terms=max_terms,
    )
    return RunConfig(params=params, settings=settings, out=args.out)


def _open_out(cfg: RunConfig):
    if cfg.out is None or cfg.out == "-":
        return sys.stdout, False
    return open(cfg.out, "w", newline="", encoding="utf-8"), True


def _emit(cfg: RunConfig, header: list[str], rows: list[list[str]]) -> None:
    fh, close = _open_out(cfg)
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    finally:
        if close:
            fh.close()


def _packet(sigma: float, k0: float, q0: float | None = None) -> GaussianPacket:
    # a far-left center keeps the no-leakage warning silent for scans
    center = q0 if q0 is not None else -max(50.0, 40.0 * sigma)
    return GaussianPacket(q0=center, sigma=sigma, k0=k0)


def cmd_table1(cfg: RunConfig, args: argparse.Namespace) -> int:
    header = [
        "k0 (1/length)",
        "v0 (energy)",
        "sigma (length)",
        "rc_integral (dimensionless)",
        "rc_integral_err (dimensionless)",
        "rc_series (dimensionless)",
        "rc_series_err (dimensionless)",
        "rc_momentum (dimensionless)",
        "rc_momentum_err (dimensionless)",
    ]
    rows = []
    for k0, v0, has_integral in TABLE1_ROWS:
        packet = _packet(TABLE1_SIGMA, k0)
        cells = [f"{k0:.2f}", f"{v0:.1f}", f"{TABLE1_SIGMA:.1f}"]
        if has_integral:
            cells += _safe_ior(lambda: ior_direct(packet, v0, cfg.params, cfg.settings))
        else:
            # the source table reports no direct-integral value on this row
            cells += [UNAVAILABLE, UNAVAILABLE]
        cells += _safe_ior(lambda: ior_series(packet, v0, None, cfg.params, cfg.settings))
        cells += _safe_ior(lambda: ior_momentum(packet, v0, cfg.params, cfg.settings))
        rows.append(cells)
    _emit(cfg, header, rows)
    return EXIT_OK


def _safe_ior(thunk) -> list[str]:
    # one failed cell must not abort the table
    try:
        res = thunk()
        return [fmt(res.value), fmt(res.err)]
    except (QuadratureError, SeriesDivergenceError):
        return [UNAVAILABLE, UNAVAILABLE]


def cmd_table2(cfg: RunConfig, args: argparse.Namespace) -> int:
    header = [
        "k0 (1/length)",
        "v0 (energy)",
        "sigma (length)",
        "rc_integral (dimensionless)",
        "rc_integral_err (dimensionless)",
        "rc_momentum (dimensionless)",
        "rc_momentum_err (dimensionless)",
    ]
    rows = []
    for k0 in TABLE2_K0:
        packet = _packet(TABLE2_SIGMA, k0)
        cells = [f"{k0:.2f}", f"{TABLE2_V0:.1f}", f"{TABLE2_SIGMA:.1f}"]
        cells += _safe_ior(lambda: ior_direct(packet, TABLE2_V0, cfg.params, cfg.settings))
        cells += _safe_ior(lambda: ior_momentum(packet, TABLE2_V0, cfg.params, cfg.settings))
        rows.append(cells)
    _emit(cfg, header, rows)
    return EXIT_OK


def cmd_scan(cfg: RunConfig, args: argparse.Namespace) -> int:
    if args.steps < 2:
        raise ValueError("scan needs steps >= 2")
    kc = kappa_c(args.vo, cfg.params)
    sigma_k = 0.5 / args.sigma
    header = [
        "k0 (1/length)",
        "rc_momentum (dimensionless)",
        "rc_momentum_err (dimensionless)",
        "kappa_c (1/length)",
        "kappa_c_minus_sigma_k (1/length)",
        "classification",
    ]
    rows = []
    for k0 in np.linspace(args.ko_min, args.ko_max, args.steps):
        packet = _packet(args.sigma, float(k0))
        res = ior_momentum(packet, args.vo, cfg.params, cfg.settings)
        label = "superluminal" if res.value < 1.0 else "subluminal"
        rows.append(
            [
                fmt(float(k0)),
                fmt(res.value),
                fmt(res.err),
                fmt(kc),
                fmt(kc - sigma_k),
                label,
            ]
        )
    _emit(cfg, header, rows)
    return EXIT_OK


def cmd_density(cfg: RunConfig, args: argparse.Namespace) -> int:
    if args.grid < 2:
        raise ValueError("density needs grid >= 2")
    kc = kappa_c(args.vo, cfg.params)
    packet = _packet(args.sigma, args.ko)
    k_lo = args.k_min if args.k_min is not None else 0.0
    k_hi = args.k_max if args.k_max is not None else max(
        args.ko + 6.0 / (2.0 * args.sigma), 1.2 * kc
    )
    header = [
        "k (1/length)",
        "density_plus (length)",
        "density_minus (length)",
        "kappa_c (1/length)",
    ]
    rows = []
    for k in np.linspace(k_lo, k_hi, args.grid):
        rows.append(
            [
                fmt(float(k)),
                fmt(momentum_density(packet, float(k), +1)),
                fmt(momentum_density(packet, float(k), -1)),
                fmt(kc),
            ]
        )
    _emit(cfg, header, rows)
    return EXIT_OK


def cmd_kernel(cfg: RunConfig, args: argparse.Namespace) -> int:
    if args.grid < 2:
        raise ValueError("kernel needs grid >= 2")
    header = [
        "zeta (length)",
        "t_free (dimensionless)",
        "t_free_err (dimensionless)",
        "t_barrier_minus (dimensionless)",
        "t_barrier_minus_err (dimensionless)",
        "t_barrier_plus (dimensionless)",
        "t_barrier_plus_err (dimensionless)",
    ]
    rows = []
    for zeta in np.linspace(args.zeta_min, args.zeta_max, args.grid):
        z = float(zeta)
        tf = free_factor(z, cfg.params, cfg.settings)
        tm = barrier_factor(-args.vo, z, cfg.params, cfg.settings)
        tp = barrier_factor(+args.vo, z, cfg.params, cfg.settings)
        rows.append(
            [
                fmt(z),
                fmt(tf.value),
                fmt(tf.err),
                fmt(tm.value),
                fmt(tm.err),
                fmt(tp.value),
                fmt(tp.err),
            ]
        )
    _emit(cfg, header, rows)
    return EXIT_OK


def cmd_point(cfg: RunConfig, args: argparse.Namespace) -> int:
    barrier = BarrierSpec(v0=args.vo, a=args.barrier_a, b=args.barrier_b)
    barrier.require_subcritical(cfg.params)
    q0 = args.qo if args.qo is not None else barrier.a - 20.0 * args.sigma
    packet = GaussianPacket(q0=q0, sigma=args.sigma, k0=args.ko)
    packet.check_support(barrier.a)
    t_c = barrier.length / cfg.params.c

    header = ["quantity", "method", "value", "err", "unit"]
    rows: list[list[str]] = []

    def put(name: str, method: str, value: float, err: float, unit: str) -> None:
        rows.append([name, method, fmt(value), fmt(err), unit])

    put("t_c", "exact", t_c, 0.0, "time")
    put("kappa_c", "closed", kappa_c(args.vo, cfg.params), 0.0, "1/length")
    res_m = ior_momentum(packet, args.vo, cfg.params, cfg.settings)
    put("rc", "momentum", res_m.value, res_m.err, "dimensionless")
    put("rc_plus", "momentum", res_m.plus_part, 0.0, "dimensionless")
    put("rc_minus", "momentum", res_m.minus_part, 0.0, "dimensionless")
    try:
        res_d = ior_direct(packet, args.vo, cfg.params, cfg.settings)
        put("rc", "direct", res_d.value, res_d.err, "dimensionless")
    except (QuadratureError, SeriesDivergenceError):
        rows.append(["rc", "direct", UNAVAILABLE, UNAVAILABLE, "dimensionless"])
    try:
        res_s = ior_series(packet, args.vo, None, cfg.params, cfg.settings)
        put("rc", "series", res_s.value, res_s.err, "dimensionless")
    except (QuadratureError, SeriesDivergenceError):
        rows.append(["rc", "series", UNAVAILABLE, UNAVAILABLE, "dimensionless"])
    qc = qc_expectation(packet, cfg.params, cfg.settings)
    put("qc", "direct", qc, 0.0, "dimensionless")
    tau, tau_plus, tau_minus = traversal_time(packet, barrier, cfg.params, cfg.settings)
    put("tau_trav", "momentum", tau, t_c * res_m.err, "time")
    put("tau_plus", "momentum", tau_plus, 0.0, "time")
    put("tau_minus", "momentum", tau_minus, 0.0, "time")
    put("toa_difference", "direct", toa_difference(packet, barrier, cfg.params, cfg.settings), 0.0, "time")
    label, margin = superluminal_classify(packet, args.vo, cfg.params, cfg.settings)
    rows.append(["classification", "momentum", label.value, fmt(margin), "margin: 1/length"])
    _emit(cfg, header, rows)
    return EXIT_OK


def _limit_checks(cfg: RunConfig):
    """Yield (name, residual, threshold) for every limit/oracle property."""
    params = cfg.params
    settings = cfg.settings

    for a, b in ((1.0, 1.0), (2.0, 1.0), (1.0, 3.0)):
        val, _ = integrate_semiinf_exp(
            lambda z, a=a, b=b: math.sqrt(z * z - 1.0)
            / z
            * a
            * a
            / (a * a + b * b * z * z),
            1.0,
            0.0,
            settings,
        )
        ref = 0.5 * math.pi * (-1.0 + math.sqrt(1.0 + (a / b) ** 2))
        yield f"residue identity (a={a}, b={b})", abs(val - ref), 1e-8

    for v0 in (0.1, 0.3, 0.99):
        kc = kappa_c(v0, params)
        lhs = (params.hbar * kc * params.c) ** 2 + params.rest_energy**2
        rhs = (params.rest_energy + v0) ** 2
        yield f"kappa_c threshold identity (v0={v0})", abs(lhs - rhs) / rhs, 1e-13

    for zeta in (0.1, 1.0, 10.0):
        tb = barrier_factor(0.0, zeta, params, settings).value
        tf = free_factor(zeta, params, settings).value
        yield f"zero-height kernel (zeta={zeta})", abs(tb - tf) / abs(tf), 1e-9

    for zeta in (0.1, 1.0, 10.0):
        combo = momentum_kernel_f(0, 0, zeta, params) + momentum_kernel_g(
            0, 0, zeta, params, settings
        )
        tf = free_factor(zeta, params, settings).value
        yield f"f00+g00 vs free factor (zeta={zeta})", abs(combo - tf) / abs(tf), 1e-9

    for v0, zeta in ((0.3, 1.0), (0.5, 0.5)):
        ref = hyp0f1_one(-v0 * zeta * zeta / 2.0, settings)
        errs = []
        for c_val in (1e2, 1e3, 1e4):
            pp = PhysicalParams(mu=params.mu, c=c_val, hbar=params.hbar)
            errs.append(abs(barrier_factor(-v0, zeta, pp, settings).value - ref))
        monotone = 0.0 if errs[0] > errs[1] > errs[2] else 1.0
        yield f"nonrelativistic kernel limit (v0={v0}, zeta={zeta})", monotone, 0.5
        pp = PhysicalParams(mu=params.mu, c=1e4, hbar=params.hbar)
        yield (
            f"free factor -> 1 (zeta={zeta}, c=1e4)",
            abs(free_factor(zeta, pp, settings).value - 1.0),
            1e-8,
        )

    target = rc_asymptotic(2.0, 0.3, params)
    val = rc_series_resummation(2.0, 0.3, 12, params, settings)
    yield "refraction-index resummation (p0=2, v0=0.3, j_max=12)", abs(val - target), 1e-6

    barrier = BarrierSpec(v0=0.3, a=-2.0, b=-1.0)
    for region, q0, p0 in (("I", -0.5, 1.0), ("II", -1.5, 1.0), ("III", -5.0, 2.0)):
        quad = crtoa_quadrature(q0, p0, barrier, params, settings)
        closed = classical_toa_closed(region, q0, p0, barrier, params)
        yield f"classical arrival time region {region}", abs(quad - closed), 1e-8

    packet = GaussianPacket(q0=-3.0, sigma=0.5, k0=2.0)
    for zeta in (0.5, 1.0, 5.0):
        grid = np.linspace(-16.0, 16.0, 400_001)
        h = grid[1] - grid[0]
        env = (0.5 * math.sqrt(2.0 * math.pi)) ** -0.5 * np.exp(
            -((grid + 3.0) ** 2) / (4.0 * 0.25)
        )
        env_m = (0.5 * math.sqrt(2.0 * math.pi)) ** -0.5 * np.exp(
            -((grid + 3.0 - 0.5 * zeta) ** 2) / (4.0 * 0.25)
        )
        env_p = (0.5 * math.sqrt(2.0 * math.pi)) ** -0.5 * np.exp(
            -((grid + 3.0 + 0.5 * zeta) ** 2) / (4.0 * 0.25)
        )
        overlap = float(np.trapezoid(env_m * env_p, dx=h))
        yield (
            f"overlap closed form vs quadrature (zeta={zeta})",
            abs(phi_overlap(packet, zeta) - overlap),
            1e-10,
        )

    wide = GaussianPacket(q0=-300.0, sigma=6.0, k0=2.0)
    qc = qc_expectation(wide, params, settings)
    yield "free-flight factor vs asymptote (sigma=6, k0=2)", abs(
        qc - qc_asymptotic(2.0 * params.hbar, params)
    ) / qc_asymptotic(2.0 * params.hbar, params), 1e-2

    x = 3.0
    ref = 2.0 * (math.sqrt(1.0 + x) - 1.0) / x
    yield "hypergeometric closed form", abs(
        hyp2f1_integral(1.0, 0.5, 2.0, -x, settings) - ref
    ), 1e-10


def cmd_limits(cfg: RunConfig, args: argparse.Namespace) -> int:
    failures = 0
    for name, residual, threshold in _limit_checks(cfg):
        ok = residual <= threshold
        if not ok:
            failures += 1
        print(
            f"{'PASS' if ok else 'FAIL'}  {name}: residual={residual:.3e} "
            f"(threshold {threshold:.1e})"
        )
    print(f"{'all checks passed' if failures == 0 else f'{failures} check(s) failed'}")
    return EXIT_OK if failures == 0 else EXIT_CHECK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reltoa",
        description=(
            "Relativistic arrival-time kernels and barrier traversal times "
            "for spin-0 Gaussian wavepackets"
        ),
    )
    parser.add_argument("--config", help="key=value configuration file")
    parser.add_argument("--out", help="output CSV path (default stdout)")
    parser.add_argument("--tol", type=float, help="relative quadrature tolerance")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("table1", help="narrow-packet refraction index by all three methods")
    sub.add_parser("table2", help="wide-packet (instantaneous tunneling) values")

    p_scan = sub.add_parser("scan", help="refraction index over a k0 grid")
    p_scan.add_argument("--vo", type=float, required=True)
    p_scan.add_argument("--sigma", type=float, required=True)
    p_scan.add_argument("--ko-min", type=float, default=0.1)
    p_scan.add_argument("--ko-max", type=float, default=6.0)
    p_scan.add_argument("--steps", type=int, default=60)

    p_dens = sub.add_parser("density", help="momentum density with the kappa_c marker")
    p_dens.add_argument("--vo", type=float, required=True)
    p_dens.add_argument("--sigma", type=float, required=True)
    p_dens.add_argument("--ko", type=float, required=True)
    p_dens.add_argument("--grid", type=int, default=200)
    p_dens.add_argument("--k-min", type=float)
    p_dens.add_argument("--k-max", type=float)

    p_kern = sub.add_parser("kernel", help="tabulate T_F and T_B(+-v0)")
    p_kern.add_argument("--vo", type=float, required=True)
    p_kern.add_argument("--zeta-min", type=float, default=0.1)
    p_kern.add_argument("--zeta-max", type=float, default=10.0)
    p_kern.add_argument("--grid", type=int, default=100)

    sub.add_parser("limits", help="run the limit/oracle property suite")

    p_point = sub.add_parser("point", help="all payload quantities for one setup")
    p_point.add_argument("--vo", type=float, required=True)
    p_point.add_argument("--sigma", type=float, required=True)
    p_point.add_argument("--ko", type=float, required=True)
    p_point.add_argument("--qo", type=float)
    p_point.add_argument("--barrier-a", type=float, default=-2.0)
    p_point.add_argument("--barrier-b", type=float, default=-1.0)

    return parser


_COMMANDS = {
    "table1": cmd_table1,
    "table2": cmd_table2,
    "scan": cmd_scan,
    "density": cmd_density,
    "kernel": cmd_kernel,
    "limits": cmd_limits,
    "point": cmd_point,
}


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        cfg = build_config(args)
    except (ValueError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return _COMMANDS[args.command](cfg, args)
    except (ValueError, ClassicallyForbiddenError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (QuadratureError, SeriesDivergenceError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

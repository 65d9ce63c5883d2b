"""Command-line front end: rate-curve sweeps, link simulations, and the
self-verification suite, with CSV/SVG emission and run manifests.

Subcommands
-----------
curves    sweep the rate curves over an SNR grid -> curves.csv (+ curves.svg)
simulate  run the two-stage coded link -> sim.csv
verify    run the numeric cross-checks -> report (+ verify.txt)

Every command accepts ``--seed``, ``--out``, ``--threads``, ``--quad-order``
and an optional ``--config`` file of ``key = value`` lines; command-line
flags override config-file values. Outputs are byte-identical across reruns
and across ``--threads`` settings. A plain-text manifest sidecar records the
command, parameters, seed, version, wall-clock and output digests.

Exit codes: 0 success, 1 verification failure, 2 usage or config error,
3 I/O error.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, awgn_info, codec, linksim, ocb, rates
from .svgfig import LineChart

_FLOAT_FMT = "{:.12g}"


def _fmt(x) -> str:
    if isinstance(x, float):
        return _FLOAT_FMT.format(x)
    return str(x)


def _csv_line(values) -> str:
    return ",".join(_fmt(v) for v in values)


class ConfigError(Exception):
    pass


class _IOFailure(Exception):
    pass


# ---------------------------------------------------------------------------
# config plumbing


def _parse_config_file(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise _IOFailure(f"cannot read config file {path}: {exc}") from exc
    values = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{ln}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        values[key.strip().replace("-", "_")] = val.strip()
    return values


def _merge_options(args: argparse.Namespace, defaults: dict, converters: dict) -> dict:
    """defaults < config file < explicit flags; config strings get converted."""
    merged = dict(defaults)
    if getattr(args, "config", None):
        for key, raw in _parse_config_file(args.config).items():
            if key not in defaults:
                raise ConfigError(f"unknown config key {key!r}")
            conv = converters.get(key, str)
            try:
                merged[key] = conv(raw)
            except ValueError as exc:
                raise ConfigError(f"bad value for {key!r}: {exc}") from exc
    for key in defaults:
        flag_val = getattr(args, key, None)
        if flag_val is not None:
            merged[key] = flag_val
    return merged


def _bool_opt(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {raw!r}")


def _float_list(raw: str) -> tuple:
    vals = tuple(float(tok) for tok in raw.split(",") if tok.strip())
    if not vals:
        raise ValueError("expected a comma-separated list of numbers")
    return vals


# ---------------------------------------------------------------------------
# output plumbing


def _write_text(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise _IOFailure(f"cannot write {path}: {exc}") from exc


def _write_manifest(out_dir: Path, command: str, params: dict, outputs: list) -> None:
    lines = [
        f"command = {command}",
        f"version = {__version__}",
        f"wall_clock = {time.strftime('%Y-%m-%dT%H:%M:%SZ', time.gmtime())}",
    ]
    for key in sorted(params):
        lines.append(f"{key} = {_fmt(params[key])}")
    for path in outputs:
        digest = hashlib.sha256(path.read_bytes()).hexdigest()
        lines.append(f"output {path.name} sha256 = {digest}")
    _write_text(out_dir / f"{command}.manifest.txt", "\n".join(lines) + "\n")


def _resolve_code(token: str) -> codec.LinearCode:
    if token.startswith("@"):
        try:
            return codec.from_generator_file(token[1:])
        except OSError as exc:
            raise _IOFailure(f"cannot read generator file {token[1:]}: {exc}") from exc
    return codec.builtin_code(token)


# ---------------------------------------------------------------------------
# curves


_CURVES_DEFAULTS = {
    "gamma_min": 0.01,
    "gamma_max": 100.0,
    "points": 60,
    "spacing": "log",
    "quad_order": 128,
    "svg": False,
}
_CURVES_CONVERTERS = {
    "gamma_min": float,
    "gamma_max": float,
    "points": int,
    "spacing": str,
    "quad_order": int,
    "svg": _bool_opt,
}


def cmd_curves(args: argparse.Namespace) -> int:
    opt = _merge_options(args, _CURVES_DEFAULTS, _CURVES_CONVERTERS)
    spec = rates.SweepSpec(
        gamma_min=opt["gamma_min"],
        gamma_max=opt["gamma_max"],
        points=opt["points"],
        spacing=opt["spacing"],
        quad_order=opt["quad_order"],
    )
    rows = rates.sweep(spec)

    out_dir = Path(args.out)
    lines = [",".join(rates.CSV_COLUMNS)]
    lines.extend(_csv_line(r.as_csv_values()) for r in rows)
    csv_path = out_dir / "curves.csv"
    _write_text(csv_path, "\n".join(lines) + "\n")
    outputs = [csv_path]

    if opt["svg"]:
        g = np.array([r.gamma for r in rows])
        chart = LineChart(
            title="Reliable-rate curves over the AWGN channel",
            x_label="symbol SNR (linear scale, log axis)",
            y_label="bits per symbol",
            log_x=spec.spacing == "log",
        )
        chart.add_series("Gaussian input", g, np.array([r.c_gauss_complex for r in rows]))
        chart.add_series("QPSK", g, np.array([r.i_qpsk for r in rows]))
        chart.add_series("BPSK", g, np.array([r.i_bpsk for r in rows]))
        chart.add_series(
            "layered total (claimed)", g, np.array([r.r_j_claimed for r in rows]), dash="6,3"
        )
        chart.add_series(
            "layered total (exact)", g, np.array([r.sum_exact for r in rows]), dash="2,2"
        )
        svg_path = out_dir / "curves.svg"
        _write_text(svg_path, chart.render())
        outputs.append(svg_path)

    _write_manifest(out_dir, "curves", {**opt, "seed": args.seed}, outputs)
    print(f"wrote {csv_path} ({len(rows)} rows)")
    return 0


# ---------------------------------------------------------------------------
# simulate


_SIM_DEFAULTS = {
    "alpha": 1.0 / np.sqrt(2.0),
    "sigma2": (0.5,),
    "code1": "hamming74",
    "code2": "hamming74",
    "trials": 1000,
    "stage2_input": "reconstructed",
    "shards": 1,
}
_SIM_CONVERTERS = {
    "alpha": float,
    "sigma2": _float_list,
    "code1": str,
    "code2": str,
    "trials": int,
    "stage2_input": str,
    "shards": int,
}

_SIM_COLUMNS = (
    "gamma",
    "alpha",
    "sigma2",
    "code1",
    "code2",
    "k1",
    "k2",
    "block_len",
    "trials",
    "stage2_input",
    "ber1",
    "ci95_ber1",
    "ber2",
    "ci95_ber2",
    "fer1",
    "fer2",
    "cond_events",
    "cond_ber2_given_v1_err",
)


def cmd_simulate(args: argparse.Namespace) -> int:
    opt = _merge_options(args, _SIM_DEFAULTS, _SIM_CONVERTERS)
    code1 = _resolve_code(opt["code1"])
    code2 = _resolve_code(opt["code2"])

    lines = [",".join(_SIM_COLUMNS)]
    for row_index, sigma2 in enumerate(opt["sigma2"]):
        cfg = linksim.LinkConfig(
            code1=code1,
            code2=code2,
            alpha=opt["alpha"],
            sigma2=sigma2,
            trials=opt["trials"],
            seed=args.seed + row_index,
            stage2_input=opt["stage2_input"],
            shards=opt["shards"],
        )
        stats = linksim.run_trials(cfg, threads=args.threads)
        gamma = np.inf if sigma2 == 0.0 else 2.0 * opt["alpha"] ** 2 / sigma2
        cond = stats.cond_ber2_given_v1_err
        lines.append(
            _csv_line(
                (
                    gamma,
                    opt["alpha"],
                    sigma2,
                    opt["code1"],
                    opt["code2"],
                    code1.K,
                    code2.K,
                    code1.M,
                    stats.trials,
                    opt["stage2_input"],
                    stats.ber1,
                    stats.ci95("ber1"),
                    stats.ber2,
                    stats.ci95("ber2"),
                    stats.fer1,
                    stats.fer2,
                    stats.cond_events,
                    float("nan") if cond is None else cond,
                )
            )
        )

    out_dir = Path(args.out)
    csv_path = out_dir / "sim.csv"
    _write_text(csv_path, "\n".join(lines) + "\n")
    _write_manifest(
        out_dir,
        "sim",
        {**opt, "sigma2": ",".join(_fmt(s) for s in opt["sigma2"]), "seed": args.seed},
        [csv_path],
    )
    print(f"wrote {csv_path} ({len(opt['sigma2'])} rows)")
    return 0


# ---------------------------------------------------------------------------
# verify


_VERIFY_DEFAULTS = {
    "quad_order": 128,
    "grid_points": 60,
    "mc_samples": 200_000,
    "mc_tol": 0.0,  # 0 means: use 3 Monte Carlo standard errors
    "trials": 400,
    "gap_threshold": 0.01,
}
_VERIFY_CONVERTERS = {
    "quad_order": int,
    "grid_points": int,
    "mc_samples": int,
    "mc_tol": float,
    "trials": int,
    "gap_threshold": float,
}

_VERIFY_SNRS = (0.25, 1.0, 2.0, 4.0, 10.0)


class _Report:
    def __init__(self):
        self.lines = []
        self.failures = 0

    def check(self, name: str, margin: float, tol: float, detail: str = "") -> None:
        ok = margin <= tol
        if not ok:
            self.failures += 1
        tail = f"  ({detail})" if detail else ""
        self.lines.append(
            f"[{'PASS' if ok else 'FAIL'}] {name}: margin {_fmt(float(margin))}"
            f" <= tol {_fmt(float(tol))}{tail}"
        )

    def note(self, text: str) -> None:
        self.lines.append(text)

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


def _verify_identities(rep: _Report, opt: dict) -> None:
    order = opt["quad_order"]
    grid = np.geomspace(0.01, 100.0, opt["grid_points"])
    dec = max(
        abs(awgn_info.mi_qpsk(g, order) - 2.0 * awgn_info.mi_bpsk(g / 2.0, order))
        for g in grid
    )
    rep.check("qpsk_decomposition", dec, 1e-6, f"{opt['grid_points']} grid points")
    chain = 0.0
    for g in grid:
        i_v1, i_v2, total = rates.rate_ocb_exact(g, order)
        chain = max(chain, abs(total - awgn_info.mi_qpsk(g, order)))
    rep.check("chain_rule", chain, 1e-6, f"{opt['grid_points']} grid points")


def _verify_backends(rep: _Report, opt: dict, seed: int) -> None:
    order, samples = opt["quad_order"], opt["mc_samples"]
    noise = awgn_info.NoiseModel(1.0)
    worst = 0.0
    worst_allowed = np.inf
    for idx, g in enumerate(_VERIFY_SNRS):
        amp = np.sqrt(g / 2.0)
        qpsk_pts = np.array([[amp, amp], [-amp, amp], [amp, -amp], [-amp, -amp]])
        cases = [
            (
                awgn_info.PointSet1D.uniform([np.sqrt(g), -np.sqrt(g)]),
                awgn_info.mi_bpsk(g, order),
            ),
            (
                awgn_info.PointSet2D.uniform(qpsk_pts),
                awgn_info.mi_qpsk(g, order),
            ),
        ]
        for kind, (alphabet, exact) in enumerate(cases):
            mc = awgn_info.mi_monte_carlo(alphabet, noise, samples, seed + 97 * idx + kind)
            allowed = opt["mc_tol"] if opt["mc_tol"] > 0.0 else 3.0 * mc.stderr
            diff = abs(mc.bits - exact)
            if diff - allowed > worst - worst_allowed:
                worst, worst_allowed = diff, allowed
        # 2-vs-2 axis grouping of the four-point set
        a = np.sqrt(2.0 * g / 2.0)  # point radius at E_s = g
        axis_pts = np.array([[a, 0.0], [0.0, a], [-a, 0.0], [0.0, -a]])
        grouped = awgn_info.mi_monte_carlo_grouped(
            awgn_info.PointSet2D.uniform(axis_pts),
            np.array([0, 1, 0, 1]),
            noise,
            samples,
            seed + 97 * idx + 2,
        )
        exact_v1 = rates.rate_ocb_exact(g, order)[0]
        allowed = opt["mc_tol"] if opt["mc_tol"] > 0.0 else 3.0 * grouped.stderr
        diff = abs(grouped.bits - exact_v1)
        if diff - allowed > worst - worst_allowed:
            worst, worst_allowed = diff, allowed
    rep.check(
        "backend_agreement",
        worst,
        worst_allowed,
        f"bpsk/qpsk/axis-grouping at {len(_VERIFY_SNRS)} SNRs, {samples} samples",
    )


def _verify_subadditivity(rep: _Report, opt: dict) -> None:
    order = opt["quad_order"]
    energies = np.array([0.25, 0.5, 1.0, 2.0, 4.0])
    worst = -np.inf  # strictness margin: want rhs - lhs > 0 everywhere
    for mod in ("bpsk", "qpsk"):
        for e1 in energies:
            for e2 in energies:
                lhs, rhs, _ = rates.check_superposition_inequality(e1, e2, 1.0, mod, order)
                worst = max(worst, lhs - rhs)
    rep.check("subadditivity_strict", worst, -1e-12, "5x5 energy grid, bpsk and qpsk")
    eq = 0.0
    for mod in ("bpsk", "qpsk"):
        for e1 in energies:
            lhs, rhs, _ = rates.check_superposition_inequality(e1, 0.0, 1.0, mod, order)
            eq = max(eq, abs(lhs - rhs))
    rep.check("subadditivity_equality_at_zero", eq, 1e-9, "E2 = 0 edge")


def _verify_geometry(rep: _Report) -> None:
    cons = ocb.Constellation(alpha=1.0 / np.sqrt(2.0))
    worst = abs(np.abs(cons.points) ** 2 - cons.symbol_energy).max()
    # Table mapping: (0,0)->(a,0), (0,1)->(-a,0), (1,0)->(0,a), (1,1)->(0,-a)
    a = cons.amplitude
    expect = {(0, 0): a, (0, 1): -a, (1, 0): 1j * a, (1, 1): -1j * a}
    for (v1, v2), want in expect.items():
        worst = max(worst, abs(ocb.map_bits(v1, v2, cons) - want))
    worst = max(worst, abs(abs(cons.points[0] - cons.points[2]) - 2.0 * cons.amplitude))
    rep.check("constellation_geometry", worst, 1e-12, "energies, map table, diameters")


def _verify_genie_link(rep: _Report, opt: dict, seed: int, threads: int) -> None:
    alpha, sigma2 = 1.0 / np.sqrt(2.0), 0.5
    code = codec.identity_code(64)
    cfg = linksim.LinkConfig(
        code1=code,
        code2=code,
        alpha=alpha,
        sigma2=sigma2,
        trials=opt["trials"],
        seed=seed + 1,
        stage2_input="genie",
    )
    stats = linksim.run_trials(cfg, threads=threads)
    p = linksim.q_function(np.sqrt(2.0) * alpha / np.sqrt(sigma2))
    n = stats.trials * code.M
    se = np.sqrt(p * (1.0 - p) / n)
    allowed = opt["mc_tol"] if opt["mc_tol"] > 0.0 else 3.0 * se
    rep.check(
        "genie_link_q_function",
        abs(stats.ber2 - p),
        allowed,
        f"ber2 {_fmt(stats.ber2)} vs Q {_fmt(float(p))}, {n} bits",
    )


def _gap_table(rep: _Report, opt: dict) -> None:
    order = opt["quad_order"]
    rep.note("")
    rep.note("claimed vs exact layered rate (bits/symbol):")
    rep.note("gamma      r_j_claimed  sum_exact    gap")
    for g in (0.1, 0.5, 1.0, 2.0, 4.0, 10.0, 40.0):
        claimed = rates.rate_ocb_claimed(g, order)
        exact = rates.rate_ocb_exact(g, order)[2]
        rep.note(
            f"{g:<9g}  {claimed:<11.6f}  {exact:<11.6f}  {claimed - exact:.6f}"
        )
    interval = rates.find_claim_interval(opt["gap_threshold"], order=order)
    rep.note(
        f"claimed rate exceeds the QPSK rate by > {interval.threshold:g} bits for "
        f"gamma in [{interval.gamma_lo:.4g}, {interval.gamma_hi:.4g}]; "
        f"peak gap {interval.peak_gap:.6f} bits at gamma = {interval.gamma_peak:.4g}"
    )
    rep.note("")


def cmd_verify(args: argparse.Namespace) -> int:
    opt = _merge_options(args, _VERIFY_DEFAULTS, _VERIFY_CONVERTERS)
    rep = _Report()
    _verify_identities(rep, opt)
    _verify_backends(rep, opt, args.seed)
    _verify_subadditivity(rep, opt)
    _verify_geometry(rep)
    _verify_genie_link(rep, opt, args.seed, args.threads)
    interval = rates.find_claim_interval(opt["gap_threshold"], order=opt["quad_order"])
    rep.check(
        "claim_interval_nonempty",
        -(interval.gamma_hi - interval.gamma_lo),
        0.0,
        f"threshold {opt['gap_threshold']:g} bits",
    )
    _gap_table(rep, opt)
    verdict = "all checks passed" if rep.failures == 0 else f"{rep.failures} check(s) FAILED"
    rep.note(verdict)

    text = rep.text()
    sys.stdout.write(text)
    out_dir = Path(args.out)
    report_path = out_dir / "verify.txt"
    _write_text(report_path, text)
    _write_manifest(out_dir, "verify", {**opt, "seed": args.seed}, [report_path])
    return 0 if rep.failures == 0 else 1


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0, help="base RNG seed")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--threads", type=int, default=1, help="worker processes")
    parser.add_argument("--quad-order", dest="quad_order", type=int, default=None,
                        help="Gauss-Hermite quadrature order (default 128)")
    parser.add_argument("--config", default=None,
                        help="key = value config file; flags override it")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ocbsim",
        description="Layered BPSK-on-QPSK link simulator and AWGN rate toolkit",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curves", help="sweep rate curves over an SNR grid")
    _add_common(p)
    p.add_argument("--gamma-min", dest="gamma_min", type=float, default=None)
    p.add_argument("--gamma-max", dest="gamma_max", type=float, default=None)
    p.add_argument("--points", type=int, default=None)
    p.add_argument("--spacing", choices=("log", "linear"), default=None)
    p.add_argument("--svg", action="store_const", const=True, default=None,
                   help="also write curves.svg")
    p.set_defaults(func=cmd_curves)

    p = sub.add_parser("simulate", help="run the two-stage coded link")
    _add_common(p)
    p.add_argument("--alpha", type=float, default=None, help="per-axis amplitude scale")
    p.add_argument("--sigma2", type=_float_list, default=None,
                   help="comma-separated noise variances (per real dimension)")
    p.add_argument("--code1", default=None,
                   help="axis-stream code: builtin name or @generator-file")
    p.add_argument("--code2", default=None,
                   help="sign-stream code: builtin name or @generator-file")
    p.add_argument("--trials", type=int, default=None, help="blocks per SNR point")
    p.add_argument("--stage2-input", dest="stage2_input",
                   choices=linksim.STAGE2_MODES, default=None)
    p.add_argument("--shards", type=int, default=None,
                   help="independent trial shards (results do not depend on this)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="run numeric cross-checks and the gap table")
    _add_common(p)
    p.add_argument("--grid-points", dest="grid_points", type=int, default=None)
    p.add_argument("--mc-samples", dest="mc_samples", type=int, default=None)
    p.add_argument("--mc-tol", dest="mc_tol", type=float, default=None,
                   help="absolute tolerance for Monte Carlo checks "
                        "(default: 3 standard errors)")
    p.add_argument("--trials", type=int, default=None, help="genie-link trials")
    p.add_argument("--gap-threshold", dest="gap_threshold", type=float, default=None)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _IOFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())

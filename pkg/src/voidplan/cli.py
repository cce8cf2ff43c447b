"""Command-line front end: synthesize or fit fields, plan sensor layouts,
verify the bound theory, and summarize measured gaps.

Subcommands
-----------
synth        write a synthetic intensity field (tri-modal default)
fit          smooth an arrivals CSV into an intensity field
plan         greedy placement; writes a JSON report and a curves CSV
verify       numeric sweeps of the bound identities and margins
gap-summary  mean measured gaps of a plan report and their reduction

Every numeric option can also come from a JSON or TOML file passed with
``--config`` (keys named like the long options, underscores for dashes);
explicit flags win over the file.  Exit status: 0 success, 1 validation
error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .bounds import (
    corrected_gap_bounds,
    dominance_check,
    jensen_gap_upper,
    tail_margin,
    tail_margin_complement,
    tail_margin_derivative,
    taylor_remainder_ratio,
)
from .field import (
    GridDomain,
    MaternKernel,
    estimate_field_from_arrivals,
    load_arrivals,
    load_field,
    save_field,
    synthesize_field,
)
from .placement import CandidateSet, greedy_place
from .sensing import SensorModel

__all__ = ["main", "build_parser"]

DEFAULTS = {
    "start_km": 0.0,
    "end_km": 18.5,
    "spacing_km": 0.05,
    "smoothness": 1.5,
    "range_km": 1.5,
    "marginal_std": 0.3,
    "profile": "trimodal",
    "time_ratio": 1.0,
    "bandwidth_km": 0.5,
    "variance_floor": 1e-8,
    "rho": 0.95,
    "sigma_l": 0.05,
    "sensors": 30,
    "surrogate": "variance_corrected",
    "candidate_spacing_km": None,
    "mc_samples": 20000,
    "mc_mode": "correlated",
    "seed": 7,
    "pairs": 10000,
    "points": 10000,
}


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    p = Path(path)
    if not p.exists():
        raise ValueError(f"config file not found: {p}")
    text = p.read_bytes()
    if p.suffix.lower() == ".toml":
        try:
            import tomllib  # Python >= 3.11
        except ImportError:
            try:
                import tomli as tomllib
            except ImportError:
                raise ValueError(
                    "TOML config requires Python >= 3.11 or the tomli package"
                ) from None
        return tomllib.loads(text.decode("utf-8"))
    return json.loads(text.decode("utf-8"))


class _Settings:
    """Flag > config-file > default resolution for one subcommand."""

    def __init__(self, args: argparse.Namespace):
        self._args = args
        self._config = _load_config(getattr(args, "config", None))

    def get(self, name: str):
        value = getattr(self._args, name, None)
        if value is not None:
            return value
        if name in self._config:
            return self._config[name]
        return DEFAULTS.get(name)


def _fmt(value) -> str:
    return repr(float(value))


def _write_json(path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


# ---------------------------------------------------------------------------
# synth / fit
# ---------------------------------------------------------------------------


def cmd_synth(args: argparse.Namespace) -> int:
    cfg = _Settings(args)
    domain = GridDomain(
        start_km=float(cfg.get("start_km")),
        end_km=float(cfg.get("end_km")),
        spacing_km=float(cfg.get("spacing_km")),
    )
    kernel = MaternKernel(
        smoothness=float(cfg.get("smoothness")),
        range_km=float(cfg.get("range_km")),
        marginal_std=float(cfg.get("marginal_std")),
    )
    profile = cfg.get("profile")
    try:
        profile = float(profile)
    except (TypeError, ValueError):
        pass
    field = synthesize_field(
        domain,
        kernel,
        log_mean_profile=profile,
        time_ratio=float(cfg.get("time_ratio")),
        seed=cfg.get("seed"),
    )
    save_field(field, args.out)
    print(f"wrote synthetic field with {field.num_points} grid points to {args.out}")
    return 0


def cmd_fit(args: argparse.Namespace) -> int:
    cfg = _Settings(args)
    records = load_arrivals(args.arrivals)
    domain = GridDomain(
        start_km=float(cfg.get("start_km")),
        end_km=float(cfg.get("end_km")),
        spacing_km=float(cfg.get("spacing_km")),
    )
    field = estimate_field_from_arrivals(
        records,
        domain,
        bandwidth_km=float(cfg.get("bandwidth_km")),
        time_ratio=float(cfg.get("time_ratio")),
        variance_floor=float(cfg.get("variance_floor")),
    )
    save_field(field, args.out)
    print(
        f"smoothed {len(records)} arrivals into a field with "
        f"{field.num_points} grid points at {args.out}"
    )
    return 0


# ---------------------------------------------------------------------------
# plan
# ---------------------------------------------------------------------------


def cmd_plan(args: argparse.Namespace) -> int:
    cfg = _Settings(args)
    field = load_field(args.field)
    model = SensorModel(rho=float(cfg.get("rho")), sigma_l=float(cfg.get("sigma_l")))
    spacing = cfg.get("candidate_spacing_km")
    candidates = CandidateSet.from_grid(
        field.domain, None if spacing is None else float(spacing)
    )
    sensors = int(cfg.get("sensors"))
    surrogate = cfg.get("surrogate")
    mc_samples = 0 if args.no_mc else int(cfg.get("mc_samples"))
    mc_mode = cfg.get("mc_mode")
    seed = cfg.get("seed")

    trace = greedy_place(
        field,
        model,
        candidates,
        sensors,
        surrogate=surrogate,
        mc_samples=mc_samples,
        mc_mode=mc_mode,
        mc_seed=seed,
    )

    steps = np.arange(1, sensors + 1)
    curves = {
        "n": steps.tolist(),
        "mu_x": trace.mu_curve.tolist(),
        "sigma2_x": trace.sigma2_curve.tolist(),
        "jensen": trace.jensen_curve.tolist(),
        "corrected": trace.corrected_curve.tolist(),
        "mc": trace.mc_curve.tolist() if trace.has_mc else None,
        "mc_se": trace.mc_se_curve.tolist() if trace.has_mc else None,
        "mc_mu_x": trace.mc_mu_curve.tolist() if trace.has_mc else None,
        "mc_sigma2_x": trace.mc_sigma2_curve.tolist() if trace.has_mc else None,
        "gap_jensen": trace.gap_jensen_curve.tolist() if trace.has_mc else None,
        "gap_corrected": trace.gap_corrected_curve.tolist() if trace.has_mc else None,
    }
    report = {
        "config": {
            "field": str(args.field),
            "rho": model.rho,
            "sigma_l": model.sigma_l,
            "sensors": sensors,
            "surrogate": surrogate,
            "candidate_spacing_km": spacing,
            "candidates": len(candidates),
            "mc_samples": mc_samples,
            "mc_mode": mc_mode,
            "seed": seed,
        },
        "field_points": field.num_points,
        "chosen_positions_km": trace.chosen.tolist(),
        "curves": curves,
    }
    _write_json(args.out, report)

    if args.curves is not None:
        with open(args.curves, "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(
                ["n", "jensen", "corrected", "mc", "mc_se", "gap_jensen", "gap_corrected"]
            )
            for k in range(sensors):
                if trace.has_mc:
                    mc_cols = [
                        _fmt(trace.mc_curve[k]),
                        _fmt(trace.mc_se_curve[k]),
                        _fmt(trace.gap_jensen_curve[k]),
                        _fmt(trace.gap_corrected_curve[k]),
                    ]
                else:
                    mc_cols = ["", "", "", ""]
                writer.writerow(
                    [k + 1, _fmt(trace.jensen_curve[k]), _fmt(trace.corrected_curve[k])]
                    + mc_cols
                )

    last = f", mc {trace.mc_curve[-1]:.4f} +/- {trace.mc_se_curve[-1]:.4f}" if trace.has_mc else ""
    print(
        f"placed {sensors} sensors ({surrogate}); final jensen "
        f"{trace.jensen_curve[-1]:.4f}, corrected {trace.corrected_curve[-1]:.4f}{last}"
    )
    print(f"report: {args.out}" + (f", curves: {args.curves}" if args.curves else ""))
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _fd_tail_derivative(mu: np.ndarray) -> np.ndarray:
    """Centered finite difference of the tail margin with a relative step.

    Differencing the complement for mu > 1 avoids the cancellation of two
    values saturating at 1.
    """
    h = 1e-5 * mu
    fd = np.empty_like(mu)
    small = mu <= 1.0
    fd[small] = (tail_margin(mu[small] + h[small]) - tail_margin(mu[small] - h[small])) / (
        2.0 * h[small]
    )
    big = ~small
    fd[big] = (
        tail_margin_complement(mu[big] - h[big]) - tail_margin_complement(mu[big] + h[big])
    ) / (2.0 * h[big])
    return fd


def cmd_verify(args: argparse.Namespace) -> int:
    cfg = _Settings(args)
    pairs = int(cfg.get("pairs"))
    points = int(cfg.get("points"))
    seed = cfg.get("seed")
    rng = np.random.default_rng(seed)

    checks: list[tuple[str, bool, str]] = []

    # Dominance margins on random moment pairs; (1 - random()) keeps the
    # draws strictly positive.
    mu = 50.0 * (1.0 - rng.random(pairs))
    sigma2 = 100.0 * (1.0 - rng.random(pairs))
    report = dominance_check(mu, sigma2)
    checks.append(
        (
            "dominance margins positive",
            bool(report.both_ok.all()),
            f"{pairs} pairs, worst upper {report.upper_margin.min():.3e}, "
            f"worst lower {report.lower_margin.min():.3e}",
        )
    )

    # Bound identity: J_up - |corrected lower| == corrected upper, to
    # 1e-12 relative with a one-ulp absolute floor for the subtraction.
    j_up = jensen_gap_upper(mu, sigma2)
    c_low, c_up = corrected_gap_bounds(mu, sigma2)
    deviation = np.abs((j_up - np.abs(c_low)) - c_up)
    allowance = 1e-12 * c_up + 4e-16 * j_up
    worst = float((deviation - allowance).max())
    checks.append(
        (
            "bound identity",
            bool((deviation <= allowance).all()),
            f"max deviation-allowance {worst:.3e}",
        )
    )

    # Tail margin: positivity, strict monotonicity, and the derivative
    # against centered finite differences.  Strictness is checked on the
    # tail for mu <= 1 and on the complement above (each saturates at 1.0
    # in float64 at the opposite end of the range).
    mus = np.geomspace(1e-8, 50.0, points)
    tm = tail_margin(mus)
    comp = tail_margin_complement(mus)
    lo = mus <= 1.0
    monotone = bool(
        (tm > 0).all()
        and (np.diff(tm[lo]) > 0).all()
        and (np.diff(comp[~lo]) < 0).all()
        and tm[lo.sum()] > tm[lo.sum() - 1]
    )
    checks.append(
        ("tail margin positive and strictly increasing", monotone, f"{points} points")
    )
    fd = _fd_tail_derivative(mus)
    rel = np.abs(fd - tail_margin_derivative(mus)) / tail_margin_derivative(mus)
    checks.append(
        (
            "tail margin derivative vs finite differences",
            bool((rel <= 1e-7).all()),
            f"max relative deviation {rel.max():.3e}",
        )
    )

    # The remainder ratio behind the gap bounds must be non-increasing.
    ratio_ok = True
    worst_step = 0.0
    for m in (0.1, 1.0, 5.0, 10.0):
        x = np.linspace(0.0, 10.0 * m, 4001)
        r = taylor_remainder_ratio(x, m)
        steps = np.diff(r)
        worst_step = max(worst_step, float(steps.max()))
        ratio_ok = ratio_ok and bool((steps <= 1e-12 * r[0]).all())
    checks.append(
        ("remainder ratio non-increasing", ratio_ok, f"largest upward step {worst_step:.3e}")
    )

    failed = False
    for name, ok, detail in checks:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        failed = failed or not ok

    if args.report is not None:
        _write_json(
            args.report,
            {
                "pairs": pairs,
                "points": points,
                "seed": seed,
                "checks": [
                    {"name": name, "ok": ok, "detail": detail}
                    for name, ok, detail in checks
                ],
            },
        )
    return 2 if failed else 0


# ---------------------------------------------------------------------------
# gap-summary
# ---------------------------------------------------------------------------


def cmd_gap_summary(args: argparse.Namespace) -> int:
    with open(args.report, "r", encoding="utf-8") as handle:
        report = json.load(handle)
    curves = report.get("curves", {})
    gap_jensen = curves.get("gap_jensen")
    gap_corrected = curves.get("gap_corrected")
    if gap_jensen is None or gap_corrected is None:
        raise ValueError(
            "plan report has no Monte-Carlo gap curves; rerun plan without --no-mc"
        )
    mean_jensen = float(np.mean(np.abs(gap_jensen)))
    mean_corrected = float(np.mean(np.abs(gap_corrected)))
    reduction = (
        100.0 * (1.0 - mean_corrected / mean_jensen) if mean_jensen > 0 else 0.0
    )
    summary = {
        "mean_abs_gap_jensen": mean_jensen,
        "mean_abs_gap_corrected": mean_corrected,
        "reduction_percent": reduction,
    }
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="voidplan", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON or TOML file with option defaults")
        p.add_argument("--seed", type=int, help="RNG seed")

    synth = sub.add_parser("synth", help="write a synthetic intensity field")
    add_common(synth)
    synth.add_argument("--out", required=True, help="output field JSON path")
    synth.add_argument("--start-km", type=float, dest="start_km")
    synth.add_argument("--end-km", type=float, dest="end_km")
    synth.add_argument("--spacing-km", type=float, dest="spacing_km")
    synth.add_argument("--smoothness", type=float)
    synth.add_argument("--range-km", type=float, dest="range_km")
    synth.add_argument("--marginal-std", type=float, dest="marginal_std")
    synth.add_argument(
        "--profile",
        help="'trimodal', 'random', or a constant log-mean value",
    )
    synth.add_argument("--time-ratio", type=float, dest="time_ratio")
    synth.set_defaults(func=cmd_synth)

    fit = sub.add_parser("fit", help="smooth an arrivals CSV into a field")
    add_common(fit)
    fit.add_argument("arrivals", help="CSV with a position_km column")
    fit.add_argument("--out", required=True, help="output field JSON path")
    fit.add_argument("--start-km", type=float, dest="start_km")
    fit.add_argument("--end-km", type=float, dest="end_km")
    fit.add_argument("--spacing-km", type=float, dest="spacing_km")
    fit.add_argument("--bandwidth-km", type=float, dest="bandwidth_km")
    fit.add_argument("--variance-floor", type=float, dest="variance_floor")
    fit.add_argument("--time-ratio", type=float, dest="time_ratio")
    fit.set_defaults(func=cmd_fit)

    plan = sub.add_parser("plan", help="greedy sensor placement on a field")
    add_common(plan)
    plan.add_argument("field", help="field JSON path")
    plan.add_argument("--out", required=True, help="output report JSON path")
    plan.add_argument("--curves", help="optional output curves CSV path")
    plan.add_argument("--sensors", type=int)
    plan.add_argument("--surrogate", choices=["jensen", "variance_corrected"])
    plan.add_argument(
        "--candidate-spacing-km", type=float, dest="candidate_spacing_km"
    )
    plan.add_argument("--rho", type=float)
    plan.add_argument("--sigma-l", type=float, dest="sigma_l")
    plan.add_argument("--mc-samples", type=int, dest="mc_samples")
    plan.add_argument(
        "--mc-mode", choices=["correlated", "independent", "degenerate"], dest="mc_mode"
    )
    plan.add_argument(
        "--no-mc", action="store_true", help="skip the Monte-Carlo curves"
    )
    plan.set_defaults(func=cmd_plan)

    verify = sub.add_parser("verify", help="sweep the bound identities and margins")
    add_common(verify)
    verify.add_argument("--pairs", type=int, help="random moment pairs to sweep")
    verify.add_argument("--points", type=int, help="tail-margin grid size")
    verify.add_argument("--report", help="optional JSON report path")
    verify.set_defaults(func=cmd_verify)

    gap = sub.add_parser(
        "gap-summary", help="mean measured gaps of a plan report"
    )
    gap.add_argument("report", help="plan report JSON path")
    gap.set_defaults(func=cmd_gap_summary)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: ``claimfreq fit | gof | plot``.

Exit status is 0 only when every tariff in the input was analysed; failures
are listed in the report's ``errors`` field and on stderr.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .distributions import BetaParams
from .errors import ClaimFreqError
from .gof import DEFAULT_REPLICATES, MIN_REPLICATES, MODES, REESTIMATE
from .portfolio import (
    LOCALES,
    TariffAnalysisError,
    analyze_tariff,
    build_report,
    dumps_report,
    fit_tariff,
    gof_settings,
    parse_portfolio_csv,
    tariff_seed,
)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


@dataclass
class RunConfig:
    subcommand: str
    input: Path | None = None
    output: Path | None = None
    replicates: int = DEFAULT_REPLICATES
    seed: int = 0
    mode: str = REESTIMATE
    locale: str = "c"
    plot_kind: str = "density"
    resolution: int = 512
    workers: int = 1
    compare_modes: bool = False
    params: list[BetaParams] = field(default_factory=list)


def _int_at_least(minimum):
    def parse(text):
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
        if value < minimum:
            raise argparse.ArgumentTypeError(f"must be >= {minimum}, got {value}")
        return value

    return parse


def _seed(text):
    value = _int_at_least(0)(text)
    if value >= 2**64:
        raise argparse.ArgumentTypeError("seed must be below 2**64")
    return value


def _beta_params(text):
    try:
        a, b = (float(part) for part in text.split(","))
        return BetaParams(a, b)
    except (ValueError, ClaimFreqError):
        raise argparse.ArgumentTypeError(f"expected ALPHA,BETA with positive values, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="claimfreq",
        description="Fit Beta laws to annual claim-frequency proportions and test the fit.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", "-i", type=Path, help="portfolio CSV (year,tariff,contracts,affected)")
    common.add_argument("--output", "-o", type=Path,
                        help="report file (fit, gof; default stdout) or output directory (plot; default .)")
    common.add_argument("--locale", choices=LOCALES, default="c",
                        help="'de' accepts 8.805-style thousands separators and uses decimal commas in figures")

    mc = argparse.ArgumentParser(add_help=False)
    mc.add_argument("--replicates", "-N", type=_int_at_least(MIN_REPLICATES), default=DEFAULT_REPLICATES,
                    help=f"Monte-Carlo replicates (>= {MIN_REPLICATES}, default {DEFAULT_REPLICATES})")
    mc.add_argument("--seed", type=_seed, default=0, help="64-bit RNG seed (default 0)")
    mc.add_argument("--mode", choices=MODES, default=REESTIMATE,
                    help="refit every simulated sample (re-estimate) or keep the original fit (fixed-params)")
    mc.add_argument("--compare-modes", action="store_true",
                    help="also run the other mode and report its p-value under 'alternative'")
    mc.add_argument("--workers", type=_int_at_least(1), default=1,
                    help="threads for the replicate loop; results do not depend on it")

    sub.add_parser("fit", parents=[common], help="moment fit and Q-Q statistic per tariff")
    sub.add_parser("gof", parents=[common, mc], help="fit plus Monte-Carlo goodness-of-fit test")
    plot = sub.add_parser("plot", parents=[common, mc], help="write SVG figures and CSV series")
    plot.add_argument("kind", choices=("density", "qq"), help="fitted densities or per-tariff Q-Q plots")
    plot.add_argument("--resolution", type=_int_at_least(16), default=512,
                      help="grid points for density curves (default 512)")
    plot.add_argument("--params", type=_beta_params, action="append", default=[], metavar="ALPHA,BETA",
                      help="plot these Beta densities instead of fitted ones (repeatable)")
    return parser


def _config(ns) -> RunConfig:
    return RunConfig(
        subcommand=ns.subcommand,
        input=ns.input,
        output=ns.output,
        replicates=getattr(ns, "replicates", DEFAULT_REPLICATES),
        seed=getattr(ns, "seed", 0),
        mode=getattr(ns, "mode", REESTIMATE),
        locale=ns.locale,
        plot_kind=getattr(ns, "kind", "density"),
        resolution=getattr(ns, "resolution", 512),
        workers=getattr(ns, "workers", 1),
        compare_modes=getattr(ns, "compare_modes", False),
        params=getattr(ns, "params", []),
    )


def _load(config: RunConfig):
    if config.input is None:
        raise ClaimFreqError("--input is required")
    try:
        text = config.input.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ClaimFreqError(f"{config.input}: no such file") from None
    except OSError as exc:
        raise ClaimFreqError(f"{config.input}: {exc.strerror or exc}") from None
    return parse_portfolio_csv(text, locale=config.locale)


def _emit(text: str, path: Path | None):
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text, encoding="utf-8")


def _run_tariffs(config: RunConfig, histories, full: bool):
    reports, errors = [], []
    for index, h in enumerate(histories):
        try:
            if full:
                reports.append(analyze_tariff(
                    h, config.replicates, tariff_seed(config.seed, index), mode=config.mode,
                    compare_modes=config.compare_modes, workers=config.workers,
                ))
            else:
                reports.append(fit_tariff(h))
        except TariffAnalysisError as exc:
            errors.append(exc)
            print(f"claimfreq: {exc}", file=sys.stderr)
    return reports, errors


def cmd_fit(config: RunConfig) -> int:
    reports, errors = _run_tariffs(config, _load(config), full=False)
    _emit(dumps_report(build_report("fit", reports, errors)), config.output)
    return EXIT_FAILURE if errors else EXIT_OK


def cmd_gof(config: RunConfig) -> int:
    reports, errors = _run_tariffs(config, _load(config), full=True)
    settings = gof_settings(config.replicates, config.seed, config.mode)
    _emit(dumps_report(build_report("gof", reports, errors, settings)), config.output)
    return EXIT_FAILURE if errors else EXIT_OK


def cmd_plot(config: RunConfig) -> int:
    from . import plotting

    outdir = config.output or Path(".")
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    errors = []
    if config.plot_kind == "density":
        if config.params:
            labelled = [(f"alpha={p.alpha:g}, beta={p.beta:g}", p) for p in config.params]
            title = "Beta densities"
        else:
            reports, errors = _run_tariffs(config, _load(config), full=False)
            labelled = [(f"tariff {r.tariff_id}", r.params) for r in reports]
            title = "Fitted Beta densities"
        if labelled:
            series = plotting.density_series(labelled, config.resolution)
            (outdir / "density.csv").write_text(plotting.write_density_csv(series), encoding="utf-8")
            (outdir / "density.svg").write_text(plotting.render_density(series, title), encoding="utf-8")
            written += ["density.svg", "density.csv"]
    else:
        reports, errors = _run_tariffs(config, _load(config), full=True)
        for r in reports:
            if r.qq is None:
                continue
            series = plotting.QQSeries(r.tariff_id, r.qq.quantiles, r.qq.sorted_obs,
                                       None if r.qq.perfect_fit else r.qq.tn, r.mc.p_value)
            stem = f"qq_{_safe(r.tariff_id)}"
            (outdir / f"{stem}.csv").write_text(plotting.write_qq_csv(series), encoding="utf-8")
            (outdir / f"{stem}.svg").write_text(plotting.render_qq(series, config.locale), encoding="utf-8")
            written += [f"{stem}.svg", f"{stem}.csv"]
    for name in written:
        print(outdir / name)
    return EXIT_FAILURE if errors else EXIT_OK


def _safe(label: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "-_" else "_" for ch in label)


COMMANDS = {"fit": cmd_fit, "gof": cmd_gof, "plot": cmd_plot}


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    config = _config(ns)
    if config.subcommand != "plot" or not config.params:
        if config.input is None:
            parser.error("--input is required")
    try:
        return COMMANDS[config.subcommand](config)
    except ClaimFreqError as exc:
        print(f"claimfreq: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())

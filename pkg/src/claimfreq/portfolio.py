"""Portfolio ingestion, per-tariff analysis and the JSON report document.

Input files are UTF-8 CSV with the header ``year,tariff,contracts,affected``.
With ``locale="de"`` integers may carry dot thousands separators (``8.805``),
which is how such tables are usually printed in German.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal, localcontext
from typing import Any, Sequence

from . import __version__
from .distributions import BetaParams
from .errors import ClaimFreqError, InputError, ParseError
from .estimation import PortfolioYear, ProportionSample, empirical_proportions, fit_beta_mom
from .gof import (
    FIXED_PARAMS,
    REESTIMATE,
    McTestResult,
    QQResult,
    compute_tn,
    mc_test,
)
from .rng import ALGORITHM, RngSeed

COLUMNS = ("year", "tariff", "contracts", "affected")
LOCALES = ("c", "de")
REPORT_SCHEMA = "claimfreq.report/1"

_PLAIN_INT = re.compile(r"^[0-9]+$")
_DE_INT = re.compile(r"^[0-9]{1,3}(?:\.[0-9]{3})+$")


class TariffAnalysisError(ClaimFreqError):
    def __init__(self, tariff_id: str, cause: Exception):
        super().__init__(f"tariff {tariff_id}: {cause}")
        self.tariff_id = tariff_id
        self.cause = cause


@dataclass(frozen=True)
class TariffHistory:
    tariff_id: str
    years: tuple[PortfolioYear, ...]

    def __post_init__(self):
        if not self.years:
            raise InputError(f"tariff {self.tariff_id} has no years")
        labels = [y.year for y in self.years]
        if len(set(labels)) != len(labels):
            raise InputError(f"tariff {self.tariff_id} repeats a year label")


def _parse_int(text: str, locale: str, column: str, line: int) -> int:
    text = text.strip()
    if _PLAIN_INT.match(text):
        return int(text)
    if locale == "de" and _DE_INT.match(text):
        return int(text.replace(".", ""))
    raise ParseError(f"{column} must be a non-negative integer, got {text!r}", line)


def parse_portfolio_csv(text: str | io.TextIOBase, locale: str = "c") -> list[TariffHistory]:
    """One :class:`TariffHistory` per tariff, in order of first appearance."""
    if locale not in LOCALES:
        raise InputError(f"locale must be one of {LOCALES}, got {locale!r}")
    stream = io.StringIO(text) if isinstance(text, str) else text
    reader = csv.reader(stream)
    header = None
    for row in reader:
        if row and any(cell.strip() for cell in row):
            header = [cell.strip().lower() for cell in row]
            break
    if header is None:
        return []
    if sorted(header) != sorted(COLUMNS) or len(header) != len(COLUMNS):
        raise ParseError(f"header must contain exactly {','.join(COLUMNS)}", reader.line_num)
    pos = {name: header.index(name) for name in COLUMNS}

    grouped: dict[str, list[PortfolioYear]] = {}
    seen: set[tuple[str, str]] = set()
    for row in reader:
        line = reader.line_num
        if not row or not any(cell.strip() for cell in row):
            continue
        if len(row) != len(COLUMNS):
            raise ParseError(f"expected {len(COLUMNS)} fields, got {len(row)}", line)
        year = row[pos["year"]].strip()
        tariff = row[pos["tariff"]].strip()
        if not year or not tariff:
            raise ParseError("year and tariff must be non-empty", line)
        contracts = _parse_int(row[pos["contracts"]], locale, "contracts", line)
        affected = _parse_int(row[pos["affected"]], locale, "affected", line)
        if (tariff, year) in seen:
            raise ParseError(f"duplicate row for tariff {tariff!r}, year {year!r}", line)
        seen.add((tariff, year))
        try:
            grouped.setdefault(tariff, []).append(PortfolioYear(year, contracts, affected))
        except InputError as exc:
            raise ParseError(str(exc), line) from None
    return [TariffHistory(t, tuple(rows)) for t, rows in grouped.items()]


def serialize_portfolio_csv(histories: Sequence[TariffHistory]) -> str:
    """Canonical CSV: fixed column order, plain integers, tariff-major rows."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(COLUMNS)
    for h in histories:
        for y in h.years:
            writer.writerow((y.year, h.tariff_id, y.contracts, y.affected))
    return out.getvalue()


def round_half_up(value: float | Decimal, places: int) -> Decimal:
    """Round the exact binary value of ``value`` half-up to ``places`` decimals."""
    with localcontext() as ctx:
        ctx.prec = 200
        return Decimal(value).quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_UP)


def percent(value: float, places: int = 2) -> str:
    """``value`` on the percent scale, half-up rounded, as a fixed-point string."""
    with localcontext() as ctx:
        ctx.prec = 200
        return str(round_half_up(Decimal(value) * 100, places))


@dataclass(frozen=True)
class TariffReport:
    history: TariffHistory
    sample: ProportionSample
    params: BetaParams
    qq: QQResult | None = None
    mc: McTestResult | None = None
    mc_alternative: McTestResult | None = None

    @property
    def tariff_id(self) -> str:
        return self.history.tariff_id

    @property
    def display_row(self) -> dict[str, Any]:
        """Table-style display values derived from the full-precision fields."""
        return {
            "proportions_pct": [percent(p) for p in self.sample.proportions],
            "mean_pct": percent(self.sample.mean),
            "sd_pct": percent(self.sample.sd),
            "alpha": int(round_half_up(self.params.alpha, 0)),
            "beta": int(round_half_up(self.params.beta, 0)),
        }

    def to_dict(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "tariff": self.tariff_id,
            "inputs": [
                {"year": y.year, "contracts": y.contracts, "affected": y.affected}
                for y in self.history.years
            ],
            "n": self.sample.n,
            "proportions": list(self.sample.proportions),
            "mean": self.sample.mean,
            "sd": self.sample.sd,
            "alpha": self.params.alpha,
            "beta": self.params.beta,
            "display": self.display_row,
        }
        if self.qq is not None:
            doc["rho"] = self.qq.rho
            doc["tn"] = None if self.qq.perfect_fit else self.qq.tn
            doc["perfect_fit"] = self.qq.perfect_fit
            doc["quantiles"] = list(map(float, self.qq.quantiles))
        if self.mc is not None:
            doc.update(_mc_fields(self.mc))
        if self.mc_alternative is not None:
            doc["alternative"] = _mc_fields(self.mc_alternative)
        return doc


def _mc_fields(mc: McTestResult) -> dict[str, Any]:
    return {
        "mode": mc.mode,
        "p_value": mc.p_value,
        "replicates": mc.replicates,
        "seed": mc.seed.seed,
        "stream": mc.seed.stream,
        "redraws": mc.redraws,
        "tn_simulated": dict(zip(("min", "q1", "median", "q3", "max"), _finite(mc.summary))),
    }


def _finite(values):
    return [v if math.isfinite(v) else None for v in values]


def fit_tariff(h: TariffHistory) -> TariffReport:
    """Proportions, moment fit and (for n >= 3) the Q-Q statistic; no simulation."""
    try:
        sample = empirical_proportions(h.years)
        params = fit_beta_mom(sample)
        qq = compute_tn(sample, params) if sample.n >= 3 else None
    except ClaimFreqError as exc:
        raise TariffAnalysisError(h.tariff_id, exc) from exc
    return TariffReport(h, sample, params, qq)


def analyze_tariff(
    h: TariffHistory,
    replicates: int,
    seed: RngSeed,
    mode: str = REESTIMATE,
    compare_modes: bool = False,
    workers: int = 1,
) -> TariffReport:
    """Full pipeline for one tariff: fit, Q-Q statistic and Monte-Carlo test."""
    base = fit_tariff(h)
    try:
        mc = mc_test(base.sample, replicates, seed, mode=mode, workers=workers)
        alt = None
        if compare_modes:
            other = FIXED_PARAMS if mode == REESTIMATE else REESTIMATE
            alt = mc_test(base.sample, replicates, seed, mode=other, workers=workers)
    except ClaimFreqError as exc:
        raise TariffAnalysisError(h.tariff_id, exc) from exc
    return TariffReport(h, base.sample, base.params, base.qq, mc, alt)


def tariff_seed(seed: int, index: int) -> RngSeed:
    """RNG stream for the ``index``-th tariff (file order) of a run."""
    return RngSeed(seed, index)


def build_report(
    command: str,
    reports: Sequence[TariffReport],
    errors: Sequence[TariffAnalysisError] = (),
    settings: dict[str, Any] | None = None,
) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "schema": REPORT_SCHEMA,
        "version": __version__,
        "command": command,
    }
    if settings:
        doc["settings"] = settings
    doc["tariffs"] = [r.to_dict() for r in reports]
    doc["errors"] = [{"tariff": e.tariff_id, "message": str(e.cause)} for e in errors]
    return doc


def gof_settings(replicates: int, seed: int, mode: str) -> dict[str, Any]:
    return {
        "replicates": replicates,
        "seed": seed,
        "mode": mode,
        "rng": ALGORITHM,
        "statistic": "T_n = -ln(1 - rho_n), rho_n = corr(sorted p_hat, Beta quantiles at k/(n+1))",
        "p_value_rule": "(1 + #{r: T_r <= T_obs}) / (N + 1); lower tail rejects, large p = acceptable fit",
    }


def dumps_report(doc: dict[str, Any]) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"

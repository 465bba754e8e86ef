"""Trial records, summaries, and their JSONL/CSV serialization.

A record is replayable from (seed, trial index); timing is opt-in so that
fixed-seed runs serialize to byte-identical files.  The JSONL stream is one
object per trial followed by one summary object; the CSV export flattens the
same fields into a single wide schema (see README for the column order).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from scipy.stats import beta

from .errors import ParameterError

CSV_FIELDS = (
    "record",
    "trial",
    "seed",
    "mode",
    "outcome",
    "witness",
    "nanos",
    "trials",
    "failures",
    "freq",
    "ci_lo",
    "ci_hi",
    "bound",
    "vacuous",
)


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    seed: int
    mode: str
    outcome: str
    witness: dict | None
    nanos: int

    def to_json_dict(self) -> dict:
        return {
            "trial": self.trial,
            "seed": self.seed,
            "mode": self.mode,
            "outcome": self.outcome,
            "witness": self.witness,
            "nanos": self.nanos,
        }


@dataclass(frozen=True)
class Summary:
    trials: int
    failures: int
    freq: float
    ci95: tuple[float, float]
    bound: float
    vacuous: bool

    def to_json_dict(self) -> dict:
        return {
            "trials": self.trials,
            "failures": self.failures,
            "freq": self.freq,
            "ci95": [self.ci95[0], self.ci95[1]],
            "bound": self.bound,
            "vacuous": self.vacuous,
        }


def clopper_pearson(failures: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Exact binomial confidence interval for a failure count."""
    if trials < 1:
        raise ParameterError(f"need at least one trial, got {trials}")
    if not 0 <= failures <= trials:
        raise ParameterError(f"failures {failures} outside [0, {trials}]")
    tail = (1.0 - confidence) / 2.0
    lo = 0.0 if failures == 0 else float(beta.ppf(tail, failures, trials - failures + 1))
    hi = 1.0 if failures == trials else float(beta.ppf(1.0 - tail, failures + 1, trials - failures))
    return lo, hi


def make_summary(trials: int, failures: int, bound: float, vacuous: bool) -> Summary:
    lo, hi = clopper_pearson(failures, trials)
    return Summary(
        trials=trials,
        failures=failures,
        freq=failures / trials,
        ci95=(lo, hi),
        bound=bound,
        vacuous=vacuous,
    )


def jsonl_lines(records: Iterable[TrialRecord], summary: Summary) -> list[str]:
    lines = [json.dumps(r.to_json_dict(), separators=(",", ":")) for r in records]
    lines.append(json.dumps(summary.to_json_dict(), separators=(",", ":")))
    return lines


def write_jsonl(records: Sequence[TrialRecord], summary: Summary, fp) -> None:
    for line in jsonl_lines(records, summary):
        fp.write(line)
        fp.write("\n")


def write_csv(records: Sequence[TrialRecord], summary: Summary, fp) -> None:
    writer = csv.writer(fp, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for r in records:
        writer.writerow(
            [
                "trial",
                r.trial,
                r.seed,
                r.mode,
                r.outcome,
                "" if r.witness is None else json.dumps(r.witness, separators=(",", ":")),
                r.nanos,
                "",
                "",
                "",
                "",
                "",
                "",
                "",
            ]
        )
    writer.writerow(
        [
            "summary",
            "",
            "",
            "",
            "",
            "",
            "",
            summary.trials,
            summary.failures,
            summary.freq,
            summary.ci95[0],
            summary.ci95[1],
            summary.bound,
            summary.vacuous,
        ]
    )


def serialize(records: Sequence[TrialRecord], summary: Summary, fmt: str) -> str:
    """Render a whole run to a string in the requested format."""
    if fmt == "jsonl":
        return "\n".join(jsonl_lines(records, summary)) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        write_csv(records, summary, buf)
        return buf.getvalue()
    raise ParameterError(f"unknown format {fmt!r}; expected jsonl or csv")

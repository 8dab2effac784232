"""Rendering suite reports as JSON or plain text."""

from __future__ import annotations

import json
from importlib import resources


def load_schema() -> dict:
    text = resources.files("wittkit").joinpath("schemas/report.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def to_json(report: dict) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


def validate_report(report: dict) -> None:
    """Raise jsonschema.ValidationError if the report breaks the schema."""
    import jsonschema

    jsonschema.validate(report, load_schema())


def strip_timing(report: dict) -> dict:
    return {k: v for k, v in report.items() if k != "timing"}


def to_text(report: dict) -> str:
    w = report["window"]
    s = report["summary"]
    lines = [
        f"suite {report['suite']}: {report['status']}",
        f"window gamma={w['gamma']} level={w['level']} margin={w['margin']}  "
        f"seed={report['seed']} trials={report['trials']}",
    ]
    if report["modules"]:
        lines.append("modules: " + ", ".join(report["modules"]))
    for c in report["checks"]:
        lines.append(f"[{c['status'].upper()}] {c['key']}: {c['name']}")
        lines.append(f"    expected {c['expected']}; observed {c['observed']}")
        lines.extend(f"    {d}" for d in c["details"])
        if c["counterexample"]:
            lines.append("    counterexample:")
            for k, v in c["counterexample"].items():
                if isinstance(v, list):
                    lines.append(f"      {k}:")
                    lines.extend(f"        {x}" for x in v)
                else:
                    lines.append(f"      {k}: {v}")
    lines.append(f"{s['passed']} passed, {s['failed']} failed, {s['skipped']} skipped "
                 f"of {s['checks']} checks in {report['timing']['seconds']} s")
    return "\n".join(lines) + "\n"

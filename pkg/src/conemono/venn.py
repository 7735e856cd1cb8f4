"""Gallery x definition signature table, checked against the expected table."""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from importlib import resources

from .classify import (
    ClassifyParams,
    check_cone_monotone,
    check_k_any,
    check_k_monotone,
    check_lebesgue,
    check_mostow,
    check_normal,
    check_vg,
    check_weak,
    cone_feasibility,
    subdomain_family,
)
from .field import FieldError
from .gallery import gallery_generate
from .geometry import parse_cone

COLUMNS = ("lebesgue", "mostow", "mostow_open", "vg", "weak", "cone", "k", "k_any", "normal")


def load_expected(path=None):
    if path is None:
        text = resources.files("conemono").joinpath("data/venn_expected.json").read_text(encoding="utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    try:
        table = json.loads(text)
        rows = table["rows"]
        for row in rows:
            unknown = set(row["expect"]) - set(COLUMNS)
            if unknown:
                raise FieldError(f"{row['field']}: unknown columns {sorted(unknown)}")
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise FieldError(f"malformed expected table: {exc}") from exc
    return table


def signature(field, params, k_cone):
    """All columns for one field; ``k`` uses ``k_cone``, ``k_any`` the cone family."""
    family = subdomain_family(field, params)
    feas = cone_feasibility(field, params)
    verdicts = {
        "lebesgue": check_lebesgue(field, params),
        "mostow": check_mostow(field, params, True, family),
        "mostow_open": check_mostow(field, params, False, family),
        "vg": check_vg(field, params),
        "weak": check_weak(field, params, family),
        "cone": check_cone_monotone(field, params, feas),
        "k": check_k_monotone(field, k_cone, params),
        "k_any": check_k_any(field, params, feas),
        "normal": check_normal(field, params),
    }
    return {c: bool(verdicts[c].holds) for c in COLUMNS}


def _run_row(job):
    row, nx, params = job
    field = gallery_generate(row["field"], nx=nx, **row.get("field_params", {}))
    p = replace(params, **row.get("params", {}))
    sig = signature(field, p, parse_cone(row.get("k_cone", "0:90")))
    expect = row["expect"]
    mismatches = sorted(c for c, v in expect.items() if sig[c] != bool(v))
    return {
        "field": row["field"],
        "k_cone": row.get("k_cone", "0:90"),
        "signature": sig,
        "expected": dict(sorted(expect.items())),
        "mismatches": mismatches,
    }


def run_venn(nx=65, seed=42, jobs=1, params=None, expected=None):
    """Run every row of the expected table; rows come back in table order."""
    table = expected if expected is not None else load_expected()
    params = replace(params or ClassifyParams(), seed=seed)
    work = [(row, nx, params) for row in table["rows"]]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_run_row, work))
    else:
        rows = [_run_row(w) for w in work]
    n_bad = sum(len(r["mismatches"]) for r in rows)
    report = {
        "nx": nx,
        "seed": seed,
        "columns": list(COLUMNS),
        "rows": rows,
        "mismatch_count": n_bad,
        "all_match": n_bad == 0,
        "params": params.to_dict(),
    }
    return report


def format_table(report):
    """Plain-text signature table, one row per field."""
    cols = report["columns"]
    width = max(len(r["field"]) for r in report["rows"])
    head = f"{'field':<{width}}  " + " ".join(f"{c:>11}" for c in cols)
    lines = [head]
    for r in report["rows"]:
        cells = []
        for c in cols:
            mark = "T" if r["signature"][c] else "F"
            if c in r["expected"]:
                mark += "" if c not in r["mismatches"] else "!"
                mark = f"[{mark}]"
            cells.append(f"{mark:>11}")
        lines.append(f"{r['field']:<{width}}  " + " ".join(cells))
    lines.append(f"mismatches: {report['mismatch_count']}  ([x] = expected entry, ! = mismatch)")
    return "\n".join(lines)

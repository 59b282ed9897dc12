"""End-to-end regeneration of the reference tables: sizing columns plus
seeded Monte Carlo coverage/power columns, emitted as CSV and aligned
Markdown.

Loop layout mirrors the published generators: the normal table iterates
widths 1/2^r, the poisson table rates 0.005*2^r with widths at 20% and
10% of the rate, the binomial table proportions 1/2^r with widths 0.1
and 0.05 — each crossed with alpha in {0.05, 0.1} and the width
probability target in {0.8, 0.9}.  The printed reference tables for the
poisson and binomial families show only the alpha = 0.05 stratum; the
generators here emit both strata and downstream comparisons filter.

Sizing columns are deterministic.  Simulation columns depend only on the
master seed: each row derives independent sub-seeds via
``derive_seed(seed, table_id, row_index, which_column)``, so re-running
with the same seed reproduces output files byte for byte.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

from .simulate import SimConfig, derive_seed, simulate
from .sizing import (
    DesignSpec,
    n_exact_binomial,
    n_exact_normal,
    n_exact_poisson,
    n_expected_binomial,
    n_expected_normal,
    n_expected_poisson,
)

__all__ = ["TableRow", "table_normal", "table_poisson", "table_binomial",
           "generate_table", "rows_to_csv", "rows_to_markdown", "write_table_files"]

_ALPHAS = (0.05, 0.1)
_POWER_TARGETS = (0.8, 0.9)


@dataclass(frozen=True)
class TableRow:
    """One table line: design, sizes, and simulated coverage/power at
    both sizes."""

    family: str
    param: float
    width0: float
    conf_level: float
    power_target: float
    n_expected: int
    cov_expected: float
    pow_expected: float
    n_exact: int
    cov_exact: float
    pow_exact: float


def _simulated_cells(family: str, param: float, width0: float, alpha: float,
                     psi0: float, n: int, nsim: int, seed: int) -> tuple[float, float]:
    spec = DesignSpec(family, param, alpha, psi0, width0)
    report = simulate(SimConfig(spec=spec, n=n, nsim=nsim, seed=seed))
    return report.coverage, report.power


def _rows(family, table_id, cell_params, n_expected_fn, n_exact_fn, nsim, seed):
    rows = []
    row_index = 0
    expected_cache: dict = {}
    for param, width0 in cell_params:
        for alpha in _ALPHAS:
            for psi0 in _POWER_TARGETS:
                key = (param, width0, alpha)
                if key not in expected_cache:
                    expected_cache[key] = n_expected_fn(param, width0, alpha)
                n_exp = expected_cache[key]
                n_exa = n_exact_fn(param, width0, alpha, psi0)
                cov_e, pow_e = _simulated_cells(
                    family, param, width0, alpha, psi0, n_exp, nsim,
                    derive_seed(seed, table_id, row_index, 0))
                cov_x, pow_x = _simulated_cells(
                    family, param, width0, alpha, psi0, n_exa, nsim,
                    derive_seed(seed, table_id, row_index, 1))
                rows.append(TableRow(
                    family=family, param=param, width0=width0,
                    conf_level=1.0 - alpha, power_target=psi0,
                    n_expected=n_exp, cov_expected=cov_e, pow_expected=pow_e,
                    n_exact=n_exa, cov_exact=cov_x, pow_exact=pow_x))
                row_index += 1
    return rows


def table_normal(depth: int = 4, nsim: int = 10_000, seed: int = 0) -> list[TableRow]:
    """Normal-family table: widths 1/2^r for r = 1..depth, sigma = 1."""
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    cells = [(1.0, 1.0 / 2 ** r) for r in range(1, depth + 1)]
    return _rows(
        "normal", 1, cells,
        lambda sigma, w, a: n_expected_normal(sigma, w, a),
        lambda sigma, w, a, b: n_exact_normal(sigma, w, a, b),
        nsim, seed)


def table_poisson(depth: int = 4, nsim: int = 10_000, seed: int = 0) -> list[TableRow]:
    """Poisson-family table: rates 0.005*2^r for r = 1..depth with widths
    0.2*rate and 0.1*rate."""
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    cells = []
    for r in range(1, depth + 1):
        rate = 0.005 * 2 ** r
        cells.extend([(rate, 0.2 * rate), (rate, 0.1 * rate)])
    return _rows(
        "poisson", 2, cells,
        lambda rate, w, a: n_expected_poisson(rate, w, a),
        lambda rate, w, a, b: n_exact_poisson(rate, w, a, b),
        nsim, seed)


def table_binomial(depth: int = 4, nsim: int = 10_000, seed: int = 0) -> list[TableRow]:
    """Binomial-family table: proportions 1/2^r for r = 1..depth with
    widths 0.1 and 0.05."""
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    cells = []
    for r in range(1, depth + 1):
        p0 = 1.0 / 2 ** r
        cells.extend([(p0, 0.1), (p0, 0.05)])
    return _rows(
        "binomial", 3, cells,
        lambda p0, w, a: n_expected_binomial(p0, w, a),
        lambda p0, w, a, b: n_exact_binomial(p0, w, a, b),
        nsim, seed)


_TABLES = {1: table_normal, 2: table_poisson, 3: table_binomial}


def generate_table(index: int, depth: int = 4, nsim: int = 10_000,
                   seed: int = 0) -> list[TableRow]:
    """Table 1 (normal), 2 (poisson), or 3 (binomial)."""
    if index not in _TABLES:
        raise ValueError(f"table index must be 1, 2, or 3, got {index}")
    return _TABLES[index](depth=depth, nsim=nsim, seed=seed)


# ---------------------------------------------------------------------------
# rendering

_FIELDS = [f.name for f in fields(TableRow)]
_PROB_FIELDS = {"conf_level", "power_target", "cov_expected", "pow_expected",
                "cov_exact", "pow_exact"}


def _format_cell(name: str, value) -> str:
    if name in _PROB_FIELDS:
        return f"{value:.4f}"
    if isinstance(value, float):
        return f"{value:g}"
    return str(value)


def rows_to_csv(rows: list[TableRow]) -> str:
    lines = [",".join(_FIELDS)]
    for row in rows:
        lines.append(",".join(_format_cell(n, getattr(row, n)) for n in _FIELDS))
    return "\n".join(lines) + "\n"


def rows_to_markdown(rows: list[TableRow]) -> str:
    cells = [[_format_cell(n, getattr(row, n)) for n in _FIELDS] for row in rows]
    widths = [max(len(name), *(len(c[i]) for c in cells)) if cells else len(name)
              for i, name in enumerate(_FIELDS)]

    def line(items):
        return "| " + " | ".join(s.rjust(w) for s, w in zip(items, widths)) + " |"

    out = [line(_FIELDS), "| " + " | ".join("-" * w for w in widths) + " |"]
    out.extend(line(c) for c in cells)
    return "\n".join(out) + "\n"


def write_table_files(rows: list[TableRow], base_path: str) -> list[str]:
    """Write ``<base_path>.csv`` and ``<base_path>.md``; returns the paths."""
    paths = []
    for suffix, renderer in ((".csv", rows_to_csv), (".md", rows_to_markdown)):
        path = base_path + suffix
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(renderer(rows))
        paths.append(path)
    return paths

"""Experiment drivers: delta scans, calibration, doubling tables, morphism
checks, divisor reports — plus the deterministic JSON/CSV writers.

Reports are reproducible byte for byte: same config + seed => same file.
That is why headers carry hashes instead of timestamps, floats are written
with their shortest round-trip repr, JSON keys are sorted, and every sampler
draws from one seeded SplitMix64 stream.

Two height conventions coexist and the header says which is which:

* delta scans compare *total* heights h_L = h_fiber + h_base, because the
  quadraticity defect is a statement about the full embedding;
* doubling tables track the *fiber* height alone — the base factor is
  constant along a fiber, so it would only shift every row by h(s).
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .. import __version__
from ..divisors import (FormRegistry, chart_polys, denominator_support,
                        is_effective, split_effective)
from ..elliptic import WeierstrassFamily, mul_n, total_height
from ..errors import ConfigError
from ..exact_arith import Rationals
from ..heights import (BlowUpPlane, base_element_height, fit_linear_height_bound,
                       log_of_fraction, multiprojective_height, segre,
                       verify_two_sided_bound, veronese, weil_height,
                       apply_morphism)
from ..neron_tate import (height_inequality_from_estimate, neron_tate,
                          telescoping_consistency)
from .config import ExperimentConfig
from .sampling import PRNG_ID, SplitMix64, sample_fiber, sample_proj_point

SCAN_SAFETY = 1.5   # calibration multiplies the empirical maximum by this
C_CAL_FLOOR = 1.0   # and never reports a constant below this

CONVENTIONS = {
    "heights_Q": "multiplicative H = max|x_i| on coprime integer "
                 "coordinates; log scale is ln H",
    "heights_Fq": "additive degree units h = max deg x_i on coprime "
                  "polynomial coordinates (multiples of log q)",
    "delta_scan": "delta(P) = |h_L([2]P) - 4 h_L(P)| on TOTAL heights "
                  "(fiber factor combined with the base factor)",
    "doubling_tables": "q_l = h([2^l]P)/4^l on FIBER heights only; the "
                       "base factor is constant along a fiber",
    "base_scale": "lambda = max(1, h(s)) in the same units as the heights",
    "calibration": "c_cal = max(SAFETY * empirical max ratio, floor); an "
                   "empirical constant, not a proven one",
    "prng": PRNG_ID,
    "sampling": "fibers drawn uniformly up to the height bound, singular "
                "fibers rejected; points are multiples [N] of the section",
}


def report_header(config: ExperimentConfig, kind: str) -> dict:
    return {
        "tool": {"name": "heightlab", "version": __version__},
        "kind": kind,
        "field": config.field_label,
        "seed": config.seed,
        "prng": PRNG_ID,
        "config_hash": config.config_hash(),
        "family_hash": config.family_hash(),
        "family": {
            "a": config.a_text,
            "b": config.b_text,
            "section_x": config.section_x_text,
            "section_y": config.section_y_text,
        },
        "conventions": CONVENTIONS,
    }


# ---------------------------------------------------------------------------
# delta scans and calibration
# ---------------------------------------------------------------------------


def _param_text(field, s) -> str:
    return str(s) if isinstance(field, Rationals) else s.to_text()


def _base_scale(field, s):
    lam = base_element_height(field, s)
    if isinstance(field, Rationals):
        return max(1.0, lam.log_value())
    return max(1, lam.value)


def fiber_deltas(family: WeierstrassFamily, s, n_max: int) -> list[dict]:
    """Quadraticity defects delta([N]P) for N = 1..n_max on the fiber at s.

    One addition chain reaches [2 n_max]P, so every (P_N, [2]P_N) pair is
    read off the same list of exact total heights.
    """
    base = family.section_at(s)
    chain = [base]
    while len(chain) < 2 * n_max:
        chain.append(chain[-1] + base)
    totals = [total_height(p).value for p in chain]
    field = family.field
    lam = _base_scale(field, s)
    rows = []
    for n in range(1, n_max + 1):
        h1, h2 = totals[n - 1], totals[2 * n - 1]
        if isinstance(field, Rationals):
            delta = abs(log_of_fraction(Fraction(h2, h1 ** 4)))
            ratio, ratio_exact = delta / lam, None
        else:
            delta = abs(h2 - 4 * h1)
            exact = Fraction(delta, lam)
            ratio, ratio_exact = float(exact), f"{exact.numerator}/{exact.denominator}"
        rows.append({
            "s": _param_text(field, s),
            "n": n,
            "base_scale": lam,
            "h_total": h1,
            "h_total_doubled": h2,
            "delta": delta,
            "ratio": ratio,
            "ratio_exact": ratio_exact,
        })
    return rows


def _distinct_fibers(rng: SplitMix64, family: WeierstrassFamily,
                     bound: int, count: int) -> list:
    fibers, seen = [], set()
    budget = 200 * count + 1000
    while len(fibers) < count:
        if budget <= 0:
            raise ConfigError(
                f"could not collect {count} distinct nonsingular fibers at "
                f"height bound {bound}")
        budget -= 1
        s = sample_fiber(rng, family, bound)
        if s not in seen:
            seen.add(s)
            fibers.append(s)
    return fibers


@dataclass(frozen=True)
class ScanReport:
    header: dict
    rows: tuple
    empirical_max: float
    empirical_max_exact: Optional[str]
    worst_row: Optional[int]

    def payload(self) -> dict:
        return {
            "header": self.header,
            "rows": list(self.rows),
            "empirical_max": self.empirical_max,
            "empirical_max_exact": self.empirical_max_exact,
            "worst_row": self.worst_row,
        }


SCAN_CSV_FIELDS = ("s", "n", "base_scale", "h_total", "h_total_doubled",
                   "delta", "ratio", "ratio_exact")


def scan_family(config: ExperimentConfig) -> ScanReport:
    """Sample distinct good fibers and tabulate delta([N]P) across them."""
    family = config.build_family()
    rng = SplitMix64(config.seed)
    fibers = _distinct_fibers(rng, family, config.height_bound,
                              config.fiber_count)
    rows = []
    for s in fibers:
        rows.extend(fiber_deltas(family, s, config.multiplier_max))
    worst_idx = None
    for idx, row in enumerate(rows):
        if worst_idx is None or row["ratio"] > rows[worst_idx]["ratio"]:
            worst_idx = idx
    rational = isinstance(family.field, Rationals)
    emp = 0.0 if worst_idx is None else rows[worst_idx]["ratio"]
    emp_exact = None
    if not rational and worst_idx is not None:
        emp_exact = rows[worst_idx]["ratio_exact"]
    return ScanReport(
        header=report_header(config, "delta-scan"),
        rows=tuple(rows),
        empirical_max=emp,
        empirical_max_exact=emp_exact,
        worst_row=worst_idx,
    )


@dataclass(frozen=True)
class Calibration:
    """The empirical constant a scan supports, with provenance hashes so a
    later check can refuse fixtures from a different family."""

    c_cal: float
    c_cal_exact: Optional[str]
    empirical_max: float
    empirical_max_exact: Optional[str]
    safety: float
    floor: float
    sample_rows: int
    field: str
    config_hash: str
    family_hash: str

    def payload(self) -> dict:
        return {
            "kind": "calibration",
            "c_cal": self.c_cal,
            "c_cal_exact": self.c_cal_exact,
            "empirical_max": self.empirical_max,
            "empirical_max_exact": self.empirical_max_exact,
            "safety": self.safety,
            "floor": self.floor,
            "sample_rows": self.sample_rows,
            "field": self.field,
            "config_hash": self.config_hash,
            "family_hash": self.family_hash,
        }


def calibrate(config: ExperimentConfig) -> Calibration:
    """Run a scan and turn its worst ratio into c_cal =
    max(SCAN_SAFETY * max ratio, C_CAL_FLOOR)."""
    report = scan_family(config)
    exact = None
    if report.empirical_max_exact is not None:
        scaled = max(Fraction(report.empirical_max_exact) * Fraction(3, 2),
                     Fraction(C_CAL_FLOOR))
        exact = f"{scaled.numerator}/{scaled.denominator}"
        c_cal = float(scaled)
    else:
        c_cal = max(SCAN_SAFETY * report.empirical_max, C_CAL_FLOOR)
    return Calibration(
        c_cal=c_cal,
        c_cal_exact=exact,
        empirical_max=report.empirical_max,
        empirical_max_exact=report.empirical_max_exact,
        safety=SCAN_SAFETY,
        floor=C_CAL_FLOOR,
        sample_rows=len(report.rows),
        field=config.field_label,
        config_hash=config.config_hash(),
        family_hash=config.family_hash(),
    )


def load_calibration(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"calibration file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid calibration JSON in {path}: {exc}") from exc
    if not isinstance(data, dict) or "c_cal" not in data \
            or "family_hash" not in data:
        raise ConfigError(f"not a calibration file: {path}")
    return data


def calibration_for(config: ExperimentConfig,
                    path: Optional[str]) -> Calibration:
    """Load a calibration fixture (checking it matches the family) or, with
    no path, calibrate in-line from the config's own scan."""
    if path is None:
        return calibrate(config)
    data = load_calibration(path)
    if data["family_hash"] != config.family_hash():
        raise ConfigError(
            f"calibration {path} was made for family {data['family_hash']}, "
            f"config has {config.family_hash()}")
    return Calibration(
        c_cal=float(data["c_cal"]),
        c_cal_exact=data.get("c_cal_exact"),
        empirical_max=float(data.get("empirical_max", 0.0)),
        empirical_max_exact=data.get("empirical_max_exact"),
        safety=float(data.get("safety", SCAN_SAFETY)),
        floor=float(data.get("floor", C_CAL_FLOOR)),
        sample_rows=int(data.get("sample_rows", 0)),
        field=str(data.get("field", config.field_label)),
        config_hash=str(data.get("config_hash", "")),
        family_hash=str(data["family_hash"]),
    )


# ---------------------------------------------------------------------------
# doubling tables and the height-comparison check
# ---------------------------------------------------------------------------


def _study_points(config: ExperimentConfig, family: WeierstrassFamily,
                  rng: SplitMix64) -> list[tuple[str, int, object]]:
    """(s_text, N, [N]section(s)) triples drawn from the config's stream.

    Over a function field the fibers are drawn integral (polynomial
    parameter values) so the doubling chains stay on the fast x-line route;
    scans keep fully general rational-function fibers.
    """
    integral = not isinstance(family.field, Rationals)
    out = []
    for _ in range(config.nt_point_count):
        s = sample_fiber(rng, family, config.height_bound, integral=integral)
        n = rng.randint(1, config.multiplier_max)
        out.append((_param_text(family.field, s), n,
                    mul_n(n, family.section_at(s))))
    return out


@dataclass(frozen=True)
class TableReport:
    header: dict
    c_cal: float
    entries: tuple

    def payload(self) -> dict:
        return {"header": self.header, "c_cal": self.c_cal,
                "entries": list(self.entries)}


def run_convergence_tables(config: ExperimentConfig,
                           calibration: Calibration) -> TableReport:
    """Doubling tables q_l = h([2^l]P)/4^l with telescoping verdicts."""
    family = config.build_family()
    rng = SplitMix64(config.seed)
    entries = []
    for s_text, n, point in _study_points(config, family, rng):
        est = neron_tate(point, config.telescope_depth, calibration.c_cal)
        entries.append({
            "s": s_text,
            "n": n,
            "base_scale": float(est.table.base_scale()),
            "levels": est.table.rows(),
            "estimate": est.estimate,
            "error_bound": est.error_bound,
            "telescoping_ok": telescoping_consistency(est.table,
                                                      calibration.c_cal),
        })
    return TableReport(report_header(config, "doubling-tables"),
                       calibration.c_cal, tuple(entries))


@dataclass(frozen=True)
class HIReport:
    header: dict
    c_cal: float
    rows: tuple
    all_ok: bool

    def payload(self) -> dict:
        return {"header": self.header, "c_cal": self.c_cal,
                "rows": list(self.rows), "all_ok": self.all_ok}


HI_CSV_FIELDS = ("s", "n", "estimate", "total", "residual", "bound",
                 "telescoping_ok", "ok")


def run_height_inequality(config: ExperimentConfig,
                          calibration: Calibration) -> HIReport:
    """|estimate - h_L(P)| <= c_cal*lambda + c_cal*lambda/4^depth across a
    sample of section multiples, one doubling table per point."""
    family = config.build_family()
    rng = SplitMix64(config.seed)
    rows = []
    for s_text, n, point in _study_points(config, family, rng):
        est = neron_tate(point, config.nt_depth, calibration.c_cal)
        check = height_inequality_from_estimate(est)
        rows.append({
            "s": s_text,
            "n": n,
            "estimate": check.estimate,
            "total": check.total_log,
            "residual": check.residual,
            "bound": check.bound,
            "telescoping_ok": telescoping_consistency(est.table,
                                                      calibration.c_cal),
            "ok": check.ok,
        })
    all_ok = all(r["ok"] and r["telescoping_ok"] for r in rows)
    return HIReport(report_header(config, "height-inequality"),
                    calibration.c_cal, tuple(rows), all_ok)


# ---------------------------------------------------------------------------
# morphism height comparisons
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MorphismChecksReport:
    header: dict
    veronese: tuple
    segre: dict
    blowup: dict
    all_ok: bool

    def payload(self) -> dict:
        return {"header": self.header, "veronese": list(self.veronese),
                "segre": self.segre, "blowup": self.blowup,
                "all_ok": self.all_ok}


def _height_power(field, h: int, d: int) -> int:
    return h ** d if isinstance(field, Rationals) else d * h


def run_morphism_checks(config: ExperimentConfig) -> MorphismChecksReport:
    """Veronese exactness, Segre multiplicativity, and the blow-up's
    two-sided height comparison, on freshly sampled points."""
    field = config.field
    rng = SplitMix64(config.seed)
    bound = config.s5_coord_bound
    count = config.s5_samples

    veronese_results = []
    for n, d in ((1, 2), (1, 3), (2, 2)):
        spec = veronese(n, d)
        pts = [sample_proj_point(rng, field, n, bound) for _ in range(count)]
        fit = fit_linear_height_bound(spec, pts)
        exact_ok = all(
            weil_height(apply_morphism(spec, p)).value
            == _height_power(field, weil_height(p).value, d)
            for p in pts)
        veronese_results.append({
            "space": f"P{n}", "degree": d, "c1": fit.c1, "c2": fit.c2,
            "fit_ok": fit.verdict, "exact_power_ok": exact_ok,
            "samples": fit.samples,
        })

    seg_ok = True
    for _ in range(count):
        p = sample_proj_point(rng, field, 1, bound)
        q = sample_proj_point(rng, field, 1, bound)
        h = weil_height(segre(p, q))
        expected = weil_height(p).combine(weil_height(q))
        if h.value != expected.value:
            seg_ok = False
            break
    segre_result = {"samples": count, "exact_product_ok": seg_ok}

    blow = BlowUpPlane(field)
    pts2 = []
    while len(pts2) < count:
        p = sample_proj_point(rng, field, 2, bound)
        x, y, _ = p.coords
        off_center = (x != 0 or y != 0) if isinstance(field, Rationals) \
            else (not x.is_zero() or not y.is_zero())
        if off_center:
            pts2.append(p)
    two_sided = verify_two_sided_bound(blow, pts2)
    blowup_result = {
        "c1": two_sided.c1, "d1": two_sided.d1,
        "c2": two_sided.c2, "d2": two_sided.d2,
        "fit_ok": two_sided.verdict, "samples": two_sided.samples,
        "round_trip_ok": True,  # verify_two_sided_bound raises otherwise
    }

    all_ok = (all(v["fit_ok"] and v["exact_power_ok"]
                  for v in veronese_results)
              and seg_ok and two_sided.verdict)
    return MorphismChecksReport(report_header(config, "morphism-checks"),
                                tuple(veronese_results), segre_result,
                                blowup_result, all_ok)


# ---------------------------------------------------------------------------
# divisor reports
# ---------------------------------------------------------------------------

_DEMO_DIVISOR = {
    "ambient_dim": 1,
    "forms": {
        "zero_line": [[1, [1, 0]]],                    # x0
        "conic": [[1, [2, 0]], [1, [0, 2]]],           # x0^2 + x1^2
        "pole_line": [[1, [0, 1]]],                    # x1
    },
    "multiplicities": {"zero_line": 2, "conic": 1, "pole_line": -3},
}


def _coeff_from_toml(value):
    if isinstance(value, bool):
        raise ConfigError("form coefficients must be numbers, not booleans")
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"bad coefficient {value!r}") from exc
    raise ConfigError(f"bad coefficient {value!r}")


def registry_from_spec(field, spec: dict) -> tuple[FormRegistry, dict]:
    """Build a form registry + multiplicity map from a [divisor] table."""
    if not isinstance(spec.get("forms"), dict) or not spec["forms"]:
        raise ConfigError("[divisor] needs a nonempty forms table")
    if not isinstance(spec.get("multiplicities"), dict):
        raise ConfigError("[divisor] needs a multiplicities table")
    dim = spec.get("ambient_dim", 1)
    if dim not in (1, 2):
        raise ConfigError("[divisor] ambient_dim must be 1 or 2")
    coeff_field = field if isinstance(field, Rationals) else field.coeff_field
    registry = FormRegistry(coeff_field, dim)
    asserted = {tuple(sorted(pair))
                for pair in spec.get("assert_coprime", [])}
    try:
        for name in sorted(spec["forms"]):
            terms = []
            for term in spec["forms"][name]:
                coeff, exps = term[0], term[1]
                terms.append((_coeff_from_toml(coeff), tuple(exps)))
            needs_assert = any(name in pair for pair in asserted)
            registry.register(name, terms, assert_coprime=needs_assert)
        mults = {}
        for name, m in spec["multiplicities"].items():
            if not isinstance(m, int) or isinstance(m, bool):
                raise ConfigError(f"multiplicity of {name!r} must be an integer")
            mults[name] = m
        registry.divisor(mults)  # validates the names
    except ConfigError:
        raise
    except Exception as exc:  # registry rejections become config errors
        raise ConfigError(f"bad [divisor] spec: {exc}") from exc
    return registry, mults


@dataclass(frozen=True)
class DivisorReport:
    header: dict
    divisor: dict

    def payload(self) -> dict:
        return {"header": self.header, "divisor": self.divisor}


def run_divisor_report(config: ExperimentConfig) -> DivisorReport:
    """Split the configured divisor (or a built-in demo) into its effective
    parts and, on P^1, print the local equations per chart."""
    spec = config.divisor_spec or _DEMO_DIVISOR
    registry, mults = registry_from_spec(config.field, spec)
    d = registry.divisor(mults)
    c, e = split_effective(d)
    variables = tuple(f"x{i}" for i in range(registry.ambient_dim + 1))
    body = {
        "ambient": f"P{registry.ambient_dim}",
        "forms": {name: form.to_text(variables)
                  for name, form in registry.forms.items()},
        "asserted_coprime_pairs": [list(p) for p in registry.asserted_pairs],
        "divisor": d.to_text(),
        "degree": d.degree,
        "effective": is_effective(d),
        "positive_part": c.to_text(),
        "negative_part": e.to_text(),
        "denominator_support": denominator_support(d).to_text(),
    }
    if registry.ambient_dim == 1:
        charts = {}
        for chart in (0, 1):
            num, den = chart_polys(d, chart)
            var = "t"
            charts[f"chart_{chart}"] = {
                "numerator": num.to_text(var),
                "denominator": den.to_text(var),
            }
        body["local_equations"] = charts
    return DivisorReport(report_header(config, "divisor"), body)


# ---------------------------------------------------------------------------
# writers
# ---------------------------------------------------------------------------


def write_json_report(path: str, payload: dict) -> None:
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    text = json.dumps(payload, sort_keys=True, indent=2,
                      ensure_ascii=False) + "\n"
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def write_csv_rows(path: str, fieldnames: Sequence[str],
                   rows: Sequence[dict]) -> None:
    """Comma-separated values with a header row and \\n line ends; cell
    formatting is pinned down (floats by repr, booleans lowercase) so the
    bytes only depend on the data."""
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(fieldnames)
        for row in rows:
            writer.writerow([_csv_cell(row.get(name)) for name in fieldnames])


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)

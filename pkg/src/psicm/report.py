"""Suite runner and report serialization (JSON, CSV, text)."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field

from . import __version__
from . import applications as app
from . import cm_checker as cm
from . import divided_diff as dd
from .divided_diff import ShiftPair
from .precision import DOUBLE, Precision, extended, resolve
from .special import find_psi_root, polygamma, quadrature_oracle

SUITES = ("cm", "wallis", "erf", "ball", "kershaw", "gamma-psi", "aux", "identities",
          "conjecture")

DEFAULT_PAIRS = (
    (0.0, 0.0), (0.0, 0.5), (0.5, 1.0), (1.0, 1.5), (-0.3, 0.4), (0.2, 0.9),
    (0.0, 2.0), (0.5, 3.0), (-0.4, 1.8),
)

ANCHORS = {
    "cm": "complete monotonicity of theta and delta",
    "z-monotone": "monotonicity and convexity of z",
    "wallis": "sharp Wallis double-factorial bounds",
    "erf": "Gaussian integral sandwich",
    "ball": "unit-ball volume ratio bounds",
    "kershaw": "Kershaw double inequality",
    "gamma-psi": "gamma bounds through psi with best constants Q(a), Q(b)",
    "q-continuity": "Q(x*) = 1/psi'(x*)",
    "f-monotone": "monotonicity of the anchored ratio f",
    "aux-gamma": "gamma ratio between exp((s-r)psi(r)) and exp((s-r)psi(s))",
    "aux-z": "gamma ratio power versus reciprocal psi divided difference",
    "aux-phi": "psi'(x) exp(psi(x)) < 1",
    "identities": "telescoping identities for lambda and theta",
    "oracle": "series polygamma versus integral representation",
    "fd-oracle": "closed-form theta^(k) versus finite differences",
    "z2-factor": "z'' = (z + x) delta",
    "h-derivative": "derivative of h in the monotonicity proof for f",
    "conjecture": "log-complete monotonicity of phi or 1/phi (open)",
}


class ConfigError(ValueError):
    """Invalid suite configuration (CLI exit code 2)."""


@dataclass(frozen=True)
class SuiteConfig:
    suites: tuple = SUITES
    n_max: int = 200
    k_max: int = cm.DEFAULT_K_MAX
    grid: int = cm.DEFAULT_GRID
    precision: Precision = DOUBLE
    pairs: tuple = DEFAULT_PAIRS
    seed: int = 0
    samples: int = 500
    timings: bool = False

    def validate(self):
        unknown = [s for s in self.suites if s not in SUITES]
        if unknown:
            raise ConfigError(f"unknown suite(s) {unknown}; choose from {list(SUITES)}")
        if not 1 <= self.n_max <= 20000:
            raise ConfigError("n_max must lie in 1..20000")
        if not 0 <= self.k_max <= 14:
            raise ConfigError("k_max must lie in 0..14")
        if not 2 <= self.grid <= 100000:
            raise ConfigError("grid must lie in 2..100000")
        if self.samples < 1:
            raise ConfigError("samples must be positive")
        if not self.pairs:
            raise ConfigError("at least one (s, t) pair is required")


@dataclass
class SuiteEntry:
    claim_id: str
    paper_anchor: str
    parameters: dict
    verdict: str
    margins: dict
    runtime_ms: float | None = None


@dataclass
class VerificationReport:
    tool_version: str
    precision_mode: str
    suite: list
    summary: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.summary:
            self.summary = summarize(self.suite)

    @property
    def verdict(self) -> str:
        return self.summary["verdict"]

    def to_dict(self):
        return {
            "tool_version": self.tool_version,
            "precision_mode": self.precision_mode,
            "suite": [asdict(e) for e in self.suite],
            "summary": dict(self.summary),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            tool_version=d["tool_version"], precision_mode=d["precision_mode"],
            suite=[SuiteEntry(**e) for e in d["suite"]], summary=dict(d["summary"]),
        )


def summarize(entries):
    counts = {"total": len(entries), "pass": 0, "fail": 0, "indeterminate": 0, "probe": 0}
    for e in entries:
        counts[e.verdict] = counts.get(e.verdict, 0) + 1
    counts["verdict"] = "fail" if counts["fail"] else "pass"
    return counts


def _clean(value):
    """JSON-safe scalar: floats stay floats, non-finite become strings."""
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    v = float(value)
    if math.isfinite(v):
        return v
    return "inf" if v > 0 else ("-inf" if v < 0 else "nan")


def _entry(claim_id, anchor, parameters, verdict, margins, elapsed):
    return SuiteEntry(claim_id, ANCHORS[anchor], _clean(parameters), verdict,
                      _clean(margins), elapsed)


def _from_record(rec: app.BoundCheckRecord, anchor, elapsed=None):
    params = dict(rec.parameter)
    margins = {"lower": rec.margin_lower, "upper": rec.margin_upper}
    if rec.guard_band_used:
        margins["guard_band_used"] = True
    return _entry(rec.claim_id, anchor, params, rec.verdict, margins, elapsed)


def _from_certificate(cert: cm.CMCertificate, anchor, elapsed=None):
    params = {"target": cert.function_id, "s": cert.pair[0], "t": cert.pair[1],
              "interval": list(cert.interval), "k_max": cert.k_max,
              "grid_points": cert.grid_points, "expected_sign": cert.expected_sign}
    margins = {f"k{k}": w for k, w in enumerate(cert.worst_margin)}
    verdict = cert.verdict
    if cert.kind == "conjecture-probe":
        params["probe_result"] = "no violation" if cert.verdict == "pass" else (
            "indeterminate" if cert.verdict == "indeterminate" else "violation")
        verdict = "probe"
    claim = "cm-" + cert.function_id if cert.kind == "certificate" else "conjecture-lcm-phi"
    return _entry(claim, anchor, params, verdict, margins, elapsed)


class _Clock:
    def __init__(self, enabled):
        self.enabled = enabled

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.ms = round((time.perf_counter() - self.start) * 1e3, 3) if self.enabled else None


def _pairs(config):
    return [ShiftPair(float(s), float(t)) for s, t in config.pairs]


def _suite_cm(config):
    out = []
    for pair in _pairs(config):
        target = "delta" if pair.coincident else "theta"
        with _Clock(config.timings) as clk:
            cert = cm.check_alternating_signs(target, pair, (-pair.alpha + 0.1, 50.0),
                                              config.k_max, config.grid, config.precision)
        out.append(_from_certificate(cert, "cm", clk.ms))
    for which in ["theta1", "theta2"] + [p for p in _pairs(config) if not p.coincident]:
        with _Clock(config.timings) as clk:
            rec = app.theta_monotonicity_check(which, precision=config.precision)
        out.append(_from_record(rec, "z-monotone", clk.ms))
    return out


def _records(fn, anchor, config):
    with _Clock(config.timings) as clk:
        recs = fn()
    return [_from_record(r, anchor, clk.ms) for r in recs]


def _suite_gamma_psi(config):
    prec = config.precision
    out = _records(lambda: app.gamma_psi_bounds_check(1.0, 3.0, precision=prec),
                   "gamma-psi", config)
    out += _records(lambda: app.gamma_psi_bounds_check(1.0, app.INFINITY, precision=prec),
                    "gamma-psi", config)
    with _Clock(config.timings) as clk:
        x_star = find_psi_root(prec)
        target = 1 / polygamma(1, x_star, prec)
        gap = abs(dd.q_ratio(x_star + 1e-6, prec) - dd.q_ratio(x_star, prec))
        exact_gap = abs(dd.q_ratio(x_star, prec) - target)
    out.append(_entry("q-continuity", "q-continuity", {"x_star": x_star, "offset": 1e-6},
                      "pass" if gap < 1e-4 and exact_gap < 1e-12 else "fail",
                      {"continuity_gap": gap, "anchor_gap": exact_gap}, clk.ms))
    for pair in _pairs(config):
        c = -pair.alpha + 1.0
        with _Clock(config.timings) as clk:
            rec = app.f_monotonicity_check(pair, c, (-pair.alpha + 0.1, 20.0), precision=prec)
        out.append(_from_record(rec, "f-monotone", clk.ms))
    return out


def _suite_aux(config):
    with _Clock(config.timings) as clk:
        recs = app.auxiliary_inequality_checks(samples=config.samples, seed=config.seed)
    anchors = {"gamma-ratio-exp": "aux-gamma", "z-divided-difference": "aux-z",
               "psi-prime-exp-psi": "aux-phi"}
    return [_from_record(r, anchors[r.claim_id], clk.ms) for r in recs]


def _suite_identities(config):
    prec = config.precision
    # theta cancels internally at large x, so the telescoping residuals are
    # only meaningful at >= 30 digits
    step_prec = prec.at_least(30)
    out = []
    for pair in _pairs(config):
        if pair.coincident:
            continue
        with _Clock(config.timings) as clk:
            rep = cm.check_step_identities(pair, 100, seed=config.seed, precision=step_prec)
        out.append(_entry(
            "step-identities", "identities",
            {"s": pair.s, "t": pair.t, "samples": rep.samples, "precision": str(step_prec)},
            "pass" if rep.passed else "fail",
            {"lambda_residual": rep.lambda_residual, "theta_residual": rep.theta_residual,
             "max_decay": max(rep.decay_values)}, clk.ms))
    # polygamma series vs integral representation, always in double
    with _Clock(config.timings) as clk:
        worst = 0.0
        for n in range(5):
            for x in (0.5, 0.75, 1.0, 2.0, 3.5, 7.0, 12.0, 20.0):
                worst = max(worst, abs(float(polygamma(n, x, DOUBLE))
                                       - float(quadrature_oracle(n, x, DOUBLE))))
    out.append(_entry("oracle-agreement", "oracle", {"orders": "0..4", "x": "[0.5, 20]"},
                      "pass" if worst <= 1e-9 else "fail", {"max_abs_diff": worst}, clk.ms))
    ext = extended(40)
    with _Clock(config.timings) as clk:
        worst = 0.0
        for pair in (ShiftPair(0.1, 0.7), ShiftPair(0.0, 2.0)):
            for x in (-pair.alpha + 0.5, 1.5, 7.0):
                for k in range(4):
                    fd = cm.finite_difference_oracle(lambda y: dd.theta(pair, y, ext),
                                                     x, k, 1e-6, ext)
                    worst = max(worst, abs(float(fd) - float(dd.theta_derivative(pair, x, k, prec))))
    out.append(_entry("fd-theta-derivative", "fd-oracle", {"k": "0..3", "h": 1e-6},
                      "pass" if worst <= 1e-5 else "fail", {"max_abs_diff": worst}, clk.ms))
    with _Clock(config.timings) as clk:
        worst = 0.0
        for pair in _pairs(config):
            if pair.coincident:
                continue
            for x in (-pair.alpha + 0.3, 1.0, 4.0, 25.0):
                z = dd.z_eval(pair, x, prec)
                via_delta = (z.z + x) * dd.delta(pair, x, prec)
                via_theta = (z.z + x) * dd.theta(pair, x, prec) / (pair.t - pair.s) ** 2
                scale = max(abs(z.z2), 1e-300)
                worst = max(worst, float(abs(z.z2 - via_delta) / scale),
                            float(abs(z.z2 - via_theta) / scale))
    out.append(_entry("z2-factorization", "z2-factor", {}, "pass" if worst <= 1e-9 else "fail",
                      {"max_rel_diff": worst}, clk.ms))
    out.extend(_h_derivative_entries(config))
    return out


def _h_derivative_entries(config):
    """Compare both h' expressions with a finite difference of h."""
    ext = extended(40)
    out = []
    for form in ("corrected", "as_printed"):
        with _Clock(config.timings) as clk:
            worst = 0.0
            for pair, c in ((ShiftPair(0.0, 0.5), 1.0), (ShiftPair(0.0, 2.0), 1.5)):
                anchored = dd.AnchoredPair(pair, c)
                for x in (c - 0.5, c + 2.0):
                    fd = cm.finite_difference_oracle(
                        lambda y: dd.h_value(anchored, y, ext), x, 1, 1e-5, ext)
                    closed = dd.h_derivative(anchored, x, form, ext)
                    worst = max(worst, float(abs(fd - closed) / max(abs(fd), 1e-300)))
        ok = worst < 1e-6
        verdict = ("pass" if ok else "fail") if form == "corrected" else "probe"
        out.append(_entry(f"h-derivative-{form}", "h-derivative", {"form": form},
                          verdict, {"max_rel_diff": worst,
                                    "matches_finite_difference": ok}, clk.ms))
    return out


def _suite_conjecture(config):
    out = []
    for pair in _pairs(config):
        with _Clock(config.timings) as clk:
            cert = cm.probe_phi_lcm_conjecture(pair, (-pair.alpha + 0.1, 50.0), k_max=3,
                                               grid_points=24)
        out.append(_from_certificate(cert, "conjecture", clk.ms))
    return out


def run_suite(config: SuiteConfig) -> VerificationReport:
    """Run the selected suites in a fixed order and collect one entry per claim."""
    config.validate()
    runners = {
        "cm": lambda: _suite_cm(config),
        "wallis": lambda: _records(lambda: app.wallis_bounds_check(config.n_max),
                                   "wallis", config),
        "erf": lambda: _records(lambda: app.erf_bounds_check(config.n_max), "erf", config),
        "ball": lambda: _records(lambda: app.ball_ratio_check(config.n_max), "ball", config),
        "kershaw": lambda: _records(app.kershaw_check, "kershaw", config),
        "gamma-psi": lambda: _suite_gamma_psi(config),
        "aux": lambda: _suite_aux(config),
        "identities": lambda: _suite_identities(config),
        "conjecture": lambda: _suite_conjecture(config),
    }
    entries = []
    for name in SUITES:
        if name in config.suites:
            entries.extend(runners[name]())
    return VerificationReport(__version__, str(config.precision), entries)


CSV_FIELDS = ("claim_id", "paper_anchor", "parameters", "verdict", "margins", "runtime_ms")


def _compact(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def emit_report(report: VerificationReport, fmt: str = "json") -> bytes:
    if fmt == "json":
        return (json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_FIELDS)
        for e in report.suite:
            writer.writerow([e.claim_id, e.paper_anchor, _compact(e.parameters), e.verdict,
                             _compact(e.margins),
                             "" if e.runtime_ms is None else repr(e.runtime_ms)])
        return buf.getvalue().encode()
    if fmt == "text":
        return _text(report).encode()
    raise ValueError(f"unknown report format {fmt!r}")


def _text(report):
    s = report.summary
    lines = [
        f"psicm {report.tool_version}  precision={report.precision_mode}",
        f"claims: {s['total']}  pass: {s['pass']}  fail: {s['fail']}"
        f"  indeterminate: {s['indeterminate']}  probe: {s['probe']}",
    ]
    by_claim = {}
    for e in report.suite:
        tally = by_claim.setdefault(e.claim_id, {})
        tally[e.verdict] = tally.get(e.verdict, 0) + 1
    for claim, tally in by_claim.items():
        parts = ", ".join(f"{v}={n}" for v, n in sorted(tally.items()))
        lines.append(f"  {claim:<24} {parts}")
    failures = [e for e in report.suite if e.verdict == "fail"]
    for e in failures[:50]:
        lines.append(f"FAIL {e.claim_id} {_compact(e.parameters)} {_compact(e.margins)}")
    lines.append(f"overall: {s['verdict'].upper()}")
    return "\n".join(lines) + "\n"

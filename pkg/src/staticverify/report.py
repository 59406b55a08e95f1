"""Run configuration, suite runners and machine-readable reports.

Every runner returns a SuiteReport whose serialization is deterministic:
checks keep a canonical order, floats are rendered by the json module's
shortest round-trip repr, and wall time is only recorded on request.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import __version__
from . import algebra, identities, lift, odes, triples, variational
from .identities import CheckReport

SCHEMA = 1
DEFAULT_TRIPLES = ("hemisphere", "cylinder", "sds:0.05", "sds:0.1", "sds:0.15")
SUITES = ("verify", "scan", "ineq", "yamabe", "ode", "report")
# check names whose tolerance can be overridden with tol.<name> or --tol
TOLERANCE_NAMES = frozenset(identities.TOLERANCES["analytic"]) | {
    "lift_einstein", "lift_weyl", "lift_volume", "gauss_bonnet_chern", "limit_low", "limit_high",
    "kato_frame_invariance", "euler_lagrange", "lambda_zero", "constant_minimizer", "lambda_small",
    "hamiltonian_drift", "ode_residual", "closed_form",
}


class ConfigError(ValueError):
    """Invalid run configuration (exit code 2)."""


@dataclass
class RunConfig:
    suite: str = "verify"
    triples: list = field(default_factory=lambda: list(DEFAULT_TRIPLES))
    tolerances: dict = field(default_factory=dict)
    samples: int = 100
    seed: int = 0
    path: str = "analytic"
    format: str = "json"
    out: str | None = None
    timing: bool = False
    # scan
    m_min: float | None = None
    m_max: float | None = None
    steps: int = 256
    log: bool = False
    # yamabe
    nodes: int = 256
    # ineq
    ineq_samples: int = 100000
    sup_search: bool = False
    # ode
    ode_mode: str = "suite"
    c: float = 2.0
    x0: float = 0.5
    umax: float = 50.0
    lam: float = 2.0
    alpha0: float = 1.0
    smax: float = 1.0
    forcing: float = 0.0

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.suite not in SUITES:
            raise ConfigError(f"unknown suite {self.suite!r}")
        if self.path not in ("analytic", "fd"):
            raise ConfigError(f"path must be analytic or fd, got {self.path!r}")
        if self.format not in ("json", "csv", "text"):
            raise ConfigError(f"format must be json, csv or text, got {self.format!r}")
        if self.ode_mode not in ("suite", "profile", "singular"):
            raise ConfigError(f"unknown ode mode {self.ode_mode!r}")
        unknown = sorted(set(self.tolerances) - TOLERANCE_NAMES)
        if unknown:
            raise ConfigError(f"no tolerance named {', '.join(unknown)}")
        if self.samples < 1 or self.ineq_samples < 1 or self.steps < 2:
            raise ConfigError("sample counts must be positive")

    @classmethod
    def keys(cls) -> set:
        return {f.name for f in fields(cls)}

    @classmethod
    def from_mapping(cls, values: dict) -> "RunConfig":
        """Build from string or typed values; tol.<check> keys go to the tolerance table."""
        kw = {}
        tol = {}
        types = {f.name: f for f in fields(cls)}
        for key, raw in values.items():
            if key.startswith("tol."):
                tol[key[4:]] = _as_float(key, raw)
                continue
            if key not in types:
                raise ConfigError(f"unknown config key {key!r}")
            kw[key] = _coerce(key, raw, cls.__dataclass_fields__[key].default)
        if tol:
            kw.setdefault("tolerances", {}).update(tol)
        return cls(**kw)

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("out")
        return d


def _as_float(key, raw) -> float:
    try:
        return float(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key}: expected a number, got {raw!r}") from exc


def _coerce(key, raw, default):
    if not isinstance(raw, str):
        return raw
    if key == "triples":
        return [t.strip() for t in raw.split(",") if t.strip()]
    if key == "tolerances":
        raise ConfigError("use tol.<check> = value for tolerance overrides")
    if isinstance(default, bool):
        low = raw.strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{key}: expected a boolean, got {raw!r}")
    if isinstance(default, int):
        try:
            return int(raw)
        except ValueError as exc:
            raise ConfigError(f"{key}: expected an integer, got {raw!r}") from exc
    if isinstance(default, float) or key in ("m_min", "m_max"):
        return _as_float(key, raw)
    return raw.strip()


def parse_config_text(text: str) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {n}: empty key")
        values[key] = value
    return values


def load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config_text(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def thread_count() -> int:
    raw = os.environ.get("STATICVERIFY_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


def ordered_map(fn, items):
    """Parallel map that returns results in input order."""
    items = list(items)
    n = min(thread_count(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


# ----------------------------------------------------------------------------
# report


def _clean(x):
    """Convert numpy scalars and arrays to plain JSON types; non-finite floats become strings."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    return x


@dataclass
class SuiteReport:
    suite: str
    config: dict
    checks: list
    version: str = __version__
    wall_time: float | None = None
    data: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return _clean({
            "schema": SCHEMA,
            "version": self.version,
            "suite": self.suite,
            "config": self.config,
            "checks": [c.to_dict() for c in self.checks],
            "pass": self.passed,
            "wall_time": self.wall_time,
            "data": self.data,
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, allow_nan=False) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "SuiteReport":
        if d.get("schema") != SCHEMA:
            raise ValueError(f"unsupported report schema {d.get('schema')!r}")
        return cls(d["suite"], d["config"], [CheckReport.from_dict(c) for c in d["checks"]],
                   d["version"], d["wall_time"], d.get("data", {}))

    @classmethod
    def from_json(cls, text: str) -> "SuiteReport":
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["check", "triple", "samples", "max_residual", "mean_residual", "tolerance", "pass"])
        for c in self.checks:
            w.writerow([c.check_name, c.triple_name, c.sample_count, repr(c.max_residual), repr(c.mean_residual),
                        repr(c.tolerance), "true" if c.passed else "false"])
        return buf.getvalue()

    def to_text(self) -> str:
        lines = [f"staticverify {self.version} suite={self.suite}"]
        for c in self.checks:
            flag = "PASS" if c.passed else "FAIL"
            if "value" in c.metadata:
                detail = f"value={c.metadata['value']!r}"
            else:
                detail = f"max={c.max_residual:.3e} tol={c.tolerance:.1e}"
            lines.append(f"{flag}  {c.triple_name:<12} {c.check_name:<28} {detail}")
        lines.append("overall: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return self.to_json()
        if fmt == "csv":
            if "csv" in self.data:
                return self.data["csv"]
            return self.to_csv()
        return self.to_text()


def _flag(name, triple_name, ok, tolerance=0.0, value=None, **meta) -> CheckReport:
    """A check whose content is a boolean condition; the residual is 0 on success and 1 on failure."""
    r = 0.0 if ok else 1.0
    if value is not None:
        meta["value"] = value
    return CheckReport(name, triple_name, 1, r, r, float(tolerance), bool(ok), _clean(meta))


def _bound(name, triple_name, value, tolerance, **meta) -> CheckReport:
    return CheckReport.from_residuals(name, triple_name, [value], tolerance, **_clean(meta))


def _tol(config: RunConfig, name: str, default: float) -> float:
    return float(config.tolerances.get(name, default))


# ----------------------------------------------------------------------------
# runners


def _verify_one(config: RunConfig, spec: str) -> list:
    tr = triples.parse_triple(spec)
    id_tol = {k: v for k, v in config.tolerances.items() if k in identities.TOLERANCES[config.path]}
    checks = identities.run_identity_suite(tr, config.samples, config.seed, config.path, id_tol)
    lc = lift.lift(tr)
    pts = lift.lift_sample_points(tr, config.samples, config.seed)
    meta = {"path": config.path, "seed": config.seed, "points": config.samples}
    er = lift.einstein_residual(lc, pts, config.path)
    checks.append(CheckReport.from_residuals("lift_einstein", tr.name, np.maximum(er["residual"], er["mixed"]),
                                             _tol(config, "lift_einstein", 1e-5 if config.path == "analytic" else 1e-3), **meta))
    wb = lift.weyl_block_check(lc, pts, config.path)
    wtol = _tol(config, "lift_weyl", 1e-8 if config.path == "analytic" else 1e-3)
    checks.append(CheckReport.from_residuals("lift_weyl_wplus", tr.name, wb["wplus_norm"], wtol, **meta))
    checks.append(CheckReport.from_residuals("lift_weyl_blocks", tr.name,
                                             np.maximum.reduce([wb["spatial"], wb["electric"], wb["eigenvalues"], wb["wminus_norm"]]),
                                             wtol, **meta))
    if tr.radial is not None and tr.boundary and tr.epsilon == 1:
        vol = lift.lift_volume(tr)
        checks.append(_bound("lift_volume", tr.name, vol["gap"], _tol(config, "lift_volume", 1e-8),
                             quadrature=vol["quadrature"], boundary_formula=vol["boundary_formula"]))
        for comp in tr.boundary:
            ce = lift.cone_expansion(lc, comp)
            checks.append(_flag(f"cone_exponent[{comp.label}]", tr.name, ce["exponent"] >= 1.9, 1.9, ce["exponent"]))
        gb = lift.gbc_residual(tr, None, path=config.path)
        checks.append(_bound("gauss_bonnet_chern", tr.name, gb["gap"], _tol(config, "gauss_bonnet_chern", 1e-8),
                             R2_term=gb["R2_term"], W_plus_term=gb["W_plus_term"], euler_term=gb["euler_term"],
                             ric0_term=gb["ric0_term"], cross_check=gb["cross_check"]))
    return checks


def run_verify(config: RunConfig) -> SuiteReport:
    """Identity suite and Einstein lift checks on each configured triple."""
    # validate every triple before any work so usage errors exit early
    for spec in config.triples:
        triples.parse_triple(spec)
    results = ordered_map(lambda s: _verify_one(config, s), config.triples)
    return SuiteReport("verify", config.echo(), [c for r in results for c in r])


def run_scan(config: RunConfig) -> SuiteReport:
    """Ratio scan over the SdS family with a fixed-schema CSV payload."""
    if config.m_min is None and config.m_max is None:
        grid = variational.default_mass_grid(config.steps)
        full = True
    else:
        lo = config.m_min if config.m_min is not None else 1e-4 * triples.M_MAX
        hi = config.m_max if config.m_max is not None else triples.M_MAX * (1 - 1e-4)
        triples.check_mass(lo)
        triples.check_mass(hi)
        if hi <= lo:
            raise ConfigError("m_max must exceed m_min")
        grid = variational.mass_grid(lo, hi, config.steps, config.log)
        full = False
    sc = variational.area_ratio_scan(grid)
    name = "sds-family"
    checks = [
        _flag("ratio_increasing", name, sc["increasing"]),
        _flag("ratio_below_bound", name, sc["below_bound"], value=float(max(r["ratio"] for r in sc["rows"]))),
        _flag("gravities_ordered", name, sc["k_ordered"]),
        _flag("areas_straddle", name, sc["areas_straddle"]),
    ]
    if full:
        # endpoint limits only make sense when the grid reaches both ends of the family
        checks.append(_bound("limit_low", name, sc["limit_low_error"], _tol(config, "limit_low", 1e-2), limit=sc["limit_low"]))
        checks.append(_bound("limit_high", name, sc["limit_high_error"], _tol(config, "limit_high", 1e-2), limit=sc["limit_high"]))
    return SuiteReport("scan", config.echo(), checks,
                       data={"csv": variational.scan_csv(sc["rows"]), "points": len(sc["rows"])})


def run_ineq(config: RunConfig) -> SuiteReport:
    """Kato-type inequality on constrained jets and the determinant bound on traceless matrices."""
    n, seed = config.ineq_samples, config.seed
    name = "pointwise"
    ks = algebra.kato_sweep(n, seed)
    checks = [_flag("kato_violations", name, ks["violations"] == 0, value=ks["violations"], samples=n, seed=seed,
                    ratio_quantiles=ks["ratio_quantiles"])]
    rng = np.random.default_rng(seed + 1)
    T, DT = algebra.sample_constrained_jets(200, seed + 2)
    Q = algebra.random_rotation(rng)
    T2, DT2 = algebra.conjugate_jet(T, DT, Q)
    r1 = algebra.kato_terms(T, DT)["ratio"]
    r2 = algebra.kato_terms(T2, DT2)["ratio"]
    checks.append(CheckReport.from_residuals("kato_frame_invariance", name, r1 - r2, _tol(config, "kato_frame_invariance", 1e-10),
                                             seed=seed))
    A = algebra.random_traceless(n, seed)
    lhs, rhs, _ = algebra.det_cubic_inequality(A)
    viol = int(np.sum(lhs > rhs * (1 + 1e-12)))
    checks.append(_flag("det_violations", name, viol == 0, value=viol, samples=n, seed=seed,
                        max_ratio=float(np.max(lhs / rhs))))
    eq_set = [np.diag([-2.0, 1.0, 1.0]), np.diag([2.0, -1.0, -1.0]), np.zeros((3, 3))]
    flags = [algebra.det_cubic_inequality(M) for M in eq_set]
    ok = all(f[2] and abs(f[0] - f[1]) <= 1e-12 * max(1.0, f[1]) for f in flags)
    off = algebra.det_cubic_inequality(np.diag([1.0, -1.0, 0.0]))
    checks.append(_flag("det_equality_cases", name, ok and not off[2],
                        cases=[[f[0], f[1], f[2]] for f in flags]))
    data = {}
    if config.sup_search:
        sup = algebra.kato_sup_search(seed=seed)
        data["kato_sup_search"] = sup
        checks.append(_flag("kato_sup_bounded", name, sup["sup_ratio"] <= algebra.KATO_CONSTANT * (1 + 1e-9),
                            value=sup["sup_ratio"]))
    return SuiteReport("ineq", config.echo(), checks, data=data)


def _yamabe_one(config: RunConfig, spec: str) -> list:
    tr = triples.parse_triple(spec)
    res = variational.minimize_quotient(tr, config.nodes)
    lam = res["lambda"]
    phi = res["phi"].values
    meta = {"lambda": lam, "nodes": config.nodes, "iterations": res["iterations"], "start_value": res["start_value"]}
    checks = [_bound("euler_lagrange", tr.name, res["el_residual"], _tol(config, "euler_lagrange", 1e-4), **meta)]
    if spec == "cylinder":
        checks.append(_bound("lambda_zero", tr.name, abs(lam), _tol(config, "lambda_zero", 1e-6), **meta))
        spread = float((phi.max() - phi.min()) / phi.max())
        checks.append(_bound("constant_minimizer", tr.name, spread, _tol(config, "constant_minimizer", 1e-6)))
    if "m" in tr.params:
        checks.append(_flag("lambda_small", tr.name, lam <= _tol(config, "lambda_small", 1e-3), 1e-3, lam))
        pd = variational.ricci_testfn_decay(tr)
        checks.append(_flag("testfn_decay_slope", tr.name, pd["slope"] >= 0.28, 0.28, pd["slope"],
                            chain_holds=pd["chain_holds"], bound_holds=pd["bound_holds"]))
    return checks


def run_yamabe(config: RunConfig) -> SuiteReport:
    """Modified Yamabe quotient minimization on rotationally symmetric triples."""
    for spec in config.triples:
        if triples.parse_triple(spec).radial is None:
            raise ConfigError(f"{spec} is not rotationally symmetric")
    results = ordered_map(lambda s: _yamabe_one(config, s), config.triples)
    return SuiteReport("yamabe", config.echo(), [c for r in results for c in r])


def _profile_checks(c: float, x0: float, umax: float, tolerances: dict) -> list:
    name = f"c={c!r},x0={x0!r}"
    g = odes.closing_gap(c, x0, umax)
    checks = [
        _bound("hamiltonian_drift", name, g["h_drift_rel"], tolerances.get("hamiltonian_drift", 1e-8)),
        _flag("closing_gap_positive", name, g["gap"] > 0, value=g["gap"], gb_value=g["gb_value"], u_star=g["u_star"]),
    ]
    below = x0 < odes.centre(c)
    # the orbit crosses the centre, so 2x(u*)^3 - c has the sign of x0 - centre reversed
    checks.append(_flag("turning_point_defect", name, (g["defect"] > 0) == below and g["defect"] != 0, value=g["defect"]))
    return checks


def _singular_checks(lam: float, alpha0: float, smax: float, forcing: float, tolerances: dict) -> list:
    name = f"lam={lam!r},a0={alpha0!r},F={forcing!r}"
    F = lambda s: forcing + 0.0 * np.asarray(s, dtype=float)
    sol = odes.singular_model_solve(lam, F, smax, alpha0)
    checks = [
        _bound("picard_converged", name, sol.sup_change, 1e-12, iterations=sol.iterations),
        _bound("second_derivative_at_0", name, abs(sol.ddalpha0 - sol.ddalpha0_expected), tolerances.get("second_derivative_at_0", 1e-6),
               expected=sol.ddalpha0_expected),
        _bound("ode_residual", name, odes.model_residual(sol, F), tolerances.get("ode_residual", 1e-8)),
    ]
    exact = None
    if forcing == 0.0 and lam > 0:
        exact = alpha0 * odes.bessel_i0_series(math.sqrt(lam) * sol.s)
    elif forcing == 0.0 and lam == 0:
        exact = np.full_like(sol.s, alpha0)
    elif lam == 0:
        exact = alpha0 + forcing * sol.s**2 / 4
    if exact is not None:
        checks.append(_bound("closed_form", name, float(np.max(np.abs(sol.alpha - exact))), tolerances.get("closed_form", 1e-10)))
    return checks


def run_ode(config: RunConfig) -> SuiteReport:
    """Profile ODE orbits with the closing formula, and the model singular ODE."""
    tol = config.tolerances
    checks = []
    data = {}
    if config.ode_mode == "profile":
        checks = _profile_checks(config.c, config.x0, config.umax, tol)
        rows = odes.phase_portrait(config.c, [config.x0], config.umax)
        cols = ("c", "x0", "u", "x", "y", "H")
        data["csv"] = ",".join(cols) + "\n" + "".join(",".join(repr(r[k]) for k in cols) + "\n" for r in rows)
        tr = odes.integrate_profile(config.c, config.x0, config.umax)
        data["trajectory"] = {"u": tr.u[::20], "x": tr.x[::20], "y": tr.y[::20], "u_star": tr.u_star, "x_star": tr.x_star}
    elif config.ode_mode == "singular":
        checks = _singular_checks(config.lam, config.alpha0, config.smax, config.forcing, tol)
        sol = odes.singular_model_solve(config.lam, lambda s: config.forcing + 0.0 * s, config.smax, config.alpha0)
        data["csv"] = "s,alpha,dalpha\n" + "".join(f"{s!r},{a!r},{d!r}\n" for s, a, d in
                                                   zip(sol.s[::16].tolist(), sol.alpha[::16].tolist(), sol.dalpha[::16].tolist()))
    else:
        grid = [(c, f * odes.centre(c)) for c in (0.5, 1.0, 2.0, 4.0) for f in (0.3, 0.6, 0.9)]
        for c, x0 in grid:
            checks += _profile_checks(c, x0, config.umax, tol)
        order = odes.rk4_order(2.0, 0.5)
        checks.append(_bound("rk4_order", "c=2.0,x0=0.5", abs(order["slope"] - 4.0), 0.3, slope=order["slope"]))
        checks.append(_bound("time_reversal", "c=2.0,x0=0.5", odes.time_reversal(2.0, 0.5), 1e-8))
        for lam, a0, F in ((0.0, 1.0, 0.0), (0.0, 0.0, 1.0), (2.0, 1.0, 0.0)):
            checks += _singular_checks(lam, a0, 1.0, F, tol)
    return SuiteReport("ode", config.echo(), checks, data=data)


def run_report(config: RunConfig) -> SuiteReport:
    """The full default suite: every runner with its default settings."""
    checks = []
    sub = {}
    for suite, runner, overrides in (
        ("verify", run_verify, {}),
        ("scan", run_scan, {"m_min": None, "m_max": None}),
        ("ineq", run_ineq, {}),
        ("yamabe", run_yamabe, {"triples": ["cylinder", "sds:0.1"]}),
        ("ode", run_ode, {"ode_mode": "suite"}),
    ):
        cfg = RunConfig(**{**asdict(config), **overrides, "suite": suite})
        rep = runner(cfg)
        checks += rep.checks
        sub[suite] = {"pass": rep.passed, "checks": len(rep.checks)}
    return SuiteReport("report", config.echo(), checks, data={"suites": sub})


RUNNERS = {"verify": run_verify, "scan": run_scan, "ineq": run_ineq, "yamabe": run_yamabe, "ode": run_ode, "report": run_report}


def run(config: RunConfig) -> SuiteReport:
    t0 = time.perf_counter()
    rep = RUNNERS[config.suite](config)
    if config.timing:
        rep.wall_time = time.perf_counter() - t0
    return rep

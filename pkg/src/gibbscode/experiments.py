"""Reproducible experiment orchestration: config in, CSV/JSON out.

Experiments (see the CLI for the subcommand names):

  corr-decay      sample codes and noise, bin E|<x_i x_j> - <x_i><x_j>|
                  by graph distance, fit an exponential decay profile
  gexit-curve     MAP / BP / series / DE estimates across an eps grid
  de-curve        DE-limit GEXIT values across an eps grid
  bounds          walk-expansion bound vs exact correlations (LDGM)
  duality-check   MacWilliams and correlation-duality residual suite
  berretti-check  dual cluster-expansion identity residual suite
  limits          iteration count vs block length on a fixed LDGM code

Every experiment is deterministic given its seed: points draw their
randomness from spawned child seeds in a fixed order, so the parallel
mode returns the same numbers as the single-threaded one.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import clusters, de, duality, gexit
from .channels import ChannelModel, sample_llr
from .exact import correlations_with_root, make_instance, spin_product_correlation
from .graphs import (LDGM, LDPC, DegreeDistribution, build_graph, load_graph,
                     graph_distance, sample_ensemble)

EXPERIMENTS = ("corr-decay", "gexit-curve", "de-curve", "bounds",
               "duality-check", "berretti-check", "limits")

#: bins below this mean are double-precision noise and excluded from fits
CORR_FLOOR = 1e-12

#: bins with fewer samples than this are excluded from fits
MIN_BIN_SAMPLES = 30


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    code: dict
    channel: str
    samples: int
    seed: int
    eps_grid: tuple = ()
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if not isinstance(self.seed, int):
            raise ValueError("seed is mandatory and must be an integer")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        ChannelModel.from_spec(self.channel)  # validates kind and eps

    @classmethod
    def from_json(cls, doc):
        if isinstance(doc, (str, bytes)):
            doc = json.loads(doc)
        return cls(experiment=doc["experiment"], code=doc.get("code", {}),
                   channel=doc["channel"], samples=int(doc.get("samples", 1)),
                   seed=int(doc["seed"]), eps_grid=tuple(doc.get("eps_grid", ())),
                   params=dict(doc.get("params", {})))

    def as_dict(self):
        return {"experiment": self.experiment, "code": self.code,
                "channel": self.channel, "samples": self.samples,
                "seed": self.seed, "eps_grid": list(self.eps_grid),
                "params": self.params}


@dataclass(frozen=True)
class DecayFit:
    """Exponential fit of mean |correlation| against distance."""

    xi: float      # decay length: mean ~ c1 * exp(-distance / xi)
    c1: float
    r: float       # Pearson correlation of (distance, ln mean)
    slope: float
    n_points: int


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    rows: list
    summary: dict
    passed: bool | None = None  # None: not a pass/fail experiment


def _degree_distribution(code):
    if "var_degree" in code:
        return DegreeDistribution.regular(code["var_degree"], code["chk_degree"])
    var = {int(k): float(v) for k, v in code["var_coeffs"].items()}
    chk = {int(k): float(v) for k, v in code["chk_coeffs"].items()}
    return DegreeDistribution.from_dicts(var, chk)


def _code_source(code):
    """A fixed TannerGraph or an EnsembleSpec, from the config dict."""
    kind = code.get("family", LDGM)
    if code.get("type", "ensemble") == "file":
        return load_graph(code["path"])
    if code.get("type") == "edges":
        return build_graph(code["n_var"], code["n_chk"],
                           [tuple(e) for e in code["edges"]], kind)
    return gexit.EnsembleSpec(_degree_distribution(code), int(code["n"]), kind)


def _eps_points(cfg):
    ch0 = ChannelModel.from_spec(cfg.channel)
    grid = cfg.eps_grid or (ch0.eps,)
    return [ChannelModel(ch0.kind, e) for e in grid]


def fit_exponential(points):
    """Weighted least squares of ln(mean) on distance for (distance,
    mean, se) triples; needs >= 3 usable bins above the noise floor."""
    usable = [(d, m, s) for d, m, s in points if m > CORR_FLOOR]
    if len(usable) < 3:
        raise ValueError(f"only {len(usable)} bins above the floor; need >= 3")
    dist = np.array([p[0] for p in usable], float)
    lm = np.log(np.array([p[1] for p in usable]))
    w = np.array([(p[1] / p[2]) ** 2 if p[2] > 0 else 1.0 for p in usable])
    W = w.sum()
    xb = (w * dist).sum() / W
    yb = (w * lm).sum() / W
    sxx = (w * (dist - xb) ** 2).sum()
    slope = (w * (dist - xb) * (lm - yb)).sum() / sxx
    c1 = math.exp(yb - slope * xb)
    if np.ptp(lm) == 0.0:  # perfectly flat data has no defined correlation
        r = 0.0
    else:
        r = float(np.corrcoef(dist, lm)[0, 1])
    xi = math.inf if slope >= 0 else -1.0 / slope
    return DecayFit(xi, c1, r, float(slope), len(usable))


# ---------------------------------------------------------------------------
# individual experiments
# ---------------------------------------------------------------------------

def _corr_decay(cfg):
    src = _code_source(cfg.code)
    n_graphs = int(cfg.params.get("graphs", 8))
    fixed = not isinstance(src, gexit.EnsembleSpec)
    rows, fits = [], {}
    for ch in _eps_points(cfg):
        ss = np.random.SeedSequence([cfg.seed, int(ch.eps * 10 ** 9)])
        seeds = ss.spawn(n_graphs)
        sums, sumsq, counts = {}, {}, {}
        per_graph = max(1, cfg.samples // n_graphs)
        for gi in range(n_graphs):
            rng = np.random.default_rng(seeds[gi])
            g = src if fixed else sample_ensemble(
                src.dd, src.n, src.kind, int(rng.integers(2 ** 63)))
            nb = g.code_bit_count
            dists = [[graph_distance(g, i, j) for j in range(nb)] for i in range(nb)]
            for _ in range(per_graph):
                l = sample_llr(ch, nb, rng).values
                inst = make_instance(g, l)
                root = int(rng.integers(nb))
                corr = correlations_with_root(inst, root)
                for j in range(nb):
                    dij = dists[root][j]
                    if j == root or math.isinf(dij):
                        continue
                    v = abs(corr[j])
                    sums[dij] = sums.get(dij, 0.0) + v
                    sumsq[dij] = sumsq.get(dij, 0.0) + v * v
                    counts[dij] = counts.get(dij, 0) + 1
        pts = []
        for dij in sorted(sums):
            nct = counts[dij]
            mean = sums[dij] / nct
            var = max(sumsq[dij] / nct - mean * mean, 0.0)
            se = math.sqrt(var / nct)
            rows.append({"eps": ch.eps, "distance": dij, "mean_abs_corr": mean,
                         "std_err": se, "n_samples": nct})
            if nct >= MIN_BIN_SAMPLES:
                pts.append((dij, mean, se))
        try:
            fit = fit_exponential(pts)
            fits[ch.eps] = {"xi": fit.xi, "c1": fit.c1, "r": fit.r,
                            "slope": fit.slope, "n_points": fit.n_points}
        except ValueError as err:
            fits[ch.eps] = {"error": str(err)}
    return ExperimentResult(cfg, rows, {"fits": fits})


def _gexit_curve(cfg):
    src = _code_source(cfg.code)
    methods = cfg.params.get("methods", ["functional"])
    d = int(cfg.params.get("d", 10))
    p_max = int(cfg.params.get("p_max", 20))
    n_pop = int(cfg.params.get("n_pop", 10 ** 5))
    family = cfg.code.get("family", LDGM)
    rows = []
    for ch in _eps_points(cfg):
        seed = int(np.random.SeedSequence(
            [cfg.seed, int(ch.eps * 10 ** 9)]).generate_state(1)[0])
        for method in methods:
            if method == "functional":
                est = gexit.map_gexit(src, ch, cfg.samples, seed)
            elif method == "series":
                est = gexit.map_gexit_series(src, ch, cfg.samples, seed, p_max)
            elif method == "bp":
                est = gexit.bp_gexit(src, ch, d, cfg.samples, seed)
            elif method == "entropy-fd":
                est = gexit.entropy_fd(src, ch, float(cfg.params.get("eps_step", 1e-3)),
                                       cfg.samples, seed)
            elif method == "awgn-magnetization":
                est = gexit.awgn_gexit(src, ch, cfg.samples, seed)
            elif method == "de":
                dd = _degree_distribution(cfg.code)
                val = de.de_gexit(family, dd, ch, d, n_pop, seed)
                est = gexit.GexitEstimate(val, 0.0, "de", {"d": d, "n_pop": n_pop})
            else:
                raise ValueError(f"unknown method {method!r}")
            rows.append({"eps": ch.eps, "method": method, "value": est.value,
                         "std_err": est.std_error, "n": est.meta.get("n", 0),
                         "d": est.meta.get("d", 0), "samples": cfg.samples,
                         "seed": seed})
    return ExperimentResult(cfg, rows, {})


def _de_curve(cfg):
    dd = _degree_distribution(cfg.code)
    family = cfg.code.get("family", LDGM)
    d = int(cfg.params.get("d", 20))
    n_pop = int(cfg.params.get("n_pop", 10 ** 5))
    dump = cfg.params.get("dump_populations")  # debugging aid: CSV of samples
    rows = []
    for ch in _eps_points(cfg):
        seed = int(np.random.SeedSequence(
            [cfg.seed, int(ch.eps * 10 ** 9)]).generate_state(1)[0])
        val = de.de_gexit(family, dd, ch, d, n_pop, seed)
        rows.append({"eps": ch.eps, "method": "de", "value": val, "std_err": 0.0,
                     "n": 0, "d": d, "samples": n_pop, "seed": seed})
        if dump:
            pop = de.run_de(family, dd, ch, d, n_pop, seed)
            with open(f"{dump}.eps{ch.eps:g}.csv", "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["sample"])
                for x in pop.samples:
                    writer.writerow([_fmt(float(x))])
    return ExperimentResult(cfg, rows, {})


def _bounds(cfg):
    """Walk-expansion bound against exact correlations on LDGM corpora."""
    src = _code_source(cfg.code)
    ch = ChannelModel.from_spec(cfg.channel)
    n_graphs = int(cfg.params.get("graphs", 10))
    H = float(cfg.params.get("H", 1.0))
    rng = np.random.default_rng(cfg.seed)
    rows = []
    violations = 0
    per_graph = max(1, cfg.samples // n_graphs)
    for gi in range(n_graphs):
        g = src if not isinstance(src, gexit.EnsembleSpec) else sample_ensemble(
            src.dd, src.n, src.kind, int(rng.integers(2 ** 63)))
        i, j = rng.choice(g.n_chk, 2, replace=False)
        A, B = set(g.adj_chk[int(i)]), set(g.adj_chk[int(j)])
        corrs, bounds = [], []
        for _ in range(per_graph):
            l = sample_llr(ch, g.n_chk, rng).values
            inst = make_instance(g, l)
            c = abs(spin_product_correlation(inst, A, B))
            b, _ = clusters.dkp_pointwise_bound(inst, A, B, H)
            corrs.append(c)
            bounds.append(b)
            if c > b + 1e-12:
                violations += 1
        avg_b, diverged = clusters.dkp_avg_bound(g, ch, A, B, H)
        rows.append({"graph": gi, "i": int(i), "j": int(j),
                     "dist": graph_distance(g, int(i), int(j)),
                     "mc_mean_abs_corr": float(np.mean(corrs)),
                     "mc_se": float(np.std(corrs) / math.sqrt(len(corrs))),
                     "mean_pointwise_bound": float(np.mean(bounds)),
                     "avg_bound": avg_b, "diverged": int(diverged)})
    return ExperimentResult(cfg, rows, {"violations": violations},
                            passed=bool(violations == 0))


def _duality_check(cfg):
    ch = ChannelModel.from_spec(cfg.channel)
    rng = np.random.default_rng(cfg.seed)
    n_max = int(cfg.params.get("n_max", 12))
    rows = []
    worst_mw = worst_r = 0.0
    for t in range(cfg.samples):
        n = int(rng.integers(3, n_max + 1))
        m = int(rng.integers(1, min(n, 9)))
        edges = set()
        for c in range(m):
            deg = int(rng.integers(2, 4))
            for v in rng.choice(n, deg, replace=False):
                edges.add((int(v), c))
        g = build_graph(n, m, sorted(edges), LDPC)
        l = rng.uniform(-3, 3, n)
        dinst = duality.DualInstance(make_instance(g, l))
        mw = duality.macwilliams_log_residual(dinst)
        i, j = (int(x) for x in rng.choice(n, 2, replace=False))
        r1, r2 = duality.duality_residuals(dinst, i, j)
        rows.append({"case": t, "n": n, "m": m, "macwilliams": mw,
                     "r1": r1, "r2": r2})
        worst_mw = max(worst_mw, mw)
        for r in (r1, r2):
            if not math.isnan(r):
                worst_r = max(worst_r, r)
    summary = {"worst_macwilliams": worst_mw, "worst_residual": worst_r}
    return ExperimentResult(cfg, rows, summary,
                            passed=bool(worst_mw < 1e-10 and worst_r < 1e-8))


def _berretti_check(cfg):
    rng = np.random.default_rng(cfg.seed)
    rows = []
    worst = 0.0
    for t in range(cfg.samples):
        n = int(rng.integers(2, 7))
        m = int(rng.integers(1, 7))
        edges = set()
        for c in range(m):
            deg = int(rng.integers(1, min(n, 3) + 1))
            for v in rng.choice(n, deg, replace=False):
                edges.add((int(v), c))
        for v in range(n):
            if not any(e[0] == v for e in edges):
                edges.add((v, int(rng.integers(m))))
        g = build_graph(n, m, sorted(edges), LDPC)
        l = rng.uniform(-2, 2, n)
        i, j = (int(x) for x in rng.choice(n, 2, replace=False))
        resid = clusters.berretti_identity_residual(make_instance(g, l), i, j)
        rows.append({"case": t, "n": n, "m": m, "i": i, "j": j, "residual": resid})
        worst = max(worst, resid)
    return ExperimentResult(cfg, rows, {"worst_residual": worst},
                            passed=bool(worst < 1e-8))


def _limits(cfg):
    """Fixed-code LDGM: BP-GEXIT at small depths against large-depth
    references, with common noise across depths."""
    src = _code_source(cfg.code)
    ch = ChannelModel.from_spec(cfg.channel)
    d_primes = [int(x) for x in cfg.params.get("d_primes", (2, 4, 6))]
    d_refs = [int(x) for x in cfg.params.get("d_refs", (100, 200))]
    depths = sorted(set(d_primes + d_refs))
    ests, diffs = gexit.bp_gexit_multi_depth(src, ch, depths, cfg.samples, cfg.seed)
    rows = [{"d": d, "value": ests[d].value, "std_err": ests[d].std_error}
            for d in depths]
    ref = max(d_refs)
    gaps = [abs(diffs[(dp, ref)][0]) for dp in d_primes]
    ref_gap = abs(diffs[(min(d_refs), ref)][0]) if len(d_refs) > 1 else 0.0
    monotone = all(gaps[k] > gaps[k + 1] for k in range(len(gaps) - 1))
    summary = {"gaps_to_ref": dict(zip(map(str, d_primes), gaps)),
               "ref_gap": ref_gap, "monotone": monotone}
    return ExperimentResult(cfg, rows, summary,
                            passed=bool(monotone and ref_gap < 1e-6))


_RUNNERS = {"corr-decay": _corr_decay, "gexit-curve": _gexit_curve,
            "de-curve": _de_curve, "bounds": _bounds,
            "duality-check": _duality_check, "berretti-check": _berretti_check,
            "limits": _limits}

_HEADERS = {
    "corr-decay": ["eps", "distance", "mean_abs_corr", "std_err", "n_samples"],
    "gexit-curve": ["eps", "method", "value", "std_err", "n", "d", "samples", "seed"],
    "de-curve": ["eps", "method", "value", "std_err", "n", "d", "samples", "seed"],
    "bounds": ["graph", "i", "j", "dist", "mc_mean_abs_corr", "mc_se",
               "mean_pointwise_bound", "avg_bound", "diverged"],
    "duality-check": ["case", "n", "m", "macwilliams", "r1", "r2"],
    "berretti-check": ["case", "n", "m", "i", "j", "residual"],
    "limits": ["d", "value", "std_err"],
}


def run_experiment(cfg, threads=1):
    """Run one experiment; deterministic given the config seed.  threads
    parallelizes over eps-grid points where the experiment has a grid
    (results are identical to the single-threaded run)."""
    if threads > 1 and len(cfg.eps_grid) > 1 and cfg.experiment in (
            "corr-decay", "gexit-curve", "de-curve"):
        parts = []
        subcfgs = [ExperimentConfig(cfg.experiment, cfg.code, cfg.channel,
                                    cfg.samples, cfg.seed, (e,), cfg.params)
                   for e in cfg.eps_grid]
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(_RUNNERS[cfg.experiment], subcfgs))
        rows = [r for p in parts for r in p.rows]
        summary = {}
        for p in parts:
            for k, v in p.summary.items():
                if isinstance(v, dict):
                    summary.setdefault(k, {}).update(v)
                else:
                    summary[k] = v
        return ExperimentResult(cfg, rows, summary)
    return _RUNNERS[cfg.experiment](cfg)


def _fmt(x):
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _jsonable(x):
    """Convert numpy scalars so the JSON document carries real numbers."""
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    raise TypeError(f"not JSON serializable: {type(x)}")


def emit(result, fmt, path):
    """Write rows as CSV with the experiment's fixed header, or a JSON
    summary embedding the full config and a content hash of it."""
    if fmt == "csv":
        header = _HEADERS[result.config.experiment]
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for row in result.rows:
                writer.writerow([_fmt(row[k]) for k in header])
    elif fmt == "json":
        cfg_doc = result.config.as_dict()
        blob = json.dumps(cfg_doc, sort_keys=True).encode()
        doc = {"config": cfg_doc,
               "content_hash": hashlib.sha256(blob).hexdigest(),
               "summary": result.summary,
               "passed": result.passed,
               "rows": result.rows}
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=2, default=_jsonable)
            fh.write("\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")

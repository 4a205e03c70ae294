"""GEXIT curve estimation: the eps-derivative of the conditional entropy
per bit, expressed as a functional of the extrinsic soft-bit estimate.

For one code bit i with extrinsic estimate M = <x_i>_0, the per-bit
kernel is

    G(M) = integral over l of (dc/deps)(l) ln[(1 + M tanh l)/(1 + tanh l)]

The MAP-GEXIT estimate Monte-Carlos G over noise (and codes, for an
ensemble), averaging the kernel over the instance's code bits.  LDGM
carries the prefactor Lambda'(1)/P'(1) = n/m, matching the derivative of
the entropy per INFORMATION bit (the entropy_fd oracle applies the same
normalization, so the two methods estimate the same number); LDPC has no
prefactor and uses the per-code-bit entropy.

Routes provided, all cross-checkable on the same corpus:

  * map_gexit          the kernel functional with exact extrinsics
  * map_gexit_series   the Nishimori moment series
                       prefactor * sum_p t2p/(2p(2p-1)) (E[M^{2p}] - 1)
                       with an explicit truncation-tail bound
  * awgn_gexit         BIAWGNC magnetization shortcut
                       prefactor * (1 - E<x_i>) / (2 eps^2)
  * bp_gexit           the kernel functional with BP extrinsics
  * entropy_fd         central finite difference of the sampled
                       conditional entropy (the definitional oracle)
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .bp import bp_all_extrinsics
from .channels import BIAWGNC, gexit_kernel_batch, sample_llr, t2p, t2p_sup
from .exact import all_extrinsics, all_marginals, conditional_entropy, make_instance
from .graphs import LDGM, TannerGraph, sample_ensemble


@dataclass(frozen=True)
class EnsembleSpec:
    """A code ensemble as a GEXIT source: degree distribution + block
    length (code bits) + family."""

    dd: object
    n: int
    kind: str


@dataclass(frozen=True)
class GexitEstimate:
    value: float
    std_error: float
    method: str
    meta: dict = field(default_factory=dict)


def _prefactor(source):
    if isinstance(source, TannerGraph):
        return source.n_chk / source.n_var if source.kind == LDGM else 1.0
    return source.dd.lambda_prime / source.dd.p_prime if source.kind == LDGM else 1.0


def _iter_instances(source, ch, samples, rng, noise_per_graph=1):
    """Yield (instance, graph index): fresh noise every sample; for an
    ensemble source a fresh code every noise_per_graph samples (reuse
    amortizes table construction; variances are then computed over
    per-graph blocks)."""
    fixed = isinstance(source, TannerGraph)
    g = source if fixed else None
    for s in range(samples):
        if not fixed and s % noise_per_graph == 0:
            g = sample_ensemble(source.dd, source.n, source.kind,
                                int(rng.integers(2 ** 63)))
        l = sample_llr(ch, g.code_bit_count, rng).values
        yield make_instance(g, l), s // noise_per_graph


def _estimate(values, prefactor, method, meta, blocks=None):
    """Mean and standard error of prefactor * values; when blocks groups
    the samples (shared codes), the SE comes from per-block means."""
    values = np.asarray(values, float)
    if blocks is not None and len(set(blocks)) > 1 and \
            len(set(blocks)) < len(values):
        blocks = np.asarray(blocks)
        means = [values[blocks == b].mean() for b in np.unique(blocks)]
        se = prefactor * float(np.std(means, ddof=1) / math.sqrt(len(means)))
    else:
        se = prefactor * float(values.std(ddof=1) / math.sqrt(len(values)))
    return GexitEstimate(prefactor * float(values.mean()), se, method, meta)


def _meta(source, ch, samples, seed, **extra):
    meta = {"channel": ch.spec(), "samples": samples, "seed": seed}
    if isinstance(source, TannerGraph):
        meta["n"] = source.code_bit_count
        meta["family"] = source.kind
    else:
        meta["n"] = source.n
        meta["family"] = source.kind
    meta.update(extra)
    return meta


def map_gexit(source, ch, samples, seed, cap=None, noise_per_graph=1):
    """MAP-GEXIT by the extrinsic kernel functional; each sample averages
    the kernel over all code bits of the instance."""
    rng = np.random.default_rng(seed)
    kw = {} if cap is None else {"cap": cap}
    vals, blocks = [], []
    for inst, b in _iter_instances(source, ch, samples, rng, noise_per_graph):
        Ms = all_extrinsics(inst, **kw)
        vals.append(float(np.mean(gexit_kernel_batch(ch, Ms))))
        blocks.append(b)
    return _estimate(vals, _prefactor(source), "functional",
                     _meta(source, ch, samples, seed), blocks)


def map_gexit_series(source, ch, samples, seed, p_max=20, cap=None,
                     noise_per_graph=1):
    """MAP-GEXIT by the moment series, truncated at p_max; the meta dict
    carries a rigorous truncation-tail bound (sup_p |t2p| times the tail
    of sum 1/(2p(2p-1)), since |E[M^{2p}] - 1| <= 1)."""
    rng = np.random.default_rng(seed)
    kw = {} if cap is None else {"cap": cap}
    coeffs = np.array([t2p(ch, p) / (2 * p * (2 * p - 1)) for p in range(1, p_max + 1)])
    vals, blocks = [], []
    for inst, b in _iter_instances(source, ch, samples, rng, noise_per_graph):
        Ms = all_extrinsics(inst, **kw)
        powers = np.stack([Ms ** (2 * p) for p in range(1, p_max + 1)], axis=1)
        vals.append(float(np.mean((powers - 1.0) @ coeffs)))
        blocks.append(b)
    tail = t2p_sup(ch) * (math.log(2.0) -
                          sum(1.0 / (2 * p * (2 * p - 1)) for p in range(1, p_max + 1)))
    return _estimate(vals, _prefactor(source), "series",
                     _meta(source, ch, samples, seed, p_max=p_max, tail_bound=tail),
                     blocks)


def series_zero_moment_value(source_kind_prefactor, ch, p_max=20):
    """The series value when every extrinsic moment vanishes:
    -prefactor * sum_p t2p/(2p(2p-1)); for the BSC this closes to
    prefactor * ln((1-eps)/eps) = 2 prefactor atanh(1-2 eps)."""
    s = sum(t2p(ch, p) / (2 * p * (2 * p - 1)) for p in range(1, p_max + 1))
    return -source_kind_prefactor * s


def awgn_gexit(source, ch, samples, seed, cap=None, noise_per_graph=1):
    """Magnetization form for the BIAWGNC:
    prefactor * (1 - E[<x_i>]) / (2 eps^2), with <x_i> the full marginal
    (equivalently tanh(l_i + atanh <x_i>_0))."""
    if ch.kind != BIAWGNC:
        raise ValueError("magnetization shortcut needs the BIAWGNC")
    rng = np.random.default_rng(seed)
    kw = {} if cap is None else {"cap": cap}
    vals, blocks = [], []
    for inst, b in _iter_instances(source, ch, samples, rng, noise_per_graph):
        vals.append((1.0 - float(np.mean(all_marginals(inst, **kw)))) /
                    (2.0 * ch.eps ** 2))
        blocks.append(b)
    return _estimate(vals, _prefactor(source), "awgn-magnetization",
                     _meta(source, ch, samples, seed), blocks)


def bp_gexit(source, ch, d, samples, seed, noise_per_graph=1):
    """BP-GEXIT: the same kernel with the depth-d BP extrinsics."""
    rng = np.random.default_rng(seed)
    vals, blocks = [], []
    for inst, b in _iter_instances(source, ch, samples, rng, noise_per_graph):
        Ms = bp_all_extrinsics(inst, d)
        vals.append(float(np.mean(gexit_kernel_batch(ch, Ms))))
        blocks.append(b)
    return _estimate(vals, _prefactor(source), "bp",
                     _meta(source, ch, samples, seed, d=d), blocks)


def bp_gexit_multi_depth(source, ch, depths, samples, seed):
    """BP-GEXIT at several depths with common noise per sample; returns
    {d: GexitEstimate} plus pairwise-difference standard errors in meta.
    Shared randomness makes the depth differences far more precise than
    the individual values."""
    from .bp import bp_checkpoint_extrinsics

    rng = np.random.default_rng(seed)
    depths = sorted(set(depths))
    per_depth = {d: [] for d in depths}
    for inst, _ in _iter_instances(source, ch, samples, rng):
        ext = bp_checkpoint_extrinsics(inst, depths)
        for d in depths:
            per_depth[d].append(float(np.mean(gexit_kernel_batch(ch, ext[d]))))
    pref = _prefactor(source)
    kernels = {d: np.array(per_depth[d]) for d in depths}
    out = {}
    for d in depths:
        out[d] = _estimate(kernels[d], pref, "bp",
                           _meta(source, ch, samples, seed, d=d))
    diffs = {}
    for a in depths:
        for b in depths:
            if a < b:
                delta = pref * (kernels[b] - kernels[a])
                diffs[(a, b)] = (float(np.mean(delta)),
                                 float(np.std(delta, ddof=1) / math.sqrt(len(delta))))
    return out, diffs


def entropy_fd(source, ch, eps_step, samples, seed, cap=None,
               check_curvature=False):
    """The definitional oracle: central finite difference in eps of the
    sampled conditional entropy, with common random numbers coupling the
    two sides (shared uniforms for the BSC, shared normals for the
    BIAWGNC).  LDGM rescales to the per-information-bit entropy (times
    n/m) so the estimate matches the functional's normalization."""
    if not (0.0 < ch.eps - eps_step and ch.eps + eps_step < ch.eps_max):
        raise ValueError("eps +- eps_step must stay inside (0, eps_max)")
    rng = np.random.default_rng(seed)
    fixed = isinstance(source, TannerGraph)
    chp = type(ch)(ch.kind, ch.eps + eps_step)
    chm = type(ch)(ch.kind, ch.eps - eps_step)
    kw = {} if cap is None else {"cap": cap}
    slopes = []
    curvs = []
    for _ in range(samples):
        g = source if fixed else sample_ensemble(
            source.dd, source.n, source.kind, int(rng.integers(2 ** 63)))
        n = g.code_bit_count
        scale = g.n_chk / g.n_var if g.kind == LDGM else 1.0
        if ch.kind == "bsc":
            u = rng.random(n)
            draw = lambda c: np.where(u < c.eps, -1.0, 1.0) * \
                0.5 * math.log((1.0 - c.eps) / c.eps)
        else:
            z = rng.standard_normal(n)
            draw = lambda c: 1.0 / c.eps + math.sqrt(1.0 / c.eps) * z
        hp = conditional_entropy(make_instance(g, draw(chp)), **kw)
        hm = conditional_entropy(make_instance(g, draw(chm)), **kw)
        slopes.append(scale * (hp - hm) / (2.0 * eps_step))
        if check_curvature:
            h0 = conditional_entropy(make_instance(g, draw(ch)), **kw)
            curvs.append(scale * (hp - 2.0 * h0 + hm) / eps_step ** 2)
    est = _estimate(slopes, 1.0, "entropy-fd",
                    _meta(source, ch, samples, seed, eps_step=eps_step))
    if check_curvature:
        bend = abs(np.mean(curvs)) * eps_step ** 2
        if bend > max(est.std_error, 1e-12):
            warnings.warn(f"eps_step may be too large: curvature term {bend:.2e} "
                          f"exceeds the standard error {est.std_error:.2e}")
    return est


def nishimori_residual(source, ch, p, samples, seed, cap=None):
    """(residual, se): |E<x_i>^{2p-1} - E<x_i>^{2p}| with the standard
    error of the paired per-sample difference (averaged over code bits);
    zero in expectation on symmetric channels at the channel's own
    parameter."""
    if p < 1:
        raise ValueError("p must be >= 1")
    rng = np.random.default_rng(seed)
    kw = {} if cap is None else {"cap": cap}
    diffs = []
    for inst, _ in _iter_instances(source, ch, samples, rng):
        m = all_marginals(inst, **kw)
        diffs.append(float(np.mean(m ** (2 * p - 1) - m ** (2 * p))))
    diffs = np.array(diffs)
    return (abs(float(diffs.mean())),
            float(diffs.std(ddof=1) / math.sqrt(len(diffs))))

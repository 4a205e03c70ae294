"""Binary-input memoryless symmetric channels (BSC, BIAWGNC) in the
half-loglikelihood domain.

All-one codeword convention throughout: the channel is summarized by the
density c(l) of the half-loglikelihood l = (1/2) ln[p(y|+1)/p(y|-1)] given
that +1 was sent.  Channel symmetry means c(-l) = exp(-2l) c(l).

Supported channels:

  * BSC(eps):      l is a two-atom variable, +-(1/2) ln((1-eps)/eps) with
                   probabilities (1-eps, eps); eps in (0, 1/2).
  * BIAWGNC(eps):  y = x + noise with noise variance eps, so l = y/eps is
                   Gaussian with mean 1/eps and variance 1/eps; eps > 0.

Besides sampling, the module provides the moment functionals used by the
correlation-decay bounds (exp_abs_moment, exp_neg_moment, delta_high,
delta_dual), the tanh-moment derivatives t2p, and the GEXIT kernel
integral d/deps of E[f(l)].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

BSC = "bsc"
BIAWGNC = "biawgnc"

#: saturation bound shared with the BP decoder and density evolution (nats)
L_SAT = 30.0

#: half width of the BIAWGNC quadrature window, in standard deviations of l
_QUAD_SIGMAS = 12.0

#: number of Gauss-Legendre nodes for batched kernel integrals
_GL_NODES = 481


def _fd_step(eps):
    """Central-difference step for eps-derivatives."""
    return 1e-4 * max(eps, 0.01)


@dataclass(frozen=True)
class ChannelModel:
    """A BMS channel with noise parameter eps.

    kind is "bsc" or "biawgnc".  eps_max is 1/2 for the BSC and +inf for
    the BIAWGNC; eps must lie strictly inside (0, eps_max).
    """

    kind: str
    eps: float

    def __post_init__(self):
        if self.kind not in (BSC, BIAWGNC):
            raise ValueError(f"unknown channel kind {self.kind!r}")
        if not 0.0 < self.eps < self.eps_max:
            raise ValueError(f"eps={self.eps} outside (0, {self.eps_max})")

    @property
    def eps_max(self):
        return 0.5 if self.kind == BSC else math.inf

    @classmethod
    def from_spec(cls, spec):
        """Parse a channel spec string such as 'bsc:0.25' or 'biawgnc:0.5'."""
        kind, _, val = spec.partition(":")
        if not val:
            raise ValueError(f"channel spec {spec!r} must look like 'bsc:0.25'")
        return cls(kind.strip().lower(), float(val))

    def spec(self):
        return f"{self.kind}:{self.eps:g}"

    # ----- BSC atoms / Gaussian parameters -------------------------------

    def bsc_atoms(self, eps=None):
        """(values, probabilities) of the two-atom BSC half-LLR."""
        if self.kind != BSC:
            raise ValueError("atoms only defined for the BSC")
        e = self.eps if eps is None else eps
        a = 0.5 * math.log((1.0 - e) / e)
        return np.array([a, -a]), np.array([1.0 - e, e])

    def gauss_params(self, eps=None):
        """(mean, variance) of the BIAWGNC half-LLR."""
        if self.kind != BIAWGNC:
            raise ValueError("gauss_params only defined for the BIAWGNC")
        e = self.eps if eps is None else eps
        return 1.0 / e, 1.0 / e

    def density(self, l, eps=None):
        """BIAWGNC half-LLR density c(l) (vectorized)."""
        mu, var = self.gauss_params(eps)
        l = np.asarray(l, dtype=float)
        return np.exp(-((l - mu) ** 2) / (2.0 * var)) / math.sqrt(2.0 * math.pi * var)

    def density_deps(self, l):
        """Analytic d c(l)/d eps for the BIAWGNC.

        With mu = var = 1/eps both shift at rate -1/eps^2, giving
        dc/deps = c(l) * [1/(2 eps) - (l-mu)^2/2 - (l-mu)/eps].
        """
        mu, _ = self.gauss_params()
        l = np.asarray(l, dtype=float)
        dl = l - mu
        return self.density(l) * (0.5 / self.eps - 0.5 * dl * dl - dl / self.eps)

    # ----- expectations ---------------------------------------------------

    def expectation(self, f, eps=None):
        """E[f(l)]: exact atom sum for the BSC, adaptive quadrature for
        the BIAWGNC on mean +- 12 standard deviations."""
        if self.kind == BSC:
            vals, probs = self.bsc_atoms(eps)
            return float(probs[0] * f(vals[0]) + probs[1] * f(vals[1]))
        mu, var = self.gauss_params(eps)
        sd = math.sqrt(var)
        lo, hi = mu - _QUAD_SIGMAS * sd, mu + _QUAD_SIGMAS * sd
        dens = lambda l: self.density(l, eps)
        pts = [0.0] if lo < 0.0 < hi else None
        val, _ = quad(lambda l: dens(l) * f(l), lo, hi, limit=200, points=pts)
        return val

    def tail_prob(self, H, eps=None):
        """P(|l| > H) (strict inequality)."""
        if self.kind == BSC:
            vals, probs = self.bsc_atoms(eps)
            return float(probs[np.abs(vals) > H].sum())
        mu, var = self.gauss_params(eps)
        sd = math.sqrt(var)
        from scipy.stats import norm

        return float(norm.sf(H, mu, sd) + norm.cdf(-H, mu, sd))

    def gl_grid(self):
        """Fixed Gauss-Legendre nodes/weights on the BIAWGNC window,
        premultiplied by nothing; used by the batched kernel integrals."""
        mu, var = self.gauss_params()
        sd = math.sqrt(var)
        x, w = np.polynomial.legendre.leggauss(_GL_NODES)
        lo, hi = mu - _QUAD_SIGMAS * sd, mu + _QUAD_SIGMAS * sd
        nodes = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
        weights = 0.5 * (hi - lo) * w
        return nodes, weights


@dataclass(frozen=True)
class LLRVector:
    """Half-loglikelihoods for one noise realization, with seed provenance."""

    values: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if not np.all(np.isfinite(self.values)):
            raise ValueError("LLR values must be finite")

    def __len__(self):
        return len(self.values)


def sample_llr(ch, n, seed):
    """n i.i.d. half-LLR draws under the all-one codeword; deterministic
    given seed (an int or a numpy Generator)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed) if not isinstance(seed, np.random.Generator) else seed
    prov = seed if isinstance(seed, int) else None
    if ch.kind == BSC:
        a = 0.5 * math.log((1.0 - ch.eps) / ch.eps)
        flips = rng.random(n) < ch.eps
        vals = np.where(flips, -a, a)
    else:
        mu, var = ch.gauss_params()
        vals = mu + math.sqrt(var) * rng.standard_normal(n)
    return LLRVector(vals, prov)


def t2p(ch, p):
    """d/deps of E[(tanh l)^{2p}].

    BSC closed form: E[tanh^{2p} l] = (1-2 eps)^{2p}, so the derivative is
    -4 p (1-2 eps)^{2p-1}.  BIAWGNC: central finite difference of the
    quadrature of E[tanh^{2p} l].
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    if ch.kind == BSC:
        return -4.0 * p * (1.0 - 2.0 * ch.eps) ** (2 * p - 1)
    h = _fd_step(ch.eps)
    f = lambda l: np.tanh(l) ** (2 * p)
    return (ch.expectation(f, ch.eps + h) - ch.expectation(f, ch.eps - h)) / (2.0 * h)


def t2p_sup(ch, p_max=200):
    """A practical bound on sup_{p>=1} |t2p|: the BSC maximum is attained at
    small p; for the BIAWGNC |t2p| <= integral of |dc/deps| which bounds all p."""
    if ch.kind == BSC:
        return max(abs(t2p(ch, p)) for p in range(1, p_max + 1))
    mu, var = ch.gauss_params()
    sd = math.sqrt(var)
    val, _ = quad(lambda l: abs(ch.density_deps(l)), mu - _QUAD_SIGMAS * sd,
                  mu + _QUAD_SIGMAS * sd, limit=200)
    return val


def exp_abs_moment(ch, m):
    """E[e^{m|l|}].  BSC closed form ((1-eps)/eps)^{m/2}; BIAWGNC quadrature."""
    if ch.kind == BSC:
        return ((1.0 - ch.eps) / ch.eps) ** (m / 2.0)
    return ch.expectation(lambda l: np.exp(m * np.abs(l)))


def exp_neg_moment(ch, s):
    """E[e^{-s l}] for s >= 0.

    BSC: eps^{s/2}(1-eps)^{1-s/2} + (1-eps)^{s/2} eps^{1-s/2}.
    BIAWGNC: e^{-s(1-s/2)/eps} (Gaussian moment generating function).
    """
    if s < 0:
        raise ValueError("s must be >= 0")
    e = ch.eps
    if ch.kind == BSC:
        return e ** (s / 2.0) * (1.0 - e) ** (1.0 - s / 2.0) + (1.0 - e) ** (s / 2.0) * e ** (1.0 - s / 2.0)
    return math.exp(-s * (1.0 - s / 2.0) / e)


def default_H(ch):
    """Threshold H(eps) for which delta_high -> 0 in the high-noise limit:
    ln((1-eps)/eps) for the BSC and 2 eps^{-1/4} for the BIAWGNC."""
    if ch.kind == BSC:
        return math.log((1.0 - ch.eps) / ch.eps)
    return 2.0 * ch.eps ** -0.25


def delta_high(ch, H):
    """delta(eps, H) = e^{4H} - 1 + P(|l| > H), the per-check weight of the
    self-avoiding-walk bound."""
    if H <= 0:
        raise ValueError("H must be > 0")
    return math.exp(4.0 * H) - 1.0 + ch.tail_prob(H)


def delta_dual(ch, s):
    """Delta(eps) = 2^{2s} E[e^{-4sl}] + E[e^{-8sl}], the per-variable weight
    of the dual cluster bound; requires 0 < s < 1/2."""
    if not 0.0 < s < 0.5:
        raise ValueError("s must lie in (0, 1/2)")
    return 2.0 ** (2 * s) * exp_neg_moment(ch, 4.0 * s) + exp_neg_moment(ch, 8.0 * s)


def gexit_kernel_integral(ch, f):
    """Integral of (dc(l)/deps) f(l) over l.

    BSC: central finite difference of the atom sum, including the
    eps-dependence of the atom locations.  BIAWGNC: quadrature against the
    analytic dc/deps.
    """
    if ch.kind == BSC:
        h = _fd_step(ch.eps)

        def F(e):
            vals, probs = ch.bsc_atoms(e)
            return probs[0] * f(vals[0]) + probs[1] * f(vals[1])

        return float((F(ch.eps + h) - F(ch.eps - h)) / (2.0 * h))
    mu, var = ch.gauss_params()
    sd = math.sqrt(var)
    lo, hi = mu - _QUAD_SIGMAS * sd, mu + _QUAD_SIGMAS * sd
    pts = [0.0] if lo < 0.0 < hi else None
    val, _ = quad(lambda l: ch.density_deps(l) * f(l), lo, hi, limit=200, points=pts)
    return val


def gexit_kernel_batch(ch, extrinsics):
    """Vectorized GEXIT kernel: for each extrinsic estimate M return
    integral of (dc/deps)(l) ln[(1 + M tanh l)/(1 + tanh l)].

    Agrees with gexit_kernel_integral applied pointwise; used by the
    Monte Carlo estimators where one integral per sample is needed.
    """
    M = np.asarray(extrinsics, dtype=float)
    if ch.kind == BSC:
        h = _fd_step(ch.eps)

        def F(e):
            vals, probs = ch.bsc_atoms(e)
            t = np.tanh(vals)
            # rows: the two atoms, columns: samples
            logs = np.log1p(np.outer(t, M)) - np.log1p(t)[:, None]
            return probs @ logs

        return (F(ch.eps + h) - F(ch.eps - h)) / (2.0 * h)
    nodes, weights = ch.gl_grid()
    dc = ch.density_deps(nodes) * weights
    t = np.tanh(nodes)
    logs = np.log1p(M[:, None] * t[None, :]) - np.log1p(t)[None, :]
    return logs @ dc

"""Log-space evaluators for every closed-form enumeration estimate.

All estimates live in log-space (binomial powers such as C(d,h)^n overflow
any fixed-width float immediately) and carry their correction terms and a
regime flag.  Formulas whose hypotheses are asymptotic are still evaluated at
small n: the flag records whether the finite-n version of the hypothesis
holds, it never refuses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import lgamma, log

import numpy as np

from .errors import DegreeSumMismatch, DomainError, RegimeViolation, SizeMismatch, Singular
from .graphcore import Graph, common_neighbour_range, signless_laplacian
from .rng import SeedSpec, Stream
from .symmat import SymmetricMatrix, determinant, inverse


@dataclass(frozen=True)
class AsymptoticEstimate:
    log_value: float
    formula_id: str
    correction_terms: dict[str, float] = field(default_factory=dict)
    regime_satisfied: bool | None = None

    def __post_init__(self):
        if not math.isfinite(self.log_value):
            raise ValueError("log_value must be finite")
        for k, v in self.correction_terms.items():
            if not math.isfinite(v):
                raise ValueError(f"correction term {k} is not finite")

    def value(self) -> float:
        return math.exp(self.log_value)

    def ratio_to(self, exact: int | float) -> float:
        """exp(log_value) / exact, computed in log-space."""
        return math.exp(self.log_value - math.log(exact))


@dataclass(frozen=True)
class DensityParams:
    """Relative density lambda = h/d of a target subgraph and its logit beta."""

    n: int
    d: int
    h: int

    @property
    def lam(self) -> float:
        return self.h / self.d

    @property
    def beta(self) -> float:
        lam = self.lam
        return 0.5 * log(lam / (1.0 - lam))

    @property
    def edge_variance_scale(self) -> float:
        """lambda*(1-lambda)*d, the quantity the dense regime bounds below."""
        return self.lam * (1.0 - self.lam) * self.d

    def __post_init__(self):
        if not (0 < self.h < self.d):
            raise DomainError(f"need 0 < h < d, got h={self.h}, d={self.d}")


@dataclass(frozen=True)
class TailBoundParams:
    """Switching-ratio quantities behind the overlap tail bound."""

    a: float  # forward switchings per common edge: 2(n-h-1)
    b: float  # reverse switchings cap: h^2 n
    rho: float  # b/a
    K: int  # max common edges lost per switch: 2h
    m_alpha: float

    def __post_init__(self):
        if self.rho <= 0:
            raise DomainError("rho must be positive")


@dataclass(frozen=True)
class GaussianField:
    """Centred Gaussian with covariance (2Q)^{-1}, the local limit of the
    edge-count fluctuation field."""

    covariance: SymmetricMatrix

    @staticmethod
    def from_graph(g: Graph) -> "GaussianField":
        q = signless_laplacian(g)
        qinv = inverse(q)
        return GaussianField(covariance=SymmetricMatrix(qinv.as_array() * 0.5))

    def sample(self, seed: SeedSpec, trials: int) -> np.ndarray:
        """(trials, n) draws via Cholesky of the covariance."""
        cov = self.covariance.as_array()
        n = cov.shape[0]
        chol = np.linalg.cholesky(cov)
        z = Stream(seed).normals(trials * n).reshape(trials, n)
        return z @ chol.T


# -- closed-form counting estimates -------------------------------------------


def _log_multinomial(total: int, parts: tuple[int, ...]) -> float:
    out = lgamma(total + 1)
    for p in parts:
        out -= lgamma(p + 1)
    return out


def _regular_product_log(n: int, parts: tuple[int, ...]) -> float:
    """log of ( prod_i p_i^{p_i n / 2} / D^{D n / 2} ) * multinomial(D; parts)^n.

    Shared by every product-form estimate so that the algebraically equal
    rearrangements evaluate bit-for-bit identically.  Parts are sorted to make
    the evaluation symmetric under permutation.
    """
    parts = tuple(sorted(parts))
    total = sum(parts)
    out = 0.0
    for p in parts:
        out += (n * p / 2.0) * log(p)
    out -= (n * total / 2.0) * log(total)
    out += n * _log_multinomial(total, parts)
    return out


def rhat(n: int, h: int, d: int) -> AsymptoticEstimate:
    """Product-form estimate of the number of h-regular spanning subgraphs of
    a d-regular graph: sqrt(2) e^{1/4} (h^h (d-h)^{d-h} / d^d)^{n/2} C(d,h)^n."""
    if not (0 < h < d):
        raise DomainError(f"need 0 < h < d, got h={h}, d={d}")
    if d > n - 1:
        raise DomainError(f"degree d={d} exceeds n-1={n - 1}")
    log_value = 0.5 * log(2.0) + 0.25 + _regular_product_log(n, (h, d - h))
    return AsymptoticEstimate(log_value=log_value, formula_id="rhat",
                              correction_terms={"prefactor": 0.5 * log(2.0) + 0.25})


def conjecture2_estimate(n: int, d1: int, d2: int) -> AsymptoticEstimate:
    """Expected count of d1-regular spanning subgraphs of a random
    (d1+d2)-regular graph; identical value to rhat(n, d1, d1+d2)."""
    if d1 <= 0 or d2 <= 0:
        raise DomainError("both degrees must be positive")
    if d1 + d2 > n - 1:
        raise DomainError(f"d1+d2={d1 + d2} exceeds n-1={n - 1}")
    base = rhat(n, d1, d1 + d2)
    return AsymptoticEstimate(log_value=base.log_value, formula_id="conjecture2",
                              correction_terms=dict(base.correction_terms))


def hm_partition_estimate(n: int, degrees: list[int]) -> AsymptoticEstimate:
    """Estimate of the ordered partition count of the complete graph into
    regular spanning subgraphs of the given degrees:
    e^{k/4} 2^{k/2} (prod lambda_i^{lambda_i})^{C(n,2)} multinomial^n."""
    degrees = tuple(degrees)
    if sum(degrees) != n - 1:
        raise DegreeSumMismatch(f"degrees sum to {sum(degrees)}, need {n - 1}")
    if any(d < 1 for d in degrees):
        raise DegreeSumMismatch("all degrees must be >= 1")
    k = len(degrees) - 1
    log_value = 0.5 * log(2.0) * k + 0.25 * k + _regular_product_log(n, degrees)
    return AsymptoticEstimate(log_value=log_value, formula_id="hm_partition",
                              correction_terms={"k": float(k)})


# -- quartic/cubic edge statistics and their Gaussian moments ------------------


def u_and_v(theta, g: Graph, lam: float) -> tuple[float, float]:
    """Quartic and cubic edge statistics of a vertex weighting:
    u = (1/24) lam(1-lam)(1-6lam+6lam^2) sum_{uv in G} (theta_u+theta_v)^4,
    v = (1/6)  lam(1-lam)(1-2lam)        sum_{uv in G} (theta_u+theta_v)^3."""
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != (g.n,):
        raise SizeMismatch(f"theta must have length {g.n}")
    if not (0.0 < lam < 1.0):
        raise DomainError("need 0 < lambda < 1")
    eu, ev = _edge_arrays(g)
    s = theta[eu] + theta[ev]
    cu = (1.0 / 24.0) * lam * (1.0 - lam) * (1.0 - 6.0 * lam + 6.0 * lam * lam)
    cv = (1.0 / 6.0) * lam * (1.0 - lam) * (1.0 - 2.0 * lam)
    return cu * float((s ** 4).sum()), cv * float((s ** 3).sum())


def _edge_arrays(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    e = g.edges()
    if not e:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    arr = np.array(e, dtype=np.int64)
    return arr[:, 0], arr[:, 1]


def isserlis_moments(g: Graph, lam: float) -> tuple[float, float]:
    """E[u(X)] and E[v^2(X)] for the Gaussian X with covariance (2Q)^{-1},
    via pair-partition expansion of the fourth and sixth moments.

    With sigma_ef = Cov(X_a+X_b, X_c+X_d) for edges e=ab, f=cd:
      E[(X_a+X_b)^4] = 3 sigma_ee^2,
      E[(X_a+X_b)^3 (X_c+X_d)^3] = 9 sigma_ee sigma_ff sigma_ef + 6 sigma_ef^3.
    """
    if not (0.0 < lam < 1.0):
        raise DomainError("need 0 < lambda < 1")
    q = signless_laplacian(g)
    qinv = inverse(q)  # raises Singular when Q is singular
    cov = qinv.as_array() * 0.5
    eu, ev = _edge_arrays(g)
    if eu.size == 0:
        return 0.0, 0.0
    # sigma[e, f] = cov[ae,af] + cov[ae,bf] + cov[be,af] + cov[be,bf]
    sigma = cov[np.ix_(eu, eu)] + cov[np.ix_(eu, ev)] + cov[np.ix_(ev, eu)] + cov[np.ix_(ev, ev)]
    diag = np.diag(sigma)
    cu = (1.0 / 24.0) * lam * (1.0 - lam) * (1.0 - 6.0 * lam + 6.0 * lam * lam)
    cv = (1.0 / 6.0) * lam * (1.0 - lam) * (1.0 - 2.0 * lam)
    exp_u = cu * 3.0 * float((diag ** 2).sum())
    pair_sum = 9.0 * float(diag @ sigma @ diag) + 6.0 * float((sigma ** 3).sum())
    exp_v2 = cv * cv * pair_sum
    return exp_u, exp_v2


def theorem5_count(g: Graph, h: int) -> AsymptoticEstimate:
    """Gaussian-corrected enumeration estimate for h-regular spanning
    subgraphs of a regular graph, with det Q and both moment corrections
    computed exactly from the graph."""
    cert = g.is_regular()
    if not cert.valid:
        raise DomainError("host graph must be regular")
    d = cert.degree
    if not (0 < h < d):
        raise DomainError(f"need 0 < h < d, got h={h}, d={d}")
    n = g.n
    lam = h / d
    sign, logdetq = determinant(signless_laplacian(g))
    if sign == 0:
        raise Singular("signless Laplacian is singular (bipartite host)")
    exp_u, exp_v2 = isserlis_moments(g, lam)
    u_term = 4.0 * exp_u / (lam ** 2 * (1.0 - lam) ** 2)
    v2_term = 4.0 * exp_v2 / (lam ** 3 * (1.0 - lam) ** 3)
    log_value = (
        log(2.0)
        - (d * n / 2.0) * (lam * log(lam) + (1.0 - lam) * log(1.0 - lam))
        - (n / 2.0) * log(2.0 * math.pi * lam * (1.0 - lam))
        - 0.5 * logdetq
        + u_term
        - v2_term
    )
    regime = lam * (1.0 - lam) * d >= n / log(n) if n >= 2 else False
    return AsymptoticEstimate(
        log_value=log_value,
        formula_id="theorem5",
        correction_terms={
            "logdetQ": logdetq,
            "exp_u": exp_u,
            "exp_v2": exp_v2,
            "u_term": u_term,
            "v2_term": v2_term,
        },
        regime_satisfied=regime,
    )


# -- determinant bands and the inverse approximation ---------------------------


def dense_band_halfwidth(alpha: float) -> float:
    """c_alpha = r^{3/2} / (1 - r^{1/2}) with r = (1-alpha)/alpha."""
    r = (1.0 - alpha) / alpha
    return r ** 1.5 / (1.0 - math.sqrt(r))


def detq_band(n: int, d: int, regime: str, param: float) -> tuple[float, float]:
    """(center_log, halfwidth) for log det Q of a d-regular graph on [n]:
    center = log 2 + n log d - 1/2 - n/(2d).

    regime="dense": requires d >= alpha*n with alpha > 1/2; halfwidth c_alpha.
    regime="quasirandom": requires n <= eps*d^2 with eps <= 1/4; halfwidth 4*eps.
    """
    center = log(2.0) + n * log(d) - 0.5 - n / (2.0 * d)
    if regime == "dense":
        alpha = param
        if not alpha > 0.5:
            raise RegimeViolation(f"dense regime needs alpha > 1/2, got {alpha}")
        if d < alpha * n:
            raise RegimeViolation(f"dense regime needs d >= alpha*n = {alpha * n}, got d={d}")
        return center, dense_band_halfwidth(alpha)
    if regime == "quasirandom":
        eps = param
        if eps > 0.25:
            raise RegimeViolation(f"quasirandom regime needs eps <= 1/4, got {eps}")
        if n > eps * d * d:
            raise RegimeViolation(f"quasirandom regime needs n <= eps*d^2 = {eps * d * d}")
        return center, 4.0 * eps
    raise DomainError(f"unknown regime {regime!r}")


def measured_codegree_eps(g: Graph) -> float:
    """Smallest eps available for g: the max relative codegree deviation from
    d^2/n, floored by the n <= eps*d^2 feasibility requirement."""
    cert = g.is_regular()
    if not cert.valid or cert.degree == 0:
        raise DomainError("codegree deviation needs a regular graph of positive degree")
    d, n = cert.degree, g.n
    lo, hi = common_neighbour_range(g)
    target = d * d / n
    eps_g = max(abs(lo / target - 1.0), abs(hi / target - 1.0))
    return max(eps_g, n / (d * d))


def qinv_approx(g: Graph) -> SymmetricMatrix:
    """Three-case central approximation of Q^{-1} for a d-regular graph:
    prefactor (1/d)(1 + 1/d - 1/n) times
      1 + 1/(2n)        on the diagonal,
      1/(2n) - 1/d      on adjacent pairs,
      1/(2n)            otherwise.
    The dropped error is +-4*eps/n inside the parentheses; see
    qinv_error_bound for the resulting entrywise bound."""
    cert = g.is_regular()
    if not cert.valid or cert.degree == 0:
        raise DomainError("need a regular graph of positive degree")
    d, n = cert.degree, g.n
    pref = (1.0 / d) * (1.0 + 1.0 / d - 1.0 / n)
    out = np.full((n, n), pref * (1.0 / (2.0 * n)))
    for u in range(n):
        for v in g.neighbours(u):
            out[u, v] = pref * (1.0 / (2.0 * n) - 1.0 / d)
        out[u, u] = pref * (1.0 + 1.0 / (2.0 * n))
    return SymmetricMatrix(out)


def qinv_error_bound(g: Graph, eps: float) -> float:
    """Entrywise gap bound for qinv_approx: 4 (1 + 1/d - 1/n) eps / (n d)."""
    cert = g.is_regular()
    d, n = cert.degree, g.n
    return 4.0 * (1.0 + 1.0 / d - 1.0 / n) * eps / (n * d)


# -- containment and avoidance estimates ---------------------------------------


def gim_probability(n: int, d: int, h_degrees) -> AsymptoticEstimate:
    """Probability that a uniform d-regular graph contains a fixed subgraph
    with the given degree sequence:
    (d/(n-1))^m exp( (n-1-d)/(4d) * (4m^2/n^2 + 4m/n - 2*mu) )."""
    degs = tuple(int(x) for x in (h_degrees.h if hasattr(h_degrees, "h") else h_degrees))
    if len(degs) != n:
        raise SizeMismatch(f"degree sequence has length {len(degs)}, expected {n}")
    if d < 1 or d > n - 1:
        raise DomainError(f"degree d={d} outside [1, {n - 1}]")
    total = sum(degs)
    if total % 2:
        raise DomainError("degree sequence sum must be even")
    m = total // 2
    sum_sq = sum(x * x for x in degs)
    factor = (n - 1 - d) / (4.0 * d)
    inner = 4 * m * m / (n * n) + 4 * m / n - 2 * (sum_sq / n)
    log_value = m * log(d / (n - 1)) + factor * inner
    regime = min(d, n - d - 1) >= n / log(n) if n >= 2 else False
    return AsymptoticEstimate(log_value=log_value, formula_id="gim_probability",
                              correction_terms={"m": float(m), "mu": sum_sq / n},
                              regime_satisfied=regime)


def gim_probability_regular(n: int, d: int, h: int) -> AsymptoticEstimate:
    """Regular-sequence specialisation: (d/(n-1))^{hn/2} exp(-(n-1-d)/(4d) h(h-2)).

    Algebraically identical to gim_probability on the constant sequence."""
    if (n * h) % 2:
        raise DomainError("need nh even")
    m = n * h // 2
    factor = (n - 1 - d) / (4.0 * d)
    inner = -(h * (h - 2))
    log_value = m * log(d / (n - 1)) + factor * inner
    regime = min(d, n - d - 1) >= n / log(n) if n >= 2 else False
    return AsymptoticEstimate(log_value=log_value, formula_id="gim_probability_regular",
                              correction_terms={"m": float(m), "mu": float(h * h)},
                              regime_satisfied=regime)


def m1985_estimate(n: int, d1: int, d2: int) -> AsymptoticEstimate:
    """Count of d1-regular graphs avoiding the edges of a d2-regular graph:
    (nd1)! / ((nd1/2)! 2^{nd1/2} (d1!)^n) *
    exp(-(d1-1)/2 - ((d1-1)/2)^2 - d1 d2/2)."""
    if d1 < 1:
        raise DomainError("need d1 >= 1")
    if (n * d1) % 2:
        raise DomainError("need n*d1 even")
    half = n * d1 // 2
    log_config = (
        lgamma(n * d1 + 1)
        - lgamma(half + 1)
        - half * log(2.0)
        - n * lgamma(d1 + 1)
    )
    corr = -(d1 - 1) / 2.0 - ((d1 - 1) / 2.0) ** 2 - d1 * d2 / 2.0
    regime = d1 * (d1 + d2) < math.sqrt(d1 * n)
    return AsymptoticEstimate(log_value=log_config + corr, formula_id="m1985",
                              correction_terms={"exp_correction": corr},
                              regime_satisfied=regime)


# -- overlap law ----------------------------------------------------------------


def overlap_pmf(h: int, m: int) -> float:
    """Poisson(h^2/2) mass at m: the leading-order law of the number of common
    edges of two h-regular graphs under a uniform relabelling.  The
    multiplicative 1 + O((h^4 + log^2 n)/n) correction is a caveat for the
    caller, never applied here."""
    if m < 0:
        raise DomainError("need m >= 0")
    rate = h * h / 2.0
    if rate == 0.0:
        return 1.0 if m == 0 else 0.0
    return math.exp(-rate + m * log(rate) - lgamma(m + 1))


def overlap_tail_bound(h: int, n: int, alpha: float) -> tuple[float, float, TailBoundParams]:
    """Tail bound for the common-edge count of two h-regular graphs under
    random relabelling: P(overlap >= m_alpha) <= 2 (e/alpha)^k with
    m_alpha = alpha h^2 n / (2(n-h-1)) and k = floor((alpha-1) h n / (4(n-h-1)))."""
    if alpha < math.e:
        raise DomainError(f"need alpha >= e, got {alpha}")
    if h < 1:
        raise DomainError("need h >= 1")
    if n <= h + 1:
        raise DomainError("need n > h + 1")
    a = 2.0 * (n - h - 1)
    b = float(h * h * n)
    m_alpha = alpha * h * h * n / (2.0 * (n - h - 1))
    k = math.floor((alpha - 1.0) * h * n / (4.0 * (n - h - 1)))
    bound = 2.0 * (math.e / alpha) ** k
    params = TailBoundParams(a=a, b=b, rho=b / a, K=2 * h, m_alpha=m_alpha)
    return m_alpha, bound, params

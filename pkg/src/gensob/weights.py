"""Calculus of O-regularly varying weight functions.

A weight is a positive Borel function on [1, inf) whose ratios
``alpha(lam*t)/alpha(t)`` stay within a fixed band while ``lam`` runs over a
bounded window; equivalently the ratio is pinched between two power laws,
and the best power-law exponents are the lower/upper Matuszewska indices.
Weights are immutable expression trees over a small primitive set, and every
evaluation happens in log-space so arguments up to ~1e300 stay finite.

Provided here:

* evaluation, symbolic index rules, and finite-window index estimation,
* a finite-window check of the bounded-ratio property (``check_or_window``),
* construction of interpolation parameters from a weight and a bracketing
  pair of Sobolev orders (``interp_param``) and the closure operation that
  recovers a weight from a parameter (``compose_param``),
* the auxiliary exponent function splitting a rough weight against a pair of
  orders (``eta_construct``),
* dyadic deciders for the convergence of ``int_1^inf omega(t)/t dt`` and the
  embedding constants derived from such sums (``dyadic_integral_test``,
  ``embed_hormander``, ``embed_nikolskii``).

Symbolic index rule table (exactness over generality):
``Power(r) -> (r, r)``; ``IterLogPower -> (0, 0)``; ``Scale -> (0, 0)``;
``OscPower(theta, delta, lam) -> (theta - delta, theta + delta)`` for
``lam < 1`` and ``(theta - sqrt(2) delta, theta + sqrt(2) delta)`` for
``lam = 1``; ``PowerCompose`` multiplies both indices by its exponent;
``Product`` adds indices only when at least one factor has equal indices
(Matuszewska indices are not additive in general); ``ExprPower`` scales and,
for negative exponents, swaps them.  Trees not covered report ``None``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

LOG2 = math.log(2.0)
_SQRT2 = math.sqrt(2.0)


class DomainError(ValueError):
    """Evaluation outside the weight's domain."""


class ConstraintError(ValueError):
    """A stated precondition is provably violated."""


# ---------------------------------------------------------------------------
# expression trees
# ---------------------------------------------------------------------------


class WeightExpr:
    """Base class for weight expression trees.

    Instances are immutable and safe to share across threads.  ``eval``
    accepts scalars or numpy arrays; ``log_value`` maps u = log(t) to
    log(alpha(t)) and is the primitive every node implements.
    """

    #: smallest admissible argument (1.0, or 0.0 for glue-extended trees)
    domain_min = 1.0

    def log_value(self, u):
        raise NotImplementedError

    def symbolic_indices(self):
        """Exact (sigma0, sigma1) per the rule table, or None."""
        return None

    def eval(self, t):
        arr = np.asarray(t, dtype=float)
        if self.domain_min > 0.0:
            if np.any(arr < self.domain_min * (1.0 - 1e-12)):
                raise DomainError(
                    f"weight defined for t >= {self.domain_min}, got {np.min(arr)}"
                )
        elif np.any(arr <= 0.0):
            raise DomainError("glued weight defined for t > 0")
        # values beyond double range saturate to inf; ratios and indices are
        # computed from log_value directly and never overflow
        with np.errstate(over="ignore"):
            out = np.exp(self.log_value(np.log(np.maximum(arr, np.finfo(float).tiny))))
        return float(out) if np.ndim(t) == 0 else out

    def __mul__(self, other):
        if isinstance(other, WeightExpr):
            return Product(self, other)
        return NotImplemented

    def __repr__(self):
        return json.dumps(weight_to_json(self))


@dataclass(frozen=True, repr=False)
class Power(WeightExpr):
    """t ** r."""

    r: float

    def log_value(self, u):
        return self.r * np.asarray(u, dtype=float)

    def symbolic_indices(self):
        return (self.r, self.r)


@dataclass(frozen=True, repr=False)
class Scale(WeightExpr):
    """The constant weight c > 0."""

    c: float

    def __post_init__(self):
        if not self.c > 0.0:
            raise ConstraintError("Scale requires c > 0")

    def log_value(self, u):
        return np.asarray(u, dtype=float) * 0.0 + math.log(self.c)

    def symbolic_indices(self):
        return (0.0, 0.0)


@dataclass(frozen=True, repr=False)
class IterLogPower(WeightExpr):
    """(log o ... o log t) ** k, depth-fold, glued to 1 below the tower point.

    The glue point is e for depth 1, e**e for depth 2, and so on; the j-fold
    iterated logarithm equals 1 there, so the glue is continuous (not smooth).
    """

    depth: int
    k: float

    def __post_init__(self):
        if int(self.depth) != self.depth or self.depth < 1:
            raise ConstraintError("IterLogPower requires integer depth >= 1")

    def log_value(self, u):
        v = np.asarray(u, dtype=float)
        glued = v <= 1.0
        for _ in range(self.depth - 1):
            v = np.log(np.where(glued, math.e, v))
            glued = glued | (v <= 1.0)
        return np.where(glued, 0.0, self.k * np.log(np.where(glued, math.e, v)))

    def symbolic_indices(self):
        return (0.0, 0.0)


@dataclass(frozen=True, repr=False)
class OscPower(WeightExpr):
    """t ** (theta + delta * sin((log log t) ** lam)) for t > e, t ** theta below.

    The two Matuszewska indices genuinely differ here; lam > 1 would leave the
    bounded-ratio class entirely and is rejected.
    """

    theta: float
    delta: float
    lam: float

    def __post_init__(self):
        if not self.delta > 0.0:
            raise ConstraintError("OscPower requires delta > 0")
        if not 0.0 < self.lam <= 1.0:
            raise ConstraintError(
                "OscPower requires lam in (0, 1]; larger lam is not O-regular"
            )

    def log_value(self, u):
        u = np.asarray(u, dtype=float)
        inner = np.log(np.maximum(u, 1.0)) ** self.lam
        expo = np.where(u <= 1.0, self.theta, self.theta + self.delta * np.sin(inner))
        return expo * u

    def symbolic_indices(self):
        spread = _SQRT2 * self.delta if self.lam == 1.0 else self.delta
        return (self.theta - spread, self.theta + spread)


@dataclass(frozen=True, repr=False)
class Product(WeightExpr):
    left: WeightExpr
    right: WeightExpr

    @property
    def domain_min(self):
        return max(self.left.domain_min, self.right.domain_min)

    def log_value(self, u):
        return self.left.log_value(u) + self.right.log_value(u)

    def symbolic_indices(self):
        a, b = self.left.symbolic_indices(), self.right.symbolic_indices()
        if a is None or b is None:
            return None
        # additivity is exact only if one factor has equal indices
        if a[0] == a[1] or b[0] == b[1]:
            return (a[0] + b[0], a[1] + b[1])
        return None


@dataclass(frozen=True, repr=False)
class PowerCompose(WeightExpr):
    """t -> inner(t ** theta) with theta > 0."""

    inner: WeightExpr
    theta: float

    def __post_init__(self):
        if not self.theta > 0.0:
            raise ConstraintError("PowerCompose requires theta > 0")

    @property
    def domain_min(self):
        return self.inner.domain_min ** (1.0 / self.theta)

    def log_value(self, u):
        return self.inner.log_value(self.theta * np.asarray(u, dtype=float))

    def symbolic_indices(self):
        s = self.inner.symbolic_indices()
        if s is None:
            return None
        return (self.theta * s[0], self.theta * s[1])


@dataclass(frozen=True, repr=False)
class ExprPower(WeightExpr):
    """inner(t) ** a (pointwise power of a weight)."""

    inner: WeightExpr
    a: float

    @property
    def domain_min(self):
        return self.inner.domain_min

    def log_value(self, u):
        return self.a * self.inner.log_value(u)

    def symbolic_indices(self):
        s = self.inner.symbolic_indices()
        if s is None:
            return None
        lo, hi = self.a * s[0], self.a * s[1]
        return (lo, hi) if self.a >= 0 else (hi, lo)


@dataclass(frozen=True, repr=False)
class PiecewiseGlue(WeightExpr):
    """inner(max(t, t_star)); constant inner(t_star) below the boundary.

    Extends the domain to all t > 0, which is how interpolation parameters
    acquire their constant branch below 1.
    """

    inner: WeightExpr
    t_star: float = 1.0

    def __post_init__(self):
        if not self.t_star >= 1.0:
            raise ConstraintError("PiecewiseGlue requires t_star >= 1")

    domain_min = 0.0

    def log_value(self, u):
        return self.inner.log_value(np.maximum(np.asarray(u, dtype=float), math.log(self.t_star)))

    def symbolic_indices(self):
        return self.inner.symbolic_indices()


@dataclass(frozen=True, repr=False)
class ComposeRatio(WeightExpr):
    """t -> outer(num(t) / den(t)).

    The ratio may fall below 1, so the outer tree must be defined on (0, inf);
    wrap it in PiecewiseGlue if it is not.
    """

    outer: WeightExpr
    num: WeightExpr
    den: WeightExpr

    def __post_init__(self):
        if self.outer.domain_min > 0.0:
            raise ConstraintError(
                "ComposeRatio outer must be defined on (0, inf); wrap it in PiecewiseGlue"
            )

    @property
    def domain_min(self):
        return max(self.num.domain_min, self.den.domain_min)

    def log_value(self, u):
        u = np.asarray(u, dtype=float)
        return self.outer.log_value(self.num.log_value(u) - self.den.log_value(u))


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------

_JSON_OPS = {
    "power",
    "scale",
    "iter_log",
    "osc_power",
    "product",
    "power_compose",
    "expr_power",
    "glue",
    "compose_ratio",
}


def weight_to_json(expr: WeightExpr) -> dict:
    """Serializable dict form of a weight tree (schema: schemas/weight_expr_schema.json)."""
    if isinstance(expr, Power):
        return {"op": "power", "r": expr.r}
    if isinstance(expr, Scale):
        return {"op": "scale", "c": expr.c}
    if isinstance(expr, IterLogPower):
        return {"op": "iter_log", "depth": expr.depth, "k": expr.k}
    if isinstance(expr, OscPower):
        return {"op": "osc_power", "theta": expr.theta, "delta": expr.delta, "lam": expr.lam}
    if isinstance(expr, Product):
        args = []
        for side in (expr.left, expr.right):
            node = weight_to_json(side)
            if node["op"] == "product":
                args.extend(node["args"])
            else:
                args.append(node)
        return {"op": "product", "args": args}
    if isinstance(expr, PowerCompose):
        return {"op": "power_compose", "inner": weight_to_json(expr.inner), "theta": expr.theta}
    if isinstance(expr, ExprPower):
        return {"op": "expr_power", "inner": weight_to_json(expr.inner), "a": expr.a}
    if isinstance(expr, PiecewiseGlue):
        return {"op": "glue", "inner": weight_to_json(expr.inner), "t_star": expr.t_star}
    if isinstance(expr, ComposeRatio):
        return {
            "op": "compose_ratio",
            "outer": weight_to_json(expr.outer),
            "num": weight_to_json(expr.num),
            "den": weight_to_json(expr.den),
        }
    raise TypeError(f"unknown weight node {type(expr).__name__}")


def weight_from_json(obj) -> WeightExpr:
    """Parse the dict/JSON-string form produced by :func:`weight_to_json`."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, dict) or "op" not in obj:
        raise ValueError("weight JSON must be an object with an 'op' field")
    op = obj["op"]
    if op not in _JSON_OPS:
        raise ValueError(f"unknown weight op {op!r}")

    def _num(key):
        val = obj[key]
        if not isinstance(val, (int, float)) or isinstance(val, bool):
            raise ValueError(f"field {key!r} of {op!r} must be a number")
        return float(val)

    if op == "power":
        return Power(_num("r"))
    if op == "scale":
        return Scale(_num("c"))
    if op == "iter_log":
        return IterLogPower(int(obj["depth"]), _num("k"))
    if op == "osc_power":
        return OscPower(_num("theta"), _num("delta"), _num("lam"))
    if op == "product":
        args = obj["args"]
        if not isinstance(args, list) or len(args) < 2:
            raise ValueError("product needs a list of at least two args")
        tree = weight_from_json(args[0])
        for sub in args[1:]:
            tree = Product(tree, weight_from_json(sub))
        return tree
    if op == "power_compose":
        return PowerCompose(weight_from_json(obj["inner"]), _num("theta"))
    if op == "expr_power":
        return ExprPower(weight_from_json(obj["inner"]), _num("a"))
    if op == "glue":
        return PiecewiseGlue(weight_from_json(obj["inner"]), _num("t_star"))
    return ComposeRatio(
        weight_from_json(obj["outer"]),
        weight_from_json(obj["num"]),
        weight_from_json(obj["den"]),
    )


# ---------------------------------------------------------------------------
# index estimation and the bounded-ratio window check
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IndexEstimate:
    sigma0_sym: float | None
    sigma1_sym: float | None
    sigma0_win: float
    sigma1_win: float
    window: tuple
    lambda_max: float


@dataclass(frozen=True)
class WindowGrid:
    """Sampling grid for window checks: log grids in t and in the ratio scale."""

    t_min: float = 1.0
    t_max: float = 1e8
    n_t: int = 241
    n_lambda: int = 17


@dataclass(frozen=True)
class OrCheckResult:
    b: float
    c_est: float
    grid: WindowGrid
    verdict: str  # "pass" | "fail"
    segment_max: tuple


def _log_values(alpha, u):
    if isinstance(alpha, WeightExpr):
        return alpha.log_value(u)
    t = np.exp(u)
    try:
        vals = np.asarray(alpha(t), dtype=float)
        if vals.shape != t.shape:
            raise TypeError
    except TypeError:
        vals = np.array([alpha(x) for x in np.atleast_1d(t)], dtype=float).reshape(t.shape)
    if np.any(vals <= 0.0):
        raise DomainError("weight callbacks must be strictly positive")
    return np.log(vals)


def indices(alpha, window=(1e4, 1e12), lambda_max=16.0, n_t=96, n_lambda=16) -> IndexEstimate:
    """Symbolic Matuszewska indices plus finite-window estimates.

    The window estimate for the lower/upper index is the min/max over a log
    grid of ratio scales lam <= lambda_max of the inf/sup over t in the window
    of log(alpha(lam t)/alpha(t)) / log(lam).  On power-log trees the window
    values approach the symbolic ones as the window moves out; the oscillating
    family traverses its range only at astronomical t, so for it the symbolic
    table is authoritative and the window values are merely what the window saw.
    """
    if not (window[0] >= 1.0 and window[1] > window[0]):
        raise ConstraintError("window must satisfy 1 <= t_min < t_max")
    if not lambda_max > 1.0:
        raise ConstraintError("lambda_max must exceed 1")
    sym = alpha.symbolic_indices() if isinstance(alpha, WeightExpr) else None
    u = np.log(np.geomspace(window[0], window[1], n_t))
    base = _log_values(alpha, u)
    lo, hi = math.inf, -math.inf
    for lam in np.geomspace(lambda_max ** (1.0 / n_lambda), lambda_max, n_lambda):
        dl = math.log(lam)
        h = (_log_values(alpha, u + dl) - base) / dl
        lo = min(lo, float(h.min()))
        hi = max(hi, float(h.max()))
    return IndexEstimate(
        sigma0_sym=None if sym is None else sym[0],
        sigma1_sym=None if sym is None else sym[1],
        sigma0_win=lo,
        sigma1_win=hi,
        window=(float(window[0]), float(window[1])),
        lambda_max=float(lambda_max),
    )


def check_or_window(alpha, b, grid: WindowGrid | None = None, c_cap=None) -> OrCheckResult:
    """Estimate the ratio constant on a window and judge membership.

    ``c_est`` is the sampled max of max(ratio, 1/ratio) over t in the window
    and lam in [1, b].  Trees built from the primitives are O-regular by
    construction and always pass (unless an explicit ``c_cap`` is given).
    Plain callables are judged by a trend test: the per-segment maxima of the
    ratio must not blow up across the window.
    """
    if not b > 1.0:
        raise ConstraintError("b must exceed 1")
    grid = grid or WindowGrid()
    u = np.log(np.geomspace(grid.t_min, grid.t_max, grid.n_t))
    base = _log_values(alpha, u)
    worst = np.zeros_like(u)
    for lam in np.geomspace(1.0, b, grid.n_lambda):
        dl = math.log(lam)
        if dl == 0.0:
            continue
        worst = np.maximum(worst, np.abs(_log_values(alpha, u + dl) - base))
    c_est = float(np.exp(worst.max()))
    n_seg = 8
    seg = np.array_split(worst, n_seg)
    seg_max = tuple(float(np.exp(s.max())) for s in seg)
    if c_cap is not None:
        verdict = "pass" if c_est <= c_cap else "fail"
    elif isinstance(alpha, WeightExpr):
        verdict = "pass"
    else:
        head = max(seg_max[: n_seg // 2])
        tail = max(seg_max[-2:])
        verdict = "fail" if tail > 3.0 * head else "pass"
    return OrCheckResult(b=float(b), c_est=c_est, grid=grid, verdict=verdict, segment_max=seg_max)


# ---------------------------------------------------------------------------
# interpolation parameters
# ---------------------------------------------------------------------------


def interp_param(alpha: WeightExpr, r0: float, r1: float) -> WeightExpr:
    """Interpolation parameter of a weight between bracketing orders r0 < r1.

    Returns the tree for psi(t) = t^(-r0/(r1-r0)) * alpha(t^(1/(r1-r0))) on
    t >= 1, extended by the constant alpha(1) below 1.  Requires
    r0 < sigma0(alpha) and r1 > sigma1(alpha) whenever the symbolic indices
    exist; with indices unavailable the caller asserts the bracketing.
    """
    if not r0 < r1:
        raise ConstraintError(f"requires r0 < r1; got r0={r0}, r1={r1}")
    sym = alpha.symbolic_indices()
    if sym is not None:
        if not r0 < sym[0]:
            raise ConstraintError(
                f"requires r0 < sigma0(alpha); got r0={r0}, sigma0={sym[0]}"
            )
        if not r1 > sym[1]:
            raise ConstraintError(
                f"requires r1 > sigma1(alpha); got r1={r1}, sigma1={sym[1]}"
            )
    gap = r1 - r0
    body = Product(Power(-r0 / gap), PowerCompose(alpha, 1.0 / gap))
    return PiecewiseGlue(body, 1.0)


def compose_param(alpha0: WeightExpr, alpha1: WeightExpr, psi: WeightExpr) -> WeightExpr:
    """Weight recovered from a parameter: t -> alpha0(t) * psi(alpha1(t)/alpha0(t)).

    Requires alpha0/alpha1 bounded near infinity; rejected when the symbolic
    indices prove otherwise.  The parameter is glued to a constant below 1 if
    it is not already defined there.
    """
    s0, s1 = alpha0.symbolic_indices() or (None, None)
    t0, t1 = alpha1.symbolic_indices() or (None, None)
    if s0 is not None and t1 is not None and s0 > t1 + 1e-12:
        raise ConstraintError(
            "alpha0/alpha1 is provably unbounded near infinity: "
            f"sigma0(alpha0)={s0} > sigma1(alpha1)={t1}"
        )
    if psi.domain_min > 0.0:
        psi = PiecewiseGlue(psi, 1.0)
    return Product(alpha0, ComposeRatio(psi, alpha1, alpha0))


def eta_construct(phi: WeightExpr, s0: float, s1: float, lam: float):
    """Auxiliary exponent weight for a rough factor phi against orders (s0, s1).

    Returns ``(eta, theta)``.  When the upper index of phi is >= -1/2 the
    construction is eta(t) = t^((1-theta) s1) * phi(t^theta) with
    theta = (s1 - lam)/(s1 - s0) in [0, 1); otherwise eta(t) = t^lam and
    theta is None.  In either branch eta(t) equals
    t^lam * psi(t^(s1-lam)) for psi = interp_param(phi * t^(2q), s0+2q, s1+2q)
    with any order shift 2q, provided phi(1) = 1 (the constant branch of psi
    contributes the factor phi(1)).
    """
    sym = phi.symbolic_indices()
    if sym is None:
        raise ConstraintError(
            "eta_construct needs symbolic indices for phi; tree not covered by the rule table"
        )
    sig0, sig1 = sym
    if not s0 < sig0:
        raise ConstraintError(f"requires s0 < sigma0(phi); got s0={s0}, sigma0={sig0}")
    if not s1 > sig1:
        raise ConstraintError(f"requires s1 > sigma1(phi); got s1={s1}, sigma1={sig1}")
    if not lam > -0.5:
        raise ConstraintError(f"requires lam > -1/2; got lam={lam}")
    if sig1 >= -0.5:
        if not lam <= s1:
            raise ConstraintError(
                f"requires lam <= s1 when sigma1(phi) >= -1/2; got lam={lam}, s1={s1}"
            )
        if not lam > s0:
            raise ConstraintError(f"requires lam > s0; got lam={lam}, s0={s0}")
        theta = (s1 - lam) / (s1 - s0)
        if theta == 0.0:
            eta = Product(Power(s1), Scale(phi.eval(1.0)))
        else:
            eta = Product(Power((1.0 - theta) * s1), PowerCompose(phi, theta))
        return eta, theta
    if not s1 < -0.5:
        raise ConstraintError(
            f"requires s1 < -1/2 when sigma1(phi) < -1/2; got s1={s1}"
        )
    return Power(lam), None


# ---------------------------------------------------------------------------
# dyadic convergence deciders
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DyadicIntegralResult:
    verdict: str  # "converges" | "diverges" | "inconclusive"
    partial_sums: np.ndarray
    reason: str

    @property
    def converges(self):
        return self.verdict == "converges"


@dataclass(frozen=True)
class NikolskiiEmbedding:
    verdict: str
    constant: float | None
    tail_bound: float | None
    partial_sums: np.ndarray
    reason: str

    @property
    def converges(self):
        return self.verdict == "converges"


def dyadic_integral_test(omega: WeightExpr, k_max: int = 60) -> DyadicIntegralResult:
    """Decide int_1^inf omega(t)/t dt < inf via the dyadic sum of omega(2^k).

    Symbolic shortcut: a negative upper index forces convergence, a positive
    lower index divergence.  Otherwise the dyadic partial sums are classified
    by a trend test: a sustained increment ratio a_{k+1}/a_k <= 1 - 1.25/(k+1)
    over the last quarter of terms fits a summable power model, while
    doubling increments S(m) - S(m/2) that fail to shrink indicate divergence.
    Borderline decay near 1/k is honestly reported as inconclusive.
    """
    k_max = int(k_max)
    if k_max < 16:
        raise ConstraintError("k_max >= 16 required by the trend test")
    ks = np.arange(k_max + 1, dtype=float)
    log_a = np.asarray(omega.log_value(ks * LOG2), dtype=float)
    a = np.exp(np.minimum(log_a, 700.0))
    sums = np.cumsum(a)
    sym = omega.symbolic_indices()
    if sym is not None:
        if sym[1] < 0.0:
            return DyadicIntegralResult("converges", sums, "upper index negative")
        if sym[0] > 0.0:
            return DyadicIntegralResult("diverges", sums, "lower index positive")
    if log_a[-1] > 690.0:
        return DyadicIntegralResult("diverges", sums, "terms exceed double range")
    q = (3 * k_max) // 4
    ratio = a[q + 1 :] / a[q:-1]
    thresholds = 1.0 - 1.25 / (np.arange(q, k_max, dtype=float) + 1.0)
    if np.all(ratio <= thresholds):
        return DyadicIntegralResult(
            "converges", sums, "tail increments decay like k^-1.25 or faster"
        )
    d2 = sums[k_max] - sums[k_max // 2]
    d1 = sums[k_max // 2] - sums[k_max // 4]
    if d1 > 0.0 and d2 / d1 >= 0.99:
        return DyadicIntegralResult("diverges", sums, "doubling increments do not shrink")
    return DyadicIntegralResult("inconclusive", sums, "borderline decay at this window")


def embed_hormander(alpha: WeightExpr, p: int, n: int, k_max: int = 60) -> DyadicIntegralResult:
    """Sup-norm embedding decider: convergence of int t^(2p+n-1) / alpha(t)^2 dt.

    Reduces to the dyadic test for omega(t) = t^(2p+n) * alpha(t)^-2.
    """
    if p < 0 or n < 1:
        raise ConstraintError("requires p >= 0 and n >= 1")
    omega = Product(Power(float(2 * p + n)), ExprPower(alpha, -2.0))
    return dyadic_integral_test(omega, k_max)


def embed_nikolskii(alpha: WeightExpr, s: float, k_max: int = 60) -> NikolskiiEmbedding:
    """Embedding of the dyadic-sup space of order s into the alpha-weighted space.

    Decides convergence of sum_k alpha(2^k)^2 4^(-s k) (equivalently of
    int alpha(t)^2 t^(-2s-1) dt) and, in the convergent case, returns the
    truncated constant together with a model-based tail bound: geometric from
    the observed tail ratio when the upper symbolic index of the summand is
    negative, else the k^-1.25 power model 4 * a_last * k_max.
    """
    omega = Product(ExprPower(alpha, 2.0), Power(-2.0 * s))
    res = dyadic_integral_test(omega, k_max)
    if not res.converges:
        return NikolskiiEmbedding(res.verdict, None, None, res.partial_sums, res.reason)
    a = np.diff(res.partial_sums, prepend=0.0)
    k_max = len(a) - 1
    q = (3 * k_max) // 4
    bounds = [4.0 * a[-1] * k_max]
    sym = omega.symbolic_indices()
    if sym is not None and sym[1] < 0.0:
        rho = max(float(np.max(a[q + 1 :] / a[q:-1])), 2.0 ** sym[1])
        if rho < 1.0:
            bounds.append(a[-1] * rho / (1.0 - rho))
    return NikolskiiEmbedding(
        "converges",
        float(res.partial_sums[-1]),
        float(min(bounds)),
        res.partial_sums,
        res.reason,
    )

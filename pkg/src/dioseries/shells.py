"""Dyadic shells of the absolute series for irrational theta.

With e = distance of n*theta to the nearest point where |f| = 1, we have
|f(pi n theta)| = cos(pi e).  Shell s collects 1 - 2^-s <= |f| < 1 - 2^-(s+1),
i.e. e in (b_{s+1}, b_s] with b_s = arccos(1 - 2^-s) / pi.  Since b_0 = 1/2,
shell 0 is the bulk |f| < 1/2 and the shells partition every n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from flint import arb

from . import kernels
from .angles import SeriesKind, as_alpha, exact_rational, fixed_point, parse_theta, reduce_angle
from .ball import BoundedReal, PrecisionBudget, _arb_to_fraction, default_budget, to_arb, working_precision
from .cf import estimate_mu, reference_mu
from .errors import InsufficientData, InsufficientExpansion, PrecisionExhausted, PreconditionError, RationalInput
from .kernels._scalar import TINY, U
from .series import _alpha_float

BLOCK = 1 << 20
DEFAULT_NMAX = 10**6
TRUNCATION_FRACTION = 0.01


def boundary(s: int, bits: int = 128) -> arb:
    """b_s = arccos(1 - 2^-s) / pi."""
    with working_precision(bits):
        x = 1 - arb(2) ** (-s)
        return x.acos() / arb.pi()


def _boundary_floats(s_max: int):
    """Outward float bounds of b_1..b_{s_max+1}, ascending (deepest first)."""
    lo, hi = [], []
    for s in range(s_max + 1, 0, -1):
        b = boundary(s)
        lo.append(math.nextafter(float(b.lower()), -math.inf))
        hi.append(math.nextafter(float(b.upper()), math.inf))
    return np.array(lo), np.array(hi)


def arccos_bound_holds(eps) -> bool:
    """arccos(1 - eps) < 2 sqrt(eps), checked in ball arithmetic."""
    with working_precision(128):
        e = to_arb(eps)
        return bool((1 - e).acos() < 2 * e.sqrt())


@dataclass
class ShellRecord:
    s: int
    epsilon: Fraction
    kind: SeriesKind
    theta: str
    alpha: Fraction
    N_max: int
    count: int
    first: Optional[int]
    last: Optional[int]
    min_gap: Optional[int]
    min_normalized_gap: Optional[float]
    shell_sum: BoundedReal
    truncated: bool
    tail_bound: float
    members: Optional[np.ndarray] = None

    @property
    def gaps(self) -> Optional[np.ndarray]:
        return None if self.members is None else np.diff(self.members)


@dataclass
class ShellSummary:
    kind: SeriesKind
    theta: str
    alpha: Fraction
    N_max: int
    s_max: int
    records: List[ShellRecord]
    deep_count: int
    deep_sum: BoundedReal
    ambiguous_resolved: int = 0

    @property
    def total(self) -> BoundedReal:
        with working_precision(128):
            acc = self.deep_sum.ball
            for r in self.records:
                acc = acc + r.shell_sum.ball
        return BoundedReal(acc)

    def as_tuples(self):
        return [(r.s, r.shell_sum, r.truncated) for r in self.records]


class _ShellAcc:
    __slots__ = ("count", "first", "last", "min_gap", "min_norm", "sums", "rads", "members")

    def __init__(self, keep: bool):
        self.count = 0
        self.first = None
        self.last = None
        self.min_gap = None
        self.min_norm = math.inf
        self.sums = []
        self.rads = []
        self.members = [] if keep else None

    def add(self, n: np.ndarray, v: np.ndarray, r: np.ndarray):
        m = len(n)
        if m == 0:
            return
        k = np.arange(self.count + 1, self.count + m + 1, dtype=np.float64)
        self.min_norm = min(self.min_norm, float(np.min(n / k)))
        gaps = np.diff(n)
        cand = []
        if len(gaps):
            cand.append(int(gaps.min()))
        if self.last is not None:
            cand.append(int(n[0] - self.last))
        if cand:
            g = min(cand)
            self.min_gap = g if self.min_gap is None else min(self.min_gap, g)
        if self.first is None:
            self.first = int(n[0])
        self.last = int(n[-1])
        self.count += m
        self.sums.append(math.fsum(v))
        self.rads.append(math.fsum(r))
        if self.members is not None:
            self.members.append(n.copy())

    def ball(self) -> BoundedReal:
        total = math.fsum(self.sums)
        err = U * math.fsum(abs(x) for x in self.sums) + U * abs(total) + TINY
        rad = math.fsum(self.rads) * (1.0 + 4.0 * U * (len(self.rads) + 2))
        return BoundedReal.from_mid_rad(total, math.nextafter(err + rad, math.inf))


def _require_irrational(theta):
    if exact_rational(theta) is not None:
        raise RationalInput("shells are degenerate for rational theta; use the classifier")


def _resolve_exact(n: int, theta, kind: SeriesKind, s_max: int, budget: PrecisionBudget) -> int:
    """Shell index of n by exact interval comparison, escalating precision."""
    which = "half" if kind is SeriesKind.SIN else "int"
    target = min(budget.target_radius, 1e-30)
    for step in range(6):
        b = PrecisionBudget(budget.working_digits * (2**step) + 20, target * 10.0 ** (-10 * step))
        try:
            red = reduce_angle(n, theta, b)
        except PrecisionExhausted:
            if step == 0:
                raise
            break
        lo, hi = red.distance_bounds(which)
        bits = b.bits_for_index(n)
        s = 0
        decided = True
        for j in range(1, s_max + 2):
            bj = boundary(j, bits)
            bl, bh = _arb_to_fraction(bj.lower()), _arb_to_fraction(bj.upper())
            if hi <= bl:
                s = j
            elif lo > bh:
                break
            else:
                decided = False
                break
        if decided:
            return s
    raise PrecisionExhausted(f"cannot place n={n} relative to a shell boundary")


def shell_sums(
    theta,
    kind,
    alpha,
    s_max: int,
    N_max: int = DEFAULT_NMAX,
    budget: Optional[PrecisionBudget] = None,
    keep_members_from: Optional[int] = None,
    backend: Optional[str] = None,
) -> ShellSummary:
    """Single pass over n <= N_max filling shells 0..s_max plus the deeper remainder."""
    theta = parse_theta(theta)
    kind = SeriesKind.parse(kind)
    alpha = as_alpha(alpha)
    _require_irrational(theta)
    if s_max < 0:
        raise PreconditionError("s_max must be >= 0")
    if N_max < 1 or N_max > kernels.MAX_INDEX:
        raise PreconditionError(f"N_max must lie in [1, 2**31 - 1], got {N_max}")
    budget = budget or default_budget()
    fp = fixed_point(theta, N_max, budget)
    limbs = fp.limbs
    K = kernels.get_backend(backend)
    af, ae = _alpha_float(alpha)
    b_lo, b_hi = _boundary_floats(s_max)
    nb = len(b_lo)
    accs = [
        _ShellAcc(keep_members_from is not None and keep_members_from <= s <= s_max) for s in range(s_max + 2)
    ]
    is_cos = kind is SeriesKind.COS
    resolved = 0
    for lo in range(1, N_max + 1, BLOCK):
        hi = min(lo + BLOCK, N_max + 1)
        e, eerr, val, rad = K.angle_terms(limbs, fp.err, is_cos, False, af, ae, lo, hi)
        n = np.arange(lo, hi, dtype=np.int64)
        s_min = nb - np.searchsorted(b_lo, e + eerr, side="left")
        s_max_ = nb - np.searchsorted(b_hi, e - eerr, side="left")
        sidx = s_min
        amb = np.nonzero(s_min != s_max_)[0]
        if len(amb):
            sidx = sidx.copy()
            for i in amb:
                sidx[i] = _resolve_exact(int(n[i]), theta, kind, s_max, budget)
            resolved += len(amb)
        counts = np.bincount(sidx, minlength=s_max + 2)
        order = np.argsort(sidx, kind="stable")
        start = 0
        for s, c in enumerate(counts):
            if c:
                idx = order[start : start + c]
                accs[s].add(n[idx], val[idx], rad[idx])
                start += c
    records = []
    with working_precision(128):
        for s in range(s_max + 1):
            a = accs[s]
            ssum = a.ball()
            eps = Fraction(1, 1 << s)
            half = arb(2) ** (-s - 1)
            tail = (1 - half) ** (N_max + 1) / ((to_arb(alpha) * arb(N_max + 1).log()).exp() * half)
            tail_u = float(tail.upper())
            tail_u = math.nextafter(tail_u, math.inf)
            truncated = a.count == 0 or tail_u > TRUNCATION_FRACTION * float(ssum.lower)
            members = np.concatenate(a.members) if a.members is not None and a.members else (
                np.zeros(0, dtype=np.int64) if a.members is not None else None
            )
            records.append(
                ShellRecord(
                    s,
                    eps,
                    kind,
                    theta.label(),
                    alpha,
                    N_max,
                    a.count,
                    a.first,
                    a.last,
                    a.min_gap,
                    a.min_norm if a.count else None,
                    ssum,
                    truncated,
                    tail_u,
                    members,
                )
            )
    deep = accs[s_max + 1]
    return ShellSummary(kind, theta.label(), alpha, N_max, s_max, records, deep.count, deep.ball(), resolved)


def enumerate_shell(
    theta, kind, s: int, N_max: int = DEFAULT_NMAX, budget: Optional[PrecisionBudget] = None, alpha=1, backend=None
) -> ShellRecord:
    """Complete member list of shell s below N_max."""
    if s < 0:
        raise PreconditionError("shell index must be >= 0")
    summary = shell_sums(theta, kind, alpha, s, N_max, budget, keep_members_from=s, backend=backend)
    return summary.records[s]


def enumerate_shells(theta, kind, alpha, s_max: int, N_max: int = DEFAULT_NMAX, keep_members_from: int = 4, **kw):
    return shell_sums(theta, kind, alpha, s_max, N_max, keep_members_from=keep_members_from, **kw).records


# ------------------------------------------------------------------ fits


@dataclass
class GapFit:
    theta: str
    kind: SeriesKind
    min_normalized_gap: Dict[int, float]
    exponent: float
    intercept: float
    mu_hat: Optional[float]
    nu_expected: Optional[float]
    nu_reference: Optional[float]
    nu_source: str
    shells_used: List[int] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "theta": self.theta,
            "kind": self.kind.value,
            "min_normalized_gap": {str(k): v for k, v in self.min_normalized_gap.items()},
            "fitted_exponent": self.exponent,
            "intercept": self.intercept,
            "mu_hat": self.mu_hat,
            "nu_expected": self.nu_expected,
            "nu_reference": self.nu_reference,
            "nu_source": self.nu_source,
            "shells_used": self.shells_used,
        }


def _nu_info(theta) -> Tuple[Optional[float], Optional[float], Optional[float], str]:
    mu_hat = nu_hat = None
    try:
        est = estimate_mu(theta, 30)
        if est.mu_hat is not None and est.mu_hat > 1:
            mu_hat = est.mu_hat
            nu_hat = 1.0 / (2.0 * mu_hat - 2.0)
    except InsufficientExpansion:
        pass
    ref = reference_mu(theta)
    if ref is not None and ref[0] == 2.0:
        return mu_hat, nu_hat, 0.5, "mu = 2 for algebraic constants; nu = 1/2"
    if ref is not None:
        return mu_hat, nu_hat, 1.0 / (2.0 * ref[0] - 2.0), ref[1]
    return mu_hat, nu_hat, None, "continued-fraction estimate only"


def fit_gap_exponent(
    theta,
    kind,
    s_range: Tuple[int, int] = (4, 12),
    N_max: int = DEFAULT_NMAX,
    budget: Optional[PrecisionBudget] = None,
    records: Optional[Sequence[ShellRecord]] = None,
    backend=None,
) -> GapFit:
    """Slope of log(min_k n_k / k) against log(epsilon) over shells with >= 5 members."""
    theta = parse_theta(theta)
    kind = SeriesKind.parse(kind)
    s_lo, s_hi = s_range
    if records is None:
        records = shell_sums(theta, kind, 1, s_hi, N_max, budget, backend=backend).records
    per = {}
    for r in records:
        if s_lo <= r.s <= s_hi and r.count >= 5 and r.min_normalized_gap is not None:
            per[r.s] = r.min_normalized_gap
    if len(per) < 2:
        raise InsufficientData(f"only {len(per)} shells with >= 5 members in {s_range}")
    ss = np.array(sorted(per))
    x = -ss * math.log(2.0)
    y = np.log(np.array([per[s] for s in ss]))
    slope, intercept = np.polyfit(x, y, 1)
    mu_hat, nu_hat, nu_ref, source = _nu_info(theta)
    return GapFit(theta.label(), kind, per, float(slope), float(intercept), mu_hat, nu_hat, nu_ref, source, [int(s) for s in ss])


@dataclass
class ShellScaling:
    slope_log2: float
    shells_used: List[int]
    expected_slope: Optional[float]
    shape_constant: Optional[float]
    shape_ratios: Dict[int, float]
    shape_factor: Optional[float]


def fit_shell_scaling(records: Sequence[ShellRecord], s_range: Tuple[int, int], nu: float = 0.5) -> ShellScaling:
    """log2 S_s against s, and the ratio test S_s / (s 2^(-nu s)) around its geometric mean."""
    s_lo, s_hi = s_range
    use = [r for r in records if s_lo <= r.s <= s_hi and not r.truncated and r.count > 0]
    if len(use) < 2:
        raise InsufficientData("need at least two untruncated shells")
    ss = np.array([r.s for r in use], dtype=float)
    S = np.array([float(r.shell_sum) for r in use])
    slope, _ = np.polyfit(ss, np.log2(S), 1)
    alpha = float(use[0].alpha)
    ratios = {int(s): float(v / (s * 2.0 ** (-nu * s))) for s, v in zip(ss, S) if s > 0}
    C = float(np.exp(np.mean(np.log(list(ratios.values()))))) if ratios else None
    factor = max(max(v / C, C / v) for v in ratios.values()) if ratios else None
    return ShellScaling(float(slope), [int(s) for s in ss], -(alpha + nu - 1.0), C, ratios, factor)

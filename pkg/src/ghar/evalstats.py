"""Likert-instrument scoring and the independent-samples t-test.

HARUS: 16 statements on a 1-7 scale, first 8 covering manipulability and
last 8 comprehensibility; each half contributes up to 50 points.  Item
polarity defaults to odd-negative / even-positive (1-based), matching the
statement wording, and is configurable.  SUS: the standard 10-statement 1-5
instrument scored to 0-100.

The t-test is the pooled-variance Student form (df = n1 + n2 - 2) with a
two-tailed p computed from our own regularized incomplete beta, plus Cohen's
d from the pooled standard deviation.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

from .errors import DegenerateVariance, EmptyGroup, ValidationError

INSTRUMENTS = {
    "HARUS": {"items": 16, "scale": (1, 7)},
    "SUS": {"items": 10, "scale": (1, 5)},
}

# 1-based odd statements are negatively worded ("felt significant muscle
# effort"), even ones positively ("comfortable for their arms and hands").
HARUS_DEFAULT_POLARITY = tuple(i % 2 == 0 for i in range(1, 17))


@dataclass(frozen=True)
class LikertResponseSet:
    instrument: str
    values: tuple
    participant_id: str = ""

    def __post_init__(self):
        if self.instrument not in INSTRUMENTS:
            raise ValidationError(f"unknown instrument {self.instrument!r}")
        spec = INSTRUMENTS[self.instrument]
        if len(self.values) != spec["items"]:
            raise ValidationError(
                f"{self.instrument} needs {spec['items']} responses, got {len(self.values)}"
            )
        lo, hi = spec["scale"]
        for v in self.values:
            if not isinstance(v, int) or not (lo <= v <= hi):
                raise ValidationError(f"response {v!r} outside [{lo}, {hi}]")


@dataclass(frozen=True)
class GroupResponses:
    label: str  # markerless | marker_based
    responses: tuple

    def __post_init__(self):
        kinds = {r.instrument for r in self.responses}
        if len(kinds) > 1:
            raise ValidationError("mixed instruments within a group")


@dataclass(frozen=True)
class TTestResult:
    t: float
    df: int
    p_two_tailed: float
    cohens_d: float

    def table_row(self) -> str:
        """Row in the published format: t, df, Sig.(2-tailed), Cohen's d.

        p below 0.0005 prints as 0.000; d keeps two decimals.
        """
        return f"{self.t:.2f}  {self.df}  {self.p_two_tailed:.3f}  {self.cohens_d:.2f}"


def sus_score(values) -> float:
    """Standard SUS scoring: odd items score v-1, even items 5-v, total x2.5."""
    rs = values if isinstance(values, LikertResponseSet) else LikertResponseSet("SUS", tuple(values))
    total = 0
    for i, v in enumerate(rs.values, start=1):
        total += (v - 1) if i % 2 == 1 else (5 - v)
    return total * 2.5


def harus_score(values, polarity=HARUS_DEFAULT_POLARITY):
    """(manipulability, comprehensibility, total) on (0-50, 0-50, 0-100).

    ``polarity[i]`` is True for positively-worded statement i+1.  Each item is
    rescaled to [0, 1] toward its favorable pole; each 8-item half averages to
    at most 50 points and the total is their exact sum.
    """
    rs = values if isinstance(values, LikertResponseSet) else LikertResponseSet("HARUS", tuple(values))
    if len(polarity) != 16:
        raise ValidationError("polarity vector must have 16 entries")
    adjusted = [
        (v - 1) / 6.0 if pos else (7 - v) / 6.0 for v, pos in zip(rs.values, polarity)
    ]
    manipulability = sum(adjusted[:8]) / 8.0 * 50.0
    comprehensibility = sum(adjusted[8:]) / 8.0 * 50.0
    return manipulability, comprehensibility, manipulability + comprehensibility


def likert_histogram(group: GroupResponses, item_index: int) -> list[float]:
    """Percentage of responses at each scale point for one statement.

    ``item_index`` is 0-based; output sums to 100.
    """
    if not group.responses:
        raise EmptyGroup(f"group {group.label!r} has no responses")
    lo, hi = INSTRUMENTS[group.responses[0].instrument]["scale"]
    counts = [0] * (hi - lo + 1)
    for r in group.responses:
        counts[r.values[item_index] - lo] += 1
    n = len(group.responses)
    return [100.0 * c / n for c in counts]


# --- Student t machinery ---------------------------------------------------


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 300):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            break
    return h


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b), accurate to ~1e-14."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_p(t: float, df: int) -> float:
    """Two-tailed p for a Student t statistic."""
    if df < 1:
        raise ValidationError("df must be >= 1")
    x = df / (df + t * t)
    return regularized_incomplete_beta(df / 2.0, 0.5, x)


def _mean_var(xs):
    n = len(xs)
    m = sum(xs) / n
    var = sum((x - m) ** 2 for x in xs) / (n - 1)
    return m, var


def pooled_ttest(a, b) -> TTestResult:
    """Pooled-variance independent-samples Student t-test with Cohen's d."""
    a, b = list(a), list(b)
    if len(a) < 2 or len(b) < 2:
        raise ValidationError("each group needs at least 2 observations")
    ma, va = _mean_var(a)
    mb, vb = _mean_var(b)
    df = len(a) + len(b) - 2
    pooled_var = ((len(a) - 1) * va + (len(b) - 1) * vb) / df
    if pooled_var <= 0.0:
        raise DegenerateVariance("zero pooled variance")
    sp = math.sqrt(pooled_var)
    se = sp * math.sqrt(1.0 / len(a) + 1.0 / len(b))
    t = (ma - mb) / se
    return TTestResult(t=t, df=df, p_two_tailed=student_t_p(t, df), cohens_d=(ma - mb) / sp)


# --- response CSV ----------------------------------------------------------


def load_responses_csv(path) -> list[LikertResponseSet]:
    """Read `participant,instrument,i1..iN` rows into response sets."""
    out = []
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if not header or header[0].strip().lower() != "participant":
            raise ValidationError(f"{path}: expected header starting with 'participant'")
        for lineno, row in enumerate(reader, start=2):
            if not row or not any(cell.strip() for cell in row):
                continue
            if len(row) < 3:
                raise ValidationError(f"{path}:{lineno}: too few columns")
            participant, instrument = row[0].strip(), row[1].strip().upper()
            try:
                values = tuple(int(cell) for cell in row[2:] if cell.strip() != "")
            except ValueError as e:
                raise ValidationError(f"{path}:{lineno}: non-integer response: {e}") from e
            out.append(LikertResponseSet(instrument, values, participant_id=participant))
    return out


def group_scores(responses, measure: str) -> list[float]:
    """Per-participant scores for one measure.

    measure: usability (SUS), manipulability / comprehensibility / harus_total
    (HARUS).
    """
    if measure == "usability":
        return [sus_score(r) for r in responses]
    idx = {"manipulability": 0, "comprehensibility": 1, "harus_total": 2}
    if measure not in idx:
        raise ValidationError(f"unknown measure {measure!r}")
    return [harus_score(r)[idx[measure]] for r in responses]

"""Box-to-anchor regression coding and the proposal-network losses.

The offset 5-tuple between a box and its anchor is
    tx = (x - xa) / wa,  ty = (y - ya) / ha,
    tw = log(w / wa),    th = log(h / ha),
    ttheta = theta - theta_a
and the training loss combines binary cross-entropy over the
foreground/background probability with a smooth-L1 penalty over the
offsets, gated by the foreground indicator and weighted by a balance
factor. Analytic partial derivatives are written out by hand so they can
be verified against central finite differences with no autodiff anywhere
in the loop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .geometry import OrientedBox

# Keeps the cross-entropy finite at p in {0, 1}.
PROB_EPS = 1e-12


@dataclass(frozen=True)
class RegressionTarget:
    """Dimensionless offsets (tx, ty, tw, th, ttheta) between box and anchor."""

    tx: float
    ty: float
    tw: float
    th: float
    ttheta: float

    def __post_init__(self):
        for name in ("tx", "ty", "tw", "th", "ttheta"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"RegressionTarget.{name} must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.tx, self.ty, self.tw, self.th, self.ttheta])

    @classmethod
    def from_array(cls, values: Sequence[float]) -> "RegressionTarget":
        tx, ty, tw, th, ttheta = (float(v) for v in values)
        return cls(tx, ty, tw, th, ttheta)


@dataclass(frozen=True)
class LossBreakdown:
    """Total loss with its classification and regression components."""

    cls: float
    reg: float
    total: float
    lam: float
    u: int


def encode(box: OrientedBox, anchor: OrientedBox) -> RegressionTarget:
    """Regression offsets that carry `anchor` onto `box`."""
    return RegressionTarget(
        tx=(box.cx - anchor.cx) / anchor.w,
        ty=(box.cy - anchor.cy) / anchor.h,
        tw=math.log(box.w / anchor.w),
        th=math.log(box.h / anchor.h),
        ttheta=box.theta - anchor.theta,
    )


def decode(t: RegressionTarget, anchor: OrientedBox) -> OrientedBox:
    """Apply regression offsets to an anchor; exact inverse of encode."""
    w = anchor.w * math.exp(t.tw)
    h = anchor.h * math.exp(t.th)
    if not (math.isfinite(w) and math.isfinite(h)):
        raise OverflowError(f"decoded extents overflow: tw={t.tw}, th={t.th}")
    return OrientedBox(
        cx=t.tx * anchor.w + anchor.cx,
        cy=t.ty * anchor.h + anchor.cy,
        w=w,
        h=h,
        theta=anchor.theta + t.ttheta,
    )


def smooth_l1(x: float) -> float:
    """0.5*x**2 inside |x| < 1, |x| - 0.5 outside; continuous at the kink."""
    ax = abs(x)
    return 0.5 * x * x if ax < 1.0 else ax - 0.5


def smooth_l1_grad(x: float) -> float:
    return x if abs(x) < 1.0 else math.copysign(1.0, x)


def regression_loss(t: RegressionTarget, tstar: RegressionTarget, u: int) -> float:
    """Smooth-L1 over the five offset residuals, zero for background (u=0)."""
    if u not in (0, 1):
        raise ValueError(f"u must be 0 or 1, got {u!r}")
    if u == 0:
        return 0.0
    return sum(smooth_l1(ts - tp) for tp, ts in zip(t.as_array(), tstar.as_array()))


def regression_loss_grad(
    t: RegressionTarget, tstar: RegressionTarget, u: int
) -> np.ndarray:
    """Partial derivatives of regression_loss with respect to the five t_i."""
    if u == 0:
        return np.zeros(5)
    residuals = tstar.as_array() - t.as_array()
    return np.array([-smooth_l1_grad(r) for r in residuals])


def classification_loss(p: float, u: int) -> float:
    """Binary cross-entropy between the foreground probability and label u."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be a probability in [0, 1], got {p!r}")
    if u not in (0, 1):
        raise ValueError(f"u must be 0 or 1, got {u!r}")
    pc = min(max(p, PROB_EPS), 1.0 - PROB_EPS)
    return -u * math.log(pc) - (1 - u) * math.log(1.0 - pc)


def classification_loss_grad(p: float, u: int) -> float:
    """d/dp of classification_loss (valid strictly inside the clamp band)."""
    pc = min(max(p, PROB_EPS), 1.0 - PROB_EPS)
    return -u / pc + (1 - u) / (1.0 - pc)


def orpn_loss(
    p: float,
    u: int,
    t: RegressionTarget,
    tstar: RegressionTarget,
    lam: float = 1.0,
) -> LossBreakdown:
    """Combined loss: classification plus lam * u * regression."""
    if lam < 0:
        raise ValueError(f"lam must be nonnegative, got {lam}")
    cls = classification_loss(p, u)
    reg = regression_loss(t, tstar, u)
    return LossBreakdown(cls=cls, reg=reg, total=cls + lam * u * reg, lam=lam, u=u)


def orpn_loss_grad(
    p: float,
    u: int,
    t: RegressionTarget,
    tstar: RegressionTarget,
    lam: float = 1.0,
) -> np.ndarray:
    """Gradient of the total loss in (p, tx, ty, tw, th, ttheta)."""
    gp = classification_loss_grad(p, u)
    gt = lam * u * regression_loss_grad(t, tstar, u)
    return np.concatenate([[gp], gt])


def numeric_gradient(
    f: Callable[[np.ndarray], float], point: np.ndarray, step: float = 1e-6
) -> np.ndarray:
    """Central-difference gradient estimate of a scalar function."""
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    x = np.asarray(point, dtype=float).copy()
    grad = np.empty_like(x)
    for i in range(x.size):
        orig = x[i]
        x[i] = orig + step
        hi = f(x)
        x[i] = orig - step
        lo = f(x)
        x[i] = orig
        if not (math.isfinite(hi) and math.isfinite(lo)):
            raise ValueError(f"function not finite near component {i}")
        grad[i] = (hi - lo) / (2.0 * step)
    return grad


def gradient_check(
    f: Callable[[np.ndarray], float],
    grad: Callable[[np.ndarray], np.ndarray],
    point: np.ndarray,
    step: float = 1e-6,
) -> float:
    """Max relative discrepancy between analytic and central-difference gradients.

    Relative error per component is |a - n| / max(|a|, |n|, 1e-8); the
    caller is responsible for evaluating away from non-differentiable
    points (the smooth-L1 kink at |residual| = 1).
    """
    point = np.asarray(point, dtype=float)
    analytic = np.asarray(grad(point), dtype=float)
    numeric = numeric_gradient(f, point, step)
    if analytic.shape != numeric.shape:
        raise ValueError("analytic gradient shape does not match the point")
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), 1e-8)
    return float(np.max(np.abs(analytic - numeric) / denom))


def verify_loss_gradients(
    n_points: int = 100,
    step: float = 1e-6,
    lam: float = 1.0,
    seed: int = 0,
) -> float:
    """Check the combined loss gradient at random points; returns the worst error.

    Sample points keep p inside (0.05, 0.95) and every smooth-L1 residual
    at least 10 * step away from the |x| = 1 kink, where the analytic and
    numeric derivatives are comparable.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    kink_margin = 10.0 * step
    produced = 0
    while produced < n_points:
        p = rng.uniform(0.05, 0.95)
        u = int(rng.integers(0, 2))
        t = rng.uniform(-2.0, 2.0, size=5)
        tstar = rng.uniform(-2.0, 2.0, size=5)
        if np.any(np.abs(np.abs(tstar - t) - 1.0) < kink_margin):
            continue
        produced += 1

        def f(x: np.ndarray) -> float:
            return orpn_loss(
                float(x[0]), u, RegressionTarget.from_array(x[1:]),
                RegressionTarget.from_array(tstar), lam
            ).total

        def g(x: np.ndarray) -> np.ndarray:
            return orpn_loss_grad(
                float(x[0]), u, RegressionTarget.from_array(x[1:]),
                RegressionTarget.from_array(tstar), lam
            )

        point = np.concatenate([[p], t])
        worst = max(worst, gradient_check(f, g, point, step))
    return worst

import numpy as np
import pytest

from groupspeed.riskmodel import fit_risk_curve


def parabola_points(t_min=1.0, offset=1.0, lo=0.25, hi=2.0, step=0.25):
    ts = np.arange(lo, hi + step / 2, step)
    return [(float(t), float((t - t_min) ** 2 + offset)) for t in ts]


@pytest.fixture
def parabola_curve():
    """Fit of (t-1)^2 + 1; a not-a-knot cubic spline reproduces it exactly."""
    return fit_risk_curve(parabola_points())


def random_convex_curve(rng, lo=0.3, hi=3.0, n_pts=9):
    """Fit a random strictly convex cubic a + b(t-c)^2 + e(t-c)^3."""
    b = rng.uniform(0.2, 2.0)
    c = rng.uniform(lo + 0.3 * (hi - lo), hi - 0.3 * (hi - lo))
    # keep 2b + 6e(t-c) > 0 on [lo, hi]
    e_max = b / (3.0 * max(hi - c, c - lo))
    e = rng.uniform(-0.9 * e_max, 0.9 * e_max)
    a = rng.uniform(0.3, 1.0)
    ts = np.linspace(lo, hi, n_pts)
    pts = [(float(t), float(a + b * (t - c) ** 2 + e * (t - c) ** 3)) for t in ts]
    return fit_risk_curve(pts)


class QuadraticSpeedUtility:
    """Test double for SpeedRisk: g(s) = (s - a)^2 on the whole line."""

    speed_domain = (-1e18, 1e18)

    def __init__(self, a):
        self.a = float(a)

    def clamp(self, s):
        return float(s)

    def value(self, s):
        return (np.asarray(s, dtype=float) - self.a) ** 2

    def derivative(self, s):
        return (2.0 * (np.asarray(s, dtype=float) - self.a))[()]

    def second_derivative(self, s):
        return 2.0

"""Classical SIS/SIR compartmental models on the unit simplex, plus R0."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .core import DiseaseParams

SIMPLEX_TOL = 1e-9


@dataclass(frozen=True)
class CompartmentState:
    s: float
    i: float
    r: float = 0.0

    def on_simplex(self, tol: float = SIMPLEX_TOL) -> bool:
        return (min(self.s, self.i, self.r) >= -tol
                and abs(self.s + self.i + self.r - 1.0) <= tol)


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # columns s, i, r

    @property
    def s(self):
        return self.states[:, 0]

    @property
    def i(self):
        return self.states[:, 1]

    @property
    def r(self):
        return self.states[:, 2]

    def at(self, t: float) -> CompartmentState:
        k = int(np.argmin(np.abs(self.times - t)))
        if not math.isclose(self.times[k], t, abs_tol=1e-9):
            raise KeyError(f"t={t} is not a sample time")
        return CompartmentState(*self.states[k])


def sis_derivative(state: CompartmentState, params: DiseaseParams) -> tuple[float, float]:
    b, a, mu, th = params.beta, params.alpha, params.mu, params.theta
    s, i = state.s, state.i
    ds = mu * (1 - s) + (1 - th) * a * i - b * s * i
    di = b * s * i - (1 - th) * a * i - mu * i
    return ds, di


def sir_derivative(state: CompartmentState, params: DiseaseParams) -> tuple[float, float, float]:
    b, a, mu, th = params.beta, params.alpha, params.mu, params.theta
    s, i, r = state.s, state.i, state.r
    ds = mu * (1 - s) + a * th * i - b * s * i
    di = b * s * i - a * i - mu * i
    dr = a * i - a * th * i - mu * r
    return ds, di, dr


def _rhs(model: str, params: DiseaseParams):
    if model == "sis":
        def f(y):
            ds, di = sis_derivative(CompartmentState(y[0], y[1], y[2]), params)
            return np.array([ds, di, 0.0])
    elif model == "sir":
        def f(y):
            return np.array(sir_derivative(CompartmentState(y[0], y[1], y[2]), params))
    else:
        raise ValueError(f"unknown model {model!r}")
    return f


def integrate(model: Literal["sis", "sir"], initial: CompartmentState, params: DiseaseParams,
              t_end: float, dt: float) -> Trajectory:
    """Classical fixed-step RK4 from t=0 to ``t_end``, sampled every step.

    The final step is shortened if ``dt`` does not divide ``t_end``.
    """
    model = model.lower()
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if t_end < 0:
        raise ValueError(f"t_end must be nonnegative, got {t_end}")
    if not initial.on_simplex():
        raise ValueError(f"initial state {initial} is not on the unit simplex")
    if model == "sis" and abs(initial.r) > SIMPLEX_TOL:
        raise ValueError("SIS initial state must have r = 0")
    f = _rhs(model, params)
    n = max(0, math.ceil(t_end / dt - 1e-9))
    times = np.empty(n + 1)
    states = np.empty((n + 1, 3))
    y = np.array([initial.s, initial.i, initial.r], dtype=float)
    t = 0.0
    times[0], states[0] = t, y
    for k in range(1, n + 1):
        h = min(dt, t_end - t) if k == n else dt
        k1 = f(y)
        k2 = f(y + 0.5 * h * k1)
        k3 = f(y + 0.5 * h * k2)
        k4 = f(y + h * k3)
        y = y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        t = t_end if k == n else k * dt
        times[k], states[k] = t, y
    return Trajectory(times, states)


def r0_sis(params: DiseaseParams) -> float:
    denom = params.alpha * (1 - params.theta) + params.mu
    if denom == 0:
        raise ZeroDivisionError("alpha*(1-theta) + mu is zero; R0 undefined")
    return params.beta / denom


def r0_sir(params: DiseaseParams) -> float:
    denom = params.alpha + params.mu
    if denom == 0:
        raise ZeroDivisionError("alpha + mu is zero; R0 undefined")
    return params.beta / denom

"""Time stepping: die-off map, Lotka-Volterra flow and the Poincare map.

The Lotka-Volterra phase is integrated with a Dormand-Prince 5(4) pair
under PI step-size control.  The state can be augmented with the running
integral of the trajectory (3 extra components) and with the variational
matrix ``W(t) = D_x Phi_t(x)`` (9 extra components).  Densities are error-controlled
component-wise relative to their own size (a density of 1e-60 is tracked
as faithfully as one of order 1), and the variational matrix, when present,
row-wise relative to each row's largest entry.  Requesting the Jacobian can
therefore shorten steps and move the end state within the tolerance.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import InvalidConfig, NonFiniteState, StepBudgetExceeded
from .model import ModelParams, state_vec

# Dormand & Prince (1980) tableau
C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
# 5th minus embedded 4th order weights
E1 = 71 / 57600
E3 = -71 / 16695
E4 = 71 / 1920
E5 = -17253 / 339200
E6 = 22 / 525
E7 = -1 / 40

NSTATE = 15
# densities below this are treated as extinct and set to exactly 0, which
# keeps them out of the (slow) subnormal range
UNDERFLOW = 1e-250
STATUS_OK, STATUS_BUDGET, STATUS_NONFINITE = 0, 1, 2


@njit(cache=True)
def _rhs(b, a, y, want_hat, want_jac, out):
    x0, x1, x2 = y[0], y[1], y[2]
    g0 = b[0] - a[0, 0] * x0 - a[0, 1] * x1 - a[0, 2] * x2
    g1 = b[1] - a[1, 0] * x0 - a[1, 1] * x1 - a[1, 2] * x2
    g2 = b[2] - a[2, 0] * x0 - a[2, 1] * x1 - a[2, 2] * x2
    out[0] = x0 * g0
    out[1] = x1 * g1
    out[2] = x2 * g2
    if want_hat or want_jac:
        out[3] = x0
        out[4] = x1
        out[5] = x2
    if want_jac:
        g = (g0, g1, g2)
        x = (x0, x1, x2)
        # Df_ij = delta_ij g_i - x_i a_ij ; dW/dt = Df W, W stored row-major at y[6:]
        for i in range(3):
            for j in range(3):
                s = 0.0
                for m in range(3):
                    d = -x[i] * a[i, m]
                    if m == i:
                        d += g[i]
                    s += d * y[6 + 3 * m + j]
                out[6 + 3 * i + j] = s


@njit(cache=True)
def _errnorm(y, ynew, err, atol, rtol, want_jac):
    # densities: each component relative to itself (Kolmogorov form keeps
    # faces invariant, so tiny densities need relative accuracy too)
    ymax = 1.0
    for i in range(3):
        ymax = max(ymax, abs(y[i]), abs(ynew[i]))
    e = 0.0
    for i in range(3):
        if err[i] == 0.0:
            continue
        m = max(abs(y[i]), abs(ynew[i]))
        if m == 0.0:
            continue
        v = abs(err[i]) / m / (rtol + atol / ymax)
        if v > e:
            e = v
    if want_jac:
        # variational matrix: each row relative to its largest entry
        for i in range(3):
            m = 0.0
            for j in range(3):
                m = max(m, abs(y[6 + 3 * i + j]), abs(ynew[6 + 3 * i + j]))
            if m == 0.0:
                continue
            sc = rtol + atol / max(1.0, m)
            for j in range(3):
                v = abs(err[6 + 3 * i + j]) / m / sc
                if v > e:
                    e = v
    return e


@njit(cache=True)
def _initial_step(b, a, y, f0, T, atol, rtol, tmp, f1):
    d0 = 0.0
    d1 = 0.0
    for i in range(3):
        sc = atol + rtol * abs(y[i])
        d0 = max(d0, abs(y[i]) / sc)
        d1 = max(d1, abs(f0[i]) / sc)
    if d0 < 1e-5 or d1 < 1e-5:
        h0 = 1e-6
    else:
        h0 = 0.01 * d0 / d1
    h0 = min(h0, T)
    for i in range(3):
        tmp[i] = y[i] + h0 * f0[i]
    _rhs(b, a, tmp, False, False, f1)
    d2 = 0.0
    for i in range(3):
        sc = atol + rtol * abs(y[i])
        d2 = max(d2, abs(f1[i] - f0[i]) / sc / h0)
    m = max(d1, d2)
    if m <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / m) ** 0.2
    return min(100.0 * h0, h1, T)


@njit(cache=True)
def _integrate(b, a, x0, T, want_hat, want_jac, rtol, atol, max_steps, keep, ts, ys):
    """Integrate the (augmented) LV system on [0, T].

    Returns (y_end[15], steps, status, n_kept).  When ``keep`` is true the
    accepted step endpoints are written into ``ts``/``ys``.
    """
    n = NSTATE
    y = np.zeros(n)
    for i in range(3):
        y[i] = x0[i] if x0[i] >= UNDERFLOW else 0.0
    if want_jac:
        y[6] = 1.0
        y[10] = 1.0
        y[14] = 1.0
    nk = 0
    if keep:
        ts[0] = 0.0
        for i in range(3):
            ys[0, i] = y[i]
        nk = 1
    if T <= 0.0:
        return y, 0, STATUS_OK, nk

    k1 = np.zeros(n)
    k2 = np.zeros(n)
    k3 = np.zeros(n)
    k4 = np.zeros(n)
    k5 = np.zeros(n)
    k6 = np.zeros(n)
    k7 = np.zeros(n)
    tmp = np.zeros(n)
    ynew = np.zeros(n)
    err = np.zeros(n)

    _rhs(b, a, y, want_hat, want_jac, k1)
    h = _initial_step(b, a, y, k1, T, atol, rtol, tmp, k2)
    beta = 0.04
    alpha = 0.2 - 0.75 * beta
    err_old = 1e-4
    rejected = False
    t = 0.0
    steps = 0
    while t < T:
        if steps >= max_steps:
            return y, steps, STATUS_BUDGET, nk
        last = False
        if t + h >= T or t + 1.01 * h >= T:
            h = T - t
            last = True
        for i in range(n):
            tmp[i] = y[i] + h * A21 * k1[i]
        _rhs(b, a, tmp, want_hat, want_jac, k2)
        for i in range(n):
            tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i])
        _rhs(b, a, tmp, want_hat, want_jac, k3)
        for i in range(n):
            tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
        _rhs(b, a, tmp, want_hat, want_jac, k4)
        for i in range(n):
            tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
        _rhs(b, a, tmp, want_hat, want_jac, k5)
        for i in range(n):
            tmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i]
                                 + A65 * k5[i])
        _rhs(b, a, tmp, want_hat, want_jac, k6)
        for i in range(n):
            ynew[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i]
                                  + B6 * k6[i])
        _rhs(b, a, ynew, want_hat, want_jac, k7)
        steps += 1
        nerr = n if want_jac else 3
        for i in range(nerr):
            err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i]
                          + E7 * k7[i])
        e = _errnorm(y, ynew, err, atol, rtol, want_jac)
        finite = True
        for i in range(n):
            if not np.isfinite(ynew[i]):
                finite = False
        # a positive density must not change sign within one step
        sign_flip = False
        for i in range(3):
            if y[i] > 0.0 and ynew[i] <= 0.0:
                sign_flip = True
        if not finite:
            if h < 1e-14 * max(T, 1.0):
                return y, steps, STATUS_NONFINITE, nk
            h *= 0.1
            rejected = True
            continue
        if e <= 1.0 and not sign_flip:
            fac = 0.9 * e ** (-alpha) * err_old ** beta if e > 0.0 else 10.0
            fac = min(10.0, max(0.2, fac))
            if rejected:
                fac = min(1.0, fac)
            err_old = max(e, 1e-4)
            t = T if last else t + h
            for i in range(n):
                y[i] = ynew[i]
                k1[i] = k7[i]
            flushed = False
            for i in range(3):
                if 0.0 < y[i] < UNDERFLOW:
                    y[i] = 0.0
                    flushed = True
            if flushed:
                _rhs(b, a, y, want_hat, want_jac, k1)
            if keep:
                ts[nk] = t
                for i in range(3):
                    ys[nk, i] = y[i]
                nk += 1
            h *= fac
            rejected = False
        else:
            if sign_flip and e <= 1.0:
                fac = 0.5
            else:
                fac = max(0.2, 0.9 * e ** (-0.2))
            h *= fac
            rejected = True
    return y, steps, STATUS_OK, nk


@njit(cache=True)
def _orbit(b, a, decay, T, x0, n_skip, n_keep, rtol, atol, max_steps):
    out = np.zeros((n_keep, 3))
    x = x0.copy()
    dummy_t = np.zeros(1)
    dummy_y = np.zeros((1, 3))
    xl = np.zeros(3)
    for k in range(n_skip + n_keep):
        for i in range(3):
            xl[i] = decay[i] * x[i]
        y, steps, status, nk = _integrate(b, a, xl, T, False, False, rtol, atol, max_steps,
                                          False, dummy_t, dummy_y)
        if status != STATUS_OK:
            return out, k, status
        for i in range(3):
            x[i] = y[i]
        if k >= n_skip:
            for i in range(3):
                out[k - n_skip, i] = x[i]
    return out, n_skip + n_keep, STATUS_OK


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-10
    max_steps: int = 200_000
    dense_output: bool = False

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol"):
            v = getattr(self, name)
            if not (0 < v <= 1e-2):
                raise InvalidConfig(f"{name} must lie in (0, 1e-2], got {v}")
        if self.max_steps < 1000:
            raise InvalidConfig("max_steps must be at least 1000")

    def halved(self) -> "IntegratorConfig":
        return IntegratorConfig(self.rel_tol / 2, self.abs_tol / 2, self.max_steps,
                                self.dense_output)


DEFAULT_CONFIG = IntegratorConfig()


@dataclass(frozen=True)
class FlowResult:
    end_state: np.ndarray
    steps_taken: int
    hat_integral: np.ndarray | None = None
    jacobian: np.ndarray | None = None
    times: np.ndarray | None = None
    states: np.ndarray | None = None


def _check_status(status, steps):
    if status == STATUS_BUDGET:
        raise StepBudgetExceeded(f"step budget exhausted after {steps} steps")
    if status == STATUS_NONFINITE:
        raise NonFiniteState("integration produced a non-finite state")


def linear_phase(params: ModelParams, x) -> np.ndarray:
    """Apply the die-off phase: ``x_i -> exp(-mu_i (1 - phi) omega) x_i``."""
    return params.decay * state_vec(x)


def _lv_raw(params, x, t, config, want_hat, want_jac):
    keep = config.dense_output
    size = config.max_steps + 1 if keep else 1
    ts = np.zeros(size)
    ys = np.zeros((size, 3))
    y, steps, status, nk = _integrate(params.b, params.a, np.asarray(x, dtype=float), float(t),
                                      want_hat, want_jac, config.rel_tol, config.abs_tol,
                                      config.max_steps, keep, ts, ys)
    _check_status(status, steps)
    return y, steps, (ts[:nk].copy(), ys[:nk].copy()) if keep else (None, None)


def lv_flow(params: ModelParams, x, t: float, config: IntegratorConfig = DEFAULT_CONFIG,
            want_hat: bool = False, want_jac: bool = False) -> FlowResult:
    """Integrate the competition phase for time ``t`` starting from ``x``.

    With ``want_hat`` the result carries ``int_0^t Phi_s(x) ds``; with
    ``want_jac`` it carries ``W(t, x) = D_x Phi_t(x)``.  Components that
    start at zero remain exactly zero.
    """
    x = state_vec(x)
    if t < 0:
        raise ValueError("negative integration time")
    y, steps, (ts, ys) = _lv_raw(params, x, t, config, want_hat, want_jac)
    return FlowResult(
        end_state=y[:3].copy(), steps_taken=steps,
        hat_integral=y[3:6].copy() if want_hat else None,
        jacobian=y[6:].reshape(3, 3).copy() if want_jac else None,
        times=ts, states=ys,
    )


def poincare(params: ModelParams, x, config: IntegratorConfig = DEFAULT_CONFIG,
             want_hat: bool = False, want_jac: bool = False) -> FlowResult:
    """One period of the seasonal system: die-off, then competition.

    The Jacobian returned is ``W(phi*omega, Lx) @ diag(decay)``.
    """
    x = state_vec(x)
    return _poincare_unchecked(params, x, config, want_hat, want_jac)


def _poincare_unchecked(params, x, config=DEFAULT_CONFIG, want_hat=False, want_jac=False):
    # also used for finite differences that step slightly outside the cone
    decay = params.decay
    y, steps, (ts, ys) = _lv_raw(params, decay * x, params.growth_time, config,
                                 want_hat, want_jac)
    jac = None
    if want_jac:
        jac = y[6:].reshape(3, 3) * decay[None, :]
    return FlowResult(
        end_state=y[:3].copy(), steps_taken=steps,
        hat_integral=y[3:6].copy() if want_hat else None,
        jacobian=jac, times=ts, states=ys,
    )


def poincare_map(params: ModelParams, x, config: IntegratorConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Shorthand for ``poincare(...).end_state``."""
    return poincare(params, x, config).end_state


def orbit_points(params: ModelParams, x0, n: int, skip: int = 0,
                 config: IntegratorConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Iterates ``P^(skip+1)(x0) ... P^(skip+n)(x0)`` as an ``(n, 3)`` array."""
    x0 = state_vec(x0)
    pts, done, status = _orbit(params.b, params.a, params.decay, params.growth_time, x0,
                               int(skip), int(n), config.rel_tol, config.abs_tol,
                               config.max_steps)
    _check_status(status, config.max_steps)
    return pts


def liouville_det(params: ModelParams, hat, t: float) -> float:
    """``det W(t, x)`` from the trajectory integral alone.

    ``trace Df(v) = sum_i (b_i - (A v)_i - a_ii v_i)``, so Liouville's formula
    gives ``exp(t sum b - sum (A hat) - sum a_ii hat_i)``.
    """
    hat = np.asarray(hat, dtype=float)
    a = params.a
    return float(np.exp(t * params.b.sum() - (a @ hat).sum() - np.diag(a) @ hat))


def seasonal_trajectory(params: ModelParams, x0, periods: int, samples_per_phase: int = 50,
                        config: IntegratorConfig = DEFAULT_CONFIG):
    """Time series of the switched system over several whole periods.

    The die-off phase is sampled from its closed form; the competition phase
    is reported at the integrator's accepted steps.  Returns ``(t, x)``.
    """
    x = state_vec(x0)
    dense = IntegratorConfig(config.rel_tol, config.abs_tol, config.max_steps, True)
    bad = (1.0 - params.phi) * params.omega
    ts, xs = [np.array([0.0])], [x[None, :]]
    t0 = 0.0
    for _ in range(periods):
        s = np.linspace(0.0, bad, samples_per_phase + 1)[1:]
        xs.append(x[None, :] * np.exp(-np.outer(s, params.mu)))
        ts.append(t0 + s)
        x = x * params.decay
        res = lv_flow(params, x, params.growth_time, dense)
        ts.append(t0 + bad + res.times[1:])
        xs.append(res.states[1:])
        x = res.end_state
        t0 += params.omega
    return np.concatenate(ts), np.concatenate(xs)

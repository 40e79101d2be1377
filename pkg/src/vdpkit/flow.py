"""Numeric spot checks for flows of polynomial vector fields on X = {p = 0}.

The flow of a tangent field is integrated with classical RK4 together with its
variational equation dJ/dt = Dxi(z) J.  Drift is the largest |p| seen along the
trajectory.  Volume distortion compares the volume form on the pushed tangent
frame with its value on the initial frame, using omega(W) = det[u, W] for any
u with dp(u) = 1, which is chart independent.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from vdpkit.forms import Hypersurface, VectorField, _surface, is_tangent
from vdpkit.poly import Polynomial


class CompiledPoly:
    """Vectorised evaluator for one polynomial at complex points."""

    def __init__(self, p: Polynomial):
        items = list(p.items())
        self.n = p.nvars
        if items:
            self.exps = np.array([e for e, _ in items], dtype=np.int64)
            self.coefs = np.array([complex(c) for _, c in items], dtype=np.complex128)
        else:
            self.exps = np.zeros((0, p.nvars), dtype=np.int64)
            self.coefs = np.zeros(0, dtype=np.complex128)

    def __call__(self, z: np.ndarray) -> complex:
        if not len(self.coefs):
            return 0j
        return complex(np.sum(self.coefs * np.prod(z[None, :] ** self.exps, axis=1)))


class CompiledField:
    def __init__(self, xi: VectorField):
        self.n = xi.n
        self.coeffs = [CompiledPoly(c) for c in xi.coeffs]
        self.jac = [[CompiledPoly(c.diff(k)) for k in range(1, xi.n + 1)] for c in xi.coeffs]

    def value(self, z):
        return np.array([c(z) for c in self.coeffs], dtype=np.complex128)

    def jacobian(self, z):
        return np.array([[d(z) for d in row] for row in self.jac], dtype=np.complex128)


@dataclass
class FlowResult:
    endpoint: np.ndarray
    drift: float
    volume_distortion: float
    blew_up: bool
    steps: int
    t_final: float
    trace: list = field(default_factory=list)

    def to_dict(self):
        return {
            "endpoint": [[z.real, z.imag] for z in self.endpoint],
            "drift": self.drift,
            "volume_distortion": self.volume_distortion,
            "blew_up": self.blew_up,
            "steps": self.steps,
            "t_final": self.t_final,
            "trace": self.trace,
        }


def tangent_frame(X: Hypersurface, z: np.ndarray) -> np.ndarray:
    """n x (n-1) basis of ker dp(z), built on the chart with the largest |q_i|."""
    grad = np.array([CompiledPoly(q)(z) for q in X.q])
    i = int(np.argmax(np.abs(grad)))
    cols = []
    for k in range(X.n):
        if k == i:
            continue
        v = np.zeros(X.n, dtype=np.complex128)
        v[k] = 1.0
        v[i] = -grad[k] / grad[i]
        cols.append(v)
    return np.array(cols).T


def volume_on(X: Hypersurface, z: np.ndarray, W: np.ndarray) -> complex:
    grad = np.array([CompiledPoly(q)(z) for q in X.q])
    u = np.conj(grad) / np.vdot(grad, grad).real
    return complex(np.linalg.det(np.column_stack([u, W])))


def flow_rk4(X, xi: VectorField, start, t_final: float, steps: int,
             tol_on: float = 1e-12, bound: float = 1e8, trace_every: int | None = None) -> FlowResult:
    """Integrate z' = xi(z) from ``start`` over [0, t_final] with ``steps`` RK4 steps."""
    X = _surface(X)
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if not is_tangent(xi):
        raise ValueError("vector field is not tangent to the hypersurface")
    z0 = np.array([complex(x) for x in start], dtype=np.complex128)
    P = CompiledPoly(X.p)
    if abs(P(z0)) >= tol_on:
        raise ValueError(f"start point is off the hypersurface: |p| = {abs(P(z0)):.3e}")
    F = CompiledField(xi)
    n = X.n
    h = t_final / steps
    z = z0.copy()
    J = np.eye(n, dtype=np.complex128)
    V = tangent_frame(X, z0)
    vol0 = volume_on(X, z0, V)
    drift = abs(P(z))
    every = trace_every or max(1, steps // 10)
    trace = [{"t": 0.0, "point": [[c.real, c.imag] for c in z], "abs_p": drift, "det": 1.0}]
    blew_up = False

    def rhs(zz, JJ):
        return F.value(zz), F.jacobian(zz) @ JJ

    for s in range(1, steps + 1):
        k1, K1 = rhs(z, J)
        k2, K2 = rhs(z + 0.5 * h * k1, J + 0.5 * h * K1)
        k3, K3 = rhs(z + 0.5 * h * k2, J + 0.5 * h * K2)
        k4, K4 = rhs(z + h * k3, J + h * K3)
        z = z + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        J = J + (h / 6.0) * (K1 + 2 * K2 + 2 * K3 + K4)
        if not np.all(np.isfinite(z)) or np.max(np.abs(z)) > bound:
            blew_up = True
            break
        drift = max(drift, abs(P(z)))
        if s % every == 0 or s == steps:
            ratio = volume_on(X, z, J @ V) / vol0
            trace.append({"t": s * h, "point": [[c.real, c.imag] for c in z],
                          "abs_p": abs(P(z)), "det": [ratio.real, ratio.imag]})
    distortion = float("inf") if blew_up else abs(volume_on(X, z, J @ V) / vol0 - 1.0)
    return FlowResult(z, float(drift), float(distortion), blew_up, steps, t_final, trace)


def convergence_order(X, xi: VectorField, start, t_final: float,
                      step_counts=(8, 16, 32, 64)) -> tuple[float, list[float]]:
    """Least-squares slope of log(drift) against log(step size)."""
    drifts = [flow_rk4(X, xi, start, t_final, s).drift for s in step_counts]
    hs = [t_final / s for s in step_counts]
    slope = float(np.polyfit(np.log(hs), np.log(drifts), 1)[0])
    return slope, drifts


def endpoint_order(X, xi: VectorField, start, t_final: float,
                   step_counts=(8, 16, 32, 64), ref_steps: int = 4096) -> tuple[float, list[float]]:
    """Observed global order: slope of the endpoint error against a fine-step reference.

    Drift alone can converge faster than the method (for delta_12 on X_3 the
    invariant picks up R(x)R(-x) = 1 + O(x^6) per step), so the integrator's
    order is read off the endpoint instead.
    """
    ref = flow_rk4(X, xi, start, t_final, ref_steps).endpoint
    errs = [float(np.max(np.abs(flow_rk4(X, xi, start, t_final, s).endpoint - ref)))
            for s in step_counts]
    hs = [t_final / s for s in step_counts]
    slope = float(np.polyfit(np.log(hs), np.log(errs), 1)[0])
    return slope, errs

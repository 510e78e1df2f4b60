"""Right-hand sides and time integration for the three evolution equations.

Flows (all with the algebra product taken nodewise):

    kdv:     u_t = -u_xxx - (1/2)(u^2)_x - [v, u]
    gardner: r_t = -r_xxx - (1/2)(r^2)_x + (eps^2/12)(r^2 r_x + r_x r^2)
    miura:   p_t = -p_xxx + (1/18)(p^3)_x          (default "gradient" cubic)
             p_t = -p_xxx + (1/12)(p^2 p_x + p_x p^2)   ("symmetric" cubic)

The Gardner quadratic term uses the product-rule identity
(1/2)(r r_x + r_x r) = (1/2)(r^2)_x, which holds for noncommuting values,
so the eps = 0 Gardner path is bit-identical to the v = 0 KdV path.

The two Miura cubic variants coincide on commuting data and differ by
(1/36)[p, [p, p_x]] in general; both are exposed because they play different
roles (the gradient form is the variational one, the symmetric form is the
one mapped exactly onto the KdV flow by the companion transform).

Steppers: classical RK4, and RK4 with an integrating factor that advances
the stiff dispersive part exactly in Fourier space (default).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import CDElement, mul_matrices, mul_values, structure_constants
from .fields import (
    AlgebraField,
    Grid,
    dealias_values,
    diff_values,
)

__all__ = [
    "FlowSpec",
    "Trajectory",
    "BlowUpError",
    "kdv_rhs",
    "gardner_rhs",
    "miura_rhs",
    "component_kdv_rhs",
    "make_rhs",
    "rk4_step",
    "evolve",
    "charge_names",
]

FLOW_KINDS = ("kdv", "gardner", "miura")
BLOWUP_THRESHOLD = 1e8


class BlowUpError(RuntimeError):
    """Raised when the solution becomes non-finite or exceeds the abort threshold."""

    def __init__(self, step: int, t: float, max_abs: float):
        self.step = step
        self.t = t
        self.max_abs = max_abs
        super().__init__(
            f"blow-up at step {step} (t = {t:.6g}): max|u| = {max_abs:.3e}"
        )


@dataclass
class FlowSpec:
    """One evolution problem: equation, parameters, grid and time stepping."""

    kind: str
    grid: Grid
    dt: float
    t_end: float
    epsilon: float = 0.0
    v: CDElement | None = None
    stepper: str = "ifrk4"
    miura_cubic: str = "gradient"

    def __post_init__(self):
        if self.kind not in FLOW_KINDS:
            raise ValueError(f"unknown flow kind {self.kind!r}")
        if not (self.dt > 0):
            raise ValueError("dt must be positive")
        if self.t_end < 0:
            raise ValueError("t_end must be >= 0")
        if not np.isfinite(self.epsilon):
            raise ValueError("epsilon must be finite")
        if self.stepper not in ("ifrk4", "rk4"):
            raise ValueError(f"unknown stepper {self.stepper!r}")
        if self.v is not None and self.v.level != 3:
            raise ValueError("external field v must be an octonion")
        if self.kind != "kdv" and self.v is not None and self.v.norm() != 0.0:
            raise ValueError("external field v must be zero for non-kdv flows")

    @property
    def n_steps(self) -> int:
        if self.t_end == 0:
            return 0
        steps = self.t_end / self.dt
        n = int(round(steps))
        if n < 1 or abs(steps - n) > 1e-9 * max(1.0, n):
            raise ValueError("t_end must be an integral number of dt steps")
        return n


# ---------------------------------------------------------------------------
# right-hand sides (array kernels + field-level wrappers)


def _commutator_matrix(v: CDElement | None) -> np.ndarray | None:
    """Matrix of x -> [v, x] = (L_v - R_v) x, or None when v vanishes."""
    if v is None or not v.coeffs.any():
        return None
    left, right = mul_matrices(v)
    return left - right


def _kdv_nonlinear(values: np.ndarray, grid: Grid, comm: np.ndarray | None) -> np.ndarray:
    sq = dealias_values(mul_values(values, values, 3), grid)
    out = -0.5 * diff_values(sq, grid, 1)
    if comm is not None:
        out -= values @ comm.T
    return out


def _gardner_nonlinear(values: np.ndarray, grid: Grid, epsilon: float) -> np.ndarray:
    sq = dealias_values(mul_values(values, values, 3), grid)
    out = -0.5 * diff_values(sq, grid, 1)
    if epsilon != 0.0:
        rx = diff_values(values, grid, 1)
        cubic = mul_values(sq, rx, 3) + mul_values(rx, sq, 3)
        out += (epsilon**2 / 12.0) * dealias_values(cubic, grid)
    return out


def _miura_nonlinear(values: np.ndarray, grid: Grid, cubic: str) -> np.ndarray:
    sq = dealias_values(mul_values(values, values, 3), grid)
    if cubic == "gradient":
        cu = dealias_values(mul_values(sq, values, 3), grid)
        return diff_values(cu, grid, 1) / 18.0
    if cubic == "symmetric":
        rx = diff_values(values, grid, 1)
        term = mul_values(sq, rx, 3) + mul_values(rx, sq, 3)
        return dealias_values(term, grid) / 12.0
    raise ValueError(f"unknown miura cubic form {cubic!r}")


def kdv_rhs(u: AlgebraField, v: CDElement | None = None) -> AlgebraField:
    """u_t for the algebra-valued KdV flow with optional constant external field."""
    out = -diff_values(u.values, u.grid, 3) + _kdv_nonlinear(
        u.values, u.grid, _commutator_matrix(v)
    )
    return AlgebraField(u.grid, out)


def gardner_rhs(r: AlgebraField, epsilon: float) -> AlgebraField:
    out = -diff_values(r.values, r.grid, 3) + _gardner_nonlinear(
        r.values, r.grid, epsilon
    )
    return AlgebraField(r.grid, out)


def miura_rhs(rh: AlgebraField, cubic: str = "gradient") -> AlgebraField:
    out = -diff_values(rh.values, rh.grid, 3) + _miura_nonlinear(
        rh.values, rh.grid, cubic
    )
    return AlgebraField(rh.grid, out)


def component_kdv_rhs(u: AlgebraField) -> AlgebraField:
    """KdV right-hand side written out in the eight real component fields.

    Uses only real products and the imaginary-unit structure constants:

        b_t   = -b_xxx - b b_x + sum_i B_i B_ix
        B_i,t = -B_i,xxx - (b B_i)_x - sum_jk B_j B_k c_jki

    The bilinear structure-constant sum cancels identically (c is
    antisymmetric); it is kept so the cross-check exercises the wiring.
    Independent realization used to validate the algebra-valued path.
    """
    grid = u.grid
    b = u.values[:, :1]
    B = u.values[:, 1:]
    c = structure_constants(3).imag
    quad = np.concatenate(
        [b * b - (B * B).sum(axis=1, keepdims=True), 2.0 * b * B], axis=1
    )
    quad = dealias_values(quad, grid)
    out = -diff_values(u.values, grid, 3) - 0.5 * diff_values(quad, grid, 1)
    bil = np.einsum("jki,nj,nk->ni", c, B, B)
    out[:, 1:] -= dealias_values(bil, grid)
    return AlgebraField(grid, out)


def make_rhs(spec: FlowSpec):
    """Full right-hand side of the requested flow on raw value arrays."""
    grid = spec.grid
    if spec.kind == "kdv":
        comm = _commutator_matrix(spec.v)

        def rhs(values):
            return -diff_values(values, grid, 3) + _kdv_nonlinear(values, grid, comm)

    elif spec.kind == "gardner":
        eps = spec.epsilon

        def rhs(values):
            return -diff_values(values, grid, 3) + _gardner_nonlinear(values, grid, eps)

    else:
        cubic = spec.miura_cubic

        def rhs(values):
            return -diff_values(values, grid, 3) + _miura_nonlinear(values, grid, cubic)

    return rhs


def _make_spectral_nonlinear(spec: FlowSpec):
    """Nonlinear term as a map on rfft coefficients, mirroring the physical
    path but fusing the dealias mask and derivative into single transforms."""
    grid = spec.grid
    n = grid.n
    mask = grid.dealias_mask()[:, None]
    ik = grid.diff_symbol(1)[:, None]

    if spec.kind == "kdv":
        comm = _commutator_matrix(spec.v)

        def nhat(vhat):
            u = np.fft.irfft(vhat, n=n, axis=0)
            sqh = mask * np.fft.rfft(mul_values(u, u, 3), axis=0)
            out = -0.5 * ik * sqh
            if comm is not None:
                out = out - vhat @ comm.T
            return out

        return nhat

    if spec.kind == "gardner":
        eps = spec.epsilon

        def nhat(vhat):
            u = np.fft.irfft(vhat, n=n, axis=0)
            sqh = mask * np.fft.rfft(mul_values(u, u, 3), axis=0)
            out = -0.5 * ik * sqh
            if eps != 0.0:
                sq = np.fft.irfft(sqh, n=n, axis=0)
                ux = np.fft.irfft(ik * vhat, n=n, axis=0)
                cubic = mul_values(sq, ux, 3) + mul_values(ux, sq, 3)
                out = out + (eps**2 / 12.0) * (mask * np.fft.rfft(cubic, axis=0))
            return out

        return nhat

    cubic_form = spec.miura_cubic
    if cubic_form not in ("gradient", "symmetric"):
        raise ValueError(f"unknown miura cubic form {cubic_form!r}")

    def nhat(vhat):
        u = np.fft.irfft(vhat, n=n, axis=0)
        sqh = mask * np.fft.rfft(mul_values(u, u, 3), axis=0)
        sq = np.fft.irfft(sqh, n=n, axis=0)
        if cubic_form == "gradient":
            cu = mul_values(sq, u, 3)
            return (ik / 18.0) * (mask * np.fft.rfft(cu, axis=0))
        ux = np.fft.irfft(ik * vhat, n=n, axis=0)
        term = mul_values(sq, ux, 3) + mul_values(ux, sq, 3)
        return (mask * np.fft.rfft(term, axis=0)) / 12.0

    return nhat


def rk4_step(rhs, values: np.ndarray, dt: float) -> np.ndarray:
    """One classical RK4 step of values' = rhs(values)."""
    k1 = rhs(values)
    k2 = rhs(values + 0.5 * dt * k1)
    k3 = rhs(values + 0.5 * dt * k2)
    k4 = rhs(values + dt * k3)
    return values + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


class _IFRK4:
    """RK4 with exact Fourier integration of the linear term -d^3/dx^3."""

    def __init__(self, grid: Grid, nonlinear_hat, dt: float):
        self.grid = grid
        self.nhat = nonlinear_hat
        self.dt = dt
        sym = -grid.diff_symbol(3)  # u_t = -u_xxx + N(u)
        self.e_half = np.exp(0.5 * dt * sym)[:, None]
        self.e_full = np.exp(dt * sym)[:, None]

    def step(self, vhat: np.ndarray) -> np.ndarray:
        dt, eh, ef = self.dt, self.e_half, self.e_full
        n1 = self.nhat(vhat)
        n2 = self.nhat(eh * (vhat + 0.5 * dt * n1))
        n3 = self.nhat(eh * vhat + 0.5 * dt * n2)
        n4 = self.nhat(ef * vhat + dt * eh * n3)
        return ef * vhat + (dt / 6.0) * (ef * n1 + 2.0 * eh * (n2 + n3) + n4)


# ---------------------------------------------------------------------------
# conserved-charge diagnostics recorded along every trajectory


def charge_names() -> list[str]:
    return ["t"] + [f"mass_{m}" for m in range(8)] + ["energy", "h1", "hM"]


def _charge_row(values: np.ndarray, grid: Grid) -> np.ndarray:
    """mass_0..7, energy = Int Re(u^2), h1, hM = -energy; see hamiltonian module."""
    mass = grid.quad(values)
    u0 = values[:, 0]
    ui = values[:, 1:]
    dv = diff_values(values, grid, 1)
    energy = grid.quad(u0**2 - (ui**2).sum(axis=1))
    h1 = grid.quad(
        u0**3 / 6.0
        - 0.5 * dv[:, 0] ** 2
        - 0.5 * u0 * (ui**2).sum(axis=1)
        + 0.5 * (dv[:, 1:] ** 2).sum(axis=1)
    )
    return np.concatenate([mass, [energy, h1, -energy]])


@dataclass
class Trajectory:
    """Snapshots plus the per-step conserved-charge time series."""

    spec: FlowSpec
    times: list[float] = field(default_factory=list)
    fields: list[AlgebraField] = field(default_factory=list)
    charge_times: np.ndarray | None = None
    charges: np.ndarray | None = None  # rows follow charge_names()[1:]

    @property
    def initial(self) -> AlgebraField:
        return self.fields[0]

    @property
    def final(self) -> AlgebraField:
        return self.fields[-1]

    def charge_table(self) -> np.ndarray:
        """Columns t, mass_0..mass_7, energy, h1, hM."""
        return np.column_stack([self.charge_times, self.charges])


def evolve(
    spec: FlowSpec,
    u0: AlgebraField,
    snapshot_every: int | None = None,
    record_charges: bool = True,
    rhs=None,
) -> Trajectory:
    """Integrate the flow, recording snapshots and charge diagnostics.

    ``rhs`` overrides the flow right-hand side (always stepped with plain
    RK4); used by cross-check harnesses. Aborts with :class:`BlowUpError`
    when the field stops being finite -- values are never clamped.

    For plain RK4 the dispersive stability limit is roughly
    dt < 2.8 / k_max^3 with k_max = pi n / L; the default integrating-factor
    stepper removes that constraint.
    """
    if u0.grid != spec.grid:
        raise ValueError("initial condition grid does not match spec.grid")
    n_steps = spec.n_steps
    if snapshot_every is None:
        snapshot_every = max(1, n_steps)

    traj = Trajectory(spec=spec)
    values = u0.values.copy()
    charge_rows = []
    charge_times = []

    def record(step: int, vals: np.ndarray) -> None:
        t = step * spec.dt
        if record_charges:
            charge_rows.append(_charge_row(vals, spec.grid))
            charge_times.append(t)
        if step == n_steps or step % snapshot_every == 0:
            traj.times.append(t)
            traj.fields.append(AlgebraField(spec.grid, vals.copy()))

    record(0, values)

    if rhs is not None or spec.stepper == "rk4":
        step_rhs = rhs if rhs is not None else make_rhs(spec)
        for step in range(1, n_steps + 1):
            values = rk4_step(step_rhs, values, spec.dt)
            _check_finite(values, step, spec.dt)
            record(step, values)
    else:
        engine = _IFRK4(spec.grid, _make_spectral_nonlinear(spec), spec.dt)
        vhat = np.fft.rfft(values, axis=0)
        for step in range(1, n_steps + 1):
            vhat = engine.step(vhat)
            values = np.fft.irfft(vhat, n=spec.grid.n, axis=0)
            _check_finite(values, step, spec.dt)
            record(step, values)

    if record_charges:
        traj.charge_times = np.array(charge_times)
        traj.charges = np.array(charge_rows)
    return traj


def _check_finite(values: np.ndarray, step: int, dt: float) -> None:
    peak = np.abs(values).max()
    if not np.isfinite(peak) or peak > BLOWUP_THRESHOLD:
        raise BlowUpError(step, step * dt, peak)

"""Densities, variational derivatives, Poisson operators, and their checks.

Densities (u0 real part, u_i imaginary components, x-subscripts derivatives):

    h1:  u0^3/6 - u0x^2/2 - u0 u_i^2/2 + u_ix^2/2
    hM:  -u0^2 + u_i^2
    lagrangian_eps(s, s_t):   Re[-s_x s_t/2 - s_x^3/6 + s_xx^2/2 + eps^2 s_x^4/72]
    lagrangian_kdv(s, s_t):   the eps -> 0 limit (no quartic term)
    lagrangian_miura(s, s_t): Re[-s_x s_t/2 + s_xx^2/2 + s_x^4/72]

Poisson operators are 8x8 matrices of kernels a(x) + b(x) d/dx + c d^3/dx^3,
acting under the convention that a derivative kernel contributes +f_x (the
first-structure flow residual pins this sign globally). Three kinds ship:

    first:      diag(-d/dx, +d/dx, ..., +d/dx), paired with H1
    second:     field-dependent kernels paired with HM; coefficients fixed by
                requiring skewness plus exact reproduction of the KdV flow,
                and cross-checked against the classical scalar second
                structure K = -d^3 - (2/3) u d - (1/3) u_x with H = Int u^2/2
    second_alt: an alternative coefficient table retained for comparison; it
                is reported on (flow residual, skewness) but never asserted

On commuting data (real or single-imaginary-direction fields) the ``second``
operator also passes a discrete Jacobi spot check; on fully octonionic data
a nonzero cyclic defect remains for every flow-matching coefficient choice
of this sectoral shape, and the verification report carries that number as
a finding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import mul_values
from .fields import (
    AlgebraField,
    Grid,
    diff_values,
    random_smooth_field,
    spectral_antiderivative,
)
from .flows import Trajectory, kdv_rhs

__all__ = [
    "Density",
    "DENSITY_KINDS",
    "eval_density",
    "functional_value",
    "variational_derivative",
    "PoissonOperator",
    "apply_poisson",
    "operator_skewness",
    "verify_poisson_flow",
    "second_structure_comparison",
    "scalar_second_structure_residual",
    "jacobi_cyclic_defect",
    "prepotential_series",
    "euler_lagrange_residual",
    "SECOND_COEFFS",
    "SECOND_ALT_COEFFS",
]

DENSITY_KINDS = (
    "h1",
    "hM",
    "lagrangian_eps",
    "lagrangian_kdv",
    "lagrangian_miura",
)

LAGRANGIAN_KINDS = ("lagrangian_eps", "lagrangian_kdv", "lagrangian_miura")


@dataclass(frozen=True)
class Density:
    kind: str
    epsilon: float = 0.0

    def __post_init__(self):
        if self.kind not in DENSITY_KINDS:
            raise ValueError(f"unknown density kind {self.kind!r}")


def _re_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Re(ab) nodewise = a0 b0 - sum_i a_i b_i."""
    return a[:, 0] * b[:, 0] - (a[:, 1:] * b[:, 1:]).sum(axis=1)


def eval_density(
    d: Density, u_or_s: AlgebraField, s_t: AlgebraField | None = None
) -> np.ndarray:
    """Nodewise real density.

    Hamiltonian kinds take the field u directly. Lagrangian kinds take the
    prepotential s (the flow field is s_x) and need its time derivative.
    """
    f = u_or_s
    if d.kind in LAGRANGIAN_KINDS:
        if s_t is None:
            raise ValueError(f"density {d.kind!r} needs the prepotential rate s_t")
        sx = diff_values(f.values, f.grid, 1)
        sxx = diff_values(f.values, f.grid, 2)
        sx2 = mul_values(sx, sx, f.level)
        out = -0.5 * _re_product(sx, s_t.values) + 0.5 * _re_product(sxx, sxx)
        if d.kind != "lagrangian_miura":
            out -= _re_product(sx2, sx) / 6.0
        if d.kind == "lagrangian_eps":
            out += d.epsilon**2 / 72.0 * _re_product(sx2, sx2)
        elif d.kind == "lagrangian_miura":
            out += _re_product(sx2, sx2) / 72.0
        return out

    u0 = f.values[:, 0]
    ui = f.values[:, 1:]
    if d.kind == "hM":
        return -(u0**2) + (ui**2).sum(axis=1)
    ux = diff_values(f.values, f.grid, 1)
    return (
        u0**3 / 6.0
        - 0.5 * ux[:, 0] ** 2
        - 0.5 * u0 * (ui**2).sum(axis=1)
        + 0.5 * (ux[:, 1:] ** 2).sum(axis=1)
    )


def functional_value(
    d: Density, u_or_s: AlgebraField, s_t: AlgebraField | None = None
) -> float:
    return float(u_or_s.grid.quad(eval_density(d, u_or_s, s_t)))


def variational_derivative(d: Density, u: AlgebraField) -> AlgebraField:
    """Euler-operator gradient deltaH/delta u_m, for densities in u and u_x.

    h1: g_0 = u0^2/2 - u_i^2/2 + u0_xx,   g_i = -u0 u_i - u_i,xx
    hM: g_0 = -2 u0,                      g_i = +2 u_i
    """
    if d.kind == "hM":
        g = 2.0 * u.values.copy()
        g[:, 0] *= -1.0
        return AlgebraField(u.grid, g)
    if d.kind != "h1":
        raise ValueError(f"no variational derivative for density {d.kind!r}")
    u0 = u.values[:, 0]
    ui = u.values[:, 1:]
    uxx = diff_values(u.values, u.grid, 2)
    g = np.empty_like(u.values)
    g[:, 0] = 0.5 * u0**2 - 0.5 * (ui**2).sum(axis=1) + uxx[:, 0]
    g[:, 1:] = -u0[:, None] * ui - uxx[:, 1:]
    return AlgebraField(u.grid, g)


# ---------------------------------------------------------------------------
# Poisson operators

# kernel coefficients per sector; keys: d3 (third derivative), u0_dx, u0x,
# uix, ui_dx -- each kernel acts as f -> c_d3 f_xxx + c_b(x) f_x + c_a(x) f
SECOND_COEFFS = {
    "u0_u0": {"d3": 0.5, "u0_dx": 1.0 / 3.0, "u0x": 1.0 / 6.0},
    "ui_uj_diag": {"d3": -0.5, "u0_dx": -1.0 / 3.0, "u0x": -1.0 / 6.0},
    "u0_ui": {"uix": 1.0 / 6.0, "ui_dx": 1.0 / 3.0},
    "ui_u0": {"uix": 1.0 / 6.0, "ui_dx": 1.0 / 3.0},
}

SECOND_ALT_COEFFS = {
    "u0_u0": {"d3": -1.0, "u0_dx": 2.0 / 3.0, "u0x": 0.5},
    "ui_uj_diag": {"d3": -1.0, "u0_dx": -2.0 / 3.0, "u0x": -1.0 / 3.0},
    "u0_ui": {"uix": 1.0 / 3.0, "ui_dx": 2.0 / 3.0},
    "ui_u0": {"uix": 1.0 / 3.0, "ui_dx": 2.0 / 3.0},
}

POISSON_KINDS = ("first", "second", "second_alt")


@dataclass
class PoissonOperator:
    """Matrix of differential-operator kernels; ``second*`` kinds carry the base field."""

    kind: str
    u: AlgebraField | None = None

    def __post_init__(self):
        if self.kind not in POISSON_KINDS:
            raise ValueError(f"unknown Poisson operator kind {self.kind!r}")
        if self.kind != "first" and self.u is None:
            raise ValueError(f"operator {self.kind!r} needs a base field u")

    def apply(self, g: AlgebraField) -> AlgebraField:
        return apply_poisson(self, g)


def apply_poisson(K: PoissonOperator, g: AlgebraField) -> AlgebraField:
    """udot_m = sum_n K_mn g_n with derivative kernels contributing +f_x."""
    grid = g.grid
    if K.kind == "first":
        out = diff_values(g.values, grid, 1)
        out[:, 0] *= -1.0
        return AlgebraField(grid, out)

    coeffs = SECOND_COEFFS if K.kind == "second" else SECOND_ALT_COEFFS
    if K.u.grid != grid:
        raise ValueError("gradient grid does not match the operator base field")
    u = K.u.values
    ux = diff_values(u, grid, 1)
    gx = diff_values(g.values, grid, 1)
    gxxx = diff_values(g.values, grid, 3)
    u0, u0x = u[:, 0], ux[:, 0]
    g0, g0x, g0xxx = g.values[:, 0], gx[:, 0], gxxx[:, 0]

    out = np.empty_like(g.values)
    c = coeffs["u0_u0"]
    out[:, 0] = c["d3"] * g0xxx + c["u0_dx"] * u0 * g0x + c["u0x"] * u0x * g0
    c = coeffs["u0_ui"]
    out[:, 0] += (
        c["uix"] * (ux[:, 1:] * g.values[:, 1:]).sum(axis=1)
        + c["ui_dx"] * (u[:, 1:] * gx[:, 1:]).sum(axis=1)
    )
    cd = coeffs["ui_uj_diag"]
    ci = coeffs["ui_u0"]
    out[:, 1:] = (
        cd["d3"] * gxxx[:, 1:]
        + cd["u0_dx"] * u0[:, None] * gx[:, 1:]
        + cd["u0x"] * u0x[:, None] * g.values[:, 1:]
        + ci["uix"] * ux[:, 1:] * g0[:, None]
        + ci["ui_dx"] * u[:, 1:] * g0x[:, None]
    )
    return AlgebraField(grid, out)


def operator_skewness(K: PoissonOperator, grid: Grid, seed: int = 0, trials: int = 8) -> float:
    """max |<f, Kg> + <g, Kf>| over random unit-norm band-limited test fields."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        f = random_smooth_field(grid, int(rng.integers(2**31)), amplitude=1.0)
        g = random_smooth_field(grid, int(rng.integers(2**31)), amplitude=1.0)
        kf = apply_poisson(K, f).values
        kg = apply_poisson(K, g).values
        s = grid.quad((f.values * kg).sum(axis=1) + (g.values * kf).sum(axis=1))
        worst = max(worst, abs(float(s)))
    return worst


def scalar_second_structure_residual(u: AlgebraField) -> float:
    """Classical scalar oracle: K g - kdv_rhs with K = -d^3 - (2/3)u d - (1/3)u_x, H = Int u^2/2.

    Requires a real-sector field (imaginary components identically zero).
    """
    if np.abs(u.values[:, 1:]).max() != 0.0:
        raise ValueError("scalar oracle needs a real-sector field")
    grid = u.grid
    g = u.values[:, 0]  # deltaH/delta u for H = Int u^2/2
    kg = (
        -diff_values(g[:, None], grid, 3)[:, 0]
        - 2.0 / 3.0 * u.values[:, 0] * diff_values(g[:, None], grid, 1)[:, 0]
        - 1.0 / 3.0 * diff_values(u.values, grid, 1)[:, 0] * g
    )
    rhs = kdv_rhs(u).values[:, 0]
    return float(np.abs(kg - rhs).max())


def verify_poisson_flow(structure: str, u: AlgebraField, tol: float = 1e-8) -> dict:
    """Residual report of apply_poisson(K, deltaH/delta u) against the KdV flow.

    A nonzero residual is reported, never raised. For ``second_alt`` the
    report is informational and carries per-sector coefficient diagnostics.
    """
    if structure == "first":
        grad = variational_derivative(Density("h1"), u)
        K = PoissonOperator("first")
        ham = "h1"
    else:
        grad = variational_derivative(Density("hM"), u)
        K = PoissonOperator(structure, u=u)
        ham = "hM"
    flow = apply_poisson(K, grad).values
    target = kdv_rhs(u).values
    resid = flow - target
    report = {
        "structure": structure,
        "hamiltonian": ham,
        "residual_linf": float(np.abs(resid).max()),
        "residual_per_component": np.abs(resid).max(axis=0).tolist(),
        "flow_scale": float(np.abs(target).max()),
        "tolerance": tol,
    }
    if structure == "second_alt":
        report["status"] = "informational"
        report["passed"] = None
        report["coefficient_comparison"] = _coefficient_comparison()
        report["skewness"] = operator_skewness(K, u.grid, seed=1)
    else:
        report["passed"] = bool(report["residual_linf"] < tol)
    return report


def _coefficient_comparison() -> dict:
    """Per-sector, per-term table: validated vs alternative kernel coefficients."""
    out = {}
    for sector, validated in SECOND_COEFFS.items():
        alt = SECOND_ALT_COEFFS[sector]
        rows = {}
        for term in validated:
            v, a = validated[term], alt[term]
            rows[term] = {
                "validated": v,
                "alternative": a,
                "ratio": a / v if v else None,
            }
        out[sector] = rows
    return out


def second_structure_comparison(u: AlgebraField) -> dict:
    """Structured, informational comparison of the two second-structure tables."""
    main = verify_poisson_flow("second", u)
    alt = verify_poisson_flow("second_alt", u)
    return {
        "status": "informational",
        "flow_residual": {
            "second": main["residual_linf"],
            "second_alt": alt["residual_linf"],
        },
        "skewness": {
            "second": operator_skewness(PoissonOperator("second", u=u), u.grid, seed=1),
            "second_alt": alt["skewness"],
        },
        "coefficients": _coefficient_comparison(),
        "notes": [
            "second_alt imaginary-sector kernels are twice the validated ones",
            "second_alt real-sector kernel is not uniformly rescalable and is "
            "not skew-symmetric; see the skewness figures",
        ],
    }


# ---------------------------------------------------------------------------
# Jacobi spot check


def jacobi_cyclic_defect(
    structure: str,
    u: AlgebraField,
    seed: int = 0,
    mode_cutoff: int = 3,
    h: float = 1e-5,
) -> float:
    """Cyclic sum {{F,G},H} + {{G,H},F} + {{H,F},G} on quadratic functionals.

    F(u) = (1/2) Int phi_m u_m^2 dx for three random band-limited weights phi.
    Gradients of the inner brackets are taken by nodewise central differences.
    """
    grid = u.grid
    rng = np.random.default_rng(seed)
    phis = [
        random_smooth_field(
            grid, int(rng.integers(2**31)), mode_cutoff=mode_cutoff, amplitude=1.0
        ).values
        for _ in range(3)
    ]

    def K_of(values: np.ndarray) -> PoissonOperator:
        if structure == "first":
            return PoissonOperator("first")
        return PoissonOperator(structure, u=AlgebraField(grid, values))

    def bracket(phi: np.ndarray, psi: np.ndarray, values: np.ndarray) -> float:
        kf = apply_poisson(K_of(values), AlgebraField(grid, psi * values)).values
        return float(grid.quad(((phi * values) * kf).sum(axis=1)))

    w = grid.dx

    def grad_bracket(phi: np.ndarray, psi: np.ndarray, values: np.ndarray) -> np.ndarray:
        g = np.zeros_like(values)
        flat = values.ravel()
        for idx in range(flat.size):
            bump = np.zeros_like(flat)
            bump[idx] = h
            up = (flat + bump).reshape(values.shape)
            dn = (flat - bump).reshape(values.shape)
            g.flat[idx] = (bracket(phi, psi, up) - bracket(phi, psi, dn)) / (2 * h * w)
        return g

    total = 0.0
    for a, b, c in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
        gb = grad_bracket(phis[a], phis[b], u.values)
        kf = apply_poisson(K_of(u.values), AlgebraField(grid, phis[c] * u.values)).values
        total += float(grid.quad((gb * kf).sum(axis=1)))
    return total


# ---------------------------------------------------------------------------
# discrete Euler-Lagrange residual


def prepotential_series(traj: Trajectory) -> tuple[np.ndarray, list[AlgebraField]]:
    """Zero-mean-gauge antiderivatives of every snapshot of a trajectory."""
    times = np.asarray(traj.times, dtype=float)
    return times, [spectral_antiderivative(f) for f in traj.fields]


def euler_lagrange_residual(
    kind: str,
    times: np.ndarray,
    s_fields: list[AlgebraField],
    epsilon: float = 0.0,
) -> float:
    """Sup-norm of the discrete action gradient over interior space-time nodes.

    The action is the density summed over interior time slices with
    rectangle weights, s_t taken by centered time differences; the gradient
    is formed by nodewise central difference quotients and scaled back to a
    density. Near zero (to O(dt^2) sampling error) exactly when the sampled
    trajectory solves the matching flow.
    """
    if kind not in LAGRANGIAN_KINDS:
        raise ValueError(f"{kind!r} is not a Lagrangian density kind")
    times = np.asarray(times, dtype=float)
    T = times.size
    if T < 5:
        raise ValueError("need at least 5 snapshots for an interior stencil")
    dts = np.diff(times)
    dt = dts[0]
    if not np.allclose(dts, dt, rtol=1e-8, atol=0.0):
        raise ValueError("snapshots must be uniformly spaced in time")
    grid = s_fields[0].grid
    for f in s_fields:
        if f.grid != grid:
            raise ValueError("all snapshots must share one grid")
    S = np.array([f.values for f in s_fields])  # (T, n, 8)
    dens = Density(kind, epsilon=epsilon)

    def slice_density(sarr: np.ndarray, k: int) -> float:
        st = (sarr[k + 1] - sarr[k - 1]) / (2.0 * dt)
        val = eval_density(
            dens, AlgebraField(grid, sarr[k]), AlgebraField(grid, st)
        )
        return float(val.sum() * grid.dx)

    def local_action(sarr: np.ndarray, k: int) -> float:
        # slices whose density depends on s[k]
        lo = max(1, k - 1)
        hi = min(T - 2, k + 1)
        return dt * sum(slice_density(sarr, j) for j in range(lo, hi + 1))

    scale = max(1.0, np.abs(S).max())
    h = 1e-6 * scale
    worst = 0.0
    Swork = S.copy()
    for k in range(2, T - 2):
        for j in range(grid.n):
            for m in range(S.shape[2]):
                orig = Swork[k, j, m]
                Swork[k, j, m] = orig + h
                up = local_action(Swork, k)
                Swork[k, j, m] = orig - h
                dn = local_action(Swork, k)
                Swork[k, j, m] = orig
                grad = (up - dn) / (2.0 * h)
                worst = max(worst, abs(grad) / (grid.dx * dt))
    return worst

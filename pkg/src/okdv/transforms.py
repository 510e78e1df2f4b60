"""Solution maps between the companion flows and the charge generator.

The forward maps

    gardner: u = r + eps r_x - (eps^2/6) r^2
    miura:   u = p_x - (1/6) p^2

send solutions of the companion flows onto solutions of the KdV flow; the
inverse of the Gardner map, expanded as a formal power series in eps,
generates the sequence of conserved densities whose real-part integrals are
the charges Q_n.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import (
    AlgebraField,
    dealias,
    dealias_values,
    diff_values,
    fmul,
    integrate,
)
from .flows import gardner_rhs, kdv_rhs, miura_rhs

__all__ = [
    "GardnerSeries",
    "gardner_map",
    "miura_map",
    "gardner_series",
    "conserved_charges",
    "charge_diagnostics",
    "gardner_map_defect",
    "miura_map_defect",
]


def gardner_map(r: AlgebraField, epsilon: float) -> AlgebraField:
    """u = r + eps r_x - (eps^2/6) r^2 (square dealiased)."""
    out = r.values + epsilon * diff_values(r.values, r.grid, 1)
    if epsilon != 0.0:
        sq = dealias(fmul(r, r))
        out = out - (epsilon**2 / 6.0) * sq.values
    return AlgebraField(r.grid, out)


def miura_map(rh: AlgebraField) -> AlgebraField:
    """u = p_x - (1/6) p^2 (square dealiased)."""
    sq = dealias(fmul(rh, rh))
    return AlgebraField(
        rh.grid, diff_values(rh.values, rh.grid, 1) - sq.values / 6.0
    )


@dataclass
class GardnerSeries:
    """Coefficients r_0..r_N of the formal series inverting the Gardner map."""

    order: int
    terms: list[AlgebraField]

    def partial_sum(self, epsilon: float, order: int | None = None) -> AlgebraField:
        n = self.order if order is None else order
        acc = self.terms[0].values.copy()
        for k in range(1, n + 1):
            acc += epsilon**k * self.terms[k].values
        return AlgebraField(self.terms[0].grid, acc)


def gardner_series(u: AlgebraField, n_terms: int) -> GardnerSeries:
    """Solve u = r + eps r_x - (eps^2/6) r^2 order by order in eps.

    r_0 = u, r_1 = -(r_0)_x, and for n >= 2

        r_n = -(r_{n-1})_x + (1/6) sum_{a+b=n-2} r_a r_b,

    the quadratic sum running over ordered pairs, which symmetrizes the
    noncommuting products. Terms beyond r_0 are dealiased on construction.
    """
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    grid = u.grid
    terms = [u]
    for n in range(1, n_terms + 1):
        new = -diff_values(terms[n - 1].values, grid, 1)
        if n >= 2:
            acc = np.zeros_like(new)
            for a in range(n - 1):
                b = n - 2 - a
                acc += fmul(terms[a], terms[b]).values
            new = new + acc / 6.0
        new = dealias_values(new, grid)
        terms.append(AlgebraField(grid, new))
    return GardnerSeries(order=n_terms, terms=terms)


def conserved_charges(u: AlgebraField, n_charges: int) -> np.ndarray:
    """Q_n = Int Re(r_n) dx for n = 0..n_charges-1."""
    if n_charges < 1:
        raise ValueError("n_charges must be >= 1")
    series = gardner_series(u, max(1, n_charges - 1))
    return np.array(
        [integrate(series.terms[n]).coeffs[0] for n in range(n_charges)]
    )


def charge_diagnostics(u: AlgebraField, n_charges: int) -> dict:
    """Real charges plus the (unasserted) imaginary-component integrals."""
    series = gardner_series(u, max(1, n_charges - 1))
    rows = [integrate(series.terms[n]).coeffs for n in range(n_charges)]
    stack = np.array(rows)
    return {
        "real": stack[:, 0].tolist(),
        "imag": stack[:, 1:].tolist(),
    }


# ---------------------------------------------------------------------------
# instantaneous map-commutation defects
#
# For a map u = F(r) to intertwine a companion flow r_t = G(r) with the KdV
# flow, the defect F'(r)[G(r)] - kdv_rhs(F(r)) must vanish. These helpers
# evaluate it without any time stepping and back the trajectory-level tests.


def gardner_map_defect(r: AlgebraField, epsilon: float) -> float:
    g = gardner_rhs(r, epsilon)
    jac = g.values + epsilon * diff_values(g.values, r.grid, 1)
    if epsilon != 0.0:
        sym = fmul(r, g).values + fmul(g, r).values
        jac = jac - (epsilon**2 / 6.0) * dealias_values(sym, r.grid)
    rhs_of_image = kdv_rhs(gardner_map(r, epsilon))
    return float(np.abs(jac - rhs_of_image.values).max())


def miura_map_defect(rh: AlgebraField, cubic: str = "gradient") -> float:
    g = miura_rhs(rh, cubic=cubic)
    sym = fmul(rh, g).values + fmul(g, rh).values
    jac = diff_values(g.values, rh.grid, 1) - dealias_values(sym, rh.grid) / 6.0
    rhs_of_image = kdv_rhs(miura_map(rh))
    return float(np.abs(jac - rhs_of_image.values).max())

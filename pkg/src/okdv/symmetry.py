"""Finite symmetry actions and equivariance harnesses for the flows.

Galileo boost (speed c, real): a trajectory u(x, t) is mapped to
u(x - ct, t) + c, realized with trigonometric interpolation so arbitrary
shift distances are exact on band-limited fields.

Automorphisms: exp(t D) for a derivation D, applied nodewise to the field
coefficients. With a nonzero constant external field v the flow only
commutes with automorphisms fixing v, i.e. generators with D(v) = 0; that
stabilizer subalgebra has dimension 8 inside the 14-dimensional derivation
algebra for any nonzero imaginary v.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .algebra import CDElement, automorphism_exp, derivation_pairs
from .fields import AlgebraField, spectral_shift
from .flows import FlowSpec, Trajectory, evolve

__all__ = [
    "SymmetrySpec",
    "StabilizerError",
    "apply_automorphism",
    "automorphism_matrix",
    "galileo_boost",
    "equivariance_residual",
    "derivation_span",
    "stabilizer_subspace",
    "stabilizer_generator",
]


class StabilizerError(ValueError):
    """Requested automorphism generator does not fix the external field."""


@dataclass(frozen=True)
class SymmetrySpec:
    """kind 'galileo' with boost speed c, or 'automorphism' with (i, j, t)."""

    kind: str
    c: float = 0.0
    i: int = 1
    j: int = 2
    t: float = 0.0

    def __post_init__(self):
        if self.kind not in ("galileo", "automorphism"):
            raise ValueError(f"unknown symmetry kind {self.kind!r}")
        if self.kind == "automorphism" and not (
            1 <= self.i <= 7 and 1 <= self.j <= 7 and self.i != self.j
        ):
            raise ValueError("automorphism generator needs distinct imaginary indices")


_AUTOMORPHISM_CACHE: dict[tuple[int, int, float], np.ndarray] = {}


def automorphism_matrix(i: int, j: int, t: float) -> np.ndarray:
    """Cached exp(t D_{e_i,e_j}) for unit-pair generators."""
    key = (i, j, float(t))
    if key not in _AUTOMORPHISM_CACHE:
        _AUTOMORPHISM_CACHE[key] = automorphism_exp(
            CDElement.basis(3, i), CDElement.basis(3, j), t
        )
    return _AUTOMORPHISM_CACHE[key]


def apply_automorphism(f: AlgebraField, phi: np.ndarray) -> AlgebraField:
    return AlgebraField(f.grid, f.values @ phi.T)


def galileo_boost(traj: Trajectory, c: float) -> Trajectory:
    """Boosted trajectory: each snapshot shifted by c t and offset by +c."""
    fields = []
    for t, f in zip(traj.times, traj.fields):
        g = spectral_shift(f, c * t)
        values = g.values.copy()
        values[:, 0] += c
        fields.append(AlgebraField(f.grid, values))
    return Trajectory(spec=traj.spec, times=list(traj.times), fields=fields)


def _generator_matrix(spec: SymmetrySpec, generator: np.ndarray | None) -> np.ndarray:
    if generator is not None:
        return generator
    from .algebra import derivation_matrix

    return derivation_matrix(CDElement.basis(3, spec.i), CDElement.basis(3, spec.j))


def equivariance_residual(
    spec: SymmetrySpec,
    flow: FlowSpec,
    u0: AlgebraField,
    snapshot_every: int | None = None,
    generator: np.ndarray | None = None,
) -> float:
    """sup norm of (transform o evolve - evolve o transform) over snapshots.

    For automorphism specs with a nonzero flow field v, the generator must
    annihilate v (checked up front, tolerance 1e-12 relative); otherwise the
    comparison is rejected rather than silently run.
    """
    if spec.kind == "galileo":
        base = evolve(flow, u0, snapshot_every=snapshot_every, record_charges=False)
        boosted = galileo_boost(base, spec.c)
        shifted_ic = boosted.fields[0]
        other = evolve(flow, shifted_ic, snapshot_every=snapshot_every, record_charges=False)
        worst = 0.0
        for f, g in zip(boosted.fields, other.fields):
            worst = max(worst, float(np.abs(f.values - g.values).max()))
        return worst

    D = _generator_matrix(spec, generator)
    if flow.v is not None and flow.v.norm() > 0:
        dv = D @ flow.v.coeffs
        if np.linalg.norm(dv) > 1e-12 * max(1.0, np.linalg.norm(D)) * flow.v.norm():
            raise StabilizerError(
                "generator does not stabilize v: |D v| = "
                f"{np.linalg.norm(dv):.3e}"
            )
    phi = expm(spec.t * D)
    base = evolve(flow, u0, snapshot_every=snapshot_every, record_charges=False)
    other = evolve(
        flow, apply_automorphism(u0, phi), snapshot_every=snapshot_every,
        record_charges=False,
    )
    worst = 0.0
    for f, g in zip(base.fields, other.fields):
        worst = max(
            worst, float(np.abs(apply_automorphism(f, phi).values - g.values).max())
        )
    return worst


def derivation_span(tol: float = 1e-9) -> np.ndarray:
    """Orthonormal basis (rank x 64) of the span of the pair derivations."""
    stack = np.array([m.ravel() for _, m in derivation_pairs()])
    _, s, vt = np.linalg.svd(stack, full_matrices=False)
    rank = int((s > tol * s[0]).sum())
    return vt[:rank]


def stabilizer_subspace(v: CDElement, tol: float = 1e-9) -> tuple[int, np.ndarray]:
    """Dimension and orthonormal basis of {D in span : D v = 0}.

    Returns matrices flattened to rows of shape (dim, 64).
    """
    span = derivation_span(tol)
    A = np.array([row.reshape(8, 8) @ v.coeffs for row in span]).T  # 8 x rank
    u_, s, vt = np.linalg.svd(A)
    rank = int((s > tol * (s[0] if s.size else 1.0)).sum())
    null = vt[rank:]  # coordinates in the span basis
    basis = null @ span
    return basis.shape[0], basis


def stabilizer_generator(v: CDElement, seed: int = 0) -> np.ndarray:
    """One normalized derivation with D v = 0 (random span direction)."""
    dim, basis = stabilizer_subspace(v)
    if dim == 0:
        raise StabilizerError("stabilizer of v is trivial")
    rng = np.random.default_rng(seed)
    coeff = rng.normal(size=dim)
    D = (coeff @ basis).reshape(8, 8)
    return D / np.linalg.norm(D)

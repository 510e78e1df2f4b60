"""Cayley-Dickson algebras: reals, complexes, quaternions, octonions, sedenions.

An element of the level-``l`` algebra is a flat vector of ``2**l`` real
coefficients over the basis ``e_0 = 1, e_1, ..., e_{2**l - 1}``. The product
is defined once and for all by the recursive doubling rule

    (a1, a2)(b1, b2) = (a1*b1 - conj(b2)*a2,  b2*a1 + a2*conj(b1)),

grounded in ordinary real multiplication at level 0. Every multiplication
table and structure constant in this package is derived from this rule;
nothing is entered by hand. For the octonions (level 3) the rule yields the
positively oriented basis triples

    (1,2,3) (1,4,5) (1,7,6) (2,4,6) (2,5,7) (3,4,7) (3,6,5)

so e.g. ``e1*e2 = e3`` and ``e1*e7 = e6``.

Levels 0..3 are division algebras (the norm is multiplicative); level 4
(sedenions) has zero divisors, and :func:`find_zero_divisor` produces a
witness pair by search.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

__all__ = [
    "CDElement",
    "StructureConstants",
    "structure_constants",
    "cd_mul",
    "cd_mul_recursive",
    "cd_conj",
    "cd_norm",
    "commutator",
    "associator",
    "derivation",
    "derivation_matrix",
    "derivation_pairs",
    "derivation_basis_rank",
    "automorphism_exp",
    "mul_matrices",
    "find_zero_divisor",
    "multiplication_table_csv",
]

OCTONION_LEVEL = 3
OCTONION_DIM = 8


def _conj_values(x: np.ndarray) -> np.ndarray:
    y = np.array(x, dtype=float, copy=True)
    y[..., 1:] = -y[..., 1:]
    return y


def _mul_recursive(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Doubling product on trailing coefficient axes. Correctness oracle."""
    d = x.shape[-1]
    if d == 1:
        return x * y
    h = d // 2
    a1, a2 = x[..., :h], x[..., h:]
    b1, b2 = y[..., :h], y[..., h:]
    return np.concatenate(
        [
            _mul_recursive(a1, b1) - _mul_recursive(_conj_values(b2), a2),
            _mul_recursive(b2, a1) + _mul_recursive(a2, _conj_values(b1)),
        ],
        axis=-1,
    )


class StructureConstants:
    """Signed basis table and product tensor of one Cayley-Dickson level.

    Attributes
    ----------
    index, sign:
        ``e_i e_j = sign[i, j] * e_{index[i, j]}``.
    tensor:
        dense ``(d, d, d)`` array with ``(x y)_k = sum_ij x_i y_j tensor[i,j,k]``.
    imag:
        totally antisymmetric constants ``c[j-1, k-1, i-1]`` of the
        imaginary-unit products, ``e_j e_k = -delta_jk + sum_i c_jki e_i``
        for ``j, k, i >= 1``.
    """

    def __init__(self, level: int):
        if level < 0:
            raise ValueError("level must be >= 0")
        self.level = level
        d = 2**level
        self.dim = d
        index = np.zeros((d, d), dtype=np.intp)
        sign = np.zeros((d, d))
        tensor = np.zeros((d, d, d))
        eye = np.eye(d)
        for i in range(d):
            prod = _mul_recursive(np.broadcast_to(eye[i], (d, d)).copy(), eye)
            k = np.argmax(np.abs(prod), axis=1)
            index[i] = k
            sign[i] = prod[np.arange(d), k]
            tensor[i] = prod
        self.index = index
        self.sign = sign
        self.tensor = tensor
        self.tensor_flat = np.ascontiguousarray(tensor.reshape(d, d * d))
        self.imag = tensor[1:, 1:, 1:].copy()

    def regenerate_table(self) -> tuple[np.ndarray, np.ndarray]:
        """Recompute (index, sign) from the doubling rule, for self-checks."""
        fresh = StructureConstants(self.level)
        return fresh.index, fresh.sign


@lru_cache(maxsize=None)
def structure_constants(level: int) -> StructureConstants:
    return StructureConstants(level)


def mul_values(x: np.ndarray, y: np.ndarray, level: int) -> np.ndarray:
    """Table-based product on trailing coefficient axes (hot path).

    Contracted as (x @ T)[..., j, k] * y[..., j] summed over j, which runs
    through BLAS instead of a generic three-way einsum.
    """
    sc = structure_constants(level)
    d = sc.dim
    left = (x @ sc.tensor_flat).reshape(*x.shape[:-1], d, d)
    return np.einsum("...jk,...j->...k", left, y)


class CDElement:
    """One Cayley-Dickson element: ``2**level`` real coefficients.

    ``coeffs[0]`` is the real part; ``coeffs[i]`` multiplies ``e_i``.
    Instances are value-like: no operation mutates its inputs.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        arr = np.asarray(coeffs, dtype=float)
        if arr.ndim != 1 or arr.size == 0 or arr.size & (arr.size - 1):
            raise ValueError("coeffs length must be a power of two")
        self.coeffs = arr

    @property
    def level(self) -> int:
        return int(self.coeffs.size).bit_length() - 1

    @classmethod
    def zero(cls, level: int = OCTONION_LEVEL) -> "CDElement":
        return cls(np.zeros(2**level))

    @classmethod
    def one(cls, level: int = OCTONION_LEVEL) -> "CDElement":
        return cls.basis(level, 0)

    @classmethod
    def basis(cls, level: int, i: int) -> "CDElement":
        v = np.zeros(2**level)
        v[i] = 1.0
        return cls(v)

    @classmethod
    def from_real(cls, value: float, level: int = OCTONION_LEVEL) -> "CDElement":
        v = np.zeros(2**level)
        v[0] = value
        return cls(v)

    def conj(self) -> "CDElement":
        return CDElement(_conj_values(self.coeffs))

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def real(self) -> float:
        return float(self.coeffs[0])

    def imag(self) -> "CDElement":
        v = self.coeffs.copy()
        v[0] = 0.0
        return CDElement(v)

    def __add__(self, other: "CDElement") -> "CDElement":
        _check_levels(self, other)
        return CDElement(self.coeffs + other.coeffs)

    def __sub__(self, other: "CDElement") -> "CDElement":
        _check_levels(self, other)
        return CDElement(self.coeffs - other.coeffs)

    def __neg__(self) -> "CDElement":
        return CDElement(-self.coeffs)

    def __mul__(self, other):
        if isinstance(other, CDElement):
            return cd_mul(self, other)
        return CDElement(self.coeffs * float(other))

    def __rmul__(self, other):
        return CDElement(self.coeffs * float(other))

    def allclose(self, other: "CDElement", atol: float = 1e-12) -> bool:
        return self.level == other.level and bool(
            np.allclose(self.coeffs, other.coeffs, atol=atol, rtol=0.0)
        )

    def __repr__(self) -> str:
        terms = [
            f"{c:+g}*e{i}" for i, c in enumerate(self.coeffs) if abs(c) > 0
        ]
        return "CDElement(" + (" ".join(terms) if terms else "0") + ")"


def _check_levels(*elements: CDElement) -> int:
    levels = {e.level for e in elements}
    if len(levels) != 1:
        raise ValueError(f"level mismatch: {sorted(levels)}")
    return levels.pop()


def cd_mul(a: CDElement, b: CDElement) -> CDElement:
    """Product via the precomputed signed table."""
    level = _check_levels(a, b)
    return CDElement(mul_values(a.coeffs, b.coeffs, level))


def cd_mul_recursive(a: CDElement, b: CDElement) -> CDElement:
    """Product via direct doubling recursion; oracle for the table path."""
    _check_levels(a, b)
    return CDElement(_mul_recursive(a.coeffs, b.coeffs))


def cd_conj(a: CDElement) -> CDElement:
    return a.conj()


def cd_norm(a: CDElement) -> float:
    return a.norm()


def commutator(a: CDElement, b: CDElement) -> CDElement:
    """[a, b] = ab - ba."""
    return cd_mul(a, b) - cd_mul(b, a)


def associator(a: CDElement, b: CDElement, c: CDElement) -> CDElement:
    """[a, b, c] = (ab)c - a(bc)."""
    _check_levels(a, b, c)
    return cd_mul(cd_mul(a, b), c) - cd_mul(a, cd_mul(b, c))


def derivation(a: CDElement, b: CDElement, x: CDElement) -> CDElement:
    """D_{a,b}(x) = [[a,b],x] - 3[a,b,x].

    For octonions these maps satisfy the Leibniz rule, return purely
    imaginary values, and span the 14-dimensional derivation algebra.
    """
    if _check_levels(a, b, x) != OCTONION_LEVEL:
        raise ValueError("derivations are only supported at the octonion level")
    return commutator(commutator(a, b), x) - 3.0 * associator(a, b, x)


def derivation_matrix(a: CDElement, b: CDElement) -> np.ndarray:
    """D_{a,b} as an 8x8 real matrix acting on coefficient vectors."""
    cols = [
        derivation(a, b, CDElement.basis(OCTONION_LEVEL, k)).coeffs
        for k in range(OCTONION_DIM)
    ]
    return np.column_stack(cols)


def derivation_pairs() -> list[tuple[tuple[int, int], np.ndarray]]:
    """All 21 generators D_{e_i, e_j}, 1 <= i < j <= 7, as matrices."""
    out = []
    for i in range(1, 8):
        for j in range(i + 1, 8):
            mat = derivation_matrix(
                CDElement.basis(OCTONION_LEVEL, i),
                CDElement.basis(OCTONION_LEVEL, j),
            )
            out.append(((i, j), mat))
    return out


def derivation_basis_rank(
    pairs: list[tuple[int, int]] | None = None, tol: float = 1e-9
) -> int:
    """Rank of the span of the basis derivations (14 for the full set)."""
    if pairs is None:
        mats = [m for _, m in derivation_pairs()]
    else:
        mats = [
            derivation_matrix(
                CDElement.basis(OCTONION_LEVEL, i),
                CDElement.basis(OCTONION_LEVEL, j),
            )
            for (i, j) in pairs
        ]
    stack = np.array([m.ravel() for m in mats])
    return int(np.linalg.matrix_rank(stack, tol=tol))


def automorphism_exp(a: CDElement, b: CDElement, t: float) -> np.ndarray:
    """exp(t * D_{a,b}) as an 8x8 matrix: an algebra automorphism and isometry."""
    return expm(t * derivation_matrix(a, b))


def mul_matrices(v: CDElement) -> tuple[np.ndarray, np.ndarray]:
    """Left and right multiplication matrices (L_v, R_v) of a fixed element."""
    t = structure_constants(v.level).tensor
    left = np.einsum("ijk,i->jk", t, v.coeffs).T
    right = np.einsum("ijk,j->ik", t, v.coeffs).T
    return left, right


def find_zero_divisor(level: int = 4) -> tuple[CDElement, CDElement]:
    """Search for x, y != 0 with xy = 0 among two-unit combinations.

    Succeeds for level >= 4; levels <= 3 are division algebras and the
    search raising here is itself a usable negative check.
    """
    d = 2**level
    sc = structure_constants(level)
    for (i, j), (k, l) in itertools.product(
        itertools.combinations(range(1, d), 2), repeat=2
    ):
        for s in (1.0, -1.0):
            x = np.zeros(d)
            y = np.zeros(d)
            x[i] = x[j] = 1.0
            y[k] = 1.0
            y[l] = s
            prod = np.einsum("ijk,i,j->k", sc.tensor, x, y)
            if not prod.any():
                return CDElement(x), CDElement(y)
    raise ValueError(f"no zero divisors found at level {level}")


def multiplication_table_csv(level: int = OCTONION_LEVEL) -> str:
    """Basis multiplication table as CSV text (entries like ``-e3``)."""
    sc = structure_constants(level)
    d = sc.dim
    header = "," + ",".join(f"e{j}" for j in range(d))
    lines = [header]
    for i in range(d):
        cells = []
        for j in range(d):
            s = "-" if sc.sign[i, j] < 0 else ""
            cells.append(f"{s}e{sc.index[i, j]}")
        lines.append(f"e{i}," + ",".join(cells))
    return "\n".join(lines) + "\n"

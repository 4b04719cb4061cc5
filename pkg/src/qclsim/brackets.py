"""Pointwise evaluation of classical, quantum, and quasi-Lie brackets.

The quasi-Lie bracket combines the commutator with directional
Poisson-type terms built from an antisymmetric structure matrix,

    qlb(a, b) = (i/hbar) [a, b] - (1/2) a <-grad B grad-> b
                                + (1/2) b <-grad B grad-> a,

with the sign convention fixed so that dW/dt = -qlb(H, W) reduces to the
classical Liouville equation dW/dt = {H, W} for 1x1 fields over a
canonical structure matrix.  The bracket is antisymmetric (hence
energy-conserving) but violates the Jacobi identity for genuinely mixed
quantum-classical fields; :func:`jacobi_residual` measures that failure.
"""

from __future__ import annotations

import numpy as np

from .fields import OperatorField, StructureMatrix, matrix_field


class BracketResult:
    """Evaluated bracket: an n x n complex matrix at a phase-space point."""

    __slots__ = ("value", "point")

    def __init__(self, value, point):
        if not np.all(np.isfinite(value)):
            raise FloatingPointError("non-finite bracket value")
        self.value = value
        self.point = np.asarray(point, dtype=float)

    def __repr__(self):
        return f"BracketResult(point={self.point}, value=\n{self.value})"


def _check_dims(a: OperatorField, b: OperatorField, structure: StructureMatrix, x):
    x = np.asarray(x, dtype=float)
    if a.subsystem_dimension != b.subsystem_dimension:
        raise ValueError(
            "subsystem dimension mismatch: "
            f"{a.subsystem_dimension} vs {b.subsystem_dimension}"
        )
    if x.size != structure.dimension:
        raise ValueError(
            f"point has {x.size} coordinates, structure matrix expects {structure.dimension}"
        )
    return x


def directional_term(a: OperatorField, b: OperatorField, structure: StructureMatrix, x):
    """sum_IJ (grad_I a) B_IJ (grad_J b) with matrix-ordered products."""
    ga = a.grad(x)
    gb = b.grad(x)
    bmat = structure(x)
    # contract gradients through B keeping the operator product order
    return np.einsum("iab,ij,jbc->ac", ga, bmat, gb)


def poisson_bracket(a, b, structure, x) -> BracketResult:
    """Poisson-type bracket of two operator fields over a structure matrix.

    For 1x1 fields and the canonical structure matrix this is the
    classical Poisson bracket; the spin and thermostat variants follow by
    swapping in the corresponding structure matrix.
    """
    x = _check_dims(a, b, structure, x)
    return BracketResult(directional_term(a, b, structure, x), x)


def quasi_lie_bracket(a, b, structure, x, hbar=1.0) -> BracketResult:
    """Quasi-Lie bracket of two operator fields at x."""
    if hbar <= 0:
        raise ValueError("hbar must be positive")
    x = _check_dims(a, b, structure, x)
    va = a.value(x)
    vb = b.value(x)
    commutator = va @ vb - vb @ va
    term_ab = directional_term(a, b, structure, x)
    term_ba = directional_term(b, a, structure, x)
    value = (1j / hbar) * commutator - 0.5 * term_ab + 0.5 * term_ba
    return BracketResult(value, x)


def bracket_field(a, b, structure, hbar=1.0, fd_order=4) -> OperatorField:
    """The map x -> quasi_lie_bracket(a, b, x) wrapped as an operator field.

    Used for nested brackets; the derivative of the wrapped field is taken
    with the 5-point stencil to keep the finite-difference noise of the
    inner bracket from dominating the outer one.
    """

    def evaluate(x):
        return quasi_lie_bracket(a, b, structure, x, hbar).value

    name = f"[{a.name},{b.name}]" if (a.name and b.name) else None
    return matrix_field(evaluate, a.subsystem_dimension, name=name, fd_order=fd_order)


def jacobi_residual(a1, a2, a3, structure, x, hbar=1.0) -> float:
    """Max-element magnitude of the cyclic nested-bracket sum at x.

    Vanishes (to finite-difference tolerance) for triples of purely
    classical scalar fields over a canonical bracket and for triples of
    constant matrices, and is generically nonzero for mixed
    quantum-classical triples.
    """
    x = np.asarray(x, dtype=float)
    f12 = bracket_field(a1, a2, structure, hbar)
    f23 = bracket_field(a2, a3, structure, hbar)
    f31 = bracket_field(a3, a1, structure, hbar)
    total = (
        quasi_lie_bracket(a1, f23, structure, x, hbar).value
        + quasi_lie_bracket(a3, f12, structure, x, hbar).value
        + quasi_lie_bracket(a2, f31, structure, x, hbar).value
    )
    return float(np.max(np.abs(total)))


def antisymmetry_residual(a, b, structure, x, hbar=1.0) -> float:
    """max |qlb(a,b) + qlb(b,a)| element; zero up to rounding."""
    fwd = quasi_lie_bracket(a, b, structure, x, hbar).value
    rev = quasi_lie_bracket(b, a, structure, x, hbar).value
    return float(np.max(np.abs(fwd + rev)))


def self_bracket_residual(h, structure, x, hbar=1.0) -> float:
    """max |qlb(h,h)| element; zero for any field by antisymmetry."""
    return float(np.max(np.abs(quasi_lie_bracket(h, h, structure, x, hbar).value)))

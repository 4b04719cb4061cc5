"""Structure matrices and operator-valued phase-space fields.

A :class:`StructureMatrix` holds the antisymmetric matrix that defines a
classical bracket over some set of coordinates: the constant symplectic
block for canonically conjugate pairs, the spin matrix built from the
Levi-Civita contraction with S, and the extended-phase-space variants used
by the Nose-Hoover and Nose-Hoover-chain thermostats.

An :class:`OperatorField` is a Hermitian-matrix-valued function of the
classical coordinates.  Scalar functions are represented as 1x1 fields so
the same bracket machinery covers classical observables, quantum
operators, and mixed quantum-classical ones.
"""

from __future__ import annotations

import numpy as np

_EPS = np.finfo(float).eps
# Optimal central-difference steps: eps**(1/3) for the 3-point stencil,
# eps**(1/5) for the 5-point one.
FD_STEP_CENTRAL2 = _EPS ** (1.0 / 3.0)
FD_STEP_CENTRAL4 = _EPS ** (1.0 / 5.0)


class StructureMatrix:
    """Antisymmetric matrix B(x) defining a classical bracket.

    Parameters
    ----------
    dimension : int
        Number of classical coordinates the bracket acts on.
    evaluate : callable
        Maps a coordinate vector of length ``dimension`` to a real
        antisymmetric ``(dimension, dimension)`` array.
    label : str
        One of ``canonical``, ``spin``, ``nose``, ``nhc``.
    """

    def __init__(self, dimension, evaluate, label):
        self.dimension = int(dimension)
        self._evaluate = evaluate
        self.label = label

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dimension,):
            raise ValueError(
                f"coordinate vector has shape {x.shape}, expected ({self.dimension},)"
            )
        return self._evaluate(x)

    def antisymmetry_residual(self, x):
        """max |B + B^T| element at x; zero for a valid structure matrix."""
        b = self(x)
        return float(np.max(np.abs(b + b.T)))

    def __repr__(self):
        return f"StructureMatrix({self.label}, dim={self.dimension})"


def canonical_structure(n_bath: int = 1) -> StructureMatrix:
    """Constant symplectic block matrix for coordinates (Q_1..Q_N, P_1..P_N)."""
    n = int(n_bath)
    b = np.zeros((2 * n, 2 * n))
    b[:n, n:] = np.eye(n)
    b[n:, :n] = -np.eye(n)
    return StructureMatrix(2 * n, lambda x: b, "canonical")


def spin_structure() -> StructureMatrix:
    """Spin bracket matrix B_ab = sum_c eps_abc S_c over coordinates (Sx, Sy, Sz)."""

    def evaluate(s):
        sx, sy, sz = s
        return np.array(
            [
                [0.0, sz, -sy],
                [-sz, 0.0, sx],
                [sy, -sx, 0.0],
            ]
        )

    return StructureMatrix(3, evaluate, "spin")


def nose_structure() -> StructureMatrix:
    """Nose-Hoover bracket matrix over the extended point (Q, Q_eta, P, P_eta)."""

    def evaluate(x):
        p = x[2]
        return np.array(
            [
                [0.0, 0.0, 1.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
                [-1.0, 0.0, 0.0, -p],
                [0.0, -1.0, p, 0.0],
            ]
        )

    return StructureMatrix(4, evaluate, "nose")


def nhc_structure() -> StructureMatrix:
    """Two-thermostat chain bracket over (Q, Q_eta1, Q_eta2, P, P_eta1, P_eta2)."""

    def evaluate(x):
        p, peta1 = x[3], x[4]
        b = np.zeros((6, 6))
        b[0, 3] = b[1, 4] = b[2, 5] = 1.0
        b[3, 0] = b[4, 1] = b[5, 2] = -1.0
        b[3, 4] = -p
        b[4, 3] = p
        b[4, 5] = -peta1
        b[5, 4] = peta1
        return b

    return StructureMatrix(6, evaluate, "nhc")


class OperatorField:
    """Hermitian-matrix-valued function of classical coordinates.

    Parameters
    ----------
    subsystem_dimension : int
        Size n of the Hermitian value matrices.
    evaluate : callable
        Maps a coordinate vector to an (n, n) array (real or complex).
    gradient : callable, optional
        Analytic gradient: maps x to an array of shape (len(x), n, n).
        When absent the gradient is computed by central finite
        differences with a per-coordinate step scaled by max(1, |x_I|).
    fd_order : {2, 4}
        Stencil order of the finite-difference gradient.  Nested bracket
        evaluation uses the 5-point (order 4) stencil.
    """

    def __init__(self, subsystem_dimension, evaluate, gradient=None, fd_order=2, name=None):
        self.subsystem_dimension = int(subsystem_dimension)
        self._evaluate = evaluate
        self._gradient = gradient
        if fd_order not in (2, 4):
            raise ValueError("fd_order must be 2 or 4")
        self.fd_order = fd_order
        self.name = name

    def value(self, x):
        x = np.asarray(x, dtype=float)
        n = self.subsystem_dimension
        v = np.asarray(self._evaluate(x), dtype=complex)
        if v.shape != (n, n):
            raise ValueError(f"field value has shape {v.shape}, expected ({n}, {n})")
        return v

    def grad(self, x):
        """Gradient of the field at x, shape (len(x), n, n)."""
        x = np.asarray(x, dtype=float)
        if self._gradient is not None:
            g = np.asarray(self._gradient(x), dtype=complex)
            expected = (x.size, self.subsystem_dimension, self.subsystem_dimension)
            if g.shape != expected:
                raise ValueError(f"gradient has shape {g.shape}, expected {expected}")
            return g
        return self._fd_grad(x)

    def _fd_grad(self, x):
        n = self.subsystem_dimension
        dim = x.size
        g = np.empty((dim, n, n), dtype=complex)
        base = FD_STEP_CENTRAL2 if self.fd_order == 2 else FD_STEP_CENTRAL4
        for i in range(dim):
            h = base * max(1.0, abs(x[i]))
            e = np.zeros(dim)
            e[i] = h
            if self.fd_order == 2:
                g[i] = (self.value(x + e) - self.value(x - e)) / (2.0 * h)
            else:
                g[i] = (
                    -self.value(x + 2 * e)
                    + 8.0 * self.value(x + e)
                    - 8.0 * self.value(x - e)
                    + self.value(x - 2 * e)
                ) / (12.0 * h)
        if not np.all(np.isfinite(g)):
            raise FloatingPointError("non-finite field gradient")
        return g

    def hermiticity_residual(self, x):
        v = self.value(x)
        return float(np.max(np.abs(v - v.conj().T)))

    def __repr__(self):
        label = self.name or "<anonymous>"
        return f"OperatorField({label}, n={self.subsystem_dimension})"


def scalar_field(fn, gradient=None, name=None, fd_order=2) -> OperatorField:
    """Wrap a scalar function f(x) as a 1x1 operator field."""

    def evaluate(x):
        return np.array([[fn(x)]], dtype=complex)

    grad = None
    if gradient is not None:

        def grad(x):
            g = np.asarray(gradient(x), dtype=complex)
            return g.reshape(len(x), 1, 1)

    return OperatorField(1, evaluate, gradient=grad, name=name, fd_order=fd_order)


def constant_field(matrix, dimension_hint=None, name=None) -> OperatorField:
    """Coordinate-independent operator field with an exactly zero gradient."""
    m = np.asarray(matrix, dtype=complex)
    n = m.shape[0]

    def gradient(x):
        return np.zeros((len(x), n, n), dtype=complex)

    return OperatorField(n, lambda x: m, gradient=gradient, name=name)


def matrix_field(fn, n, gradient=None, name=None, fd_order=2) -> OperatorField:
    """Wrap a matrix-valued function of the coordinates as an operator field."""
    return OperatorField(n, fn, gradient=gradient, name=name, fd_order=fd_order)

"""Model catalog: concrete hybrid Hamiltonians and their bath extensions.

Each model exposes the subsystem matrix h(Q) (or h(S) for the spin bath),
the purely classical energy terms, its coordinate layout, and its natural
structure matrix.  The engine is unit-agnostic: parameters are taken in
whatever consistent unit system the caller declares, with hbar always
explicit.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .fields import (
    OperatorField,
    canonical_structure,
    nhc_structure,
    nose_structure,
    spin_structure,
)

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)


@dataclass
class PhasePoint:
    """Classical coordinates of one trajectory.

    Canonical baths use (Q, P); thermostatted baths add one or two
    (Q_eta, P_eta) pairs; the spin bath uses S instead.
    """

    Q: np.ndarray | None = None
    P: np.ndarray | None = None
    Q_eta1: float = 0.0
    P_eta1: float = 0.0
    Q_eta2: float = 0.0
    P_eta2: float = 0.0
    S: np.ndarray | None = None

    def copy(self):
        return replace(
            self,
            Q=None if self.Q is None else np.array(self.Q),
            P=None if self.P is None else np.array(self.P),
            S=None if self.S is None else np.array(self.S),
        )


def _require(state: PhasePoint, *names):
    for name in names:
        if getattr(state, name) is None:
            raise ValueError(f"state is missing coordinate '{name}'")


@dataclass(frozen=True)
class TwoLevelQuartic:
    """Two-level subsystem coupled to a quartic oscillator.

    H_W = P^2/2M + V_q(Q) - hbar*Omega*sigma_x - hbar*gamma0*Q*sigma_z
    with V_q(Q) = (a_q/4) Q^4 - (b_q/2) Q^2.  The quartic potential is the
    classical part; h(Q) holds the subsystem and coupling terms.
    """

    Omega: float = 1.0
    a_q: float = 1.0
    b_q: float = 1.0
    gamma0: float = 1.0
    M: float = 1.0
    hbar: float = 1.0

    n_states = 2
    bath_dim = 1
    kind = "two_level_quartic"

    def __post_init__(self):
        if self.M <= 0:
            raise ValueError("M must be positive")
        if self.a_q <= 0:
            raise ValueError("a_q must be positive (confining potential)")

    def h_matrix(self, Q):
        q = float(np.asarray(Q).reshape(()))
        return -self.hbar * self.Omega * SIGMA_X - self.hbar * self.gamma0 * q * SIGMA_Z

    def h_gradient(self, Q):
        return (-self.hbar * self.gamma0 * SIGMA_Z)[np.newaxis]

    def classical_potential(self, Q):
        q = np.asarray(Q, dtype=float)
        return float(np.sum(0.25 * self.a_q * q**4 - 0.5 * self.b_q * q**2))

    def classical_potential_grad(self, Q):
        q = np.asarray(Q, dtype=float)
        return self.a_q * q**3 - self.b_q * q

    def classical_energy(self, state: PhasePoint):
        _require(state, "Q", "P")
        kinetic = float(np.sum(np.asarray(state.P) ** 2)) / (2.0 * self.M)
        return kinetic + self.classical_potential(state.Q)


@dataclass(frozen=True)
class SpinBathModel:
    """Two-level subsystem coupled to a single classical spin.

    H(S) = -Omega*sigma_x - c1*b*sigma_z - mu*S.sigma - c2*b*S_z + S_z^2/2.
    The last two terms are classical scalars and live in the classical
    energy; h(S) = -Omega*sigma_x - c1*b*sigma_z - mu*S.sigma.
    """

    Omega: float = 1.0
    c1: float = 1.0
    c2: float = 1.0
    mu: float = 1.0
    b_field: float = 1.0
    hbar: float = 1.0

    n_states = 2
    bath_dim = 3
    kind = "spin_bath"

    def h_matrix(self, S):
        s = np.asarray(S, dtype=float)
        return (
            -self.Omega * SIGMA_X
            - self.c1 * self.b_field * SIGMA_Z
            - self.mu * (s[0] * SIGMA_X + s[1] * SIGMA_Y + s[2] * SIGMA_Z)
        )

    def h_gradient(self, S):
        return np.array([-self.mu * SIGMA_X, -self.mu * SIGMA_Y, -self.mu * SIGMA_Z])

    def classical_potential(self, S):
        s = np.asarray(S, dtype=float)
        return float(-self.c2 * self.b_field * s[2] + 0.5 * s[2] ** 2)

    def classical_potential_grad(self, S):
        s = np.asarray(S, dtype=float)
        return np.array([0.0, 0.0, -self.c2 * self.b_field + s[2]])

    def classical_energy(self, state: PhasePoint):
        _require(state, "S")
        return self.classical_potential(state.S)


@dataclass(frozen=True)
class FreeParticle:
    """Bare classical bath coordinate with a trivial one-state subsystem."""

    M: float = 1.0
    hbar: float = 1.0

    n_states = 1
    bath_dim = 1
    kind = "free_particle"

    def h_matrix(self, Q):
        return np.zeros((1, 1), dtype=complex)

    def h_gradient(self, Q):
        return np.zeros((1, 1, 1), dtype=complex)

    def classical_potential(self, Q):
        return 0.0

    def classical_potential_grad(self, Q):
        return np.zeros_like(np.asarray(Q, dtype=float))

    def classical_energy(self, state: PhasePoint):
        _require(state, "P")
        return float(np.sum(np.asarray(state.P) ** 2)) / (2.0 * self.M)


@dataclass(frozen=True)
class HarmonicBath:
    """Classical harmonic oscillator bath, V = (1/2) M omega^2 Q^2."""

    M: float = 1.0
    omega: float = 1.0
    hbar: float = 1.0

    n_states = 1
    bath_dim = 1
    kind = "harmonic_bath"

    def h_matrix(self, Q):
        return np.zeros((1, 1), dtype=complex)

    def h_gradient(self, Q):
        return np.zeros((1, 1, 1), dtype=complex)

    def classical_potential(self, Q):
        q = np.asarray(Q, dtype=float)
        return float(np.sum(0.5 * self.M * self.omega**2 * q**2))

    def classical_potential_grad(self, Q):
        q = np.asarray(Q, dtype=float)
        return self.M * self.omega**2 * q

    def classical_energy(self, state: PhasePoint):
        _require(state, "Q", "P")
        kinetic = float(np.sum(np.asarray(state.P) ** 2)) / (2.0 * self.M)
        return kinetic + self.classical_potential(state.Q)


@dataclass(frozen=True)
class NoseExtension:
    """Base model extended with one Nose-Hoover thermostat pair.

    Adds P_eta^2/2M_eta + N k_B T Q_eta to the classical energy.  N is the
    number of thermostatted momenta, exposed as a user setting.
    """

    base: object
    M_eta: float = 1.0
    T: float = 1.0
    N: int = 1
    k_B: float = 1.0

    kind = "nose"

    def __post_init__(self):
        if self.M_eta <= 0 or self.T <= 0:
            raise ValueError("M_eta and T must be positive")

    @property
    def n_states(self):
        return self.base.n_states

    @property
    def bath_dim(self):
        return self.base.bath_dim

    @property
    def hbar(self):
        return self.base.hbar

    @property
    def M(self):
        return self.base.M

    def h_matrix(self, Q):
        return self.base.h_matrix(Q)

    def h_gradient(self, Q):
        return self.base.h_gradient(Q)

    def classical_potential(self, Q):
        return self.base.classical_potential(Q)

    def classical_potential_grad(self, Q):
        return self.base.classical_potential_grad(Q)

    def classical_energy(self, state: PhasePoint):
        eta = self.P_eta_energy(state) + self.N * self.k_B * self.T * state.Q_eta1
        return self.base.classical_energy(state) + eta

    def P_eta_energy(self, state: PhasePoint):
        return state.P_eta1**2 / (2.0 * self.M_eta)

    def __repr__(self):
        return f"nose({self.base.kind})"


@dataclass(frozen=True)
class NhcExtension:
    """Base model extended with a two-thermostat Nose-Hoover chain.

    Adds the chain kinetic terms plus N k_B T Q_eta1 + k_B T Q_eta2.
    """

    base: object
    M_eta1: float = 1.0
    M_eta2: float = 1.0
    T: float = 1.0
    N: int = 1
    k_B: float = 1.0

    kind = "nhc"

    def __post_init__(self):
        if self.M_eta1 <= 0 or self.M_eta2 <= 0 or self.T <= 0:
            raise ValueError("inertial parameters and T must be positive")

    @property
    def n_states(self):
        return self.base.n_states

    @property
    def bath_dim(self):
        return self.base.bath_dim

    @property
    def hbar(self):
        return self.base.hbar

    @property
    def M(self):
        return self.base.M

    def h_matrix(self, Q):
        return self.base.h_matrix(Q)

    def h_gradient(self, Q):
        return self.base.h_gradient(Q)

    def classical_potential(self, Q):
        return self.base.classical_potential(Q)

    def classical_potential_grad(self, Q):
        return self.base.classical_potential_grad(Q)

    def classical_energy(self, state: PhasePoint):
        eta = (
            self.P_eta_energy(state)
            + self.N * self.k_B * self.T * state.Q_eta1
            + self.k_B * self.T * state.Q_eta2
        )
        return self.base.classical_energy(state) + eta

    def P_eta_energy(self, state: PhasePoint):
        return state.P_eta1**2 / (2.0 * self.M_eta1) + state.P_eta2**2 / (
            2.0 * self.M_eta2
        )

    def __repr__(self):
        return f"nhc({self.base.kind})"


def h_matrix(model, coords):
    """Subsystem matrix h at a bath configuration; Hermitian by construction."""
    return model.h_matrix(coords)


def classical_energy(model, state: PhasePoint) -> float:
    """Kinetic plus classical potential terms, thermostat terms included."""
    return model.classical_energy(state)


def surface_energy(model, frame, pair, state: PhasePoint) -> float:
    """classical_energy + (E_alpha + E_alpha')/2 on the mean surface of `pair`."""
    alpha, alphap = pair
    n = len(frame.energies)
    if not (0 <= alpha < n and 0 <= alphap < n):
        raise IndexError(f"pair {pair} out of range for {n} states")
    return classical_energy(model, state) + 0.5 * (
        frame.energies[alpha] + frame.energies[alphap]
    )


def natural_structure(model):
    """The structure matrix matching a model's coordinate layout."""
    if model.kind == "spin_bath":
        return spin_structure()
    if model.kind == "nose":
        return nose_structure()
    if model.kind == "nhc":
        return nhc_structure()
    return canonical_structure(model.bath_dim)


def hamiltonian_field(model) -> OperatorField:
    """The full hybrid Hamiltonian as an operator field over the model's coordinates.

    Coordinate layouts: (Q.., P..) canonical; (Sx, Sy, Sz) spin;
    (Q, Q_eta, P, P_eta) Nose; (Q, Q_eta1, Q_eta2, P, P_eta1, P_eta2) chain.
    """
    n = model.n_states
    eye = np.eye(n, dtype=complex)
    kind = model.kind

    if kind == "spin_bath":

        def evaluate(s):
            return model.h_matrix(s) + model.classical_potential(s) * eye

        def gradient(s):
            g = model.h_gradient(s).astype(complex).copy()
            g += model.classical_potential_grad(s)[:, None, None] * eye
            return g

        return OperatorField(n, evaluate, gradient=gradient, name="H_spin")

    if kind in ("nose", "nhc"):
        nb = model.bath_dim

        def evaluate(x):
            q, p = x[:nb], x[nb + (2 if kind == "nhc" else 1) :][:nb]
            state = PhasePoint(Q=q, P=p)
            if kind == "nose":
                state.Q_eta1, state.P_eta1 = x[nb], x[2 * nb + 1]
            else:
                state.Q_eta1, state.Q_eta2 = x[nb], x[nb + 1]
                state.P_eta1, state.P_eta2 = x[2 * nb + 2], x[2 * nb + 3]
            return model.h_matrix(q) + model.classical_energy(state) * eye

        return OperatorField(n, evaluate, name=f"H_{kind}")

    def evaluate(x):
        nb = model.bath_dim
        q, p = x[:nb], x[nb:]
        h = model.h_matrix(q)
        kinetic = float(np.sum(p**2)) / (2.0 * model.M)
        return h + (kinetic + model.classical_potential(q)) * eye

    def gradient(x):
        nb = model.bath_dim
        q, p = x[:nb], x[nb:]
        g = np.zeros((2 * nb, n, n), dtype=complex)
        g[:nb] = model.h_gradient(q)
        g[:nb] += model.classical_potential_grad(q).reshape(nb)[:, None, None] * eye
        g[nb:] = (p / model.M)[:, None, None] * eye
        return g

    return OperatorField(n, evaluate, gradient=gradient, name=f"H_{kind}")

"""Pure-Python trajectory kernels, vectorized over a batch of trajectories.

These are the reference implementations of the hot inner loops; the
compiled extension in ``_cykernels.pyx`` mirrors them operation for
operation.  Both advance sequential-short-time-propagation trajectories
of the two-level-quartic family (with Hamiltonian, Langevin, Nose-Hoover,
or chain-thermostat classical substeps) and adiabatic spin-bath
trajectories, accumulating estimator sums on the fly.

Classical substep layout per time step (palindromic):

    [thermostat dt/2]  kick dt/2  drift dt/2  [OU dt]  drift dt/2
    kick dt/2  [thermostat dt/2]

followed by the trapezoid phase update and, optionally, one stochastic
transition attempt.  RNG inputs are pregenerated per trajectory so the
draw sequence is identical in both backends.
"""

from __future__ import annotations

import numpy as np

BATH_HAMILTONIAN = 0
BATH_LANGEVIN = 1
BATH_NOSE = 2
BATH_NHC = 3

FRUSTRATED_REJECT = 0
FRUSTRATED_REVERSE = 1

_R_FLOOR = 1e-300


def _adiabatic_scale(Omega, gamma0, Q):
    """sqrt(Omega^2 + gamma0^2 Q^2), floored to avoid 0/0 in decoupled limits."""
    return np.maximum(np.sqrt(Omega * Omega + gamma0 * gamma0 * Q * Q), _R_FLOOR)


def _mean_force(Q, sa, sap, a_q, b_q, hbar, Omega, gamma0, quantum):
    f = -(a_q * Q**3 - b_q * Q)
    if quantum:
        r = _adiabatic_scale(Omega, gamma0, Q)
        c_mean = 0.5 * (sa + sap)
        f = f - c_mean * hbar * gamma0 * gamma0 * Q / r
    return f


def _pair_omega(Q, sa, sap, Omega, gamma0, quantum):
    if not quantum:
        return np.zeros_like(Q)
    return (sa - sap) * _adiabatic_scale(Omega, gamma0, Q)


def _adiabatic_vectors(Q, Omega, gamma0, hbar):
    """Mixing-angle eigenvector components (ground = (-sin, cos), excited = (cos, sin))."""
    r = _adiabatic_scale(Omega, gamma0, Q)
    cos2t = -gamma0 * Q / r
    sin2t = -Omega / r * np.ones_like(Q)
    theta = 0.5 * np.arctan2(sin2t, cos2t)
    return np.sin(theta), np.cos(theta)


def _obs_element(sin_t, cos_t, alpha, alphap, x00, x01, x11):
    """chi_{alpha' alpha} = v_{alpha'}^dag chi v_alpha for the 2-level frame."""
    # v_0 = (-sin, cos), v_1 = (cos, sin); all components real
    u1 = np.where(alphap == 0, -sin_t, cos_t)
    u2 = np.where(alphap == 0, cos_t, sin_t)
    w1 = np.where(alpha == 0, -sin_t, cos_t)
    w2 = np.where(alpha == 0, cos_t, sin_t)
    return u1 * (x00 * w1 + x01 * w2) + u2 * (np.conj(x01) * w1 + x11 * w2)


def _quartic_energy(
    Q, P, Qe1, Pe1, Qe2, Pe2, sa, sap, M, a_q, b_q, hbar, Omega, gamma0,
    quantum, bath_kind, kT, M_eta1, M_eta2, n_therm,
):
    e = P * P / (2.0 * M) + 0.25 * a_q * Q**4 - 0.5 * b_q * Q * Q
    if quantum:
        e = e + 0.5 * (sa + sap) * hbar * _adiabatic_scale(Omega, gamma0, Q)
    if bath_kind == BATH_NOSE:
        e = e + Pe1 * Pe1 / (2.0 * M_eta1) + n_therm * kT * Qe1
    elif bath_kind == BATH_NHC:
        e = (
            e
            + Pe1 * Pe1 / (2.0 * M_eta1)
            + Pe2 * Pe2 / (2.0 * M_eta2)
            + n_therm * kT * Qe1
            + kT * Qe2
        )
    return e


def _nose_half(delta, P, Qe1, Pe1, M, kT, M_eta1, n_therm):
    Pe1 += 0.5 * delta * (P * P / M - n_therm * kT)
    P *= np.exp(-delta * Pe1 / M_eta1)
    Qe1 += delta * Pe1 / M_eta1
    Pe1 += 0.5 * delta * (P * P / M - n_therm * kT)
    return P, Qe1, Pe1


def _nhc_half(delta, P, Qe1, Pe1, Qe2, Pe2, M, kT, M_eta1, M_eta2, n_therm):
    Pe2 += 0.5 * delta * (Pe1 * Pe1 / M_eta1 - kT)
    Pe1 *= np.exp(-0.5 * delta * Pe2 / M_eta2)
    Pe1 += 0.5 * delta * (P * P / M - n_therm * kT)
    P *= np.exp(-delta * Pe1 / M_eta1)
    Qe1 += delta * Pe1 / M_eta1
    Qe2 += delta * Pe2 / M_eta2
    Pe1 += 0.5 * delta * (P * P / M - n_therm * kT)
    Pe1 *= np.exp(-0.5 * delta * Pe2 / M_eta2)
    Pe2 += 0.5 * delta * (Pe1 * Pe1 / M_eta1 - kT)
    return P, Qe1, Pe1, Qe2, Pe2


def run_quartic_chunk(
    dt,
    n_steps,
    record_every,
    M,
    a_q,
    b_q,
    hbar,
    Omega,
    gamma0,
    n_states,
    bath_kind,
    zeta,
    kT,
    M_eta1,
    M_eta2,
    n_therm,
    transitions,
    frustrated_policy,
    Q,
    P,
    Qe1,
    Pe1,
    Qe2,
    Pe2,
    alpha,
    alphap,
    phase,
    weight,
    w0,
    uniforms,
    normals,
    obs,
    record_state=False,
):
    """Advance one chunk of canonical-bath trajectories for n_steps.

    Input arrays are left untouched; the advanced state is returned under
    ``out["final"]`` together with recorded estimator aggregates (summed
    over the chunk) and counters.
    """
    Q, P = Q.astype(float).copy(), P.astype(float).copy()
    Qe1, Pe1 = Qe1.astype(float).copy(), Pe1.astype(float).copy()
    Qe2, Pe2 = Qe2.astype(float).copy(), Pe2.astype(float).copy()
    alpha, alphap = alpha.copy(), alphap.copy()
    phase = phase.astype(complex).copy()
    weight = weight.astype(float).copy()
    n = Q.shape[0]
    n_obs = obs.shape[0]
    if n_steps % record_every != 0:
        raise ValueError("n_steps must be a multiple of record_every")
    n_rec = n_steps // record_every + 1
    quantum = n_states == 2

    sum_obs = np.zeros((n_rec, n_obs), dtype=complex)
    absw = np.zeros(n_rec)
    edrift = np.zeros(n_rec)
    kappa_rec = np.zeros((n_rec, n)) if record_state else None
    state_rec = (
        {key: np.zeros((n_rec, n)) for key in ("Q", "P", "Qe1", "Pe1", "Qe2", "Pe2")}
        if record_state
        else None
    )
    n_jumps = 0
    n_frustrated = 0
    n_large_coupling = 0

    sa = (2 * alpha - 1).astype(float)
    sap = (2 * alphap - 1).astype(float)
    kappa_int = np.zeros(n)

    e0 = _quartic_energy(
        Q, P, Qe1, Pe1, Qe2, Pe2, sa, sap, M, a_q, b_q, hbar, Omega, gamma0,
        quantum, bath_kind, kT, M_eta1, M_eta2, n_therm,
    )
    e_denom = np.where(np.abs(e0) > 1e-12, np.abs(e0), 1.0)

    if bath_kind == BATH_LANGEVIN:
        ou_decay = np.exp(-zeta * dt / M)
        ou_sigma = np.sqrt(M * kT * (1.0 - ou_decay * ou_decay))

    def record(idx):
        if quantum:
            sin_t, cos_t = _adiabatic_vectors(Q, Omega, gamma0, hbar)
        v_base = w0 * weight * phase
        for k in range(n_obs):
            if quantum:
                el = _obs_element(sin_t, cos_t, alpha, alphap, obs[k, 0, 0], obs[k, 0, 1], obs[k, 1, 1])
            else:
                el = np.full(n, obs[k, 0, 0])
            sum_obs[idx, k] = np.sum(v_base * el)
        absw[idx] = np.sum(np.abs(w0 * weight))
        e_now = _quartic_energy(
            Q, P, Qe1, Pe1, Qe2, Pe2, sa, sap, M, a_q, b_q, hbar, Omega, gamma0,
            quantum, bath_kind, kT, M_eta1, M_eta2, n_therm,
        )
        edrift[idx] = np.sum(np.abs(e_now - e0) / e_denom)
        if record_state:
            for key, arr in (("Q", Q), ("P", P), ("Qe1", Qe1), ("Pe1", Pe1), ("Qe2", Qe2), ("Pe2", Pe2)):
                state_rec[key][idx] = arr
            kappa_rec[idx] = kappa_int

    record(0)

    for step in range(n_steps):
        w_start = _pair_omega(Q, sa, sap, Omega, gamma0, quantum)
        if bath_kind == BATH_NOSE:
            kappa_start = -n_therm * Pe1 / M_eta1
        elif bath_kind == BATH_NHC:
            kappa_start = -n_therm * Pe1 / M_eta1 - Pe2 / M_eta2

        if bath_kind == BATH_NOSE:
            P, Qe1, Pe1 = _nose_half(0.5 * dt, P, Qe1, Pe1, M, kT, M_eta1, n_therm)
        elif bath_kind == BATH_NHC:
            P, Qe1, Pe1, Qe2, Pe2 = _nhc_half(
                0.5 * dt, P, Qe1, Pe1, Qe2, Pe2, M, kT, M_eta1, M_eta2, n_therm
            )

        P = P + 0.5 * dt * _mean_force(Q, sa, sap, a_q, b_q, hbar, Omega, gamma0, quantum)
        Q = Q + 0.5 * dt * P / M
        if bath_kind == BATH_LANGEVIN:
            P = ou_decay * P + ou_sigma * normals[:, step]
        Q = Q + 0.5 * dt * P / M
        P = P + 0.5 * dt * _mean_force(Q, sa, sap, a_q, b_q, hbar, Omega, gamma0, quantum)

        if bath_kind == BATH_NOSE:
            P, Qe1, Pe1 = _nose_half(0.5 * dt, P, Qe1, Pe1, M, kT, M_eta1, n_therm)
            kappa_int += 0.5 * dt * (kappa_start + (-n_therm * Pe1 / M_eta1))
        elif bath_kind == BATH_NHC:
            P, Qe1, Pe1, Qe2, Pe2 = _nhc_half(
                0.5 * dt, P, Qe1, Pe1, Qe2, Pe2, M, kT, M_eta1, M_eta2, n_therm
            )
            kappa_int += 0.5 * dt * (
                kappa_start + (-n_therm * Pe1 / M_eta1 - Pe2 / M_eta2)
            )

        w_end = _pair_omega(Q, sa, sap, Omega, gamma0, quantum)
        phase = phase * np.exp(-1j * dt * 0.5 * (w_start + w_end))

        if transitions and quantum:
            r = _adiabatic_scale(Omega, gamma0, Q)
            d01 = -gamma0 * Omega / (2.0 * r * r)
            pick_first = uniforms[:, step, 0] < 0.5
            # coupling of the flipped slot; d_{1,0} = -d_{0,1} and real
            d_c = np.where(
                pick_first, np.where(alpha == 0, d01, -d01), np.where(alphap == 0, d01, -d01)
            )
            raw = dt * (P / M) * d_c
            abs_raw = np.abs(raw)
            n_large_coupling += int(np.sum(abs_raw >= 1.0))
            pj = abs_raw / (1.0 + abs_raw)
            jump = uniforms[:, step, 1] < pj
            if np.any(jump):
                s_old = np.where(pick_first, sa, sap)
                delta_e_half = s_old * hbar * r
                disc = P * P + 2.0 * M * delta_e_half
                ok = jump & (disc >= 0.0)
                frustrated = jump & (disc < 0.0)
                n_jumps += int(np.sum(ok))
                n_frustrated += int(np.sum(frustrated))
                sign_p = np.where(P >= 0.0, 1.0, -1.0)
                P = np.where(ok, sign_p * np.sqrt(np.where(ok, disc, 0.0)), P)
                if frustrated_policy == FRUSTRATED_REVERSE:
                    P = np.where(frustrated, -P, P)
                flip_a = ok & pick_first
                flip_ap = ok & ~pick_first
                alpha = np.where(flip_a, 1 - alpha, alpha)
                alphap = np.where(flip_ap, 1 - alphap, alphap)
                sa = (2 * alpha - 1).astype(float)
                sap = (2 * alphap - 1).astype(float)
                # jump: raw/P_J times the candidate count (2); the sampled
                # branch weights reproduce (1 + tau T) in expectation
                sign_raw = np.where(raw >= 0.0, 1.0, -1.0)
                weight = np.where(ok, weight * 2.0 * sign_raw * (1.0 + abs_raw), weight)
                # frustrated jumps convert to no-jump with the no-jump weight
                weight = np.where(frustrated, weight * (1.0 + abs_raw), weight)
                weight = np.where(~jump, weight * (1.0 + abs_raw), weight)
            else:
                weight = weight * (1.0 + abs_raw)

        if (step + 1) % record_every == 0:
            record((step + 1) // record_every)

    out = {
        "sum_obs": sum_obs,
        "absw": absw,
        "edrift": edrift,
        "counters": {
            "n_jumps": n_jumps,
            "n_frustrated": n_frustrated,
            "n_large_coupling": n_large_coupling,
        },
        "final": {
            "Q": Q, "P": P, "Qe1": Qe1, "Pe1": Pe1, "Qe2": Qe2, "Pe2": Pe2,
            "alpha": alpha, "alphap": alphap, "phase": phase, "weight": weight,
        },
    }
    if record_state:
        out["state_rec"] = state_rec
        out["kappa_int"] = kappa_rec
    return out


def _spin_field(S, Omega, c1, mu, b):
    mx = Omega + mu * S[:, 0]
    my = mu * S[:, 1]
    mz = c1 * b + mu * S[:, 2]
    rho = np.maximum(np.sqrt(mx * mx + my * my + mz * mz), _R_FLOOR)
    return mx, my, mz, rho


def _spin_mean_gradient(S, Omega, c1, c2, mu, b, c_mean):
    """Gradient of H_cl + c_mean * rho with respect to the spin components."""
    mx, my, mz, rho = _spin_field(S, Omega, c1, mu, b)
    gx = c_mean * mu * mx / rho
    gy = c_mean * mu * my / rho
    gz = -c2 * b + S[:, 2] + c_mean * mu * mz / rho
    return gx, gy, gz


def _rotate(S, axis, angle):
    """In-place rotation of each spin about one coordinate axis."""
    c = np.cos(angle)
    s = np.sin(angle)
    i, j = {0: (1, 2), 1: (2, 0), 2: (0, 1)}[axis]
    si = S[:, i].copy()
    sj = S[:, j]
    S[:, i] = c * si - s * sj
    S[:, j] = s * si + c * sj


def spin_step_batch(S, grad_fn, dt):
    """Palindromic component-wise rotation step; preserves |S| exactly.

    The rotation angle about each axis comes from the corresponding
    gradient component re-evaluated at the current spin before each
    sub-rotation.
    """
    _rotate(S, 0, grad_fn(S)[0] * (0.5 * dt))
    _rotate(S, 1, grad_fn(S)[1] * (0.5 * dt))
    _rotate(S, 2, grad_fn(S)[2] * dt)
    _rotate(S, 1, grad_fn(S)[1] * (0.5 * dt))
    _rotate(S, 0, grad_fn(S)[0] * (0.5 * dt))


def _spin_geo_rate(S, Omega, c1, c2, mu, b, c_mean, alpha, alphap):
    """(phi_dot_alpha - phi_dot_alpha') along the mean-surface flow at S.

    The geometric connection refers to the gauge chart in which the first
    spinor component is real positive; for the aligned/anti-aligned
    two-level frame it is phi_a = w_a(theta) grad(phi_azimuthal) with
    w_0 = sin^2(theta/2) and w_1 = cos^2(theta/2).
    """
    mx, my, mz, rho = _spin_field(S, Omega, c1, mu, b)
    denom = mx * mx + my * my
    safe = denom > 1e-24 * rho * rho
    inv = np.where(safe, 1.0 / np.where(safe, denom, 1.0), 0.0)
    gphi_x = -mu * my * inv
    gphi_y = mu * mx * inv
    w0 = 0.5 * (1.0 - mz / rho)
    w1 = 0.5 * (1.0 + mz / rho)
    wa = np.where(alpha == 0, w0, w1)
    wap = np.where(alphap == 0, w0, w1)
    # flow velocity S_dot = B(S) grad H_mean
    gx, gy, gz = _spin_mean_gradient(S, Omega, c1, c2, mu, b, c_mean)
    sx, sy, sz = S[:, 0], S[:, 1], S[:, 2]
    sdot_x = sz * gy - sy * gz
    sdot_y = -sz * gx + sx * gz
    # sdot_z drops out: the connection has no z component in this chart
    return (wa - wap) * (sdot_x * gphi_x + sdot_y * gphi_y)


def _spin_obs_element(S, Omega, c1, mu, b, alpha, alphap, x00, x01, x11):
    """chi_{alpha' alpha}(S) in the adiabatic frame of the spin model."""
    mx, my, mz, rho = _spin_field(S, Omega, c1, mu, b)
    denom = np.sqrt(np.maximum(mx * mx + my * my, _R_FLOOR))
    small = denom < 1e-150
    eiphi = np.where(small, 1.0 + 0.0j, (mx + 1j * my) / np.where(small, 1.0, denom))
    cos_half = np.sqrt(np.maximum(0.5 * (1.0 + mz / rho), 0.0))
    sin_half = np.sqrt(np.maximum(0.5 * (1.0 - mz / rho), 0.0))
    # |0> = (cos, e^{i phi} sin), |1> = (sin, -e^{i phi} cos)
    a1 = np.where(alpha == 0, cos_half + 0.0j, sin_half + 0.0j)
    a2 = np.where(alpha == 0, eiphi * sin_half, -eiphi * cos_half)
    b1 = np.where(alphap == 0, cos_half + 0.0j, sin_half + 0.0j)
    b2 = np.where(alphap == 0, eiphi * sin_half, -eiphi * cos_half)
    return (
        np.conj(b1) * (x00 * a1 + x01 * a2)
        + np.conj(b2) * (np.conj(x01) * a1 + x11 * a2)
    )


def run_spin_chunk(
    dt,
    n_steps,
    record_every,
    Omega,
    c1,
    c2,
    mu,
    b,
    hbar,
    S,
    alpha,
    alphap,
    phase_dyn,
    phase_geo,
    weight,
    w0,
    obs,
    record_state=False,
):
    """Advance one chunk of adiabatic spin-bath trajectories for n_steps.

    S has shape (n, 3).  Inputs are left untouched; the advanced state is
    returned under ``out["final"]``.
    """
    S = np.array(S, dtype=float)
    alpha, alphap = alpha.copy(), alphap.copy()
    phase_dyn = phase_dyn.astype(complex).copy()
    phase_geo = phase_geo.astype(complex).copy()
    weight = weight.astype(float).copy()
    n = S.shape[0]
    n_obs = obs.shape[0]
    if n_steps % record_every != 0:
        raise ValueError("n_steps must be a multiple of record_every")
    n_rec = n_steps // record_every + 1

    sum_obs = np.zeros((n_rec, n_obs), dtype=complex)
    absw = np.zeros(n_rec)
    edrift = np.zeros(n_rec)
    casimir = np.zeros(n_rec)
    state_rec = {"S": np.zeros((n_rec, n, 3))} if record_state else None
    max_casimir_err = 0.0

    sa = (2 * alpha - 1).astype(float)
    sap = (2 * alphap - 1).astype(float)
    c_mean = 0.5 * (sa + sap)

    def energy():
        mx, my, mz, rho = _spin_field(S, Omega, c1, mu, b)
        h_cl = -c2 * b * S[:, 2] + 0.5 * S[:, 2] ** 2
        return h_cl + c_mean * rho

    e0 = energy()
    e_denom = np.where(np.abs(e0) > 1e-12, np.abs(e0), 1.0)

    def record(idx):
        v_base = w0 * weight * phase_dyn * phase_geo
        for k in range(n_obs):
            el = _spin_obs_element(
                S, Omega, c1, mu, b, alpha, alphap, obs[k, 0, 0], obs[k, 0, 1], obs[k, 1, 1]
            )
            sum_obs[idx, k] = np.sum(v_base * el)
        absw[idx] = np.sum(np.abs(w0 * weight))
        edrift[idx] = np.sum(np.abs(energy() - e0) / e_denom)
        casimir[idx] = np.sum(np.abs(np.einsum("ij,ij->i", S, S) - 1.0))
        if record_state:
            state_rec["S"][idx] = S

    record(0)

    for step in range(n_steps):
        mx, my, mz, rho = _spin_field(S, Omega, c1, mu, b)
        w_start = (sa - sap) * rho / hbar
        g_start = _spin_geo_rate(S, Omega, c1, c2, mu, b, c_mean, alpha, alphap)

        spin_step_batch(
            S, lambda s: _spin_mean_gradient(s, Omega, c1, c2, mu, b, c_mean), dt
        )

        mx, my, mz, rho = _spin_field(S, Omega, c1, mu, b)
        w_end = (sa - sap) * rho / hbar
        g_end = _spin_geo_rate(S, Omega, c1, c2, mu, b, c_mean, alpha, alphap)

        phase_dyn = phase_dyn * np.exp(-1j * dt * 0.5 * (w_start + w_end))
        phase_geo = phase_geo * np.exp(-1j * dt * 0.5 * (g_start + g_end))

        err = np.max(np.abs(np.einsum("ij,ij->i", S, S) - 1.0))
        if err > max_casimir_err:
            max_casimir_err = float(err)

        if (step + 1) % record_every == 0:
            record((step + 1) // record_every)

    out = {
        "sum_obs": sum_obs,
        "absw": absw,
        "edrift": edrift,
        "casimir": casimir,
        "max_casimir_err": max_casimir_err,
        "final": {
            "S": S, "alpha": alpha, "alphap": alphap,
            "phase_dyn": phase_dyn, "phase_geo": phase_geo, "weight": weight,
        },
    }
    if record_state:
        out["state_rec"] = state_rec
    return out

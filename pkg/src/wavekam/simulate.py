"""Truncated spectral simulation of u_tt - u_xx + m u = 4 u^3 on the circle.

In Fourier variables the system is xi_s' = i dH/deta_s, eta_s' = -i dH/dxi_s
with H = sum lambda_s xi_s eta_s + int u^4 dx.  The field u depends on the
state only through w_s = (xi_s + eta_{-s}) / sqrt(2 lambda_s), which the
nonlinear kick leaves invariant, so both split flows are exact:

    rotation:  xi -> e^{+i lambda dt} xi,  eta -> e^{-i lambda dt} eta
    kick:      xi_s += i dt 4 sqrt(pi/lambda_s) c_s(u^3),
               eta_s -= i dt 4 sqrt(pi/lambda_s) c_{-s}(u^3)

where c_s(u^3) are Fourier coefficients of u^3 computed by collocation with
2x zero padding (exact de-aliasing for the cubic term).  Strang composition
of the two exact flows gives an order-2 symplectic, time-reversible scheme.
xi and eta are evolved as independent complex arrays; reality (eta = conj xi)
is a measured diagnostic, not a baked-in constraint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .spectrum import AdmissibleSet, FrequencySystem, check_mass

INTEGRATORS = ("strang_split", "implicit_midpoint")


class BlowUpError(RuntimeError):
    def __init__(self, t: float, norm: float, initial_norm: float,
                 last_state: Optional[tuple[np.ndarray, np.ndarray]] = None):
        self.t = t
        self.norm = norm
        self.initial_norm = initial_norm
        self.last_state = last_state
        super().__init__(
            f"state norm {norm:.3e} exceeded 10x initial {initial_norm:.3e} at t={t:.3f}"
        )


@dataclass
class SimConfig:
    cutoff: int
    mass: float
    A: AdmissibleSet
    actions: dict[int, float]        # I_a > 0 per tangential mode
    theta0: dict[int, float] = field(default_factory=dict)
    dt: float = 1e-3
    T: float = 100.0
    nonlinearity_on: bool = True
    integrator: str = "strang_split"
    store_every: int = 100
    perturb_scale: float = 0.0        # optional normal-mode noise amplitude
    seed: int = 0

    def __post_init__(self):
        check_mass(self.mass)
        if self.integrator not in INTEGRATORS:
            raise ValueError(f"integrator must be one of {INTEGRATORS}")
        if self.cutoff < self.A.n_bound:
            raise ValueError("cutoff must cover the tangential set")
        if set(self.actions) != set(self.A.modes):
            raise ValueError("actions must be given exactly on the tangential modes")
        if any(v <= 0 for v in self.actions.values()):
            raise ValueError("actions must be positive")
        lam_max = math.sqrt(self.cutoff ** 2 + self.mass)
        if self.dt * lam_max > 0.5:
            raise ValueError(
                f"resolution gate: dt * max frequency = {self.dt * lam_max:.3f} > 0.5")
        if self.dt <= 0 or self.T <= 0:
            raise ValueError("dt and T must be positive")
        if self.store_every < 1:
            raise ValueError("store_every must be >= 1")

    @property
    def n_steps(self) -> int:
        return int(round(self.T / self.dt))


@dataclass
class TorusTrajectory:
    config: SimConfig
    times: np.ndarray
    xi: np.ndarray          # (samples, 2 cutoff + 1)
    eta: np.ndarray
    energy: np.ndarray
    actions: np.ndarray     # (samples, n) tangential actions |xi_a|^2
    phases: np.ndarray      # (samples, n) arg xi_a, unwrapped later
    extracted_frequencies: Optional[dict[int, float]] = None
    sup_distance: Optional[float] = None

    @property
    def reality_defect(self) -> float:
        return float(np.max(np.abs(self.eta - self.xi.conj())))

    def momentum(self) -> np.ndarray:
        s = np.arange(-self.config.cutoff, self.config.cutoff + 1)
        return (s * np.abs(self.xi) ** 2).sum(axis=1)


def initial_state(cfg: SimConfig, rng: Optional[np.random.Generator] = None
                  ) -> tuple[np.ndarray, np.ndarray]:
    """Point on the torus: xi_a = sqrt(I_a) e^{i theta_a}, zero normal modes,
    eta = conj(xi); optionally seeded normal-mode noise."""
    size = 2 * cfg.cutoff + 1
    xi = np.zeros(size, dtype=complex)
    for a in cfg.A.modes:
        theta = cfg.theta0.get(a, 0.0)
        xi[a + cfg.cutoff] = math.sqrt(cfg.actions[a]) * np.exp(1j * theta)
    if cfg.perturb_scale > 0:
        rng = rng or np.random.default_rng(cfg.seed)
        noise = cfg.perturb_scale * (rng.standard_normal(size)
                                     + 1j * rng.standard_normal(size))
        for a in cfg.A.modes:
            noise[a + cfg.cutoff] = 0.0
        xi = xi + noise
    return xi, xi.conj().copy()


class _Spectral:
    """Precomputed grids and transforms for one configuration."""

    def __init__(self, cfg: SimConfig):
        self.cfg = cfg
        S = cfg.cutoff
        self.S = S
        self.modes = np.arange(-S, S + 1)
        self.lam = np.sqrt(self.modes.astype(float) ** 2 + cfg.mass)
        self.M = 4 * S + 4          # >= 4S+1: cubic de-aliasing
        self.kick_scale = 4.0 * np.sqrt(np.pi / self.lam)
        self.w_scale = 1.0 / np.sqrt(2.0 * self.lam)

    def field_coeffs(self, xi: np.ndarray, eta: np.ndarray) -> np.ndarray:
        """Padded spectrum W with W[s] = (xi_s + eta_{-s}) / sqrt(2 lambda_s)."""
        A = (xi + eta[::-1]) * self.w_scale
        W = np.zeros(self.M, dtype=complex)
        W[: self.S + 1] = A[self.S:]
        W[self.M - self.S:] = A[: self.S]
        return W

    def grid_field(self, xi: np.ndarray, eta: np.ndarray) -> np.ndarray:
        return np.fft.ifft(self.field_coeffs(xi, eta)) * (self.M / math.sqrt(2 * math.pi))

    def cubic_coeffs(self, xi: np.ndarray, eta: np.ndarray) -> np.ndarray:
        """c_s(u^3) for |s| <= S, index s + S."""
        u = self.grid_field(xi, eta)
        c = np.fft.fft(u * u * u) / self.M
        return np.concatenate([c[self.M - self.S:], c[: self.S + 1]])

    def kick(self, xi: np.ndarray, eta: np.ndarray, h: float) -> None:
        c = self.cubic_coeffs(xi, eta)
        xi += 1j * h * self.kick_scale * c
        eta -= 1j * h * self.kick_scale * c[::-1]

    def energy(self, xi: np.ndarray, eta: np.ndarray, nonlinear: bool) -> float:
        quad = np.sum(self.lam * xi * eta)
        total = quad
        if nonlinear:
            u = self.grid_field(xi, eta)
            total = total + 2.0 * math.pi * np.mean(u ** 4)
        return float(total.real)


def _rotation(spec: _Spectral, dt: float) -> tuple[np.ndarray, np.ndarray]:
    phase = np.exp(1j * spec.lam * dt)
    return phase, phase.conj()


def integrate(cfg: SimConfig, xi0: Optional[np.ndarray] = None,
              eta0: Optional[np.ndarray] = None) -> TorusTrajectory:
    """Run the configured integrator and record samples every store_every steps.

    Aborts with BlowUpError (carrying the last good snapshot) if the state
    norm grows past 10x its initial value.
    """
    spec = _Spectral(cfg)
    if xi0 is None or eta0 is None:
        xi, eta = initial_state(cfg)
    else:
        xi, eta = xi0.astype(complex).copy(), eta0.astype(complex).copy()
    n_steps = cfg.n_steps
    n_samples = n_steps // cfg.store_every + 1
    tang_idx = np.array([a + cfg.cutoff for a in cfg.A.modes])
    times = np.empty(n_samples)
    xis = np.empty((n_samples, 2 * cfg.cutoff + 1), dtype=complex)
    etas = np.empty_like(xis)
    energies = np.empty(n_samples)
    initial_norm = float(np.linalg.norm(xi))

    def store(i: int, t: float) -> None:
        times[i] = t
        xis[i] = xi
        etas[i] = eta
        energies[i] = spec.energy(xi, eta, cfg.nonlinearity_on)

    store(0, 0.0)
    dt = cfg.dt
    rot, rot_c = _rotation(spec, dt)
    sample = 1
    step = 0
    nonlinear = cfg.nonlinearity_on
    while step < n_steps:
        block = min(cfg.store_every, n_steps - step)
        if cfg.integrator == "strang_split":
            if nonlinear:
                spec.kick(xi, eta, dt / 2)
                for _ in range(block - 1):
                    xi *= rot
                    eta *= rot_c
                    spec.kick(xi, eta, dt)
                xi *= rot
                eta *= rot_c
                spec.kick(xi, eta, dt / 2)
            else:
                phase = np.exp(1j * spec.lam * dt * block)
                xi *= phase
                eta *= phase.conj()
        else:
            for _ in range(block):
                xi, eta = _implicit_midpoint_step(spec, xi, eta, dt, nonlinear)
        step += block
        t = step * dt
        norm = float(np.linalg.norm(xi))
        if norm > 10.0 * max(initial_norm, 1e-300):
            raise BlowUpError(t, norm, initial_norm,
                              (xis[sample - 1].copy(), etas[sample - 1].copy()))
        if block == cfg.store_every:
            store(sample, t)
            sample += 1
    times = times[:sample]
    xis = xis[:sample]
    etas = etas[:sample]
    energies = energies[:sample]
    actions = np.abs(xis[:, tang_idx]) ** 2
    phases = np.angle(xis[:, tang_idx])
    return TorusTrajectory(cfg, times, xis, etas, energies, actions, phases)


def _implicit_midpoint_step(spec: _Spectral, xi: np.ndarray, eta: np.ndarray,
                            dt: float, nonlinear: bool,
                            tol: float = 1e-13, max_iter: int = 50
                            ) -> tuple[np.ndarray, np.ndarray]:
    lam = spec.lam

    def rhs(x: np.ndarray, e: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        dx = 1j * lam * x
        de = -1j * lam * e
        if nonlinear:
            c = spec.cubic_coeffs(x, e)
            dx = dx + 1j * spec.kick_scale * c
            de = de - 1j * spec.kick_scale * c[::-1]
        return dx, de

    xi_new, eta_new = xi.copy(), eta.copy()
    for _ in range(max_iter):
        fx, fe = rhs(0.5 * (xi + xi_new), 0.5 * (eta + eta_new))
        xi_next = xi + dt * fx
        eta_next = eta + dt * fe
        delta = max(float(np.max(np.abs(xi_next - xi_new))),
                    float(np.max(np.abs(eta_next - eta_new))))
        xi_new, eta_new = xi_next, eta_next
        if delta < tol:
            return xi_new, eta_new
    raise RuntimeError("implicit midpoint iteration did not converge")


# ---------------------------------------------------------------------------
# Linear reference torus
# ---------------------------------------------------------------------------

def linear_torus_solution(A: AdmissibleSet, I: dict[int, float], m: float,
                          theta0: dict[int, float], t: float,
                          x: np.ndarray) -> np.ndarray:
    """Exact quasi-periodic solution of the linear equation sampled at x:

    u(theta0 + t omega, x) = sum_a sqrt(I_a)
        (e^{i (theta_a + t omega_a)} phi_a(x) + c.c.) / sqrt(2 lambda_a),
    phi_a(x) = e^{iax} / sqrt(2 pi).
    """
    check_mass(m)
    x = np.asarray(x, dtype=float)
    u = np.zeros_like(x)
    for a in A.modes:
        if I[a] <= 0:
            raise ValueError("actions must be positive")
        lam = math.sqrt(a * a + m)
        theta = theta0.get(a, 0.0) + t * lam
        amp = math.sqrt(I[a]) / math.sqrt(2.0 * lam) / math.sqrt(2.0 * math.pi)
        u += 2.0 * amp * np.cos(a * x + theta)
    return u


def linear_field_energy(A: AdmissibleSet, I: dict[int, float], m: float,
                        theta0: dict[int, float], t: float,
                        n_grid: int = 2048) -> float:
    """Quadrature of (u_t^2 + u_x^2 + m u^2)/2 over the circle at time t."""
    x = np.linspace(0.0, 2.0 * math.pi, n_grid, endpoint=False)
    u = np.zeros_like(x)
    ut = np.zeros_like(x)
    ux = np.zeros_like(x)
    for a in A.modes:
        lam = math.sqrt(a * a + m)
        theta = theta0.get(a, 0.0) + t * lam
        amp = 2.0 * math.sqrt(I[a]) / math.sqrt(2.0 * lam) / math.sqrt(2.0 * math.pi)
        u += amp * np.cos(a * x + theta)
        ut += -amp * lam * np.sin(a * x + theta)
        ux += -amp * a * np.sin(a * x + theta)
    dens = 0.5 * (ut ** 2 + ux ** 2 + m * u ** 2)
    return float(np.mean(dens) * 2.0 * math.pi)


# ---------------------------------------------------------------------------
# Diagnostics
# ---------------------------------------------------------------------------

class FrequencyExtractionError(RuntimeError):
    pass


def extract_frequencies(traj: TorusTrajectory, A: AdmissibleSet,
                        max_residual: float = 0.1) -> dict[int, float]:
    """Least-squares linear fit of the unwrapped tangential phases.

    Requires at least ~100 tangential periods and phase coherence (RMS
    residual below max_residual radians); returns slope magnitudes.
    """
    times = traj.times
    fs = FrequencySystem(traj.config.mass)
    out: dict[int, float] = {}
    for col, a in enumerate(A.modes):
        omega_a = float(fs.lam(a))
        if times[-1] * omega_a < 100.0 * 2.0 * math.pi:
            raise FrequencyExtractionError(
                f"trajectory too short for mode {a}: {times[-1] * omega_a / (2 * math.pi):.1f} periods")
        phase = np.unwrap(traj.phases[:, col])
        design = np.vstack([times, np.ones_like(times)]).T
        (slope, _), res, *_ = np.linalg.lstsq(design, phase, rcond=None)
        rms = math.sqrt(float(res[0]) / len(times)) if res.size else 0.0
        if rms > max_residual:
            raise FrequencyExtractionError(
                f"phase fit residual {rms:.3f} rad RMS exceeds {max_residual}")
        out[a] = abs(float(slope))
    traj.extracted_frequencies = out
    return out


def _state_field_coeffs(xi: np.ndarray, eta: np.ndarray, cutoff: int,
                        m: float) -> np.ndarray:
    modes = np.arange(-cutoff, cutoff + 1)
    lam = np.sqrt(modes.astype(float) ** 2 + m)
    return (xi + eta[::-1]) / np.sqrt(2.0 * lam) / math.sqrt(2.0 * math.pi)


def _torus_field_coeffs(A: AdmissibleSet, I: dict[int, float], m: float,
                        theta: dict[int, float], cutoff: int) -> np.ndarray:
    size = 2 * cutoff + 1
    xi = np.zeros(size, dtype=complex)
    for a in A.modes:
        xi[a + cutoff] = math.sqrt(I[a]) * np.exp(1j * theta.get(a, 0.0))
    return _state_field_coeffs(xi, xi.conj(), cutoff, m)


def torus_distance(traj: TorusTrajectory, I: dict[int, float], m: float,
                   alpha: float, n_samples: int = 200,
                   refine: bool = True) -> float:
    """Sup over sampled times of the phase-minimized Sobolev distance between
    the trajectory field and the linear torus family {u_{I,m}(theta, .)}.

    The tangential phases of the state seed the minimization; an optional
    local refinement polishes them.
    """
    from scipy.optimize import minimize

    cfg = traj.config
    cutoff = cfg.cutoff
    modes = np.arange(-cutoff, cutoff + 1)
    weight = np.maximum(np.abs(modes), 1).astype(float) ** (2.0 * alpha)
    stride = max(1, len(traj.times) // n_samples)
    worst = 0.0
    for idx in range(0, len(traj.times), stride):
        state_coeffs = _state_field_coeffs(traj.xi[idx], traj.eta[idx], cutoff, m)

        def dist(theta_vec: np.ndarray) -> float:
            theta = {a: th for a, th in zip(cfg.A.modes, theta_vec)}
            ref = _torus_field_coeffs(cfg.A, I, m, theta, cutoff)
            return math.sqrt(float(np.sum(np.abs(state_coeffs - ref) ** 2 * weight)))

        theta_seed = np.array([np.angle(traj.xi[idx][a + cutoff]) for a in cfg.A.modes])
        d = dist(theta_seed)
        if refine:
            res = minimize(dist, theta_seed, method="Nelder-Mead",
                           options={"maxiter": 80, "xatol": 1e-10, "fatol": 1e-14})
            d = min(d, float(res.fun))
        worst = max(worst, d)
    traj.sup_distance = worst
    return worst

"""Semi-implicit time stepping for the phase field and the solute.

One step advances the convective Cahn-Hilliard equation with nonlocal
mass exchange and then the solute diffusion, both against a frozen
velocity:

* phase field: ``(phi' - phi)/dt + div(vel phi) = lap mu' - alpha
  (mean(phi') - c0)`` with ``mu' = -lap phi' + psi0'(phi') - theta0 phi
  - chi sigma + beta N(phi - mean phi) + (gamma/dt)(phi' - phi)``,
* solute: ``(sigma' - sigma)/dt + div(vel sigma) = lap sigma'
  - chi lap phi'``.

The convex part of the potential is implicit, the concave quadratic and
the couplings are explicit, and the mass-exchange mean is implicit.
Taking means of the update shows ``mean(phi') - c0 = (mean(phi) - c0) /
(1 + alpha dt)`` and ``mean(sigma') = mean(sigma)``; both laws are
enforced exactly by recentering the solver output inside its tolerance.

The nonlinear cell system is solved by a damped Newton iteration.  After
eliminating ``mu`` the Jacobian is sparse with a 13-point stencil; each
update solves it with a direct sparse factorization.  For the
logarithmic potential a barrier safeguard rescales any update so that no
cell moves more than 90 percent of its remaining distance to ``+-1``,
which keeps every iterate strictly inside the physical interval.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from . import potential as pot
from .elliptic import SolverConfig, cg_raw, solve_spd
from .grid import (
    GridSpec,
    MacVelocity,
    ScalarField,
    advect_scalar,
    laplacian_raw,
    mean,
)
from .potential import PotentialParams
from .state import SimState

__all__ = [
    "ChdStepReport",
    "ModelParams",
    "NewtonError",
    "ch_step",
    "chd_step",
    "chemical_potential",
    "nonlocal_potential",
    "sigma_step",
]

NEWTON_TOL_FACTOR = 1.0e-9
NEWTON_MAX_ITER = 50
BARRIER_MARGIN = 0.9

# largest double strictly below 1; keeps barrier iterates evaluable even
# when rounding of phi + s * delta would land exactly on +-1
_INTERIOR_CAP = float(np.nextafter(1.0, 0.0))


class NewtonError(RuntimeError):
    """Nonlinear phase-field solve failed to converge."""


@dataclass(frozen=True)
class ModelParams:
    """Physical coefficients of the coupled model.

    Standing assumptions: (H1) both viscosities strictly positive, (H2)
    the potential splits into a convex part minus ``(theta0/2) r^2``
    (validated by :class:`~chns.potential.PotentialParams`), (H3) the
    mass-exchange rate ``alpha`` and regularization ``gamma`` are
    nonnegative and the target mean ``c0`` lies strictly inside the
    phase interval.
    """

    nu1: float = 1.0
    nu2: float = 1.0
    chi: float = 0.0
    alpha: float = 0.0
    beta: float = 0.0
    c0: float = 0.0
    gamma: float = 0.0
    potential: PotentialParams = PotentialParams()

    def __post_init__(self) -> None:
        if not (self.nu1 > 0.0 and self.nu2 > 0.0):
            raise ValueError(
                f"violates (H1): viscosities must be > 0, got nu1={self.nu1}, nu2={self.nu2}"
            )
        if self.alpha < 0.0:
            raise ValueError(f"violates (H3): alpha must be >= 0, got {self.alpha}")
        if self.gamma < 0.0:
            raise ValueError(f"violates (H3): gamma must be >= 0, got {self.gamma}")
        if not (-1.0 < self.c0 < 1.0):
            raise ValueError(f"violates (H3): c0 must lie in (-1, 1), got {self.c0}")

    @property
    def theta(self) -> float:
        return self.potential.theta

    @property
    def theta0(self) -> float:
        return self.potential.theta0


@dataclass
class ChdStepReport:
    """Solver bookkeeping for one transport step."""

    newton_iters: int = 0
    newton_residual: float = 0.0
    linear_iters: int = 0
    phi_min: float = 0.0
    phi_max: float = 0.0
    clipped_steps: int = 0


@functools.lru_cache(maxsize=8)
def _operators(spec: GridSpec):
    """Sparse Neumann Laplacian, its square and the identity, cached per grid."""

    def lap1d(n: int, h: float) -> sp.csr_matrix:
        main = -2.0 * np.ones(n)
        main[0] = main[-1] = -1.0  # mirrored ghosts
        off = np.ones(n - 1)
        return sp.diags([off, main, off], [-1, 0, 1], format="csr") / (h * h)

    ix = sp.identity(spec.nx, format="csr")
    iy = sp.identity(spec.ny, format="csr")
    lap = sp.kron(lap1d(spec.nx, spec.hx), iy) + sp.kron(ix, lap1d(spec.ny, spec.hy))
    lap = lap.tocsr()
    return lap, (lap @ lap).tocsr(), sp.identity(spec.nx * spec.ny, format="csr")


def nonlocal_potential(
    phi: ScalarField, cfg: SolverConfig = SolverConfig(), warm: ScalarField | None = None
) -> tuple[ScalarField, int]:
    """Inverse Neumann Laplacian of the zero-mean part of ``phi``.

    Returns the field and the iteration count.  ``warm`` seeds the solve;
    passing the result of the previous call makes repeated evaluations on
    a slowly moving field nearly free.
    """
    spec = phi.grid
    rhs = phi.values - phi.values.mean()

    def apply_neg_lap(x: np.ndarray) -> np.ndarray:
        return -laplacian_raw(spec, x)

    x, iters = cg_raw(
        apply_neg_lap,
        rhs,
        None if warm is None else warm.values,
        rel_tol=cfg.rel_tol,
        max_iter=cfg.resolve_max_iter(rhs.size),
        singular=True,
    )
    return ScalarField(spec, x), iters


def chemical_potential(
    phi: ScalarField,
    sigma: ScalarField,
    p: ModelParams,
    cfg: SolverConfig = SolverConfig(),
    nphi: ScalarField | None = None,
) -> ScalarField:
    """Assembled chemical potential ``-lap phi + psi'(phi) - chi sigma
    + beta N(phi - mean phi)`` of the current state (no splitting lag)."""
    spec = phi.grid
    out = -laplacian_raw(spec, phi.values) + pot.psi_prime(phi.values, p.potential)
    if p.chi != 0.0:
        out = out - p.chi * sigma.values
    if p.beta != 0.0:
        if nphi is None:
            nphi, _ = nonlocal_potential(phi, cfg)
        out = out + p.beta * nphi.values
    return ScalarField(spec, out)


def _barrier_scale(phi: np.ndarray, delta: np.ndarray) -> float:
    """Largest fraction of ``delta`` that keeps each cell within 90 percent
    of its current distance to the +-1 barrier."""
    s = 1.0
    up = delta > 0.0
    if np.any(up):
        s = min(s, float(np.min(BARRIER_MARGIN * (1.0 - phi[up]) / delta[up])))
    down = delta < 0.0
    if np.any(down):
        s = min(s, float(np.min(BARRIER_MARGIN * (1.0 + phi[down]) / (-delta[down]))))
    return s


def _newton_solve(
    spec: GridSpec,
    pparams: PotentialParams,
    phi0: np.ndarray,
    dt: float,
    gamma: float,
    g_expl: np.ndarray,
    b_expl: np.ndarray,
    m_target: float,
    *,
    tol_factor: float = NEWTON_TOL_FACTOR,
    max_iter: int = NEWTON_MAX_ITER,
) -> tuple[np.ndarray, int, float, int]:
    """Solve ``(phi - phi0)/dt + b_expl = lap(-lap phi + psi0'(phi)
    + (gamma/dt)(phi - phi0) + g_expl)`` and recenter to ``m_target``.

    Returns ``(phi, iterations, residual, barrier_activations)``.
    """
    lap_sp, lap2_sp, ident = _operators(spec)
    area = spec.cell_area
    barrier = pparams.variant == "logarithmic"
    gd = gamma / dt

    def residual(phi: np.ndarray) -> np.ndarray:
        mu_impl = (
            -laplacian_raw(spec, phi)
            + pot.psi0_prime(phi, pparams)
            + gd * (phi - phi0)
            + g_expl
        )
        return (phi - phi0) / dt + b_expl - laplacian_raw(spec, mu_impl)

    rhs = phi0 / dt - b_expl + laplacian_raw(spec, g_expl)
    tol = tol_factor * (1.0 + float(np.sqrt(area * np.vdot(rhs, rhs))))

    phi = phi0.copy()
    r = residual(phi)
    res = float(np.sqrt(area * np.vdot(r, r)))
    clipped = 0
    for it in range(1, max_iter + 1):
        if res <= tol:
            return _recenter(phi, m_target), it - 1, res, clipped
        d = pot.psi0_second(phi, pparams).reshape(-1) + gd
        jac = ident / dt + lap2_sp - (lap_sp @ sp.diags(d)).tocsc()
        delta = splu(jac.tocsc()).solve(-r.reshape(-1)).reshape(phi.shape)
        s = _barrier_scale(phi, delta) if barrier else 1.0
        if s < 1.0:
            clipped += 1
        # fall back to halving if the damped update fails to reduce the residual
        for _ in range(5):
            phi_try = phi + s * delta
            if barrier:
                np.clip(phi_try, -_INTERIOR_CAP, _INTERIOR_CAP, out=phi_try)
            r_try = residual(phi_try)
            res_try = float(np.sqrt(area * np.vdot(r_try, r_try)))
            if res_try < res or s < 1.0e-3:
                break
            s *= 0.5
        phi, r, res = phi_try, r_try, res_try
    if res <= tol:
        return _recenter(phi, m_target), max_iter, res, clipped
    raise NewtonError(
        f"phase-field Newton iteration did not converge: residual {res:.3e} "
        f"(target {tol:.3e}) after {max_iter} iterations"
    )


def _recenter(phi: np.ndarray, m_target: float) -> np.ndarray:
    return phi + (m_target - phi.mean())


def ch_step(
    phi: ScalarField,
    sigma: ScalarField,
    vel: MacVelocity,
    p: ModelParams,
    dt: float,
    cfg: SolverConfig = SolverConfig(),
    source: ScalarField | None = None,
    nphi: ScalarField | None = None,
) -> tuple[ScalarField, ScalarField, ChdStepReport]:
    """One implicit phase-field update against the frozen velocity.

    ``source`` adds a cell forcing to the right-hand side (used by
    manufactured-solution tests).  ``nphi`` may carry a precomputed
    ``N(phi - mean phi)``; otherwise it is solved for when ``beta`` is
    nonzero.  Returns the new phase field, the chemical potential of the
    scheme (including its explicit lags) and a solver report.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    spec = phi.grid
    report = ChdStepReport()

    adv = advect_scalar(vel, phi).values
    g_expl = -p.theta0 * phi.values - p.chi * sigma.values
    if p.beta != 0.0:
        if nphi is None:
            nphi, iters = nonlocal_potential(phi, cfg)
            report.linear_iters += iters
        g_expl = g_expl + p.beta * nphi.values

    src = 0.0 if source is None else source.values
    src_mean = 0.0 if source is None else float(source.values.mean())
    m_target = (float(phi.values.mean()) + dt * (src_mean + p.alpha * p.c0)) / (
        1.0 + dt * p.alpha
    )
    kappa = p.alpha * (m_target - p.c0)
    b_expl = adv + kappa - src

    phi_new, iters, res, clipped = _newton_solve(
        spec, p.potential, phi.values, dt, p.gamma, g_expl, b_expl, m_target
    )
    report.newton_iters = iters
    report.newton_residual = res
    report.clipped_steps = clipped
    report.phi_min = float(phi_new.min())
    report.phi_max = float(phi_new.max())

    mu_new = (
        -laplacian_raw(spec, phi_new)
        + pot.psi0_prime(phi_new, p.potential)
        + (p.gamma / dt) * (phi_new - phi.values)
        + g_expl
    )
    return ScalarField(spec, phi_new), ScalarField(spec, mu_new), report


def sigma_step(
    sigma: ScalarField,
    phi_new: ScalarField,
    vel: MacVelocity,
    p: ModelParams,
    dt: float,
    cfg: SolverConfig = SolverConfig(),
    source: ScalarField | None = None,
) -> tuple[ScalarField, int]:
    """Implicit diffusion of the solute with explicit transport and
    cross-diffusion against the fresh phase field.

    Returns the new solute field and the linear iteration count.  The
    conserved mean is enforced exactly by recentering inside the solver
    tolerance.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    spec = sigma.grid
    b = sigma.values - dt * advect_scalar(vel, sigma).values
    if p.chi != 0.0:
        b = b - dt * p.chi * laplacian_raw(spec, phi_new.values)
    if source is not None:
        b = b + dt * source.values

    def apply_helmholtz(x: np.ndarray) -> np.ndarray:
        return x - dt * laplacian_raw(spec, x)

    rhs = ScalarField(spec, b)
    sol, iters = solve_spd(apply_helmholtz, rhs, cfg, x0=sigma)
    sol.values += b.mean() - sol.values.mean()
    return sol, iters


def chd_step(
    state: SimState,
    p: ModelParams,
    dt: float,
    cfg: SolverConfig = SolverConfig(),
    phi_source: ScalarField | None = None,
    sigma_source: ScalarField | None = None,
) -> tuple[SimState, ChdStepReport]:
    """Composition of :func:`ch_step` and :func:`sigma_step`.

    Advances ``phi``, ``mu``, ``sigma`` and time; the velocity and
    pressure ride along unchanged.
    """
    nphi = None
    extra_iters = 0
    if p.beta != 0.0:
        nphi, extra_iters = nonlocal_potential(state.phi, cfg, warm=state.nphi)
    phi_new, mu_new, report = ch_step(
        state.phi, state.sigma, state.vel, p, dt, cfg, source=phi_source, nphi=nphi
    )
    report.linear_iters += extra_iters
    sigma_new, sig_iters = sigma_step(
        state.sigma, phi_new, state.vel, p, dt, cfg, source=sigma_source
    )
    report.linear_iters += sig_iters
    new_state = replace(
        state,
        phi=phi_new,
        mu=mu_new,
        sigma=sigma_new,
        t=state.t + dt,
        step=state.step + 1,
        nphi=nphi if nphi is not None else state.nphi,
    )
    return new_state, report

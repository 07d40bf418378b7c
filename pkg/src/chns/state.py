"""Shared simulation state passed between the transport and flow steps."""

from __future__ import annotations

from dataclasses import dataclass, field

from .grid import GridSpec, MacVelocity, ScalarField

__all__ = ["SimState"]


@dataclass
class SimState:
    """Full unknown set at one time level.

    ``nphi`` caches the inverse-Laplacian of the zero-mean phase field
    from whichever routine computed it last.  It is a warm-start hint for
    the next such solve, not guaranteed to match ``phi`` exactly.
    """

    vel: MacVelocity
    phi: ScalarField
    mu: ScalarField
    sigma: ScalarField
    pressure: ScalarField
    t: float = 0.0
    step: int = 0
    nphi: ScalarField | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        g = self.vel.grid
        for f in (self.phi, self.mu, self.sigma, self.pressure):
            if f.grid != g:
                raise ValueError("state fields live on different grids")

    @property
    def grid(self) -> GridSpec:
        return self.vel.grid

    def copy(self) -> "SimState":
        return SimState(
            self.vel.copy(),
            self.phi.copy(),
            self.mu.copy(),
            self.sigma.copy(),
            self.pressure.copy(),
            self.t,
            self.step,
            None if self.nphi is None else self.nphi.copy(),
        )

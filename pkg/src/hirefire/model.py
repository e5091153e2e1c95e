"""Primitive game parameters and the constants derived from them."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .exceptions import DomainViolation, OrderingViolation

__all__ = ["GameParams", "DerivedQuantities", "validate_params", "derived_quantities"]

PARAM_NAMES = ("mu0", "mu1", "sigma", "p", "r", "c0", "c1")


@dataclass(frozen=True)
class GameParams:
    """Constants of the hiring game.

    Parameters
    ----------
    mu0, mu1 : float
        Revenue drift of the weak and the strong type (payoff units per time).
    sigma : float
        Volatility of the revenue process.
    p : float
        Prior probability of the strong type.
    r : float
        Discount rate (1/time).
    c0, c1 : float
        Low and high salary rates.

    Construction validates; an instance always satisfies
    ``0 < c0 <= mu0 < c1 < mu1``, ``sigma > 0``, ``r > 0`` and ``0 < p < 1``.
    """

    mu0: float
    mu1: float
    sigma: float
    p: float
    r: float
    c0: float
    c1: float

    def __post_init__(self):
        for name in PARAM_NAMES:
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise DomainViolation(name, f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if self.sigma <= 0:
            raise DomainViolation("sigma", f"sigma must be > 0, got {self.sigma}")
        if self.r <= 0:
            raise DomainViolation("r", f"r must be > 0, got {self.r}")
        if not 0 < self.p < 1:
            raise DomainViolation("p", f"p must lie in (0, 1), got {self.p}")
        if not self.c0 > 0:
            raise OrderingViolation("0 < c0")
        if self.c0 > self.mu0:
            raise OrderingViolation("c0 <= mu0")
        if not self.mu0 < self.c1:
            raise OrderingViolation("mu0 < c1")
        if not self.c1 < self.mu1:
            raise OrderingViolation("c1 < mu1")

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class DerivedQuantities:
    omega: float   # signal-to-noise ratio (mu1 - mu0) / sigma, per sqrt(time)
    gamma1: float  # negative root of g^2 - g - 2r/omega^2
    gamma2: float  # root > 1


def validate_params(mu0, mu1, sigma, p, r, c0, c1) -> GameParams:
    """Check the seven raw numbers and return them as :class:`GameParams`.

    Raises
    ------
    DomainViolation
        ``sigma <= 0``, ``r <= 0`` or ``p`` outside (0, 1).
    OrderingViolation
        The ordering ``0 < c0 <= mu0 < c1 < mu1`` fails; ``.inequality`` names
        the first failing link.
    """
    return GameParams(mu0=mu0, mu1=mu1, sigma=sigma, p=p, r=r, c0=c0, c1=c1)


def derived_quantities(params: GameParams) -> DerivedQuantities:
    omega = (params.mu1 - params.mu0) / params.sigma
    k = 2.0 * params.r / omega**2
    # larger root first, the other from the product gamma1 * gamma2 = -k
    gamma2 = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * k))
    gamma1 = -k / gamma2
    return DerivedQuantities(omega=omega, gamma1=gamma1, gamma2=gamma2)

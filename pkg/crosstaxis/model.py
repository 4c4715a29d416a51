"""Model coefficients, reaction kinetics, regimes and steady states."""

import logging
import math
from dataclasses import dataclass, fields
from enum import Enum

import numpy as np

from crosstaxis.errors import ValidationError

logger = logging.getLogger("crosstaxis")

# Relative tolerance under which the discriminant counts as zero
DISCRIMINANT_RTOL = 1e-12

# Relative tolerance for accepting a steady state in Jacobian evaluation
STEADY_STATE_RTOL = 1e-9

_KINETIC_FIELDS = ("lambda1", "lambda2", "mu1", "mu2", "a1", "a2")


class RegimeTag(Enum):
    """Classification of admissible parameter sets."""

    H1 = "H1"
    COEXISTENCE = "CoexistenceH2"
    STRICT_EXCLUSION = "StrictExclusionH2"
    DEGENERATE_EXCLUSION = "DegenerateExclusionH2"


@dataclass(frozen=True)
class Parameters:
    """Coefficients of the cross-diffusive predator-prey system.

    Attributes:
        D1: Diffusivity of the predator u.
        D2: Diffusivity of the prey v.
        chi1: Prey-taxis coefficient of u (attractive).
        chi2: Predator-taxis coefficient of v (repulsive).
        lambda1: Growth rate of u.
        lambda2: Growth rate of v.
        mu1: Intra-species competition of u.
        mu2: Intra-species competition of v.
        a1: Predation benefit for u.
        a2: Predation loss for v.
        m1: Prescribed mass of u, only used when all kinetics vanish.
        m2: Prescribed mass of v, only used when all kinetics vanish.
    """

    D1: float
    D2: float
    chi1: float
    chi2: float
    lambda1: float = 0.0
    lambda2: float = 0.0
    mu1: float = 0.0
    mu2: float = 0.0
    a1: float = 0.0
    a2: float = 0.0
    m1: float = 0.0
    m2: float = 0.0

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValidationError(
                    f"Parameter {f.name} must be a number, got {value!r}"
                )
            if not math.isfinite(value):
                raise ValidationError(f"Parameter {f.name} must be finite")
            object.__setattr__(self, f.name, float(value))

        for name in ("D1", "D2", "chi1", "chi2"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"Parameter {name} must be > 0")
        for name in _KINETIC_FIELDS + ("m1", "m2"):
            if getattr(self, name) < 0:
                raise ValidationError(f"Parameter {name} must be >= 0")

        if self.is_h1:
            return
        for name in ("mu1", "mu2", "a1", "a2"):
            if getattr(self, name) <= 0:
                raise ValidationError(
                    f"Parameter {name} must be > 0 unless all kinetic "
                    "coefficients vanish"
                )

    @property
    def is_h1(self) -> bool:
        """True when every kinetic coefficient is zero."""
        return all(getattr(self, name) == 0 for name in _KINETIC_FIELDS)

    @property
    def discriminant(self) -> float:
        return self.lambda2 * self.mu1 - self.lambda1 * self.a2


@dataclass(frozen=True)
class Regime:
    """Regime tag plus the discriminant it was derived from.

    Attributes:
        tag: The regime classification.
        discriminant: lambda2*mu1 - lambda1*a2.
        trivial_u: Under H1, u carries zero mass and must stay zero.
        trivial_v: Under H1, v carries zero mass and must stay zero.
    """

    tag: RegimeTag
    discriminant: float
    trivial_u: bool = False
    trivial_v: bool = False

    @property
    def is_exclusion(self) -> bool:
        return self.tag in (
            RegimeTag.STRICT_EXCLUSION,
            RegimeTag.DEGENERATE_EXCLUSION,
        )

    @property
    def predicts_algebraic_decay(self) -> bool:
        return self.tag is RegimeTag.DEGENERATE_EXCLUSION


@dataclass(frozen=True)
class SteadyState:
    """Homogeneous steady state (u_star, v_star)."""

    u_star: float
    v_star: float

    def __post_init__(self) -> None:
        for name in ("u_star", "v_star"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ValidationError(
                    f"Steady state {name} must be finite and >= 0"
                )
            object.__setattr__(self, name, float(value))


@dataclass(frozen=True)
class JacobianAtSteadyState:
    """Partial derivatives of the kinetics at a steady state."""

    fu: float
    fv: float
    gu: float
    gv: float

    @property
    def weak_signs(self) -> bool:
        """fu <= 0 and gv <= 0."""
        return self.fu <= 0 and self.gv <= 0

    @property
    def strict_signs(self) -> bool:
        """fu < 0 and gv < 0."""
        return self.fu < 0 and self.gv < 0

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.fu, self.fv], [self.gu, self.gv]])


def classify_regime(p: Parameters) -> Regime:
    """Classify a parameter set into one of the four regimes.

    The discriminant lambda2*mu1 - lambda1*a2 is treated as zero when it is
    exactly zero or below ``DISCRIMINANT_RTOL`` relative to its two terms.
    """
    if p.is_h1:
        return Regime(
            tag=RegimeTag.H1,
            discriminant=0.0,
            trivial_u=p.m1 == 0,
            trivial_v=p.m2 == 0,
        )

    positive = p.lambda2 * p.mu1
    negative = p.lambda1 * p.a2
    discriminant = positive - negative
    scale = max(abs(positive), abs(negative))
    if discriminant == 0 or abs(discriminant) <= DISCRIMINANT_RTOL * scale:
        tag = RegimeTag.DEGENERATE_EXCLUSION
    elif discriminant > 0:
        tag = RegimeTag.COEXISTENCE
    else:
        tag = RegimeTag.STRICT_EXCLUSION
    logger.debug(f"Discriminant {discriminant:.17g} -> {tag.value}")
    return Regime(tag=tag, discriminant=discriminant)


def steady_state(p: Parameters, domain_volume: float) -> SteadyState:
    """Closed-form homogeneous steady state for the regime of ``p``."""
    if not domain_volume > 0:
        raise ValidationError("domain_volume must be > 0")

    regime = classify_regime(p)
    if regime.tag is RegimeTag.H1:
        return SteadyState(p.m1 / domain_volume, p.m2 / domain_volume)
    if regime.tag is RegimeTag.COEXISTENCE:
        denominator = p.mu1 * p.mu2 + p.a1 * p.a2
        return SteadyState(
            (p.lambda1 * p.mu2 + p.lambda2 * p.a1) / denominator,
            (p.lambda2 * p.mu1 - p.lambda1 * p.a2) / denominator,
        )
    return SteadyState(p.lambda1 / p.mu1, 0.0)


def reaction(p: Parameters, u, v):
    """Kinetics (f, g); accepts scalars or numpy arrays."""
    f = u * (p.lambda1 - p.mu1 * u + p.a1 * v)
    g = v * (p.lambda2 - p.mu2 * v - p.a2 * u)
    return f, g


def _check_consistent(p: Parameters, s: SteadyState) -> None:
    f, g = reaction(p, s.u_star, s.v_star)
    u, v = s.u_star, s.v_star
    scale_f = p.lambda1 * u + p.mu1 * u * u + p.a1 * u * v
    scale_g = p.lambda2 * v + p.mu2 * v * v + p.a2 * u * v
    if abs(f) > STEADY_STATE_RTOL * scale_f + 1e-14:
        raise ValidationError(
            f"({u}, {v}) is not a steady state: f = {f:.3e}"
        )
    if abs(g) > STEADY_STATE_RTOL * scale_g + 1e-14:
        raise ValidationError(
            f"({u}, {v}) is not a steady state: g = {g:.3e}"
        )


def jacobian_at_steady_state(
    p: Parameters, s: SteadyState
) -> JacobianAtSteadyState:
    """Jacobian of (f, g) at ``s`` in its regime-specific closed form.

    Raises:
        ValidationError: If ``s`` does not annihilate the kinetics of ``p``,
            or has v_star > 0 in an exclusion regime.
    """
    _check_consistent(p, s)
    regime = classify_regime(p)
    u, v = s.u_star, s.v_star

    if regime.tag is RegimeTag.H1:
        return JacobianAtSteadyState(0.0, 0.0, 0.0, 0.0)
    if regime.tag is RegimeTag.COEXISTENCE:
        return JacobianAtSteadyState(
            fu=-p.mu1 * u, fv=p.a1 * u, gu=-p.a2 * v, gv=-p.mu2 * v
        )
    if v != 0:
        raise ValidationError(
            f"v_star must vanish in regime {regime.tag.value}, got {v}"
        )
    gv = 0.0
    if regime.tag is RegimeTag.STRICT_EXCLUSION:
        gv = p.lambda2 - p.lambda1 * p.a2 / p.mu1
    return JacobianAtSteadyState(fu=-p.lambda1, fv=p.a1 * u, gu=0.0, gv=gv)


def default_eta(s: SteadyState) -> float:
    """Default width of the L-infinity tube around the steady state.

    Falls back to 0.1 when the steady state is the origin.
    """
    total = s.u_star + s.v_star
    if total == 0:
        return 0.1
    return 0.1 * min(total, 1.0)


__all__ = [
    "Parameters",
    "Regime",
    "RegimeTag",
    "SteadyState",
    "JacobianAtSteadyState",
    "classify_regime",
    "steady_state",
    "reaction",
    "jacobian_at_steady_state",
    "default_eta",
]

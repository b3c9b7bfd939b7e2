"""Closed-form security quantities: entropies, error rates, the
eavesdropper-information bound, secrecy capacity, and impersonation
detection probability.

All logarithms are base 2 (capacities in bits). Entropies use the
0*log(0) = 0 convention; probability normalization and inequality checks
use a 1e-12 tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

PROB_TOL = 1e-12


class InsufficientDataError(Exception):
    """A rate was requested from an empty sample set."""


def binary_entropy(x: float) -> float:
    """h(x) = -x*log2(x) - (1-x)*log2(1-x), with h(0) = h(1) = 0."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"binary_entropy domain is [0, 1], got {x}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


@dataclass(frozen=True)
class BellDiagonalDist:
    """Distribution (d1, d2, d3, d4) over the four Bell states, in the order
    Phi+, Phi-, Psi+, Psi-."""

    d1: float
    d2: float
    d3: float
    d4: float

    def __post_init__(self):
        probs = self.as_tuple()
        if any(p < -PROB_TOL for p in probs):
            raise ValueError(f"negative probability in {probs}")
        if abs(sum(probs) - 1.0) > PROB_TOL:
            raise ValueError(f"probabilities {probs} do not sum to 1")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.d1, self.d2, self.d3, self.d4)


def shannon_entropy(dist: BellDiagonalDist) -> float:
    """H(dist) = -sum d_i log2 d_i with 0*log(0) = 0."""
    return -sum(p * math.log2(p) for p in dist.as_tuple() if p > 0.0)


def rates_from_dist(dist: BellDiagonalDist) -> tuple[float, float]:
    """(bit-flip rate, phase-flip rate) = (d3 + d4, d2 + d4)."""
    return dist.d3 + dist.d4, dist.d2 + dist.d4


def holevo_bound(dist: BellDiagonalDist) -> float:
    """Upper bound h(eps_z) + h(eps_x) on the eavesdropper's accessible
    information per encoded pair; dominates shannon_entropy(dist)."""
    eps_z, eps_x = rates_from_dist(dist)
    clamp = lambda v: min(1.0, max(0.0, v))  # guard float slack at the simplex edge
    return binary_entropy(clamp(eps_z)) + binary_entropy(clamp(eps_x))


def lemma1_check(dist: BellDiagonalDist) -> tuple[float, float, bool]:
    """Subadditivity check: Shannon entropy of the four-way distribution
    against the sum of its two marginal binary entropies.

    Returns (lhs, rhs, lhs <= rhs + 1e-12).
    """
    lhs = shannon_entropy(dist)
    rhs = holevo_bound(dist)
    return lhs, rhs, lhs <= rhs + PROB_TOL


def secrecy_capacity(eps_e: float, eps_z: float, eps_x: float) -> float:
    """Lower bound 2 - h(eps_e) - h(eps_z) - h(eps_x) on the secrecy
    capacity, in bits per Bell pair."""
    return 2.0 - binary_entropy(eps_e) - binary_entropy(eps_z) - binary_entropy(eps_x)


def is_secure(eps_e: float, eps_z: float, eps_x: float) -> bool:
    """Transmission is certifiably secure iff the capacity bound is positive."""
    return secrecy_capacity(eps_e, eps_z, eps_x) > 0.0


def impersonation_detection_probability(k: int) -> float:
    """Probability 1 - (1/4)^k that an impersonator is caught across k
    authentication pairs."""
    if k < 0:
        raise ValueError("k must be >= 0")
    return 1.0 - 0.25 ** k


@dataclass(frozen=True)
class RateEstimate:
    mismatches: int
    samples: int

    @property
    def rate(self) -> float:
        return self.mismatches / self.samples

    def to_dict(self) -> dict:
        return {"mismatches": self.mismatches, "samples": self.samples,
                "rate": self.rate}


@dataclass
class RatesFragment:
    """Estimated error rates with sample counts, as fed into a
    SecurityReport."""

    eps_z: RateEstimate | None
    eps_x: RateEstimate | None
    eps_e: RateEstimate | None
    estimator: str

    def complete(self) -> bool:
        return None not in (self.eps_z, self.eps_x, self.eps_e)

    def capacity(self) -> float | None:
        if not self.complete():
            return None
        return secrecy_capacity(self.eps_e.rate, self.eps_z.rate, self.eps_x.rate)

    def holevo(self) -> float | None:
        if self.eps_z is None or self.eps_x is None:
            return None
        return binary_entropy(self.eps_z.rate) + binary_entropy(self.eps_x.rate)


@dataclass(frozen=True)
class StageResult:
    """Outcome of one security check stage."""

    stage: str
    errors: int
    samples: int
    threshold: float
    passed: bool

    @property
    def error_fraction(self) -> float:
        return self.errors / self.samples if self.samples else 0.0

    def to_dict(self) -> dict:
        return {"stage": self.stage, "errors": self.errors,
                "samples": self.samples, "error_fraction": self.error_fraction,
                "threshold": self.threshold,
                "verdict": "pass" if self.passed else "fail"}


@dataclass
class SecurityReport:
    """Security summary of one protocol run (or, aggregated, a batch)."""

    protocol: str
    status: str
    abort_stage: str | None
    stages: list[StageResult]
    rates: "RatesFragment"
    decoded_message: str | None = None
    decoded_message_bob: str | None = None

    @property
    def detected(self) -> bool:
        return self.abort_stage is not None

    def to_dict(self) -> dict:
        holevo = self.rates.holevo()
        capacity = self.rates.capacity()
        return {
            "schema_version": 1,
            "protocol": self.protocol,
            "status": self.status,
            "abort_stage": self.abort_stage,
            "detected": self.detected,
            "stages": {s.stage: s.to_dict() for s in self.stages},
            "rates": {
                "estimator": self.rates.estimator,
                "eps_z": self.rates.eps_z.to_dict() if self.rates.eps_z else None,
                "eps_x": self.rates.eps_x.to_dict() if self.rates.eps_x else None,
                "eps_e": self.rates.eps_e.to_dict() if self.rates.eps_e else None,
            },
            "holevo_bound": holevo,
            "secrecy_capacity_lower_bound": capacity,
            "secure": (capacity > 0.0) if capacity is not None else None,
            "decoded_message": self.decoded_message,
            "decoded_message_bob": self.decoded_message_bob,
        }


def _estimate(samples: Sequence[bool] | None, what: str) -> RateEstimate | None:
    if samples is None:
        return None
    if len(samples) == 0:
        raise InsufficientDataError(f"no samples to estimate {what}")
    return RateEstimate(sum(bool(s) for s in samples), len(samples))


def estimate_rates(z_samples: Sequence[bool] | None,
                   x_samples: Sequence[bool] | None,
                   check_samples: Sequence[bool] | None = None,
                   estimator: str = "sacrificed-pairs") -> RatesFragment:
    """Aggregate mismatch samples into rate estimates.

    Each sequence holds one boolean per comparison (True = mismatch); pass
    None to leave a rate unestimated, an empty sequence is an error.
    """
    return RatesFragment(
        eps_z=_estimate(z_samples, "eps_z"),
        eps_x=_estimate(x_samples, "eps_x"),
        eps_e=_estimate(check_samples, "eps_e"),
        estimator=estimator,
    )

"""Channel noise and eavesdropper strategies.

Noise is realized as sampled Pauli errors applied per qubit per channel
traversal, which keeps states pure-symbolic. Strategies act only through
channel contents and public announcements; none of their entry points ever
receives a party's secret identity or message.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .coding import ConfigurationError
from .metrics import RatesFragment, estimate_rates
from .quantum import Basis, BellLabel, PauliOp, ProductQubit, Register, Role

CHANNEL_BOB_TO_ALICE = "bob-to-alice"
CHANNEL_ALICE_TO_UTP = "alice-to-utp"
CHANNEL_BOB_TO_UTP = "bob-to-utp"
CHANNELS = (CHANNEL_BOB_TO_ALICE, CHANNEL_ALICE_TO_UTP, CHANNEL_BOB_TO_UTP)

_ERROR_ORDER = (PauliOp.X, PauliOp.Y, PauliOp.Z)


@dataclass(frozen=True)
class ChannelModel:
    """Independent per-qubit Pauli noise: with probability ``p`` one error is
    sampled from ``distribution`` (relative weights over X, Y, Z), otherwise
    the qubit passes untouched."""

    p: float = 0.0
    distribution: tuple[float, float, float] = (1.0, 1.0, 1.0)

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ConfigurationError(f"channel error probability {self.p} not in [0,1]")
        if min(self.distribution) < 0 or sum(self.distribution) <= 0:
            raise ConfigurationError(f"invalid error distribution {self.distribution}")

    @staticmethod
    def from_bell_diagonal(d1: float, d2: float, d3: float, d4: float) -> "ChannelModel":
        """Channel whose action on a Phi+ pair leaves the Bell-diagonal
        distribution (d1, d2, d3, d4) over Phi+, Phi-, Psi+, Psi-.

        Identity with weight d1; X, Y, Z errors with weights d3, d4, d2.
        """
        if min(d1, d2, d3, d4) < 0 or abs(d1 + d2 + d3 + d4 - 1.0) > 1e-9:
            raise ConfigurationError("Bell-diagonal weights must be a distribution")
        return ChannelModel(p=d2 + d3 + d4, distribution=(d3, d4, d2))

    def sample_error(self, rng: random.Random) -> PauliOp:
        """The Pauli applied to one traversing qubit (I = no error)."""
        if self.p == 0.0 or rng.random() >= self.p:
            return PauliOp.I
        x, y, z = self.distribution
        r = rng.random() * (x + y + z)
        if r < x:
            return PauliOp.X
        return PauliOp.Y if r < x + y else PauliOp.Z


def apply_channel(register: Register, slot_id: int, model: ChannelModel,
                  rng: random.Random) -> PauliOp:
    """Pass one slot through the channel; returns the applied Pauli for
    ground-truth logging."""
    err = model.sample_error(rng)
    if err is not PauliOp.I:
        register.apply_pauli(slot_id, err)
    return err


# -- eavesdropper strategies --------------------------------------------------


class AdversaryStrategy:
    """Base strategy: does nothing. Subclasses may tap qubits in transit on a
    chosen channel and/or take over a party's role (in which case the engine
    withholds that party's secrets from the substituted role)."""

    kind = "none"

    def intercepts(self, channel: str) -> bool:
        return False

    def on_transit(self, register: Register, slot_id: int, channel: str,
                   rng: random.Random) -> None:
        pass

    @property
    def impersonates_alice(self) -> bool:
        return False

    @property
    def impersonates_bob(self) -> bool:
        return False

    def describe(self) -> dict:
        return {"kind": self.kind}


class NoAdversary(AdversaryStrategy):
    pass


class ImpersonateAlice(AdversaryStrategy):
    """Eve intercepts the receiver-prepared sequence in transit to the sender
    and runs the sender's role herself. Lacking the sender's identity string
    she encodes uniformly random Paulis on the identity-carrier qubits (and an
    arbitrary fake message), so the receiver's verification catches her with
    probability 1 - (1/4)^k."""

    kind = "impersonate-alice"


class ImpersonateBob(AdversaryStrategy):
    """Eve initiates the protocol in the receiver's role. Lacking the
    receiver's identity string she prepares the authentication pairs uniformly
    at random, so the sender's verification catches her with probability
    1 - (1/4)^k."""

    kind = "impersonate-bob"


class InterceptResend(AdversaryStrategy):
    """Eve measures every qubit crossing the target channel in a basis chosen
    by policy ("uniform", "Z" or "X") and forwards a fresh product qubit
    matching her outcome."""

    kind = "intercept-resend"

    def __init__(self, channel: str = CHANNEL_BOB_TO_ALICE, basis_policy: str = "uniform"):
        if channel not in CHANNELS:
            raise ConfigurationError(f"unknown channel {channel!r}; expected one of {CHANNELS}")
        if basis_policy not in ("uniform", "Z", "X"):
            raise ConfigurationError(f"unknown basis policy {basis_policy!r}")
        self.channel = channel
        self.basis_policy = basis_policy

    def intercepts(self, channel: str) -> bool:
        return channel == self.channel

    def _pick_basis(self, rng: random.Random) -> Basis:
        if self.basis_policy == "uniform":
            return Basis.Z if rng.randrange(2) == 0 else Basis.X
        return Basis(self.basis_policy)

    def on_transit(self, register, slot_id, channel, rng):
        basis = self._pick_basis(rng)
        outcome = register.measure_single(slot_id, basis, rng)
        register.resend_as_product(slot_id, ProductQubit(basis, outcome))

    def describe(self) -> dict:
        return {"kind": self.kind, "channel": self.channel,
                "basis_policy": self.basis_policy}


# -- channel calibration -------------------------------------------------------


def sample_pair_error_rates(model: ChannelModel, pairs: int,
                            rng: random.Random) -> RatesFragment:
    """Estimate bit- and phase-flip rates by sacrificing Bell pairs.

    Each trial sends one half of a fresh Phi+ pair through the channel, then
    measures both halves in the same basis (Z or X, alternating); a mismatch
    where the intact pair would agree counts as an error. Under uniform Pauli
    noise both rates converge to 2p/3.
    """
    z_samples: list[bool] = []
    x_samples: list[bool] = []
    for i in range(pairs):
        register = Register()
        a, b = register.new_pair(BellLabel.PHI_PLUS, "alice", "bob", Role.MESSAGE)
        apply_channel(register, a, model, rng)
        basis = Basis.Z if i % 2 == 0 else Basis.X
        mismatch = (register.measure_single(a, basis, rng)
                    != register.measure_single(b, basis, rng))
        (z_samples if basis is Basis.Z else x_samples).append(mismatch)
    return estimate_rates(z_samples, x_samples, None, estimator="sacrificed-pairs")

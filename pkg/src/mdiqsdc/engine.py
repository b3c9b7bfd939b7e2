"""State machines for the three protocols (direct, dialogue, and the
cover-operation variant), producing a full transcript and a security report
per run.

A run is a pure function of (config, seed): every stochastic choice draws
from one of four generators derived from the seed (protocol choices,
measurements, channel noise, adversary), so enabling noise or recording
cannot perturb unrelated streams. The bundled reference examples inject
scripted choices instead of the random source.

Roles: "alice" is the message sender, "bob" the receiver who prepares all
entangled pairs, "utp" the untrusted measurement party. An impersonating
adversary replaces a party's role wholesale and is shown as actor "eve";
the engine never hands the replaced party's secrets to it.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .adversary import (
    CHANNEL_ALICE_TO_UTP,
    CHANNEL_BOB_TO_ALICE,
    CHANNEL_BOB_TO_UTP,
    AdversaryStrategy,
    ChannelModel,
    NoAdversary,
    apply_channel,
)
from .choices import ChoiceSource, RandomChoices
from .coding import (
    ConfigurationError,
    bell_to_identity,
    decode_two_bits,
    identity_to_bell,
    insert_check_bits,
    message_to_pauli,
    qd_bob_bit_from_pauli,
    qd_decode,
    remove_positions,
    validate_bits,
)
from .metrics import RatesFragment, SecurityReport, StageResult, estimate_rates
from .quantum import (
    Basis,
    BellLabel,
    CoverOp,
    InvalidOperationError,
    PauliOp,
    ProductQubit,
    Register,
    Role,
    apply_cover_to_product,
    apply_pauli_to_bell,
    effective_basis,
    inverse_cover,
)
from .transcript import (
    ABORTED,
    COMPLETED,
    KIND_ANNOUNCE_BASES,
    KIND_ANNOUNCE_COVERS,
    KIND_ANNOUNCE_POSITIONS,
    KIND_DECODE,
    KIND_MEASURE,
    KIND_PREPARE,
    KIND_SEND,
    KIND_VERDICT,
    ProtocolTranscript,
    Recorder,
)

PROTOCOL_QSDC = "qsdc"
PROTOCOL_QD = "qd"
PROTOCOL_DSQC = "dsqc"
PROTOCOLS = (PROTOCOL_QSDC, PROTOCOL_QD, PROTOCOL_DSQC)

STAGE_DECOY_BOB_ALICE = "decoy-bob-alice"
STAGE_DECOY_ALICE_UTP = "decoy-alice-utp"
STAGE_DECOY_BOB_UTP = "decoy-bob-utp"
STAGE_AUTH_BOB = "auth-bob"
STAGE_AUTH_ALICE = "auth-alice"
STAGE_CHECK_BITS = "check-bits"
STAGE_CHECK_BITS_ALICE = "check-bits-alice"
STAGE_CHECK_BITS_BOB = "check-bits-bob"


@dataclass
class PartyConfig:
    """Static inputs of one run.

    ``message_bits`` is the sender's message (both parties' messages for the
    dialogue protocol, where ``message_bits_bob`` must have equal length).
    Identities are the pre-shared authentication strings, two bits per
    authentication pair. ``decoy_count_transit`` (d) is the size of each
    decoy set embedded by the pair preparer; ``decoy_count_direct`` (d') is
    the sender's fresh decoy set.
    """

    message_bits: str
    identity_alice: str
    identity_bob: str
    check_bit_count: int = 4
    decoy_count_transit: int = 4
    decoy_count_direct: int = 4
    message_bits_bob: str | None = None
    decoy_threshold: float = 0.1
    auth_threshold: float = 0.0
    check_threshold: float = 0.1

    def validate(self, protocol: str) -> None:
        if protocol not in PROTOCOLS:
            raise ConfigurationError(f"unknown protocol {protocol!r}")
        validate_bits(self.message_bits, "message")
        validate_bits(self.identity_alice, "identity_alice")
        validate_bits(self.identity_bob, "identity_bob")
        if len(self.identity_alice) % 2 or len(self.identity_bob) % 2:
            raise ConfigurationError("identities must have even length (2 bits per pair)")
        if self.check_bit_count < 0:
            raise ConfigurationError("check_bit_count must be >= 0")
        if self.decoy_count_transit < 0 or self.decoy_count_direct < 0:
            raise ConfigurationError("decoy counts must be >= 0")
        for name in ("decoy_threshold", "auth_threshold", "check_threshold"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigurationError(f"{name} must be in [0, 1], got {value}")
        if protocol in (PROTOCOL_QSDC, PROTOCOL_DSQC):
            if (len(self.message_bits) + self.check_bit_count) % 2:
                raise ConfigurationError(
                    "message length plus check bits must be even (two bits per pair)")
            if self.message_bits_bob is not None:
                raise ConfigurationError(
                    f"{protocol} is one-directional; message_bits_bob must be unset")
        else:
            if self.message_bits_bob is None:
                raise ConfigurationError("dialogue runs need message_bits_bob")
            validate_bits(self.message_bits_bob, "message_bits_bob")
            if len(self.message_bits_bob) != len(self.message_bits):
                raise ConfigurationError("dialogue messages must have equal length")


def verify_authentication(expected: list[BellLabel], announced: list[BellLabel],
                          threshold: float = 0.0) -> tuple[float, bool]:
    """Mismatch fraction between expected and announced Bell results, and
    whether it stays within the authentication threshold."""
    if len(expected) != len(announced):
        raise InvalidOperationError("authentication lists must have equal length")
    if not expected:
        return 0.0, True
    errors = sum(e != a for e, a in zip(expected, announced))
    fraction = errors / len(expected)
    return fraction, fraction <= threshold


def decoy_check(prepared: list[ProductQubit], covers: list[CoverOp] | None,
                outcomes: list[tuple[Basis, int]],
                threshold: float = 0.1) -> tuple[float, bool]:
    """Compare announced decoy outcomes against their expected states.

    ``covers`` may be None when no cover operations were applied. Outcomes
    must be reported in the effective (cover-adjusted) basis.
    """
    if covers is None:
        covers = [CoverOp.I] * len(prepared)
    if not len(prepared) == len(covers) == len(outcomes):
        raise InvalidOperationError("decoy lists must be aligned")
    if not prepared:
        return 0.0, True
    errors = 0
    for prep, cover, (basis, bit) in zip(prepared, covers, outcomes):
        expect = apply_cover_to_product(cover, prep)
        if basis is not expect.basis:
            raise InvalidOperationError(
                f"decoy measured in {basis.value} but effective basis is {expect.basis.value}")
        errors += bit != expect.bit
    fraction = errors / len(prepared)
    return fraction, fraction <= threshold


class _Aborted(Exception):
    """Internal unwind signal; never escapes the run functions."""


class _Run:
    def __init__(self, protocol: str, config: PartyConfig,
                 adversary: AdversaryStrategy | None,
                 channel: ChannelModel | None,
                 seed, choices: ChoiceSource | None, record: bool):
        config.validate(protocol)
        self.protocol = protocol
        self.config = config
        self.adversary = adversary or NoAdversary()
        self.channel = channel
        self.rng_measure = random.Random(f"{seed}/measure")
        self.rng_channel = random.Random(f"{seed}/channel")
        self.choices = choices if choices is not None else RandomChoices(
            random.Random(f"{seed}/choices"))
        self.register = Register()
        self.transcript = ProtocolTranscript(protocol) if record else None
        self.rec = Recorder(self.transcript)
        self.stages: list[StageResult] = []
        self.z_samples: list[bool] = []
        self.x_samples: list[bool] = []
        self.check_samples: list[bool] = []
        self.decoded_message: str | None = None
        self.decoded_message_bob: str | None = None
        self._validate_adversary()

    def _validate_adversary(self):
        adv = self.adversary
        if adv.impersonates_alice and self.protocol == PROTOCOL_QD:
            raise ConfigurationError(
                "sender impersonation is defined for the one-directional protocols only")
        if self.protocol == PROTOCOL_DSQC and adv.intercepts(CHANNEL_ALICE_TO_UTP):
            raise ConfigurationError(
                "intercept-resend on the sender->measurer channel is not supported "
                "for the cover-operation protocol: covered entangled qubits cannot "
                "be measured before uncovering")

    # -- actors ---------------------------------------------------------------

    @property
    def alice(self) -> str:
        return "eve" if self.adversary.impersonates_alice else "alice"

    @property
    def bob(self) -> str:
        return "eve" if self.adversary.impersonates_bob else "bob"

    # -- primitives -----------------------------------------------------------

    def transmit(self, step: str, seq_name: str, slots: list[int],
                 channel_name: str, to_holder: str) -> None:
        """Move slots across a channel: noise first, then any interceptor."""
        noise = []
        intercepted = self.adversary.intercepts(channel_name)
        for idx, sid in enumerate(slots):
            if self.channel is not None:
                err = apply_channel(self.register, sid, self.channel, self.rng_channel)
                if err is not PauliOp.I:
                    noise.append([idx, err.value])
            if intercepted:
                self.adversary.on_transit(self.register, sid, channel_name,
                                          self.rng_measure)
            self.register.slot(sid).holder = to_holder
        self.rec.event(step, "channel", KIND_SEND, {
            "sequence": seq_name, "channel": channel_name, "count": len(slots),
            "noise": noise, "intercepted": intercepted})

    def verdict(self, step: str, actor: str, stage: str, errors: int,
                samples: int, threshold: float, extra: dict | None = None) -> None:
        fraction = errors / samples if samples else 0.0
        passed = fraction <= threshold
        result = StageResult(stage, errors, samples, threshold, passed)
        self.stages.append(result)
        payload = {"stage": stage, "error_fraction": fraction,
                   "threshold": threshold, "samples": samples,
                   "verdict": "pass" if passed else "fail"}
        if extra:
            payload.update(extra)
        self.rec.event(step, actor, KIND_VERDICT, payload)
        if not passed:
            self._abort(stage, f"error fraction {fraction:.4f} exceeds {threshold}")

    def skipped_verdict(self, step: str, actor: str, stage: str) -> None:
        """An impersonator cannot perform the counterpart's verification and
        silently waves the stage through."""
        self.stages.append(StageResult(stage, 0, 0, 1.0, True))
        self.rec.event(step, actor, KIND_VERDICT, {
            "stage": stage, "verdict": "pass", "skipped_by_impersonator": True})

    def _abort(self, stage: str, reason: str):
        if self.transcript is not None:
            self.transcript.status = ABORTED
            self.transcript.abort_stage = stage
            self.transcript.abort_reason = reason
        raise _Aborted(stage, reason)

    def finish(self) -> tuple[ProtocolTranscript | None, SecurityReport]:
        status = COMPLETED
        abort_stage = None
        if self.transcript is not None:
            self.transcript.decoded_message = self.decoded_message
            self.transcript.decoded_message_bob = self.decoded_message_bob
            status = self.transcript.status
            abort_stage = self.transcript.abort_stage
        rates = estimate_rates(self.z_samples or None, self.x_samples or None,
                               self.check_samples or None,
                               estimator="decoys+check-bits")
        report = SecurityReport(self.protocol, status, abort_stage, self.stages,
                                rates, self.decoded_message, self.decoded_message_bob)
        return self.transcript, report

    def finish_aborted(self, stage: str, reason: str) -> tuple[ProtocolTranscript | None, SecurityReport]:
        rates = estimate_rates(self.z_samples or None, self.x_samples or None,
                               self.check_samples or None,
                               estimator="decoys+check-bits")
        report = SecurityReport(self.protocol, ABORTED, stage, self.stages, rates)
        return self.transcript, report

    def measure_decoy_set(self, step: str, stage: str, checker: str,
                          slots: list[int], prepared: list[ProductQubit],
                          covers: list[CoverOp] | None) -> None:
        """UTP measures a decoy set in effective bases and the checker party
        compares against expectations; aborts the run on excess error."""
        cover_list = covers if covers is not None else [CoverOp.I] * len(slots)
        outcomes = []
        for sid, prep, cover in zip(slots, prepared, cover_list):
            basis = effective_basis(prep.basis, cover)
            bit = self.register.measure_single(sid, basis, self.rng_measure)
            outcomes.append((basis, bit))
        self.rec.event(step, "utp", KIND_MEASURE, {
            "sequence": step, "outcomes": [[b.value, bit] for b, bit in outcomes]})
        errors = 0
        for prep, cover, (basis, bit) in zip(prepared, cover_list, outcomes):
            expect = apply_cover_to_product(cover, prep)
            mismatch = bit != expect.bit
            errors += mismatch
            (self.z_samples if prep.basis is Basis.Z else self.x_samples).append(mismatch)
        self.verdict(step + ":verdict", checker, stage, errors, len(prepared),
                     self.config.decoy_threshold)

    def bell_measure_series(self, step: str, pairs: list[tuple[int, int]]) -> list[BellLabel]:
        results = [self.register.measure_bell(a, b, self.rng_measure)
                   for a, b in pairs]
        self.rec.event(step, "utp", KIND_MEASURE,
                       {"labels": [r.value for r in results]})
        return results

    # -- shared structure helpers ---------------------------------------------

    @staticmethod
    def interleave(pattern: list[str], groups: dict[str, list[int]]) -> list[int]:
        iters = {tag: iter(slots) for tag, slots in groups.items()}
        return [next(iters[tag]) for tag in pattern]

    @staticmethod
    def positions_of(seq: list[int], members: list[int]) -> list[int]:
        index = {sid: i for i, sid in enumerate(seq)}
        return [index[sid] for sid in members]

    @staticmethod
    def insert_at(base: list[int], inserted: list[int], positions: list[int]) -> list[int]:
        total = len(base) + len(inserted)
        out: list[int | None] = [None] * total
        for pos, sid in zip(positions, inserted):
            out[pos] = sid
        it = iter(base)
        for i in range(total):
            if out[i] is None:
                out[i] = next(it)
        return out

"""Classical <-> quantum codecs shared by the three protocols.

Covers check-bit embedding, the 2-bits-per-Bell-pair encoding used for
messages and identities, and the 1-bit-per-pair dialogue encoding where the
receiver's bit selects the prepared pair class and the sender's bit selects
the Pauli class.
"""

from __future__ import annotations

from .quantum import (
    BellLabel,
    PauliOp,
    apply_pauli_to_bell,
    bell_from_xz,
    pauli_between_bells,
    pauli_from_xz,
)


class ConfigurationError(Exception):
    """A run configuration violates a protocol precondition."""


def validate_bits(s: str, what: str = "bit string") -> str:
    if any(ch not in "01" for ch in s):
        raise ConfigurationError(f"{what} must contain only 0/1, got {s!r}")
    return s


def insert_check_bits(message: str, values: str, positions: list[int]) -> str:
    """Embed check bits at the given positions of the final string.

    ``positions`` are 0-based indices into the result; the non-check
    positions carry ``message`` in order, so deleting ``positions`` recovers
    it exactly.
    """
    total = len(message) + len(values)
    if len(values) != len(positions):
        raise ConfigurationError("one check value required per check position")
    if sorted(set(positions)) != sorted(positions) or any(
            not 0 <= p < total for p in positions):
        raise ConfigurationError(f"check positions must be distinct and in [0, {total})")
    out: list[str | None] = [None] * total
    for pos, val in zip(positions, values):
        out[pos] = val
    it = iter(message)
    for i in range(total):
        if out[i] is None:
            out[i] = next(it)
    return "".join(out)


def remove_positions(bits: str, positions: list[int]) -> str:
    drop = set(positions)
    return "".join(b for i, b in enumerate(bits) if i not in drop)


def identity_to_bell(id_bits: str) -> list[BellLabel]:
    """Map an identity string to Bell labels, two bits per pair:
    00 -> Phi+, 01 -> Phi-, 10 -> Psi+, 11 -> Psi-."""
    validate_bits(id_bits, "identity")
    if len(id_bits) % 2:
        raise ConfigurationError("identity strings must have even length")
    return [bell_from_xz(int(id_bits[i]), int(id_bits[i + 1]))
            for i in range(0, len(id_bits), 2)]


def message_to_pauli(two_bits: str) -> PauliOp:
    """Encoding unitary for a 2-bit chunk: 00->I, 01->X, 10->iY, 11->Z."""
    if len(two_bits) != 2:
        raise ConfigurationError("message chunks are exactly two bits")
    validate_bits(two_bits, "message chunk")
    return _CHUNK_TO_PAULI[two_bits]


def pauli_to_message(p: PauliOp) -> str:
    return _PAULI_TO_CHUNK[p]


_CHUNK_TO_PAULI = {"00": PauliOp.I, "01": PauliOp.X, "10": PauliOp.Y, "11": PauliOp.Z}
_PAULI_TO_CHUNK = {v: k for k, v in _CHUNK_TO_PAULI.items()}


def decode_two_bits(initial: BellLabel, measured: BellLabel) -> str:
    """Invert the 2-bit encoding given the prepared and measured labels."""
    return pauli_to_message(pauli_between_bells(initial, measured))


def bell_to_identity(initials: list[BellLabel], measured: list[BellLabel]) -> str:
    return "".join(decode_two_bits(i, m) for i, m in zip(initials, measured))


# -- dialogue (1 bit per party per pair) -------------------------------------


def qd_prepare(bob_bit: int, rng) -> BellLabel:
    """Receiver-side pair choice: bit 0 -> {Phi+, Psi+}, bit 1 -> {Phi-, Psi-}."""
    return bell_from_xz(rng.randrange(2), bob_bit)


def qd_encode(alice_bit: int, rng) -> PauliOp:
    """Sender-side Pauli choice: bit 0 -> {I, Z}, bit 1 -> {X, iY}."""
    return pauli_from_xz(alice_bit, rng.randrange(2))


def qd_decode(initial: BellLabel, measured: BellLabel) -> tuple[int, int]:
    """(sender_bit, receiver_bit) from prepared and measured labels.

    The receiver's bit is the sign class of the prepared pair; the sender's
    bit is whether the Phi/Psi class flipped.
    """
    return initial.x ^ measured.x, initial.z


def qd_bob_bit_from_pauli(measured: BellLabel, alice_pauli: PauliOp) -> int:
    """Receiver bit as decoded by the sender, who knows only her own Pauli."""
    return apply_pauli_to_bell(alice_pauli, measured).z

"""Sources for every protocol-level random choice.

The engine never calls a bare RNG for protocol decisions; it asks a
ChoiceSource by stream name. ``RandomChoices`` draws from a seeded
``random.Random`` so a run is a pure function of (config, seed).
``ScriptedChoices`` replays fixed choices (used by the bundled reference
examples and by exact-enumeration tests) and can fall back to a random
source for streams it does not script.
"""

from __future__ import annotations

import random

from .quantum import (
    BELL_ORDER,
    COVER_ORDER,
    PAULI_ORDER,
    Basis,
    BellLabel,
    CoverOp,
    PauliOp,
    ProductQubit,
    bell_from_xz,
    pauli_from_xz,
)


class ScriptExhaustedError(Exception):
    """A scripted stream ran out of values or disagreed with the request."""


class ChoiceSource:
    def bits(self, name: str, count: int) -> str:
        raise NotImplementedError

    def positions(self, name: str, total: int, count: int) -> list[int]:
        """``count`` distinct sorted 0-based positions inside a sequence of
        length ``total`` (insertion positions refer to the final sequence)."""
        raise NotImplementedError

    def subset(self, name: str, total: int, count: int) -> list[int]:
        raise NotImplementedError

    def bell_label(self, name: str) -> BellLabel:
        raise NotImplementedError

    def pauli(self, name: str) -> PauliOp:
        raise NotImplementedError

    def cover(self, name: str) -> CoverOp:
        raise NotImplementedError

    def decoy(self, name: str) -> ProductQubit:
        raise NotImplementedError

    def pattern(self, name: str, counts: dict[str, int]) -> list[str]:
        """Interleaving pattern: a shuffled multiset of the group tags,
        preserving nothing but the per-group counts."""
        raise NotImplementedError

    def qd_label_for_bit(self, name: str, bit: int) -> BellLabel:
        raise NotImplementedError

    def qd_pauli_for_bit(self, name: str, bit: int) -> PauliOp:
        raise NotImplementedError


class RandomChoices(ChoiceSource):
    def __init__(self, rng: random.Random):
        self.rng = rng

    def bits(self, name, count):
        return "".join(str(self.rng.randrange(2)) for _ in range(count))

    def positions(self, name, total, count):
        return sorted(self.rng.sample(range(total), count))

    def subset(self, name, total, count):
        return sorted(self.rng.sample(range(total), count))

    def bell_label(self, name):
        return BELL_ORDER[self.rng.randrange(4)]

    def pauli(self, name):
        return PAULI_ORDER[self.rng.randrange(4)]

    def cover(self, name):
        return COVER_ORDER[self.rng.randrange(4)]

    def decoy(self, name):
        return ProductQubit(Basis.Z if self.rng.randrange(2) == 0 else Basis.X,
                            self.rng.randrange(2))

    def pattern(self, name, counts):
        tags = [tag for tag, n in counts.items() for _ in range(n)]
        self.rng.shuffle(tags)
        return tags

    def qd_label_for_bit(self, name, bit):
        return bell_from_xz(self.rng.randrange(2), bit)

    def qd_pauli_for_bit(self, name, bit):
        return pauli_from_xz(bit, self.rng.randrange(2))


class ScriptedChoices(ChoiceSource):
    """Replays per-stream lists of pre-recorded choices.

    ``streams`` maps stream name to a list consumed front to back. Streams
    not present delegate to ``fallback`` (if any); exhausting a scripted
    stream raises, so a script mismatch is loud. Scripted dialogue choices
    are validated against the message bit they are supposed to encode.
    """

    def __init__(self, streams: dict[str, list], fallback: ChoiceSource | None = None):
        self._streams = {k: list(v) for k, v in streams.items()}
        self._fallback = fallback

    def _take(self, name: str, fallback_call):
        if name in self._streams:
            stream = self._streams[name]
            if not stream:
                raise ScriptExhaustedError(f"scripted stream {name!r} is exhausted")
            return stream.pop(0)
        if self._fallback is not None:
            return fallback_call()
        raise ScriptExhaustedError(f"no scripted stream {name!r} and no fallback")

    def bits(self, name, count):
        value = self._take(name, lambda: None)
        if value is None:
            return self._fallback.bits(name, count)
        if len(value) != count:
            raise ScriptExhaustedError(
                f"stream {name!r}: scripted {value!r} is not {count} bits")
        return value

    def positions(self, name, total, count):
        value = self._take(name, lambda: None)
        if value is None:
            return self._fallback.positions(name, total, count)
        if len(value) != count or any(not 0 <= p < total for p in value):
            raise ScriptExhaustedError(
                f"stream {name!r}: positions {value} invalid for total={total}, count={count}")
        return list(value)

    subset = positions

    def bell_label(self, name):
        return self._take(name, lambda: self._fallback.bell_label(name))

    def pauli(self, name):
        return self._take(name, lambda: self._fallback.pauli(name))

    def cover(self, name):
        return self._take(name, lambda: self._fallback.cover(name))

    def decoy(self, name):
        return self._take(name, lambda: self._fallback.decoy(name))

    def pattern(self, name, counts):
        value = self._take(name, lambda: None)
        if value is None:
            return self._fallback.pattern(name, counts)
        got = {tag: value.count(tag) for tag in counts}
        if got != counts or len(value) != sum(counts.values()):
            raise ScriptExhaustedError(
                f"stream {name!r}: pattern {value} does not match counts {counts}")
        return list(value)

    def qd_label_for_bit(self, name, bit):
        label = self._take(name, lambda: self._fallback.qd_label_for_bit(name, bit))
        if label.z != bit:
            raise ScriptExhaustedError(
                f"stream {name!r}: scripted label {label} does not encode bit {bit}")
        return label

    def qd_pauli_for_bit(self, name, bit):
        p = self._take(name, lambda: self._fallback.qd_pauli_for_bit(name, bit))
        if p.x != bit:
            raise ScriptExhaustedError(
                f"stream {name!r}: scripted Pauli {p} does not encode bit {bit}")
        return p

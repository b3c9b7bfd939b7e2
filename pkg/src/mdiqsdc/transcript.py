"""Protocol transcripts: ordered event records and their serialization.

One event per record with stable fields ``seq``, ``step``, ``actor``,
``kind`` and ``payload``. Events are appended strictly in protocol order and
an aborted transcript contains no events after its aborting verdict.
Positions inside payloads are 0-based; rendering can shift them to 1-based
for display.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

COMPLETED = "completed"
ABORTED = "aborted"

# Event kinds. "decode" and "final" extend the announcement/measurement
# vocabulary with local computations and the closing summary record.
KIND_PREPARE = "prepare"
KIND_SEND = "send"
KIND_ANNOUNCE_POSITIONS = "announce-positions"
KIND_ANNOUNCE_BASES = "announce-bases"
KIND_ANNOUNCE_COVERS = "announce-cover-ops"
KIND_MEASURE = "measure"
KIND_VERDICT = "verdict"
KIND_DECODE = "decode"
KIND_FINAL = "final"

_POSITION_KEYS = ("positions", "check_positions", "message_indices",
                  "carrier_indices", "identity_positions")


@dataclass
class ProtocolTranscript:
    """Ordered record of one protocol run."""

    protocol: str
    events: list[dict] = field(default_factory=list)
    status: str = COMPLETED
    abort_stage: str | None = None
    abort_reason: str | None = None
    decoded_message: str | None = None
    decoded_message_bob: str | None = None

    def to_jsonl(self) -> str:
        lines = [json.dumps(e, sort_keys=True, separators=(",", ":"))
                 for e in self.events]
        final = {
            "seq": len(self.events),
            "step": "final",
            "actor": "run",
            "kind": KIND_FINAL,
            "payload": {
                "protocol": self.protocol,
                "status": self.status,
                "abort_stage": self.abort_stage,
                "abort_reason": self.abort_reason,
                "decoded_message": self.decoded_message,
                "decoded_message_bob": self.decoded_message_bob,
            },
        }
        lines.append(json.dumps(final, sort_keys=True, separators=(",", ":")))
        return "\n".join(lines) + "\n"

    def render_lines(self, one_based: bool = True) -> list[str]:
        """Human-readable rendering; positions shown 1-based by default."""
        out = []
        for e in self.events:
            payload = dict(e["payload"])
            if one_based:
                for key in _POSITION_KEYS:
                    if key in payload and isinstance(payload[key], list):
                        payload[key] = [p + 1 for p in payload[key]]
            out.append(f"[{e['seq']:03d}] {e['step']:<28} {e['actor']:<6} "
                       f"{e['kind']:<20} {json.dumps(payload, sort_keys=True)}")
        out.append(f"status: {self.status}"
                   + (f" (stage={self.abort_stage}: {self.abort_reason})"
                      if self.status == ABORTED else ""))
        if self.decoded_message is not None:
            out.append(f"decoded: {self.decoded_message}")
        if self.decoded_message_bob is not None:
            out.append(f"decoded (receiver->sender): {self.decoded_message_bob}")
        return out


class Recorder:
    """Appends events to a transcript; a disabled recorder drops them.

    Recording never consumes randomness, so enabling or disabling it cannot
    change a run's outcome.
    """

    def __init__(self, transcript: ProtocolTranscript | None):
        self.transcript = transcript

    @property
    def enabled(self) -> bool:
        return self.transcript is not None

    def event(self, step: str, actor: str, kind: str, payload: dict) -> None:
        if self.transcript is not None:
            self.transcript.events.append({
                "seq": len(self.transcript.events),
                "step": step,
                "actor": actor,
                "kind": kind,
                "payload": payload,
            })

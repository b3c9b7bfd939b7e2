"""Symbolic two-qubit quantum semantics for Bell-pair protocols.

Everything here works modulo global phase, which no protocol observable
depends on. States are kept pure-symbolic:

* an entangled pair is a :class:`BellLabel` (one of the four Bell states),
* a single qubit is a :class:`ProductQubit` (a Z- or X-basis eigenstate),
* Pauli operators act on Bell labels by XOR in the symplectic (x, z)
  encoding Phi+ = (0,0), Psi+ = (1,0), Phi- = (0,1), Psi- = (1,1),
* cover operations {I, iY, H, iY*H} form a Klein four-group mod phase.

The measurement rules in :class:`Register` are validated exactly against
the dense-amplitude oracle in :mod:`mdiqsdc.oracle` by the test suite.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum


class InvalidOperationError(Exception):
    """An operation was applied to a slot in a state that forbids it."""


class Basis(str, Enum):
    Z = "Z"
    X = "X"

    def flipped(self) -> "Basis":
        return Basis.X if self is Basis.Z else Basis.Z


class BellLabel(str, Enum):
    """Phase-free label of one of the four Bell states.

    Serialization order (PHI_PLUS, PHI_MINUS, PSI_PLUS, PSI_MINUS) is the
    canonical total order used everywhere deterministic output is needed.
    """

    PHI_PLUS = "phi+"
    PHI_MINUS = "phi-"
    PSI_PLUS = "psi+"
    PSI_MINUS = "psi-"

    @property
    def x(self) -> int:
        """1 iff the halves are anti-correlated in the Z basis (Psi class)."""
        return _BELL_XZ[self][0]

    @property
    def z(self) -> int:
        """1 iff the halves are anti-correlated in the X basis (minus sign)."""
        return _BELL_XZ[self][1]


class PauliOp(str, Enum):
    """Pauli operator modulo global phase; Y stands for iY (= XZ mod phase)."""

    I = "I"
    X = "X"
    Y = "Y"
    Z = "Z"

    @property
    def x(self) -> int:
        return _PAULI_XZ[self][0]

    @property
    def z(self) -> int:
        return _PAULI_XZ[self][1]


class CoverOp(str, Enum):
    """Cover operation used to hide a qubit in transit: I, iY, H or iY*H.

    ``YH`` means "H first, then iY". Modulo global phase these four commute
    and are self-inverse, so composition is componentwise XOR on the
    (flips_bit, flips_basis) = (y, h) encoding.
    """

    I = "I"
    Y = "Y"
    H = "H"
    YH = "YH"

    @property
    def y(self) -> int:
        return _COVER_YH[self][0]

    @property
    def h(self) -> int:
        return _COVER_YH[self][1]


_BELL_XZ = {
    BellLabel.PHI_PLUS: (0, 0),
    BellLabel.PSI_PLUS: (1, 0),
    BellLabel.PHI_MINUS: (0, 1),
    BellLabel.PSI_MINUS: (1, 1),
}
_BELL_FROM_XZ = {v: k for k, v in _BELL_XZ.items()}

_PAULI_XZ = {
    PauliOp.I: (0, 0),
    PauliOp.X: (1, 0),
    PauliOp.Z: (0, 1),
    PauliOp.Y: (1, 1),
}
_PAULI_FROM_XZ = {v: k for k, v in _PAULI_XZ.items()}

_COVER_YH = {
    CoverOp.I: (0, 0),
    CoverOp.Y: (1, 0),
    CoverOp.H: (0, 1),
    CoverOp.YH: (1, 1),
}
_COVER_FROM_YH = {v: k for k, v in _COVER_YH.items()}

BELL_ORDER = (BellLabel.PHI_PLUS, BellLabel.PHI_MINUS, BellLabel.PSI_PLUS, BellLabel.PSI_MINUS)
PAULI_ORDER = (PauliOp.I, PauliOp.X, PauliOp.Y, PauliOp.Z)
COVER_ORDER = (CoverOp.I, CoverOp.Y, CoverOp.H, CoverOp.YH)


@dataclass(frozen=True)
class ProductQubit:
    """A single qubit in a Z- or X-basis eigenstate, phase discarded.

    (Z,0) = |0>, (Z,1) = |1>, (X,0) = |+>, (X,1) = |->.
    """

    basis: Basis
    bit: int

    def token(self) -> list:
        return [self.basis.value, self.bit]


def pauli_from_xz(x: int, z: int) -> PauliOp:
    return _PAULI_FROM_XZ[(x & 1, z & 1)]


def bell_from_xz(x: int, z: int) -> BellLabel:
    return _BELL_FROM_XZ[(x & 1, z & 1)]


def compose_pauli(p: PauliOp, q: PauliOp) -> PauliOp:
    """Product p*q modulo global phase (commutative, self-inverse elements)."""
    return pauli_from_xz(p.x ^ q.x, p.z ^ q.z)


def apply_pauli_to_bell(p: PauliOp, label: BellLabel) -> BellLabel:
    """Bell label after applying p to either half of the pair.

    Side-independent modulo phase: X swaps Phi+/Psi+ and Phi-/Psi-,
    Y swaps Phi+/Psi- and Phi-/Psi+, Z swaps +/- within each class.
    """
    return bell_from_xz(label.x ^ p.x, label.z ^ p.z)


def pauli_between_bells(initial: BellLabel, final: BellLabel) -> PauliOp:
    """The unique Pauli p with apply_pauli_to_bell(p, initial) == final."""
    return pauli_from_xz(initial.x ^ final.x, initial.z ^ final.z)


def apply_pauli_to_product(p: PauliOp, q: ProductQubit) -> ProductQubit:
    """Pauli action on a basis eigenstate, phase discarded.

    X flips the bit of Z-basis states, Z flips the bit of X-basis states,
    Y flips both kinds.
    """
    flip = p.x if q.basis is Basis.Z else p.z
    return ProductQubit(q.basis, q.bit ^ flip)


def compose_cover(c: CoverOp, d: CoverOp) -> CoverOp:
    """Cover op equal to applying d first and then c, modulo phase."""
    return _COVER_FROM_YH[(c.y ^ d.y, c.h ^ d.h)]


def inverse_cover(c: CoverOp) -> CoverOp:
    """Every cover op is its own inverse modulo global phase."""
    return c


def apply_cover_to_product(c: CoverOp, q: ProductQubit) -> ProductQubit:
    """Cover action on a basis eigenstate: H swaps the basis tag keeping the
    bit, iY flips the bit within either basis; YH applies H then iY."""
    basis = q.basis.flipped() if c.h else q.basis
    return ProductQubit(basis, q.bit ^ c.y)


def effective_basis(prep_basis: Basis, c: CoverOp) -> Basis:
    """Basis in which a covered qubit must be measured to read it back."""
    return prep_basis.flipped() if c.h else prep_basis


def conjugate_pauli_by_cover(p: PauliOp, c: CoverOp) -> PauliOp:
    """Pauli seen in the uncovered frame when p hits a covered qubit.

    Conjugation by H swaps the X and Z components; conjugation by iY is the
    identity modulo phase.
    """
    if c.h:
        return pauli_from_xz(p.z, p.x)
    return p


# ---------------------------------------------------------------------------
# Register: slots, pairs and measurement rules
# ---------------------------------------------------------------------------


class Role(str, Enum):
    MESSAGE = "message"
    IDENTITY = "identity"
    DECOY = "decoy"
    CHECK_CARRIER = "check-carrier"


@dataclass
class PairState:
    pair_id: int
    label: BellLabel
    slots: tuple[int, int]
    alive: bool = True


class QubitSlot:
    """A position in a party's sequence holding one qubit.

    ``role`` and ``position`` are bookkeeping only and never influence the
    quantum semantics. ``pending_cover`` holds a basis-changing cover op that
    cannot be folded into a Bell label; such a slot must be uncovered before
    it can be measured.
    """

    __slots__ = ("slot_id", "holder", "role", "position", "pair_id", "product",
                 "pending_cover", "measured")

    def __init__(self, slot_id: int, holder: str, role: Role, position: int,
                 pair_id: int | None, product: ProductQubit | None):
        self.slot_id = slot_id
        self.holder = holder
        self.role = role
        self.position = position
        self.pair_id = pair_id
        self.product = product
        self.pending_cover: CoverOp | None = None
        self.measured = False

    @property
    def is_pair_half(self) -> bool:
        return self.pair_id is not None


class _ForcedRng:
    """Deterministic stand-in for a Random that always picks branch k."""

    def __init__(self, k: int):
        self.k = k

    def randrange(self, n: int) -> int:
        if not 0 <= self.k < n:
            raise ValueError(f"forced branch {self.k} out of range({n})")
        return self.k


class Register:
    """Owner of all qubit slots and pair states for one protocol run.

    Single-owner and mutated sequentially; independent runs use independent
    registers.
    """

    def __init__(self):
        self._slots: dict[int, QubitSlot] = {}
        self._pairs: dict[int, PairState] = {}
        self._next_slot = 0
        self._next_pair = 0

    # -- construction -------------------------------------------------------

    def new_pair(self, label: BellLabel, holder_a: str, holder_b: str,
                 role: Role, position: int = 0) -> tuple[int, int]:
        pid = self._next_pair
        self._next_pair += 1
        a = self._new_slot(holder_a, role, position, pair_id=pid)
        b = self._new_slot(holder_b, role, position, pair_id=pid)
        self._pairs[pid] = PairState(pid, label, (a, b))
        return a, b

    def new_product(self, q: ProductQubit, holder: str, role: Role,
                    position: int = 0) -> int:
        return self._new_slot(holder, role, position, product=q)

    def _new_slot(self, holder, role, position, pair_id=None, product=None) -> int:
        sid = self._next_slot
        self._next_slot += 1
        self._slots[sid] = QubitSlot(sid, holder, role, position, pair_id, product)
        return sid

    # -- inspection ---------------------------------------------------------

    def slot(self, sid: int) -> QubitSlot:
        return self._slots[sid]

    def pair(self, pid: int) -> PairState:
        return self._pairs[pid]

    def pair_label(self, sid: int) -> BellLabel:
        return self._pairs[self._slots[sid].pair_id].label

    def partner(self, sid: int) -> int:
        pair = self._pairs[self._slots[sid].pair_id]
        a, b = pair.slots
        return b if sid == a else a

    def fork(self) -> "Register":
        """Independent copy, used by tests to enumerate measurement branches."""
        other = Register.__new__(Register)
        other._next_slot = self._next_slot
        other._next_pair = self._next_pair
        other._slots = {}
        for sid, s in self._slots.items():
            c = QubitSlot(s.slot_id, s.holder, s.role, s.position, s.pair_id, s.product)
            c.pending_cover = s.pending_cover
            c.measured = s.measured
            other._slots[sid] = c
        other._pairs = {pid: PairState(p.pair_id, p.label, p.slots, p.alive)
                        for pid, p in self._pairs.items()}
        return other

    # -- unitary actions ----------------------------------------------------

    def apply_pauli(self, sid: int, p: PauliOp) -> None:
        slot = self._require_unmeasured(sid)
        if slot.is_pair_half:
            eff = p
            if slot.pending_cover is not None:
                eff = conjugate_pauli_by_cover(p, slot.pending_cover)
            pair = self._pairs[slot.pair_id]
            pair.label = apply_pauli_to_bell(eff, pair.label)
        else:
            slot.product = apply_pauli_to_product(p, slot.product)

    def apply_cover(self, sid: int, c: CoverOp) -> None:
        slot = self._require_unmeasured(sid)
        if not slot.is_pair_half:
            slot.product = apply_cover_to_product(c, slot.product)
            return
        combined = compose_cover(c, slot.pending_cover or CoverOp.I)
        if combined.h:
            slot.pending_cover = combined
        else:
            slot.pending_cover = None
            if combined.y:
                pair = self._pairs[slot.pair_id]
                pair.label = apply_pauli_to_bell(PauliOp.Y, pair.label)

    def resend_as_product(self, sid: int, q: ProductQubit) -> None:
        """Re-arm a measured slot with a freshly prepared product qubit.

        Models an interceptor forwarding a substitute qubit in the same
        transit position.
        """
        slot = self._slots[sid]
        slot.pair_id = None
        slot.product = q
        slot.pending_cover = None
        slot.measured = False

    # -- measurement branch tables ------------------------------------------
    #
    # Each measurement resolves to a list of equally likely branches; the
    # samplers below draw exactly one randrange(len(branches)). Branch lists
    # are exposed so tests can enumerate them against the exact oracle.

    def single_branches(self, sid: int, basis: Basis) -> list[int]:
        """Possible outcomes of measure_single, each with probability 1/len."""
        slot = self._require_measurable(sid)
        if not slot.is_pair_half:
            if slot.product.basis is basis:
                return [slot.product.bit]
            return [0, 1]
        return [0, 1]

    def bell_branches(self, sid_a: int, sid_b: int) -> list[BellLabel]:
        """Possible outcomes of measure_bell, each with probability 1/len."""
        if sid_a == sid_b:
            raise InvalidOperationError("Bell measurement needs two distinct slots")
        a = self._require_measurable(sid_a)
        b = self._require_measurable(sid_b)
        if a.is_pair_half and b.is_pair_half and a.pair_id == b.pair_id:
            return [self._pairs[a.pair_id].label]
        if not a.is_pair_half and not b.is_pair_half:
            qa, qb = a.product, b.product
            if qa.basis is Basis.Z and qb.basis is Basis.Z:
                x = qa.bit ^ qb.bit
                return [bell_from_xz(x, 0), bell_from_xz(x, 1)]
            if qa.basis is Basis.X and qb.basis is Basis.X:
                z = qa.bit ^ qb.bit
                return [bell_from_xz(0, z), bell_from_xz(1, z)]
            return list(BELL_ORDER)
        # At least one maximally mixed pair half: all four outcomes equal.
        return list(BELL_ORDER)

    # -- measurements --------------------------------------------------------

    def measure_single(self, sid: int, basis: Basis, rng) -> int:
        """Measure one slot in the Z or X basis and collapse accordingly.

        A product qubit read in its own basis is deterministic; in the other
        basis the outcome is a fair coin and the slot is re-tagged. Measuring
        half of an alive pair gives a fair coin and collapses the partner to
        the correlated/anti-correlated eigenstate of the same basis.
        """
        branches = self.single_branches(sid, basis)
        outcome = branches[0] if len(branches) == 1 else branches[rng.randrange(len(branches))]
        slot = self._slots[sid]
        if slot.is_pair_half:
            anti = self._anti_correlation(self._pairs[slot.pair_id].label, basis)
            self._collapse_partner(sid, ProductQubit(basis, outcome ^ anti))
        slot.product = ProductQubit(basis, outcome)
        slot.pair_id = None
        slot.measured = True
        return outcome

    def measure_bell(self, sid_a: int, sid_b: int, rng) -> BellLabel:
        """Joint Bell-basis measurement of two slots.

        Deterministic on the two halves of one alive pair. On two product
        qubits the outcome is uniform over the 2 or 4 labels consistent with
        the inputs. On halves of two different pairs (entanglement swapping)
        the outcome is uniform over all four labels and the partner slots
        collapse into a pair whose label is the XOR of the two input labels
        and the outcome. On a pair half and a product qubit the outcome is
        uniform over all four labels and the partner collapses to the product
        qubit shifted by the Pauli connecting input label and outcome.
        """
        branches = self.bell_branches(sid_a, sid_b)
        outcome = branches[0] if len(branches) == 1 else branches[rng.randrange(len(branches))]
        a, b = self._slots[sid_a], self._slots[sid_b]
        if a.is_pair_half and b.is_pair_half and a.pair_id != b.pair_id:
            la = self._pairs[a.pair_id].label
            lb = self._pairs[b.pair_id].label
            swapped = bell_from_xz(la.x ^ lb.x ^ outcome.x, la.z ^ lb.z ^ outcome.z)
            pa, pb = self.partner(sid_a), self.partner(sid_b)
            self._kill_pair(a.pair_id)
            self._kill_pair(b.pair_id)
            pid = self._next_pair
            self._next_pair += 1
            self._pairs[pid] = PairState(pid, swapped, (pa, pb))
            self._slots[pa].pair_id = pid
            self._slots[pb].pair_id = pid
        elif a.is_pair_half != b.is_pair_half:
            half, prod = (a, b) if a.is_pair_half else (b, a)
            shift = pauli_between_bells(self._pairs[half.pair_id].label, outcome)
            self._collapse_partner(half.slot_id,
                                   apply_pauli_to_product(shift, prod.product))
        elif a.is_pair_half:  # same pair
            self._pairs[a.pair_id].alive = False
        for slot in (a, b):
            slot.pair_id = None
            slot.product = None
            slot.measured = True
        return outcome

    # -- internals -----------------------------------------------------------

    @staticmethod
    def _anti_correlation(label: BellLabel, basis: Basis) -> int:
        return label.x if basis is Basis.Z else label.z

    def _collapse_partner(self, sid: int, base: ProductQubit) -> None:
        partner = self._slots[self.partner(sid)]
        if partner.pending_cover is not None:
            base = apply_cover_to_product(partner.pending_cover, base)
            partner.pending_cover = None
        self._kill_pair(partner.pair_id)
        partner.pair_id = None
        partner.product = base

    def _kill_pair(self, pid: int) -> None:
        self._pairs[pid].alive = False

    def _require_unmeasured(self, sid: int) -> QubitSlot:
        slot = self._slots[sid]
        if slot.measured:
            raise InvalidOperationError(f"slot {sid} is already measured")
        return slot

    def _require_measurable(self, sid: int) -> QubitSlot:
        slot = self._require_unmeasured(sid)
        if slot.pending_cover is not None:
            raise InvalidOperationError(
                f"slot {sid} carries an unresolved basis-changing cover; "
                "it must be uncovered before measurement")
        return slot


def forced_branch_rng(k: int) -> _ForcedRng:
    """Rng stub that deterministically selects measurement branch k."""
    return _ForcedRng(k)


def all_product_qubits() -> list[ProductQubit]:
    """The four Z/X eigenstates, in deterministic order."""
    return [ProductQubit(b, v) for b, v in
            itertools.product((Basis.Z, Basis.X), (0, 1))]

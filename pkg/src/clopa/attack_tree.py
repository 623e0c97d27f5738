"""Attack trees over independent basic events.

A tree combines basic attack events (each with an independent success
probability) through AND/OR gates; the root probability feeds the
security posture of a scenario. The same basic event may appear under
several gates, which makes subtree results dependent, so the evaluator
conditions on the shared events instead of multiplying subtree
probabilities blindly. A brute-force truth-table evaluator is kept as an
independent cross-check.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping

from .model import AttackerSource, ClopaError, Probability, Rate

# Full enumeration walks 2**k truth assignments; beyond this it is not a
# practical oracle and the caller gets a typed error instead of a hang.
MAX_ENUMERATION_EVENTS = 24

LEAF = "leaf"
AND = "and"
OR = "or"


class TreeStructureError(ClopaError):
    code = "TREE_STRUCTURE"


class UnresolvedLeafError(ClopaError):
    code = "UNRESOLVED_LEAF"


class CycleDetectedError(ClopaError):
    code = "CYCLE_DETECTED"


class TooManyEventsError(ClopaError):
    code = "TOO_MANY_EVENTS"


@dataclass(frozen=True)
class BasicEvent:
    """A basic attack event with an independent success probability."""

    id: str
    probability: Probability
    description: str = ""

    def __post_init__(self):
        if not self.id:
            raise TreeStructureError("basic event id must be nonempty")
        object.__setattr__(self, "probability", Probability.of(self.probability))


@dataclass(frozen=True)
class AttackNode:
    """A node of an attack tree: a basic-event leaf or an AND/OR gate."""

    gate: str
    event_id: str | None = None
    children: tuple["AttackNode", ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if self.gate == LEAF:
            if not self.event_id:
                raise TreeStructureError("leaf node requires an event id")
            if self.children:
                raise TreeStructureError("leaf node cannot have children")
        elif self.gate in (AND, OR):
            if self.event_id is not None:
                raise TreeStructureError("gate node cannot name an event")
            if len(self.children) == 0:
                raise TreeStructureError(f"{self.gate} gate requires children")
        else:
            raise TreeStructureError(f"unknown gate kind {self.gate!r}")


def leaf(event_id: str) -> AttackNode:
    return AttackNode(gate=LEAF, event_id=event_id)


def gate_and(*children: AttackNode) -> AttackNode:
    return AttackNode(gate=AND, children=children)


def gate_or(*children: AttackNode) -> AttackNode:
    return AttackNode(gate=OR, children=children)


@dataclass(frozen=True)
class AttackTree:
    """A named attack tree plus the basic-event table it draws from."""

    name: str
    root: AttackNode
    events: tuple[BasicEvent, ...]

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        ids = [e.id for e in self.events]
        dup = [i for i, n in Counter(ids).items() if n > 1]
        if dup:
            raise TreeStructureError(f"duplicate basic event ids: {sorted(dup)}")

    def event_map(self) -> dict[str, float]:
        return {e.id: float(e.probability) for e in self.events}


def referenced_event_ids(node: AttackNode) -> list[str]:
    """All event ids under a node, in first-appearance order."""
    seen: dict[str, None] = {}
    _walk_leaves(node, (), seen)
    return list(seen)


def _walk_leaves(node: AttackNode, path: tuple[int, ...], seen: dict[str, None]) -> None:
    # path is the set of node object ids from root to here; immutable
    # construction cannot make a cycle, but a hand-built graph could.
    ident = id(node)
    if ident in path:
        raise CycleDetectedError("attack tree contains a cycle")
    if node.gate == LEAF:
        seen.setdefault(node.event_id, None)
        return
    child_path = path + (ident,)
    for child in node.children:
        _walk_leaves(child, child_path, seen)


def _leaf_counts(node: AttackNode, counts: Counter) -> None:
    if node.gate == LEAF:
        counts[node.event_id] += 1
        return
    for child in node.children:
        _leaf_counts(child, counts)


def _closed_form(node: AttackNode, probs: Mapping[str, float]) -> float:
    """Independent-subtree recursion; exact only when no event repeats."""
    if node.gate == LEAF:
        return probs[node.event_id]
    if node.gate == AND:
        out = 1.0
        for child in node.children:
            out *= _closed_form(child, probs)
        return out
    miss = 1.0
    for child in node.children:
        miss *= 1.0 - _closed_form(child, probs)
    return 1.0 - miss


def _resolve_probs(tree: AttackTree) -> dict[str, float]:
    probs = tree.event_map()
    missing = [i for i in referenced_event_ids(tree.root) if i not in probs]
    if missing:
        raise UnresolvedLeafError(
            f"leaf events not in the basic event table: {sorted(missing)}"
        )
    return probs


def eval_tree(tree: AttackTree) -> Probability:
    """Exact root success probability of an attack tree.

    Basic events are independent, but an event referenced by more than
    one leaf correlates the gates above it. The evaluator conditions on
    every truth assignment of the shared events (2**s terms for s shared
    events) and uses the closed-form gate recursion for the rest, which
    is exact once no remaining event repeats.

    Raises:
        UnresolvedLeafError: A leaf references an unknown event id.
        CycleDetectedError: The node graph loops back on itself.
    """
    probs = _resolve_probs(tree)
    counts: Counter = Counter()
    _leaf_counts(tree.root, counts)
    shared = sorted(i for i, n in counts.items() if n > 1)
    if not shared:
        return Probability(_closed_form(tree.root, probs))
    if len(shared) > MAX_ENUMERATION_EVENTS:
        raise TooManyEventsError(
            f"{len(shared)} shared events exceed the conditioning limit of "
            f"{MAX_ENUMERATION_EVENTS}"
        )

    total = 0.0
    for bits in itertools.product((0.0, 1.0), repeat=len(shared)):
        weight = 1.0
        pinned = dict(probs)
        for event_id, bit in zip(shared, bits):
            weight *= probs[event_id] if bit else 1.0 - probs[event_id]
            pinned[event_id] = bit
        if weight == 0.0:
            continue
        total += weight * _closed_form(tree.root, pinned)
    # Conditioning sums exact products; clamp the last-ulp drift only.
    return Probability(min(1.0, max(0.0, total)))


def eval_tree_by_enumeration(tree: AttackTree) -> Probability:
    """Root probability by full truth-table enumeration.

    Walks every assignment of the referenced events and sums the weight
    of the ones that satisfy the root, evaluating gates as booleans. It
    is deliberately independent of the closed-form path so the two can
    cross-check each other.

    Raises:
        TooManyEventsError: More than MAX_ENUMERATION_EVENTS distinct
            events are referenced.
    """
    probs = _resolve_probs(tree)
    ids = referenced_event_ids(tree.root)
    if len(ids) > MAX_ENUMERATION_EVENTS:
        raise TooManyEventsError(
            f"{len(ids)} events exceed the enumeration limit of "
            f"{MAX_ENUMERATION_EVENTS}"
        )

    def satisfied(node: AttackNode, state: dict[str, bool]) -> bool:
        if node.gate == LEAF:
            return state[node.event_id]
        if node.gate == AND:
            return all(satisfied(c, state) for c in node.children)
        return any(satisfied(c, state) for c in node.children)

    total = 0.0
    for bits in itertools.product((False, True), repeat=len(ids)):
        state = dict(zip(ids, bits))
        weight = 1.0
        for event_id, bit in state.items():
            weight *= probs[event_id] if bit else 1.0 - probs[event_id]
        if weight and satisfied(tree.root, state):
            total += weight
    return Probability(min(1.0, max(0.0, total)))


def aggregate_attack_rate(sources: Iterable[AttackerSource]) -> Rate:
    """Aggregated cyberattack-initiated upset rate over adversary classes.

    Each class attempts at its own rate and succeeds with its own
    probability; the aggregate is the sum of attempts * success over all
    classes.
    """
    return Rate(
        sum(
            float(s.attempts_per_year) * float(s.success_probability)
            for s in sources
        )
    )

"""Attack tree evaluation against brute-force truth-table enumeration.

The closed-form evaluator conditions on shared-event assignments, so it
must agree with full enumeration to float precision on any tree whose
leaves repeat events. The two packaged trees are pinned to their exact
evaluated values.
"""

from __future__ import annotations

import math
import random

import pytest

from clopa import (
    AttackerSource,
    AttackTree,
    BasicEvent,
    aggregate_attack_rate,
    eval_tree,
    eval_tree_by_enumeration,
    fixture_path,
    gate_and,
    gate_or,
    leaf,
    load_attack_tree,
    referenced_event_ids,
)
from clopa.attack_tree import (
    MAX_ENUMERATION_EVENTS,
    CycleDetectedError,
    TooManyEventsError,
    TreeStructureError,
    UnresolvedLeafError,
)

from conftest import random_attack_tree

BPCS_TREE_VALUE = 0.03344896875
SIS_TREE_VALUE = 0.28125


def _events(**probs: float) -> tuple[BasicEvent, ...]:
    return tuple(BasicEvent(id=k, probability=v) for k, v in probs.items())


class TestStructure:
    def test_leaf_requires_event_id(self):
        with pytest.raises(TreeStructureError):
            leaf("")

    def test_gate_requires_children(self):
        with pytest.raises(TreeStructureError):
            gate_and()

    def test_duplicate_event_ids_rejected(self):
        events = (BasicEvent(id="a", probability=0.5), BasicEvent(id="a", probability=0.2))
        with pytest.raises(TreeStructureError):
            AttackTree(name="t", root=leaf("a"), events=events)

    def test_referenced_ids_in_first_appearance_order(self):
        root = gate_or(leaf("b"), gate_and(leaf("a"), leaf("b")), leaf("c"))
        assert referenced_event_ids(root) == ["b", "a", "c"]


class TestClosedForms:
    def test_single_leaf(self):
        tree = AttackTree(name="t", root=leaf("a"), events=_events(a=0.3))
        assert float(eval_tree(tree)) == 0.3

    def test_independent_and(self):
        tree = AttackTree(
            name="t",
            root=gate_and(leaf("a"), leaf("b")),
            events=_events(a=0.5, b=0.25),
        )
        assert math.isclose(float(eval_tree(tree)), 0.125, rel_tol=1e-15)

    def test_independent_or(self):
        tree = AttackTree(
            name="t",
            root=gate_or(leaf("a"), leaf("b"), leaf("c")),
            events=_events(a=0.5, b=0.5, c=0.125),
        )
        # 1 - 0.5 * 0.5 * 0.875
        assert math.isclose(float(eval_tree(tree)), 0.78125, rel_tol=1e-15)

    def test_shared_event_under_and_is_not_squared(self):
        tree = AttackTree(
            name="t",
            root=gate_and(leaf("x"), leaf("x")),
            events=_events(x=0.4),
        )
        assert math.isclose(float(eval_tree(tree)), 0.4, rel_tol=1e-15)

    def test_shared_event_under_or_is_not_inflated(self):
        tree = AttackTree(
            name="t",
            root=gate_or(leaf("x"), leaf("x")),
            events=_events(x=0.4),
        )
        assert math.isclose(float(eval_tree(tree)), 0.4, rel_tol=1e-15)

    def test_shared_event_across_gates(self):
        # P[(x and a) or (x and b)] = x * (a + b - a b)
        tree = AttackTree(
            name="t",
            root=gate_or(gate_and(leaf("x"), leaf("a")), gate_and(leaf("x"), leaf("b"))),
            events=_events(x=0.5, a=0.2, b=0.3),
        )
        expected = 0.5 * (0.2 + 0.3 - 0.06)
        assert math.isclose(float(eval_tree(tree)), expected, rel_tol=1e-14)


class TestPackagedTrees:
    def test_bpcs_compromise_tree(self):
        tree = load_attack_tree(fixture_path("bpcs_attack_tree.json"))
        value = float(eval_tree(tree))
        assert math.isclose(value, BPCS_TREE_VALUE, rel_tol=1e-12)
        assert math.isclose(
            value, float(eval_tree_by_enumeration(tree)), rel_tol=0, abs_tol=1e-12
        )

    def test_sis_modbus_tree(self):
        tree = load_attack_tree(fixture_path("sis_modbus_attack_tree.json"))
        value = float(eval_tree(tree))
        assert math.isclose(value, SIS_TREE_VALUE, rel_tol=1e-12)
        assert math.isclose(
            value, float(eval_tree_by_enumeration(tree)), rel_tol=0, abs_tol=1e-12
        )

    def test_bpcs_tree_lists_sixteen_events(self):
        tree = load_attack_tree(fixture_path("bpcs_attack_tree.json"))
        assert len(tree.events) == 16
        assert set(referenced_event_ids(tree.root)) <= {e.id for e in tree.events}


class TestAgainstEnumeration:
    def test_random_trees_match_enumeration(self):
        rng = random.Random(20260815)
        for _ in range(200):
            tree = random_attack_tree(rng)
            closed = float(eval_tree(tree))
            brute = float(eval_tree_by_enumeration(tree))
            assert math.isclose(closed, brute, rel_tol=0, abs_tol=1e-12), tree.name

    def test_extreme_probabilities(self):
        tree = AttackTree(
            name="t",
            root=gate_or(gate_and(leaf("a"), leaf("b")), leaf("a")),
            events=_events(a=1.0, b=0.0),
        )
        assert float(eval_tree(tree)) == 1.0
        assert float(eval_tree_by_enumeration(tree)) == 1.0


class TestGuards:
    def test_unresolved_leaf(self):
        tree = AttackTree(name="t", root=leaf("ghost"), events=_events(a=0.5))
        with pytest.raises(UnresolvedLeafError) as err:
            eval_tree(tree)
        assert err.value.code == "UNRESOLVED_LEAF"
        assert "ghost" in str(err.value)

    def test_enumeration_event_budget(self):
        count = MAX_ENUMERATION_EVENTS + 1
        events = tuple(
            BasicEvent(id=f"e{i}", probability=0.5) for i in range(count)
        )
        tree = AttackTree(
            name="t",
            root=gate_or(*[leaf(f"e{i}") for i in range(count)]),
            events=events,
        )
        with pytest.raises(TooManyEventsError) as err:
            eval_tree_by_enumeration(tree)
        assert err.value.code == "TOO_MANY_EVENTS"

    def test_cycle_detected(self):
        node = gate_or(leaf("a"))
        object.__setattr__(node, "children", (node,))
        tree = AttackTree(name="t", root=node, events=_events(a=0.5))
        with pytest.raises(CycleDetectedError) as err:
            eval_tree(tree)
        assert err.value.code == "CYCLE_DETECTED"


class TestAggregateRate:
    def test_packaged_sources_fold_to_cyber_rate(self, case_doc):
        rate = aggregate_attack_rate(case_doc.attacker_sources)
        assert math.isclose(float(rate), 0.01, rel_tol=1e-12)
        assert math.isclose(
            float(rate), float(case_doc.scenario.bpcs.lambda_cyber), rel_tol=1e-9
        )

    def test_empty_sources_give_zero(self):
        assert float(aggregate_attack_rate(())) == 0.0

    def test_order_invariant(self):
        sources = (
            AttackerSource(name="a", attempts_per_year=0.5, success_probability=0.1),
            AttackerSource(name="b", attempts_per_year=2.0, success_probability=0.25),
            AttackerSource(name="c", attempts_per_year=1.25, success_probability=0.4),
        )
        forward = float(aggregate_attack_rate(sources))
        assert math.isclose(
            forward, float(aggregate_attack_rate(sources[::-1])), rel_tol=1e-15
        )
        assert math.isclose(forward, 0.05 + 0.5 + 0.5, rel_tol=1e-12)

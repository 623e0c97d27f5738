"""Shared fixtures: the packaged case study and seeded random generators.

Random scenarios and postures are drawn from ranges that keep the
algebra nondegenerate (positive hazard rates, postures strictly inside
the feasible region when asked for) so identity checks measure float
agreement, not boundary artifacts.
"""

from __future__ import annotations

import random

import pytest

from clopa import (
    AttackTree,
    BasicEvent,
    BpcsParams,
    InitiatingEvent,
    LopaScenario,
    SecurityPosture,
    boundary_pabs,
    clopa_coefficients,
    fixture_path,
    gate_and,
    gate_or,
    leaf,
    load_scenario,
    region_limits,
)


@pytest.fixture(scope="session")
def case_doc():
    return load_scenario(fixture_path("cstr_overflow.json"))


@pytest.fixture(scope="session")
def case_scenario(case_doc):
    return case_doc.scenario


@pytest.fixture(scope="session")
def case_posture(case_doc):
    return case_doc.posture


@pytest.fixture(scope="session")
def case_coefficients(case_scenario, case_posture):
    return clopa_coefficients(case_scenario, case_posture)


def random_scenario(rng: random.Random) -> LopaScenario:
    """A structurally valid scenario with nondegenerate magnitudes."""
    events = tuple(
        InitiatingEvent(
            name=f"event_{i}",
            likelihood=rng.uniform(0.01, 2.0),
            layer_pfd_product=10.0 ** rng.uniform(-4.0, -0.3),
        )
        for i in range(rng.randint(1, 4))
    )
    bpcs = BpcsParams(
        pfd_physical=rng.uniform(0.01, 0.5),
        lambda_physical=rng.uniform(0.01, 1.0),
        lambda_cyber=rng.uniform(0.001, 0.5),
        layer_pfd_product=10.0 ** rng.uniform(-4.0, -0.3),
    )
    return LopaScenario(
        hazard="synthetic",
        tmel=10.0 ** rng.uniform(-7.0, -4.0),
        initiating_events=events,
        bpcs=bpcs,
    )


def random_posture(rng: random.Random) -> SecurityPosture:
    """An arbitrary posture; feasibility not guaranteed."""
    return SecurityPosture(
        p_ab=rng.uniform(0.01, 0.9),
        p_as=rng.uniform(0.0, 0.9),
        p_abs=rng.uniform(0.0, 0.9),
        p_asb=rng.uniform(0.0, 0.9),
    )


def random_feasible_posture(
    rng: random.Random, scenario: LopaScenario, margin: float = 0.8
) -> SecurityPosture:
    """A posture strictly inside the scenario's feasible design region."""
    bpcs_side = SecurityPosture(
        p_ab=rng.uniform(0.01, 0.9),
        p_as=0.0,
        p_abs=0.0,
        p_asb=rng.uniform(0.0, 0.9),
    )
    coefficients = clopa_coefficients(scenario, bpcs_side)
    limits = region_limits(coefficients)
    p_as = rng.uniform(0.0, margin * limits.max_pas)
    ceiling = boundary_pabs(coefficients, p_as)
    if ceiling is None:
        ceiling = 1.0
    p_abs = rng.uniform(0.0, margin * ceiling)
    return SecurityPosture(
        p_ab=bpcs_side.p_ab,
        p_as=p_as,
        p_abs=p_abs,
        p_asb=bpcs_side.p_asb,
    )


def random_attack_tree(
    rng: random.Random, max_events: int = 8, max_depth: int = 3
) -> AttackTree:
    """A random AND/OR tree whose leaves reuse a small event pool, so
    shared events (and the dependence they cause) are common."""
    count = rng.randint(2, max_events)
    events = tuple(
        BasicEvent(id=f"e{i}", probability=round(rng.uniform(0.05, 0.95), 3))
        for i in range(count)
    )
    ids = [e.id for e in events]

    def node(depth: int):
        if depth >= max_depth or rng.random() < 0.35:
            return leaf(rng.choice(ids))
        children = [node(depth + 1) for _ in range(rng.randint(2, 3))]
        combine = gate_and if rng.random() < 0.5 else gate_or
        return combine(*children)

    combine = gate_and if rng.random() < 0.5 else gate_or
    root = combine(*[node(1) for _ in range(rng.randint(2, 3))])
    return AttackTree(name="synthetic", root=root, events=events)

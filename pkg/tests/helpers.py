"""Shared test helpers: random model generators and brute-force oracles.

The oracles deliberately reimplement similarity, position classification
and chain enumeration from scratch (dict walks over the raw triples), so
they share no code path with the detectors they check.
"""

from __future__ import annotations

import random

from btlint.model import (
    BEHAVIOR_TYPES,
    EDGE_TYPES,
    NODE_STATUSES,
    BehavioralModel,
    BehavioralUnit,
    Edge,
    ModelSet,
    Triple,
    build_model,
)
from btlint.similarity import Strategy

# --- random model sets for detector-vs-oracle runs ---------------------------

_CNAMES = ("DOOR", "OVEN", "LIGHT")
_BNAMES = ("On", "Off")
_BTYPES = ("state-realisation", "selection", "event")
_TLINKS = ("R1", "R2", "R3")


def rand_unit(rng: random.Random, idx: int) -> BehavioralUnit:
    return BehavioralUnit(
        f"w{idx}",
        {
            "cname": rng.choice(_CNAMES),
            "bname": rng.choice(_BNAMES),
            "btype": rng.choice(_BTYPES),
            "tlink": frozenset(rng.sample(_TLINKS, rng.randint(0, 2))),
            "status": rng.choice(NODE_STATUSES),
            "rel": frozenset(),
        },
    )


def rand_model(rng: random.Random, model_id: str, max_units: int = 12) -> BehavioralModel:
    count = rng.randint(1, max_units)
    units = [rand_unit(rng, i) for i in range(count)]
    triples = []
    for i in range(1, count):
        parent = rng.randrange(0, i)
        triples.append(Triple(f"w{parent}", Edge(rng.choice(EDGE_TYPES)), f"w{i}"))
    return build_model(model_id, rng.random() < 0.2, units, triples)


def rand_model_set(rng: random.Random, max_models: int = 6, max_units: int = 12) -> ModelSet:
    count = rng.randint(2, max_models)
    return ModelSet(rand_model(rng, f"b{i + 1}", max_units) for i in range(count))


def rand_strategy(rng: random.Random) -> Strategy:
    choice = rng.randrange(3)
    if choice == 0:
        return Strategy(
            weights={"cname": 0.5, "bname": 0.35, "btype": 0.15},
            alpha=1.0,
            beta=0.5,
        )
    if choice == 1:
        return Strategy(
            weights={"cname": 0.5, "bname": 0.35, "btype": 0.15},
            alpha=0.8,
            beta=0.5,
        )
    from btlint.similarity import CompatibilityMatrix

    return Strategy(
        weights={"cname": 50, "bname": 35, "btype": 10, "tlink": 5},
        alpha=0.85,
        beta=0.5,
        compat={"btype": CompatibilityMatrix(_BTYPES, [("state-realisation", "selection")])},
    )


# --- richer random models that exercise the full source syntax ---------------

_RICH_BNAMES = ("On", "Off", "Cooking(1 min)", "Door Ajar", "Idle Mode (warm)")
_RICH_CNAMES = ("DOOR", "OVEN", "LIGHT", "FAN_2", "POWER-TUBE")
_RELS = ("where(in) OVEN", "what(on) TRAY")
_OPS = ("reversion", "reversion:RESUME", "kill", "synchronise:SYNC1")


def rand_source_unit(rng: random.Random, idx: int) -> BehavioralUnit:
    attrs = {
        "cname": rng.choice(_RICH_CNAMES),
        "bname": rng.choice(_RICH_BNAMES),
        "btype": rng.choice(BEHAVIOR_TYPES),
        "tlink": frozenset(rng.sample(["R1", "R2", "R3", "R4"], rng.randint(0, 3))),
        "status": rng.choice(NODE_STATUSES),
        "rel": frozenset(rng.sample(_RELS, rng.randint(0, 2))),
    }
    if rng.random() < 0.3:
        attrs["op"] = rng.choice(_OPS)
    if rng.random() < 0.2:
        attrs["label"] = f"L{rng.randint(1, 9)}"
    return BehavioralUnit(f"w{idx}", attrs)


def rand_source_model(rng: random.Random, model_id: str, max_units: int = 9) -> BehavioralModel:
    count = rng.randint(1, max_units)
    units = [rand_source_unit(rng, i) for i in range(count)]
    parents: dict[int, list[int]] = {}
    for i in range(1, count):
        parents.setdefault(rng.randrange(0, i), []).append(i)
    triples = []
    for parent, kids in parents.items():
        # Alternative edges only come in complete sibling groups.
        if rng.random() < 0.2:
            kinds = ["alternative"] * len(kids)
        else:
            kinds = [rng.choice(("sequential", "parallel", "atomic")) for _ in kids]
        for child, kind in zip(kids, kinds):
            triples.append(Triple(f"w{parent}", Edge(kind), f"w{child}"))
    triples.sort(key=lambda t: int(t.child[1:]))
    return build_model(model_id, rng.random() < 0.2, units, triples)


def rand_source_model_set(rng: random.Random, max_models: int = 4) -> ModelSet:
    count = rng.randint(1, max_models)
    return ModelSet(rand_source_model(rng, f"m{i}") for i in range(count))


# --- brute-force oracles ------------------------------------------------------

def oracle_similarity(u1: BehavioralUnit, u2: BehavioralUnit, strategy: Strategy) -> float:
    """Fresh weighted-average implementation over the raw attribute dicts."""
    total = 0.0
    weight_sum = 0.0
    for name, weight in strategy.weights.items():
        if weight == 0:
            continue
        v1 = u1.attrs.get(name, frozenset())
        v2 = u2.attrs.get(name, frozenset())
        if name in ("cname", "bname"):
            v1 = v1.casefold().strip() if isinstance(v1, str) else v1
            v2 = v2.casefold().strip() if isinstance(v2, str) else v2
        matrix = strategy.compat.get(name)
        if isinstance(v1, frozenset) or isinstance(v2, frozenset):
            s1 = v1 if isinstance(v1, frozenset) else frozenset([v1])
            s2 = v2 if isinstance(v2, frozenset) else frozenset([v2])
            if s1 <= s2 or s2 <= s1:
                score = 1.0
            elif s1 & s2:
                score = len(s1 & s2) / len(s1 | s2)
            elif matrix is not None and all(
                matrix.compatible(a, b) for a in s1 for b in s2
            ):
                score = strategy.beta
            else:
                score = 0.0
        else:
            if v1 == v2:
                score = 1.0
            elif matrix is not None and matrix.compatible(v1, v2):
                score = strategy.beta
            else:
                score = 0.0
        total += score * weight
        weight_sum += weight
    return total / weight_sum


def oracle_equivalent(u1, u2, strategy) -> bool:
    return oracle_similarity(u1, u2, strategy) >= strategy.alpha


def _tree_maps(model: BehavioralModel):
    kids: dict[str, list[str]] = {}
    parent: dict[str, str] = {}
    for t in model.triples:
        kids.setdefault(t.parent, []).append(t.child)
        parent[t.child] = t.parent
    root = next(u for u in model.units if u not in parent)
    return root, kids, parent


def oracle_position(model: BehavioralModel, unit_id: str) -> str:
    root, kids, _ = _tree_maps(model)
    if unit_id == root:
        return "root"
    return "branch" if kids.get(unit_id) else "leaf"


def oracle_primary(b1: BehavioralModel, b2: BehavioralModel, strategy) -> list[tuple[str, str]]:
    root2, _, _ = _tree_maps(b2)
    return [
        (u.id, root2)
        for u in b1
        if oracle_equivalent(u, b2.units[root2], strategy)
    ]


def oracle_multi_preconditions(b1, b2, strategy) -> bool:
    return len({p for p, _ in oracle_primary(b1, b2, strategy)}) >= 2


def oracle_non_root(b1, b2, strategy) -> set[tuple[str, str, str]]:
    """(kind, parent unit, child unit) with the branch-leaf case swapped
    onto the leaf like the detector reports it."""
    out = set()
    for u in b1:
        pu = oracle_position(b1, u.id)
        if pu == "root":
            continue
        for v in b2:
            pv = oracle_position(b2, v.id)
            if pv == "root" or not oracle_equivalent(u, v, strategy):
                continue
            if pu == "branch" and pv == "branch":
                out.add(("branch-branch", u.id, v.id))
            elif pu == "leaf" and pv == "branch":
                out.add(("leaf-branch", u.id, v.id))
            elif pu == "leaf" and pv == "leaf":
                out.add(("leaf-leaf", u.id, v.id))
            else:
                out.add(("leaf-branch:swapped", v.id, u.id))
    return out


def oracle_chains(model: BehavioralModel, min_len: int) -> list[tuple[str, ...]]:
    _, kids, _ = _tree_maps(model)
    found: list[tuple[str, ...]] = []

    def walk(chain: list[str]) -> None:
        if len(chain) >= min_len:
            found.append(tuple(chain))
        for child in kids.get(chain[-1], ()):
            walk(chain + [child])

    for start in model.units:
        walk([start])
    return found


def oracle_sub_paths(b1, b2, strategy, min_len: int = 3) -> set[tuple[tuple[str, ...], tuple[str, ...]]]:
    """All maximal pointwise-equivalent chain pairs, by domination filtering."""
    valid = []
    chains2 = oracle_chains(b2, min_len)
    for c1 in oracle_chains(b1, min_len):
        for c2 in chains2:
            if len(c1) == len(c2) and all(
                oracle_equivalent(b1.units[u], b2.units[v], strategy)
                for u, v in zip(c1, c2)
            ):
                valid.append((c1, c2))

    def dominated(pair) -> bool:
        p, c = pair
        for p2, c2 in valid:
            if len(p2) <= len(p):
                continue
            for k in range(len(p2) - len(p) + 1):
                if p2[k:k + len(p)] == p and c2[k:k + len(c)] == c:
                    return True
        return False

    return {pair for pair in valid if not dominated(pair)}

"""First-order mutants of a routine body.

Contracts and user checks are never touched: they are the oracle that
detects the injected faults.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Iterable, Optional

from .parser import check_types, parse_file
from .pretty import pretty, pretty_expr, pretty_instr
from .syntax import (
    Assign,
    AssignIndex,
    Binary,
    Check,
    If,
    IntLit,
    Loop,
    Node,
    RELATIONAL_OPS,
    Routine,
    children,
    find_node,
    negate,
    replace_node,
)
from .types import MutantEntry, MutantManifest, MutationOperator

logger = logging.getLogger(__name__)

ALL_OPERATORS: tuple[MutationOperator, ...] = tuple(MutationOperator)

RELOP_SWAPS = {"<": "<=", "<=": "<", ">": ">=", ">=": ">", "=": "/=", "/=": "="}
ARITH_SWAPS = {"+": "-", "-": "+", "*": "+", "div": "*", "mod": "div"}
OFFSETS = ("+1", "-1")

MANIFEST = "manifest.json"


@dataclass(frozen=True)
class Site:
    operator: MutationOperator
    node_id: str
    line: int
    variant: str = ""  # replacement operator, or the offset applied


@dataclass(frozen=True)
class Mutant:
    mutant_id: str
    operator: MutationOperator
    node_id: str
    line: int
    mutated: Routine
    description: str

    def entry(self, file: str = "") -> MutantEntry:
        return MutantEntry(
            mutant_id=self.mutant_id, operator=self.operator, node_id=self.node_id,
            line=self.line, description=self.description, file=file,
        )


def _sites_at(node: Node, in_until: bool, ops: set[MutationOperator]) -> list[Site]:
    found: list[Site] = []

    def add(op: MutationOperator, variant: str = "") -> None:
        if op in ops:
            found.append(Site(op, node.node_id, node.line, variant))

    if isinstance(node, Binary):
        if node.op in RELOP_SWAPS:
            add(MutationOperator.RELOP_SWAP, RELOP_SWAPS[node.op])
        if node.op in ARITH_SWAPS:
            add(MutationOperator.ARITH_SWAP, ARITH_SWAPS[node.op])
        if in_until and node.op in RELATIONAL_OPS:
            for offset in OFFSETS:
                add(MutationOperator.BOUND_TWEAK, offset)
    elif isinstance(node, IntLit):
        for offset in OFFSETS:
            add(MutationOperator.CONST_OFFSET, offset)
    elif isinstance(node, (Assign, AssignIndex)):
        add(MutationOperator.ASSIGN_DROP)
    elif isinstance(node, If):
        add(MutationOperator.BRANCH_NEGATE)
    return found


def enumerate_sites(r: Routine, ops: Iterable[MutationOperator] = ALL_OPERATORS) -> list[Site]:
    """Every applicable (operator, node) pair of the body, in pre-order."""
    selected = set(ops)
    sites: list[Site] = []

    def visit(node: Node, in_until: bool) -> None:
        if isinstance(node, Check):
            return
        sites.extend(_sites_at(node, in_until, selected))
        for child in children(node):
            visit(child, in_until or (isinstance(node, Loop) and child is node.until))

    visit(r.body, False)
    return sites


def _offset(value: Node, variant: str) -> Node:
    return Binary("+" if variant == "+1" else "-", value, IntLit(1, loc=value.loc),
                  loc=value.loc, node_id=f"{value.node_id}.tweak")


def _mutated_node(node: Node, site: Site) -> Optional[Node]:
    op = site.operator
    if op in (MutationOperator.RELOP_SWAP, MutationOperator.ARITH_SWAP):
        return Binary(site.variant, node.left, node.right, loc=node.loc, node_id=node.node_id)
    if op is MutationOperator.BOUND_TWEAK:
        return Binary(node.op, node.left, _offset(node.right, site.variant), loc=node.loc, node_id=node.node_id)
    if op is MutationOperator.CONST_OFFSET:
        delta = 1 if site.variant == "+1" else -1
        return IntLit(node.value + delta, loc=node.loc, node_id=node.node_id)
    if op is MutationOperator.ASSIGN_DROP:
        return None
    if op is MutationOperator.BRANCH_NEGATE:
        return If(negate(node.cond), node.then, node.orelse, loc=node.loc, node_id=node.node_id)
    raise ValueError(f"Unknown mutation operator '{op}'")


def _show(node: Node | None) -> str:
    if node is None:
        return "(nothing)"
    if isinstance(node, If):
        return f"if {pretty_expr(node.cond)}"
    if isinstance(node, (Assign, AssignIndex)):
        return pretty_instr(node)[0].strip()
    return pretty_expr(node)


def apply_site(r: Routine, site: Site) -> tuple[Routine, str]:
    """The mutated routine and a one-line description of the edit."""
    node = find_node(r.body, site.node_id)
    new = _mutated_node(node, site)
    mutated = check_types(replace_node(r, site.node_id, new))
    if site.operator is MutationOperator.ASSIGN_DROP:
        description = f"line {site.line}: drop {_show(node)}"
    else:
        description = f"line {site.line}: {_show(node)} -> {_show(new)}"
    return mutated, description


def mutate(r: Routine, ops: Iterable[MutationOperator] = ALL_OPERATORS, k: int = 30, seed: int = 0) -> list[Mutant]:
    """``k`` distinct sites sampled without replacement (all of them if there are fewer)."""
    if k < 1:
        raise ValueError(f"Mutant count must be at least 1, got {k}")
    sites = enumerate_sites(r, ops)
    if k >= len(sites):
        chosen = sites
    else:
        chosen = [sites[i] for i in sorted(random.Random(seed).sample(range(len(sites)), k))]
    mutants = []
    for number, site in enumerate(chosen, start=1):
        mutated, description = apply_site(r, site)
        mutants.append(Mutant(f"{r.name}_m{number}", site.operator, site.node_id, site.line, mutated, description))
    logger.info("%s: %d mutant(s) from %d site(s)", r.name, len(mutants), len(sites))
    return mutants


# --- Tree diff ---


def _scalars(node: Node) -> tuple:
    return tuple(
        getattr(node, f.name) for f in fields(node)
        if f.compare and f.name not in ("loc", "node_id")
        and not isinstance(getattr(node, f.name), (Node, tuple))
    )


def _diff_items(a: tuple, b: tuple) -> list[tuple[Node | None, Node | None]]:
    if len(a) == len(b):
        return [d for x, y in zip(a, b) for d in diff_nodes(x, y)]
    if len(a) == len(b) + 1:
        for k in range(len(a)):
            if a[:k] + a[k + 1:] == b:
                return [(a[k], None)]
    if len(b) == len(a) + 1:
        for k in range(len(b)):
            if b[:k] + b[k + 1:] == a:
                return [(None, b[k])]
    return []


def diff_nodes(a: Node | None, b: Node | None) -> list[tuple[Node | None, Node | None]]:
    """Minimal differing subtrees of two trees, as (old, new) pairs (None for a missing side)."""
    if a == b:
        return []
    if a is None or b is None or type(a) is not type(b) or _scalars(a) != _scalars(b):
        return [(a, b)]
    diffs: list[tuple[Node | None, Node | None]] = []
    for f in fields(a):
        if f.name in ("loc", "node_id"):
            continue
        x, y = getattr(a, f.name), getattr(b, f.name)
        if x == y:
            continue
        if isinstance(x, tuple) and isinstance(y, tuple):
            items = _diff_items(x, y)
            if not items:
                return [(a, b)]
            diffs.extend(items)
        else:
            diffs.extend(diff_nodes(x, y))
    return diffs


# --- Files ---


def write_mutants(r: Routine, mutants: list[Mutant], directory: str | Path, seed: int = 0) -> Path:
    """Write ``<mutant_id>.mil`` files and a manifest; returns the manifest path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    for m in mutants:
        name = f"{m.mutant_id}.mil"
        (directory / name).write_text(pretty(m.mutated), encoding="utf-8")
        entries.append(m.entry(name))
    manifest = MutantManifest(routine=r.name, seed=seed, count=len(mutants), mutants=entries)
    path = directory / MANIFEST
    path.write_text(manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path


def load_mutants(directory: str | Path) -> tuple[MutantManifest, list[tuple[MutantEntry, Routine]]]:
    directory = Path(directory)
    path = directory / MANIFEST
    if not path.exists():
        raise FileNotFoundError(f"No {MANIFEST} in {directory}")
    manifest = MutantManifest.model_validate_json(path.read_text(encoding="utf-8"))
    return manifest, [(entry, parse_file(directory / entry.file)) for entry in manifest.mutants]

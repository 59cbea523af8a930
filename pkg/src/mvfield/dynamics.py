"""Combinatorial dynamics induced by a multivector field.

The transition multimap sends a simplex to its multivector united with its
closure; at the level of multivectors this gives a digraph with an edge
V -> W whenever W meets cl(V) (plus self-loops).  Recurrence lives in the
strongly connected components: Morse sets are the SCCs that are either
non-trivial (two or more multivectors) or a single critical multivector,
ordered by reachability.  The exit set of a Morse set is the mouth of its
underlying simplex union; an empty exit set signals attracting behavior.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from . import homology
from .complexes import closure, mouth
from .mvf import MultivectorField


@dataclass
class TransitionDigraph:
    n: int
    succ: list[list[int]]  # sorted successor lists, self-loops included


def transition(field: MultivectorField, h: int) -> frozenset[int]:
    """Targets of one simplex: its multivector united with its closure."""
    K = field.complex
    return frozenset(field.parts[field.part_of(h)] | closure(K, [h]))


def build_digraph(field: MultivectorField) -> TransitionDigraph:
    """Multivector-level transition digraph: V -> W iff W meets cl(V)."""
    K = field.complex
    succ = []
    for pid, part in enumerate(field.parts):
        targets = {field.part_of(h) for h in closure(K, part)}
        targets.add(pid)
        succ.append(sorted(targets))
    return TransitionDigraph(len(field.parts), succ)


def strongly_connected_components(g: TransitionDigraph) -> list[list[int]]:
    """Tarjan's algorithm, iterative; components sorted by lowest node id."""
    index = [-1] * g.n
    low = [0] * g.n
    on_stack = [False] * g.n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in range(g.n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            for k in range(pi, len(g.succ[v])):
                w = g.succ[v][k]
                if index[w] == -1:
                    work[-1] = (v, k + 1)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                pv = work[-1][0]
                low[pv] = min(low[pv], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
    comps.sort(key=lambda c: c[0])
    return comps


@dataclass
class MorseSet:
    part_ids: tuple[int, ...]
    handles: frozenset[int]
    exit_set: frozenset[int]
    conley: Optional[tuple[int, ...]]
    label: str
    parity: Optional[int] = None
    witness: Optional[tuple] = None

    @property
    def n_multivectors(self) -> int:
        return len(self.part_ids)


@dataclass
class MorseReport:
    field: MultivectorField
    critical_flags: list[bool]
    sccs: list[list[int]]
    morse_sets: list[MorseSet]
    order: list[tuple[int, int]]  # (higher, lower) indices into morse_sets


def criticality(field: MultivectorField) -> list[bool]:
    """Per-part criticality flags (non-trivial relative homology)."""
    K = field.complex
    return [homology.is_critical(K, part) for part in field.parts]


def morse_decomposition(
    field: MultivectorField, critical_flags: Sequence[bool]
) -> MorseReport:
    """Morse sets, their reachability order, exit sets and Conley indices.

    Selection: an SCC is a Morse set when it has two or more multivectors
    or its single multivector is critical.  q > p means a directed path
    runs from q's SCC to p's (through any nodes).
    """
    K = field.complex
    g = build_digraph(field)
    sccs = strongly_connected_components(g)
    scc_of = {}
    for cid, comp in enumerate(sccs):
        for node in comp:
            scc_of[node] = cid
    cond_succ: list[set[int]] = [set() for _ in sccs]
    for v in range(g.n):
        for w in g.succ[v]:
            if scc_of[v] != scc_of[w]:
                cond_succ[scc_of[v]].add(scc_of[w])

    selected = [
        cid
        for cid, comp in enumerate(sccs)
        if len(comp) >= 2 or critical_flags[comp[0]]
    ]

    morse_sets = []
    for cid in selected:
        comp = sccs[cid]
        handles = frozenset().union(*(field.parts[p] for p in comp))
        exit_set = mouth(K, handles)
        try:
            conley = homology.conley_index(K, handles)
            label = homology.classify(conley, K.dim)
            parity = homology.periodic_parity(conley)
            witness = None
        except homology.NotLocallyClosedError as exc:
            conley, label, parity, witness = None, "unclassified", None, exc.witness
        morse_sets.append(
            MorseSet(tuple(comp), handles, exit_set, conley, label, parity, witness)
        )

    # Reachability among selected SCCs through the full condensation.
    reach: dict[int, set[int]] = {}
    for cid in selected:
        seen = set()
        stack = [cid]
        while stack:
            cur = stack.pop()
            for nxt in cond_succ[cur]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        reach[cid] = seen
    order = []
    for a, cid_a in enumerate(selected):
        for b, cid_b in enumerate(selected):
            if a != b and cid_b in reach[cid_a]:
                order.append((a, b))
    return MorseReport(field, list(critical_flags), sccs, morse_sets, sorted(order))


def gradient_part(field: MultivectorField, report: MorseReport) -> frozenset[int]:
    """Union of the multivectors lying in no Morse set."""
    in_morse = set()
    for ms in report.morse_sets:
        in_morse.update(ms.part_ids)
    out: set[int] = set()
    for pid, part in enumerate(field.parts):
        if pid not in in_morse:
            out.update(part)
    return frozenset(out)


def condensation_dot(field: MultivectorField, report: MorseReport) -> str:
    """Deterministic DOT text for the condensation digraph."""
    lines = ["digraph condensation {"]
    morse_of = {}
    for mi, ms in enumerate(report.morse_sets):
        for pid in ms.part_ids:
            morse_of[pid] = mi
    scc_of = {}
    for cid, comp in enumerate(report.sccs):
        for node in comp:
            scc_of[node] = cid
    for cid, comp in enumerate(report.sccs):
        crit = sum(1 for p in comp if report.critical_flags[p])
        label = f"scc{cid} |V|={len(comp)} crit={crit}"
        attrs = f'label="{label}"'
        if comp[0] in morse_of:
            ms = report.morse_sets[morse_of[comp[0]]]
            attrs += f', shape=box, xlabel="{ms.label}"'
        lines.append(f"  n{cid} [{attrs}];")
    g = build_digraph(field)
    edges = set()
    for v in range(g.n):
        for w in g.succ[v]:
            a, b = scc_of[v], scc_of[w]
            if a != b:
                edges.add((a, b))
    for a, b in sorted(edges):
        lines.append(f"  n{a} -> n{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"

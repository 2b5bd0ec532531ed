"""Best-first tree search over seed sets: the full algorithm family.

Two families share the soundness conditions (a tree never repeats a node,
and never holds two seeds from one set):

* generation-based search (``bft``, ``bft_m``, ``bft_am``): unrooted edge
  sets grown breadth-first from any tree node, minimized before reporting;
* rooted search (``gam``, ``esp``, ``moesp``, ``lesp``, ``molesp``): trees
  grow only at their root via a priority queue of (tree, edge) pairs and
  merge with previously recorded trees sharing that root.

The pruned variants deduplicate by edge set alone (``esp``), optionally
re-root newly completed trees at their seeds to keep merge opportunities
alive (``moesp``), and spare merge trees from pruning at well-connected
nodes (``lesp``); ``molesp`` combines all three.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from heapq import heappop, heappush
from typing import Callable

from .graph import Graph
from .lang import CtpFilters
from .trees import (
    GROW,
    INIT,
    MERGE,
    REROOT,
    Classification,
    ResultTree,
    RootedTree,
    SeedSetError,
    SeedSets,
    directed_root,
    is_result,
    minimize,
)

ALGORITHMS = ("bft", "bft_m", "bft_am", "gam", "esp", "moesp", "lesp", "molesp")
ROOTED_ALGORITHMS = ("gam", "esp", "moesp", "lesp", "molesp")
GENERATION_ALGORITHMS = ("bft", "bft_m", "bft_am")
EDGE_SET_PRUNED = ("esp", "moesp", "lesp", "molesp")

# process_tree outcomes
PRUNED = "pruned"
RESULT = "result"
RECORDED = "recorded"

#: seed-set size ratio beyond which one queue per coverage mask is used
MULTI_QUEUE_RATIO = 10


@dataclass(frozen=True)
class SearchConfig:
    algorithm: str = "molesp"
    filters: CtpFilters = field(default_factory=CtpFilters)
    priority: str = "smallest"
    multi_queue: bool | None = None  # None: automatic by seed-set size ratio


@dataclass
class SearchStats:
    provenances_built: int = 0
    trees_pruned: int = 0
    results_found: int = 0
    queue_pops: int = 0
    timed_out: bool = False


# ---------------------------------------------------------------------------
# Score functions

_SCORES: dict[str, tuple[Callable, bool]] = {}


def register_score(name: str, fn: Callable, batch: bool = False) -> None:
    """Register a score function.

    Per-result functions take ``(result, graph)`` and return a float. Batch
    functions (``batch=True``) take the full result list after the search
    ends and return one float per result, for scores that can only be
    computed once all results are known.
    """
    _SCORES[name] = (fn, batch)


register_score("edgecount", lambda rt, g: float(-len(rt.edges)))
register_score("unit", lambda rt, g: 0.0)


def apply_score_topk(results: list[ResultTree], filters: CtpFilters, g: Graph | None = None) -> list[ResultTree]:
    """Attach scores and keep the k best; ties break on the edge-set key."""
    if filters.score is None:
        return list(results)
    if filters.score not in _SCORES:
        raise ValueError(f"unknown score function {filters.score!r}")
    fn, batch = _SCORES[filters.score]
    if batch:
        scores = fn(list(results), g)
        scored = [replace(rt, score=float(s)) for rt, s in zip(results, scores)]
    else:
        scored = [replace(rt, score=float(fn(rt, g))) for rt in results]
    scored.sort(key=lambda rt: (-rt.score, rt.edges, rt.nodes))
    if filters.top_k is not None:
        scored = scored[: filters.top_k]
    return scored


# ---------------------------------------------------------------------------
# Priority policies

_PRIORITIES: dict[str, Callable[[RootedTree, int], tuple]] = {
    "smallest": lambda t, e: (t.size(), t.key, t.root, e),
    "largest": lambda t, e: (-t.size(), t.key, t.root, e),
}


def register_priority(name: str, fn: Callable[[RootedTree, int], tuple]) -> None:
    _PRIORITIES[name] = fn


# ---------------------------------------------------------------------------
# Search state


class SearchState:
    """All mutable bookkeeping of one search; owned by a single execution."""

    def __init__(self, g: Graph, seeds: SeedSets, cfg: SearchConfig) -> None:
        if cfg.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {cfg.algorithm!r}")
        if cfg.priority not in _PRIORITIES:
            raise ValueError(f"unknown priority policy {cfg.priority!r}")
        if not seeds.active:
            raise SeedSetError("all seed sets are universal")
        self.graph = g
        self.seeds = seeds
        self.cfg = cfg
        self.stats = SearchStats()

        f = cfg.filters
        self.uni = f.uni
        self.labels_ok = f.labels
        self.max_edges = f.max_edges
        self.deadline: float | None = (
            time.monotonic() + f.timeout_ms / 1000.0 if f.timeout_ms is not None else None
        )

        sizes = [len(seeds.sets[i]) for i in seeds.active]
        auto = max(sizes) >= MULTI_QUEUE_RATIO * min(sizes)
        self.multi_queue = auto if cfg.multi_queue is None else cfg.multi_queue
        self._priority = _PRIORITIES[cfg.priority]
        # re-rooted copies break the root-reaches-all invariant of UNI trees
        self.reroot_enabled = cfg.algorithm in ("moesp", "molesp") and not self.uni

        self.queues: dict[int, list[tuple]] = {}
        self.queued: set[tuple] = set()
        self.hist: set = set()
        self.by_root: dict[int, list[RootedTree]] = {}
        self.rooted_keys: set[tuple] = set()
        self.results: dict[tuple, ResultTree] = {}
        self.signatures: dict[int, int] = {}

    def deadline_passed(self) -> bool:
        return self.deadline is not None and time.monotonic() > self.deadline

    def push_pair(self, t: RootedTree, e: int) -> None:
        bucket = t.covered if self.multi_queue else 0
        heappush(self.queues.setdefault(bucket, []), self._priority(t, e) + (e, t))

    def pop_pair(self) -> tuple[RootedTree, int] | None:
        """Pop from the queue with the fewest pending pairs, best entry first."""
        live = [(len(q), bucket) for bucket, q in self.queues.items() if q]
        if not live:
            return None
        _, bucket = min(live)
        entry = heappop(self.queues[bucket])
        return entry[-1], entry[-2]


# ---------------------------------------------------------------------------
# Tree construction steps


def _make_init(seeds: SeedSets, node: int) -> RootedTree:
    return RootedTree(
        key=(),
        root=node,
        nodes=frozenset((node,)),
        covered=seeds.bits(node),
        kind=INIT,
        path_anchor=node,
    )


def try_grow(state: SearchState, t: RootedTree, e: int) -> RootedTree | None:
    """Extend ``t`` at its root with edge ``e``; None when any condition fails.

    Rejections: re-rooted trees never grow; the far endpoint must be a new
    node and must not be a seed from an already covered set; the edge must
    pass the label filter and stay within the edge budget. Under UNI only
    edges pointing into the root are taken, so every tree stays a directed
    tree away from its root.
    """
    if t.kind == REROOT:
        return None
    g = state.graph
    edge = g.edges[e]
    if state.uni:
        if edge.target != t.root:
            return None
        far = edge.source
    else:
        if edge.source == t.root:
            far = edge.target
        elif edge.target == t.root:
            far = edge.source
        else:
            return None
    if far in t.nodes:
        return None
    far_bits = state.seeds.bits(far)
    if far_bits & t.covered:
        return None
    if state.max_edges is not None and t.size() + 1 > state.max_edges:
        return None
    if state.labels_ok is not None and edge.label not in state.labels_ok:
        return None
    covered = t.covered | far_bits
    return RootedTree(
        key=tuple(sorted(t.key + (e,))),
        root=far,
        nodes=t.nodes | {far},
        covered=covered,
        kind=GROW,
        path_anchor=t.path_anchor if far_bits == 0 else None,
        gained=covered.bit_count() > t.covered.bit_count(),
    )


def try_merge(state: SearchState, t1: RootedTree, t2: RootedTree) -> RootedTree | None:
    """Union two trees sharing exactly their root; None when conditions fail.

    The covered seed sets of the two trees may overlap only in sets whose
    chosen seed is the shared root itself; a set covered through two
    different nodes would put two of its seeds in the merged tree.
    """
    if t1.root != t2.root:
        return None
    if len(t1.nodes & t2.nodes) != 1:
        return None
    common = t1.covered & t2.covered
    if common & ~state.seeds.bits(t1.root):
        return None
    if state.max_edges is not None and t1.size() + t2.size() > state.max_edges:
        return None
    covered = t1.covered | t2.covered
    return RootedTree(
        key=tuple(sorted(t1.key + t2.key)),
        root=t1.root,
        nodes=t1.nodes | t2.nodes,
        covered=covered,
        kind=MERGE,
        path_anchor=None,
        gained=covered.bit_count() > max(t1.covered.bit_count(), t2.covered.bit_count()),
    )


# ---------------------------------------------------------------------------
# Deduplication and bookkeeping


def is_new(state: SearchState, t: RootedTree) -> bool:
    """Decide whether a freshly built tree survives deduplication.

    Plain rooted search discards a tree only when the identical rooted tree
    (same edge set and root) was seen before. Edge-set pruning discards any
    tree whose nonempty edge set was seen under any root. The limited
    variants spare a merge tree when its root already has seed-rooted paths
    from three or more sets and three or more adjacent graph edges, unless
    the identical rooted tree is already recorded.
    """
    algo = state.cfg.algorithm
    if algo not in EDGE_SET_PRUNED:
        return (t.key, t.root) not in state.hist
    if not t.key:
        return True
    if t.key not in state.hist:
        return True
    if algo in ("lesp", "molesp") and t.kind == MERGE:
        if (
            state.signatures.get(t.root, 0).bit_count() >= 3
            and state.graph.degree(t.root) >= 3
            and (t.key, t.root) not in state.rooted_keys
        ):
            return True
    return False


def _hist_add(state: SearchState, t: RootedTree) -> None:
    if state.cfg.algorithm in EDGE_SET_PRUNED:
        if t.key:
            state.hist.add(t.key)
    else:
        state.hist.add((t.key, t.root))


def _update_signature(state: SearchState, t: RootedTree) -> None:
    # a nonempty root-ended path from a single seed marks its root as reached
    if t.path_anchor is not None and t.key:
        bits = state.seeds.bits(t.path_anchor)
        state.signatures[t.root] = state.signatures.get(t.root, 0) | bits


def _record_result(state: SearchState, t: RootedTree) -> None:
    rt = _to_result(state, t)
    ident = rt.identity()
    if ident not in state.results:
        state.results[ident] = rt
        state.stats.results_found += 1


def _to_result(state: SearchState, t: RootedTree) -> ResultTree:
    seeds = state.seeds
    chosen = seeds.chosen_seeds(t.nodes)
    seed_tuple = tuple(
        chosen[i] if not seeds.universal[i] else t.root for i in range(seeds.m)
    )
    return ResultTree(
        edges=t.key,
        nodes=tuple(sorted(t.nodes)),
        seed_tuple=seed_tuple,
        root=t.root,
    )


def record_for_merging(state: SearchState, t: RootedTree) -> None:
    """Make ``t`` available as a merge partner; inject re-rooted copies.

    When re-rooting is on and this step covered strictly more seed sets than
    each of its inputs, a copy of the tree rooted at every other seed node
    is recorded and immediately merged; such copies merge but never grow.
    """
    state.by_root.setdefault(t.root, []).append(t)
    state.rooted_keys.add((t.key, t.root))
    if not (state.reroot_enabled and t.gained and t.kind in (GROW, MERGE)):
        return
    for n in sorted(t.nodes):
        if n == t.root or not state.seeds.bits(n):
            continue
        if (t.key, n) in state.rooted_keys:
            continue
        copy = RootedTree(t.key, n, t.nodes, t.covered, REROOT)
        state.stats.provenances_built += 1
        state.by_root.setdefault(n, []).append(copy)
        state.rooted_keys.add((t.key, n))
        merge_all(state, copy)


def _enqueue_grow_pairs(state: SearchState, t: RootedTree) -> None:
    if state.max_edges is not None and t.size() >= state.max_edges:
        return
    g = state.graph
    edge_ids = g.incoming_edges(t.root) if state.uni else g.adjacent_edges(t.root)
    for e in edge_ids:
        edge = g.edges[e]
        if state.labels_ok is not None and edge.label not in state.labels_ok:
            continue
        far = edge.source if state.uni else g.other_endpoint(e, t.root)
        if far in t.nodes:
            continue
        if state.seeds.bits(far) & t.covered:
            continue
        pair_key = (t.key, t.root, e)
        if pair_key in state.queued:
            continue
        state.queued.add(pair_key)
        state.push_pair(t, e)


def process_tree(state: SearchState, t: RootedTree) -> str:
    """Deduplicate, then report or record a tree and queue its grow steps."""
    if not is_new(state, t):
        state.stats.trees_pruned += 1
        return PRUNED
    state.stats.provenances_built += 1
    _hist_add(state, t)
    if is_result(t, state.seeds):
        _record_result(state, t)
        return RESULT
    record_for_merging(state, t)
    if t.kind != REROOT:
        _enqueue_grow_pairs(state, t)
    return RECORDED


def merge_all(state: SearchState, t: RootedTree) -> None:
    """Merge ``t`` and every merge product against the recorded trees, to fixpoint."""
    pending = [t]
    while pending:
        if state.deadline_passed():
            return
        current = pending
        pending = []
        for t1 in current:
            for t2 in list(state.by_root.get(t1.root, ())):
                if not t2.key:
                    continue  # merging with a single-node tree adds nothing
                merged = try_merge(state, t1, t2)
                if merged is None:
                    continue
                if process_tree(state, merged) == RECORDED:
                    pending.append(merged)


# ---------------------------------------------------------------------------
# Rooted search driver


def init_search(g: Graph, seeds: SeedSets, cfg: SearchConfig) -> SearchState:
    """Create a search state with one start tree per seed of each non-universal set.

    A node belonging to several seed sets gets a single start tree covering
    all of them at once.
    """
    state = SearchState(g, seeds, cfg)
    started: set[int] = set()
    for orig in seeds.active:
        for s in sorted(seeds.sets[orig]):
            if s in started:
                continue
            if s not in g.nodes:
                raise SeedSetError(f"seed {s} is not a graph node")
            started.add(s)
            state.signatures[s] = state.signatures.get(s, 0) | seeds.bits(s)
            process_tree(state, _make_init(seeds, s))
    return state


def _drain(state: SearchState) -> None:
    while True:
        if state.deadline_passed():
            state.stats.timed_out = True
            return
        entry = state.pop_pair()
        if entry is None:
            return
        state.stats.queue_pops += 1
        t, e = entry
        grown = try_grow(state, t, e)
        if grown is None:
            continue
        _update_signature(state, grown)
        if process_tree(state, grown) == RECORDED and grown.key:
            merge_all(state, grown)


# ---------------------------------------------------------------------------
# Generation-based driver


@dataclass(frozen=True)
class _GenTree:
    key: tuple[int, ...]
    nodes: frozenset[int]
    covered: int

    def identity(self) -> tuple:
        return self.key if self.key else ("node", min(self.nodes))


def _submasks(mask: int):
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def _run_generations(state: SearchState) -> None:
    g, seeds, cfg = state.graph, state.seeds, state.cfg
    merging = cfg.algorithm in ("bft_m", "bft_am")
    aggressive = cfg.algorithm == "bft_am"
    memory: set = set()
    # merge partners bucketed by (shared node, covered mask): only partners
    # whose covered sets cannot collide outside the shared node are scanned
    by_node_cov: dict[tuple[int, int], list[_GenTree]] = {}

    def report(t: _GenTree) -> None:
        minimized = minimize(g, t.key, seeds)
        nodes: set[int] = set()
        for eid in minimized:
            e = g.edges[eid]
            nodes.update((e.source, e.target))
        if not minimized:
            nodes = set(t.nodes) & seeds.seed_nodes()
        chosen = seeds.chosen_seeds(nodes)
        rep = min(nodes)
        seed_tuple = tuple(chosen[i] if not seeds.universal[i] else rep for i in range(seeds.m))
        rt = ResultTree(tuple(sorted(minimized)), tuple(sorted(nodes)), seed_tuple, rep)
        if rt.identity() not in state.results:
            state.results[rt.identity()] = rt
            state.stats.results_found += 1

    def keep(t: _GenTree) -> bool:
        ident = t.identity()
        if ident in memory:
            state.stats.trees_pruned += 1
            return False
        memory.add(ident)
        state.stats.provenances_built += 1
        if t.covered == seeds.full_mask:
            report(t)
            return False
        return True

    def index(t: _GenTree) -> None:
        for n in t.nodes:
            by_node_cov.setdefault((n, t.covered), []).append(t)

    def merge_round(t: _GenTree, generation: list[_GenTree]) -> None:
        queue = [t]
        while queue:
            cur = queue.pop(0)
            seen: set[int] = set()
            for n in sorted(cur.nodes):
                allowed = seeds.full_mask & ~(cur.covered & ~seeds.bits(n))
                for mask in _submasks(allowed):
                    for partner in list(by_node_cov.get((n, mask), ())):
                        if id(partner) in seen or not partner.key:
                            continue
                        seen.add(id(partner))
                        if len(cur.nodes & partner.nodes) != 1:
                            continue
                        if state.max_edges is not None and len(cur.key) + len(partner.key) > state.max_edges:
                            continue
                        merged = _GenTree(
                            tuple(sorted(cur.key + partner.key)),
                            cur.nodes | partner.nodes,
                            cur.covered | partner.covered,
                        )
                        if keep(merged):
                            generation.append(merged)
                            index(merged)
                            if aggressive:
                                queue.append(merged)

    current: list[_GenTree] = []
    started: set[int] = set()
    for orig in seeds.active:
        for s in sorted(seeds.sets[orig]):
            if s in started:
                continue
            if s not in g.nodes:
                raise SeedSetError(f"seed {s} is not a graph node")
            started.add(s)
            t = _GenTree((), frozenset((s,)), seeds.bits(s))
            if keep(t):
                current.append(t)

    while current:
        if state.deadline_passed():
            state.stats.timed_out = True
            return
        nxt: list[_GenTree] = []
        for t in current:
            if state.deadline_passed():
                state.stats.timed_out = True
                return
            for n in sorted(t.nodes):
                for e in g.adjacent_edges(n):
                    edge = g.edges[e]
                    if state.labels_ok is not None and edge.label not in state.labels_ok:
                        continue
                    far = g.other_endpoint(e, n)
                    if far in t.nodes:
                        continue
                    far_bits = seeds.bits(far)
                    if far_bits & t.covered:
                        continue
                    if state.max_edges is not None and len(t.key) + 1 > state.max_edges:
                        continue
                    grown = _GenTree(
                        tuple(sorted(t.key + (e,))), t.nodes | {far}, t.covered | far_bits
                    )
                    if keep(grown):
                        nxt.append(grown)
                        index(grown)
                        if merging:
                            merge_round(grown, nxt)
        current = nxt


# ---------------------------------------------------------------------------
# Entry point


def run_search(g: Graph, seeds: SeedSets, cfg: SearchConfig) -> tuple[list[ResultTree], SearchStats]:
    """Run the configured algorithm to exhaustion (or deadline) and report results.

    Returns the deduplicated results in canonical order (scored and top-k
    restricted when the filters ask for it) together with the run counters.
    A timeout is a normal outcome flagged in ``stats.timed_out``.
    """
    if cfg.algorithm in GENERATION_ALGORITHMS:
        state = SearchState(g, seeds, cfg)
        _run_generations(state)
        results = list(state.results.values())
        if state.uni:
            # generation trees grow from any node in any direction, so the
            # directed-tree restriction is applied on the reported results
            kept = []
            for rt in results:
                if not rt.edges:
                    kept.append(rt)
                    continue
                root = directed_root(g, rt.edges)
                if root is not None:
                    kept.append(replace(rt, root=root))
            results = kept
            state.stats.results_found = len(results)
    else:
        state = init_search(g, seeds, cfg)
        _drain(state)
        results = list(state.results.values())
    results.sort(key=lambda rt: (len(rt.edges), rt.edges, rt.nodes))
    results = apply_score_topk(results, cfg.filters, g)
    return results, state.stats


# ---------------------------------------------------------------------------
# Completeness guarantees


def guaranteed_found(algorithm: str, m: int, cls: Classification) -> bool:
    """Whether the algorithm is guaranteed to report a result of this shape.

    The unpruned algorithms find everything. Edge-set pruning is complete
    for up to two seed sets; re-rooting extends that to results whose pieces
    are all paths; sparing extends it to single-piece spiders; the combined
    algorithm is complete for up to three seed sets and finds every result
    whose pieces all have at most three leaves or are all spiders.
    """
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    if algorithm in GENERATION_ALGORITHMS or algorithm == "gam":
        return True
    if algorithm == "esp":
        return m <= 2
    if algorithm == "moesp":
        return m <= 2 or cls.max_piece_leaves <= 2
    if algorithm == "lesp":
        return m <= 2 or (len(cls.pieces) == 1 and cls.piece_is_spider[0])
    # molesp
    return m <= 3 or cls.max_piece_leaves <= 3 or cls.all_spiders

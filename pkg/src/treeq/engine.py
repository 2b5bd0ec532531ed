"""Query orchestration: pattern tables, seed-set derivation, tree searches, final join."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any

from .bindings import UNIT_TABLE, BindingTable, evaluate_bgp, natural_join, project
from .graph import Graph
from .lang import Predicate, QueryAst, ValidatedQuery, satisfies, validate_query
from .search import SearchConfig, SearchStats, run_search
from .trees import SeedSets


class EngineError(ValueError):
    pass


@dataclass(frozen=True)
class QueryResult:
    columns: tuple[str, ...]
    rows: tuple[tuple[Any, ...], ...]  # node/edge ids and ResultTree values
    partial: bool = False


def compute_seed_sets(
    g: Graph, query: ValidatedQuery, bgp_tables: list[BindingTable]
) -> list[SeedSets | None]:
    """Derive one seed-set group per tree pattern from the pattern tables.

    A member variable bound in some pattern table contributes the projection
    of that table (restricted by the member's own predicate when present).
    An unbound member contributes the nodes satisfying every condition placed
    on its variable anywhere in the query (an embedding must satisfy them
    all, so a variable shared between tree patterns is constrained by each
    occurrence); with no conditions at all it is universal. ``None`` marks a
    tree pattern with an empty non-universal seed set, which empties the
    whole query result.
    """
    ast = query.ast
    conditions_on: dict[str, list] = {}
    for ctp in ast.ctps:
        for member in ctp.members:
            conditions_on.setdefault(member.var, []).extend(member.conditions)
    out: list[SeedSets | None] = []
    for ci, ctp in enumerate(ast.ctps):
        sets: list[frozenset[int]] = []
        universal: list[bool] = []
        empty = False
        for member in ctp.members:
            bound: BindingTable | None = None
            for table in bgp_tables:
                if member.var in table.columns:
                    bound = table
                    break
            if bound is not None:
                if bound.kind_of(member.var) != "node":
                    raise EngineError(
                        f"tree pattern {ci}: member ?{member.var} is bound to edges, seeds must be nodes"
                    )
                nodes = {row[bound.columns.index(member.var)] for row in bound.rows}
                if member.conditions:
                    nodes = {n for n in nodes if satisfies(member, g, n, "node")}
                sets.append(frozenset(nodes))
                universal.append(False)
                empty = empty or not nodes
            else:
                combined = Predicate(member.var, tuple(conditions_on[member.var]))
                if combined.conditions:
                    nodes = frozenset(n for n in g.nodes if satisfies(combined, g, n, "node"))
                    sets.append(nodes)
                    universal.append(False)
                    empty = empty or not nodes
                else:
                    sets.append(frozenset())
                    universal.append(True)
        out.append(None if empty else SeedSets(sets, universal))
    return out


def _ctp_timeout(ctp_filters, ast: QueryAst, default_ms: int | None) -> int | None:
    if ctp_filters.timeout_ms is not None:
        return ctp_filters.timeout_ms
    # one stated budget applies to every tree pattern of the query
    for other in ast.ctps:
        if other.filters.timeout_ms is not None:
            return other.filters.timeout_ms
    return default_ms


def evaluate_query(
    g: Graph,
    query: QueryAst | ValidatedQuery,
    *,
    algorithm: str = "molesp",
    timeout_ms: int | None = None,
    priority: str = "smallest",
    multi_queue: bool | None = None,
) -> QueryResult:
    """Evaluate a query: pattern tables, then seed sets, then one search per
    tree pattern with its filters pushed, then the natural join projected on
    the head.

    ``timeout_ms`` is the per-search default used when a tree pattern does
    not state its own budget; a search hitting its budget marks the result
    partial.
    """
    vq = query if isinstance(query, ValidatedQuery) else validate_query(query)
    ast = vq.ast
    head = tuple(ast.head)

    tables = [evaluate_bgp(g, b, ast.synthetic) for b in ast.bgps]
    if any(len(t) == 0 for t in tables):
        return QueryResult(head, (), False)
    per_ctp_seeds = compute_seed_sets(g, vq, tables)
    if any(s is None for s in per_ctp_seeds):
        return QueryResult(head, (), False)

    partial = False
    for ctp, seeds in zip(ast.ctps, per_ctp_seeds):
        filters = replace(ctp.filters, timeout_ms=_ctp_timeout(ctp.filters, ast, timeout_ms))
        cfg = SearchConfig(algorithm=algorithm, filters=filters, priority=priority, multi_queue=multi_queue)
        results, stats = run_search(g, seeds, cfg)
        partial = partial or stats.timed_out
        columns = tuple(m.var for m in ctp.members) + (ctp.tree_var,)
        kinds = ("node",) * len(ctp.members) + ("tree",)
        rows = frozenset(rt.seed_tuple + (rt,) for rt in results)
        tables.append(BindingTable(columns, kinds, rows))

    joined = UNIT_TABLE
    for table in tables:
        joined = natural_join(joined, table)
    projected = project(joined, head)
    rows = tuple(projected.sorted_rows())
    return QueryResult(head, rows, partial)


def run_query_searches(
    g: Graph,
    query: QueryAst | ValidatedQuery,
    *,
    algorithm: str = "molesp",
    timeout_ms: int | None = None,
) -> list[tuple[SeedSets | None, list, SearchStats | None]]:
    """Run only the tree searches of a query, one entry per tree pattern.

    Used by benchmarking to time the searches without the join phase.
    """
    vq = query if isinstance(query, ValidatedQuery) else validate_query(query)
    ast = vq.ast
    tables = [evaluate_bgp(g, b, ast.synthetic) for b in ast.bgps]
    per_ctp_seeds = compute_seed_sets(g, vq, tables)
    out = []
    for ctp, seeds in zip(ast.ctps, per_ctp_seeds):
        if seeds is None:
            out.append((None, [], None))
            continue
        filters = replace(ctp.filters, timeout_ms=_ctp_timeout(ctp.filters, ast, timeout_ms))
        cfg = SearchConfig(algorithm=algorithm, filters=filters)
        results, stats = run_search(g, seeds, cfg)
        out.append((seeds, results, stats))
    return out


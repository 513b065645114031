"""Presentation cleanup and isomorphism search.

Raw mutation output usually presents its algebra with superfluous arrows
(an arrow equal to a combination of longer paths) and redundant relations.
cancel_unit_relations eliminates the former by substitution, and
prune_redundant_relations drops any relation already in the ideal of the
others.  Neither changes the presented algebra up to isomorphism.

find_isomorphism searches for an explicit isomorphism between two bound
quiver presentations: a vertex bijection, an arrow bijection respecting it,
and a nonzero scalar per arrow, such that both induced maps send relations
into the other ideal.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Mapping

from .core import (
    Arrow,
    Path,
    PathExpr,
    Presentation,
    VertexId,
    compose_expr,
    path_expr,
    unit_expr,
    zero_expr,
)
from .engine import build_table, membership_engine
from .errors import NotIsomorphic, SearchBudgetExceeded, SubstitutionCycle

ONE = Fraction(1)


def cancel_unit_relations(p: Presentation) -> Presentation:
    """Substitute away every arrow that some relation makes redundant.

    A relation with a length-one term c*a expresses the arrow a as the
    combination -(1/c) times its remaining terms.  The arrow and relation
    are removed and the replacement is expanded into every other relation,
    repeatedly, until no length-one term is left.  Raises SubstitutionCycle
    if an arrow's replacement mentions the arrow itself.
    """
    arrows = list(p.arrows)
    relations = list(p.relations)
    while True:
        found = None
        for idx, rel in enumerate(relations):
            for path, coef in rel.sorted_terms():
                if len(path.arrows) == 1:
                    found = (idx, path, coef)
                    break
            if found:
                break
        if found is None:
            break
        idx, path, coef = found
        name = path.arrows[0]
        rel = relations.pop(idx)
        replacement = (rel - unit_expr(path).scaled(coef)).scaled(-ONE / coef)
        if any(name in q.arrows for q in replacement.terms):
            raise SubstitutionCycle(
                f"arrow {name} appears in its own replacement {name} ="
                f" combination containing {name}"
            )
        arrows = [a for a in arrows if a.name != name]
        by_name = {a.name: a for a in arrows}
        relations = [
            r
            for r in (_substitute(rel2, name, replacement, by_name) for rel2 in relations)
            if r.terms
        ]
    return Presentation(p.vertices, tuple(arrows), tuple(relations), name=p.name)


def _substitute(rel: PathExpr, name: str, repl: PathExpr, by_name) -> PathExpr:
    acc = zero_expr(rel.source, rel.target)
    for path, coef in rel.terms.items():
        if name not in path.arrows:
            acc = acc + PathExpr(rel.source, rel.target, {path: coef})
            continue
        term = unit_expr(Path(path.source, path.source, ()))
        for arrow_name in path.arrows:
            if arrow_name == name:
                factor = repl
            else:
                a = by_name[arrow_name]
                factor = unit_expr(Path(a.source, a.target, (arrow_name,)))
            term = compose_expr(factor, term)
        acc = acc + term.scaled(coef)
    return acc


def _relation_key(r: PathExpr):
    return (
        r.leading_path().word_key(),
        tuple((q.word_key(), c) for q, c in r.sorted_terms()),
    )


def prune_redundant_relations(p: Presentation, degree_cap: int | None = None) -> Presentation:
    """Drop every relation contained in the ideal of the remaining ones.

    Relations are visited in a canonical order so the output is
    reproducible; each candidate is tested by completing the others and
    reducing it.
    """
    if len(p.relations) <= 1:
        return p
    rels = sorted(p.relations, key=_relation_key)
    dropped: set[int] = set()
    for idx in range(len(rels)):
        others = [rels[k] for k in range(len(rels)) if k != idx and k not in dropped]
        if not others:
            continue
        engine = membership_engine(p, others, degree_cap)
        if engine.reduces_to_zero(rels[idx]):
            dropped.add(idx)
    kept = tuple(r for k, r in enumerate(rels) if k not in dropped)
    return Presentation(p.vertices, p.arrows, kept, name=p.name)


def cleanup(p: Presentation, degree_cap: int | None = None) -> Presentation:
    """Cancel unit relations, then prune redundant ones."""
    return prune_redundant_relations(cancel_unit_relations(p), degree_cap)


@dataclass(frozen=True)
class IsoWitness:
    """An explicit isomorphism of bound quiver presentations.

    arrow_map sends each arrow name of the source to a pair (arrow name of
    the target, scalar): the induced algebra map sends the arrow to scalar
    times the image arrow.
    """

    vertex_map: Mapping[VertexId, VertexId]
    arrow_map: Mapping[str, tuple[str, Fraction]]


def _vertex_invariant(p: Presentation, t, v: VertexId):
    outs = p.arrows_out[v]
    ins = p.arrows_in[v]
    loops = sum(1 for a in outs if a.target == v)
    from_v = len(t.basis_from(v))
    into_v = sum(1 for q in t.basis if q.target == v)
    return (len(outs), len(ins), loops, from_v, into_v)


def _scalar_candidates(p1: Presentation, p2: Presentation) -> list[Fraction]:
    vals = {ONE, -ONE}
    for p in (p1, p2):
        for r in p.relations:
            cs = list(r.terms.values())
            for c in cs:
                vals.update((c, -c, 1 / c, -1 / c))
            for x in cs:
                for y in cs:
                    vals.add(x / y)
                    vals.add(-x / y)
    ordered = sorted(
        vals, key=lambda f: (abs(f.numerator) + f.denominator, f < 0, f)
    )
    return ordered[:32]


def _map_expr(r: PathExpr, vmap, amap, scalars) -> PathExpr:
    terms = []
    for q, c in r.terms.items():
        factor = c
        for nm in q.arrows:
            factor *= scalars[nm]
        image = Path(vmap[q.source], vmap[q.target], tuple(amap[nm] for nm in q.arrows))
        terms.append((image, factor))
    return path_expr(terms, vmap[r.source], vmap[r.target])


def find_isomorphism(
    p1: Presentation,
    p2: Presentation,
    degree_cap: int | None = None,
    budget: int = 500_000,
) -> IsoWitness:
    """Search for an isomorphism from p1 to p2.

    Vertex assignments are pruned by algebra-level invariants and arrow
    counts between assigned pairs; arrow matchings are enumerated within
    parallel classes; scalars are drawn from the coefficients appearing in
    either presentation, their inverses and ratios.  A candidate is
    accepted when both induced maps preserve the ideals.  Raises
    NotIsomorphic when the search space is exhausted and
    SearchBudgetExceeded when the node budget runs out.
    """
    if len(p1.vertices) != len(p2.vertices) or len(p1.arrows) != len(p2.arrows):
        raise NotIsomorphic("vertex or arrow counts differ")
    t1 = build_table(p1, degree_cap)
    t2 = build_table(p2, degree_cap)
    if t1.dimension() != t2.dimension() or t1.nil_index != t2.nil_index:
        raise NotIsomorphic(
            f"algebra dimensions differ: {t1.dimension()} (nil {t1.nil_index})"
            f" vs {t2.dimension()} (nil {t2.nil_index})"
        )
    inv1 = {v: _vertex_invariant(p1, t1, v) for v in p1.vertices}
    inv2 = {w: _vertex_invariant(p2, t2, w) for w in p2.vertices}
    if sorted(inv1.values()) != sorted(inv2.values()):
        raise NotIsomorphic("vertex invariant profiles differ")

    candidates = {
        v: [w for w in p2.vertices if inv2[w] == inv1[v]] for v in p1.vertices
    }
    vorder = sorted(p1.vertices, key=lambda v: (len(candidates[v]), str(v)))
    out1 = {v: {} for v in p1.vertices}
    for a in p1.arrows:
        out1[a.source][a.target] = out1[a.source].get(a.target, 0) + 1
    out2 = {w: {} for w in p2.vertices}
    for a in p2.arrows:
        out2[a.source][a.target] = out2[a.source].get(a.target, 0) + 1

    scalar_pool = _scalar_candidates(p1, p2)
    vmap: dict[VertexId, VertexId] = {}
    used: set[VertexId] = set()
    nodes = 0

    def tick():
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise SearchBudgetExceeded(
                f"isomorphism search exceeded {budget} nodes"
            )

    def block_counts_ok(v, w):
        for u, x in vmap.items():
            if out1[v].get(u, 0) != out2[w].get(x, 0):
                return False
            if out1[u].get(v, 0) != out2[x].get(w, 0):
                return False
        return out1[v].get(v, 0) == out2[w].get(w, 0)

    found: list[IsoWitness] = []

    def assign_vertex(k: int) -> bool:
        tick()
        if k == len(vorder):
            return assign_arrows()
        v = vorder[k]
        for w in candidates[v]:
            if w in used:
                continue
            if not block_counts_ok(v, w):
                continue
            vmap[v] = w
            used.add(w)
            if assign_vertex(k + 1):
                return True
            del vmap[v]
            used.discard(w)
        return False

    def assign_arrows() -> bool:
        blocks1: dict[tuple[VertexId, VertexId], list[str]] = {}
        for a in p1.arrows:
            blocks1.setdefault((a.source, a.target), []).append(a.name)
        blocks2: dict[tuple[VertexId, VertexId], list[str]] = {}
        for a in p2.arrows:
            blocks2.setdefault((a.source, a.target), []).append(a.name)
        pairs = []
        for key, names in sorted(blocks1.items(), key=lambda kv: (str(kv[0][0]), str(kv[0][1]))):
            image_key = (vmap[key[0]], vmap[key[1]])
            names2 = blocks2.get(image_key, [])
            if len(names2) != len(names):
                return False
            pairs.append((names, names2))

        amap: dict[str, str] = {}

        def assign_block(k: int) -> bool:
            tick()
            if k == len(pairs):
                return assign_scalars(dict(amap))
            names, names2 = pairs[k]
            for perm in permutations(names2):
                for nm, img in zip(names, perm):
                    amap[nm] = img
                if assign_block(k + 1):
                    return True
                for nm in names:
                    del amap[nm]
            return False

        return assign_block(0)

    def assign_scalars(amap: dict[str, str]) -> bool:
        scalars: dict[str, Fraction] = {}
        rels = sorted(
            p1.relations,
            key=lambda r: len({nm for q in r.terms for nm in q.arrows}),
        )

        def relation_holds(r) -> bool:
            return t2.engine.reduces_to_zero(_map_expr(r, vmap, amap, scalars))

        def choose(relidx: int, names: list[str], j: int) -> bool:
            tick()
            if j == len(names):
                if not relation_holds(rels[relidx]):
                    return False
                return sat(relidx + 1)
            nm = names[j]
            for c in scalar_pool:
                scalars[nm] = c
                if choose(relidx, names, j + 1):
                    return True
            del scalars[nm]
            return False

        def sat(relidx: int) -> bool:
            if relidx == len(rels):
                return final_check()
            names = sorted(
                {nm for q in rels[relidx].terms for nm in q.arrows} - scalars.keys()
            )
            return choose(relidx, names, 0)

        def final_check() -> bool:
            for a in p1.arrows:
                scalars.setdefault(a.name, ONE)
            for r in p1.relations:
                if not relation_holds(r):
                    return False
            inv_vmap = {w: v for v, w in vmap.items()}
            inv_amap = {img: nm for nm, img in amap.items()}
            inv_scalars = {amap[nm]: 1 / c for nm, c in scalars.items()}
            for r in p2.relations:
                image = _map_expr(r, inv_vmap, inv_amap, inv_scalars)
                if not t1.engine.reduces_to_zero(image):
                    return False
            found.append(IsoWitness(dict(vmap), {nm: (amap[nm], scalars[nm]) for nm in amap}))
            return True

        return sat(0)

    if assign_vertex(0):
        return found[0]
    raise NotIsomorphic("search space exhausted without finding an isomorphism")

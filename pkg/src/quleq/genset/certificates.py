"""Witness terms over a generating set for every principal element ``qum(a, b)``.

Every element of the filter is a join of principal elements, so a verified term for each
ordered pair ``(a, b)`` shows that ``E`` generates the filter.  The terms follow the
construction of the generating set:

``mu``            ``qum(x, y) ^ qum(y, x)`` for two thread-mates in different components
``thread``        ``(x, y)`` inside one thread: the Quo(D) witness moved by ``phi_D``
``bridge``        extremals without a common thread: route through both selectors
``selector``      pairs inside a selector component: closure of its local generators
``edge``          reversed cover outside the selectors: ``qum(S) ^ bridge(v*, u_*)``
``reversed``      ``(b, a)`` with ``a < b``: join over the reversed covers in ``[a, b]``
``cross``         other pairs across components: ``beta ^ gamma``
``two-selector``  incomparable pairs in one component: meet over both selectors
"""

from __future__ import annotations

from ..errors import BadInput, VerificationFailed
from ..latterm import Const, EvalContext, LatTerm, Var, evaluate, join_of, meet_of
from ..quolattice import QUO_OPS, close_with_witnesses, qum_pair
from ..relation import QuasiRel
from .synth import GenPlan

__all__ = ["build_certificates", "verify_certificates", "eval_context"]


def eval_context(plan: GenPlan) -> EvalContext:
    p = plan.poset
    return EvalContext(plan.E, QUO_OPS, {"bot": p.order, "top": QuasiRel.full(p.n)})


class _Builder:
    def __init__(self, plan: GenPlan):
        self.plan = plan
        self.p = plan.poset
        self.comp_of = self.p.component_of
        self.comps = self.p.components
        self.cache: dict[tuple[int, int], LatTerm] = {}
        self.step: dict[tuple[int, int], str] = {}
        self.extremal = set(self.p.extremals)
        self.threads_of: dict[int, list[int]] = {}
        for t, th in enumerate(plan.threads):
            for v in th:
                self.threads_of.setdefault(v, []).append(t)
        self.selector_of = {s.component: s for s in plan.selectors}
        self.sel_comps = [s.component for s in plan.selectors]
        self.h_terms = [self._thread_terms(t) for t in range(len(plan.threads))]
        self.strip_of = {}
        for j, strip in enumerate(plan.strips):
            for e in strip:
                self.strip_of[e] = j
        self.local: dict[int, dict] = {}
        self._mu = None

    # -- building blocks ---------------------------------------------------------
    def _thread_terms(self, t: int) -> dict[tuple[int, int], LatTerm]:
        plan = self.plan
        hset = plan.h_sets[t]
        gen_terms = [Var(i) for i in plan.h_indices[t]]
        memo: dict = {}
        th = plan.threads[t]
        out = {}
        pairs = [(x, y) for x in range(hset.m) for y in range(hset.m) if x != y]
        for k, el in hset.closure.found.items():
            i, j = pairs[k]
            out[(th[i], th[j])] = hset.closure.term(el, gen_terms, memo=memo)
        return out

    def mu(self) -> LatTerm:
        if self._mu is None:
            th = self.plan.threads[0]
            x, y = th[0], th[1]
            self._mu = meet_of(self.h_terms[0][(x, y)], self.h_terms[0][(y, x)])
        return self._mu

    def strip_term(self, j: int) -> LatTerm:
        plan = self.plan
        if plan.mode == "A":
            return Var(plan.g_indices[j])
        return meet_of(*[Var(plan.g_indices[k]) for k, X in enumerate(plan.g0) if j in X])

    def _selector_local(self, cidx: int) -> dict:
        if cidx in self.local:
            return self.local[cidx]
        info = self.selector_of[cidx]
        elems = info.elements
        sub = self.p.subposet(elems)
        pos = {v: i for i, v in enumerate(elems)}
        gens = [QuasiRel.full(sub.n)] + list(info.y_local)
        gen_terms: list[LatTerm] = [Var(info.nabla)] + [Var(i) for i in info.y_indices]
        for x, y in sub.covers:
            gens.append(qum_pair(sub, y, x))
            u, v = elems[x], elems[y]  # u covered by v in p
            gen_terms.append(meet_of(self.strip_term(self.strip_of[(v, u)]), Var(info.nabla)))
        targets = [(a, b) for a in elems for b in elems if a != b and not self.p.leq(a, b)]
        target_rels = [qum_pair(sub, pos[a], pos[b]) for a, b in targets]
        res = close_with_witnesses(
            gens,
            targets=target_rels,
            constants={"bot": sub.order, "top": QuasiRel.full(sub.n)},
            max_elements=None,
        )
        if res.missing:
            raise VerificationFailed(f"selector component {cidx}: local generators miss {len(res.missing)} targets")
        memo: dict = {}
        consts = {"top": Var(info.nabla), "bot": self.mu()}
        terms = {targets[t]: res.target_term(t, gen_terms, consts, memo) for t in range(len(targets))}
        self.local[cidx] = terms
        return terms

    # -- the schedule ------------------------------------------------------------
    def cert(self, a: int, b: int) -> LatTerm:
        key = (a, b)
        if key in self.cache:
            return self.cache[key]
        term, step = self._cert(a, b)
        self.cache[key] = term
        self.step[key] = step
        return term

    def _cert(self, a, b):
        p = self.p
        if a == b or p.leq(a, b):
            return self.mu(), "mu"
        ca, cb = self.comp_of[a], self.comp_of[b]
        if ca == cb:
            if ca in self.selector_of:
                return self._selector_local(ca)[(a, b)], "selector"
            if p.leq(b, a):
                return self._reversed(a, b), "reversed"
            return self._two_selector(a, b), "two-selector"
        if a in self.extremal and b in self.extremal:
            for t in self.threads_of[a]:
                if (a, b) in self.h_terms[t]:
                    return self.h_terms[t][(a, b)], "thread"
            return self._bridge(a, b), "bridge"
        return self._cross(a, b), "cross"

    def _thread_partner(self, x: int, cidx: int) -> int:
        """The element of component ``cidx`` on the first thread through extremal ``x``."""
        t = self.threads_of[x][0]
        return self.plan.threads[t][cidx]

    def _bridge(self, x: int, y: int) -> LatTerm:
        """Meet over both selectors of ``qum(x, x_i) v qum(x_i, y_i) v qum(y_i, y)``."""
        factors = []
        for s in self.sel_comps:
            xs, ys = self._thread_partner(x, s), self._thread_partner(y, s)
            hops = [(x, xs), (xs, ys), (ys, y)]
            parts = [self.cert(u, v) for u, v in hops if u != v and not self.p.leq(u, v)]
            if parts:
                factors.append(join_of(*parts))
        if not factors:
            raise BadInput(f"no route for ({x}, {y})")
        return meet_of(*factors)

    def _edge(self, v: int, u: int) -> LatTerm:
        """``qum(v, u)`` for a cover ``u < v``."""
        cidx = self.comp_of[v]
        if cidx in self.selector_of:
            return self._selector_local(cidx)[(v, u)]
        s = self.strip_term(self.strip_of[(v, u)])
        top = self._max_above(v)
        bottom = self._min_below(u)
        return meet_of(s, self._bridge(top, bottom))

    def _reversed(self, top: int, bottom: int) -> LatTerm:
        """``qum(top, bottom)`` for ``bottom < top``: join over reversed covers in between."""
        p = self.p
        covers = [(y, x) for x, y in p.covers if p.leq(bottom, x) and p.leq(y, top)]
        key_terms = []
        for v, u in covers:
            k = (v, u)
            if k not in self.cache:
                self.cache[k] = self._edge(v, u)
                self.step[k] = "edge"
            key_terms.append(self.cache[k])
        return join_of(*key_terms)

    def _max_above(self, v: int) -> int:
        comp = self.comps[self.comp_of[v]]
        return min(w for w in comp.maxima if self.p.leq(v, w))

    def _min_below(self, u: int) -> int:
        comp = self.comps[self.comp_of[u]]
        return min(w for w in comp.minima if self.p.leq(w, u))

    def _cross(self, a: int, b: int) -> LatTerm:
        """``beta ^ gamma`` with ``beta = qum(a*, b*) v qum(b*, b)`` and
        ``gamma = qum(a, a_*) v qum(a_*, b_*)``."""
        a_hi, b_hi = self._max_above(a), self._max_above(b)
        a_lo, b_lo = self._min_below(a), self._min_below(b)
        beta = [self.cert(a_hi, b_hi)] + ([self.cert(b_hi, b)] if b_hi != b else [])
        gamma = ([self.cert(a, a_lo)] if a_lo != a else []) + [self.cert(a_lo, b_lo)]
        return meet_of(join_of(*beta), join_of(*gamma))

    def _two_selector(self, a: int, b: int) -> LatTerm:
        """``qum(a, b)`` as the meet over both selectors of ``qum(a, s_i) v qum(s_i, b)``."""
        factors = []
        for s in self.sel_comps:
            si = self.comps[s].extremals[0]
            factors.append(join_of(self.cert(a, si), self.cert(si, b)))
        return meet_of(*factors)


def _chain_certificates(plan: GenPlan) -> tuple[dict, dict]:
    p = plan.poset
    iedges = list(p.iedges)
    n_e = len(iedges)
    bottom_free = n_e >= 2 and not set.intersection(*[set(X) for X in plan.g0])
    mu = meet_of(*[Var(i) for i in plan.g_indices]) if bottom_free else Const("bot")
    atom = {}
    for j, e in enumerate(iedges):
        atom[e] = meet_of(*[Var(plan.g_indices[k]) for k, X in enumerate(plan.g0) if j in X])
    certs, steps = {}, {}
    for a in range(p.n):
        for b in range(p.n):
            if a == b:
                continue
            if p.leq(a, b):
                certs[(a, b)], steps[(a, b)] = mu, "mu"
            else:
                parts = [atom[(y, x)] for x, y in p.covers if p.leq(b, x) and p.leq(y, a)]
                certs[(a, b)], steps[(a, b)] = join_of(*parts), "boolean"
    return certs, steps


def build_certificates(plan: GenPlan, verify: bool = True) -> GenPlan:
    """Attach a witness term for every ordered pair ``(a, b)``, ``a != b``; with
    ``verify`` each term is evaluated and compared bit-exactly with ``qum(a, b)``."""
    p = plan.poset
    if plan.mode == "C":
        plan.certificates, plan.steps = _chain_certificates(plan)
    else:
        b = _Builder(plan)
        for x in range(p.n):
            for y in range(p.n):
                if x != y:
                    b.cert(x, y)
        plan.certificates = {k: v for k, v in b.cache.items() if k[0] != k[1]}
        plan.steps = {k: b.step[k] for k in plan.certificates}
        for comp in p.components:
            edges = [plan.certificates[e] for e in comp.iedges]
            if edges:
                plan.extra_certificates[("nabla", comp.index)] = join_of(*edges)
    if verify:
        verify_certificates(plan)
    return plan


def verify_certificates(plan: GenPlan) -> int:
    """Evaluate every certificate; raise :class:`VerificationFailed` on the first mismatch.
    Returns the number of checked terms."""
    from ..quolattice import nabla_plus

    p = plan.poset
    ctx = eval_context(plan)
    memo: dict = {}
    checked = 0
    for (a, b), term in sorted(plan.certificates.items()):
        got = evaluate(term, ctx, memo)
        want = qum_pair(p, a, b)
        if got != want:
            raise VerificationFailed(
                f"certificate for ({a}, {b}) built by step {plan.steps.get((a, b), '?')!r} evaluates to {got!r}, "
                f"expected {want!r}"
            )
        checked += 1
    for key, term in plan.extra_certificates.items():
        _, cidx = key
        want = nabla_plus(p, p.components[cidx].elements)
        if evaluate(term, ctx, memo) != want:
            raise VerificationFailed(f"join of reversed covers of component {cidx} is not its full relation")
        checked += 1
    return checked

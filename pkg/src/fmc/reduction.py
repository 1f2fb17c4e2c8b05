"""Beta/eta rewriting, permutation equivalence, strategies, parallel reduction.

A redex site names the sequence that holds the redex by a *path*: the
indices of the push actions whose arguments one descends into, starting at
the top-level term.  Within that sequence ``i`` is the push and ``j`` the
matching pop (or ``j == i`` for a forced thunk).
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

from .syntax import (
    NIL, Force, HeadContext, Pop, Push, Term, Thunk, Var, all_names, alpha_key,
    bv, compose, fresh_name, print_term, rename, strip_marks, substitute, value_fv,
)


class Strategy(enum.Enum):
    LO = "lo"        # leftmost-outermost
    LI = "li"        # leftmost-innermost: inside arguments first
    SPINE = "spine"  # never inside push arguments
    FULL = "full"    # every site, leftmost-outermost order


@dataclass(frozen=True)
class RedexSite:
    path: tuple
    i: int
    j: int
    kind: str = "beta"
    needs_refresh: bool = False


class FuelExhausted(Exception):
    def __init__(self, term: Term, steps: int, looping: bool = False):
        self.term = term
        self.steps = steps
        self.looping = looping
        hint = " (a term repeated: the reduction loops)" if looping else ""
        super().__init__(f"no normal form within {steps} steps{hint}")


class InvalidSite(ValueError):
    pass


# ---------------------------------------------------------------------------
# Navigation


def _arg_term(value):
    return value.body if isinstance(value, Thunk) else value


def _with_arg(value, body: Term):
    return Thunk(body) if isinstance(value, Thunk) else body


def subterm(term: Term, path: tuple) -> Term:
    for k in path:
        act = term.actions[k]
        if not isinstance(act, Push):
            raise InvalidSite(f"path step {k} is not a push")
        term = _arg_term(act.arg)
    return term


def replace_at(term: Term, path: tuple, new: Term) -> Term:
    if not path:
        return new
    k = path[0]
    act = term.actions[k]
    inner = replace_at(_arg_term(act.arg), path[1:], new)
    acts = list(term.actions)
    acts[k] = Push(_with_arg(act.arg, inner), act.loc, act.mark)
    return Term(tuple(acts))


# ---------------------------------------------------------------------------
# Finding redexes


def partner(actions: tuple, i: int) -> int | None:
    """Index of the pop that forms a beta redex with the push at ``i``."""
    loc = actions[i].loc
    for k in range(i + 1, len(actions)):
        act = actions[k]
        if isinstance(act, Pop):
            if act.loc == loc:
                return k
        elif isinstance(act, Push):
            if act.loc == loc:
                return None
        else:
            return None
    return None


def _local_sites(term: Term, path: tuple):
    acts = term.actions
    for i, act in enumerate(acts):
        if isinstance(act, Push):
            j = partner(acts, i)
            if j is not None:
                h_binders = {a.name for a in acts[i + 1:j] if isinstance(a, Pop)}
                clash = bool(h_binders & value_fv(act.arg))
                yield i, RedexSite(path, i, j, "beta", clash)
        elif isinstance(act, Force) and isinstance(act.value, Thunk):
            yield i, RedexSite(path, i, i, "force")


def find_redexes(term: Term, strategy: Strategy = Strategy.FULL) -> list:
    """Redex sites allowed by ``strategy``.

    LO/FULL/SPINE list sites in leftmost-outermost order; LI lists sites inside
    an argument before the site of the push carrying it.
    """
    out: list = []
    _collect(term, (), strategy, out)
    return out


def _collect(term: Term, path: tuple, strategy: Strategy, out: list):
    local = dict(_local_sites(term, path))
    for i, act in enumerate(term.actions):
        if strategy is not Strategy.LI and i in local:
            out.append(local[i])
        if isinstance(act, Push) and strategy is not Strategy.SPINE:
            _collect(_arg_term(act.arg), path + (i,), strategy, out)
        if strategy is Strategy.LI and i in local:
            out.append(local[i])


def has_redex(term: Term) -> bool:
    return bool(find_redexes(term, Strategy.FULL))


# ---------------------------------------------------------------------------
# Contraction


def refresh_context(context: tuple, rest: Term, avoid: set):
    """Rename binders of a head context that would capture names in ``avoid``."""
    n = len(context)
    acts = tuple(context) + rest.actions
    for k in range(n):
        act = acts[k]
        if isinstance(act, Pop) and act.name in avoid:
            new = fresh_name(act.name, avoid | all_names(Term(acts)))
            later = rename(Term(acts[k + 1:]), act.name, new)
            acts = acts[:k] + (Pop(act.loc, new, act.mark),) + later.actions
    return acts[:n], Term(acts[n:])


def contract(term: Term, i: int, j: int) -> Term:
    """Contract the redex formed by actions ``i`` and ``j`` of ``term``."""
    acts = term.actions
    if i == j:
        thunk = acts[i].value
        return Term(acts[:i] + compose(thunk.body, Term(acts[i + 1:])).actions)
    push, pop = acts[i], acts[j]
    context, rest = refresh_context(acts[i + 1:j], Term(acts[j + 1:]), set(value_fv(push.arg)))
    body = substitute(push.arg, pop.name, rest)
    return Term(acts[:i] + context + body.actions)


def beta_step(term: Term, site: RedexSite) -> Term:
    sub = subterm(term, site.path)
    acts = sub.actions
    if site.kind == "force":
        if not (site.i < len(acts) and isinstance(acts[site.i], Force)
                and isinstance(acts[site.i].value, Thunk)):
            raise InvalidSite(f"no forced thunk at {site}")
    elif not (site.i < len(acts) and isinstance(acts[site.i], Push)
              and partner(acts, site.i) == site.j):
        raise InvalidSite(f"no redex at {site}")
    return replace_at(term, site.path, contract(sub, site.i, site.j))


def head_context(term: Term, site: RedexSite) -> HeadContext:
    acts = subterm(term, site.path).actions
    return HeadContext(acts[site.i + 1:site.j])


# ---------------------------------------------------------------------------
# Eta


def _is_var_term(value, name: str) -> bool:
    return isinstance(value, Term) and value.actions == (Var(name),)


def _local_eta(term: Term, path: tuple):
    acts = term.actions
    for i, act in enumerate(acts):
        if not isinstance(act, Pop) or act.name == "_":
            continue
        x = act.name
        for k in range(i + 1, len(acts)):
            b = acts[k]
            if isinstance(b, Push) and b.loc == act.loc:
                if _is_var_term(b.arg, x) and x not in Term(acts[k + 1:]).fv:
                    yield RedexSite(path, i, k, "eta")
                break
            if not isinstance(b, (Push, Pop)) or b.loc == act.loc:
                break
            if isinstance(b, Push) and x in value_fv(b.arg):
                break
            if isinstance(b, Pop) and b.name == x:
                break


def find_eta(term: Term, strategy: Strategy = Strategy.FULL) -> list:
    out: list = []

    def walk(t, path):
        for site in _local_eta(t, path):
            out.append(site)
        if strategy is not Strategy.SPINE:
            for i, act in enumerate(t.actions):
                if isinstance(act, Push):
                    walk(_arg_term(act.arg), path + (i,))

    walk(term, ())
    return out


def eta_step(term: Term, site: RedexSite) -> Term:
    sub = subterm(term, site.path)
    acts = sub.actions
    if not any(s.i == site.i and s.j == site.j for s in _local_eta(sub, ())):
        raise InvalidSite(f"no eta redex at {site}")
    return replace_at(term, site.path, Term(acts[:site.i] + acts[site.i + 1:site.j] + acts[site.j + 1:]))


# ---------------------------------------------------------------------------
# Normalization


@dataclass
class Step:
    site: RedexSite
    before: Term
    after: Term


def reduce_once(term: Term, strategy: Strategy = Strategy.LO, eta: bool = False):
    sites = find_redexes(term, strategy)
    if sites:
        return Step(sites[0], term, beta_step(term, sites[0]))
    if eta:
        sites = find_eta(term, strategy)
        if sites:
            return Step(sites[0], term, eta_step(term, sites[0]))
    return None


def reduction_sequence(term: Term, strategy: Strategy = Strategy.LO, fuel: int = 10_000,
                       eta: bool = False) -> list:
    """Steps to normal form; raises FuelExhausted past ``fuel`` steps."""
    steps = []
    seen = {alpha_key(term)}
    while True:
        st = reduce_once(term, strategy, eta)
        if st is None:
            return steps
        if len(steps) >= fuel:
            raise FuelExhausted(term, len(steps))
        steps.append(st)
        term = st.after
        key = alpha_key(term)
        if key in seen:
            raise FuelExhausted(term, len(steps), looping=True)
        if len(seen) < 100_000:
            seen.add(key)


def normalize(term: Term, strategy: Strategy = Strategy.LO, fuel: int = 10_000,
              eta: bool = False) -> Term:
    steps = reduction_sequence(term, strategy, fuel, eta)
    return steps[-1].after if steps else term


def highlight_site(term: Term, site: RedexSite) -> str:
    """Render ``term`` with the redex's two actions bracketed by « »."""
    marks = {site.path + (site.i,): ("«", "»")}
    if site.j != site.i:
        marks[site.path + (site.j,)] = ("«", "»")
    return print_term(term, marks)


def format_log(term: Term, steps: list) -> str:
    """One line per term; each line brackets the redex reduced next."""
    if not steps:
        return "     " + print_term(term)
    lines = ["     " + highlight_site(steps[0].before, steps[0].site)]
    for k, st in enumerate(steps):
        shown = highlight_site(st.after, steps[k + 1].site) if k + 1 < len(steps) else print_term(st.after)
        lines.append("-->  " + shown)
    return "\n".join(lines)


def one_step_reducts(term: Term, strategy: Strategy = Strategy.FULL, eta: bool = False) -> list:
    out = [beta_step(term, s) for s in find_redexes(term, strategy)]
    if eta:
        out += [eta_step(term, s) for s in find_eta(term, strategy)]
    return out


def reduces_to(m: Term, n: Term, eta: bool = False) -> bool:
    """Whether some single step (beta, or eta if enabled) takes m to n."""
    key = alpha_key(n)
    return any(alpha_key(r) == key for r in one_step_reducts(m, Strategy.FULL, eta))


# ---------------------------------------------------------------------------
# Permutation equivalence


class _Uniq:
    def __init__(self):
        self.n = 0

    def __call__(self) -> str:
        self.n += 1
        return f"%{self.n}"


def _unique_binders(term: Term, supply: _Uniq) -> Term:
    """Give every binder a globally unique name (never a source name)."""
    acts = term.actions
    out = []
    for k in range(len(acts)):
        act = acts[k]
        if isinstance(act, Pop):
            new = supply()
            if act.name != "_":
                acts = acts[:k + 1] + rename(Term(acts[k + 1:]), act.name, new).actions
            out.append(Pop(act.loc, new))
        elif isinstance(act, Push):
            arg = act.arg
            if isinstance(arg, Thunk):
                arg = Thunk(_unique_binders(arg.body, supply))
            else:
                arg = _unique_binders(arg, supply)
            out.append(Push(arg, act.loc))
        elif isinstance(act, Force) and isinstance(act.value, Thunk):
            out.append(Force(Thunk(_unique_binders(act.value.body, supply))))
        else:
            out.append(act)
    return Term(tuple(out))


def _depends(a, b) -> bool:
    """Whether action ``b`` (later) must stay after action ``a``."""
    if a.loc == b.loc:
        return True
    if isinstance(a, Pop) and isinstance(b, Push):
        return a.name in value_fv(b.arg)
    return False


def _sort_run(run: list) -> list:
    n = len(run)
    preds = [set() for _ in range(n)]
    for j in range(n):
        for i in range(j):
            if _depends(run[i], run[j]):
                preds[j].add(i)
    done: set = set()
    out = []
    while len(out) < n:
        ready = [k for k in range(n) if k not in done and preds[k] <= done]
        pick = min(ready, key=lambda k: (run[k].loc, 0 if isinstance(run[k], Pop) else 1))
        done.add(pick)
        out.append(run[pick])
    return out


def _canonical(term: Term) -> Term:
    out = []
    run: list = []
    for act in term.actions:
        if isinstance(act, Push):
            arg = act.arg
            arg = Thunk(_canonical(arg.body)) if isinstance(arg, Thunk) else _canonical(arg)
            run.append(Push(arg, act.loc))
        elif isinstance(act, Pop):
            run.append(act)
        else:
            out.extend(_sort_run(run))
            run = []
            if isinstance(act, Force) and isinstance(act.value, Thunk):
                act = Force(Thunk(_canonical(act.value.body)))
            out.append(act)
    out.extend(_sort_run(run))
    return Term(tuple(out))


def perm_normal_form(term: Term) -> Term:
    """Representative of the permutation class of ``term``."""
    return _canonical(_unique_binders(strip_marks(term), _Uniq()))


def perm_eq(m: Term, n: Term) -> bool:
    return alpha_key(perm_normal_form(m)) == alpha_key(perm_normal_form(n))


def beta_perm_equivalent(m: Term, n: Term, fuel: int = 10_000, eta: bool = False) -> bool:
    """Compare normal forms modulo permutations (reduction is confluent)."""
    return perm_eq(normalize(m, Strategy.LO, fuel, eta), normalize(n, Strategy.LO, fuel, eta))


# ---------------------------------------------------------------------------
# Marked terms and parallel reduction


def mark_redexes(term: Term, sites) -> tuple:
    """Label each site's push and pop with a distinct integer.

    Returns the marked term and the list of labels, in the order of ``sites``.
    Sites must all be beta sites of ``term`` itself.
    """
    labels = []
    for n, site in enumerate(sites, start=1):
        if site.kind != "beta":
            raise InvalidSite("only beta redexes can be marked")
        sub = subterm(term, site.path)
        acts = list(sub.actions)
        p, q = acts[site.i], acts[site.j]
        if p.mark is not None or q.mark is not None:
            raise InvalidSite(f"site {site} is already marked")
        acts[site.i] = Push(p.arg, p.loc, n)
        acts[site.j] = Pop(q.loc, q.name, n)
        term = replace_at(term, site.path, Term(tuple(acts)))
        labels.append(n)
    return term, labels


def _matching_pop(actions: tuple, i: int, label: int) -> int:
    loc = actions[i].loc
    for k in range(i + 1, len(actions)):
        act = actions[k]
        if isinstance(act, Pop) and act.loc == loc:
            if act.mark != label:
                raise InvalidSite(f"marked push {label} is not matched by its pop")
            return k
        if not isinstance(act, (Push, Pop)) or act.loc == loc:
            break
    raise InvalidSite(f"marked push {label} has no matching pop")


def parallel_step(term: Term, labels) -> Term:
    """Contract every redex whose label is in ``labels``, all at once."""
    labels = frozenset(labels)
    return _parallel(term, labels)


def _parallel_value(value, labels):
    if isinstance(value, Thunk):
        return Thunk(_parallel(value.body, labels))
    return _parallel(value, labels)


def _parallel(term: Term, labels) -> Term:
    acts = term.actions
    for k, act in enumerate(acts):
        if isinstance(act, Push) and act.mark in labels:
            j = _matching_pop(acts, k, act.mark)
            arg = _parallel_value(act.arg, labels)
            context, rest = refresh_context(acts[k + 1:j], Term(acts[j + 1:]), set(value_fv(arg)))
            inner = _parallel(Term(context + rest.actions), labels)
            body = substitute(arg, acts[j].name, inner)
            prefix = tuple(_parallel_action(a, labels) for a in acts[:k])
            return Term(prefix + body.actions)
    return Term(tuple(_parallel_action(a, labels) for a in acts))


def _parallel_action(act, labels):
    if isinstance(act, Push):
        return Push(_parallel_value(act.arg, labels), act.loc, act.mark)
    if isinstance(act, Force) and isinstance(act.value, Thunk):
        return Force(Thunk(_parallel(act.value.body, labels)))
    return act


def parallel_diamond_check(term: Term, sites_x, sites_o) -> bool:
    """Check ``(M_X)_O = M_XO = (M_O)_X`` for two disjoint sets of sites."""
    sites_x, sites_o = list(sites_x), list(sites_o)
    marked, labels = mark_redexes(term, sites_x + sites_o)
    lx = set(labels[:len(sites_x)])
    lo = set(labels[len(sites_x):])
    xo = strip_marks(parallel_step(parallel_step(marked, lx), lo))
    both = strip_marks(parallel_step(marked, lx | lo))
    ox = strip_marks(parallel_step(parallel_step(marked, lo), lx))
    return alpha_key(xo) == alpha_key(both) == alpha_key(ox)


def spine_diamond_check(term: Term) -> bool:
    """Every one-step spine peak closes with at most one spine step per side."""
    reducts = [beta_step(term, s) for s in find_redexes(term, Strategy.SPINE)]
    for a, b in itertools.combinations(reducts, 2):
        if alpha_key(a) == alpha_key(b):
            continue
        ka = {alpha_key(a)} | {alpha_key(r) for r in one_step_reducts(a, Strategy.SPINE)}
        kb = {alpha_key(b)} | {alpha_key(r) for r in one_step_reducts(b, Strategy.SPINE)}
        if not ka & kb:
            return False
    return True


def reachable(term: Term, depth: int, limit: int = 5_000) -> dict:
    """Alpha-keys of terms reachable in at most ``depth`` steps, with a witness."""
    frontier = {alpha_key(term): term}
    seen = dict(frontier)
    for _ in range(depth):
        nxt = {}
        for t in frontier.values():
            for r in one_step_reducts(t):
                k = alpha_key(r)
                if k not in seen:
                    seen[k] = r
                    nxt[k] = r
                    if len(seen) > limit:
                        return seen
        frontier = nxt
        if not frontier:
            break
    return seen


def joinable(a: Term, b: Term, depth: int) -> bool:
    ra = reachable(a, depth)
    if alpha_key(b) in ra:
        return True
    rb = reachable(b, depth)
    return not ra.keys().isdisjoint(rb.keys())

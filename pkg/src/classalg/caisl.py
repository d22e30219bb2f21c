"""Conditional attribute implications ``X -[C]-> Y`` and their derivation system.

Axiom schemes: Non-constraint, Reflexivity. Rules: Decomposition,
Composition, Conditional Composition, Simplification. ``prove`` decides
derivability through the deduction theorem

    Sigma |- X -[C]-> Y   iff   Sigma + {0 -[C]-> X} |- 0 -[C]-> Y

and returns a derivation that replays step by step through ``apply_rule``.

Closures are stored compactly: because Decomposition weakens both the
condition set and the consequent, and Composition of two statements with the
same antecedent and condition unions their consequents, everything derivable
is captured by a table mapping each (X, C) to the largest derivable Y.
"""

from __future__ import annotations

import enum
import re
from collections.abc import Set
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import (ArityMismatch, BoundExceeded, LoadError, PatternMismatch,
                     SideConditionViolated)

__all__ = ["CaislStatement", "Rule", "Step", "Derivation", "CaislSystem", "Closure",
           "parse_statement", "load_caisl"]


def _fmt(names: Iterable[str]) -> str:
    return "{" + ",".join(sorted(names)) + "}"


@dataclass(frozen=True, order=True)
class CaislStatement:
    X: frozenset
    C: frozenset
    Y: frozenset

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.X, self.C, self.Y))
            object.__setattr__(self, "_hash", h)
        return h

    @classmethod
    def of(cls, X: Iterable[str], C: Iterable[str], Y: Iterable[str]) -> "CaislStatement":
        return cls(frozenset(X), frozenset(C), frozenset(Y))

    def __str__(self):
        return f"{_fmt(self.X)} -[{_fmt(self.C)}]-> {_fmt(self.Y)}"


_SET = r"\{\s*([^{}]*?)\s*\}"
_STMT = re.compile(rf"^\s*{_SET}\s*-\[\s*{_SET}\s*\]->\s*{_SET}\s*$")


def _names(text: str) -> frozenset:
    return frozenset(p.strip() for p in text.split(",") if p.strip())


def parse_statement(text: str) -> CaislStatement:
    m = _STMT.match(text)
    if not m:
        raise ValueError(f"not a statement of the form '{{a}} -[{{c}}]-> {{b}}': {text!r}")
    return CaislStatement(*(_names(g) for g in m.groups()))


class Rule(enum.Enum):
    HYPOTHESIS = "Hypothesis"
    NONCONSTRAINT = "Non-constraint"
    REFLEXIVITY = "Reflexivity"
    DECOMPOSITION = "Decomposition"
    COMPOSITION = "Composition"
    CONDITIONAL_COMPOSITION = "Conditional Composition"
    SIMPLIFICATION = "Simplification"


_ARITY = {Rule.NONCONSTRAINT: 0, Rule.REFLEXIVITY: 0, Rule.DECOMPOSITION: 1,
          Rule.COMPOSITION: 2, Rule.CONDITIONAL_COMPOSITION: 2, Rule.SIMPLIFICATION: 2}


@dataclass(frozen=True)
class Step:
    rule: Rule
    premises: tuple[int, ...]      # indices of earlier steps
    statement: CaislStatement


@dataclass(frozen=True)
class Derivation:
    steps: tuple[Step, ...]

    @property
    def conclusion(self) -> CaislStatement:
        return self.steps[-1].statement

    def __len__(self):
        return len(self.steps)

    def lines(self) -> list[str]:
        out = []
        for i, s in enumerate(self.steps, 1):
            refs = f" [{', '.join(str(p + 1) for p in s.premises)}]" if s.premises else ""
            out.append(f"{i}. {s.statement}    {s.rule.value}{refs}")
        return out

    def replay(self, system: "CaislSystem", sigma: Iterable[CaislStatement]) -> bool:
        """Re-check every step; raises PatternMismatch on the first bad one."""
        hyps = set(sigma)
        for i, s in enumerate(self.steps):
            if any(p >= i for p in s.premises):
                raise PatternMismatch(f"step {i + 1} cites a later step")
            if s.rule is Rule.HYPOTHESIS:
                if s.statement not in hyps:
                    raise PatternMismatch(f"step {i + 1}: {s.statement} is not a hypothesis")
                continue
            got = system.apply_rule(s.rule, [self.steps[p].statement for p in s.premises],
                                    **_params(s.rule, s.statement))
            if got != s.statement:
                raise PatternMismatch(f"step {i + 1}: rule yields {got}, not {s.statement}")
        return True


def _params(rule: Rule, st: CaislStatement) -> dict:
    if rule is Rule.DECOMPOSITION:
        return {"cond": st.C, "attrs": st.Y}
    if rule is Rule.REFLEXIVITY:
        return {"attrs": st.X}
    if rule is Rule.NONCONSTRAINT:
        return {"cond": st.C}
    return {}


def _bits(m: int) -> int:
    return bin(m).count("1")


def _submasks(m: int) -> list[int]:
    out, s = [], m
    while True:
        out.append(s)
        if s == 0:
            return out
        s = (s - 1) & m


class Closure(Set):
    """Every statement derivable from some Sigma, as a read-only set."""

    def __init__(self, system: "CaislSystem", table: tuple[int, ...]):
        self._system = system
        self._table = table

    def __contains__(self, st) -> bool:
        if not isinstance(st, CaislStatement):
            return False
        sys = self._system
        try:
            x, c, y = sys._encode(st)
        except PatternMismatch:
            return False
        return y & ~self._table[x << sys._ng | c] == 0

    def __iter__(self) -> Iterator[CaislStatement]:
        sys = self._system
        for key, f in enumerate(self._table):
            x, c = key >> sys._ng, key & sys._gmask
            for y in sorted(_submasks(f)):
                yield sys._decode(x, c, y)

    def __len__(self) -> int:
        return sum(1 << _bits(f) for f in self._table)

    def strongest(self) -> list[CaislStatement]:
        """One statement per (X, C): the largest derivable consequent."""
        sys = self._system
        return [sys._decode(k >> sys._ng, k & sys._gmask, f) for k, f in enumerate(self._table)]


class CaislSystem:
    """Attributes Omega, conditions Gamma, and the rule set over them.

    ``nonconstraint="empty"`` instantiates the Non-constraint scheme as
    ``{} -[C]-> {}`` for every C; ``"full"`` as the literal ``{} -[{}]-> Omega``.
    ``conditional_union`` picks the condition set of Conditional Composition:
    ``C1 | C2`` (default) or ``C1 & C2``.
    """

    def __init__(self, attrs: Sequence[str], conds: Sequence[str], *,
                 nonconstraint: str = "empty", conditional_union: bool = True,
                 bound: int = 10_000):
        if nonconstraint not in ("empty", "full"):
            raise ValueError("nonconstraint must be 'empty' or 'full'")
        self.attrs = tuple(sorted(set(attrs)))
        self.conds = tuple(sorted(set(conds)))
        self.nonconstraint = nonconstraint
        self.conditional_union = conditional_union
        self.bound = bound
        self._na, self._ng = len(self.attrs), len(self.conds)
        self._amask, self._gmask = (1 << self._na) - 1, (1 << self._ng) - 1
        self._aidx = {a: i for i, a in enumerate(self.attrs)}
        self._gidx = {g: i for i, g in enumerate(self.conds)}
        nkeys = 1 << (self._na + self._ng)
        # key -> (x, c, keys of (x, c') for every c' inside c)
        self._keyinfo = [(k >> self._ng, k & self._gmask,
                          [(k >> self._ng) << self._ng | c2 for c2 in _submasks(k & self._gmask)])
                         for k in range(nkeys)]
        self._sub_cache: dict[int, list[int]] = {}
        self._codes: dict[CaislStatement, tuple[int, int, int]] = {}
        self._facts: list[tuple] = []          # (x, c, y, rule, premise fact ids)
        self._checked: set[int] = set()
        self._plain: dict[frozenset, tuple[int, ...]] = {}
        self._extend: dict[tuple, tuple[int, ...]] = {}
        self._tracked: dict[frozenset, tuple[tuple[int, ...], tuple[int, ...]]] = {}

    @property
    def omega(self) -> frozenset:
        return frozenset(self.attrs)

    @property
    def gamma(self) -> frozenset:
        return frozenset(self.conds)

    # --- encoding ---------------------------------------------------------

    def _mask(self, names: Iterable[str], index: dict, what: str) -> int:
        m = 0
        for n in names:
            try:
                m |= 1 << index[n]
            except KeyError:
                raise PatternMismatch(f"{n!r} is not a declared {what}") from None
        return m

    def _encode(self, st: CaislStatement) -> tuple[int, int, int]:
        code = self._codes.get(st)
        if code is None:
            code = self._codes[st] = (self._mask(st.X, self._aidx, "attribute"),
                                      self._mask(st.C, self._gidx, "condition"),
                                      self._mask(st.Y, self._aidx, "attribute"))
        return code

    def _decode(self, x: int, c: int, y: int) -> CaislStatement:
        a, g = self.attrs, self.conds
        return CaislStatement(frozenset(a[i] for i in range(self._na) if x >> i & 1),
                              frozenset(g[i] for i in range(self._ng) if c >> i & 1),
                              frozenset(a[i] for i in range(self._na) if y >> i & 1))

    # --- single rule applications -------------------------------------------

    def apply_rule(self, rule: Rule, premises: Sequence[CaislStatement], *,
                   attrs: Iterable[str] | None = None,
                   cond: Iterable[str] | None = None) -> CaislStatement:
        """Conclusion of ``rule`` on ``premises``.

        ``attrs``/``cond`` pick the instance where a rule leaves a choice:
        X for Reflexivity, C for Non-constraint, and the weakened C and Y
        for Decomposition.
        """
        rule = Rule(rule)
        if rule is Rule.HYPOTHESIS:
            raise PatternMismatch("hypotheses are not derived by a rule")
        if len(premises) != _ARITY[rule]:
            raise ArityMismatch(f"{rule.value} takes {_ARITY[rule]} premises, got {len(premises)}")
        for p in premises:
            self._encode(p)
        if attrs is not None:
            attrs = frozenset(attrs)
            self._mask(attrs, self._aidx, "attribute")
        if cond is not None:
            cond = frozenset(cond)
            self._mask(cond, self._gidx, "condition")

        if rule is Rule.NONCONSTRAINT:
            if self.nonconstraint == "full":
                if cond:
                    raise PatternMismatch("the full Non-constraint instance has no conditions")
                return CaislStatement(frozenset(), frozenset(), self.omega)
            return CaislStatement(frozenset(), cond or frozenset(), frozenset())
        if rule is Rule.REFLEXIVITY:
            x = attrs if attrs is not None else frozenset()
            return CaislStatement(x, self.gamma, x)
        if rule is Rule.DECOMPOSITION:
            (p,) = premises
            c = p.C if cond is None else cond
            y = p.Y if attrs is None else attrs
            if not c <= p.C or not y <= p.Y:
                raise PatternMismatch("Decomposition only weakens the conditions and the consequent")
            return CaislStatement(p.X, c, y)
        p, q = premises
        if rule is Rule.COMPOSITION:
            return CaislStatement(p.X | q.X, p.C & q.C, p.Y | q.Y)
        if rule is Rule.CONDITIONAL_COMPOSITION:
            c = p.C | q.C if self.conditional_union else p.C & q.C
            return CaislStatement(p.X | q.X, c, p.Y & q.Y)
        # Simplification: {X -[C1]-> Y, X|Z -[C2]-> W} |- (X|Z)\Y -[C1&C2]-> W\Y
        if p.X & p.Y:
            raise SideConditionViolated("Simplification needs X and Y disjoint")
        if not p.X <= q.X:
            raise PatternMismatch("the second premise's antecedent must contain the first's")
        return CaislStatement(q.X - p.Y, p.C & q.C, q.Y - p.Y)

    # --- closure engine ---------------------------------------------------

    def _axiom_table(self, track: bool):
        facts = self._facts
        nkeys = len(self._keyinfo)
        table = [0] * nkeys
        fid = [0] * nkeys if track else None
        refl: dict[int, int] = {}
        for k, (x, c, _) in enumerate(self._keyinfo):
            table[k] = x
            if track:
                if x not in refl:
                    facts.append((x, self._gmask, x, Rule.REFLEXIVITY, ()))
                    refl[x] = len(facts) - 1
                r = refl[x]
                if c != self._gmask:
                    facts.append((x, c, x, Rule.DECOMPOSITION, (r,)))
                    r = len(facts) - 1
                fid[k] = r
        seeds = []
        if self.nonconstraint == "full":
            seeds.append((0, 0, self._amask, Rule.NONCONSTRAINT))
        return table, fid, seeds

    def _close(self, table: list, fid: list | None, seeds, work: list, bound: int) -> None:
        """Saturate ``table`` in place; ``work`` lists keys not yet paired with everything."""
        track = fid is not None
        facts = self._facts
        info = self._keyinfo
        ng = self._ng
        cu = self.conditional_union
        subs = self._sub_cache
        nkeys = len(table)
        count = sum(1 << _bits(f) for f in table)
        DEC, COMP = Rule.DECOMPOSITION, Rule.COMPOSITION

        def put(x, c, y, rule, prem):
            nonlocal count
            k = x << ng | c
            if not y & ~table[k]:
                return
            if track:
                facts.append((x, c, y, rule, prem))
                f0 = len(facts) - 1
            for k2 in info[k][2]:
                old = table[k2]
                if not y & ~old:
                    continue
                new = old | y
                if track:
                    f1 = f0
                    c2 = info[k2][1]
                    if c2 != c:
                        facts.append((x, c2, y, DEC, (f0,)))
                        f1 = len(facts) - 1
                    if old & ~y:
                        facts.append((x, c2, new, COMP, (fid[k2], f1)))
                        f1 = len(facts) - 1
                    fid[k2] = f1
                table[k2] = new
                count += (1 << _bits(new)) - (1 << _bits(old))
                work.append(k2)
            if count > bound:
                raise BoundExceeded(f"closure passed {bound} statements", Closure(self, tuple(table)))

        for x, c, y, rule in seeds:
            put(x, c, y, rule, ())

        while work:
            i = work.pop()
            xi, ci, _ = info[i]
            fi = table[i]
            pi = fid[i] if track else None
            yfree = fi & ~xi
            ys = subs.get(yfree)
            if ys is None:
                ys = subs[yfree] = _submasks(yfree)[:-1]   # nonempty submasks
            for j in range(nkeys):
                xj, cj, _ = info[j]
                fj = table[j]
                pj = fid[j] if track else None
                xu = xi | xj
                cc = ci & cj
                if (fi | fj) & ~table[xu << ng | cc]:
                    put(xu, cc, fi | fj, COMP, (pi, pj))
                c2 = (ci | cj) if cu else cc
                if fi & fj & ~table[xu << ng | c2]:
                    put(xu, c2, fi & fj, Rule.CONDITIONAL_COMPOSITION, (pi, pj))
                # Simplification with i first: needs xi <= xj
                if not xi & ~xj:
                    for y1 in ys:
                        y = fj & ~y1
                        x = xj & ~y1
                        if y & ~table[x << ng | cc]:
                            if track:
                                p1 = pi
                                if y1 != fi:
                                    facts.append((xi, ci, y1, DEC, (pi,)))
                                    p1 = len(facts) - 1
                                put(x, cc, y, Rule.SIMPLIFICATION, (p1, pj))
                            else:
                                put(x, cc, y, None, None)
                # Simplification with j first: needs xj <= xi
                if not xj & ~xi:
                    yf = fj & ~xj
                    s = yf
                    while s:
                        y = fi & ~s
                        x = xi & ~s
                        if y & ~table[x << ng | cc]:
                            if track:
                                p1 = pj
                                if s != fj:
                                    facts.append((xj, cj, s, DEC, (pj,)))
                                    p1 = len(facts) - 1
                                put(x, cc, y, Rule.SIMPLIFICATION, (p1, pi))
                            else:
                                put(x, cc, y, None, None)
                        s = (s - 1) & yf

    def _base(self, track: bool, bound: int):
        table, fid, seeds = self._axiom_table(track)
        work = list(range(len(table)))
        self._close(table, fid, seeds, work, bound)
        return tuple(table), (tuple(fid) if track else None)

    def _sorted_codes(self, sigma: Iterable[CaislStatement]) -> list[tuple[int, int, int]]:
        return sorted({self._encode(s) for s in sigma})

    def _plain_table(self, codes: list[tuple[int, int, int]], bound: int) -> tuple[int, ...]:
        key = frozenset(codes)
        hit = self._plain.get(key)
        if hit is not None:
            return hit
        if not codes:
            table, _ = self._base(False, bound)
        else:
            table = self._extend_table(self._plain_table(codes[:-1], bound), codes[-1], bound)
        self._plain[key] = table
        return table

    def _extend_table(self, table: tuple[int, ...], code: tuple[int, int, int], bound: int):
        x, c, y = code
        if not y & ~table[x << self._ng | c]:
            return table
        key = (table, code)
        hit = self._extend.get(key)
        if hit is None:
            t = list(table)
            work: list[int] = []
            self._close(t, None, [(x, c, y, None)], work, bound)
            hit = self._extend[key] = tuple(t)
        return hit

    def _tracked_table(self, codes: list[tuple[int, int, int]], bound: int):
        key = frozenset(codes)
        hit = self._tracked.get(key)
        if hit is not None:
            return hit
        if not codes:
            hit = self._base(True, bound)
        else:
            table, fid = self._tracked_table(codes[:-1], bound)
            x, c, y = codes[-1]
            if y & ~table[x << self._ng | c]:
                t, f = list(table), list(fid)
                self._close(t, f, [(x, c, y, Rule.HYPOTHESIS)], [], bound)
                hit = (tuple(t), tuple(f))
            else:
                hit = (table, fid)
        self._tracked[key] = hit
        return hit

    def _checked_bound(self, table: tuple[int, ...], bound: int) -> Closure:
        closure = Closure(self, table)
        if len(closure) > bound:
            raise BoundExceeded(f"closure passed {bound} statements", closure)
        return closure

    # --- public API ---------------------------------------------------------

    def saturate(self, sigma: Iterable[CaislStatement], bound: int | None = None) -> Closure:
        """Everything derivable from ``sigma`` plus the axiom instances."""
        bound = self.bound if bound is None else bound
        return self._checked_bound(self._plain_table(self._sorted_codes(sigma), bound), bound)

    def derivable(self, sigma: Iterable[CaislStatement], goal: CaislStatement,
                  bound: int | None = None) -> bool:
        """Direct membership of ``goal`` in the saturation of ``sigma``."""
        return goal in self.saturate(sigma, bound)

    def prove(self, sigma: Iterable[CaislStatement], goal: CaislStatement, *,
              bound: int | None = None, derivation: bool = True
              ) -> tuple[bool, Derivation | None]:
        """Decide ``sigma |- goal`` through the deduction theorem."""
        bound = self.bound if bound is None else bound
        sigma = list(sigma)
        codes = self._sorted_codes(sigma)
        gx, gc, gy = self._encode(goal)
        if goal in sigma:
            return True, (Derivation((Step(Rule.HYPOTHESIS, (), goal),)) if derivation else None)
        table = self._plain_table(codes, bound)
        self._checked_bound(table, bound)
        extended = self._extend_table(table, (0, gc, gx), bound)
        self._checked_bound(extended, bound)
        ok = not gy & ~extended[gc]                  # key of (X={}, C=gc) is gc
        if not ok or not derivation:
            return ok, None
        return True, self._derivation(codes, goal, bound)

    def prove_all(self, sigma: Iterable[CaislStatement], goals: Iterable[CaislStatement],
                  bound: int | None = None) -> dict[CaislStatement, bool]:
        """``prove`` for many goals at once, sharing the per-(X, C) closures."""
        bound = self.bound if bound is None else bound
        sigma = set(sigma)
        table = self._plain_table(self._sorted_codes(sigma), bound)
        self._checked_bound(table, bound)
        out, seen = {}, {}
        for g in goals:
            gx, gc, gy = self._encode(g)
            ext = seen.get((gx, gc))
            if ext is None:
                ext = seen[(gx, gc)] = self._extend_table(table, (0, gc, gx), bound)[gc]
            out[g] = g in sigma or not gy & ~ext
        return out

    def _derivation(self, codes, goal: CaislStatement, bound: int) -> Derivation:
        table, fid = self._tracked_table(codes, bound)
        x, c, y = self._encode(goal)
        k = x << self._ng | c
        if y & ~table[k]:
            raise RuntimeError(f"deduction-theorem route and saturation disagree on {goal}")
        return self._extract(fid[k], goal)

    def _extract(self, root: int, goal: CaislStatement) -> Derivation:
        facts = self._facts
        need, stack = set(), [root]
        while stack:
            f = stack.pop()
            if f in need:
                continue
            need.add(f)
            stack.extend(facts[f][4])
        order = sorted(need)
        pos = {f: i for i, f in enumerate(order)}
        steps = []
        for f in order:
            x, c, y, rule, prem = facts[f]
            steps.append(Step(rule, tuple(pos[p] for p in prem), self._decode(x, c, y)))
        if steps[-1].statement != goal:
            steps.append(Step(Rule.DECOMPOSITION, (len(steps) - 1,), goal))
        return Derivation(tuple(steps))

    def check_facts(self, sigma: Iterable[CaislStatement]) -> int:
        """Replay every recorded fact behind ``sigma``'s closure through ``apply_rule``.

        Any derivation ``prove`` extracts for ``sigma`` is a sub-DAG of these
        facts, so this validates all of them at once. Facts checked on an earlier
        call are not re-checked. Returns the number of facts newly checked.
        """
        sigma = set(sigma)
        codes = self._sorted_codes(sigma)
        _, fid = self._tracked_table(codes, self.bound)
        facts = self._facts
        fresh = 0
        stack = list(fid)
        seen = set()
        while stack:
            f = stack.pop()
            if f in seen:
                continue
            seen.add(f)
            x, c, y, rule, prem = facts[f]
            st = self._decode(x, c, y)
            if rule is Rule.HYPOTHESIS:
                if st not in sigma:
                    raise PatternMismatch(f"fact {f}: {st} is not a hypothesis")
            elif f not in self._checked:
                got = self.apply_rule(rule, [self._decode(*facts[p][:3]) for p in prem],
                                      **_params(rule, st))
                if got != st:
                    raise PatternMismatch(f"fact {f}: {rule.value} yields {got}, not {st}")
                self._checked.add(f)
                fresh += 1
            stack.extend(prem)
        return fresh


# --- statement files ---------------------------------------------------------

@dataclass
class CaislProblem:
    attrs: list[str]
    conds: list[str]
    sigma: list[CaislStatement]
    goal: CaislStatement | None


def load_caisl(text: str) -> CaislProblem:
    """Parse ``attr``/``cond``/``stmt``/``goal`` directives, one per line."""
    attrs: list[str] = []
    conds: list[str] = []
    sigma: list[CaislStatement] = []
    goal = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        word, _, rest = line.partition(" ")
        rest = rest.strip()
        if word in ("attr", "cond"):
            if not re.fullmatch(r"[^\s{},\[\]]+", rest):
                raise LoadError(f"bad {word} name {rest!r}", lineno)
            target = attrs if word == "attr" else conds
            if rest in attrs or rest in conds:
                raise LoadError(f"{rest!r} declared twice", lineno)
            target.append(rest)
        elif word in ("stmt", "goal"):
            try:
                st = parse_statement(rest)
            except ValueError as exc:
                raise LoadError(str(exc), lineno) from None
            unknown = (st.X | st.Y) - set(attrs) or st.C - set(conds)
            if unknown:
                raise LoadError(f"undeclared name(s) {_fmt(unknown)}", lineno)
            if word == "stmt":
                sigma.append(st)
            elif goal is not None:
                raise LoadError("only one goal line is allowed", lineno)
            else:
                goal = st
        else:
            raise LoadError(f"unknown directive {word!r}", lineno)
    return CaislProblem(attrs, conds, sigma, goal)

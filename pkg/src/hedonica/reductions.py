"""(3,B2)-SAT formulas, the three hardness gadgets, their canonical partitions and assignment extraction."""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from itertools import product

from .model import OrderingProfile, Partition, make_partition, validate_partition

SAT_ORACLE_CAP = 20


class FormulaError(ValueError):
    pass


class ExtractionError(ValueError):
    pass


# --- formulas -------------------------------------------------------------------------

@dataclass(frozen=True)
class Occurrence:
    variable: int  # 1-based
    positive: bool
    copy: int  # 1 or 2, numbered in clause order
    clause: int  # 0-based clause index
    position: int  # 0, 1, 2 inside the clause

    @property
    def name(self) -> str:
        return f"x{self.variable}.{'' if self.positive else '~'}{self.copy}"


@dataclass(frozen=True)
class Formula:
    num_vars: int
    clauses: tuple  # tuple of tuples of signed ints

    def satisfied_by(self, assignment: dict) -> bool:
        return all(any(assignment[abs(l)] == (l > 0) for l in c) for c in self.clauses)

    def occurrences(self) -> dict:
        """(variable, positive, copy) -> Occurrence; requires (3,B2) shape."""
        problem = validate_b2sat(self)
        if problem:
            raise FormulaError(problem)
        return _occurrences(self)

    def clause_occurrences(self) -> list:
        occ = self.occurrences()
        out = [[None] * len(c) for c in self.clauses]
        for o in occ.values():
            out[o.clause][o.position] = o
        return out

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.num_vars} {len(self.clauses)}"]
        lines += [" ".join(str(l) for l in c) + " 0" for c in self.clauses]
        return "\n".join(lines) + "\n"


def _occurrences(formula: Formula) -> dict:
    seen: dict = {}
    occ = {}
    for ci, clause in enumerate(formula.clauses):
        for pos, lit in enumerate(clause):
            key = (abs(lit), lit > 0)
            seen[key] = seen.get(key, 0) + 1
            occ[(abs(lit), lit > 0, seen[key])] = Occurrence(abs(lit), lit > 0, seen[key], ci, pos)
    return occ


def parse_cnf(text: str) -> Formula:
    """Parse DIMACS CNF; literal order inside clauses is preserved."""
    header = None
    clauses = []
    current: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if header is not None:
                raise FormulaError(f"line {lineno}: duplicate header")
            if len(parts) != 4 or parts[1] != "cnf":
                raise FormulaError(f"line {lineno}: malformed header {line!r}")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise FormulaError(f"line {lineno}: malformed header {line!r}") from None
            if header[0] < 0 or header[1] < 0:
                raise FormulaError(f"line {lineno}: malformed header {line!r}")
            continue
        if header is None:
            raise FormulaError(f"line {lineno}: clause before header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise FormulaError(f"line {lineno}: bad literal {tok!r}") from None
            if lit == 0:
                if not current:
                    raise FormulaError(f"line {lineno}: empty clause")
                clauses.append(tuple(current))
                current = []
                continue
            if abs(lit) > header[0]:
                raise FormulaError(f"line {lineno}: variable {abs(lit)} out of range 1..{header[0]}")
            current.append(lit)
    if header is None:
        raise FormulaError("missing 'p cnf' header")
    if current:
        raise FormulaError("last clause is not terminated by 0")
    if len(clauses) != header[1]:
        raise FormulaError(f"header declares {header[1]} clauses, found {len(clauses)}")
    return Formula(header[0], tuple(clauses))


def validate_b2sat(formula: Formula) -> str | None:
    """None if the formula is (3,B2)-SAT shaped, else a description of the first violation."""
    for ci, clause in enumerate(formula.clauses):
        if len(clause) != 3:
            return f"clause {ci + 1} has {len(clause)} literals, expected 3"
        if len({abs(l) for l in clause}) != 3:
            return f"clause {ci + 1} repeats a variable"
    counts = {}
    for clause in formula.clauses:
        for lit in clause:
            counts[(abs(lit), lit > 0)] = counts.get((abs(lit), lit > 0), 0) + 1
    for v in range(1, formula.num_vars + 1):
        pos, neg = counts.get((v, True), 0), counts.get((v, False), 0)
        if pos != 2 or neg != 2:
            return f"variable {v} occurs {pos} times positively and {neg} times negatively, expected 2 and 2"
    if 3 * len(formula.clauses) != 4 * formula.num_vars:
        return "clause count must be 4/3 of the variable count"
    return None


def all_satisfying(formula: Formula):
    """Every satisfying assignment, trying True before False for each variable in order."""
    if formula.num_vars > SAT_ORACLE_CAP:
        raise FormulaError(f"truth-table oracle is capped at {SAT_ORACLE_CAP} variables")
    names = range(1, formula.num_vars + 1)
    for values in product((True, False), repeat=formula.num_vars):
        a = dict(zip(names, values))
        if formula.satisfied_by(a):
            yield a


def sat_oracle(formula: Formula) -> dict | None:
    return next(all_satisfying(formula), None)


def random_b2sat(num_vars: int, rng: random.Random, attempts: int = 10_000) -> Formula:
    """Uniformly shuffled (3,B2) formula; num_vars must be a multiple of 3."""
    if num_vars % 3 or num_vars <= 0:
        raise ValueError("num_vars must be a positive multiple of 3")
    lits = [s * v for v in range(1, num_vars + 1) for s in (1, 1, -1, -1)]
    for _ in range(attempts):
        rng.shuffle(lits)
        clauses = tuple(tuple(lits[i:i + 3]) for i in range(0, len(lits), 3))
        f = Formula(num_vars, clauses)
        if validate_b2sat(f) is None:
            return f
    raise RuntimeError("could not draw a valid formula")


# --- gadgets --------------------------------------------------------------------------

class Reduction(str, enum.Enum):
    T1 = "t1"
    T2B = "t2b"
    T2NB = "t2nb"
    T3 = "t3"

    @classmethod
    def parse(cls, tag) -> "Reduction":
        if isinstance(tag, Reduction):
            return tag
        try:
            return cls(str(tag).strip().lower())
        except ValueError:
            raise ValueError(f"unknown reduction {tag!r}") from None


@dataclass(frozen=True)
class Role:
    kind: str  # clause | literal | aux | stalker | main | pos | neg | garbage | ring
    variable: int | None = None
    clause: int | None = None
    slot: str | None = None

    def to_dict(self) -> dict:
        return {k: v for k, v in (("kind", self.kind), ("variable", self.variable),
                                  ("clause", self.clause), ("slot", self.slot)) if v is not None}


@dataclass
class GadgetGame:
    theorem: Reduction
    formula: Formula
    profile: OrderingProfile
    roles: tuple
    index: dict = field(default_factory=dict)  # label -> agent

    @property
    def n(self) -> int:
        return self.profile.n

    @property
    def labels(self) -> tuple:
        return self.profile.labels

    def __getitem__(self, label: str) -> int:
        return self.index[label]


class _Builder:
    def __init__(self):
        self.labels: list[str] = []
        self.roles: list[Role] = []
        self.index: dict[str, int] = {}
        self.lists: dict[str, list] = {}

    def add(self, label: str, role: Role) -> None:
        self.index[label] = len(self.labels)
        self.labels.append(label)
        self.roles.append(role)

    def rank(self, label: str, *entries) -> None:
        """Entries are labels or tuples of tied labels, best first."""
        self.lists[label] = list(entries)

    def build(self, theorem, formula) -> GadgetGame:
        rankings = []
        for label in self.labels:
            classes = []
            for e in self.lists.get(label, []):
                group = e if isinstance(e, tuple) else (e,)
                classes.append(frozenset(self.index[g] for g in group))
            rankings.append(tuple(classes))
        profile = OrderingProfile(len(self.labels), tuple(rankings), tuple(self.labels))
        return GadgetGame(theorem, formula, profile, tuple(self.roles), dict(self.index))


def _lit(v: int, positive: bool, copy: int) -> str:
    return f"x{v}.{'' if positive else '~'}{copy}"


def _cp(ci: int, i: int) -> str:
    """Clause-ring player c_i (1..9) of clause ci (0-based)."""
    return f"c{ci + 1}.{(i - 1) % 9 + 1}"


_LINK = (1, 4, 7)  # ring position connected to the clause literal at positions 0, 1, 2


def _clause_ring(b: _Builder, formula: Formula, occ_by_clause) -> None:
    for ci in range(len(formula.clauses)):
        for i in range(1, 10):
            b.add(_cp(ci, i), Role("clause", clause=ci + 1, slot=str(i)))
    for ci in range(len(formula.clauses)):
        for i in range(1, 10):
            if i in _LINK:
                o = occ_by_clause[ci][_LINK.index(i)]
                b.rank(_cp(ci, i), o.name, _cp(ci, i + 1), _cp(ci, i - 1))
            else:
                b.rank(_cp(ci, i), _cp(ci, i + 1), _cp(ci, i - 1))


def _clause_player(o: Occurrence) -> str:
    return _cp(o.clause, _LINK[o.position])


def _checked(formula: Formula):
    problem = validate_b2sat(formula)
    if problem:
        raise FormulaError(problem)
    return formula.occurrences(), formula.clause_occurrences()


def build_gadget(theorem, formula: Formula) -> GadgetGame:
    theorem = Reduction.parse(theorem)
    occ, by_clause = _checked(formula)
    b = _Builder()
    V = formula.num_vars
    if theorem in (Reduction.T1, Reduction.T3):
        _clause_ring(b, formula, by_clause)
        extra = ("a", "a'", "a''", "b", "b'", "b''") if theorem is Reduction.T1 else ("a", "b", "c", "d")
        for v in range(1, V + 1):
            for pos, copy in ((True, 1), (True, 2), (False, 1), (False, 2)):
                b.add(_lit(v, pos, copy), Role("literal", variable=v, slot=_lit(v, pos, copy).split(".")[1]))
            for s in extra:
                b.add(f"x{v}.{s}", Role("aux", variable=v, slot=s))
        for v in range(1, V + 1):
            x1, x2, n1, n2 = (_lit(v, True, 1), _lit(v, True, 2), _lit(v, False, 1), _lit(v, False, 2))
            c = {k: _clause_player(occ[k]) for k in ((v, True, 1), (v, True, 2), (v, False, 1), (v, False, 2))}
            p = f"x{v}."
            if theorem is Reduction.T1:
                b.rank(x1, p + "a", n2, c[(v, True, 1)])
                b.rank(n1, p + "a", x2, c[(v, False, 1)])
                b.rank(x2, p + "b", n1, c[(v, True, 2)])
                b.rank(n2, p + "b", x1, c[(v, False, 2)])
                b.rank(p + "a", (x1, n1), p + "a'")
                b.rank(p + "a'", p + "a", p + "a''")
                b.rank(p + "a''", p + "a'")
                b.rank(p + "b", (x2, n2), p + "b'")
                b.rank(p + "b'", p + "b", p + "b''")
                b.rank(p + "b''", p + "b'")
            else:
                b.rank(x1, p + "a", p + "b", n2, c[(v, True, 1)])
                b.rank(n1, p + "b", p + "a", x2, c[(v, False, 1)])
                b.rank(x2, p + "c", p + "d", n1, c[(v, True, 2)])
                b.rank(n2, p + "d", p + "c", x1, c[(v, False, 2)])
                b.rank(p + "a", p + "b", x1, n1)
                b.rank(p + "b", p + "a", n1, x1)
                b.rank(p + "c", p + "d", x2, n2)
                b.rank(p + "d", p + "c", n2, x2)
        return b.build(theorem, formula)

    ring = theorem is Reduction.T2NB
    for v in range(1, V + 1):
        for kind in ("stalker", "main", "pos", "neg", "garbage"):
            b.add(f"x{v}.{kind}", Role(kind, variable=v))
        for pos, copy in ((True, 1), (True, 2), (False, 1), (False, 2)):
            b.add(_lit(v, pos, copy), Role("literal", variable=v, slot=_lit(v, pos, copy).split(".")[1]))
        if ring:
            for k in range(1, 10):
                b.add(f"x{v}.r{k}", Role("ring", variable=v, slot=str(k)))
    for ci in range(len(formula.clauses)):
        b.add(f"c{ci + 1}", Role("clause", clause=ci + 1))
    for ci, occs in enumerate(by_clause):
        b.rank(f"c{ci + 1}", *[o.name for o in occs])
    for v in range(1, V + 1):
        p = f"x{v}."
        x1, x2, n1, n2 = (_lit(v, True, 1), _lit(v, True, 2), _lit(v, False, 1), _lit(v, False, 2))
        cl = {k: f"c{occ[k].clause + 1}" for k in ((v, True, 1), (v, True, 2), (v, False, 1), (v, False, 2))}
        b.rank(x1, cl[(v, True, 1)], p + "pos", p + "main")
        b.rank(x2, cl[(v, True, 2)], p + "pos", p + "garbage")
        b.rank(n1, cl[(v, False, 1)], p + "neg", p + "main")
        b.rank(n2, cl[(v, False, 2)], p + "neg", p + "garbage")
        b.rank(p + "pos", x1, x2)
        b.rank(p + "neg", n1, n2)
        b.rank(p + "garbage", x2, n2)
        if ring:
            b.rank(p + "main", p + "stalker", x1, n1)
            b.rank(p + "stalker", p + "main", p + "r1")
            b.rank(p + "r1", p + "stalker", p + "r2", p + "r9")
            for k in range(2, 10):
                b.rank(f"{p}r{k}", f"{p}r{k % 9 + 1}", f"{p}r{k - 1}")
        else:
            b.rank(p + "main", x1, n1)
            b.rank(p + "stalker", p + "main")
    return b.build(theorem, formula)


def cycle_gadget(n: int) -> OrderingProfile:
    """Ring of n agents, each ranking its clockwise successor above its predecessor."""
    if n not in (5, 9):
        raise ValueError("cycle gadgets exist for n = 5 (pentagon) and n = 9 (9-gon)")
    lists = [[(i + 1) % n, (i - 1) % n] for i in range(n)]
    return OrderingProfile.from_lists(lists, [f"v{i}" for i in range(n)])


# --- canonical partitions -------------------------------------------------------------

def _ring_pairs(ci: int, matched: set) -> list:
    """Pair unmatched ring players run by run; odd runs leave their first player alone."""
    if not matched:
        raise ExtractionError(f"clause {ci + 1} has no true literal")
    blocks = []
    starts = sorted(matched)
    for k, m in enumerate(starts):
        nxt = starts[(k + 1) % len(starts)]
        run = []
        i = m % 9 + 1
        while i != nxt:
            run.append(i)
            i = i % 9 + 1
        if len(run) % 2:
            blocks.append([_cp(ci, run[0])])
            run = run[1:]
        blocks += [[_cp(ci, run[t]), _cp(ci, run[t + 1])] for t in range(0, len(run), 2)]
    return blocks


def construct_partition(theorem, formula: Formula, assignment: dict) -> Partition:
    theorem = Reduction.parse(theorem)
    if not formula.satisfied_by(assignment):
        raise ValueError("assignment does not satisfy the formula")
    gadget = build_gadget(theorem, formula)
    occ, by_clause = _checked(formula)
    blocks: list[list[str]] = []
    V = formula.num_vars
    if theorem in (Reduction.T1, Reduction.T3):
        truth = {k: assignment[k[0]] == k[1] for k in occ}
        for ci, occs in enumerate(by_clause):
            matched = set()
            for o in occs:
                if truth[(o.variable, o.positive, o.copy)]:
                    blocks.append([o.name, _clause_player(o)])
                    matched.add(_LINK[o.position])
            blocks += _ring_pairs(ci, matched)
        for v in range(1, V + 1):
            p = f"x{v}."
            if theorem is Reduction.T1:
                sign = not assignment[v]  # the false occurrences pair with x_a / x_b
                blocks += [[_lit(v, sign, 1), p + "a"], [_lit(v, sign, 2), p + "b"]]
                blocks += [[p + "a'", p + "a''"], [p + "b'", p + "b''"]]
            else:
                sign = not assignment[v]
                blocks += [[_lit(v, sign, 1), p + "a", p + "b"], [_lit(v, sign, 2), p + "c", p + "d"]]
    else:
        matched = set()
        for ci, occs in enumerate(by_clause):
            first = next(o for o in occs if assignment[o.variable] == o.positive)
            matched.add((first.variable, first.positive, first.copy))
            blocks.append([f"c{ci + 1}", first.name])
        for v in range(1, V + 1):
            p = f"x{v}."
            t = assignment[v]
            blocks.append([p + "main", _lit(v, not t, 1)])
            blocks.append([p + ("neg" if t else "pos"), _lit(v, not t, 2)])
            # true side: pos/garbage cases for x true, neg/garbage for x false
            side = "pos" if t else "neg"
            m1 = (v, t, 1) in matched
            m2 = (v, t, 2) in matched
            if not m1:
                blocks.append([p + side, _lit(v, t, 1)])
            elif not m2:
                blocks.append([p + side, _lit(v, t, 2)])
            else:
                blocks.append([p + side])
            if not m1 and not m2:
                blocks.append([p + "garbage", _lit(v, t, 2)])
            else:
                blocks.append([p + "garbage"])
            if theorem is Reduction.T2NB:
                blocks += [[p + "stalker", p + "r1"], [p + "r2", p + "r3"], [p + "r4", p + "r5"],
                           [p + "r6", p + "r7"], [p + "r8", p + "r9"]]
            else:
                blocks.append([p + "stalker"])
    part = make_partition([gadget.index[a] for a in blk] for blk in blocks)
    problem = validate_partition(part, gadget.n)
    if problem:
        raise AssertionError(f"constructed partition is invalid: {problem}")
    return part


# --- extraction -------------------------------------------------------------------------

def extract_assignment(theorem, gadget: GadgetGame, partition, default: bool | None = None) -> dict:
    """Read an assignment off a partition of the gadget's agents.

    Variables the partition leaves undetermined raise ExtractionError unless
    ``default`` is given.
    """
    theorem = Reduction.parse(theorem)
    partition = make_partition(partition)
    problem = validate_partition(partition, gadget.n)
    if problem:
        raise ExtractionError(f"invalid partition: {problem}")
    where = {a: b for b in partition for a in b}
    idx = gadget.index
    formula = gadget.formula
    out = {}
    if theorem in (Reduction.T1, Reduction.T3):
        occ = formula.occurrences()
        for v in range(1, formula.num_vars + 1):
            hits = {True: [], False: []}
            for (var, positive, copy), o in occ.items():
                if var != v:
                    continue
                lit, cp = idx[o.name], idx[_clause_player(o)]
                if cp in where[lit]:
                    hits[positive].append(sorted(where[lit]))
            if hits[True] and hits[False]:
                raise ExtractionError(
                    f"contradictory variable x{v}: positive and negative occurrences both sit with their "
                    f"clause players (blocks {hits[True] + hits[False]})")
            if hits[True] or hits[False]:
                out[v] = bool(hits[True])
            elif default is None:
                raise ExtractionError(f"undefined variable x{v}: no occurrence shares a block with its clause player")
            else:
                out[v] = default
        return out
    for v in range(1, formula.num_vars + 1):
        main = idx[f"x{v}.main"]
        block = where[main]
        if block == frozenset((main, idx[_lit(v, False, 1)])):
            out[v] = True
        elif block == frozenset((main, idx[_lit(v, True, 1)])):
            out[v] = False
        elif default is None:
            raise ExtractionError(f"undefined variable x{v}: x{v}.main sits in block {sorted(block)}")
        else:
            out[v] = default
    return out

"""Quantified 3-CNF input: parsing and normalization paddings.

Text format:
    c optional comment lines
    p q3cnf <n> <m>
    q <tok> ... <tok>        n tokens, each 'e' or 'a', strictly
                             alternating and starting with 'e'
    <l1> <l2> <l3> 0         m clause lines, nonzero literals

Normalization appends postfix variables/clauses so that the variable
count is even and some clause contains a complementary literal pair (such
a clause holds a true and a false literal under every assignment). Both
conditions are decided against the input formula; the first padding
itself introduces a complementary pair, which must not suppress the
second.
"""

from __future__ import annotations

from dataclasses import dataclass


class Q3SatParseError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class QFormula:
    """Prenex quantified 3-CNF; position i of the prefix quantifies x_i,
    existential at odd positions, universal at even ones."""

    n: int
    prefix: tuple[str, ...]           # 'e' | 'a', length n
    clauses: tuple[tuple[int, int, int], ...]

    @property
    def m(self) -> int:
        return len(self.clauses)

    def violations(self) -> list[str]:
        probs = []
        if len(self.prefix) != self.n:
            probs.append("prefix length != n")
        if any(q not in ("e", "a") for q in self.prefix):
            probs.append("prefix tokens must be 'e' or 'a'")
        if self.prefix and self.prefix[0] != "e":
            probs.append("prefix must start existential")
        if any(self.prefix[i] == self.prefix[i + 1] for i in range(len(self.prefix) - 1)):
            probs.append("prefix must strictly alternate")
        for j, cl in enumerate(self.clauses, 1):
            if len(cl) != 3:
                probs.append(f"clause {j} has {len(cl)} literals")
            for lit in cl:
                if lit == 0 or not (1 <= abs(lit) <= self.n):
                    probs.append(f"clause {j} literal {lit} out of range")
        return probs


def parse_q3sat(text: str) -> QFormula:
    """Parse the q3cnf text format; errors carry line/column positions."""
    n = m = None
    prefix: list[str] = []
    clauses: list[tuple[int, int, int]] = []
    stage = "header"
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line == "c" or line.startswith("c "):
            continue
        toks = line.split()
        if stage == "header":
            if toks[0] != "p" or len(toks) != 4 or toks[1] != "q3cnf":
                raise Q3SatParseError("expected header 'p q3cnf <n> <m>'", lineno)
            try:
                n, m = int(toks[2]), int(toks[3])
            except ValueError:
                raise Q3SatParseError("non-integer counts in header", lineno)
            if n < 1 or m < 0:
                raise Q3SatParseError("counts out of range", lineno)
            stage = "prefix"
        elif stage == "prefix":
            if toks[0] != "q":
                raise Q3SatParseError("expected quantifier line 'q <tok>...'", lineno)
            prefix = toks[1:]
            if len(prefix) != n:
                raise Q3SatParseError(f"expected {n} quantifier tokens, got {len(prefix)}", lineno)
            for col, q in enumerate(prefix, 2):
                if q not in ("e", "a"):
                    raise Q3SatParseError(f"quantifier token {q!r}", lineno, col)
            if prefix[0] != "e" or any(prefix[i] == prefix[i + 1] for i in range(n - 1)):
                raise Q3SatParseError("alternation: prefix must alternate starting with 'e'", lineno)
            stage = "clauses"
        else:
            try:
                lits = [int(t) for t in toks]
            except ValueError:
                raise Q3SatParseError("non-integer literal", lineno)
            if lits[-1] != 0:
                raise Q3SatParseError("clause line must end with 0", lineno)
            lits = lits[:-1]
            if len(lits) != 3:
                raise Q3SatParseError(f"arity: clause has {len(lits)} literals, need 3", lineno)
            for col, lit in enumerate(lits, 1):
                if lit == 0 or not (1 <= abs(lit) <= n):
                    raise Q3SatParseError(f"literal {lit} out of range", lineno, col)
            clauses.append(tuple(lits))
    if stage == "header":
        raise Q3SatParseError("missing header", 1)
    if stage == "prefix":
        raise Q3SatParseError("missing quantifier line", 1)
    if len(clauses) != m:
        raise Q3SatParseError(f"expected {m} clauses, got {len(clauses)}", 1)
    return QFormula(n=n, prefix=tuple(prefix), clauses=tuple(clauses))


def format_q3sat(f: QFormula) -> str:
    lines = [f"p q3cnf {f.n} {f.m}", "q " + " ".join(f.prefix)]
    lines += [" ".join(str(l) for l in cl) + " 0" for cl in f.clauses]
    return "\n".join(lines) + "\n"


def has_complementary_clause(f: QFormula) -> bool:
    return any(any(-lit in cl for lit in cl) for cl in f.clauses)


def is_normalized(f: QFormula) -> bool:
    return f.n % 2 == 0 and has_complementary_clause(f)


def pad_formula(f: QFormula) -> QFormula:
    """Append the evenness padding (three variables, two clauses) when the
    input has an odd variable count, then the complementary-pair padding
    (two variables, two clauses) when the input lacks such a clause."""
    probs = f.violations()
    if probs:
        raise ValueError("invalid formula: " + "; ".join(probs))
    odd = f.n % 2 == 1
    needs_pair = not has_complementary_clause(f)
    n = f.n
    prefix = list(f.prefix)
    clauses = list(f.clauses)
    if odd:
        a, b, c = n + 1, n + 2, n + 3
        prefix += ["a", "e", "a"]
        clauses += [(a, -a, b), (-b, c, -c)]
        n += 3
    if needs_pair:
        a, b = n + 1, n + 2
        prefix += ["e", "a"]
        clauses += [(a, -a, b), (a, b, -b)]
        n += 2
    return QFormula(n=n, prefix=tuple(prefix), clauses=tuple(clauses))

"""Lexical/structural analysis of single Java method bodies.

A lightweight lexer plus a handful of token-stream passes produce everything
the metric formulas need (token classes, predicates, call sites, brace
nesting, indentation) without a compiler front-end. All functions are pure;
inputs are plain strings.

Token classes: `operator` covers Java operators including assignment forms;
`operand` covers identifiers and literals; reserved words are `keyword`;
`;`, `,`, `(`, `)`, `{`, `}` and `@` are `punctuation` and stay out of the
operator/operand counts.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

from .errors import (
    EmptyMethod,
    UnbalancedBraces,
    UnterminatedComment,
    UnterminatedLiteral,
)

KEYWORDS = frozenset(
    """abstract assert boolean break byte case catch char class const continue
    default do double else enum extends final finally float for goto if
    implements import instanceof int interface long native new package private
    protected public return short static strictfp super switch synchronized
    this throw throws transient try void volatile while""".split()
)

# true/false/null lex as operands (literals) but are never control variables.
LITERAL_WORDS = frozenset({"true", "false", "null"})

PUNCTUATION = frozenset({";", ",", "(", ")", "{", "}", "@"})

# Longest-first so maximal munch falls out of the regex alternation.
_OPERATORS = [
    ">>>=", "<<=", ">>=", ">>>", "...",
    "->", "::", "==", "!=", "<=", ">=", "&&", "||", "++", "--",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>",
    "+", "-", "*", "/", "%", "=", "<", ">", "!", "&", "|", "^",
    "~", "?", ":", ".", "[", "]",
]

COMPARISON_OPS = frozenset({"==", "!=", "<", ">", "<=", ">="})

ASSIGNMENT_OPS = frozenset(
    {"=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>="}
)

DECISION_KEYWORDS = frozenset({"if", "for", "while", "do", "case", "catch"})
DECISION_OPERATORS = frozenset({"&&", "||", "?"})

_TOKEN_RE = re.compile(
    r"""
    (?P<ident>[A-Za-z_$][A-Za-z0-9_$]*)
  | (?P<number>
        0[xX][0-9a-fA-F_]+[lL]?
      | 0[bB][01_]+[lL]?
      | (?:\d[\d_]*\.[\d_]*|\.\d[\d_]*|\d[\d_]*)(?:[eE][+-]?\d+)?[fFdDlL]?
    )
  | (?P<op>%s)
  | (?P<punct>[;,(){}@])
    """
    % "|".join(re.escape(op) for op in _OPERATORS),
    re.VERBOSE,
)

TAB_WIDTH = 4


class Token(NamedTuple):
    lexeme: str
    kind: str  # operator | operand | keyword | punctuation
    line: int  # 1-based line in the analyzed text
    annotation: bool = False  # part of an @Annotation span


class Predicate(NamedTuple):
    """One condition expression: its comparison count and the variables it reads."""

    comparison_count: int
    control_variables: frozenset[str]


class HalsteadCounts(NamedTuple):
    n1: int  # distinct operators
    n2: int  # distinct operands
    N1: int  # total operators
    N2: int  # total operands


class LineStats(NamedTuple):
    """Per-line surface statistics feeding the readability surrogate.

    Length and density figures are taken over logical (non-blank) lines with
    trailing whitespace removed, so whitespace-only edits cannot move them.
    """

    avg_line_length: float
    max_line_length: float
    identifiers_per_line: float
    mean_indent_units: float
    blank_line_ratio: float
    parens_per_line: float


@dataclass(frozen=True)
class MethodShape:
    """Parse artifacts of one comment-free method body."""

    logical_lines: int
    tokens: tuple[Token, ...]
    predicates: tuple[Predicate, ...]
    decision_points: int
    max_nesting_depth: int
    call_sites: Counter = field(default_factory=Counter)
    indent_per_line: tuple[int, ...] = ()
    halstead_counts: HalsteadCounts = HalsteadCounts(0, 0, 0, 0)
    line_stats: LineStats = LineStats(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    method_name: str | None = None


def strip_comments(source: str) -> str:
    """Remove `//` and `/* */` comments, leaving literals and lines intact.

    Newlines inside block comments are kept so the remaining code stays on
    its original lines. Raises UnterminatedLiteral / UnterminatedComment on
    lexically broken input.
    """
    out: list[str] = []
    i, n = 0, len(source)
    while i < n:
        c = source[i]
        nxt = source[i + 1] if i + 1 < n else ""
        if c == "/" and nxt == "/":
            i += 2
            while i < n and source[i] != "\n":
                i += 1
            continue
        if c == "/" and nxt == "*":
            i += 2
            closed = False
            while i < n:
                if source[i] == "*" and i + 1 < n and source[i + 1] == "/":
                    i += 2
                    closed = True
                    break
                if source[i] == "\n":
                    out.append("\n")
                i += 1
            if not closed:
                raise UnterminatedComment("block comment never closes")
            continue
        if c == '"' or c == "'":
            quote = c
            out.append(c)
            i += 1
            while i < n:
                ch = source[i]
                if ch == "\\" and i + 1 < n:
                    out.append(source[i : i + 2])
                    i += 2
                    continue
                if ch == "\n":
                    raise UnterminatedLiteral(f"{quote}...{quote} literal spans a newline")
                out.append(ch)
                i += 1
                if ch == quote:
                    break
            else:
                raise UnterminatedLiteral(f"{quote}...{quote} literal never closes")
            continue
        out.append(c)
        i += 1
    return "".join(out)


def tokenize(source: str) -> list[Token]:
    """Classify every token of comment-free method text.

    Unlexable characters are skipped; every returned token carries exactly
    one of the four classes.
    """
    tokens: list[Token] = []
    line = 1
    pos = 0
    n = len(source)
    while pos < n:
        c = source[pos]
        if c == "\n":
            line += 1
            pos += 1
            continue
        if c.isspace():
            pos += 1
            continue
        if c == '"' or c == "'":
            end = _literal_end(source, pos)
            tokens.append(Token(source[pos:end], "operand", line))
            pos = end
            continue
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            pos += 1  # stray character (e.g. unicode); ignore
            continue
        text = m.group(0)
        if m.lastgroup == "ident":
            kind = "keyword" if text in KEYWORDS else "operand"
        elif m.lastgroup == "number":
            kind = "operand"
        elif m.lastgroup == "op":
            kind = "operator"
        else:
            kind = "punctuation"
        tokens.append(Token(text, kind, line))
        pos = m.end()
    return _mark_annotations(tokens)


def _literal_end(source: str, start: int) -> int:
    quote = source[start]
    i = start + 1
    while i < len(source):
        if source[i] == "\\":
            i += 2
            continue
        if source[i] == quote:
            return i + 1
        if source[i] == "\n":
            break
        i += 1
    raise UnterminatedLiteral(f"{quote}...{quote} literal never closes")


def _mark_annotations(tokens: list[Token]) -> list[Token]:
    """Flag `@Name(...)` spans so structural passes can skip them."""
    out = list(tokens)
    i = 0
    while i < len(out):
        if out[i].lexeme != "@":
            i += 1
            continue
        j = i + 1
        # dotted annotation name
        while j < len(out) and out[j].kind == "operand":
            j += 1
            if j < len(out) and out[j].lexeme == ".":
                j += 1
            else:
                break
        if j < len(out) and out[j].lexeme == "(":
            depth = 0
            while j < len(out):
                if out[j].lexeme == "(":
                    depth += 1
                elif out[j].lexeme == ")":
                    depth -= 1
                    if depth == 0:
                        j += 1
                        break
                j += 1
        for k in range(i, min(j, len(out))):
            out[k] = out[k]._replace(annotation=True)
        i = j
    return out


def _match_paren(tokens: list[Token], open_idx: int) -> int:
    """Index of the `)` matching tokens[open_idx] == `(`."""
    depth = 0
    for i in range(open_idx, len(tokens)):
        lex = tokens[i].lexeme
        if lex == "(":
            depth += 1
        elif lex == ")":
            depth -= 1
            if depth == 0:
                return i
    raise UnbalancedBraces("unclosed parenthesis group")


def _find_body_start(tokens: list[Token]) -> int:
    for i, tok in enumerate(tokens):
        if tok.lexeme == "{" and not tok.annotation:
            return i
    raise EmptyMethod("no body block found")


def _check_braces(tokens: list[Token], body_start: int) -> None:
    depth = 0
    for tok in tokens[body_start:]:
        if tok.lexeme == "{":
            depth += 1
        elif tok.lexeme == "}":
            depth -= 1
            if depth < 0:
                raise UnbalancedBraces("closing brace without opener")
    if depth != 0:
        raise UnbalancedBraces(f"{depth} unclosed brace(s)")


def _declared_name_index(tokens: list[Token], body_start: int) -> int | None:
    """Token index of the method's own name in its signature, if present."""
    for i in range(body_start):
        tok = tokens[i]
        if tok.annotation or tok.lexeme != "(":
            continue
        prev = i - 1
        while prev >= 0 and tokens[prev].annotation:
            prev -= 1
        if prev >= 0 and tokens[prev].kind == "operand":
            return prev
        return None
    return None


def _identifier_like(tok: Token) -> bool:
    return (
        tok.kind == "operand"
        and bool(re.match(r"[A-Za-z_$]", tok.lexeme))
        and tok.lexeme not in LITERAL_WORDS
    )


def _predicate_from_slice(tokens: list[Token], lo: int, hi: int) -> Predicate:
    """Comparisons and referenced variables in tokens[lo:hi]."""
    comparisons = 0
    variables: set[str] = set()
    for i in range(lo, hi):
        tok = tokens[i]
        if tok.annotation:
            continue
        if tok.kind == "operator" and tok.lexeme in COMPARISON_OPS:
            comparisons += 1
        elif _identifier_like(tok):
            nxt = tokens[i + 1] if i + 1 < len(tokens) else None
            if nxt is None or nxt.lexeme != "(":
                variables.add(tok.lexeme)
    return Predicate(comparisons, frozenset(variables))


def _extract_predicates(tokens: list[Token], body_start: int) -> list[Predicate]:
    predicates: list[Predicate] = []
    i = body_start
    while i < len(tokens):
        tok = tokens[i]
        if tok.annotation:
            i += 1
            continue
        if (
            tok.kind == "keyword"
            and tok.lexeme in ("if", "while", "switch", "for")
            and i + 1 < len(tokens)
            and tokens[i + 1].lexeme == "("
        ):
            close = _match_paren(tokens, i + 1)
            lo, hi = i + 2, close
            if tok.lexeme == "for":
                lo, hi = _for_condition_slice(tokens, lo, hi)
            predicates.append(_predicate_from_slice(tokens, lo, hi))
            i = close + 1
            continue
        if tok.kind == "operator" and tok.lexeme == "?":
            lo = _ternary_condition_start(tokens, i)
            predicates.append(_predicate_from_slice(tokens, lo, i))
        i += 1
    return predicates


def _for_condition_slice(tokens: list[Token], lo: int, hi: int) -> tuple[int, int]:
    """Middle clause of a classic for; the whole group for enhanced for."""
    semis = []
    depth = 0
    for i in range(lo, hi):
        lex = tokens[i].lexeme
        if lex == "(":
            depth += 1
        elif lex == ")":
            depth -= 1
        elif lex == ";" and depth == 0:
            semis.append(i)
    if len(semis) == 2:
        return semis[0] + 1, semis[1]
    return lo, hi


_TERNARY_STOPPERS = frozenset({";", "{", "}", "?", ":"})


def _ternary_condition_start(tokens: list[Token], qpos: int) -> int:
    """Walk back from `?` to the start of its condition expression."""
    paren = 0
    bracket = 0
    i = qpos - 1
    while i >= 0:
        lex = tokens[i].lexeme
        if lex == ")":
            paren += 1
        elif lex == "(":
            paren -= 1
            if paren < 0:
                return i + 1
        elif lex == "]":
            bracket += 1
        elif lex == "[":
            bracket -= 1
            if bracket < 0:
                return i + 1
        elif paren == 0 and bracket == 0:
            if lex in _TERNARY_STOPPERS or lex in ASSIGNMENT_OPS:
                return i + 1
            if lex == ",":
                return i + 1
            if tokens[i].kind == "keyword" and lex in ("return", "throw"):
                return i + 1
        i -= 1
    return 0


def _count_decisions(tokens: list[Token]) -> int:
    count = 0
    for tok in tokens:
        if tok.annotation:
            continue
        if tok.kind == "keyword" and tok.lexeme in DECISION_KEYWORDS:
            count += 1
        elif tok.kind == "operator" and tok.lexeme in DECISION_OPERATORS:
            count += 1
    return count


def _collect_call_sites(
    tokens: list[Token], declared_name_idx: int | None
) -> Counter:
    calls: Counter = Counter()
    for i, tok in enumerate(tokens):
        if tok.annotation or i == declared_name_idx:
            continue
        if not _identifier_like(tok):
            continue
        if i + 1 < len(tokens) and tokens[i + 1].lexeme == "(":
            calls[tok.lexeme] += 1
    return calls


_CONTROL_WITH_CLAUSE = frozenset({"if", "for", "while", "switch", "catch", "synchronized"})


def _max_nesting_depth(tokens: list[Token], body_start: int) -> int:
    """Deepest block nesting, counting the body as depth 1.

    Brace-less control statement bodies count one implicit level, closed by
    the `;` or block that ends the statement. `else if` continues its chain
    at the same depth.
    """
    stack: list[str] = []  # entries: 'brace', 'do_brace', 'implicit'
    max_depth = 0
    paren = 0
    i = body_start
    n = len(tokens)

    def peek(j: int) -> Token | None:
        return tokens[j] if j < n else None

    while i < n:
        tok = tokens[i]
        if tok.annotation:
            i += 1
            continue
        lex = tok.lexeme
        if lex == "(":
            paren += 1
        elif lex == ")":
            paren -= 1
        elif lex == "{":
            prev = tokens[i - 1] if i > 0 else None
            stack.append("do_brace" if prev is not None and prev.lexeme == "do" else "brace")
            max_depth = max(max_depth, len(stack))
        elif lex == "}":
            was_do = False
            while stack:
                entry = stack.pop()
                if entry in ("brace", "do_brace"):
                    was_do = entry == "do_brace"
                    break
            nxt = peek(i + 1)
            if not was_do and (nxt is None or nxt.lexeme not in ("else", "catch", "finally")):
                while stack and stack[-1] == "implicit":
                    stack.pop()
        elif lex == ";" and paren == 0:
            while stack and stack[-1] == "implicit":
                stack.pop()
        elif tok.kind == "keyword" and lex in _CONTROL_WITH_CLAUSE:
            j = i + 1
            if j < n and tokens[j].lexeme == "(":
                j = _match_paren(tokens, j) + 1
            nxt = peek(j)
            if nxt is not None and nxt.lexeme not in ("{", ";"):
                stack.append("implicit")
                max_depth = max(max_depth, len(stack))
            i = j
            continue
        elif tok.kind == "keyword" and lex == "else":
            nxt = peek(i + 1)
            if nxt is not None and nxt.lexeme not in ("{", "if", ";"):
                stack.append("implicit")
                max_depth = max(max_depth, len(stack))
        elif tok.kind == "keyword" and lex == "do":
            nxt = peek(i + 1)
            if nxt is not None and nxt.lexeme != "{":
                stack.append("implicit")
                max_depth = max(max_depth, len(stack))
        i += 1
    return max_depth


def _indent_width(line: str) -> int:
    width = 0
    for ch in line:
        if ch == " ":
            width += 1
        elif ch == "\t":
            width += TAB_WIDTH
        else:
            break
    return width


def _indent_profile(logical: list[str]) -> tuple[int, ...]:
    widths = [_indent_width(line) for line in logical]
    nonzero = [w for w in widths if w > 0]
    unit = math.gcd(*nonzero) if nonzero else 1
    return tuple(w // unit for w in widths)


def _halstead_counts(tokens: list[Token]) -> HalsteadCounts:
    operators = Counter(t.lexeme for t in tokens if t.kind == "operator")
    operands = Counter(t.lexeme for t in tokens if t.kind == "operand")
    return HalsteadCounts(
        n1=len(operators),
        n2=len(operands),
        N1=sum(operators.values()),
        N2=sum(operands.values()),
    )


def _line_stats(source: str, tokens: list[Token], logical: list[str]) -> LineStats:
    physical = source.split("\n")
    blanks = sum(1 for line in physical if not line.strip())
    if not logical:
        return LineStats(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    count = len(logical)
    lengths = [len(line.rstrip()) for line in logical]
    identifiers = sum(1 for t in tokens if _identifier_like(t))
    parens = sum(1 for t in tokens if t.lexeme in ("(", ")"))
    profile = _indent_profile(logical)
    return LineStats(
        avg_line_length=sum(lengths) / count,
        max_line_length=float(max(lengths)),
        identifiers_per_line=identifiers / count,
        mean_indent_units=sum(profile) / count,
        blank_line_ratio=blanks / len(physical),
        parens_per_line=parens / count,
    )


def parse_method(source: str) -> MethodShape:
    """Build a MethodShape from comment-free method text.

    Raises EmptyMethod when no `{...}` body exists and UnbalancedBraces on
    mismatched nesting. Apply strip_comments first; this function does not.
    """
    tokens = tokenize(source)
    body_start = _find_body_start(tokens)
    _check_braces(tokens, body_start)

    logical = [line for line in source.split("\n") if line.strip()]
    declared = _declared_name_index(tokens, body_start)
    predicates = _extract_predicates(tokens, body_start)

    return MethodShape(
        logical_lines=len(logical),
        tokens=tuple(tokens),
        predicates=tuple(predicates),
        decision_points=_count_decisions(tokens),
        max_nesting_depth=_max_nesting_depth(tokens, body_start),
        call_sites=_collect_call_sites(tokens, declared),
        indent_per_line=_indent_profile(logical),
        halstead_counts=_halstead_counts(tokens),
        line_stats=_line_stats(source, tokens, logical),
        method_name=tokens[declared].lexeme if declared is not None else None,
    )


def analyze(source: str) -> MethodShape:
    """strip_comments + parse_method in one step."""
    return parse_method(strip_comments(source))


def iter_logical_lines(source: str) -> Iterator[str]:
    for line in source.split("\n"):
        if line.strip():
            yield line

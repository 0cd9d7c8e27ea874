"""Regular expressions over episode labels.

Syntax: labels ``INT``, ``NON_INT``, ``SOLO``, ``IDLE`` (``Non-INT`` is
accepted as a spelling of ``NON_INT``), juxtaposition for concatenation,
``|`` for alternation, postfix ``*``, ``+``, ``?`` and parentheses.

Matching returns non-overlapping, non-empty, leftmost-longest matches over
the label sequence.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .episodes import Episode, Label
from .errors import PatternError
from .model import TimeInterval

# integrated work, a non-integrated stretch, then integrated work again
PRESETS = {
    "composite": "INT NON_INT INT",
}

_TOKEN_RE = re.compile(r"\s*(?:([()|*+?])|([A-Za-z][A-Za-z_\-]*))")
_ALIASES = {"NON-INT": Label.NON_INT, "NONINT": Label.NON_INT}


def _tokenize(text: str) -> list[str | Label]:
    tokens: list[str | Label] = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise PatternError(f"unexpected character {text[pos:].strip()[:1]!r} at offset {pos}")
        if m.group(1):
            tokens.append(m.group(1))
        else:
            word = m.group(2).upper()
            label = _ALIASES.get(word)
            if label is None:
                try:
                    label = Label(word)
                except ValueError:
                    raise PatternError(f"unknown episode label {m.group(2)!r}") from None
            tokens.append(label)
        pos = m.end()
    return tokens


class _NFA:
    def __init__(self):
        self.eps: list[list[int]] = []
        self.edges: list[list[tuple[Label, int]]] = []

    def state(self) -> int:
        self.eps.append([])
        self.edges.append([])
        return len(self.eps) - 1


class _Parser:
    """Recursive descent straight into Thompson fragments ``(start, accept)``."""

    def __init__(self, tokens, nfa: _NFA):
        self.tokens = tokens
        self.pos = 0
        self.nfa = nfa

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def parse(self):
        frag = self.alternation()
        if self.peek() is not None:
            raise PatternError(f"unexpected {self.peek()!r}")
        return frag

    def alternation(self):
        frags = [self.sequence()]
        while self.peek() == "|":
            self.pos += 1
            frags.append(self.sequence())
        if len(frags) == 1:
            return frags[0]
        start, accept = self.nfa.state(), self.nfa.state()
        for s, a in frags:
            self.nfa.eps[start].append(s)
            self.nfa.eps[a].append(accept)
        return start, accept

    def sequence(self):
        frags = []
        while self.peek() is not None and self.peek() not in ("|", ")"):
            frags.append(self.repetition())
        if not frags:
            raise PatternError("empty expression")
        for (_, a), (s, _) in zip(frags, frags[1:]):
            self.nfa.eps[a].append(s)
        return frags[0][0], frags[-1][1]

    def repetition(self):
        s, a = self.atom()
        while self.peek() in ("*", "+", "?"):
            op = self.tokens[self.pos]
            self.pos += 1
            start, accept = self.nfa.state(), self.nfa.state()
            self.nfa.eps[start].append(s)
            self.nfa.eps[a].append(accept)
            if op in ("*", "?"):
                self.nfa.eps[start].append(accept)
            if op in ("*", "+"):
                self.nfa.eps[a].append(s)
            s, a = start, accept
        return s, a

    def atom(self):
        tok = self.peek()
        if tok is None:
            raise PatternError("expression ends unexpectedly")
        if isinstance(tok, Label):
            self.pos += 1
            s, a = self.nfa.state(), self.nfa.state()
            self.nfa.edges[s].append((tok, a))
            return s, a
        if tok == "(":
            self.pos += 1
            frag = self.alternation()
            if self.peek() != ")":
                raise PatternError("unbalanced parenthesis")
            self.pos += 1
            return frag
        raise PatternError(f"unexpected {tok!r}")


@dataclass(frozen=True)
class CompiledPattern:
    source: str
    nfa: _NFA
    start: int
    accept: int

    def _closure(self, states: set[int]) -> set[int]:
        stack = list(states)
        seen = set(states)
        while stack:
            for nxt in self.nfa.eps[stack.pop()]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return seen

    def longest_at(self, labels: list[Label], i: int) -> int | None:
        """End index of the longest non-empty match starting at ``i``."""
        current = self._closure({self.start})
        best = None
        j = i
        while current and j < len(labels):
            step = {dst for s in current for lab, dst in self.nfa.edges[s] if lab is labels[j]}
            current = self._closure(step)
            j += 1
            if self.accept in current:
                best = j
        return best


def compile_pattern(pattern: str) -> CompiledPattern:
    source = PRESETS.get(pattern.strip(), pattern)
    tokens = _tokenize(source)
    if not tokens:
        raise PatternError("empty expression")
    nfa = _NFA()
    start, accept = _Parser(tokens, nfa).parse()
    return CompiledPattern(source, nfa, start, accept)


@dataclass(frozen=True)
class PatternMatch:
    start: int  # index of first episode
    stop: int  # one past the last episode
    interval: TimeInterval
    labels: tuple[Label, ...]


def match_pattern(episodes: list[Episode], pattern: str | CompiledPattern) -> list[PatternMatch]:
    compiled = pattern if isinstance(pattern, CompiledPattern) else compile_pattern(pattern)
    labels = [ep.label for ep in episodes]
    matches = []
    i = 0
    while i < len(labels):
        end = compiled.longest_at(labels, i)
        if end is None:
            i += 1
            continue
        interval = TimeInterval(episodes[i].interval.start_ms, episodes[end - 1].interval.end_ms)
        matches.append(PatternMatch(i, end, interval, tuple(labels[i:end])))
        i = end
    return matches

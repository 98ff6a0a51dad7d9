"""
Composition trees: which fundamental problem replaced which gate slot.

Tree-spec grammar::

    tree   := base [ "(" child ("," child)* ")" ]
    base   := "pair" | "triple" | "twoperm(" INT ")"
    child  := "slot" INT ":" tree

e.g. ``pair(slot1:pair(slot0:triple))``.  A slot without a child is a leaf,
i.e. a single black-box gate.  Leaves are numbered left to right (slot order,
depth first), which is also the gate numbering of the induced instance.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .errors import TreeSpecError

PAIR, TRIPLE, TWO_PERM = "pair", "triple", "twoperm"


@dataclass(frozen=True)
class Node:
    kind: str
    k: int
    children: tuple = field(default=())  # sorted ((slot, Node), ...)

    def __post_init__(self):
        expected = {PAIR: 2, TRIPLE: 3}.get(self.kind)
        if self.kind == TWO_PERM:
            if self.k < 2:
                raise TreeSpecError("twoperm needs at least 2 gates")
            if self.children:
                raise TreeSpecError("twoperm nodes only take leaf slots")
        elif expected is None:
            raise TreeSpecError(f"unknown node kind {self.kind!r}")
        elif self.k != expected:
            raise TreeSpecError(f"{self.kind} has {expected} slots, got k={self.k}")
        kids = tuple(sorted(dict(self.children).items()))
        if len(kids) != len(self.children):
            raise TreeSpecError("duplicate slot in children")
        for slot, child in kids:
            if not 0 <= slot < self.k:
                raise TreeSpecError(f"slot {slot} out of range for {self.kind}")
            if child.kind == TWO_PERM:
                raise TreeSpecError("twoperm can only be used as the root")
        object.__setattr__(self, "children", kids)

    def child(self, slot: int) -> "Node | None":
        return dict(self.children).get(slot)

    @property
    def n_leaves(self) -> int:
        return sum(self.block_size(s) for s in range(self.k))

    def block_size(self, slot: int) -> int:
        c = self.child(slot)
        return 1 if c is None else c.n_leaves

    def block_offsets(self) -> list:
        """First gate index of every slot's block."""
        offs, acc = [], 0
        for s in range(self.k):
            offs.append(acc)
            acc += self.block_size(s)
        return offs

    @property
    def is_fundamental(self) -> bool:
        return not self.children

    @property
    def k_max(self) -> int:
        return max([self.k] + [c.k_max for _, c in self.children])

    @property
    def n_nodes(self) -> int:
        return 1 + sum(c.n_nodes for _, c in self.children)

    def spec(self) -> str:
        head = f"twoperm({self.k})" if self.kind == TWO_PERM else self.kind
        if not self.children:
            return head
        return head + "(" + ",".join(f"slot{s}:{c.spec()}" for s, c in self.children) + ")"

    def __str__(self):
        return self.spec()


def pair(**slots) -> Node:
    return Node(PAIR, 2, _kw_children(slots))


def triple(**slots) -> Node:
    return Node(TRIPLE, 3, _kw_children(slots))


def twoperm(n: int) -> Node:
    return Node(TWO_PERM, n)


def _kw_children(slots):
    out = []
    for key, child in slots.items():
        m = re.fullmatch(r"slot(\d+)", key)
        if not m:
            raise TreeSpecError(f"bad child keyword {key!r}")
        out.append((int(m.group(1)), child))
    return tuple(out)


_TOKEN = re.compile(r"\s*(twoperm|pair|triple|slot\d+|\d+|[(),:])")


def parse_tree(text: str) -> Node:
    tokens, pos = [], 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise TreeSpecError(f"unexpected input at {pos}: {text[pos:pos + 10]!r}")
        tokens.append(m.group(1))
        pos = m.end()
    node, i = _parse_node(tokens, 0)
    if i != len(tokens):
        raise TreeSpecError(f"trailing tokens: {' '.join(tokens[i:])}")
    return node


def _expect(tokens, i, tok):
    if i >= len(tokens) or tokens[i] != tok:
        got = tokens[i] if i < len(tokens) else "end of input"
        raise TreeSpecError(f"expected {tok!r}, got {got!r}")
    return i + 1


def _parse_node(tokens, i):
    if i >= len(tokens):
        raise TreeSpecError("unexpected end of tree spec")
    head = tokens[i]
    i += 1
    if head == TWO_PERM:
        i = _expect(tokens, i, "(")
        if i >= len(tokens) or not tokens[i].isdigit():
            raise TreeSpecError("twoperm needs an integer gate count")
        n = int(tokens[i])
        i = _expect(tokens, i + 1, ")")
        return Node(TWO_PERM, n), i
    if head not in (PAIR, TRIPLE):
        raise TreeSpecError(f"unknown node {head!r}")
    children = []
    if i < len(tokens) and tokens[i] == "(":
        i += 1
        while True:
            if i >= len(tokens) or not tokens[i].startswith("slot"):
                raise TreeSpecError("expected 'slotK:' child")
            slot = int(tokens[i][4:])
            i = _expect(tokens, i + 1, ":")
            child, i = _parse_node(tokens, i)
            children.append((slot, child))
            if i < len(tokens) and tokens[i] == ",":
                i += 1
                continue
            i = _expect(tokens, i, ")")
            break
    return Node(head, 2 if head == PAIR else 3, tuple(children)), i


def _compositions(total: int, parts: int) -> Iterator[tuple]:
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_trees(n_leaves: int, kinds=(PAIR, TRIPLE)) -> Iterator[Node]:
    """Every tree over ``kinds`` with exactly ``n_leaves`` leaves."""
    for kind in kinds:
        k = 2 if kind == PAIR else 3
        if n_leaves < k:
            continue
        for sizes in _compositions(n_leaves, k):
            options = [[None] if m == 1 else list(enumerate_trees(m, kinds)) for m in sizes]
            for combo in _product(options):
                kids = tuple((s, c) for s, c in enumerate(combo) if c is not None)
                yield Node(kind, k, kids)


def _product(options):
    if not options:
        yield ()
        return
    for head in options[0]:
        for tail in _product(options[1:]):
            yield (head,) + tail


def random_tree(n_leaves: int, rng: np.random.Generator, kinds=(PAIR, TRIPLE)) -> Node:
    if n_leaves < 2:
        raise ValueError("a tree needs at least 2 leaves")
    allowed = [kd for kd in kinds if (2 if kd == PAIR else 3) <= n_leaves]
    kind = allowed[rng.integers(len(allowed))]
    k = 2 if kind == PAIR else 3
    # uniform random composition of n_leaves into k positive parts
    cuts = np.sort(rng.choice(np.arange(1, n_leaves), size=k - 1, replace=False))
    sizes = np.diff(np.concatenate([[0], cuts, [n_leaves]]))
    kids = tuple((s, random_tree(int(m), rng, kinds)) for s, m in enumerate(sizes) if m > 1)
    return Node(kind, k, kids)


def balanced_pair_tree(n_leaves: int) -> Node:
    """All-pair tree splitting leaves as (floor(n/2), ceil(n/2)) at every node."""
    if n_leaves < 2:
        raise ValueError("a tree needs at least 2 leaves")
    left, right = n_leaves // 2, n_leaves - n_leaves // 2
    kids = [(s, balanced_pair_tree(m)) for s, m in ((0, left), (1, right)) if m > 1]
    return Node(PAIR, 2, tuple(kids))


def chain_pair_tree(n_leaves: int) -> Node:
    """pair(slot1:pair(slot1:...)): every split happens in the last slot."""
    if n_leaves < 2:
        raise ValueError("a tree needs at least 2 leaves")
    if n_leaves == 2:
        return Node(PAIR, 2)
    return Node(PAIR, 2, ((1, chain_pair_tree(n_leaves - 1)),))


def balanced_triple_tree(n_leaves: int) -> Node:
    """All-triple tree; only odd leaf counts >= 3 are reachable."""
    if n_leaves < 3 or n_leaves % 2 == 0:
        raise ValueError("all-triple trees have an odd number (>= 3) of leaves")
    # 3 blocks with odd sizes summing to n, as equal as possible
    blocks = [1, 1, 1]
    extra = (n_leaves - 3) // 2
    for i in range(extra):
        blocks[i % 3] += 2
    kids = tuple((s, balanced_triple_tree(m)) for s, m in enumerate(blocks) if m > 1)
    return Node(TRIPLE, 3, kids)

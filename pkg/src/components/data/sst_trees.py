"""
Binary sentiment items from the PTB-style sentiment treebank files.

Each line is one tree such as `(3 (2 It) (4 (2 's) (3 good)))` with labels 0-4.
Labels 0-1 become NEGATIVE (0), 3-4 POSITIVE (1), neutral 2 is dropped.
"""
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Tuple, Union

from src.core.errors import DataError

BRACKETS = {"-LRB-": "(", "-RRB-": ")"}


@dataclass
class Tree:
    label: int
    children: List["Tree"] = field(default_factory=list)
    word: Optional[str] = None

    def leaves(self) -> List[str]:
        if self.word is not None:
            return [self.word]
        return [w for child in self.children for w in child.leaves()]

    def subtrees(self) -> Iterator["Tree"]:
        yield self
        for child in self.children:
            yield from child.subtrees()

    @property
    def text(self) -> str:
        return " ".join(self.leaves())


def _tokens(line: str) -> List[str]:
    return line.replace("(", " ( ").replace(")", " ) ").split()


def parse_tree(line: str) -> Tree:
    tokens = _tokens(line)
    if not tokens:
        raise ValueError("empty tree")

    def parse(position: int) -> Tuple[Tree, int]:
        if tokens[position] != "(":
            raise ValueError(f"expected '(' at token {position}")
        try:
            label = int(tokens[position + 1])
        except (IndexError, ValueError) as e:
            raise ValueError(f"missing label at token {position + 1}") from e
        position += 2
        if tokens[position] not in ("(", ")"):
            word = BRACKETS.get(tokens[position], tokens[position])
            if tokens[position + 1] != ")":
                raise ValueError(f"expected ')' after word {word!r}")
            return Tree(label=label, word=word), position + 2
        node = Tree(label=label)
        while tokens[position] == "(":
            child, position = parse(position)
            node.children.append(child)
        if tokens[position] != ")":
            raise ValueError(f"expected ')' at token {position}")
        return node, position + 1

    try:
        tree, end = parse(0)
    except IndexError as e:
        raise ValueError("unbalanced brackets") from e
    if end != len(tokens):
        raise ValueError("trailing tokens after the tree")
    return tree


def binary_label(label: int) -> Optional[int]:
    if label < 2:
        return 0
    if label > 2:
        return 1
    return None


def sentiment_items(lines: List[str], phrases: bool, source: Union[str, None] = None) -> List[Tuple[str, int]]:
    """(text, binary label) pairs: every labelled phrase once when `phrases`, otherwise only the roots."""
    items: List[Tuple[str, int]] = []
    seen = set()
    for line_number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            tree = parse_tree(line)
        except ValueError as e:
            raise DataError(f"malformed tree: {e}", source, line_number) from e
        for node in tree.subtrees() if phrases else [tree]:
            label = binary_label(node.label)
            text = node.text
            if label is None or (phrases and text in seen):
                continue
            seen.add(text)
            items.append((text, label))
    return items

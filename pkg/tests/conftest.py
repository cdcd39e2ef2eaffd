"""Shared morphism suite + repo paths for the test modules."""

from pathlib import Path

import pytest

from morphcert.words import Alphabet, Morphism, MorphicSystem

REPO_ROOT = Path(__file__).resolve().parent.parent
MORPHISM_DIR = REPO_ROOT / "morphisms"

GOLDEN = (1 + 5**0.5) / 2


def make_system(letters, rules, start, coding=None) -> MorphicSystem:
    m = Morphism.from_rules(Alphabet(tuple(letters)), rules)
    return MorphicSystem.build(m, start, coding)


def make_morphism(letters, rules) -> Morphism:
    return Morphism.from_rules(Alphabet(tuple(letters)), rules)


def thue_morse() -> MorphicSystem:
    return make_system("01", {"0": ["0", "1"], "1": ["1", "0"]}, "0")


def fibonacci() -> MorphicSystem:
    return make_system(
        "ab", {"a": ["a", "b"], "b": ["a"]}, "a", coding={"a": "0", "b": "1"}
    )


def column() -> MorphicSystem:
    # |phi^k(a)| = k + 1
    return make_system("ab", {"a": ["a", "b"], "b": ["b"]}, "a")


def chain() -> MorphicSystem:
    # |phi^k(a)| = 1 + k + k(k-1)/2
    return make_system(
        "abc", {"a": ["a", "b"], "b": ["b", "c"], "c": ["c"]}, "a"
    )


def doubling() -> MorphicSystem:
    return make_system("ab", {"a": ["a", "a", "b"], "b": ["b", "b"]}, "a")


def swap() -> Morphism:
    # not prolongable: only usable at the Morphism level
    return make_morphism("ab", {"a": ["b"], "b": ["a"]})


def counting_suite() -> list[tuple[str, Morphism]]:
    """The six-morphism suite used by the exact-counting and growth checks."""
    return [
        ("thue_morse", thue_morse().morphism),
        ("fibonacci", fibonacci().morphism),
        ("column", column().morphism),
        ("chain", chain().morphism),
        ("doubling", doubling().morphism),
        ("swap", swap()),
    ]


@pytest.fixture
def tm() -> MorphicSystem:
    return thue_morse()


@pytest.fixture
def fib() -> MorphicSystem:
    return fibonacci()

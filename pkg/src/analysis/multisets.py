"""
Finite multisets of natural numbers and their lexicographic order.

The order compares maxima first and recurses on what remains after removing
one copy of each maximum; the empty multiset is below every other one. On
multisets of bounded size it is well-founded, which is what makes peak
removal terminate.
"""

from collections import Counter
from enum import Enum
from typing import Iterable, Iterator, List, Mapping, Optional, Tuple

from typing_extensions import Self

from ..model import Term
from ..ruleEngine.chase import ChaseTrace


class Ordering(str, Enum):
    LESS = "less"
    EQUAL = "equal"
    GREATER = "greater"


class TimestampMultiset:
    """
    An immutable finite multiset over the naturals.

    Equality and hashing go through the sorted element tuple; comparison
    operators use the lexicographic multiset order.
    """

    __slots__ = ("_counts", "_key")

    def __init__(self, values: Iterable[int] = ()):
        counts = Counter()
        for value in values:
            if not isinstance(value, int) or value < 0:
                raise ValueError(f"multiset elements must be naturals, got {value!r}")
            counts[value] += 1
        self._counts = counts
        self._key = tuple(sorted(counts.elements(), reverse=True))

    @classmethod
    def of(cls, *values: int) -> Self:
        return cls(values)

    @classmethod
    def from_counts(cls, counts: Mapping[int, int]) -> Self:
        return cls(v for v, n in counts.items() for _ in range(n))

    @property
    def counts(self) -> Mapping[int, int]:
        return dict(self._counts)

    @property
    def size(self) -> int:
        return len(self._key)

    def __len__(self) -> int:
        return self.size

    def __bool__(self) -> bool:
        return bool(self._key)

    def __iter__(self) -> Iterator[int]:
        return iter(self._key)

    def count(self, value: int) -> int:
        return self._counts.get(value, 0)

    def max(self) -> Optional[int]:
        """Largest element; None for the empty multiset"""
        return self._key[0] if self._key else None

    def remove_one(self, value: int) -> "TimestampMultiset":
        """This multiset minus one copy of value (unchanged if absent)"""
        return self.difference(TimestampMultiset.of(value))

    def union(self, other: "TimestampMultiset") -> "TimestampMultiset":
        """Pointwise sum of multiplicities"""
        return TimestampMultiset.from_counts(self._counts + other._counts)

    def intersection(self, other: "TimestampMultiset") -> "TimestampMultiset":
        """Pointwise minimum of multiplicities"""
        return TimestampMultiset.from_counts(self._counts & other._counts)

    def difference(self, other: "TimestampMultiset") -> "TimestampMultiset":
        """Pointwise truncated difference of multiplicities"""
        return TimestampMultiset.from_counts(self._counts - other._counts)

    def descending(self) -> Tuple[int, ...]:
        return self._key

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TimestampMultiset) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __lt__(self, other: "TimestampMultiset") -> bool:
        return mlex_compare(self, other) is Ordering.LESS

    def __le__(self, other: "TimestampMultiset") -> bool:
        return mlex_compare(self, other) is not Ordering.GREATER

    def __gt__(self, other: "TimestampMultiset") -> bool:
        return mlex_compare(self, other) is Ordering.GREATER

    def __ge__(self, other: "TimestampMultiset") -> bool:
        return mlex_compare(self, other) is not Ordering.LESS

    def __repr__(self) -> str:
        return "⦃" + ",".join(str(v) for v in sorted(self._key)) + "⦄"


def mlex_compare(left: TimestampMultiset, right: TimestampMultiset) -> Ordering:
    """
    Lexicographic multiset order.

    The empty multiset is below every nonempty one; otherwise maxima are
    compared and, on a tie, one copy of the maximum is removed on both sides.
    """
    while True:
        if not left and not right:
            return Ordering.EQUAL
        if not left:
            return Ordering.LESS
        if not right:
            return Ordering.GREATER
        m, n = left.max(), right.max()
        if m != n:
            return Ordering.LESS if m < n else Ordering.GREATER
        left, right = left.remove_one(m), right.remove_one(n)


def lex_minimum(collection: Iterable[TimestampMultiset]) -> Optional[TimestampMultiset]:
    """
    The unique mlex-minimum of a finite collection, built constructively.

    Take the least maximum m, keep the members whose maximum is m, strip one
    m from each and recurse; the minimum is the recursive minimum plus m.
    """
    members: List[TimestampMultiset] = list(collection)
    if not members:
        return None
    peeled: List[int] = []
    while True:
        if any(not m for m in members):
            return TimestampMultiset.from_counts(Counter(peeled))
        least = min(m.max() for m in members)
        members = [m.remove_one(least) for m in members if m.max() == least]
        peeled.append(least)


def timestamps_of(terms: Iterable[Term], trace: ChaseTrace) -> TimestampMultiset:
    """
    ⦃ts(t) | t ∈ terms⦄, with input terms at 0.

    Raises:
        UnknownTermError: If a term does not occur in the trace
    """
    return TimestampMultiset(trace.timestamp(t) for t in set(terms))

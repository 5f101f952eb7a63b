"""
No-good cuts and the pool of explored selections.
"""
from typing import List, Set

from shared.errors import ModelError
from tools.gaussian.types import SelectionPair
from tools.instances.region import LinearConstraint, Relation


def no_good_cut(x_hat: SelectionPair) -> LinearConstraint:
    """
    Cut violated by x_hat and by no other binary point.

    sum_{x_hat = 1} x - sum_{x_hat = 0} x <= sum(x_hat) - 1
    """
    terms = []
    for i in range(2):
        for j in range(x_hat.n):
            terms.append((i, j, 1.0 if x_hat.x[i, j] else -1.0))
    return LinearConstraint(tuple(terms), Relation.LE, float(x_hat.x.sum()) - 1.0, name=f"nogood_{x_hat.fingerprint()}")


class CutPool:
    """Ordered no-good cuts, one per explored selection."""

    def __init__(self):
        self.cuts: List[LinearConstraint] = []
        self.explored: Set[str] = set()

    def __len__(self) -> int:
        return len(self.cuts)

    def __contains__(self, x: SelectionPair) -> bool:
        return x.fingerprint() in self.explored

    def add(self, x_hat: SelectionPair) -> LinearConstraint:
        """
        Record x_hat as explored and return its cut.

        Raises:
            ModelError: If x_hat was explored before
        """
        fingerprint = x_hat.fingerprint()
        if fingerprint in self.explored:
            raise ModelError(f"selection {fingerprint} returned twice; its cut was not enforced")
        cut = no_good_cut(x_hat)
        self.explored.add(fingerprint)
        self.cuts.append(cut)
        return cut

"""
Arithmetic operation tally.

Algorithms charge field operations and comparisons here as they perform them, so the
counts measure the real-number model's cost independently of the scalar backend.
"""

from dataclasses import asdict, dataclass


@dataclass
class OpCounter:
    """Per-invocation tally. Not shared across threads."""

    mul: int = 0
    add: int = 0
    div: int = 0
    cmp: int = 0
    evals: int = 0  # phi / phi' evaluations inside HYBRID
    max_chain_length: int = 0
    max_depth: int = 0

    def charge_mul(self, n=1):
        self.mul += n

    def charge_add(self, n=1):
        self.add += n

    def charge_div(self, n=1):
        self.div += n

    def charge_cmp(self, n=1):
        self.cmp += n

    def charge_eval(self, n=1):
        self.evals += n

    def note_chain(self, k):
        self.max_chain_length = max(self.max_chain_length, k)

    def note_depth(self, depth):
        self.max_depth = max(self.max_depth, depth)

    @property
    def total(self):
        """Field operations plus comparisons."""
        return self.mul + self.add + self.div + self.cmp

    def as_dict(self):
        data = asdict(self)
        data["total"] = self.total
        return data

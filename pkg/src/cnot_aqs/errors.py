"""Exception types shared across the simulator."""


class SizeError(ValueError):
    """Qubit counts or sequence lengths do not line up."""


class NormalizationError(ValueError):
    """A single-qubit amplitude pair is not normalized."""


class InvalidKeyError(ValueError):
    """A key sequence is not a permutation of 1..n."""


class NonSeparableError(Exception):
    """The state is entangled across the requested bipartition."""

    def __init__(self, cut: int, singular_values):
        self.cut = cut
        self.singular_values = tuple(float(s) for s in singular_values)
        super().__init__(
            f"state is not a product across cut {cut} "
            f"(second singular value {self.singular_values[1]:.3e})"
        )

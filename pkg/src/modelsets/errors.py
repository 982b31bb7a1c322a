"""Shared exception types.

The CLI maps these onto exit codes, so library code should raise the most
specific one that applies: DescriptorError for malformed input descriptors,
RefusalError for computations whose runtime preconditions are not met, and
BudgetError when an explicit resource limit would be exceeded.
"""


class DescriptorError(ValueError):
    """A config file, descriptor, or CLI argument could not be interpreted."""


class RefusalError(RuntimeError):
    """A computation was declined because its preconditions do not hold."""


class BudgetError(RuntimeError):
    """A computation would exceed a configured memory or size budget."""

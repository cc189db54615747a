"""Exceptions raised on numeric failures (as opposed to bad inputs).

Input-validation problems raise plain ``ValueError``; the classes here mark
conditions where the inputs were admissible but the computation could not
deliver a trustworthy answer. The CLI maps ``ValueError`` to exit code 2 and
``NumericFailure`` to exit code 3.
"""


class NumericFailure(RuntimeError):
    """A computation failed for numeric (not input-validation) reasons."""


class BracketError(NumericFailure):
    """A 1-D search could not establish or maintain a unimodal bracket."""


class UnsupportableLoadError(NumericFailure):
    """The arrival-rate balance has no admissible solution."""


class UnstableQueueError(NumericFailure):
    """The simulated queue has positive mean drift and no stationary tail."""


class IllConditionedError(NumericFailure):
    """A finite-difference stencil is too ill-conditioned to trust."""

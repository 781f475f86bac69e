"""
Exception hierarchy for the graph PME verifier.

Validation problems are ValueError subclasses; numerical breakdowns during time
integration are RuntimeError subclasses. Verifiers never raise for a violated
inequality, they report it.
"""
from typing import Optional

import numpy as np


class DocumentError(ValueError):
    """Malformed graph, field or problem document."""

    def __init__(self, message: str, line: Optional[int] = None, source: Optional[str] = None):
        self.message = message
        self.line = line
        self.source = source
        prefix = f"{source}: " if source else ""
        location = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{location}{message}")


class GraphValidationError(ValueError):
    """A graph violates the weight/measure/edge invariants."""


class DisconnectedError(ValueError):
    """A path query was made for vertices in different components."""


class FieldError(ValueError):
    """A vertex field has the wrong shape or violates a sign requirement."""


class GraphGenerationError(RuntimeError):
    """A random graph generator could not produce a connected graph."""


class IntegrationError(RuntimeError):
    """Time integration stopped before reaching the end of the span."""

    def __init__(self, message: str, t: float, state: Optional[np.ndarray] = None):
        self.t = t
        self.state = state
        super().__init__(f"{message} (t={t:.12g})")


class BlowUpError(IntegrationError):
    """Solution norm exceeded the ceiling or the step size collapsed."""


class PositivityLossError(IntegrationError):
    """Solution dropped below the positivity floor."""

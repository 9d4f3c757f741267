"""Error taxonomy shared by every hull-chain module.

Each error carries a stable ``code`` so the CLI can print
``ERROR <code>: <detail>`` lines that scripts can grep for.
"""

from __future__ import annotations


class HullChainError(ValueError):
    """Base class for all expected failures."""

    code = "HullChainError"

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class EmptyInput(HullChainError):
    code = "EmptyInput"


class DimensionError(HullChainError):
    code = "DimensionError"


class DegenerateHull(HullChainError):
    code = "DegenerateHull"


class EmptyClass(HullChainError):
    code = "EmptyClass"


class EmptyPositiveClass(HullChainError):
    code = "EmptyPositiveClass"


class PeelingStalled(HullChainError):
    code = "PeelingStalled"


class InvalidBound(HullChainError):
    code = "InvalidBound"


class ZeroWeight(HullChainError):
    code = "ZeroWeight"


class NotNested(HullChainError):
    code = "NotNested"


class NotAlternating(HullChainError):
    code = "NotAlternating"


class DomainBoundExceeded(HullChainError):
    code = "DomainBoundExceeded"


class LineError(HullChainError):
    """An input-file error tied to a 1-based line number."""

    def __init__(self, detail: str, line: int):
        super().__init__(f"line {line}: {detail}")
        self.line = line


class ParseError(LineError):
    code = "ParseError"


class RaggedRow(LineError):
    code = "RaggedRow"


class UnknownLabel(LineError):
    code = "UnknownLabel"


class EmptyFile(HullChainError):
    code = "EmptyFile"


class SchemaError(HullChainError):
    code = "SchemaError"

    def __init__(self, detail: str, path: str):
        super().__init__(f"{path}: {detail}")
        self.path = path


class VersionError(HullChainError):
    code = "VersionError"


class MissingHulls(HullChainError):
    code = "MissingHulls"

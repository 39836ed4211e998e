from __future__ import annotations


class SkyTreesError(Exception):
    """Base class for every error raised by this package."""


class XmlSyntaxError(SkyTreesError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"malformed XML{where}: {message}")


class EmptyDocumentError(SkyTreesError):
    def __init__(self, message: str = "document contains no element"):
        super().__init__(message)


class IndexDumpError(SkyTreesError):
    pass


class QuerySyntaxError(SkyTreesError):
    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} at position {position}")


class QueryValidationError(SkyTreesError):
    pass


class OracleBoundExceeded(SkyTreesError):
    def __init__(self, product: int, bound: int):
        self.product = product
        self.bound = bound
        super().__init__(
            f"brute-force enumeration over {product} candidate combinations "
            f"exceeds the bound of {bound}"
        )

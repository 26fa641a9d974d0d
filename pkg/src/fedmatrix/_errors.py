from typing import Optional


class FedMatrixError(Exception):
    """FedMatrix 所有错误的基类"""
    pass


class DimensionError(FedMatrixError):
    """Shapes or lengths do not agree."""


class ContractError(FedMatrixError):
    """A precondition of an operation is violated."""


class NumericsError(FedMatrixError):
    """A non-finite value escaped a tensor operation."""


class ParameterError(FedMatrixError):
    """Invalid scheme or model parameters."""


class RangeError(FedMatrixError):
    """A value lies outside the declared encodable range."""


class ConfigError(FedMatrixError):
    """Invalid or unknown configuration keys."""


class ParseError(FedMatrixError):
    """Malformed input file, located by row and column when possible."""

    def __init__(
        self,
        message: str,
        *,
        path: Optional[str] = None,
        row: Optional[int] = None,
        column: Optional[str] = None,
    ):
        self.path = path
        self.row = row
        self.column = column

        location = []
        if path is not None:
            location.append(f"file={path}")
        if row is not None:
            location.append(f"row={row}")
        if column is not None:
            location.append(f"column={column}")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)

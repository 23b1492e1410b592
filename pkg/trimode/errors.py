"""
Exception hierarchy for the trimode library
"""

from typing import List, Optional


class TrimodeError(Exception):
    """Base class for every error raised by the library"""

    exit_code = 1

    def to_dict(self) -> dict:
        """Failure payload returned by services and printed by the CLI"""
        return {
            "success": False,
            "error": str(self),
            "error_type": type(self).__name__,
            "exit_code": self.exit_code,
        }


class ConfigError(TrimodeError, ValueError):
    """Invalid configuration; carries every violation found, not just the first"""

    exit_code = 2

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations: List[str] = list(violations)
        super().__init__("; ".join(self.violations))

    def to_dict(self) -> dict:
        payload = super().to_dict()
        payload["violations"] = list(self.violations)
        return payload


class DomainError(TrimodeError, ValueError):
    """A closed form was evaluated outside the region where it is defined"""

    exit_code = 2


class DataFormatError(TrimodeError, ValueError):
    """Malformed measurement file"""

    exit_code = 2

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ContractViolation(TrimodeError, ArithmeticError):
    """A numerical contract (tail bound, conservation law, identity) failed"""

    exit_code = 3

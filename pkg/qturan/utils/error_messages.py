"""
Utility for converting exceptions to short command-line messages and exit codes.
"""
from qturan.core.exceptions import InvalidFamilyError, PatternError

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def format_cli_error(error: Exception) -> str:
    """
    Convert an exception to a one-line message for stderr.

    Args:
        error: The exception that occurred

    Returns:
        A message naming the problem category and the original detail
    """
    error_type = type(error).__name__
    error_message = str(error)

    error_map = {
        "PatternError": "Invalid pattern",
        "InvalidFamilyError": "Invalid family",
        "DimensionError": "Parameter out of range",
        "GuardExceededError": "Instance too large",
        "InfeasibleMethodError": "Method not applicable",
        "NotFreeError": "Family is not free",
        "FileNotFoundError": "File not found",
        "PermissionError": "Permission denied",
        "OSError": "I/O failure",
    }

    for key, prefix in error_map.items():
        if key in error_type:
            return f"{prefix}: {error_message}"

    return f"Unexpected error ({error_type}): {error_message}"


def exit_code_for(error: Exception) -> int:
    """Malformed patterns and families count as usage errors; guards and failures as 1."""
    if isinstance(error, (PatternError, InvalidFamilyError)):
        return EXIT_USAGE
    return EXIT_FAILURE

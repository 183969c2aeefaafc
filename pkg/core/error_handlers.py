"""Error handlers for the command-line entry point.

Provides consistent error body formatting and maps exceptions to process
exit codes: 1 for input and configuration errors, 2 when no annihilator
was found, 3 when a verification failed.
"""

import json
import sys
import traceback
from typing import Any, Dict, Optional, TextIO

from pydantic import ValidationError as PydanticValidationError

from core.exceptions import AppException
from core.logger import get_logger

logger = get_logger("core.error_handlers")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_FOUND = 2
EXIT_VERIFICATION_FAILED = 3


def create_error_response(message: str, exit_code: int = EXIT_ERROR, details: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Create a standardized error body.

    Args:
        message: Error message.
        exit_code: Process exit code.
        details: Optional error details dictionary.

    Returns:
        ``{"error": {"message", "exit_code", "details"?}}``.
    """
    error_body: Dict[str, Any] = {
        "error": {
            "message": message,
            "exit_code": exit_code,
        }
    }
    if details:
        error_body["error"]["details"] = details
    return error_body


def _validation_errors(exc: PydanticValidationError):
    errors = []
    for error in exc.errors():
        field = ".".join(str(loc) for loc in error["loc"])
        errors.append({"field": field, "message": error["msg"], "type": error["type"]})
    return errors


def build_error_body(exc: BaseException) -> Dict[str, Any]:
    """Error body for any exception raised while running a command."""
    if isinstance(exc, AppException):
        logger.warning("Application error: %s", exc.message)
        return create_error_response(exc.message, exc.exit_code, exc.details)
    if isinstance(exc, PydanticValidationError):
        errors = _validation_errors(exc)
        logger.warning("Validation error: %s", errors)
        return create_error_response("Validation error", EXIT_ERROR, {"validation_errors": errors})
    logger.error("Unhandled exception: %s", exc, exc_info=True)
    logger.debug("Traceback: %s", "".join(traceback.format_exception(type(exc), exc, exc.__traceback__)))
    return create_error_response("An internal error occurred", EXIT_ERROR, {"type": "internal_error"})


def handle_exception(exc: BaseException, output: str = "text", stream: Optional[TextIO] = None) -> int:
    """Write the error body to `stream` (stderr by default) and return the exit code."""
    stream = stream or sys.stderr
    body = build_error_body(exc)
    error = body["error"]
    if output == "json":
        stream.write(json.dumps(body, sort_keys=True, indent=2) + "\n")
    else:
        stream.write(f"error: {error['message']}\n")
        for key, value in sorted(error.get("details", {}).items()):
            stream.write(f"  {key}: {value}\n")
    return error["exit_code"]

from typing import Optional
from dataclasses import dataclass, field


@dataclass
class Response:
    """
    Outcome of a command.

    Args:
        content (str): Rendered output table, empty on failure
        status_code (int): Process exit code, 0 on success
        error (Optional[str]): Message for stderr when the command failed
    """
    content: str
    status_code: int
    error: Optional[str] = None


@dataclass
class CommandResponse(Response):
    """
    Response of a CLI command.

    Args:
        command (Optional[str]): Command name, set by run_command
        processing_time (Optional[float]): Wall time in seconds, set by run_command
        selected_sigma (Optional[float]): Bandwidth the command settled on
        details (dict): Command-specific extras such as the plugin sigma or acceptance results
    """
    command: Optional[str] = None
    processing_time: Optional[float] = None
    selected_sigma: Optional[float] = None
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status_code == 0

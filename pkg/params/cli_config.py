import logging
from pathlib import Path

from chain_rule.scalar import ArithmeticMode

SUBCOMMANDS = ("partitions", "expand", "compose", "faa1d", "verify")


class CliConfig:
    """
    A class that represents resolved global command-line flags.

    Validated when constructed, before any computation happens.
    """
    logger: logging.Logger

    subcommand: str
    output: Path | None = None
    mode: ArithmeticMode | None = None

    def __init__(
            self,
            logger: logging.Logger,
            subcommand: str,
            output: Path | None,
            mode: ArithmeticMode | None
    ):
        self.logger = logger

        if subcommand not in SUBCOMMANDS:
            raise ValueError(f"unknown subcommand `{subcommand}`, expected one of {', '.join(SUBCOMMANDS)}")
        self.subcommand = subcommand

        if output is not None and output.is_dir():
            raise ValueError(f"`--output` points to a directory: `{output}`")
        self.output = output

        self.mode = mode

    def get_logger(self) -> logging.Logger:
        return self.logger

    def get_subcommand(self) -> str:
        return self.subcommand

    def get_output(self) -> Path | None:
        """
        Gets the file results are written to, or ``None`` for standard output.
        """
        return self.output

    def get_mode(self, default: ArithmeticMode | None = None) -> ArithmeticMode | None:
        """
        Gets the requested arithmetic mode, falling back to ``default`` when no
        ``--mode`` flag was given.
        """
        return self.mode if self.mode is not None else default

    def emit(self, text: str):
        """
        Writes a result either to ``--output`` or to standard output.
        """
        if self.output is None:
            print(text)
            return

        self.output.parent.mkdir(parents=True, exist_ok=True)
        self.output.write_text(text + "\n", encoding="utf-8")
        self.logger.debug(f"Result written to `{self.output}`")

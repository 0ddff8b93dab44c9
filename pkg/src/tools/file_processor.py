from __future__ import annotations

import math
import re
import sys
from pathlib import Path
from typing import List, Optional, Union

from loguru import logger

from src.dtos.sample import SampleSet
from src.errors import DomainError, ParseError

_SEPARATORS = re.compile(r"[,\s]+")


class FileProcessor:
    """
    Reads observation files: one observation per line, comma or whitespace delimited,
    with an optional header line. Blank lines and lines starting with '#' are skipped.
    """

    @staticmethod
    def read_txt(file_path: Union[str, Path]) -> str:
        """
        Read content from a text file.

        Args:
            file_path (Union[str, Path]): Path to the text file

        Returns:
            str: Content of the text file

        Raises:
            ParseError: If the file doesn't exist or cannot be decoded
        """
        try:
            with open(file_path, 'r', encoding='utf-8') as file:
                return file.read()
        except FileNotFoundError:
            raise ParseError(f"Input file not found at {file_path}")
        except (UnicodeDecodeError, OSError) as e:
            raise ParseError(f"Error reading input file {file_path}: {e}") from e

    @staticmethod
    def read_stdin() -> str:
        return sys.stdin.read()

    @staticmethod
    def _tokens(line: str) -> List[str]:
        return [token for token in _SEPARATORS.split(line.strip()) if token]

    @staticmethod
    def _is_number(token: str) -> bool:
        try:
            float(token)
            return True
        except ValueError:
            return False

    @staticmethod
    def parse_samples(text: str) -> SampleSet:
        """
        Parse observations from text.

        Args:
            text (str): File content

        Returns:
            SampleSet: The observations in file order

        Raises:
            ParseError: For non-numeric values, naming the line
            DomainError: For non-positive values, naming the line
        """
        values: List[float] = []
        seen_content = False
        for number, line in enumerate(text.splitlines(), start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith('#'):
                continue
            tokens = FileProcessor._tokens(stripped)
            if not seen_content:
                seen_content = True
                if not any(FileProcessor._is_number(token) for token in tokens):
                    logger.debug("line {} read as header: {}", number, stripped)
                    continue
            for token in tokens:
                try:
                    value = float(token)
                except ValueError:
                    raise ParseError(f"not a number: {token!r}", number)
                if not math.isfinite(value):
                    raise ParseError(f"not a finite number: {token!r}", number)
                if value <= 0:
                    raise DomainError(f"line {number}: observation must be positive, got {token}")
                values.append(value)
        if not values:
            raise ParseError("no observations found")
        return SampleSet.of(values)

    @staticmethod
    def read_samples(file_path: Optional[Union[str, Path]] = None) -> SampleSet:
        """
        Read observations from a file, or from stdin when no path (or '-') is given.
        """
        if file_path is None or str(file_path) == '-':
            text = FileProcessor.read_stdin()
            source = "stdin"
        else:
            text = FileProcessor.read_txt(file_path)
            source = str(file_path)
        samples = FileProcessor.parse_samples(text)
        logger.info("read {} observations from {}", samples.n, source)
        return samples

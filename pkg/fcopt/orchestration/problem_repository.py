# fcopt/orchestration/problem_repository.py
"""
Resolves the `--problem` argument of the CLI to a problem instance.

The argument is either a path to a problem file or `corpus:<id>`.
"""

from pathlib import Path
from typing import List, Union

import structlog

from fcopt.core.problem import CompositeProblem
from fcopt.corpus.entries import CorpusEntry, corpus_get, corpus_list
from fcopt.io.problem_file import load_problem, save_problem

logger = structlog.get_logger(__name__)

CORPUS_PREFIX = "corpus:"


class ProblemRepository:
    """Loads problems from files or from the bundled corpus."""

    def resolve(self, reference: Union[str, Path]) -> CompositeProblem:
        """
        Raises:
            UnknownCorpusEntryError: For an unknown `corpus:<id>`.
            ProblemFileError: If the file cannot be read.
            ConfigError: If the file violates the schema.
        """
        reference = str(reference)
        if reference.startswith(CORPUS_PREFIX):
            entry = corpus_get(reference[len(CORPUS_PREFIX):])
            logger.info("Problem resolved from corpus.", entry=entry.id)
            return entry.build()
        return load_problem(reference)

    def entries(self) -> List[CorpusEntry]:
        return corpus_list()

    def export_corpus(self, output_dir: Union[str, Path]) -> List[Path]:
        """Writes every corpus entry as `<id>.json`."""
        output_dir = Path(output_dir)
        written = [save_problem(entry.build(), output_dir / f"{entry.id}.json") for entry in corpus_list()]
        logger.info("Corpus exported.", directory=str(output_dir), entries=len(written))
        return written

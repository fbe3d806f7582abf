"""
Search service: splits the sample index range across worker threads.
"""

import asyncio
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence

from app.core.classification import classify_dim4
from app.core.search import (
    BilinearSearch,
    ConstraintSystem,
    deduplicate,
    default_system,
    make_search,
)
from app.core.triples import KahlerTriple
from app.utils.exceptions import ClassificationError, ValidationError
from config.settings import get_settings

logger = logging.getLogger(__name__)


def partition(samples: int, workers: int) -> List[range]:
    """Contiguous index blocks, in sample order."""
    workers = max(1, min(workers, samples))
    size, extra = divmod(samples, workers)
    blocks, start = [], 0
    for w in range(workers):
        stop = start + size + (1 if w < extra else 0)
        blocks.append(range(start, stop))
        start = stop
    return blocks


class SearchService:
    """Parallel sampling over one constraint system; results do not depend on the worker count."""

    def __init__(self, workers: Optional[int] = None):
        self.settings = get_settings()
        self.workers = workers if workers is not None else self.settings.SEARCH_WORKERS
        if self.workers < 1:
            raise ValidationError(f"Worker count must be positive, got {self.workers}")

    @staticmethod
    def _run_block(search: BilinearSearch, seed: int, block: Sequence[int]) -> List[KahlerTriple]:
        hits = []
        for index in block:
            hit = search.run_sample(seed, index)
            if hit is not None:
                hits.append(hit)
        return hits

    async def search(
        self,
        system: ConstraintSystem,
        samples: int,
        seed: int,
        tol: Optional[float] = None,
        require_v_nonzero: bool = False,
    ) -> List[KahlerTriple]:
        """
        Run `samples` seeded samples and return the exactly verified triples.

        Args:
            system: Constraint system on a Kähler algebra
            samples: Number of samples (0 gives an empty list)
            seed: Master seed
            tol: Convergence tolerance of the descent
            require_v_nonzero: Reject triples with v = 0

        Returns:
            Deduplicated triples in sample order
        """
        if samples <= 0:
            return []
        search = make_search(system, tol=tol, require_v_nonzero=require_v_nonzero)
        blocks = partition(samples, self.workers)
        loop = asyncio.get_running_loop()
        with ThreadPoolExecutor(max_workers=len(blocks)) as executor:
            tasks = [
                loop.run_in_executor(executor, self._run_block, search, seed, block)
                for block in blocks
            ]
            results = await asyncio.gather(*tasks)
        hits = deduplicate(hit for block_hits in results for hit in block_hits)
        logger.info(f"Search over {samples} samples on {len(blocks)} workers: {len(hits)} verified triples")
        return hits

    def run(self, n: int, c, samples: int, seed: int, tol: Optional[float] = None,
            fix_v_zero: bool = False, require_v_nonzero: bool = False) -> List[KahlerTriple]:
        """Search on the abelian Kähler algebra of dimension 2n."""
        system = default_system(n, c, fix_v_zero=fix_v_zero)
        return asyncio.run(self.search(system, samples, seed, tol, require_v_nonzero))


def classification_line(triple: KahlerTriple) -> str:
    """Classification of a dimension-4 hit, for search output."""
    try:
        return classify_dim4(triple).describe()
    except ClassificationError as e:
        return f"unclassified ({e.error_code})"

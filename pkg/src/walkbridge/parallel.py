"""Deterministic fan-out of replication work over processes.

Work is split into fixed-size chunks; chunk c runs on the stream derived
as stream_id = stream_base + c, and partial results are reduced in chunk
order.  Chunk boundaries depend only on (total, chunk), never on the
worker count, so any --jobs value produces identical results.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor


def chunk_ranges(total: int, chunk: int) -> list[tuple[int, int]]:
    """(start, size) pairs covering range(total) in fixed chunks."""
    if chunk < 1:
        raise ValueError("chunk must be >= 1")
    return [(start, min(chunk, total - start)) for start in range(0, total, chunk)]


def run_chunked(worker, total: int, chunk: int, jobs: int, args: tuple = ()):
    """Run worker(chunk_index, start, size, *args) for every chunk.

    Returns the list of per-chunk results in chunk order.  ``worker`` must
    be picklable (module-level) when jobs > 1.
    """
    ranges = chunk_ranges(total, chunk)
    if jobs <= 1 or len(ranges) <= 1:
        return [worker(c, start, size, *args) for c, (start, size) in enumerate(ranges)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [
            pool.submit(worker, c, start, size, *args)
            for c, (start, size) in enumerate(ranges)
        ]
        return [f.result() for f in futures]

"""
Utility functions for sympball.

Provides seeded random streams, number formatting and filesystem helpers
used across the application.
"""

import logging
import zlib
from pathlib import Path
from typing import Iterator, Tuple, Union

import numpy as np

logger = logging.getLogger("sympball.utils")


# ============================================================================
# RANDOM STREAMS
# ============================================================================

def _label_key(label: str) -> int:
    return zlib.crc32(label.encode("utf-8"))


def derive_rng(seed: int, label: str, index: int = 0) -> np.random.Generator:
    """
    Build an independent generator keyed by (seed, label, index).

    The stream depends only on the key, never on how many streams were
    drawn before, so results do not depend on evaluation order.

    Args:
        seed: Master seed.
        label: Purpose label (e.g. "case", "contains").
        index: Stream index within the purpose.

    Returns:
        A numpy Generator.
    """
    sequence = np.random.SeedSequence(
        entropy=int(seed) & 0xFFFFFFFFFFFFFFFF,
        spawn_key=(_label_key(label), int(index)),
    )
    return np.random.default_rng(sequence)


def derive_seed(seed: int, label: str, index: int = 0) -> int:
    """
    Derive an integer seed keyed by (seed, label, index).

    Args:
        seed: Master seed.
        label: Purpose label.
        index: Stream index within the purpose.

    Returns:
        Non-negative 63-bit integer seed.
    """
    sequence = np.random.SeedSequence(
        entropy=int(seed) & 0xFFFFFFFFFFFFFFFF,
        spawn_key=(_label_key(label), int(index)),
    )
    return int(sequence.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def chunked(total: int, chunk_size: int) -> Iterator[Tuple[int, int]]:
    """
    Split a count into consecutive chunks.

    Yields:
        (chunk_index, chunk_length) pairs.
    """
    if chunk_size <= 0:
        raise ValueError("chunk_size must be positive")
    index = 0
    remaining = int(total)
    while remaining > 0:
        length = min(chunk_size, remaining)
        yield index, length
        remaining -= length
        index += 1


# ============================================================================
# FORMATTING
# ============================================================================

def format_float(value: float) -> str:
    """
    Format a float with 17 significant digits.

    17 significant digits reproduce any 64-bit float exactly on parsing.
    """
    return format(float(value), ".17g")


def format_sequence(values, precision: int = 6) -> str:
    """Format a sequence of floats for human-readable output."""
    return " ".join(f"{float(v):.{precision}g}" for v in values)


# ============================================================================
# DIRECTORY UTILITIES
# ============================================================================

def ensure_directory(path: Union[str, Path], mode: int = 0o755) -> Path:
    """
    Ensure a directory exists, creating it if necessary.

    Args:
        path: Directory path.
        mode: Permission mode for directories created by this call;
            existing directories keep their permissions.

    Returns:
        Path object.
    """
    path = Path(path)
    missing = [p for p in (path, *path.parents) if not p.exists()]
    path.mkdir(parents=True, exist_ok=True)
    for created in missing:
        try:
            created.chmod(mode)
        except OSError:
            logger.debug(f"Could not set mode {mode:o} on {created}")
    return path

"""Named sub-seed derivation so every random component is reproducible."""

import zlib


def derive_seed(master: int, name: str) -> int:
    """Stable per-component seed from a master seed and a component name.

    crc32 is platform-independent, so the same (master, name) pair yields
    the same stream everywhere.
    """
    return zlib.crc32(f"{master}:{name}".encode("utf-8")) & 0x7FFFFFFF

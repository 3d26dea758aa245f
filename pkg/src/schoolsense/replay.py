"""Length-prefixed binary replay files: 4-byte big-endian length + frame, repeated.

The simulator writes them; the gateway (and the `replay` CLI verb) read them.
"""

from __future__ import annotations

import struct
from collections.abc import Iterable, Iterator
from pathlib import Path

from .errors import TruncatedError

_LEN = struct.Struct(">I")


def write_replay(frames: Iterable[bytes], path: str | Path) -> int:
    """Write frames to a replay file; returns the frame count."""
    count = 0
    with open(path, "wb") as fh:
        for frame in frames:
            fh.write(_LEN.pack(len(frame)))
            fh.write(frame)
            count += 1
    return count


def iter_replay(path: str | Path) -> Iterator[bytes]:
    """Yield frames from a replay file; raises TruncatedError on a cut-off file."""
    with open(path, "rb") as fh:
        while True:
            header = fh.read(4)
            if not header:
                return
            if len(header) < 4:
                raise TruncatedError("replay file ends inside a length prefix")
            (length,) = _LEN.unpack(header)
            frame = fh.read(length)
            if len(frame) < length:
                raise TruncatedError("replay file ends inside a frame")
            yield frame

"""Binary node-frame codec.

Layout (big-endian):

    byte 0      version (0x01)
    byte 1      node kind (0x01 classroom, 0x02 power meter)
    bytes 2-3   node id, u16
    bytes 4-7   sequence number, u32
    bytes 8-11  timestamp, unix seconds, u32
    byte 12     record count N (1..16)
    3*N bytes   N records: 1-byte metric code + 2-byte wire value
                (signed only for temperature)
    last byte   XOR fold of all preceding bytes

The checksum is verified over the raw bytes before any field is interpreted,
so a single corrupted byte is always reported as ChecksumError.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

from .errors import ChecksumError, FrameError, TruncatedError
from .metrics import metric_by_code

FRAME_VERSION = 0x01
KIND_CLASSROOM = 0x01
KIND_POWER_METER = 0x02
MAX_RECORDS = 16
MIN_FRAME_LEN = 17  # header 13 + one record 3 + checksum 1

_HEADER = struct.Struct(">BBHII")


@dataclass
class NodeReport:
    """One measurement batch as it travels on the wire (values still scaled)."""

    version: int
    node_kind: int
    node_id: int
    seq: int
    ts: int
    records: list[tuple[int, int]]  # (metric code, wire value)


def xor_fold(data: bytes) -> int:
    acc = 0
    for b in data:
        acc ^= b
    return acc


def _validate_report(report: NodeReport) -> None:
    if report.version != FRAME_VERSION:
        raise FrameError(f"unsupported frame version {report.version}")
    if report.node_kind not in (KIND_CLASSROOM, KIND_POWER_METER):
        raise FrameError(f"unknown node kind {report.node_kind}")
    if not 0 <= report.node_id <= 0xFFFF:
        raise FrameError(f"node id {report.node_id} does not fit 16 bits")
    if not 0 <= report.seq <= 0xFFFFFFFF:
        raise FrameError(f"seq {report.seq} does not fit 32 bits")
    if not 0 <= report.ts <= 0xFFFFFFFF:
        raise FrameError(f"ts {report.ts} does not fit 32 bits")
    if not 1 <= len(report.records) <= MAX_RECORDS:
        raise FrameError(
            f"record count {len(report.records)} outside 1..{MAX_RECORDS}"
        )
    codes = [code for code, _ in report.records]
    if len(set(codes)) != len(codes):
        raise FrameError("duplicate metric codes in report")


def encode_frame(report: NodeReport) -> bytes:
    """Serialize a report; raises FrameError family on invariant violations."""
    _validate_report(report)
    out = bytearray(
        _HEADER.pack(
            report.version, report.node_kind, report.node_id, report.seq, report.ts
        )
    )
    out.append(len(report.records))
    for code, wire in report.records:
        metric = metric_by_code(code)
        out.append(code)
        fmt = ">h" if metric.signed else ">H"
        try:
            out += struct.pack(fmt, wire)
        except struct.error:
            raise FrameError(
                f"wire value {wire} does not fit 16-bit "
                f"{'signed' if metric.signed else 'unsigned'} ({metric.name})"
            ) from None
    out.append(xor_fold(out))
    return bytes(out)


def decode_frame(data: bytes) -> NodeReport:
    """Parse and verify a frame; the frame is rejected whole on any defect."""
    if len(data) < MIN_FRAME_LEN:
        raise TruncatedError(f"frame of {len(data)} bytes, minimum is {MIN_FRAME_LEN}")
    if xor_fold(data[:-1]) != data[-1]:
        raise ChecksumError(
            f"checksum mismatch: computed 0x{xor_fold(data[:-1]):02X}, "
            f"frame carries 0x{data[-1]:02X}"
        )
    version, kind, node_id, seq, ts = _HEADER.unpack(data[:12])
    if version != FRAME_VERSION:
        raise FrameError(f"unsupported frame version {version}")
    if kind not in (KIND_CLASSROOM, KIND_POWER_METER):
        raise FrameError(f"unknown node kind {kind}")
    count = data[12]
    if not 1 <= count <= MAX_RECORDS:
        raise FrameError(f"record count {count} outside 1..{MAX_RECORDS}")
    expected = 14 + 3 * count
    if len(data) < expected:
        raise TruncatedError(f"frame of {len(data)} bytes, layout needs {expected}")
    if len(data) > expected:
        raise FrameError(f"frame of {len(data)} bytes, layout needs {expected}")

    records: list[tuple[int, int]] = []
    seen: set[int] = set()
    for i in range(count):
        off = 13 + 3 * i
        code = data[off]
        metric = metric_by_code(code)
        if code in seen:
            raise FrameError(f"duplicate metric code 0x{code:02X} in frame")
        seen.add(code)
        fmt = ">h" if metric.signed else ">H"
        (wire,) = struct.unpack(fmt, data[off + 1 : off + 3])
        records.append((code, wire))
    return NodeReport(version, kind, node_id, seq, ts, records)

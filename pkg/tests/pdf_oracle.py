"""Independent PDF parser used as the test-suite oracle.

Deliberately shares no code with the production writer: it walks the real
cross-reference table, checks every byte offset, verifies stream lengths, and
recovers text by interpreting the content-stream operators. Any structural
lie in a generated file fails here.
"""

from __future__ import annotations

import re
from dataclasses import dataclass


class PdfStructureError(AssertionError):
    pass


@dataclass(frozen=True)
class TextSpan:
    font: str
    size: float
    x: float
    y: float
    text: str


@dataclass(frozen=True)
class ParsedPdf:
    object_count: int
    page_count: int
    pages: list[list[TextSpan]]

    @property
    def spans(self) -> list[TextSpan]:
        return [span for page in self.pages for span in page]


def _fail(message: str) -> None:
    raise PdfStructureError(message)


def parse_pdf(data: bytes) -> ParsedPdf:
    if not data.startswith(b"%PDF-1.4"):
        _fail("missing %PDF-1.4 header")
    if not data.rstrip(b"\r\n").endswith(b"%%EOF"):
        _fail("missing %%EOF trailer marker")

    # locate and read the cross-reference table
    anchor = data.rfind(b"startxref")
    if anchor < 0:
        _fail("missing startxref")
    xref_offset = int(data[anchor:].split()[1])
    if not data[xref_offset:].startswith(b"xref"):
        _fail("startxref does not point at the xref keyword")
    cursor = xref_offset + len(b"xref\n")
    header = re.match(rb"(\d+) (\d+)\n", data[cursor:])
    if header is None or int(header.group(1)) != 0:
        _fail("xref must contain a single section starting at object 0")
    entry_count = int(header.group(2))
    cursor += header.end()
    offsets: dict[int, int] = {}
    for object_id in range(entry_count):
        entry = data[cursor : cursor + 20]
        if not re.fullmatch(rb"\d{10} \d{5} [nf] ?\r?\n", entry):
            _fail(f"malformed xref entry for object {object_id}: {entry!r}")
        if object_id == 0:
            if entry[17:18] != b"f":
                _fail("object 0 must be the free-list head")
        else:
            if entry[17:18] != b"n":
                _fail(f"object {object_id} must be in use")
            offsets[object_id] = int(entry[:10])
        cursor += 20

    # trailer dictionary
    trailer_match = re.match(
        rb"trailer\s*<<(.*?)>>", data[cursor:], flags=re.DOTALL
    )
    if trailer_match is None:
        _fail("missing trailer dictionary")
    trailer = trailer_match.group(1)
    size = _required_int(trailer, rb"/Size\s+(\d+)", "trailer /Size")
    if size != entry_count:
        _fail(f"trailer /Size {size} != xref entry count {entry_count}")
    root_id = _required_int(trailer, rb"/Root\s+(\d+)\s+0\s+R", "trailer /Root")

    # every advertised offset must point at the right object header
    objects: dict[int, bytes] = {}
    for object_id, offset in offsets.items():
        expected = b"%d 0 obj" % object_id
        if data[offset : offset + len(expected)] != expected:
            _fail(f"xref offset for object {object_id} points at {data[offset:offset+16]!r}")
        end = data.find(b"endobj", offset)
        if end < 0:
            _fail(f"object {object_id} is not terminated")
        objects[object_id] = data[offset + len(expected) : end]

    # and every object in the file must be in the xref
    headers = re.findall(rb"(?m)^(\d+) 0 obj", data)
    if sorted(int(h) for h in headers) != sorted(offsets):
        _fail("objects present in the file differ from the xref listing")

    # document structure: catalog -> pages -> kids -> contents
    pages_id = _required_int(objects[root_id], rb"/Pages\s+(\d+)\s+0\s+R", "/Pages")
    pages_obj = objects[pages_id]
    count = _required_int(pages_obj, rb"/Count\s+(\d+)", "/Count")
    kid_ids = [int(m) for m in re.findall(rb"(\d+)\s+0\s+R", _required(pages_obj, rb"/Kids\s*\[(.*?)\]", "/Kids"))]
    if len(kid_ids) != count:
        _fail(f"/Count {count} != number of /Kids {len(kid_ids)}")

    pages: list[list[TextSpan]] = []
    for kid in kid_ids:
        content_id = _required_int(objects[kid], rb"/Contents\s+(\d+)\s+0\s+R", "/Contents")
        pages.append(_extract_spans(objects[content_id]))
    return ParsedPdf(object_count=len(offsets), page_count=count, pages=pages)


def _required(blob: bytes, pattern: bytes, what: str) -> bytes:
    match = re.search(pattern, blob, flags=re.DOTALL)
    if match is None:
        _fail(f"missing {what}")
    return match.group(1)


def _required_int(blob: bytes, pattern: bytes, what: str) -> int:
    return int(_required(blob, pattern, what))


def _extract_spans(content_obj: bytes) -> list[TextSpan]:
    length = _required_int(content_obj, rb"/Length\s+(\d+)", "/Length")
    marker = content_obj.find(b"stream\n")
    if marker < 0:
        _fail("content object has no stream")
    stream = content_obj[marker + len(b"stream\n") : marker + len(b"stream\n") + length]
    if len(stream) != length:
        _fail("stream shorter than its /Length")
    tail = content_obj[marker + len(b"stream\n") + length :]
    if not tail.lstrip(b"\r\n").startswith(b"endstream"):
        _fail("/Length does not reach endstream")
    return _interpret(stream)


def _interpret(stream: bytes) -> list[TextSpan]:
    spans: list[TextSpan] = []
    operands: list[object] = []
    font = ""
    size = 0.0
    x = 0.0
    y = 0.0
    pos = 0
    n = len(stream)
    while pos < n:
        ch = stream[pos : pos + 1]
        if ch in b" \t\r\n":
            pos += 1
            continue
        if ch == b"(":
            text, pos = _read_string(stream, pos)
            operands.append(text)
            continue
        start = pos
        while pos < n and stream[pos : pos + 1] not in b" \t\r\n(":
            pos += 1
        token = stream[start:pos]
        if token.startswith(b"/"):
            operands.append(token.decode("ascii"))
        elif re.fullmatch(rb"-?\d+(\.\d+)?", token):
            operands.append(float(token))
        elif token == b"Tf":
            font = str(operands[-2])
            size = float(operands[-1])  # type: ignore[arg-type]
            operands.clear()
        elif token == b"Tm":
            x, y = float(operands[-2]), float(operands[-1])  # type: ignore[arg-type]
            operands.clear()
        elif token == b"Tj":
            raw = operands[-1]
            if not isinstance(raw, bytes):
                _fail("Tj without a string operand")
            spans.append(TextSpan(font=font, size=size, x=x, y=y, text=raw.decode("cp1252")))
            operands.clear()
        elif token in (b"BT", b"ET"):
            operands.clear()
        else:
            _fail(f"unexpected content operator {token!r}")
    return spans


def _read_string(stream: bytes, pos: int) -> tuple[bytes, int]:
    if stream[pos : pos + 1] != b"(":
        _fail("string does not start with (")
    pos += 1
    out = bytearray()
    depth = 1
    n = len(stream)
    while pos < n:
        byte = stream[pos : pos + 1]
        if byte == b"\\":
            nxt = stream[pos + 1 : pos + 2]
            octal = re.match(rb"\\([0-7]{1,3})", stream[pos : pos + 4])
            if octal:
                out.append(int(octal.group(1), 8))
                pos += octal.end()
                continue
            if nxt in (b"(", b")", b"\\"):
                out += nxt
                pos += 2
                continue
            escape_map = {b"n": b"\n", b"r": b"\r", b"t": b"\t", b"b": b"\b", b"f": b"\f"}
            if nxt in escape_map:
                out += escape_map[nxt]
                pos += 2
                continue
            _fail(f"unknown escape {nxt!r}")
        if byte == b"(":
            depth += 1
            out += byte
        elif byte == b")":
            depth -= 1
            if depth == 0:
                return bytes(out), pos + 1
            out += byte
        else:
            out += byte
        pos += 1
    _fail("unterminated string")
    raise AssertionError  # unreachable

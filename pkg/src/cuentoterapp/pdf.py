"""Self-contained PDF 1.4 writer for story documents.

No font embedding, no compression, no external libraries: pages use the
standard built-in Latin fonts with WinAnsi encoding and a frozen width table,
so identical inputs always produce identical bytes. The file carries a real
cross-reference table with correct byte offsets, which independent readers
check in the test suite.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

from cuentoterapp._fontmetrics import (
    HELVETICA_BOLD_WIDTHS,
    HELVETICA_WIDTHS,
    advance_width,
)
from cuentoterapp.grammar import (
    Catalog,
    GrammarError,
    Story,
)

__all__ = [
    "PdfLayout",
    "RenderReport",
    "LayoutError",
    "UnresolvedReferenceError",
    "render_pdf",
    "render_pdf_with_report",
    "slugify_title",
]

BODY_FONT = "/F1"  # Helvetica
HEADING_FONT = "/F2"  # Helvetica-Bold
_WIDTHS = {BODY_FONT: HELVETICA_WIDTHS, HEADING_FONT: HELVETICA_BOLD_WIDTHS}
_REPLACEMENT = ord("?")
# standard metrics shared by both fonts, fractions of the font size
DESCENT = 0.207
ASCENT = 0.718


class LayoutError(Exception):
    """The layout leaves no usable text area."""


class UnresolvedReferenceError(Exception):
    """The story references a function, situation or character the catalog lacks."""


@dataclass(frozen=True)
class PdfLayout:
    """A4 portrait with even margins; sizes in PostScript points."""

    page_width: float = 595.0
    page_height: float = 842.0
    margin: float = 56.0
    title_font_size: float = 20.0
    heading_font_size: float = 13.0
    body_font_size: float = 11.0
    line_height_factor: float = 1.4


@dataclass(frozen=True)
class RenderReport:
    """What the writer had to substitute to fit WinAnsi encoding."""

    replaced_characters: int
    replaced_codepoints: tuple[str, ...]


@dataclass(frozen=True)
class _Line:
    font: str
    size: float
    text_bytes: bytes


def render_pdf(story: Story, catalog: Catalog, layout: PdfLayout | None = None) -> bytes:
    """Render a story to PDF bytes. See render_pdf_with_report for substitutions."""

    data, _report = render_pdf_with_report(story, catalog, layout)
    return data


def render_pdf_with_report(
    story: Story, catalog: Catalog, layout: PdfLayout | None = None
) -> tuple[bytes, RenderReport]:
    layout = layout or PdfLayout()
    _check_layout(layout)
    situation, character_names, fragment_cards = _resolve(story, catalog)

    replaced: list[str] = []
    lines: list[_Line] = []

    def add_block(text: str, font: str, size: float) -> None:
        lines.extend(_wrap(text, font, size, _usable_width(layout), replaced))

    add_block(story.title, HEADING_FONT, layout.title_font_size)
    add_block(situation.title, HEADING_FONT, layout.heading_font_size)
    add_block(", ".join(character_names), BODY_FONT, layout.body_font_size)
    for card, fragment in fragment_cards:
        add_block(card.title, HEADING_FONT, layout.heading_font_size)
        add_block(fragment.text, BODY_FONT, layout.body_font_size)

    pages = _paginate(lines, layout)
    data = _emit(pages, layout)
    report = RenderReport(
        replaced_characters=len(replaced),
        replaced_codepoints=tuple(sorted(set(replaced))),
    )
    return data, report


# ---------------------------------------------------------------------------
# Resolution and layout


def _check_layout(layout: PdfLayout) -> None:
    sizes = (layout.title_font_size, layout.heading_font_size, layout.body_font_size)
    if any(s <= 0 for s in sizes) or layout.line_height_factor <= 0:
        raise LayoutError("font sizes and line height must be positive")
    if layout.margin < 0:
        raise LayoutError("margin must be non-negative")
    if _usable_width(layout) <= 0:
        raise LayoutError("margins leave no horizontal text area")
    tallest = max(sizes) * (layout.line_height_factor + DESCENT)
    if layout.page_height - 2 * layout.margin < tallest:
        raise LayoutError("margins leave no vertical text area")


def _usable_width(layout: PdfLayout) -> float:
    return layout.page_width - 2 * layout.margin


def _resolve(story: Story, catalog: Catalog):
    try:
        situation = catalog.situation(story.situation_id)
        character_names = [catalog.character(cid).name for cid in story.character_ids]
        fragment_cards = [(catalog.function(f.function_id), f) for f in story.fragments]
    except GrammarError as exc:
        raise UnresolvedReferenceError(str(exc)) from exc
    return situation, character_names, fragment_cards


def _encode_winansi(text: str, widths: dict[int, int], replaced: list[str]) -> bytes:
    out = bytearray()
    for ch in text:
        try:
            code = ch.encode("cp1252")[0]
        except UnicodeEncodeError:
            code = -1
        if code not in widths:
            replaced.append(ch)
            code = _REPLACEMENT
        out.append(code)
    return bytes(out)


def _wrap(
    text: str, font: str, size: float, max_width: float, replaced: list[str]
) -> list[_Line]:
    """Greedy word wrap; words wider than a whole line are split at glyph level."""

    widths = _WIDTHS[font]
    encoded = _encode_winansi(" ".join(text.split()), widths, replaced)
    if not encoded:
        return [_Line(font, size, b"")]
    space_width = advance_width(widths, b" ", size)

    lines: list[_Line] = []
    current = bytearray()
    current_width = 0.0

    def flush() -> None:
        nonlocal current, current_width
        lines.append(_Line(font, size, bytes(current)))
        current = bytearray()
        current_width = 0.0

    for word in encoded.split(b" "):
        pieces = _split_oversized(word, widths, size, max_width)
        for piece in pieces:
            piece_width = advance_width(widths, piece, size)
            if not current:
                current.extend(piece)
                current_width = piece_width
            elif current_width + space_width + piece_width <= max_width:
                current.extend(b" " + piece)
                current_width += space_width + piece_width
            else:
                flush()
                current.extend(piece)
                current_width = piece_width
    flush()
    return lines


def _split_oversized(
    word: bytes, widths: dict[int, int], size: float, max_width: float
) -> list[bytes]:
    if advance_width(widths, word, size) <= max_width or not word:
        return [word]
    pieces = []
    current = bytearray()
    for byte in word:
        glyph_width = advance_width(widths, bytes([byte]), size)
        if current and advance_width(widths, bytes(current), size) + glyph_width > max_width:
            pieces.append(bytes(current))
            current = bytearray()
        current.append(byte)
    if current:
        pieces.append(bytes(current))
    return pieces


def _paginate(lines: list[_Line], layout: PdfLayout) -> list[list[tuple[float, _Line]]]:
    """Assign a baseline y to every line, breaking pages so descenders stay inside."""

    top = layout.page_height - layout.margin
    bottom = layout.margin
    pages: list[list[tuple[float, _Line]]] = [[]]
    y = top
    for line in lines:
        line_height = line.size * layout.line_height_factor
        if y - line_height - DESCENT * line.size < bottom and pages[-1]:
            pages.append([])
            y = top
        y -= line_height
        pages[-1].append((y, line))
    return pages


# ---------------------------------------------------------------------------
# Byte emission


def _fmt(value: float) -> bytes:
    text = f"{value:.2f}".rstrip("0").rstrip(".")
    return (text or "0").encode("ascii")


def _escape_string(data: bytes) -> bytes:
    out = bytearray(b"(")
    for byte in data:
        if byte in (0x28, 0x29, 0x5C):  # ( ) backslash
            out += b"\\" + bytes([byte])
        elif 32 <= byte <= 126:
            out.append(byte)
        else:
            out += b"\\%03o" % byte
    out += b")"
    return bytes(out)


def _content_stream(page: list[tuple[float, _Line]], layout: PdfLayout) -> bytes:
    parts = [b"BT"]
    active: tuple[str, float] | None = None
    for y, line in page:
        if (line.font, line.size) != active:
            parts.append(line.font.encode("ascii") + b" " + _fmt(line.size) + b" Tf")
            active = (line.font, line.size)
        parts.append(
            b"1 0 0 1 " + _fmt(layout.margin) + b" " + _fmt(y) + b" Tm"
        )
        if line.text_bytes:
            parts.append(_escape_string(line.text_bytes) + b" Tj")
    parts.append(b"ET")
    return b"\n".join(parts) + b"\n"


def _emit(pages: list[list[tuple[float, _Line]]], layout: PdfLayout) -> bytes:
    # object ids: 1 catalog, 2 page tree, 3 body font, 4 heading font,
    # then (content, page) per page
    n_pages = len(pages)
    first_page_obj = 5
    page_ids = [first_page_obj + 2 * i + 1 for i in range(n_pages)]
    content_ids = [first_page_obj + 2 * i for i in range(n_pages)]
    total_objects = 4 + 2 * n_pages

    out = bytearray()
    out += b"%PDF-1.4\n%\xe2\xe3\xcf\xd3\n"
    offsets: dict[int, int] = {}

    def obj(object_id: int, body: bytes) -> None:
        offsets[object_id] = len(out)
        out.extend(b"%d 0 obj\n" % object_id)
        out.extend(body)
        out.extend(b"\nendobj\n")

    obj(1, b"<< /Type /Catalog /Pages 2 0 R >>")
    kids = b" ".join(b"%d 0 R" % pid for pid in page_ids)
    obj(2, b"<< /Type /Pages /Count %d /Kids [%s] >>" % (n_pages, kids))
    obj(3, b"<< /Type /Font /Subtype /Type1 /BaseFont /Helvetica"
           b" /Encoding /WinAnsiEncoding >>")
    obj(4, b"<< /Type /Font /Subtype /Type1 /BaseFont /Helvetica-Bold"
           b" /Encoding /WinAnsiEncoding >>")

    media_box = b"[0 0 " + _fmt(layout.page_width) + b" " + _fmt(layout.page_height) + b"]"
    for index, page in enumerate(pages):
        stream = _content_stream(page, layout)
        obj(
            content_ids[index],
            b"<< /Length %d >>\nstream\n%sendstream" % (len(stream), stream),
        )
        obj(
            page_ids[index],
            b"<< /Type /Page /Parent 2 0 R /MediaBox " + media_box
            + b" /Resources << /Font << /F1 3 0 R /F2 4 0 R >> >>"
            + b" /Contents %d 0 R >>" % content_ids[index],
        )

    xref_offset = len(out)
    out += b"xref\n0 %d\n" % (total_objects + 1)
    out += b"0000000000 65535 f \n"
    for object_id in range(1, total_objects + 1):
        out += b"%010d 00000 n \n" % offsets[object_id]
    out += b"trailer\n<< /Size %d /Root 1 0 R >>\n" % (total_objects + 1)
    out += b"startxref\n%d\n" % xref_offset
    out += b"%%EOF"
    return bytes(out)


# ---------------------------------------------------------------------------
# File naming


def slugify_title(title: str) -> str:
    """ASCII slug for download file names; accents folded, never empty."""

    normalized = unicodedata.normalize("NFKD", title)
    ascii_text = normalized.encode("ascii", "ignore").decode("ascii")
    slug = re.sub(r"[^a-z0-9]+", "-", ascii_text.lower()).strip("-")
    return slug or "story"

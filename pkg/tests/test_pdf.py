"""PDF writer: structure, determinism, extraction round-trips, pagination."""

from __future__ import annotations

import math
import random

import pytest
from reportlab.pdfbase.pdfmetrics import stringWidth

from conftest import make_story
from cuentoterapp import pdf as pdf_mod
from cuentoterapp._fontmetrics import HELVETICA_BOLD_WIDTHS, HELVETICA_WIDTHS
from cuentoterapp.pdf import (
    LayoutError,
    PdfLayout,
    UnresolvedReferenceError,
    render_pdf,
    render_pdf_with_report,
    slugify_title,
)
from pdf_oracle import parse_pdf
from storygen import fuzz_story, recover_document

FONT_NAMES = {"/F1": "Helvetica", "/F2": "Helvetica-Bold"}


def test_framing_bytes(default_cat):
    data = render_pdf(make_story(), default_cat)
    assert data.startswith(b"%PDF-1.4")
    assert data.endswith(b"%%EOF")


def test_determinism(default_cat):
    story = make_story(text_for={1: "Con acentos: áéíóú ñ ¿y símbolos? (sí\\no)"})
    assert render_pdf(story, default_cat) == render_pdf(story, default_cat)


def test_empty_fragment_story_renders_header_only_page(default_cat):
    story = make_story(fragment_ids=())
    parsed = parse_pdf(render_pdf(story, default_cat))
    assert parsed.page_count == 1
    doc = recover_document(parsed, PdfLayout())
    assert doc["title"] == story.title
    assert doc["fragments"] == []
    assert "Prince" in doc["characters"]


def test_extraction_recovers_title_and_fragments_in_order(default_cat):
    story = make_story(
        fragment_ids=(1, 3, 10, 19),
        text_for={
            1: "Érase una vez un príncipe (y un burro).",
            3: "La regla se rompió\\sin querer.",
            10: "El príncipe aceptó: ¡adelante!",
            19: "Todo volvió a su sitio.",
        },
    )
    parsed = parse_pdf(render_pdf(story, default_cat))
    doc = recover_document(parsed, PdfLayout())
    assert doc["title"] == story.title
    assert doc["situation"] == default_cat.situation(story.situation_id).title
    assert [body for _, body in doc["fragments"]] == [f.text for f in story.fragments]
    assert [heading for heading, _ in doc["fragments"]] == [
        default_cat.function(f.function_id).title for f in story.fragments
    ]


@pytest.mark.parametrize(
    "tricky",
    [
        "(((nested)))",
        "back\\slash \\\\ double",
        ") starts closed (",
        "percent % and parens () together",
    ],
)
def test_special_characters_survive(default_cat, tricky):
    story = make_story(fragment_ids=(5,), text_for={5: tricky})
    doc = recover_document(parse_pdf(render_pdf(story, default_cat)), PdfLayout())
    assert doc["fragments"][0][1] == tricky


def test_unsupported_codepoints_replaced_and_reported(default_cat):
    story = make_story(fragment_ids=(2,), text_for={2: "dragón 🐉 y 中文"})
    data, report = render_pdf_with_report(story, default_cat)
    assert report.replaced_characters == 3
    assert set(report.replaced_codepoints) == {"🐉", "中", "文"}
    doc = recover_document(parse_pdf(data), PdfLayout())
    assert doc["fragments"][0][1] == "dragón ? y ??"


def test_all_spans_respect_margins(default_cat):
    layout = PdfLayout()
    rng = random.Random(7)
    for _ in range(10):
        story = fuzz_story(rng, default_cat)
        parsed = parse_pdf(render_pdf(story, default_cat, layout))
        for span in parsed.spans:
            width = stringWidth(span.text, FONT_NAMES[span.font], span.size)
            assert span.x >= layout.margin - 0.01
            assert span.x + width <= layout.page_width - layout.margin + 0.02
            assert span.y - 0.207 * span.size >= layout.margin - 0.02
            assert span.y + 0.718 * span.size <= layout.page_height - layout.margin + 0.02


def test_long_story_wraps_and_paginates(default_cat):
    long_text = "palabra " * 150
    story = make_story(
        fragment_ids=tuple(range(1, 32)),
        text_for={i: long_text.strip() for i in range(1, 32)},
    )
    parsed = parse_pdf(render_pdf(story, default_cat))
    assert parsed.page_count >= 2
    doc = recover_document(parsed, PdfLayout())
    assert [body for _, body in doc["fragments"]] == [f.text for f in story.fragments]


@pytest.mark.parametrize(
    "fragment_count,expected_pages",
    [(9, 1), (20, 1), (21, 2), (31, 2)],
)
def test_page_budget_matches_layout_arithmetic(default_cat, fragment_count, expected_pages):
    # uniform font size makes the line budget a closed-form computation
    size = 12.0
    layout = PdfLayout(title_font_size=size, heading_font_size=size, body_font_size=size)
    line_height = size * layout.line_height_factor
    usable = layout.page_height - 2 * layout.margin - 0.207 * size
    lines_per_page = math.floor(usable / line_height)
    assert lines_per_page == 43

    story = make_story(
        fragment_ids=tuple(range(1, fragment_count + 1)),
        title="T",
        text_for={i: "x" for i in range(1, fragment_count + 1)},
    )
    total_lines = 3 + 2 * fragment_count  # title, situation, characters + 2 per fragment
    assert math.ceil(total_lines / lines_per_page) == expected_pages

    parsed = parse_pdf(render_pdf(story, default_cat, layout))
    assert parsed.page_count == expected_pages
    assert len(parsed.spans) == total_lines
    if expected_pages > 1:
        assert len(parsed.pages[0]) == lines_per_page


def test_unresolved_references(default_cat):
    with pytest.raises(UnresolvedReferenceError):
        render_pdf(make_story(character_ids=(999,)), default_cat)
    with pytest.raises(UnresolvedReferenceError):
        render_pdf(make_story(situation_id=999), default_cat)
    small = make_story(fragment_ids=(31,))
    from conftest import make_small_catalog

    with pytest.raises(UnresolvedReferenceError):
        render_pdf(small, make_small_catalog(5))


def test_degenerate_layout_raises(default_cat):
    with pytest.raises(LayoutError):
        render_pdf(make_story(), default_cat, PdfLayout(margin=400.0))
    with pytest.raises(LayoutError):
        render_pdf(make_story(), default_cat, PdfLayout(body_font_size=0))


def test_width_tables_match_reference_metrics():
    # frozen tables must agree with the independently shipped AFM metrics
    for table, font in ((HELVETICA_WIDTHS, "Helvetica"), (HELVETICA_BOLD_WIDTHS, "Helvetica-Bold")):
        for code, width in table.items():
            ch = bytes([code]).decode("cp1252", errors="ignore")
            if not ch:
                continue  # codes undefined in cp1252 can never be emitted
            assert stringWidth(ch, font, 1000.0) == pytest.approx(width), (font, code)


def test_xref_counts_objects_exactly(default_cat):
    parsed = parse_pdf(render_pdf(make_story(), default_cat))
    # 4 fixed objects + (content, page) per page
    assert parsed.object_count == 4 + 2 * parsed.page_count


@pytest.mark.parametrize(
    "title,slug",
    [
        ("Wonderful Story", "wonderful-story"),
        ("¡Cuento Maravilloso 2!", "cuento-maravilloso-2"),
        ("   ///   ", "story"),
        ("Ñandú & cigüeña", "nandu-ciguena"),
    ],
)
def test_slugify_title(title, slug):
    assert slugify_title(title) == slug

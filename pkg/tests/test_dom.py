"""Tree building, repair, visibility stripping, and serialization."""

from __future__ import annotations

from morpes.dom import parse_html, serialize, strip_invisible, visible_text


def test_simple_tree_structure():
    doc = parse_html("<html><body><div><p>hi</p></div></body></html>")
    body = doc.find("body")
    assert body is not None
    div = body.children[0]
    assert div.tag == "div"
    assert div.children[0].tag == "p"


def test_unclosed_paragraphs_become_siblings():
    doc = parse_html("<div><p>one<p>two<p>three</div>")
    div = doc.find("div")
    tags = [child.tag for child in div.children]
    assert tags == ["p", "p", "p"]
    assert visible_text(div) == "one two three"


def test_unclosed_list_items():
    doc = parse_html("<ul><li>a<li>b<li>c</ul>")
    ul = doc.find("ul")
    assert [child.tag for child in ul.children] == ["li", "li", "li"]


def test_table_rows_and_cells_autoclose():
    doc = parse_html("<table><tr><td>a<td>b<tr><td>c</table>")
    table = doc.find("table")
    rows = [child for child in table.children if child.tag == "tr"]
    assert len(rows) == 2
    assert [cell.tag for cell in rows[0].children] == ["td", "td"]


def test_stray_end_tag_is_ignored():
    doc = parse_html("<div>a</span></div><p>b</p>")
    assert visible_text(doc) == "a b"


def test_void_elements_do_not_swallow_siblings():
    doc = parse_html("<div><br><img src='x.png'>tail</div>")
    div = doc.find("div")
    assert [child.tag for child in div.children] == ["br", "img", "#text"]


def test_mismatched_close_recovers():
    doc = parse_html("<div><b>bold</div>after")
    assert visible_text(doc) == "bold after"


def test_entities_decoded_once():
    doc = parse_html("<p>fish &amp; chips &#233;</p>")
    assert visible_text(doc) == "fish & chips é"


def test_strip_invisible_removes_scripts_styles_hidden():
    doc = parse_html(
        "<html><head><title>t</title><style>x</style></head>"
        "<body><script>var a;</script><p hidden>gone</p>"
        "<p style='display:none'>gone too</p>"
        "<p style='visibility: hidden'>also gone</p>"
        "<noscript>nope</noscript><p>kept</p></body></html>"
    )
    strip_invisible(doc)
    assert visible_text(doc) == "kept"


def test_visible_text_preserves_inline_spacing():
    doc = parse_html("<p>Hello <b>world</b>!</p>")
    assert visible_text(doc) == "Hello world!"


def test_visible_text_separates_blocks():
    doc = parse_html("<div>a</div><div>b</div>")
    assert visible_text(doc) == "a b"


def test_visible_text_normalizes_whitespace():
    doc = parse_html("<p>  a\n\t b   c </p>")
    assert visible_text(doc) == "a b c"


def test_serialize_escapes_text_and_attributes():
    doc = parse_html('<div title="a&quot;b">x &lt; y</div>')
    markup = serialize(doc)
    assert 'title="a&quot;b"' in markup
    assert "x &lt; y" in markup


def test_serialize_parse_round_trip_is_stable():
    source = "<div><p>one<p>two & three</div><img src='p.png'>"
    once = serialize(parse_html(source))
    twice = serialize(parse_html(once))
    assert once == twice

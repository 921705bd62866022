// Copyright 2026 The pin-forge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pin/model.hpp"

#include <algorithm>
#include <cctype>

#include "pin/text.hpp"

namespace pin {

std::string to_string(OiSource s) {
    return s == OiSource::kOri ? "ori" : "compiling";
}

std::optional<OiSource> oi_source_from_string(std::string_view s) {
    if (s == "ori") return OiSource::kOri;
    if (s == "compiling") return OiSource::kCompiling;
    return std::nullopt;
}

namespace {

bool ieq(char a, char b) {
    return std::tolower(static_cast<unsigned char>(a)) ==
           std::tolower(static_cast<unsigned char>(b));
}

struct TagScan {
    bool ok = false;            // a well-formed tag was recognized
    bool malformed = false;     // looked like an img tag but broke mid-way
    size_t end = 0;             // one past the tag's last byte when ok
    std::string src;
    size_t src_begin = std::string::npos;  // absolute span of the src value
    size_t src_end = std::string::npos;
    std::string warning;
};

// Scans an HTML-style img tag starting at `pos` (s[pos] == '<'). Attribute
// values may be single-quoted, double-quoted, or bare. Tags may span lines.
TagScan scan_html_img(std::string_view s, size_t pos) {
    TagScan r;
    size_t i = pos + 1;
    if (i + 3 > s.size()) return r;
    if (!(ieq(s[i], 'i') && ieq(s[i + 1], 'm') && ieq(s[i + 2], 'g'))) return r;
    i += 3;
    if (i < s.size() && !(is_ascii_space(s[i]) || s[i] == '>' || s[i] == '/')) return r;

    while (i < s.size()) {
        while (i < s.size() && is_ascii_space(s[i])) ++i;
        if (i >= s.size()) break;
        if (s[i] == '>') {
            r.ok = true;
            r.end = i + 1;
            return r;
        }
        if (s[i] == '/' && i + 1 < s.size() && s[i + 1] == '>') {
            r.ok = true;
            r.end = i + 2;
            return r;
        }
        // attribute name
        size_t name_begin = i;
        while (i < s.size() && !is_ascii_space(s[i]) && s[i] != '=' && s[i] != '>' &&
               s[i] != '/') {
            ++i;
        }
        std::string_view name = s.substr(name_begin, i - name_begin);
        while (i < s.size() && is_ascii_space(s[i])) ++i;
        std::string value;
        bool has_value = false;
        size_t value_begin = 0;
        size_t value_end = 0;
        if (i < s.size() && s[i] == '=') {
            ++i;
            while (i < s.size() && is_ascii_space(s[i])) ++i;
            if (i < s.size() && (s[i] == '\'' || s[i] == '"')) {
                char q = s[i];
                size_t close = s.find(q, i + 1);
                if (close == std::string_view::npos) {
                    r.malformed = true;
                    r.warning = "unclosed attribute quote in img tag";
                    return r;
                }
                value.assign(s.substr(i + 1, close - i - 1));
                value_begin = i + 1;
                value_end = close;
                has_value = true;
                i = close + 1;
            } else {
                size_t vb = i;
                while (i < s.size() && !is_ascii_space(s[i]) && s[i] != '>') ++i;
                value.assign(s.substr(vb, i - vb));
                value_begin = vb;
                value_end = i;
                has_value = true;
            }
        }
        if (has_value && name.size() == 3 && ieq(name[0], 's') && ieq(name[1], 'r') &&
            ieq(name[2], 'c')) {
            r.src = std::move(value);
            r.src_begin = value_begin;
            r.src_end = value_end;
        }
        if (name.empty() && !has_value) ++i;  // stray byte, keep moving
    }
    r.malformed = true;
    r.warning = "unterminated img tag";
    return r;
}

// Scans markdown image syntax ![alt](dest "title") starting at `pos`
// (s[pos] == '!'). The (...) part must stay on one line. Not matching is not
// an error; the bytes are ordinary text then.
TagScan scan_md_img(std::string_view s, size_t pos) {
    TagScan r;
    size_t i = pos;
    if (i + 1 >= s.size() || s[i + 1] != '[') return r;
    size_t close_bracket = s.find(']', i + 2);
    if (close_bracket == std::string_view::npos) return r;
    size_t paren = close_bracket + 1;
    if (paren >= s.size() || s[paren] != '(') return r;
    size_t j = paren + 1;
    while (j < s.size() && (s[j] == ' ' || s[j] == '\t')) ++j;
    size_t dest_begin = j;
    while (j < s.size() && s[j] != ')' && s[j] != ' ' && s[j] != '\t' && s[j] != '\n') ++j;
    size_t dest_end = j;
    while (j < s.size() && (s[j] == ' ' || s[j] == '\t')) ++j;
    if (j < s.size() && (s[j] == '"' || s[j] == '\'')) {
        char q = s[j];
        size_t qc = s.find(q, j + 1);
        if (qc == std::string_view::npos || s.substr(j, qc - j).find('\n') != std::string_view::npos) {
            return r;
        }
        j = qc + 1;
        while (j < s.size() && (s[j] == ' ' || s[j] == '\t')) ++j;
    }
    if (j >= s.size() || s[j] != ')') return r;
    r.ok = true;
    r.end = j + 1;
    r.src.assign(s.substr(dest_begin, dest_end - dest_begin));
    r.src_begin = dest_begin;
    r.src_end = dest_end;
    return r;
}

// Splits one image-delimited text span into paragraph blocks: a cut is placed
// after each maximal blank-line run, so concatenation reproduces the span.
void emit_text(std::string_view span, Segmentation mode, std::vector<ModalUnit>& out) {
    if (span.empty()) return;
    if (mode == Segmentation::kImageDelimited) {
        out.emplace_back(TextBlock{std::string(span)});
        return;
    }
    size_t block_begin = 0;
    size_t i = 0;
    bool in_blank_run = false;
    size_t line_begin = 0;
    auto flush_to = [&](size_t end) {
        if (end > block_begin) {
            out.emplace_back(TextBlock{std::string(span.substr(block_begin, end - block_begin))});
            block_begin = end;
        }
    };
    while (i <= span.size()) {
        if (i == span.size() || span[i] == '\n') {
            bool blank = is_blank_line(span.substr(line_begin, i - line_begin));
            if (in_blank_run && !blank) flush_to(line_begin);
            in_blank_run = blank;
            if (i == span.size()) break;
            line_begin = i + 1;
        }
        ++i;
    }
    flush_to(span.size());
}

}  // namespace

ModalSequence parse_modal_sequence(std::string_view md, Segmentation mode) {
    ModalSequence seq;
    size_t text_begin = 0;
    size_t i = 0;

    auto flush_text = [&](size_t end) {
        if (end > text_begin) emit_text(md.substr(text_begin, end - text_begin), mode, seq.units);
    };

    auto push_image = [&](TagScan&& t, size_t tag_begin) {
        flush_text(tag_begin);
        ImageRef ref;
        ref.path = std::move(t.src);
        ref.raw.assign(md.substr(tag_begin, t.end - tag_begin));
        if (t.src_begin != std::string::npos) {
            ref.src_begin = t.src_begin - tag_begin;
            ref.src_end = t.src_end - tag_begin;
        }
        seq.units.emplace_back(std::move(ref));
        i = t.end;
        text_begin = i;
    };

    while (i < md.size()) {
        char c = md[i];
        if (c == '<') {
            TagScan t = scan_html_img(md, i);
            if (t.ok) {
                push_image(std::move(t), i);
                continue;
            }
            if (t.malformed) {
                seq.warnings.push_back({i, t.warning});
                ++i;  // the tag bytes stay in the surrounding text block
                continue;
            }
        } else if (c == '!') {
            TagScan t = scan_md_img(md, i);
            if (t.ok) {
                push_image(std::move(t), i);
                continue;
            }
        }
        ++i;
    }
    flush_text(md.size());
    return seq;
}

std::string serialize_modal_sequence(const ModalSequence& seq) {
    size_t total = 0;
    for (const auto& u : seq.units) {
        total += is_text(u) ? std::get<TextBlock>(u).content.size()
                            : std::get<ImageRef>(u).raw.size();
    }
    std::string out;
    out.reserve(total);
    for (const auto& u : seq.units) {
        if (is_text(u)) {
            out += std::get<TextBlock>(u).content;
        } else {
            out += std::get<ImageRef>(u).raw;
        }
    }
    return out;
}

std::vector<std::string> extract_image_refs(std::string_view md) {
    std::vector<std::string> out;
    ModalSequence seq = parse_modal_sequence(md);
    for (const auto& u : seq.units) {
        if (is_image(u)) out.push_back(std::get<ImageRef>(u).path);
    }
    return out;
}

std::string rewrite_image_refs(std::string_view md,
                               const std::function<std::string(const std::string&)>& fn) {
    ModalSequence seq = parse_modal_sequence(md);
    std::string out;
    out.reserve(md.size());
    for (const auto& u : seq.units) {
        if (is_text(u)) {
            out += std::get<TextBlock>(u).content;
            continue;
        }
        const ImageRef& ref = std::get<ImageRef>(u);
        std::string mapped = fn(ref.path);
        if (mapped == ref.path || ref.src_begin == std::string::npos) {
            out += ref.raw;
        } else {
            out.append(ref.raw, 0, ref.src_begin);
            out += mapped;
            out.append(ref.raw, ref.src_end, std::string::npos);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Emphasis
// ---------------------------------------------------------------------------

namespace {

struct DelimRun {
    size_t pos = 0;
    size_t len = 0;
    char ch = '*';
    bool can_open = false;
    bool can_close = false;
    size_t used_left = 0;   // chars consumed from the left edge (closer role)
    size_t used_right = 0;  // chars consumed from the right edge (opener role)

    size_t remaining() const { return len - used_left - used_right; }
};

bool scalar_at_is_space(std::string_view s, size_t byte_pos) {
    size_t i = byte_pos;
    return is_unicode_whitespace(decode_scalar(s, i));
}

// Byte position of the scalar preceding byte_pos, for flank checks.
size_t prev_scalar_start(std::string_view s, size_t byte_pos) {
    size_t i = byte_pos;
    do {
        --i;
    } while (i > 0 && (static_cast<unsigned char>(s[i]) & 0xC0) == 0x80);
    return i;
}

}  // namespace

// Pairs delimiter runs innermost-first: closers are resolved right to left
// against the nearest opener to their left, openers give up their rightmost
// characters and closers their leftmost. Width 2 is preferred when both sides
// still hold two characters.
EmphasisAnalysis analyze_emphasis(std::string_view text) {
    EmphasisAnalysis out;
    out.consumed.assign(text.size(), 0);

    std::vector<DelimRun> runs;
    size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == '*' || c == '_') {
            size_t j = i;
            while (j < text.size() && text[j] == c) ++j;
            DelimRun r;
            r.pos = i;
            r.len = j - i;
            r.ch = c;
            bool prev_ws = i == 0 || scalar_at_is_space(text, prev_scalar_start(text, i));
            bool next_ws = j >= text.size() || scalar_at_is_space(text, j);
            bool prev_delim = i > 0 && (text[i - 1] == '*' || text[i - 1] == '_');
            bool next_delim = j < text.size() && (text[j] == '*' || text[j] == '_');
            // Flanking: a run next to the other delimiter character only
            // opens from a boundary and only closes toward one, which keeps
            // opener chains like *__* from closing against themselves.
            bool left = !next_ws && (!next_delim || prev_ws || prev_delim);
            bool right = !prev_ws && (!prev_delim || next_ws || next_delim);
            if (c == '_') {
                // An underscore buried in a word (snake_case, URL segments)
                // stays inert rather than pairing across unrelated text.
                r.can_open = left && (!right || prev_delim);
                r.can_close = right && (!left || next_delim);
            } else {
                r.can_open = left;
                r.can_close = right;
            }
            if (r.can_open || r.can_close) runs.push_back(r);
            i = j;
        } else {
            ++i;
        }
    }

    for (size_t ci = 0; ci < runs.size(); ++ci) {
        DelimRun& closer = runs[ci];
        while (closer.can_close && closer.remaining() > 0) {
            size_t oi = ci;
            bool found = false;
            while (oi-- > 0) {
                if (runs[oi].ch == closer.ch && runs[oi].can_open && runs[oi].remaining() > 0) {
                    found = true;
                    break;
                }
            }
            if (!found) break;
            DelimRun& opener = runs[oi];
            size_t w = std::min<size_t>(2, std::min(opener.remaining(), closer.remaining()));
            size_t open_chunk_end = opener.pos + opener.len - opener.used_right;
            size_t close_chunk_begin = closer.pos + closer.used_left;
            opener.used_right += w;
            closer.used_left += w;
            for (size_t k = 0; k < w; ++k) {
                out.consumed[open_chunk_end - 1 - k] = 1;
                out.consumed[close_chunk_begin + k] = 1;
            }
            out.spans.push_back(
                {open_chunk_end, close_chunk_begin, static_cast<int>(w)});
        }
    }
    return out;
}

MarkupStats compute_markup_stats(std::string_view md) {
    MarkupStats stats;

    EmphasisAnalysis em = analyze_emphasis(md);
    std::vector<int32_t> bold_delta(md.size() + 1, 0);
    std::vector<int32_t> italic_delta(md.size() + 1, 0);
    for (const auto& s : em.spans) {
        auto& delta = s.width == 2 ? bold_delta : italic_delta;
        delta[s.begin] += 1;
        delta[s.end] -= 1;
    }
    int32_t bold_depth = 0;
    int32_t italic_depth = 0;
    for (size_t i = 0; i < md.size(); ++i) {
        bold_depth += bold_delta[i];
        italic_depth += italic_delta[i];
        bool scalar_start = (static_cast<unsigned char>(md[i]) & 0xC0) != 0x80;
        if (!scalar_start || em.consumed[i]) continue;
        if (bold_depth > 0) ++stats.bold_char_count;
        if (italic_depth > 0) ++stats.italic_char_count;
    }

    for (std::string_view line : split_lines(md)) {
        size_t p = 0;
        while (p < line.size() && line[p] == ' ') ++p;
        size_t h = p;
        while (h < line.size() && line[h] == '#') ++h;
        size_t hashes = h - p;
        if (hashes >= 1 && hashes <= 6 && h < line.size() && line[h] == ' ') {
            ++stats.title_count;
        }
    }
    return stats;
}

}  // namespace pin

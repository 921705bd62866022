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

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

namespace pin {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Entry model
// ---------------------------------------------------------------------------

/// Provenance of the overall image: shipped with the source dataset, or
/// produced programmatically by this toolkit.
enum class OiSource { kOri, kCompiling };

std::string to_string(OiSource s);
std::optional<OiSource> oi_source_from_string(std::string_view s);

/// Either an integer or a free-form string identifier.
struct DocId {
    bool is_string = false;
    int64_t num = 0;
    std::string str;

    DocId() = default;
    DocId(int64_t n) : num(n) {}  // NOLINT: implicit by design
    DocId(std::string s) : is_string(true), str(std::move(s)) {}
    DocId(const char* s) : DocId(std::string(s)) {}

    std::string display() const { return is_string ? str : std::to_string(num); }
    bool operator==(const DocId&) const = default;
};

struct Meta {
    std::string language = "en";
    bool oi_exist = false;
    OiSource oi_source = OiSource::kCompiling;
    std::string source_dataset = "source";
    Json ori_meta;  // opaque snapshot, null when the source had none
    DocId doc_id;
    std::optional<int64_t> page_id;  // null for single-page entries
    std::string date_download;       // YYYY-MM-DD
};

/// Structural problem noticed while decoding an entry from JSON. Folded into
/// the validation report; decoding itself stays lenient.
struct SchemaDefect {
    std::string code;
    std::string field;
    std::string message;
};

/// Per-entry computed metrics. `present` tracks which canonical keys an entry
/// carried on disk so partially-populated records survive a round trip.
struct QualitySignals {
    int64_t image_text_interleaving_count = 0;
    int64_t text_block_count = 0;
    int64_t total_token_count = 0;
    int64_t doc_length = 0;
    double avg_tokens_per_text_block = 0.0;
    double avg_text_block_length = 0.0;
    int64_t bold_char_count = 0;
    int64_t italic_char_count = 0;
    int64_t title_count = 0;

    static constexpr int kFieldCount = 9;
    uint16_t present = (1u << kFieldCount) - 1;  // all fields by default
    std::vector<std::pair<std::string, Json>> extra_fields;

    bool has(int field_index) const { return (present >> field_index) & 1u; }
};

/// One record of the paired-and-interleaved document format: a markdown body
/// with inline content images plus zero or more page-level overall images.
struct PinEntry {
    int64_t id = 0;
    Meta meta;
    std::string license;
    std::optional<QualitySignals> quality_signals;
    std::string md;
    std::vector<std::string> content_image;
    std::vector<std::string> overall_image;

    // Round-trip bookkeeping.
    bool overall_image_was_scalar = false;
    std::vector<std::pair<std::string, Json>> extra_fields;       // unknown top-level keys
    std::vector<std::pair<std::string, Json>> extra_meta_fields;  // unknown meta keys
    std::vector<SchemaDefect> decode_defects;
};

// ---------------------------------------------------------------------------
// Modal sequence
// ---------------------------------------------------------------------------

struct TextBlock {
    std::string content;
    bool operator==(const TextBlock&) const = default;
};

/// An inline image reference. `raw` keeps the exact source bytes of the tag so
/// serialization is byte-identical to the input. `src_begin`/`src_end` locate
/// the path value inside `raw` (npos when the tag carries no src), letting
/// path rewrites splice bytes without reformatting the tag.
struct ImageRef {
    std::string path;
    std::string raw;
    size_t src_begin = std::string::npos;
    size_t src_end = std::string::npos;

    bool operator==(const ImageRef& o) const {
        return path == o.path && raw == o.raw;
    }
};

using ModalUnit = std::variant<TextBlock, ImageRef>;

inline bool is_text(const ModalUnit& u) { return std::holds_alternative<TextBlock>(u); }
inline bool is_image(const ModalUnit& u) { return std::holds_alternative<ImageRef>(u); }

struct ParseWarning {
    size_t byte_offset = 0;
    std::string message;
};

/// How text between images is segmented into blocks.
///  - kImageDelimited: one block per maximal run of non-image content (default).
///  - kParagraph: blocks additionally split after blank-line runs.
/// Serialization is byte-lossless in both modes.
enum class Segmentation { kImageDelimited, kParagraph };

/// Ordered alternation of text blocks and image references parsed from a
/// markdown body.
struct ModalSequence {
    std::vector<ModalUnit> units;
    std::vector<ParseWarning> warnings;

    size_t size() const { return units.size(); }
    bool empty() const { return units.empty(); }
};

struct MarkupStats {
    int64_t bold_char_count = 0;
    int64_t italic_char_count = 0;
    int64_t title_count = 0;
    bool operator==(const MarkupStats&) const = default;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Splits a markdown body into image references and coalesced text blocks.
/// Recognized image forms: HTML-style <img ...> tags with a quoted or bare
/// src attribute, and markdown image syntax ![alt](path). A malformed HTML
/// tag (unclosed attribute quote or unterminated tag) is kept as text and
/// reported through `warnings` with its byte offset.
ModalSequence parse_modal_sequence(std::string_view md,
                                   Segmentation mode = Segmentation::kImageDelimited);

/// Exact inverse of parse_modal_sequence: concatenates the units back into
/// the original bytes.
std::string serialize_modal_sequence(const ModalSequence& seq);

/// Paths of all inline image tags in document order.
std::vector<std::string> extract_image_refs(std::string_view md);

/// Rewrites every image path through `fn`, leaving all other bytes untouched.
/// Tags whose path comes back unchanged are preserved byte-for-byte; tags
/// without a src value are left alone.
std::string rewrite_image_refs(std::string_view md,
                               const std::function<std::string(const std::string&)>& fn);

/// Counts bold characters, italic characters, and heading lines.
///
/// Grammar: bold spans use ** or __ delimiters, italic spans single * or _.
/// A delimiter run may open when followed by a non-whitespace character and,
/// if that character is the other delimiter kind, only when the run sits at a
/// left boundary (start, whitespace, or another delimiter). It may close
/// under the mirror-image condition. Underscore runs flanked by word
/// characters on both sides (snake_case, URL segments) stay inert. Closers
/// resolve in order of appearance against the nearest eligible opener to
/// their left, so unbalanced
/// delimiters never capture text and contribute zero. A character is counted
/// once per style no matter how deeply spans nest. Headings are lines whose
/// first non-space run is 1-6 '#' followed by a space. Counts are Unicode
/// scalar values.
MarkupStats compute_markup_stats(std::string_view md);

/// Emphasis span with byte offsets into the source, exposed for rendering.
struct EmphasisSpan {
    size_t begin = 0;  // first content byte
    size_t end = 0;    // one past last content byte
    int width = 1;     // 1 = italic, 2 = bold
};

struct EmphasisAnalysis {
    std::vector<EmphasisSpan> spans;
    std::vector<char> consumed;  // per byte: 1 when part of a matched delimiter
};

EmphasisAnalysis analyze_emphasis(std::string_view text);

}  // namespace pin

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

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pin/io.hpp"
#include "pin/model.hpp"
#include "pin/pagination.hpp"

namespace pin {

/// Conversion failure with a stable machine-readable code
/// (MISSING_PLACEHOLDER, FETCH_FAILED, BAD_BBOX, ...).
class ConvertError : public std::runtime_error {
public:
    ConvertError(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

// ---------------------------------------------------------------------------
// Source document shapes
// ---------------------------------------------------------------------------

enum class SourceItemKind { kText, kImage };

/// One element of a text/image list document. Exactly the payload matching
/// `kind` is meaningful.
struct SourceItem {
    SourceItemKind kind = SourceItemKind::kText;
    std::string text;    // kind == kText
    std::string source;  // kind == kImage: local path or URL
};

struct InterleavedListDoc {
    std::vector<SourceItem> items;
    Json source_meta;  // opaque snapshot, becomes ori_meta
};

enum class LayoutCategory { kText, kTitle, kFigure, kTable, kListItem, kCode, kOther };

LayoutCategory layout_category_from_string(std::string_view s);

/// One annotated content element. Coordinates are in a single consistent
/// unit per page with 0 <= x0 < x1 and 0 <= y0 < y1.
struct LayoutElement {
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    LayoutCategory category = LayoutCategory::kOther;
    std::string content;     // text-like categories; HTML or markdown for tables
    std::string image_path;  // figures and image-only tables
};

struct LayoutAnnotatedPage {
    std::vector<LayoutElement> elements;
    std::string page_image_path;
    std::optional<int64_t> page_id;
};

struct ImageTextPair {
    std::string image_path;
    std::string text;
};

// ---------------------------------------------------------------------------
// Options and drafts
// ---------------------------------------------------------------------------

/// Metadata applied to converted entries. `doc_id` may be a number or a
/// string; its decimal/string form names localized image files.
struct ConvertOptions {
    int64_t id = 0;
    DocId doc_id;
    std::string language = "en";
    std::string source_dataset;
    std::string license;
    std::string date_download = "1970-01-01";
    // Vertical whitespace wider than this fraction of the page width splits
    // layout elements into columns.
    double gutter_frac = 0.05;
};

/// A converted entry whose md already references canonical local image names
/// (content_image/<doc_id>-<ordinal>.png) plus, per image, the original
/// source reference that still has to be fetched. An empty source means the
/// bytes are already in place.
struct EntryDraft {
    PinEntry entry;
    std::vector<std::string> source_refs;  // parallel to entry.content_image
};

// ---------------------------------------------------------------------------
// Converters
// ---------------------------------------------------------------------------

/// Joins list items into one markdown body: text items verbatim, image items
/// as inline tags, blank lines between items except that consecutive images
/// stay directly adjacent. An image item without a source is skipped with a
/// warning. Throws std::invalid_argument on an empty item list.
EntryDraft from_interleaved_list(const InterleavedListDoc& doc, const ConvertOptions& opts,
                                 std::vector<std::string>* warnings = nullptr);

/// Reconstructs reading order from box coordinates: elements are grouped
/// into columns split at vertical gutters wider than gutter_frac of the page
/// width, columns run left to right, and within a column elements sort by
/// top edge then left edge (full-box comparison; identical boxes keep input
/// order and emit a warning). Title becomes a heading, text/list-item a
/// paragraph, code a fenced block, figure an image tag, table its structured
/// content or an image. The page image becomes the overall image with source
/// "ori". Throws std::invalid_argument on an empty element list.
EntryDraft from_layout_annotations(const LayoutAnnotatedPage& page, const ConvertOptions& opts,
                                   std::vector<std::string>* warnings = nullptr);

/// Wraps plain text as markdown and splits it into page entries. doc_id is
/// assigned once; page ids number the segments. Throws std::invalid_argument
/// on empty text or invalid params.
std::vector<PinEntry> from_text_document(const std::string& text, const ConvertOptions& opts,
                                         const PageParams& params = {});

/// Substitutes {image} and {text} in the template; every {image} occurrence
/// becomes an inline tag with its own ordinal. Throws ConvertError
/// MISSING_PLACEHOLDER when either placeholder is absent and
/// std::invalid_argument when a pair field is empty.
EntryDraft from_image_text_pair(const ImageTextPair& pair, const std::string& tmpl,
                                const ConvertOptions& opts);

/// Accepts either {"texts": [...], "images": [...]} parallel arrays (one
/// item per non-null slot, text before image when both are set) or a generic
/// {"items": [{"kind", "text", "image"}]} array. Unknown top-level keys are
/// kept in source_meta.
InterleavedListDoc parse_interleaved_list(const Json& j);

/// Parses {"page_image": str, "page_id": int?, "elements": [{"bbox":
/// [x0,y0,x1,y1], "category": str, "content": str?, "image_path": str?}]}.
/// Throws ConvertError BAD_BBOX on a malformed box.
LayoutAnnotatedPage parse_layout_page(const Json& j);

// ---------------------------------------------------------------------------
// Image localization
// ---------------------------------------------------------------------------

/// Resolves an image reference to its bytes, or nullopt when unreachable.
class Fetcher {
public:
    virtual ~Fetcher() = default;
    virtual std::optional<std::string> fetch(const std::string& ref) = 0;
};

/// Reads local files; relative references resolve against `base`.
class FileFetcher : public Fetcher {
public:
    explicit FileFetcher(std::string base = "") : base_(std::move(base)) {}
    std::optional<std::string> fetch(const std::string& ref) override;

private:
    std::string base_;
};

/// Fetches http:// URLs, trying up to `attempts` times per reference. TLS is
/// not linked, so https references fail.
class HttpFetcher : public Fetcher {
public:
    explicit HttpFetcher(int timeout_ms = 5000, int attempts = 2)
        : timeout_ms_(timeout_ms), attempts_(attempts) {}
    std::optional<std::string> fetch(const std::string& ref) override;

private:
    int timeout_ms_;
    int attempts_;
};

enum class FetchFailurePolicy {
    kFailEntry,   // throw ConvertError FETCH_FAILED
    kDropTag,     // remove the tag and its content_image slot
    kKeepAsText,  // replace the tag with the source reference as plain text
};

struct LocalizeOptions {
    FetchFailurePolicy on_failure = FetchFailurePolicy::kFailEntry;
    int parallelism = 4;
};

/// Image extension by content signature (png, jpg, gif, webp); anything else
/// falls back to png.
std::string image_extension(std::string_view bytes);

/// Fetches every pending source reference, writes the bytes under
/// root/content_image/ with the <doc_id>-<ordinal>.<ext> naming scheme, and
/// rewrites md where the sniffed extension differs from the draft name.
/// Fetches run on up to `parallelism` threads; naming stays positional, so
/// completion order never changes the result. A draft without pending
/// references is returned unchanged and touches nothing.
PinEntry localize_images(const EntryDraft& draft, Fetcher& fetcher, const std::string& root,
                         const LocalizeOptions& options = {});

}  // namespace pin

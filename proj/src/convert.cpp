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

#include "pin/convert.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>
#include <tuple>

#include "httplib.h"

namespace fs = std::filesystem;

namespace pin {

namespace {

std::string image_tag(const std::string& path) { return "<img src='" + path + "'>"; }

void apply_meta(PinEntry& e, const ConvertOptions& opts) {
    e.id = opts.id;
    e.meta.language = opts.language;
    e.meta.oi_exist = false;
    e.meta.oi_source = OiSource::kCompiling;
    e.meta.source_dataset = opts.source_dataset;
    e.meta.doc_id = opts.doc_id;
    e.meta.page_id = std::nullopt;
    e.meta.date_download = opts.date_download;
    e.license = opts.license;
    e.overall_image_was_scalar = true;
}

void warn(std::vector<std::string>* warnings, std::string message) {
    if (warnings) warnings->push_back(std::move(message));
}

}  // namespace

// ---------------------------------------------------------------------------
// Interleaved lists
// ---------------------------------------------------------------------------

EntryDraft from_interleaved_list(const InterleavedListDoc& doc, const ConvertOptions& opts,
                                 std::vector<std::string>* warnings) {
    if (doc.items.empty())
        throw std::invalid_argument("interleaved list document has no items");

    EntryDraft d;
    apply_meta(d.entry, opts);
    d.entry.meta.ori_meta = doc.source_meta;

    std::string doc_name = opts.doc_id.display();
    bool any = false;
    bool last_was_image = false;
    int ordinal = 0;
    for (size_t i = 0; i < doc.items.size(); ++i) {
        const SourceItem& item = doc.items[i];
        bool is_image = item.kind == SourceItemKind::kImage;
        if (is_image && item.source.empty()) {
            warn(warnings, "item " + std::to_string(i) + " has no image source; skipped");
            continue;
        }
        // Images sit directly next to each other; every other junction is a
        // blank line. That is how the md parse reproduces the item kinds.
        if (any && !(is_image && last_was_image)) d.entry.md += "\n\n";
        if (is_image) {
            std::string local =
                "content_image/" + doc_name + "-" + std::to_string(ordinal++) + ".png";
            d.entry.md += image_tag(local);
            d.entry.content_image.push_back(local);
            d.source_refs.push_back(item.source);
        } else {
            d.entry.md += item.text;
        }
        any = true;
        last_was_image = is_image;
    }
    return d;
}

InterleavedListDoc parse_interleaved_list(const Json& j) {
    if (!j.is_object())
        throw ConvertError("BAD_INPUT", "interleaved list document must be a JSON object");

    InterleavedListDoc d;
    bool has_items = j.contains("items") && j.at("items").is_array();
    bool has_parallel = j.contains("texts") && j.at("texts").is_array() &&
                        j.contains("images") && j.at("images").is_array();
    if (has_items) {
        for (const Json& it : j.at("items")) {
            if (!it.is_object())
                throw ConvertError("BAD_INPUT", "items entries must be objects");
            SourceItem s;
            s.kind = it.value("kind", "text") == "image" ? SourceItemKind::kImage
                                                        : SourceItemKind::kText;
            if (s.kind == SourceItemKind::kText) {
                s.text = it.value("text", "");
            } else if (it.contains("image_path_or_url") && it.at("image_path_or_url").is_string()) {
                s.source = it.at("image_path_or_url").get<std::string>();
            } else {
                s.source = it.value("image", "");
            }
            d.items.push_back(std::move(s));
        }
    } else if (has_parallel) {
        const Json& texts = j.at("texts");
        const Json& images = j.at("images");
        size_t n = std::max(texts.size(), images.size());
        for (size_t i = 0; i < n; ++i) {
            if (i < texts.size() && texts[i].is_string())
                d.items.push_back({SourceItemKind::kText, texts[i].get<std::string>(), ""});
            if (i < images.size() && images[i].is_string())
                d.items.push_back({SourceItemKind::kImage, "", images[i].get<std::string>()});
        }
    } else {
        throw ConvertError("BAD_INPUT", "expected an items array or texts/images arrays");
    }

    Json extras = Json::object();
    for (const auto& [key, value] : j.items()) {
        if (key != "items" && key != "texts" && key != "images") extras[key] = value;
    }
    d.source_meta = extras.empty() ? Json() : extras;
    return d;
}

// ---------------------------------------------------------------------------
// Layout annotations
// ---------------------------------------------------------------------------

LayoutCategory layout_category_from_string(std::string_view s) {
    if (s == "text") return LayoutCategory::kText;
    if (s == "title") return LayoutCategory::kTitle;
    if (s == "figure") return LayoutCategory::kFigure;
    if (s == "table") return LayoutCategory::kTable;
    if (s == "list-item" || s == "list_item") return LayoutCategory::kListItem;
    if (s == "code") return LayoutCategory::kCode;
    return LayoutCategory::kOther;
}

namespace {

std::string fenced_code_block(const std::string& content) {
    size_t longest = 0, run = 0;
    for (char c : content) {
        run = c == '`' ? run + 1 : 0;
        longest = std::max(longest, run);
    }
    std::string fence(std::max<size_t>(3, longest + 1), '`');
    return fence + "\n" + content + "\n" + fence;
}

/// Input indices in reading order: columns split at x-gaps wider than the
/// gutter, left to right, then top edge before left edge within a column.
std::vector<size_t> reading_order(const std::vector<LayoutElement>& els, double gutter_frac,
                                  std::vector<std::string>* warnings) {
    std::vector<size_t> by_x(els.size());
    for (size_t i = 0; i < by_x.size(); ++i) by_x[i] = i;
    std::stable_sort(by_x.begin(), by_x.end(),
                     [&](size_t a, size_t b) { return els[a].x0 < els[b].x0; });

    double min_x = std::numeric_limits<double>::max();
    double max_x = std::numeric_limits<double>::lowest();
    for (const LayoutElement& e : els) {
        min_x = std::min(min_x, e.x0);
        max_x = std::max(max_x, e.x1);
    }
    double gutter = gutter_frac * (max_x - min_x);

    std::vector<std::vector<size_t>> columns;
    double column_end = 0;
    for (size_t idx : by_x) {
        if (columns.empty() || els[idx].x0 - column_end > gutter) {
            columns.emplace_back();
            column_end = els[idx].x1;
        } else {
            column_end = std::max(column_end, els[idx].x1);
        }
        columns.back().push_back(idx);
    }

    std::vector<size_t> order;
    order.reserve(els.size());
    for (std::vector<size_t>& col : columns) {
        std::stable_sort(col.begin(), col.end(), [&](size_t a, size_t b) {
            const LayoutElement &ea = els[a], &eb = els[b];
            return std::tie(ea.y0, ea.x0, ea.y1, ea.x1) < std::tie(eb.y0, eb.x0, eb.y1, eb.x1);
        });
        for (size_t i = 1; i < col.size(); ++i) {
            const LayoutElement &p = els[col[i - 1]], &c = els[col[i]];
            if (p.x0 == c.x0 && p.y0 == c.y0 && p.x1 == c.x1 && p.y1 == c.y1)
                warn(warnings, "identical bounding boxes keep input order (elements " +
                                   std::to_string(col[i - 1]) + " and " +
                                   std::to_string(col[i]) + ")");
        }
        order.insert(order.end(), col.begin(), col.end());
    }
    return order;
}

}  // namespace

EntryDraft from_layout_annotations(const LayoutAnnotatedPage& page, const ConvertOptions& opts,
                                   std::vector<std::string>* warnings) {
    if (page.elements.empty())
        throw std::invalid_argument("layout page has no elements");

    EntryDraft d;
    apply_meta(d.entry, opts);
    d.entry.meta.page_id = page.page_id;
    if (!page.page_image_path.empty()) {
        d.entry.meta.oi_exist = true;
        d.entry.meta.oi_source = OiSource::kOri;
        d.entry.overall_image.push_back(page.page_image_path);
    }

    std::string doc_name = opts.doc_id.display();
    int ordinal = 0;
    auto add_image = [&](const std::string& source) {
        std::string local =
            "content_image/" + doc_name + "-" + std::to_string(ordinal++) + ".png";
        d.entry.content_image.push_back(local);
        d.source_refs.push_back(source);
        return image_tag(local);
    };

    std::vector<std::string> blocks;
    for (size_t idx : reading_order(page.elements, opts.gutter_frac, warnings)) {
        const LayoutElement& el = page.elements[idx];
        std::string block;
        switch (el.category) {
            case LayoutCategory::kTitle:
                if (!el.content.empty()) block = "# " + el.content;
                break;
            case LayoutCategory::kCode:
                if (!el.content.empty()) block = fenced_code_block(el.content);
                break;
            case LayoutCategory::kFigure:
                if (!el.image_path.empty()) block = add_image(el.image_path);
                break;
            case LayoutCategory::kTable:
                // Structured content (HTML or markdown) passes through; an
                // image-only table stays an image.
                if (!el.content.empty())
                    block = el.content;
                else if (!el.image_path.empty())
                    block = add_image(el.image_path);
                break;
            default:
                block = el.content;
                break;
        }
        if (block.empty()) {
            warn(warnings, "element " + std::to_string(idx) + " has no content; skipped");
            continue;
        }
        blocks.push_back(std::move(block));
    }
    for (size_t i = 0; i < blocks.size(); ++i) {
        if (i > 0) d.entry.md += "\n\n";
        d.entry.md += blocks[i];
    }
    return d;
}

LayoutAnnotatedPage parse_layout_page(const Json& j) {
    if (!j.is_object())
        throw ConvertError("BAD_INPUT", "layout page must be a JSON object");

    LayoutAnnotatedPage p;
    p.page_image_path = j.value("page_image", "");
    if (j.contains("page_id") && j.at("page_id").is_number_integer())
        p.page_id = j.at("page_id").get<int64_t>();

    if (!j.contains("elements") || !j.at("elements").is_array())
        throw ConvertError("BAD_INPUT", "layout page lacks an elements array");
    size_t n = 0;
    for (const Json& ej : j.at("elements")) {
        std::string where = "element " + std::to_string(n++);
        if (!ej.is_object()) throw ConvertError("BAD_INPUT", where + " is not an object");
        const Json& bbox = ej.contains("bbox") ? ej.at("bbox") : Json();
        if (!bbox.is_array() || bbox.size() != 4 || !bbox[0].is_number() ||
            !bbox[1].is_number() || !bbox[2].is_number() || !bbox[3].is_number())
            throw ConvertError("BAD_BBOX", where + ": bbox must be [x0, y0, x1, y1]");
        LayoutElement el;
        el.x0 = bbox[0].get<double>();
        el.y0 = bbox[1].get<double>();
        el.x1 = bbox[2].get<double>();
        el.y1 = bbox[3].get<double>();
        if (!(el.x0 >= 0 && el.x0 < el.x1 && el.y0 >= 0 && el.y0 < el.y1))
            throw ConvertError("BAD_BBOX", where + ": requires 0 <= x0 < x1 and 0 <= y0 < y1");
        el.category = layout_category_from_string(ej.value("category", ""));
        el.content = ej.value("content", "");
        el.image_path = ej.value("image_path", "");
        p.elements.push_back(std::move(el));
    }
    return p;
}

// ---------------------------------------------------------------------------
// Plain text and image-text pairs
// ---------------------------------------------------------------------------

std::vector<PinEntry> from_text_document(const std::string& text, const ConvertOptions& opts,
                                         const PageParams& params) {
    if (text.empty()) throw std::invalid_argument("text document is empty");
    PinEntry base;
    apply_meta(base, opts);
    base.md = text;
    return paginate_entry(base, params);
}

EntryDraft from_image_text_pair(const ImageTextPair& pair, const std::string& tmpl,
                                const ConvertOptions& opts) {
    if (pair.image_path.empty() || pair.text.empty())
        throw std::invalid_argument("image-text pair fields must be non-empty");
    if (tmpl.find("{image}") == std::string::npos)
        throw ConvertError("MISSING_PLACEHOLDER", "template lacks {image}");
    if (tmpl.find("{text}") == std::string::npos)
        throw ConvertError("MISSING_PLACEHOLDER", "template lacks {text}");

    EntryDraft d;
    apply_meta(d.entry, opts);
    std::string doc_name = opts.doc_id.display();
    int ordinal = 0;
    size_t pos = 0;
    while (pos < tmpl.size()) {
        size_t img = tmpl.find("{image}", pos);
        size_t txt = tmpl.find("{text}", pos);
        size_t next = std::min(img, txt);
        if (next == std::string::npos) {
            d.entry.md += tmpl.substr(pos);
            break;
        }
        d.entry.md += tmpl.substr(pos, next - pos);
        if (next == img) {
            std::string local =
                "content_image/" + doc_name + "-" + std::to_string(ordinal++) + ".png";
            d.entry.md += image_tag(local);
            d.entry.content_image.push_back(local);
            d.source_refs.push_back(pair.image_path);
            pos = next + 7;
        } else {
            d.entry.md += pair.text;
            pos = next + 6;
        }
    }
    return d;
}

// ---------------------------------------------------------------------------
// Image localization
// ---------------------------------------------------------------------------

std::optional<std::string> FileFetcher::fetch(const std::string& ref) {
    fs::path p = ref;
    if (p.is_relative() && !base_.empty()) p = fs::path(base_) / p;
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) return std::nullopt;
    return std::move(ss).str();
}

std::optional<std::string> HttpFetcher::fetch(const std::string& ref) {
    const std::string scheme = "http://";
    if (ref.rfind(scheme, 0) != 0) return std::nullopt;
    size_t host_begin = scheme.size();
    size_t slash = ref.find('/', host_begin);
    std::string origin = slash == std::string::npos ? ref : ref.substr(0, slash);
    std::string path = slash == std::string::npos ? "/" : ref.substr(slash);

    httplib::Client client(origin);
    client.set_connection_timeout(timeout_ms_ / 1000, timeout_ms_ % 1000 * 1000);
    client.set_read_timeout(timeout_ms_ / 1000, timeout_ms_ % 1000 * 1000);
    for (int attempt = 0; attempt < std::max(1, attempts_); ++attempt) {
        httplib::Result res = client.Get(path);
        if (res && res->status == 200) return res->body;
    }
    return std::nullopt;
}

std::string image_extension(std::string_view bytes) {
    auto starts_with = [&](std::string_view sig) {
        return bytes.size() >= sig.size() && bytes.substr(0, sig.size()) == sig;
    };
    if (starts_with("\x89PNG\r\n\x1a\n")) return "png";
    if (bytes.size() >= 3 && static_cast<unsigned char>(bytes[0]) == 0xFF &&
        static_cast<unsigned char>(bytes[1]) == 0xD8 &&
        static_cast<unsigned char>(bytes[2]) == 0xFF)
        return "jpg";
    if (starts_with("GIF87a") || starts_with("GIF89a")) return "gif";
    if (bytes.size() >= 12 && bytes.substr(0, 4) == "RIFF" && bytes.substr(8, 4) == "WEBP")
        return "webp";
    return "png";
}

PinEntry localize_images(const EntryDraft& draft, Fetcher& fetcher, const std::string& root,
                         const LocalizeOptions& options) {
    std::vector<size_t> pending;
    for (size_t k = 0; k < draft.source_refs.size(); ++k) {
        if (!draft.source_refs[k].empty()) pending.push_back(k);
    }
    if (pending.empty()) return draft.entry;
    if (draft.source_refs.size() != draft.entry.content_image.size())
        throw std::invalid_argument("draft source_refs must parallel content_image");

    std::vector<std::optional<std::string>> bytes(draft.source_refs.size());
    auto fetch_at = [&](size_t k) {
        try {
            bytes[k] = fetcher.fetch(draft.source_refs[k]);
        } catch (...) {
            bytes[k].reset();
        }
    };
    int threads = std::clamp<int>(options.parallelism, 1, static_cast<int>(pending.size()));
    if (threads <= 1) {
        for (size_t k : pending) fetch_at(k);
    } else {
        std::atomic<size_t> cursor{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(threads));
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (size_t i; (i = cursor.fetch_add(1)) < pending.size();) fetch_at(pending[i]);
            });
        }
        for (std::thread& th : pool) th.join();
    }

    if (options.on_failure == FetchFailurePolicy::kFailEntry) {
        for (size_t k : pending) {
            if (!bytes[k])
                throw ConvertError("FETCH_FAILED", "image " + std::to_string(k) + " (" +
                                                       draft.source_refs[k] + ") unreachable");
        }
    }

    // Final local name per image: the draft name with the sniffed extension.
    std::vector<std::string> target(draft.source_refs.size());
    for (size_t k : pending) {
        if (!bytes[k]) continue;
        fs::path p = draft.entry.content_image[k];
        p.replace_extension("." + image_extension(*bytes[k]));
        target[k] = p.generic_string();
    }

    PinEntry out = draft.entry;
    out.md.clear();
    out.content_image.clear();
    ModalSequence seq = parse_modal_sequence(draft.entry.md);
    size_t k = 0;
    for (const ModalUnit& unit : seq.units) {
        if (is_text(unit)) {
            out.md += std::get<TextBlock>(unit).content;
            continue;
        }
        const ImageRef& ref = std::get<ImageRef>(unit);
        size_t idx = k++;
        if (idx >= draft.source_refs.size() || draft.source_refs[idx].empty()) {
            out.md += ref.raw;
            out.content_image.push_back(idx < draft.entry.content_image.size()
                                            ? draft.entry.content_image[idx]
                                            : ref.path);
            continue;
        }
        if (!bytes[idx]) {
            if (options.on_failure == FetchFailurePolicy::kDropTag) continue;
            out.md += draft.source_refs[idx];  // kKeepAsText
            continue;
        }
        if (ref.src_begin != std::string::npos && target[idx] != ref.path) {
            std::string raw = ref.raw;
            raw.replace(ref.src_begin, ref.src_end - ref.src_begin, target[idx]);
            out.md += raw;
        } else {
            out.md += ref.raw;
        }
        out.content_image.push_back(target[idx]);
    }

    fs::path image_dir = fs::path(root) / "content_image";
    fs::create_directories(image_dir);
    for (size_t i : pending) {
        if (!bytes[i]) continue;
        fs::path dest = fs::path(root) / target[i];
        std::ofstream outf(dest, std::ios::binary);
        outf.write(bytes[i]->data(), static_cast<std::streamsize>(bytes[i]->size()));
        if (!outf) throw std::runtime_error("cannot write " + dest.string());
    }
    return out;
}

}  // namespace pin

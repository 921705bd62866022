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

#include "pin/pagination.hpp"

#include <stdexcept>

#include "pin/text.hpp"

namespace pin {

namespace {

int64_t text_line_cost(std::string_view line, const PageParams& params) {
    int64_t chars = scalar_count(line);
    int64_t cost = (chars + params.n_text - 1) / params.n_text;
    return cost < 1 ? 1 : cost;
}

// Number of image refs when the line holds only image tags (plus optional
// whitespace); 0 for anything else.
int64_t image_line_refs(std::string_view line) {
    if (line.find('<') == std::string_view::npos &&
        line.find('!') == std::string_view::npos) {
        return 0;
    }
    ModalSequence seq = parse_modal_sequence(trim(line));
    int64_t images = 0;
    for (const auto& u : seq.units) {
        if (is_image(u)) {
            ++images;
        } else if (!trim(std::get<TextBlock>(u).content).empty()) {
            return 0;
        }
    }
    return images;
}

// Fence marker length when the trimmed line opens a ``` or ~~~ fence.
size_t fence_open_len(std::string_view trimmed, char& fence_ch) {
    if (trimmed.size() < 3) return 0;
    char c = trimmed[0];
    if (c != '`' && c != '~') return 0;
    size_t n = 0;
    while (n < trimmed.size() && trimmed[n] == c) ++n;
    if (n < 3) return 0;
    fence_ch = c;
    return n;
}

bool fence_close(std::string_view trimmed, char fence_ch, size_t open_len) {
    size_t n = 0;
    while (n < trimmed.size() && trimmed[n] == fence_ch) ++n;
    return n >= open_len && n == trimmed.size();
}

struct Unit {
    size_t begin = 0;  // line index range [begin, end)
    size_t end = 0;
    int64_t cost = 0;
};

}  // namespace

int64_t estimate_lines(const ModalUnit& unit, const PageParams& params) {
    if (!params.valid()) throw std::invalid_argument("invalid page params");
    if (is_image(unit)) return params.n_image;
    int64_t total = 0;
    for (const auto& line : split_lines(std::get<TextBlock>(unit).content)) {
        total += text_line_cost(line, params);
    }
    return total;
}

std::vector<PageSegment> paginate(std::string_view input, const PageParams& params) {
    if (!params.valid()) throw std::invalid_argument("invalid page params");
    std::vector<std::string_view> lines = split_lines(input);

    std::vector<PageSegment> pages;
    size_t cur_begin = 0;
    size_t cur_end = 0;
    int64_t cur_cost = 0;
    size_t cur_units = 0;
    bool cur_oversized = false;

    auto join_range = [&](size_t b, size_t e) {
        std::string md;
        for (size_t i = b; i < e; ++i) {
            if (i > b) md += '\n';
            md += lines[i];
        }
        return md;
    };
    auto close_page = [&]() {
        pages.push_back({join_range(cur_begin, cur_end), cur_cost,
                         static_cast<int64_t>(pages.size()), cur_oversized});
        cur_begin = cur_end;
        cur_cost = 0;
        cur_units = 0;
        cur_oversized = false;
    };
    auto take_unit = [&](const Unit& u) {
        if (cur_oversized) close_page();
        if (u.cost > params.n_line) {
            // Dedicated flagged page; pending leading blanks merge in rather
            // than forming an empty page, trailing blanks attach afterwards.
            if (cur_units > 0) close_page();
            cur_end = u.end;
            cur_cost = u.cost;
            cur_units = 1;
            cur_oversized = true;
            return;
        }
        if (cur_cost + u.cost > params.n_line) close_page();
        cur_end = u.end;
        cur_cost += u.cost;
        ++cur_units;
    };

    size_t i = 0;
    while (i < lines.size()) {
        std::string_view line = lines[i];
        if (is_blank_line(line)) {
            // Blank separators cost nothing and stay with the current page.
            cur_end = ++i;
            continue;
        }
        std::string_view trimmed = trim(line);
        char fence_ch = 0;
        size_t open_len = fence_open_len(trimmed, fence_ch);
        if (open_len > 0) {
            Unit u{i, i + 1, text_line_cost(line, params)};
            ++i;
            while (i < lines.size()) {
                u.cost += text_line_cost(lines[i], params);
                bool closed = fence_close(trim(lines[i]), fence_ch, open_len);
                u.end = ++i;
                if (closed) break;
            }
            take_unit(u);
            continue;
        }
        if (!trimmed.empty() && trimmed[0] == '|') {
            Unit u{i, i, 0};
            while (i < lines.size() && !is_blank_line(lines[i]) &&
                   trim(lines[i]).size() > 0 && trim(lines[i])[0] == '|') {
                u.cost += text_line_cost(lines[i], params);
                u.end = ++i;
            }
            take_unit(u);
            continue;
        }
        int64_t image_refs = image_line_refs(line);
        if (image_refs > 0) {
            take_unit({i, i + 1, image_refs * params.n_image});
            ++i;
            continue;
        }
        // Paragraph: consecutive plain text lines.
        Unit u{i, i, 0};
        while (i < lines.size() && !is_blank_line(lines[i])) {
            std::string_view t = trim(lines[i]);
            char fc = 0;
            if (fence_open_len(t, fc) > 0) break;
            if (!t.empty() && t[0] == '|') break;
            if (image_line_refs(lines[i]) > 0) break;
            u.cost += text_line_cost(lines[i], params);
            u.end = ++i;
        }
        take_unit(u);
    }
    if (cur_end > cur_begin || pages.empty()) close_page();
    return pages;
}

std::vector<PinEntry> paginate_entry(const PinEntry& entry, const PageParams& params) {
    if (entry.meta.page_id.has_value()) {
        throw std::invalid_argument("entry is already paginated");
    }
    std::vector<PageSegment> segments = paginate(entry.md, params);
    std::vector<PinEntry> out;
    out.reserve(segments.size());
    size_t image_cursor = 0;
    for (const PageSegment& seg : segments) {
        PinEntry page = entry;
        page.md = seg.md;
        page.meta.page_id = seg.page_index;
        page.meta.oi_exist = false;
        page.overall_image.clear();
        page.overall_image_was_scalar = true;
        page.quality_signals.reset();
        page.decode_defects.clear();

        size_t refs = extract_image_refs(seg.md).size();
        page.content_image.clear();
        for (size_t k = 0; k < refs && image_cursor < entry.content_image.size(); ++k) {
            page.content_image.push_back(entry.content_image[image_cursor++]);
        }
        out.push_back(std::move(page));
    }
    return out;
}

}  // namespace pin

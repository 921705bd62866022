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
#include <string>
#include <string_view>
#include <vector>

#include "pin/model.hpp"

namespace pin {

/// Page budget parameters. n_line caps the estimated lines per page, n_text
/// is the assumed character width of a rendered line, n_image the line count
/// an image is assumed to occupy.
struct PageParams {
    int64_t n_line = 40;
    int64_t n_text = 80;
    int64_t n_image = 15;

    bool valid() const {
        return n_line > 0 && n_text > 0 && n_image >= 1 && n_image <= n_line;
    }
};

struct PageSegment {
    std::string md;
    int64_t estimated_lines = 0;
    int64_t page_index = 0;
    // Set when the page holds a single indivisible unit whose estimate
    // exceeds n_line. Nothing is truncated.
    bool oversized = false;
};

/// Estimated rendered lines for one modal unit: an image occupies n_image
/// lines; a text block costs, per source line, max(1, ceil(chars / n_text))
/// where chars is the Unicode scalar count.
int64_t estimate_lines(const ModalUnit& unit, const PageParams& params);

/// Slices a markdown document into page-sized segments by a greedy first-fit
/// over atomic units (image lines, fenced code blocks, tables, blank-line
/// delimited paragraphs). Atomic units are never split; a unit whose estimate
/// exceeds n_line gets a dedicated page flagged oversized. Blank separator
/// lines cost nothing and stay with the preceding page, so joining all
/// segment md values with "\n" reproduces the input byte for byte.
/// Throws std::invalid_argument when params are invalid.
std::vector<PageSegment> paginate(std::string_view input, const PageParams& params);

/// Splits an unpaginated entry into one entry per page: page_id is the
/// segment index, oi_exist is false until an overall image is rendered, and
/// content_image is partitioned positionally by the number of image refs on
/// each page. Every output keeps the source id; renumbering is left to the
/// caller. Stored quality signals are dropped because they describe the whole
/// document. Throws std::invalid_argument when the entry already has a
/// page_id or params are invalid.
std::vector<PinEntry> paginate_entry(const PinEntry& entry, const PageParams& params);

}  // namespace pin

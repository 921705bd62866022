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
#include <optional>
#include <string>
#include <vector>

#include "pin/model.hpp"

namespace pin {

/// Per-subset roll-up of the stored quality signals. Totals are exact sums;
/// each avg_* column is the mean of the per-document values (0 when the
/// subset is empty).
struct SubsetStats {
    std::string subset;
    int64_t total_docs = 0;
    int64_t total_content_images = 0;
    double avg_images_per_doc = 0.0;
    double avg_itif = 0.0;
    int64_t total_tokens = 0;
    int64_t total_length = 0;
    double avg_tokens_per_text_block = 0.0;
    double avg_bold_chars = 0.0;
    double avg_italic_chars = 0.0;
    double avg_heading_count = 0.0;
};

/// Streaming aggregation state. All counters except the per-document
/// tokens-per-block average accumulate as integers, so results are exact and
/// order-independent; the lone floating sum is order-independent to rounding.
/// merge() is commutative and associative, enabling parallel partial
/// aggregation.
class SubsetAccumulator {
public:
    explicit SubsetAccumulator(std::string subset = "") : subset_(std::move(subset)) {}

    /// Folds one entry in. Throws std::invalid_argument when the entry
    /// carries no stored quality signals.
    void add(const PinEntry& entry);

    void merge(const SubsetAccumulator& other);

    SubsetStats finish() const;

    int64_t docs() const { return docs_; }

private:
    std::string subset_;
    int64_t docs_ = 0;
    int64_t images_ = 0;
    int64_t itif_ = 0;
    int64_t tokens_ = 0;
    int64_t length_ = 0;
    int64_t bold_ = 0;
    int64_t italic_ = 0;
    int64_t headings_ = 0;
    double tokens_per_block_ = 0.0;
};

/// Single-pass aggregation of a whole subset.
SubsetStats aggregate_subset(const std::vector<PinEntry>& entries,
                             const std::string& subset = "");

/// Combines subset rows into a total row: totals are summed; each avg_*
/// column is the unweighted arithmetic mean of the per-subset averages, so
/// small subsets count as much as large ones. Pass weighted=true for the
/// document-weighted alternative. Throws std::invalid_argument on an empty
/// list.
SubsetStats aggregate_total(const std::vector<SubsetStats>& subsets,
                            bool weighted = false);

struct BinSpec {
    int x_bins = 30;  // content images per document
    int y_bins = 30;  // tokens per document

    bool valid() const { return x_bins > 0 && y_bins > 0; }
};

/// 2-D histogram over (content images per doc, tokens per doc). Ranges are
/// the inclusive min/max of the sampled values; counts sum to sample_size.
struct JointDistribution {
    int x_bins = 0;
    int y_bins = 0;
    int64_t x_min = 0, x_max = 0;
    int64_t y_min = 0, y_max = 0;
    int64_t sample_size = 0;
    std::vector<int64_t> counts;  // row-major, counts[y * x_bins + x]

    int64_t at(int x, int y) const { return counts[static_cast<size_t>(y) * x_bins + x]; }
};

/// Reservoir-samples up to sample_n entries (every entry when the input is
/// smaller) with a generator seeded by `seed`, then bins the pairs. Token
/// counts come from stored signals when present, otherwise from whitespace
/// tokenization. Deterministic for a fixed seed. Throws std::invalid_argument
/// when the bin spec is invalid or sample_n < 1.
JointDistribution joint_distribution(const std::vector<PinEntry>& entries,
                                     int64_t sample_n, const BinSpec& spec,
                                     uint64_t seed = 0);

enum class ReportFormat { kCsv, kJson, kSvgScatter };

struct Report {
    std::vector<SubsetStats> subsets;
    std::optional<JointDistribution> joint;
};

/// Serializes a report. CSV holds one row per subset with RFC-4180 quoting
/// and columns in SubsetStats field order; JSON mirrors the full report;
/// svg-scatter draws the joint distribution as a standalone heat plot (an
/// empty plot when no distribution is attached). All formats are
/// deterministic byte-for-byte.
std::string emit_report(const Report& report, ReportFormat format);

}  // namespace pin

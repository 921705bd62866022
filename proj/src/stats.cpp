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

#include "pin/stats.hpp"

#include <charconv>
#include <random>
#include <stdexcept>

#include "pin/signals.hpp"

namespace pin {

namespace {

std::string fmt(int64_t v) { return std::to_string(v); }

// Shortest round-trip representation, locale-free.
std::string fmt(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

std::string fmt_fixed(double v, int precision) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v,
                                 std::chars_format::fixed, precision);
    return std::string(buf, p);
}

}  // namespace

void SubsetAccumulator::add(const PinEntry& entry) {
    if (!entry.quality_signals) {
        throw std::invalid_argument("entry has no stored quality signals");
    }
    const QualitySignals& qs = *entry.quality_signals;
    ++docs_;
    images_ += static_cast<int64_t>(entry.content_image.size());
    itif_ += qs.image_text_interleaving_count;
    tokens_ += qs.total_token_count;
    length_ += qs.doc_length;
    bold_ += qs.bold_char_count;
    italic_ += qs.italic_char_count;
    headings_ += qs.title_count;
    tokens_per_block_ += qs.avg_tokens_per_text_block;
}

void SubsetAccumulator::merge(const SubsetAccumulator& other) {
    docs_ += other.docs_;
    images_ += other.images_;
    itif_ += other.itif_;
    tokens_ += other.tokens_;
    length_ += other.length_;
    bold_ += other.bold_;
    italic_ += other.italic_;
    headings_ += other.headings_;
    tokens_per_block_ += other.tokens_per_block_;
}

SubsetStats SubsetAccumulator::finish() const {
    SubsetStats s;
    s.subset = subset_;
    s.total_docs = docs_;
    s.total_content_images = images_;
    s.total_tokens = tokens_;
    s.total_length = length_;
    if (docs_ > 0) {
        double n = static_cast<double>(docs_);
        s.avg_images_per_doc = static_cast<double>(images_) / n;
        s.avg_itif = static_cast<double>(itif_) / n;
        s.avg_tokens_per_text_block = tokens_per_block_ / n;
        s.avg_bold_chars = static_cast<double>(bold_) / n;
        s.avg_italic_chars = static_cast<double>(italic_) / n;
        s.avg_heading_count = static_cast<double>(headings_) / n;
    }
    return s;
}

SubsetStats aggregate_subset(const std::vector<PinEntry>& entries,
                             const std::string& subset) {
    SubsetAccumulator acc(subset);
    for (const PinEntry& e : entries) acc.add(e);
    return acc.finish();
}

SubsetStats aggregate_total(const std::vector<SubsetStats>& subsets, bool weighted) {
    if (subsets.empty()) {
        throw std::invalid_argument("aggregate_total needs at least one subset");
    }
    SubsetStats total;
    total.subset = "total";
    double w_images = 0, w_itif = 0, w_tpb = 0, w_bold = 0, w_italic = 0, w_head = 0;
    for (const SubsetStats& s : subsets) {
        total.total_docs += s.total_docs;
        total.total_content_images += s.total_content_images;
        total.total_tokens += s.total_tokens;
        total.total_length += s.total_length;
        double w = weighted ? static_cast<double>(s.total_docs) : 1.0;
        w_images += w * s.avg_images_per_doc;
        w_itif += w * s.avg_itif;
        w_tpb += w * s.avg_tokens_per_text_block;
        w_bold += w * s.avg_bold_chars;
        w_italic += w * s.avg_italic_chars;
        w_head += w * s.avg_heading_count;
    }
    double denom = weighted ? static_cast<double>(total.total_docs)
                            : static_cast<double>(subsets.size());
    if (denom > 0) {
        total.avg_images_per_doc = w_images / denom;
        total.avg_itif = w_itif / denom;
        total.avg_tokens_per_text_block = w_tpb / denom;
        total.avg_bold_chars = w_bold / denom;
        total.avg_italic_chars = w_italic / denom;
        total.avg_heading_count = w_head / denom;
    }
    return total;
}

namespace {

int bin_index(int64_t v, int64_t lo, int64_t hi, int bins) {
    int idx = static_cast<int>((v - lo) * bins / (hi - lo + 1));
    return idx >= bins ? bins - 1 : idx;
}

}  // namespace

JointDistribution joint_distribution(const std::vector<PinEntry>& entries,
                                     int64_t sample_n, const BinSpec& spec,
                                     uint64_t seed) {
    if (!spec.valid() || sample_n < 1) {
        throw std::invalid_argument("invalid bin spec or sample size");
    }
    Tokenizer tok = Tokenizer::whitespace();
    std::mt19937_64 gen(seed);
    std::vector<std::pair<int64_t, int64_t>> sample;
    int64_t seen = 0;
    for (const PinEntry& e : entries) {
        int64_t x = static_cast<int64_t>(e.content_image.size());
        int64_t y = (e.quality_signals && e.quality_signals->has(2))
                        ? e.quality_signals->total_token_count
                        : tok.count_tokens(e.md);
        if (seen < sample_n) {
            sample.emplace_back(x, y);
        } else {
            std::uniform_int_distribution<int64_t> pick(0, seen);
            int64_t j = pick(gen);
            if (j < sample_n) sample[static_cast<size_t>(j)] = {x, y};
        }
        ++seen;
    }

    JointDistribution out;
    out.x_bins = spec.x_bins;
    out.y_bins = spec.y_bins;
    out.counts.assign(static_cast<size_t>(spec.x_bins) * spec.y_bins, 0);
    out.sample_size = static_cast<int64_t>(sample.size());
    if (sample.empty()) return out;

    out.x_min = out.x_max = sample[0].first;
    out.y_min = out.y_max = sample[0].second;
    for (const auto& [x, y] : sample) {
        out.x_min = std::min(out.x_min, x);
        out.x_max = std::max(out.x_max, x);
        out.y_min = std::min(out.y_min, y);
        out.y_max = std::max(out.y_max, y);
    }
    for (const auto& [x, y] : sample) {
        int xi = bin_index(x, out.x_min, out.x_max, out.x_bins);
        int yi = bin_index(y, out.y_min, out.y_max, out.y_bins);
        ++out.counts[static_cast<size_t>(yi) * out.x_bins + xi];
    }
    return out;
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string emit_csv(const Report& report) {
    std::string out =
        "subset,total_docs,total_content_images,avg_images_per_doc,avg_itif,"
        "total_tokens,total_length,avg_tokens_per_text_block,avg_bold_chars,"
        "avg_italic_chars,avg_heading_count\n";
    for (const SubsetStats& s : report.subsets) {
        out += csv_field(s.subset);
        out += ',' + fmt(s.total_docs);
        out += ',' + fmt(s.total_content_images);
        out += ',' + fmt(s.avg_images_per_doc);
        out += ',' + fmt(s.avg_itif);
        out += ',' + fmt(s.total_tokens);
        out += ',' + fmt(s.total_length);
        out += ',' + fmt(s.avg_tokens_per_text_block);
        out += ',' + fmt(s.avg_bold_chars);
        out += ',' + fmt(s.avg_italic_chars);
        out += ',' + fmt(s.avg_heading_count);
        out += '\n';
    }
    return out;
}

std::string emit_json(const Report& report) {
    Json doc;
    doc["subsets"] = Json::array();
    for (const SubsetStats& s : report.subsets) {
        Json j;
        j["subset"] = s.subset;
        j["total_docs"] = s.total_docs;
        j["total_content_images"] = s.total_content_images;
        j["avg_images_per_doc"] = s.avg_images_per_doc;
        j["avg_itif"] = s.avg_itif;
        j["total_tokens"] = s.total_tokens;
        j["total_length"] = s.total_length;
        j["avg_tokens_per_text_block"] = s.avg_tokens_per_text_block;
        j["avg_bold_chars"] = s.avg_bold_chars;
        j["avg_italic_chars"] = s.avg_italic_chars;
        j["avg_heading_count"] = s.avg_heading_count;
        doc["subsets"].push_back(std::move(j));
    }
    if (report.joint) {
        const JointDistribution& d = *report.joint;
        Json j;
        j["x_bins"] = d.x_bins;
        j["y_bins"] = d.y_bins;
        j["x_min"] = d.x_min;
        j["x_max"] = d.x_max;
        j["y_min"] = d.y_min;
        j["y_max"] = d.y_max;
        j["sample_size"] = d.sample_size;
        j["counts"] = d.counts;
        doc["joint"] = std::move(j);
    }
    return doc.dump(2) + "\n";
}

// Static heat plot: one rect per nonzero bin, opacity scaled by the densest
// bin. Axes carry the inclusive data ranges.
std::string emit_svg(const Report& report) {
    constexpr double kW = 640, kH = 480;
    constexpr double kLeft = 60, kTop = 30, kRight = 20, kBottom = 50;
    const double plot_w = kW - kLeft - kRight;
    const double plot_h = kH - kTop - kBottom;

    std::string out =
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
        "viewBox=\"0 0 640 480\">\n"
        "<rect x=\"0\" y=\"0\" width=\"640\" height=\"480\" fill=\"#ffffff\"/>\n";
    int64_t n = report.joint ? report.joint->sample_size : 0;
    out += "<text x=\"320\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">"
           "content images vs tokens per document (n=" + fmt(n) + ")</text>\n";

    if (report.joint && !report.joint->counts.empty()) {
        const JointDistribution& d = *report.joint;
        int64_t peak = 0;
        for (int64_t c : d.counts) peak = std::max(peak, c);
        double cell_w = plot_w / d.x_bins;
        double cell_h = plot_h / d.y_bins;
        out += "<g fill=\"#1f6feb\">\n";
        for (int yi = 0; yi < d.y_bins; ++yi) {
            for (int xi = 0; xi < d.x_bins; ++xi) {
                int64_t c = d.at(xi, yi);
                if (c == 0 || peak == 0) continue;
                double px = kLeft + xi * cell_w;
                double py = kTop + (d.y_bins - 1 - yi) * cell_h;
                out += "<rect x=\"" + fmt_fixed(px, 2) + "\" y=\"" + fmt_fixed(py, 2) +
                       "\" width=\"" + fmt_fixed(cell_w, 2) + "\" height=\"" +
                       fmt_fixed(cell_h, 2) + "\" fill-opacity=\"" +
                       fmt_fixed(static_cast<double>(c) / peak, 3) + "\"/>\n";
            }
        }
        out += "</g>\n";
        out += "<text x=\"" + fmt_fixed(kLeft, 2) + "\" y=\"470\" font-size=\"11\">" +
               fmt(d.x_min) + "</text>\n";
        out += "<text x=\"" + fmt_fixed(kW - kRight, 2) +
               "\" y=\"470\" text-anchor=\"end\" font-size=\"11\">" + fmt(d.x_max) +
               "</text>\n";
        out += "<text x=\"8\" y=\"" + fmt_fixed(kH - kBottom, 2) +
               "\" font-size=\"11\">" + fmt(d.y_min) + "</text>\n";
        out += "<text x=\"8\" y=\"" + fmt_fixed(kTop + 10, 2) + "\" font-size=\"11\">" +
               fmt(d.y_max) + "</text>\n";
    }
    out += "<rect x=\"" + fmt_fixed(kLeft, 2) + "\" y=\"" + fmt_fixed(kTop, 2) +
           "\" width=\"" + fmt_fixed(plot_w, 2) + "\" height=\"" + fmt_fixed(plot_h, 2) +
           "\" fill=\"none\" stroke=\"#57606a\"/>\n";
    out += "<text x=\"320\" y=\"476\" text-anchor=\"middle\" font-size=\"12\">"
           "content images per document</text>\n";
    out += "<text x=\"14\" y=\"240\" text-anchor=\"middle\" font-size=\"12\" "
           "transform=\"rotate(-90 14 240)\">tokens per document</text>\n";
    out += "</svg>\n";
    return out;
}

}  // namespace

std::string emit_report(const Report& report, ReportFormat format) {
    switch (format) {
        case ReportFormat::kCsv: return emit_csv(report);
        case ReportFormat::kJson: return emit_json(report);
        case ReportFormat::kSvgScatter: return emit_svg(report);
    }
    return {};
}

}  // namespace pin

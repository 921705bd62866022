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

#include "pin/io.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace fs = std::filesystem;

namespace pin {

namespace {

constexpr std::array<const char*, QualitySignals::kFieldCount> kSignalKeys = {
    "image_text_interleaving_count",
    "text_block_count",
    "total_token_count",
    "doc_length",
    "avg_tokens_per_text_block",
    "avg_text_block_length",
    "bold_char_count",
    "italic_char_count",
    "title_count",
};

bool signal_field_is_real(int idx) {
    return idx == 4 || idx == 5;
}

int64_t* signal_int_field(QualitySignals& q, int idx) {
    switch (idx) {
        case 0: return &q.image_text_interleaving_count;
        case 1: return &q.text_block_count;
        case 2: return &q.total_token_count;
        case 3: return &q.doc_length;
        case 6: return &q.bold_char_count;
        case 7: return &q.italic_char_count;
        case 8: return &q.title_count;
        default: return nullptr;
    }
}

double* signal_real_field(QualitySignals& q, int idx) {
    switch (idx) {
        case 4: return &q.avg_tokens_per_text_block;
        case 5: return &q.avg_text_block_length;
        default: return nullptr;
    }
}

void defect(PinEntry& e, const char* code, std::string field, std::string message) {
    e.decode_defects.push_back({code, std::move(field), std::move(message)});
}

bool is_int(const Json& v) {
    return v.is_number_integer() || v.is_number_unsigned();
}

constexpr std::array<const char*, 7> kTopKeys = {
    "id", "meta", "license", "quality_signals", "content_image", "md", "overall_image"};
constexpr std::array<const char*, 8> kMetaKeys = {
    "language", "oi_exist",  "oi_source", "source_dataset",
    "ori_meta", "doc_id",    "page_id",   "date_download"};

template <size_t N>
bool known_key(const std::array<const char*, N>& keys, const std::string& k) {
    for (const char* key : keys) {
        if (k == key) return true;
    }
    return false;
}

void decode_meta(const Json& m, PinEntry& e) {
    if (auto it = m.find("language"); it == m.end()) {
        defect(e, "MISSING_KEY", "meta.language", "required key is absent");
        e.meta.language.clear();
    } else if (!it->is_string()) {
        defect(e, "WRONG_TYPE", "meta.language", "expected a string");
        e.meta.language.clear();
    } else {
        e.meta.language = it->get<std::string>();
    }

    if (auto it = m.find("oi_exist"); it == m.end()) {
        defect(e, "MISSING_KEY", "meta.oi_exist", "required key is absent");
    } else if (!it->is_boolean()) {
        defect(e, "WRONG_TYPE", "meta.oi_exist", "expected a boolean");
    } else {
        e.meta.oi_exist = it->get<bool>();
    }

    if (auto it = m.find("oi_source"); it == m.end()) {
        defect(e, "MISSING_KEY", "meta.oi_source", "required key is absent");
    } else if (!it->is_string()) {
        defect(e, "WRONG_TYPE", "meta.oi_source", "expected a string");
    } else if (auto src = oi_source_from_string(it->get<std::string>()); !src) {
        defect(e, "BAD_OI_SOURCE", "meta.oi_source",
               "expected \"ori\" or \"compiling\", got \"" + it->get<std::string>() + "\"");
    } else {
        e.meta.oi_source = *src;
    }

    if (auto it = m.find("source_dataset"); it == m.end()) {
        defect(e, "MISSING_KEY", "meta.source_dataset", "required key is absent");
        e.meta.source_dataset.clear();
    } else if (!it->is_string()) {
        defect(e, "WRONG_TYPE", "meta.source_dataset", "expected a string");
        e.meta.source_dataset.clear();
    } else {
        e.meta.source_dataset = it->get<std::string>();
    }

    if (auto it = m.find("ori_meta"); it == m.end()) {
        defect(e, "MISSING_KEY", "meta.ori_meta", "required key is absent");
    } else {
        e.meta.ori_meta = *it;  // opaque, preserved verbatim
    }

    if (auto it = m.find("doc_id"); it == m.end()) {
        defect(e, "MISSING_KEY", "meta.doc_id", "required key is absent");
    } else if (is_int(*it)) {
        e.meta.doc_id = DocId(it->get<int64_t>());
    } else if (it->is_string()) {
        e.meta.doc_id = DocId(it->get<std::string>());
    } else {
        defect(e, "WRONG_TYPE", "meta.doc_id", "expected an integer or string");
    }

    if (auto it = m.find("page_id"); it == m.end()) {
        defect(e, "MISSING_KEY", "meta.page_id", "required key is absent");
    } else if (it->is_null()) {
        e.meta.page_id.reset();
    } else if (is_int(*it)) {
        e.meta.page_id = it->get<int64_t>();
    } else {
        defect(e, "BAD_PAGE_ID", "meta.page_id", "expected an integer or null");
    }

    if (auto it = m.find("date_download"); it == m.end()) {
        defect(e, "MISSING_KEY", "meta.date_download", "required key is absent");
        e.meta.date_download.clear();
    } else if (!it->is_string()) {
        defect(e, "WRONG_TYPE", "meta.date_download", "expected a string");
        e.meta.date_download.clear();
    } else {
        e.meta.date_download = it->get<std::string>();
    }

    for (const auto& [k, v] : m.items()) {
        if (!known_key(kMetaKeys, k)) e.extra_meta_fields.emplace_back(k, v);
    }
}

void decode_signals(const Json& q, PinEntry& e) {
    QualitySignals s;
    s.present = 0;
    for (int idx = 0; idx < QualitySignals::kFieldCount; ++idx) {
        auto it = q.find(kSignalKeys[idx]);
        if (it == q.end()) continue;
        std::string field = std::string("quality_signals.") + kSignalKeys[idx];
        if (signal_field_is_real(idx)) {
            if (!it->is_number()) {
                defect(e, "WRONG_TYPE", field, "expected a number");
                continue;
            }
            *signal_real_field(s, idx) = it->get<double>();
        } else {
            if (!is_int(*it)) {
                defect(e, "WRONG_TYPE", field, "expected an integer");
                continue;
            }
            *signal_int_field(s, idx) = it->get<int64_t>();
        }
        s.present |= 1u << idx;
    }
    for (const auto& [k, v] : q.items()) {
        bool known = false;
        for (const char* key : kSignalKeys) {
            if (k == key) {
                known = true;
                break;
            }
        }
        if (!known) s.extra_fields.emplace_back(k, v);
    }
    e.quality_signals = std::move(s);
}

}  // namespace

PinEntry decode_entry(const Json& j) {
    PinEntry e;
    e.meta.language.clear();
    e.meta.source_dataset.clear();
    if (!j.is_object()) {
        defect(e, "WRONG_TYPE", "", "entry is not a JSON object");
        return e;
    }

    if (auto it = j.find("id"); it == j.end()) {
        defect(e, "MISSING_KEY", "id", "required key is absent");
    } else if (!is_int(*it)) {
        defect(e, "WRONG_TYPE", "id", "expected an integer");
    } else {
        e.id = it->get<int64_t>();
    }

    if (auto it = j.find("meta"); it == j.end()) {
        defect(e, "MISSING_KEY", "meta", "required key is absent");
    } else if (!it->is_object()) {
        defect(e, "WRONG_TYPE", "meta", "expected an object");
    } else {
        decode_meta(*it, e);
    }

    if (auto it = j.find("license"); it == j.end()) {
        defect(e, "MISSING_KEY", "license", "required key is absent");
    } else if (!it->is_string()) {
        defect(e, "WRONG_TYPE", "license", "expected a string");
    } else {
        e.license = it->get<std::string>();
    }

    if (auto it = j.find("quality_signals"); it != j.end()) {
        if (it->is_object()) {
            decode_signals(*it, e);
        } else if (it->is_null()) {
            e.quality_signals.reset();
        } else {
            defect(e, "WRONG_TYPE", "quality_signals", "expected an object");
        }
    }

    if (auto it = j.find("content_image"); it == j.end()) {
        defect(e, "MISSING_KEY", "content_image", "required key is absent");
    } else if (!it->is_array()) {
        defect(e, "WRONG_TYPE", "content_image", "expected an array of strings");
    } else {
        for (size_t i = 0; i < it->size(); ++i) {
            const Json& el = (*it)[i];
            if (el.is_string()) {
                e.content_image.push_back(el.get<std::string>());
            } else {
                defect(e, "WRONG_TYPE", "content_image[" + std::to_string(i) + "]",
                       "expected a string");
            }
        }
    }

    if (auto it = j.find("md"); it == j.end()) {
        defect(e, "MISSING_KEY", "md", "required key is absent");
    } else if (!it->is_string()) {
        defect(e, "WRONG_TYPE", "md", "expected a string");
    } else {
        e.md = it->get<std::string>();
    }

    if (auto it = j.find("overall_image"); it == j.end()) {
        defect(e, "MISSING_KEY", "overall_image", "required key is absent");
    } else if (it->is_string()) {
        e.overall_image_was_scalar = true;
        std::string v = it->get<std::string>();
        if (!v.empty()) e.overall_image.push_back(std::move(v));
    } else if (it->is_array()) {
        e.overall_image_was_scalar = false;
        for (size_t i = 0; i < it->size(); ++i) {
            const Json& el = (*it)[i];
            if (el.is_string()) {
                e.overall_image.push_back(el.get<std::string>());
            } else {
                defect(e, "WRONG_TYPE", "overall_image[" + std::to_string(i) + "]",
                       "expected a string");
            }
        }
    } else {
        defect(e, "WRONG_TYPE", "overall_image", "expected a string or array of strings");
    }

    for (const auto& [k, v] : j.items()) {
        if (!known_key(kTopKeys, k)) e.extra_fields.emplace_back(k, v);
    }
    return e;
}

Json encode_entry(const PinEntry& e) {
    Json j = Json::object();
    j["id"] = e.id;

    Json m = Json::object();
    m["language"] = e.meta.language;
    m["oi_exist"] = e.meta.oi_exist;
    m["oi_source"] = to_string(e.meta.oi_source);
    m["source_dataset"] = e.meta.source_dataset;
    m["ori_meta"] = e.meta.ori_meta;
    if (e.meta.doc_id.is_string) {
        m["doc_id"] = e.meta.doc_id.str;
    } else {
        m["doc_id"] = e.meta.doc_id.num;
    }
    if (e.meta.page_id.has_value()) {
        m["page_id"] = *e.meta.page_id;
    } else {
        m["page_id"] = nullptr;
    }
    m["date_download"] = e.meta.date_download;
    for (const auto& [k, v] : e.extra_meta_fields) m[k] = v;
    j["meta"] = std::move(m);

    j["license"] = e.license;

    if (e.quality_signals.has_value()) {
        const QualitySignals& s = *e.quality_signals;
        Json q = Json::object();
        QualitySignals& mut = const_cast<QualitySignals&>(s);
        for (int idx = 0; idx < QualitySignals::kFieldCount; ++idx) {
            if (!s.has(idx)) continue;
            if (signal_field_is_real(idx)) {
                q[kSignalKeys[idx]] = *signal_real_field(mut, idx);
            } else {
                q[kSignalKeys[idx]] = *signal_int_field(mut, idx);
            }
        }
        for (const auto& [k, v] : s.extra_fields) q[k] = v;
        j["quality_signals"] = std::move(q);
    }

    j["content_image"] = e.content_image;
    j["md"] = e.md;

    if (e.overall_image_was_scalar && e.overall_image.empty()) {
        j["overall_image"] = "";
    } else if (e.overall_image_was_scalar && e.overall_image.size() == 1) {
        j["overall_image"] = e.overall_image[0];
    } else {
        j["overall_image"] = e.overall_image;
    }

    for (const auto& [k, v] : e.extra_fields) j[k] = v;
    return j;
}

bool JsonlReader::next(ReadItem& item) {
    while (std::getline(in_, buf_)) {
        ++line_number_;
        std::string_view line = buf_;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;  // blank lines carry no record
        item = ReadItem{};
        Json j = Json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            item.error = ReadError{line_number_, "invalid JSON"};
        } else if (!j.is_object()) {
            item.error = ReadError{line_number_, "line is not a JSON object"};
        } else {
            item.entry = decode_entry(j);
        }
        return true;
    }
    return false;
}

void JsonlWriter::write(const PinEntry& e) {
    std::string line = encode_entry(e).dump();
    line += '\n';
    out_.write(line.data(), static_cast<std::streamsize>(line.size()));
    if (!out_) {
        throw std::runtime_error("write failed after " + std::to_string(count_) + " lines");
    }
    ++count_;
}

std::vector<ReadItem> read_entries(std::istream& in) {
    std::vector<ReadItem> items;
    JsonlReader reader(in);
    ReadItem item;
    while (reader.next(item)) items.push_back(std::move(item));
    return items;
}

int64_t write_entries(const std::vector<PinEntry>& entries, std::ostream& out) {
    JsonlWriter writer(out);
    for (const auto& e : entries) writer.write(e);
    return writer.count();
}

bool entries_equal(const PinEntry& a, const PinEntry& b) {
    auto signals_equal = [](const std::optional<QualitySignals>& x,
                            const std::optional<QualitySignals>& y) {
        if (x.has_value() != y.has_value()) return false;
        if (!x.has_value()) return true;
        return x->image_text_interleaving_count == y->image_text_interleaving_count &&
               x->text_block_count == y->text_block_count &&
               x->total_token_count == y->total_token_count &&
               x->doc_length == y->doc_length &&
               x->avg_tokens_per_text_block == y->avg_tokens_per_text_block &&
               x->avg_text_block_length == y->avg_text_block_length &&
               x->bold_char_count == y->bold_char_count &&
               x->italic_char_count == y->italic_char_count &&
               x->title_count == y->title_count && x->present == y->present &&
               x->extra_fields == y->extra_fields;
    };
    return a.id == b.id && a.meta.language == b.meta.language &&
           a.meta.oi_exist == b.meta.oi_exist && a.meta.oi_source == b.meta.oi_source &&
           a.meta.source_dataset == b.meta.source_dataset &&
           a.meta.ori_meta == b.meta.ori_meta && a.meta.doc_id == b.meta.doc_id &&
           a.meta.page_id == b.meta.page_id &&
           a.meta.date_download == b.meta.date_download && a.license == b.license &&
           signals_equal(a.quality_signals, b.quality_signals) && a.md == b.md &&
           a.content_image == b.content_image && a.overall_image == b.overall_image &&
           a.overall_image_was_scalar == b.overall_image_was_scalar &&
           a.extra_fields == b.extra_fields && a.extra_meta_fields == b.extra_meta_fields;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

constexpr std::array<std::pair<ViolationCode, const char*>, 10> kViolationNames = {{
    {ViolationCode::kMissingKey, "MISSING_KEY"},
    {ViolationCode::kWrongType, "WRONG_TYPE"},
    {ViolationCode::kOiInconsistent, "OI_INCONSISTENT"},
    {ViolationCode::kBadOiSource, "BAD_OI_SOURCE"},
    {ViolationCode::kImageMismatch, "IMAGE_MISMATCH"},
    {ViolationCode::kBadDate, "BAD_DATE"},
    {ViolationCode::kBadPageId, "BAD_PAGE_ID"},
    {ViolationCode::kMissingFile, "MISSING_FILE"},
    {ViolationCode::kDuplicateId, "DUPLICATE_ID"},
    {ViolationCode::kUnknownKey, "UNKNOWN_KEY"},
}};

bool valid_date(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    for (size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
        if (s[i] < '0' || s[i] > '9') return false;
    }
    int month = (s[5] - '0') * 10 + (s[6] - '0');
    int day = (s[8] - '0') * 10 + (s[9] - '0');
    return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

bool defect_mentions(const PinEntry& e, std::string_view field) {
    for (const auto& d : e.decode_defects) {
        if (d.field == field) return true;
    }
    return false;
}

}  // namespace

const char* to_string(ViolationCode c) {
    for (const auto& [code, name] : kViolationNames) {
        if (code == c) return name;
    }
    return "UNKNOWN";
}

std::optional<ViolationCode> violation_code_from_string(std::string_view s) {
    for (const auto& [code, name] : kViolationNames) {
        if (s == name) return code;
    }
    return std::nullopt;
}

ValidationReport validate_entry(const PinEntry& entry, const ValidateOptions& options) {
    ValidationReport rep;
    auto add = [&](ViolationCode c, std::string field, std::string message,
                   bool warning = false) {
        rep.violations.push_back({c, std::move(field), std::move(message), warning});
    };

    for (const auto& d : entry.decode_defects) {
        auto code = violation_code_from_string(d.code);
        add(code.value_or(ViolationCode::kWrongType), d.field, d.message,
            code == ViolationCode::kUnknownKey);
    }

    bool has_oi = false;
    for (const auto& p : entry.overall_image) {
        if (!p.empty()) has_oi = true;
    }
    if (entry.meta.oi_exist && !has_oi) {
        add(ViolationCode::kOiInconsistent, "meta.oi_exist",
            "oi_exist is true but no overall image path is set");
    } else if (!entry.meta.oi_exist && has_oi) {
        add(ViolationCode::kOiInconsistent, "meta.oi_exist",
            "oi_exist is false but overall image paths are present");
    }

    std::vector<std::string> refs = extract_image_refs(entry.md);
    if (refs != entry.content_image && !defect_mentions(entry, "content_image")) {
        std::string message;
        if (refs.size() != entry.content_image.size()) {
            message = "md holds " + std::to_string(refs.size()) +
                      " image tags but content_image lists " +
                      std::to_string(entry.content_image.size());
        } else {
            size_t i = 0;
            while (refs[i] == entry.content_image[i]) ++i;
            message = "content_image[" + std::to_string(i) + "] is \"" +
                      entry.content_image[i] + "\" but md tag " + std::to_string(i) +
                      " references \"" + refs[i] + "\"";
        }
        add(ViolationCode::kImageMismatch, "content_image", std::move(message));
    }

    if (!defect_mentions(entry, "meta.date_download") &&
        !valid_date(entry.meta.date_download)) {
        add(ViolationCode::kBadDate, "meta.date_download",
            "expected YYYY-MM-DD, got \"" + entry.meta.date_download + "\"");
    }

    if (entry.meta.page_id.has_value() && *entry.meta.page_id < 0) {
        add(ViolationCode::kBadPageId, "meta.page_id", "page_id must be non-negative");
    }

    if (options.check_files) {
        auto check = [&](const std::string& rel, const std::string& field) {
            fs::path p = fs::path(options.root) / rel;
            if (rel.empty() || !fs::exists(p)) {
                add(ViolationCode::kMissingFile, field,
                    "file not found: " + p.string());
            }
        };
        for (size_t i = 0; i < entry.content_image.size(); ++i) {
            check(entry.content_image[i], "content_image[" + std::to_string(i) + "]");
        }
        for (size_t i = 0; i < entry.overall_image.size(); ++i) {
            check(entry.overall_image[i], "overall_image[" + std::to_string(i) + "]");
        }
    }

    if (options.strict) {
        for (const auto& [k, v] : entry.extra_fields) {
            add(ViolationCode::kUnknownKey, k, "unrecognized key", true);
        }
        for (const auto& [k, v] : entry.extra_meta_fields) {
            add(ViolationCode::kUnknownKey, "meta." + k, "unrecognized key", true);
        }
    }
    return rep;
}

ValidationReport DatasetValidator::validate_next(const PinEntry& entry) {
    ValidationReport rep = validate_entry(entry, options_);
    rep.ordinal = ordinal_++;
    if (options_.strict) {
        bool dup = std::find(seen_ids_.begin(), seen_ids_.end(), entry.id) != seen_ids_.end();
        if (dup) {
            rep.violations.push_back({ViolationCode::kDuplicateId, "id",
                                      "id " + std::to_string(entry.id) +
                                          " already appeared in this dataset",
                                      false});
        } else {
            seen_ids_.push_back(entry.id);
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Partitioning
// ---------------------------------------------------------------------------

Json PartitionManifest::to_json() const {
    Json j = Json::object();
    j["max_per_part"] = max_per_part;
    j["total_entries"] = total_entries;
    Json arr = Json::array();
    for (const auto& p : parts) {
        Json pj = Json::object();
        pj["name"] = p.name;
        pj["jsonl_path"] = p.jsonl_path;
        pj["content_image_dir"] = p.content_image_dir;
        pj["overall_image_dir"] = p.overall_image_dir;
        pj["entry_count"] = p.entry_count;
        pj["complete"] = p.complete;
        arr.push_back(std::move(pj));
    }
    j["parts"] = std::move(arr);
    return j;
}

PartitionManifest PartitionManifest::from_json(const Json& j) {
    PartitionManifest m;
    m.max_per_part = j.value("max_per_part", int64_t{0});
    m.total_entries = j.value("total_entries", int64_t{0});
    if (auto it = j.find("parts"); it != j.end() && it->is_array()) {
        for (const Json& pj : *it) {
            PartInfo p;
            p.name = pj.value("name", std::string());
            p.jsonl_path = pj.value("jsonl_path", std::string());
            p.content_image_dir = pj.value("content_image_dir", std::string());
            p.overall_image_dir = pj.value("overall_image_dir", std::string());
            p.entry_count = pj.value("entry_count", int64_t{0});
            p.complete = pj.value("complete", false);
            m.parts.push_back(std::move(p));
        }
    }
    return m;
}

namespace {

std::string part_name(int64_t index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "part%02lld", static_cast<long long>(index));
    return buf;
}

std::string part_local(const std::string& dir, const std::string& original) {
    std::string base = fs::path(original).filename().string();
    return dir + "/" + base;
}

}  // namespace

PartitionManifest partition_dataset(const std::vector<PinEntry>& entries,
                                    const PartitionOptions& options,
                                    const std::string& root) {
    if (options.max_per_part < 1) {
        throw std::invalid_argument("max_per_part must be at least 1");
    }
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) throw std::runtime_error("cannot create " + root + ": " + ec.message());

    PartitionManifest manifest;
    manifest.max_per_part = options.max_per_part;
    manifest.total_entries = static_cast<int64_t>(entries.size());

    auto copy_in = [&](const std::string& original, const fs::path& dest) {
        fs::path src = fs::path(original).is_absolute()
                           ? fs::path(original)
                           : fs::path(options.source_root) / original;
        if (!fs::exists(src)) return;
        std::error_code cec;
        fs::copy_file(src, dest, fs::copy_options::overwrite_existing, cec);
        if (cec) {
            throw std::runtime_error("cannot copy " + src.string() + ": " + cec.message());
        }
    };

    size_t taken = 0;
    int64_t part_index = 0;
    while (taken < entries.size()) {
        std::string name = part_name(part_index++);
        fs::path part_dir = fs::path(root) / name;
        fs::create_directories(part_dir / "content_image", ec);
        fs::create_directories(part_dir / "overall_image", ec);
        if (ec) throw std::runtime_error("cannot create part directories: " + ec.message());

        fs::path jsonl = part_dir / (name + ".jsonl");
        std::ofstream out(jsonl, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open " + jsonl.string());
        JsonlWriter writer(out);

        size_t end = std::min(entries.size(), taken + static_cast<size_t>(options.max_per_part));
        for (size_t i = taken; i < end; ++i) {
            PinEntry e = entries[i];
            std::unordered_map<std::string, std::string> renamed;
            for (auto& p : e.content_image) {
                std::string local = part_local("content_image", p);
                if (local != p) {
                    renamed.emplace(p, local);
                    if (options.copy_images) copy_in(p, part_dir / local);
                    p = local;
                } else if (options.copy_images) {
                    copy_in(p, part_dir / local);
                }
            }
            for (auto& p : e.overall_image) {
                std::string local = part_local("overall_image", p);
                if (options.copy_images) copy_in(p, part_dir / local);
                p = local;
            }
            if (!renamed.empty()) {
                e.md = rewrite_image_refs(e.md, [&](const std::string& old) {
                    auto it = renamed.find(old);
                    return it == renamed.end() ? old : it->second;
                });
            }
            writer.write(e);
        }
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + jsonl.string());

        PartInfo info;
        info.name = name;
        info.jsonl_path = name + "/" + name + ".jsonl";
        info.content_image_dir = name + "/content_image";
        info.overall_image_dir = name + "/overall_image";
        info.entry_count = static_cast<int64_t>(end - taken);
        info.complete = info.entry_count == options.max_per_part;
        manifest.parts.push_back(std::move(info));
        taken = end;
    }

    fs::path manifest_path = fs::path(root) / "manifest.json";
    std::ofstream mout(manifest_path, std::ios::binary);
    if (!mout) throw std::runtime_error("cannot open " + manifest_path.string());
    mout << manifest.to_json().dump(2) << "\n";
    if (!mout) throw std::runtime_error("write failed for " + manifest_path.string());
    return manifest;
}

PartitionManifest load_manifest(const std::string& root) {
    fs::path path = fs::path(root) / "manifest.json";
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    Json j = Json::parse(in, nullptr, false);
    if (j.is_discarded()) throw std::runtime_error("invalid manifest: " + path.string());
    return PartitionManifest::from_json(j);
}

// ---------------------------------------------------------------------------
// Document assembly
// ---------------------------------------------------------------------------

std::string assemble_document_sequence(const std::vector<PinEntry>& entries) {
    if (entries.empty()) throw std::invalid_argument("no entries to assemble");
    const DocId& doc_id = entries[0].meta.doc_id;
    for (const auto& e : entries) {
        if (!(e.meta.doc_id == doc_id)) {
            throw std::invalid_argument("entries mix doc_id " + doc_id.display() +
                                        " and " + e.meta.doc_id.display());
        }
        if (!e.meta.page_id.has_value() && entries.size() > 1) {
            throw std::invalid_argument("null page_id in a multi-page document");
        }
    }
    std::vector<size_t> order(entries.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return entries[a].meta.page_id.value_or(0) < entries[b].meta.page_id.value_or(0);
    });
    for (size_t i = 1; i < order.size(); ++i) {
        if (entries[order[i]].meta.page_id == entries[order[i - 1]].meta.page_id) {
            throw std::invalid_argument(
                "duplicate page_id " +
                std::to_string(entries[order[i]].meta.page_id.value_or(0)));
        }
    }
    std::string out = "[BOD]";
    for (size_t idx : order) {
        out += "[BOP]";
        out += entries[idx].md;
        out += "[EOP]";
    }
    out += "[EOD]";
    return out;
}

}  // namespace pin

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

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pin/model.hpp"

namespace pin {

// ---------------------------------------------------------------------------
// JSONL streaming
// ---------------------------------------------------------------------------

struct ReadError {
    int64_t line_number = 0;  // 1-based
    std::string message;
};

/// One item of a JSONL stream: a decoded entry or a per-line decode error.
/// Errors never abort the stream.
struct ReadItem {
    std::optional<PinEntry> entry;
    std::optional<ReadError> error;
    bool ok() const { return entry.has_value(); }
};

/// Decodes one parsed JSON object into an entry. Lenient: missing or
/// wrong-typed known keys become decode_defects, unknown keys are preserved
/// verbatim for round-trip.
PinEntry decode_entry(const Json& j);

/// Canonical JSON form: top-level key order id, meta, license,
/// quality_signals, content_image, md, overall_image; meta and signal keys in
/// schema order; preserved unknown keys re-emitted after the known ones.
Json encode_entry(const PinEntry& e);

class JsonlReader {
public:
    explicit JsonlReader(std::istream& in) : in_(in) {}

    /// Advances to the next line; false at end of stream.
    bool next(ReadItem& item);

    int64_t line_number() const { return line_number_; }

private:
    std::istream& in_;
    int64_t line_number_ = 0;
    std::string buf_;
};

class JsonlWriter {
public:
    explicit JsonlWriter(std::ostream& out) : out_(out) {}

    /// Writes one entry as a single LF-terminated line. Throws
    /// std::runtime_error on sink failure; count() stays at the lines
    /// durably written.
    void write(const PinEntry& e);

    int64_t count() const { return count_; }

private:
    std::ostream& out_;
    int64_t count_ = 0;
};

/// Reads a whole stream; convenience over JsonlReader.
std::vector<ReadItem> read_entries(std::istream& in);

/// Writes all entries; returns the count written.
int64_t write_entries(const std::vector<PinEntry>& entries, std::ostream& out);

bool entries_equal(const PinEntry& a, const PinEntry& b);

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

enum class ViolationCode {
    kMissingKey,      // required key absent
    kWrongType,       // key present with the wrong JSON type
    kOiInconsistent,  // oi_exist disagrees with overall_image content
    kBadOiSource,     // oi_source outside {ori, compiling}
    kImageMismatch,   // content_image does not mirror the md image tags
    kBadDate,         // date_download not YYYY-MM-DD
    kBadPageId,       // page_id negative or wrong type
    kMissingFile,     // referenced image absent under the dataset root
    kDuplicateId,     // id seen before in this dataset (strict)
    kUnknownKey,      // unrecognized key (strict; warning severity)
};

const char* to_string(ViolationCode c);
std::optional<ViolationCode> violation_code_from_string(std::string_view s);

struct Violation {
    ViolationCode code = ViolationCode::kMissingKey;
    std::string field;
    std::string message;
    bool warning = false;
};

struct ValidationReport {
    int64_t ordinal = 0;
    std::vector<Violation> violations;

    /// True when no error-severity violation is present.
    bool accepted() const {
        for (const auto& v : violations) {
            if (!v.warning) return false;
        }
        return true;
    }
};

struct ValidateOptions {
    bool strict = false;
    bool check_files = false;
    std::string root;  // base for check_files resolution
};

/// Schema and consistency checks for one entry. Violations are data, not
/// failures; the report lists decode defects first, then semantic checks in a
/// fixed order.
ValidationReport validate_entry(const PinEntry& entry, const ValidateOptions& options = {});

/// Streaming validator that additionally enforces dataset-wide rules
/// (duplicate ids in strict mode) and numbers the reports.
class DatasetValidator {
public:
    explicit DatasetValidator(ValidateOptions options) : options_(std::move(options)) {}

    ValidationReport validate_next(const PinEntry& entry);

    /// Repoints file-existence checks; partitioned datasets store image paths
    /// relative to each part directory, so callers switch roots between parts
    /// while keeping the duplicate-id state.
    void set_root(std::string root) { options_.root = std::move(root); }

private:
    ValidateOptions options_;
    int64_t ordinal_ = 0;
    std::vector<int64_t> seen_ids_;
};

// ---------------------------------------------------------------------------
// Partitioning
// ---------------------------------------------------------------------------

struct PartInfo {
    std::string name;  // "part00", "part01", ...
    std::string jsonl_path;
    std::string content_image_dir;
    std::string overall_image_dir;
    int64_t entry_count = 0;
    bool complete = false;  // holds exactly max_per_part entries
};

struct PartitionManifest {
    int64_t max_per_part = 0;
    int64_t total_entries = 0;
    std::vector<PartInfo> parts;

    Json to_json() const;
    static PartitionManifest from_json(const Json& j);
};

struct PartitionOptions {
    int64_t max_per_part = 1000;
    // When set, image files are copied from source_root into each part's
    // image directories.
    std::string source_root;
    bool copy_images = false;
};

/// Lays entries out as root/partNN/{content_image/, overall_image/,
/// partNN.jsonl} in order, rewrites image paths to be part-relative, and
/// writes manifest.json at the root. Throws std::runtime_error on filesystem
/// failure.
PartitionManifest partition_dataset(const std::vector<PinEntry>& entries,
                                    const PartitionOptions& options,
                                    const std::string& root);

/// Loads manifest.json from a dataset root.
PartitionManifest load_manifest(const std::string& root);

// ---------------------------------------------------------------------------
// Document assembly
// ---------------------------------------------------------------------------

/// Concatenates the pages of one document into a special-token sequence:
/// "[BOD]" + ("[BOP]" + md + "[EOP]") per page sorted by page_id + "[EOD]".
/// A null page_id is allowed only for a single-entry document. Throws
/// std::invalid_argument on empty input, mixed doc_id, duplicate page_id, or
/// a null page_id among several pages.
std::string assemble_document_sequence(const std::vector<PinEntry>& entries);

}  // namespace pin

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
//
// pinforge: command-line front end for the paired-and-interleaved document
// toolkit. Exit codes: 0 success, 1 validation/data errors, 2 environment/IO
// errors, 3 bad usage.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "pin/config.hpp"
#include "pin/convert.hpp"
#include "pin/io.hpp"
#include "pin/pagination.hpp"
#include "pin/render.hpp"
#include "pin/signals.hpp"
#include "pin/stats.hpp"

namespace fs = std::filesystem;
using namespace pin;

namespace {

// Thrown by handlers to end the run with a specific exit code.
struct ExitWith {
    int code;
    std::string message;
};

[[noreturn]] void die(int code, std::string message) {
    throw ExitWith{code, std::move(message)};
}

struct GlobalFlags {
    bool json = false;
    bool dry_run = false;
    int jobs = 0;  // 0 = unset
};

int effective_jobs(const GlobalFlags& g, const Config& cfg) {
    int j = g.jobs > 0 ? g.jobs : cfg.jobs;
    if (j <= 0) j = static_cast<int>(std::thread::hardware_concurrency());
    return j > 0 ? j : 1;
}

void emit_summary(const GlobalFlags& g, const Json& summary, const std::string& human,
                  bool content_on_stdout = false) {
    if (g.json) {
        std::cout << summary.dump() << "\n";
    } else if (content_on_stdout) {
        std::cerr << human << "\n";
    } else {
        std::cout << human << "\n";
    }
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) die(2, "cannot open " + path);
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) die(2, "cannot write " + path);
    return out;
}

std::vector<PinEntry> load_entries(const std::string& path) {
    std::ifstream in = open_input(path);
    std::vector<PinEntry> entries;
    JsonlReader reader(in);
    ReadItem item;
    while (reader.next(item)) {
        if (item.error) {
            die(1, path + ":" + std::to_string(item.error->line_number) + ": " +
                       item.error->message);
        }
        entries.push_back(std::move(*item.entry));
    }
    return entries;
}

Tokenizer make_tokenizer(const std::string& vocab) {
    if (vocab.empty()) return Tokenizer::whitespace();
    try {
        return Tokenizer::from_vocabulary_file(vocab);
    } catch (const std::runtime_error& e) {
        die(2, e.what());
    }
}

Theme theme_from_string(const std::string& name) {
    if (name == "gfm-light") return Theme::kGfmLight;
    die(3, "unknown theme: " + name);
}

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') {
            out += "'\\''";
        } else {
            out += c;
        }
    }
    out += "'";
    return out;
}

std::string self_path(const char* argv0) {
    std::error_code ec;
    fs::path p = fs::read_symlink("/proc/self/exe", ec);
    if (!ec) return p.string();
    return argv0;
}

constexpr char kPngStub[] = "\x89PNG\r\n\x1a\n0123456789abcdef";

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

struct ValidateArgs {
    std::string root;
    bool strict = false;
    bool check_files = false;
};

std::vector<fs::path> find_part_files(const fs::path& root) {
    std::vector<fs::path> files;
    std::error_code ec;
    // Prefer the manifest's file list; fall back to a directory scan.
    if (fs::exists(root / "manifest.json", ec)) {
        try {
            PartitionManifest manifest = load_manifest(root.string());
            for (const PartInfo& part : manifest.parts) {
                files.push_back(root / part.jsonl_path);
            }
            return files;
        } catch (const std::exception&) {
            files.clear();
        }
    }
    for (const auto& ent : fs::directory_iterator(root, ec)) {
        if (!ent.is_directory()) continue;
        std::string name = ent.path().filename().string();
        if (name.rfind("part", 0) != 0) continue;
        fs::path jsonl = ent.path() / (name + ".jsonl");
        if (fs::exists(jsonl)) files.push_back(jsonl);
    }
    std::sort(files.begin(), files.end());
    return files;
}

int cmd_validate(const ValidateArgs& a, const GlobalFlags& g) {
    if (!fs::exists(a.root)) die(2, "dataset root not found: " + a.root);
    std::vector<fs::path> files = find_part_files(a.root);
    if (files.empty()) die(2, "no part jsonl files under " + a.root);

    DatasetValidator validator(ValidateOptions{a.strict, a.check_files, a.root});
    std::map<std::string, int64_t> code_counts;
    int64_t entries = 0, errors = 0, warnings = 0, parse_errors = 0;
    for (const fs::path& file : files) {
        validator.set_root(file.parent_path().string());
        std::ifstream in = open_input(file.string());
        JsonlReader reader(in);
        ReadItem item;
        while (reader.next(item)) {
            if (item.error) {
                ++parse_errors;
                std::cerr << file.string() << ":" << item.error->line_number << ": "
                          << item.error->message << "\n";
                continue;
            }
            ++entries;
            ValidationReport report = validator.validate_next(*item.entry);
            for (const Violation& v : report.violations) {
                ++code_counts[to_string(v.code)];
                if (v.warning) {
                    ++warnings;
                } else {
                    ++errors;
                }
            }
        }
    }

    Json codes = Json::object();
    std::string human;
    for (const auto& [code, count] : code_counts) {
        codes[code] = count;
        human += code + " " + std::to_string(count) + "\n";
    }
    human += "entries " + std::to_string(entries) + ", errors " + std::to_string(errors) +
             ", warnings " + std::to_string(warnings);
    Json summary{{"command", "validate"},
                 {"files", files.size()},
                 {"entries", entries},
                 {"errors", errors},
                 {"warnings", warnings},
                 {"parse_errors", parse_errors},
                 {"codes", codes}};
    emit_summary(g, summary, human);
    return errors + parse_errors > 0 ? 1 : 0;
}

// ---------------------------------------------------------------------------
// signals
// ---------------------------------------------------------------------------

struct SignalsArgs {
    std::string in;
    std::string out;
    std::string vocab;
};

int cmd_signals(const SignalsArgs& a, const GlobalFlags& g, const Config& cfg) {
    Tokenizer tok = make_tokenizer(a.vocab);
    if (a.out.empty() && !g.dry_run) die(3, "--out is required unless --dry-run is set");
    std::ifstream in = open_input(a.in);
    std::ofstream out;
    if (!g.dry_run) out = open_output(a.out);

    int jobs = effective_jobs(g, cfg);
    int64_t processed = 0;
    int64_t line_no = 0;
    std::string line;
    std::vector<std::string> batch;
    std::vector<int64_t> batch_lines;
    std::vector<std::string> results;
    std::vector<std::string> batch_errors;

    auto flush = [&] {
        if (batch.empty()) return;
        results.assign(batch.size(), {});
        batch_errors.assign(batch.size(), {});
        auto work_range = [&](size_t i) {
            try {
                PinEntry e = decode_entry(Json::parse(batch[i]));
                e.quality_signals = compute_signals(e, tok);
                results[i] = encode_entry(e).dump();
            } catch (const std::exception& ex) {
                batch_errors[i] = ex.what();
            }
        };
        if (jobs <= 1) {
            for (size_t i = 0; i < batch.size(); ++i) work_range(i);
        } else {
            std::atomic<size_t> cursor{0};
            auto worker = [&] {
                for (size_t i; (i = cursor.fetch_add(1)) < batch.size();) work_range(i);
            };
            std::vector<std::thread> pool;
            for (int w = 1; w < jobs; ++w) pool.emplace_back(worker);
            worker();
            for (std::thread& t : pool) t.join();
        }
        for (size_t i = 0; i < batch.size(); ++i) {
            if (!batch_errors[i].empty()) {
                die(1, a.in + ":" + std::to_string(batch_lines[i]) + ": " + batch_errors[i]);
            }
            if (!g.dry_run) {
                out << results[i] << "\n";
                if (!out) die(2, "cannot write " + a.out);
            }
        }
        processed += static_cast<int64_t>(batch.size());
        batch.clear();
        batch_lines.clear();
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        batch.push_back(line);
        batch_lines.push_back(line_no);
        if (batch.size() >= 512) flush();
    }
    flush();

    Json summary{{"command", "signals"},
                 {"processed", processed},
                 {"tokenizer", tok.identity()},
                 {"jobs", jobs}};
    emit_summary(g, summary, "processed " + std::to_string(processed) + " entries");
    return 0;
}

// ---------------------------------------------------------------------------
// paginate
// ---------------------------------------------------------------------------

struct PaginateArgs {
    std::string in;
    std::string out;
    PageParams page;
};

int cmd_paginate(const PaginateArgs& a, const GlobalFlags& g) {
    if (!a.page.valid()) die(3, "page parameters are inconsistent");
    if (a.out.empty() && !g.dry_run) die(3, "--out is required unless --dry-run is set");
    std::vector<PinEntry> entries = load_entries(a.in);

    std::ofstream sink;
    if (!g.dry_run) sink = open_output(a.out);
    JsonlWriter writer(sink);
    int64_t docs = 0, pages = 0;
    for (const PinEntry& e : entries) {
        std::vector<PinEntry> split;
        try {
            split = paginate_entry(e, a.page);
        } catch (const std::invalid_argument& ex) {
            die(1, "entry id " + std::to_string(e.id) + ": " + ex.what());
        }
        ++docs;
        pages += static_cast<int64_t>(split.size());
        if (!g.dry_run) {
            for (const PinEntry& page : split) writer.write(page);
        }
    }

    Json summary{{"command", "paginate"}, {"docs", docs}, {"pages", pages}};
    emit_summary(g, summary,
                 std::to_string(docs) + " docs -> " + std::to_string(pages) + " pages");
    return 0;
}

// ---------------------------------------------------------------------------
// convert
// ---------------------------------------------------------------------------

struct ConvertArgs {
    std::string from;
    std::string in;
    std::string out;
    std::string source_dataset = "converted";
    std::string language = "en";
    std::string license;
    std::string date = "1970-01-01";
    int64_t start_id = 0;
    std::string tmpl = "{image}\n\n{text}";
    double gutter_frac = 0.05;
};

int cmd_convert(const ConvertArgs& a, const GlobalFlags& g, const Config& cfg) {
    if (a.out.empty() && !g.dry_run) die(3, "--out is required unless --dry-run is set");
    std::ofstream sink;
    if (!g.dry_run) sink = open_output(a.out);
    JsonlWriter writer(sink);

    ConvertOptions base;
    base.language = a.language;
    base.source_dataset = a.source_dataset;
    base.license = a.license;
    base.date_download = a.date;
    base.gutter_frac = a.gutter_frac;

    int64_t converted = 0;
    std::vector<std::string> warnings;
    auto emit = [&](const PinEntry& e) {
        for (const std::string& w : warnings) {
            std::cerr << "warning: entry " << e.id << ": " << w << "\n";
        }
        warnings.clear();
        if (!g.dry_run) writer.write(e);
        ++converted;
    };
    auto opts_for = [&](int64_t ordinal) {
        ConvertOptions o = base;
        o.id = a.start_id + ordinal;
        o.doc_id = o.id;
        return o;
    };

    try {
        if (a.from == "text") {
            std::ifstream in = open_input(a.in);
            std::ostringstream buf;
            buf << in.rdbuf();
            for (const PinEntry& e : from_text_document(buf.str(), opts_for(0), cfg.page)) {
                emit(e);
            }
        } else {
            std::ifstream in = open_input(a.in);
            std::string line;
            int64_t ordinal = 0, line_no = 0;
            while (std::getline(in, line)) {
                ++line_no;
                if (line.empty()) continue;
                Json j;
                try {
                    j = Json::parse(line);
                } catch (const Json::parse_error& ex) {
                    die(1, a.in + ":" + std::to_string(line_no) + ": " + ex.what());
                }
                if (a.from == "interleaved-list") {
                    emit(from_interleaved_list(parse_interleaved_list(j),
                                               opts_for(ordinal), &warnings)
                             .entry);
                } else if (a.from == "layout") {
                    emit(from_layout_annotations(parse_layout_page(j), opts_for(ordinal),
                                                 &warnings)
                             .entry);
                } else {
                    ImageTextPair pair;
                    pair.image_path = j.value("image_path", j.value("image", ""));
                    pair.text = j.value("text", "");
                    emit(from_image_text_pair(pair, a.tmpl, opts_for(ordinal)).entry);
                }
                ++ordinal;
            }
        }
    } catch (const ConvertError& e) {
        die(1, std::string(e.code()) + ": " + e.what());
    }

    Json summary{{"command", "convert"}, {"from", a.from}, {"converted", converted}};
    emit_summary(g, summary, "converted " + std::to_string(converted) + " entries");
    return 0;
}

// ---------------------------------------------------------------------------
// render
// ---------------------------------------------------------------------------

struct RenderArgs {
    std::string in;
    std::string out;
    std::string root;
    std::string command;
    int timeout_ms = 30000;
    std::string theme = "gfm-light";
    bool force = false;
    bool mock = false;
    std::string mock_fail_marker;
    std::string self;
};

int cmd_render(const RenderArgs& a, const GlobalFlags& g, const Config& cfg) {
    RendererConfig rc;
    rc.command = a.command;
    rc.timeout_ms = a.timeout_ms;
    rc.theme = theme_from_string(a.theme);
    rc.force = a.force;
    rc.parallelism = effective_jobs(g, cfg);
    if (a.mock) {
        rc.command = shell_quote(a.self) + " mock-render";
        if (!a.mock_fail_marker.empty()) {
            rc.command += " --fail-marker " + shell_quote(a.mock_fail_marker);
        }
        rc.command += " '{input}' '{output}'";
    }
    if (rc.command.empty()) die(3, "--command or --mock is required");
    if (!rc.valid()) die(3, "renderer command needs {input} and {output}");
    if (a.out.empty() && !g.dry_run) die(3, "--out is required unless --dry-run is set");

    std::vector<PinEntry> entries = load_entries(a.in);
    if (g.dry_run) {
        int64_t eligible = 0;
        for (const PinEntry& e : entries) {
            if (!e.md.empty() && (!e.meta.oi_exist || a.force)) ++eligible;
        }
        Json summary{{"command", "render"},
                     {"entries", entries.size()},
                     {"would_render", eligible}};
        emit_summary(g, summary,
                     "would render " + std::to_string(eligible) + " of " +
                         std::to_string(entries.size()) + " entries");
        return 0;
    }

    std::error_code ec;
    fs::create_directories(a.root, ec);
    BatchRenderResult res = render_batch(entries, rc, a.root);
    for (const RenderFailure& f : res.failures) {
        std::cerr << "render failure: entry " << f.entry_id << " (index " << f.index
                  << ") " << to_string(f.kind) << ": " << f.message << "\n";
    }
    {
        std::ofstream sink = open_output(a.out);
        write_entries(res.entries, sink);
    }

    Json summary{{"command", "render"},
                 {"entries", entries.size()},
                 {"rendered", res.rendered},
                 {"skipped", res.skipped},
                 {"failed", res.failures.size()}};
    emit_summary(g, summary,
                 "rendered " + std::to_string(res.rendered) + ", skipped " +
                     std::to_string(res.skipped) + ", failed " +
                     std::to_string(res.failures.size()));
    return res.failures.empty() ? 0 : 1;
}

// ---------------------------------------------------------------------------
// stats
// ---------------------------------------------------------------------------

struct StatsArgs {
    std::string in;
    std::string out;
    std::string format = "csv";
    std::string by = "source_dataset";
    bool total = true;
    bool weighted = false;
    bool joint = false;
    int64_t sample = 10000;
    uint64_t seed = 0;
    int x_bins = 30;
    int y_bins = 30;
    std::string vocab;
};

int cmd_stats(const StatsArgs& a, const GlobalFlags& g) {
    ReportFormat format;
    if (a.format == "csv") {
        format = ReportFormat::kCsv;
    } else if (a.format == "json") {
        format = ReportFormat::kJson;
    } else if (a.format == "svg") {
        format = ReportFormat::kSvgScatter;
    } else {
        die(3, "unknown format: " + a.format);
    }
    if (a.by != "source_dataset" && a.by != "none") die(3, "--by must be source_dataset or none");
    if (a.sample < 1) die(3, "--sample must be at least 1");
    if (g.json && a.out.empty()) die(3, "--json requires --out so the report has a home");

    Tokenizer tok = make_tokenizer(a.vocab);
    std::vector<PinEntry> entries = load_entries(a.in);
    for (PinEntry& e : entries) {
        if (!e.quality_signals) e.quality_signals = compute_signals(e, tok);
    }

    std::vector<std::string> order;
    std::map<std::string, SubsetAccumulator> groups;
    for (const PinEntry& e : entries) {
        std::string key = a.by == "none" ? "all" : e.meta.source_dataset;
        auto [it, inserted] = groups.try_emplace(key, SubsetAccumulator(key));
        if (inserted) order.push_back(key);
        it->second.add(e);
    }
    Report report;
    for (const std::string& key : order) report.subsets.push_back(groups.at(key).finish());
    if (a.total && report.subsets.size() > 1) {
        report.subsets.push_back(aggregate_total(report.subsets, a.weighted));
    }
    bool need_joint = a.joint || format == ReportFormat::kSvgScatter;
    if (need_joint) {
        report.joint =
            joint_distribution(entries, a.sample, BinSpec{a.x_bins, a.y_bins}, a.seed);
    }

    std::string bytes = emit_report(report, format);
    bool to_stdout = a.out.empty();
    if (to_stdout) {
        std::cout << bytes;
    } else if (!g.dry_run) {
        open_output(a.out) << bytes;
    }

    Json summary{{"command", "stats"},
                 {"entries", entries.size()},
                 {"subsets", report.subsets.size()},
                 {"bytes", bytes.size()}};
    emit_summary(g, summary,
                 "aggregated " + std::to_string(entries.size()) + " entries into " +
                     std::to_string(report.subsets.size()) + " rows",
                 to_stdout);
    return 0;
}

// ---------------------------------------------------------------------------
// partition / assemble
// ---------------------------------------------------------------------------

struct PartitionArgs {
    std::string in;
    std::string root;
    int64_t part_size = 1000;
    bool copy_images = false;
    std::string source_root;
};

int cmd_partition(const PartitionArgs& a, const GlobalFlags& g) {
    if (a.part_size < 1) die(3, "--part-size must be at least 1");
    std::vector<PinEntry> entries = load_entries(a.in);
    int64_t n = static_cast<int64_t>(entries.size());
    int64_t parts = (n + a.part_size - 1) / a.part_size;
    if (!g.dry_run) {
        PartitionOptions options;
        options.max_per_part = a.part_size;
        options.copy_images = a.copy_images;
        options.source_root = a.source_root;
        PartitionManifest manifest = partition_dataset(entries, options, a.root);
        parts = static_cast<int64_t>(manifest.parts.size());
    }
    Json summary{{"command", "partition"}, {"entries", n}, {"parts", parts}};
    emit_summary(g, summary,
                 std::to_string(n) + " entries -> " + std::to_string(parts) + " parts");
    return 0;
}

struct AssembleArgs {
    std::string in;
    std::string out;
};

int cmd_assemble(const AssembleArgs& a, const GlobalFlags& g) {
    std::vector<PinEntry> entries = load_entries(a.in);
    std::vector<std::string> order;
    std::map<std::string, std::vector<PinEntry>> docs;
    for (PinEntry& e : entries) {
        std::string key = e.meta.doc_id.display();
        auto [it, inserted] = docs.try_emplace(key);
        if (inserted) order.push_back(key);
        it->second.push_back(std::move(e));
    }

    std::ofstream sink;
    bool to_stdout = a.out.empty();
    if (!to_stdout && !g.dry_run) sink = open_output(a.out);
    std::ostream& out = to_stdout ? std::cout : sink;
    int64_t documents = 0;
    for (const std::string& key : order) {
        std::string seq;
        try {
            seq = assemble_document_sequence(docs.at(key));
        } catch (const std::invalid_argument& ex) {
            die(1, "doc " + key + ": " + ex.what());
        }
        if (to_stdout || !g.dry_run) out << seq << "\n";
        ++documents;
    }
    Json summary{{"command", "assemble"}, {"documents", documents}};
    emit_summary(g, summary, "assembled " + std::to_string(documents) + " documents",
                 to_stdout);
    return 0;
}

// ---------------------------------------------------------------------------
// mock renderer (test hook)
// ---------------------------------------------------------------------------

struct MockRenderArgs {
    std::string input;
    std::string output;
    std::string fail_marker;
};

int cmd_mock_render(const MockRenderArgs& a) {
    std::ifstream in(a.input, std::ios::binary);
    if (!in) {
        std::cerr << "mock renderer: cannot read " << a.input << "\n";
        return 2;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (!a.fail_marker.empty() &&
        buf.str().find(a.fail_marker) != std::string::npos) {
        std::cerr << "mock renderer: marker present, refusing\n";
        return 1;
    }
    std::ofstream out(a.output, std::ios::binary);
    out.write(kPngStub, sizeof kPngStub - 1);
    if (!out) {
        std::cerr << "mock renderer: cannot write " << a.output << "\n";
        return 2;
    }
    return 0;
}

std::string prescan_config_path(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        std::string_view arg = argv[i];
        if (arg == "--config" && i + 1 < argc) return argv[i + 1];
        if (arg.rfind("--config=", 0) == 0) return std::string(arg.substr(9));
    }
    return "";
}

}  // namespace

int main(int argc, char** argv) {
    Config cfg;
    try {
        cfg = resolve_config(prescan_config_path(argc, argv));
    } catch (const std::exception& e) {
        std::cerr << "pinforge: " << e.what() << "\n";
        return 2;
    }

    CLI::App app{"Toolkit for paired-and-interleaved multimodal document datasets"};
    app.require_subcommand(1);

    GlobalFlags global;
    std::string config_path;
    app.add_option("--config", config_path,
                   "Config file (overrides $PIN_CONFIG and ./pin.toml)");
    app.add_flag("--json", global.json, "Emit a JSON run summary on stdout");
    app.add_flag("--dry-run", global.dry_run, "Skip all filesystem writes");
    app.add_option("--jobs", global.jobs, "Worker threads (0 = logical CPU count)")
        ->capture_default_str();

    ValidateArgs va;
    va.strict = cfg.strict;
    va.check_files = cfg.check_files;
    auto* validate = app.add_subcommand("validate", "Check a dataset root against the schema");
    validate->fallthrough();
    validate->add_option("root", va.root, "Dataset root directory")->required();
    validate->add_flag("--strict", va.strict, "Also check duplicate ids and unknown keys")
        ->capture_default_str();
    validate->add_flag("--check-files", va.check_files, "Verify referenced image files exist")
        ->capture_default_str();

    SignalsArgs sa;
    sa.vocab = cfg.tokenizer_mode == "vocabulary" ? cfg.tokenizer_vocab : "";
    auto* signals = app.add_subcommand("signals", "Compute quality signals for a JSONL file");
    signals->fallthrough();
    signals->add_option("--in", sa.in, "Input JSONL")->required();
    signals->add_option("--out", sa.out, "Output JSONL");
    signals->add_option("--vocab", sa.vocab, "Vocabulary file (default: whitespace tokenizer)")
        ->capture_default_str();

    PaginateArgs pa;
    pa.page = cfg.page;
    auto* paginate = app.add_subcommand("paginate", "Split entries into page-sized entries");
    paginate->fallthrough();
    paginate->add_option("--in", pa.in, "Input JSONL")->required();
    paginate->add_option("--out", pa.out, "Output JSONL");
    paginate->add_option("--n-line", pa.page.n_line, "Lines per page")->capture_default_str();
    paginate->add_option("--n-text", pa.page.n_text, "Characters per line")
        ->capture_default_str();
    paginate->add_option("--n-image", pa.page.n_image, "Lines an image occupies")
        ->capture_default_str();

    ConvertArgs ca;
    auto* convert = app.add_subcommand("convert", "Convert source corpora into entries");
    convert->fallthrough();
    convert->add_option("--from", ca.from, "Source kind")
        ->required()
        ->check(CLI::IsMember({"interleaved-list", "layout", "text", "pairs"}));
    convert->add_option("--in", ca.in, "Input file")->required();
    convert->add_option("--out", ca.out, "Output JSONL");
    convert->add_option("--source-dataset", ca.source_dataset, "meta.source_dataset value")
        ->capture_default_str();
    convert->add_option("--language", ca.language, "meta.language value")
        ->capture_default_str();
    convert->add_option("--license", ca.license, "license value")->capture_default_str();
    convert->add_option("--date", ca.date, "meta.date_download value (YYYY-MM-DD)")
        ->capture_default_str();
    convert->add_option("--start-id", ca.start_id, "First output id")->capture_default_str();
    convert->add_option("--template", ca.tmpl, "Pair template with {image} and {text}")
        ->capture_default_str();
    convert->add_option("--gutter-frac", ca.gutter_frac,
                        "Column gutter as a fraction of page width (layout)")
        ->capture_default_str();

    RenderArgs ra;
    ra.command = cfg.render_command;
    ra.timeout_ms = cfg.render_timeout_ms;
    ra.theme = cfg.render_theme;
    ra.self = self_path(argv[0]);
    auto* render = app.add_subcommand("render", "Produce overall images via an external renderer");
    render->fallthrough();
    render->add_option("--in", ra.in, "Input JSONL")->required();
    render->add_option("--out", ra.out, "Output JSONL with updated entries");
    render->add_option("--root", ra.root, "Dataset root for overall_image/")->required();
    render->add_option("--command", ra.command, "Renderer command with {input} and {output}")
        ->capture_default_str();
    render->add_option("--timeout-ms", ra.timeout_ms, "Per-render timeout")
        ->capture_default_str();
    render->add_option("--theme", ra.theme, "HTML theme")->capture_default_str();
    render->add_flag("--force", ra.force, "Re-render entries that already have an overall image");
    render->add_flag("--mock", ra.mock, "Use the built-in mock renderer (writes a stub PNG)");
    render->add_option("--mock-fail-marker", ra.mock_fail_marker,
                       "Mock renderer fails when the HTML contains this marker");

    StatsArgs ta;
    ta.seed = cfg.seed;
    auto* stats = app.add_subcommand("stats", "Aggregate signal statistics into a report");
    stats->fallthrough();
    stats->add_option("--in", ta.in, "Input JSONL")->required();
    stats->add_option("--out", ta.out, "Report file (default: stdout)");
    stats->add_option("--format", ta.format, "csv, json, or svg")
        ->capture_default_str()
        ->check(CLI::IsMember({"csv", "json", "svg"}));
    stats->add_option("--by", ta.by, "Grouping: source_dataset or none")
        ->capture_default_str();
    stats->add_flag("--total,!--no-total", ta.total, "Append the unweighted-mean total row")
        ->capture_default_str();
    stats->add_flag("--weighted", ta.weighted, "Document-weighted total row instead");
    stats->add_flag("--joint", ta.joint, "Include the image/token joint distribution");
    stats->add_option("--sample", ta.sample, "Joint distribution sample size")
        ->capture_default_str();
    stats->add_option("--seed", ta.seed, "Sampling seed")->capture_default_str();
    stats->add_option("--x-bins", ta.x_bins, "Histogram bins (images axis)")
        ->capture_default_str();
    stats->add_option("--y-bins", ta.y_bins, "Histogram bins (tokens axis)")
        ->capture_default_str();
    stats->add_option("--vocab", ta.vocab, "Vocabulary for entries lacking stored signals");

    PartitionArgs pta;
    pta.part_size = cfg.partition_size;
    auto* partition = app.add_subcommand("partition", "Lay entries out as a partNN dataset root");
    partition->fallthrough();
    partition->add_option("--in", pta.in, "Input JSONL")->required();
    partition->add_option("--root", pta.root, "Output dataset root")->required();
    partition->add_option("--part-size", pta.part_size, "Entries per part")
        ->capture_default_str();
    partition->add_flag("--copy-images", pta.copy_images, "Copy image files into the parts");
    partition->add_option("--source-root", pta.source_root, "Where to copy image files from");

    AssembleArgs aa;
    auto* assemble = app.add_subcommand("assemble", "Join page entries into token sequences");
    assemble->fallthrough();
    assemble->add_option("--in", aa.in, "Input JSONL of page entries")->required();
    assemble->add_option("--out", aa.out, "Output text file (default: stdout)");

    MockRenderArgs ma;
    auto* mock = app.add_subcommand("mock-render", "");
    mock->group("");  // internal test hook, hidden from help
    mock->add_option("input", ma.input)->required();
    mock->add_option("output", ma.output)->required();
    mock->add_option("--fail-marker", ma.fail_marker);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }

    try {
        if (*validate) return cmd_validate(va, global);
        if (*signals) return cmd_signals(sa, global, cfg);
        if (*paginate) return cmd_paginate(pa, global);
        if (*convert) return cmd_convert(ca, global, cfg);
        if (*render) return cmd_render(ra, global, cfg);
        if (*stats) return cmd_stats(ta, global);
        if (*partition) return cmd_partition(pta, global);
        if (*assemble) return cmd_assemble(aa, global);
        if (*mock) return cmd_mock_render(ma);
    } catch (const ExitWith& e) {
        if (!e.message.empty()) std::cerr << "pinforge: " << e.message << "\n";
        return e.code;
    } catch (const ConvertError& e) {
        std::cerr << "pinforge: " << e.code() << ": " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "pinforge: " << e.what() << "\n";
        return 3;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "pinforge: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "pinforge: " << e.what() << "\n";
        return 2;
    }
    return 3;
}

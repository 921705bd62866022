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
// Acceptance gate: nine release criteria, one [PASS]/[FAIL] line each.
// Exits 0 only when every criterion holds within its pinned budget.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pin/convert.hpp"
#include "pin/io.hpp"
#include "pin/model.hpp"
#include "pin/pagination.hpp"
#include "pin/render.hpp"
#include "pin/signals.hpp"
#include "pin/stats.hpp"
#include "testutil.hpp"

using namespace pin;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned numeric tolerance for all real-valued comparisons.
constexpr double kRelTol = 1e-12;

// Pinned wall-clock budgets, seconds. Zero means no overall cap; the
// criterion then carries its own internal timing requirements.
constexpr double kBudgetItif = 5.0;
constexpr double kBudgetSignalOracle = 30.0;
constexpr double kBudgetRoundTrip = 30.0;
constexpr double kBudgetPagination = 60.0;
constexpr double kBudgetMutants = 5.0;
constexpr double kBudgetConvert = 30.0;
constexpr double kBudgetAggregation = 30.0;
constexpr double kBudgetRender = 30.0;
constexpr double kBudgetThroughput = 0.0;

// Throughput criterion internals.
constexpr int64_t kCorpusBytes = 100'000'000;
constexpr double kSingleThreadLimitS = 60.0;
constexpr double kScalingFloor = 3.0;

bool close_rel(double a, double b) {
    if (a == b) return true;
    double scale = std::max(std::abs(a), std::abs(b));
    return std::abs(a - b) <= kRelTol * scale;
}

struct Check {
    int failures = 0;
    std::string first;

    void expect(bool ok, const std::string& detail) {
        if (ok) return;
        if (failures == 0) first = detail;
        ++failures;
    }
};

std::string fmt_seconds(double s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", s);
    return buf;
}

PinEntry base_entry(int64_t id, std::string md) {
    Json j = Json::parse(
        R"({"id": 1, "meta": {"language": "en", "oi_exist": false,
            "oi_source": "compiling", "source_dataset": "acceptdocs",
            "ori_meta": null, "doc_id": 1, "page_id": null,
            "date_download": "2024-04-01"}, "license": "CC-BY-4.0",
            "content_image": [], "md": "", "overall_image": ""})");
    j["id"] = id;
    j["meta"]["doc_id"] = id;
    j["md"] = std::move(md);
    return decode_entry(j);
}

std::string cli_path() { return PIN_CLI_PATH; }

// ---------------------------------------------------------------------------
// 1. Interleaving count: worked examples plus the adjacent-pair oracle.
// ---------------------------------------------------------------------------

void criterion_itif(Check& c) {
    auto seq_of = [](const std::vector<bool>& kinds) {
        ModalSequence s;
        for (bool text : kinds) {
            if (text) {
                s.units.emplace_back(TextBlock{"t"});
            } else {
                s.units.emplace_back(ImageRef{"i.png", "<img src='i.png'>", 10, 15});
            }
        }
        return s;
    };
    c.expect(itif_count(seq_of({true, false, true})) == 2, "itif([T,I,T]) != 2");
    c.expect(itif_count(seq_of({true, false, false, true})) == 2,
             "itif([T,I,I,T]) != 2");

    testutil::Rng rng(9001);
    for (int it = 0; it < 10'000; ++it) {
        int n = testutil::irand(rng, 0, 40);
        std::vector<bool> kinds;
        for (int i = 0; i < n; ++i) kinds.push_back(testutil::chance(rng, 0.5));
        c.expect(itif_count(seq_of(kinds)) == oracles::itif_pairs(kinds),
                 "random sequence " + std::to_string(it) + " disagrees with the pair oracle");
    }
}

// ---------------------------------------------------------------------------
// 2. Stored-signal equivalence against a naive per-field recomputation.
// ---------------------------------------------------------------------------

void criterion_signal_oracle(Check& c) {
    testutil::Rng rng(9002);
    Tokenizer tok = Tokenizer::whitespace();
    for (int it = 0; it < 500; ++it) {
        testutil::GenDoc d = testutil::gen_interleaved_doc(
            rng, 1, 12, "content_image/acc", /*with_markup=*/true);
        PinEntry e;
        e.md = d.md;
        QualitySignals qs = compute_signals(e, tok);
        std::string tag = " (doc " + std::to_string(it) + ")";

        int64_t tbc = 0;
        for (bool k : d.kinds) tbc += k ? 1 : 0;
        int64_t block_tokens = 0, block_scalars = 0;
        for (const auto& block : d.text_blocks) {
            block_tokens += oracles::stream_token_count(block);
            block_scalars += oracles::scalar_count(block);
        }

        c.expect(qs.image_text_interleaving_count == oracles::itif_pairs(d.kinds),
                 "interleaving count" + tag);
        c.expect(qs.text_block_count == tbc, "text block count" + tag);
        c.expect(qs.total_token_count == oracles::stream_token_count(d.md),
                 "total token count" + tag);
        c.expect(qs.doc_length == oracles::scalar_count(d.md), "doc length" + tag);
        if (tbc > 0) {
            c.expect(close_rel(qs.avg_tokens_per_text_block,
                               static_cast<double>(block_tokens) / tbc),
                     "avg tokens per block" + tag);
            c.expect(close_rel(qs.avg_text_block_length,
                               static_cast<double>(block_scalars) / tbc),
                     "avg block length" + tag);
        } else {
            c.expect(qs.avg_tokens_per_text_block == 0.0, "avg tokens zero" + tag);
            c.expect(qs.avg_text_block_length == 0.0, "avg length zero" + tag);
        }
        c.expect(qs.bold_char_count == d.expected_markup.bold_char_count,
                 "bold chars" + tag);
        c.expect(qs.italic_char_count == d.expected_markup.italic_char_count,
                 "italic chars" + tag);
        c.expect(qs.title_count == d.expected_markup.title_count, "title count" + tag);
    }
}

// ---------------------------------------------------------------------------
// 3. Entry write-read structural equality; markdown parse-serialize identity.
// ---------------------------------------------------------------------------

void criterion_round_trip(Check& c) {
    testutil::Rng rng(9003);
    std::vector<PinEntry> entries;
    for (int64_t id = 0; id < 1000; ++id) entries.push_back(testutil::gen_entry(rng, id));

    std::stringstream ss;
    JsonlWriter writer(ss);
    for (const PinEntry& e : entries) writer.write(e);
    JsonlReader reader(ss);
    ReadItem item;
    size_t i = 0;
    while (reader.next(item)) {
        c.expect(!item.error, "entry " + std::to_string(i) + " failed to decode");
        if (item.error) break;
        c.expect(entries_equal(*item.entry, entries[i]),
                 "entry " + std::to_string(i) + " changed across write-read");
        ++i;
    }
    c.expect(i == entries.size(), "read back " + std::to_string(i) + " of 1000 entries");

    for (int it = 0; it < 1000; ++it) {
        std::string md;
        switch (it % 3) {
            case 0:
                md = testutil::gen_interleaved_doc(rng, 1, 12, "content_image/rt", true).md;
                break;
            case 1:
                md = testutil::gen_markup_doc(rng).md;
                break;
            default:
                md = testutil::gen_paged_doc(rng, PageParams{}, testutil::irand(rng, 1, 20))
                         .md;
                break;
        }
        c.expect(serialize_modal_sequence(parse_modal_sequence(md)) == md,
                 "markdown doc " + std::to_string(it) + " not byte-identical");
    }
}

// ---------------------------------------------------------------------------
// 4. Pagination: lossless joins, per-page budgets, monotone page counts,
//    and a book-sized plain-text document.
// ---------------------------------------------------------------------------

void criterion_pagination(Check& c) {
    testutil::Rng rng(9004);
    PageParams defaults;
    for (int it = 0; it < 1000; ++it) {
        testutil::GenPagedDoc d =
            testutil::gen_paged_doc(rng, defaults, testutil::irand(rng, 1, 40));
        std::string tag = " (doc " + std::to_string(it) + ")";

        std::vector<PageSegment> segs = paginate(d.md, defaults);
        std::string joined;
        for (size_t k = 0; k < segs.size(); ++k) {
            joined += segs[k].md;
            if (k + 1 < segs.size()) joined += "\n";
        }
        c.expect(joined == d.md, "page join differs from the input" + tag);

        auto sim = oracles::simulate_pages(d.units, defaults.n_line);
        c.expect(segs.size() == sim.size(), "page count differs from the oracle" + tag);
        if (segs.size() == sim.size()) {
            for (size_t k = 0; k < segs.size(); ++k) {
                c.expect(segs[k].oversized == sim[k].oversized,
                         "oversized flag differs" + tag);
                c.expect(segs[k].estimated_lines == sim[k].cost,
                         "page estimate differs from the oracle" + tag);
                if (!segs[k].oversized) {
                    c.expect(segs[k].estimated_lines <= defaults.n_line,
                             "page over budget" + tag);
                }
            }
        }

        size_t c20 = paginate(d.md, PageParams{20, 80, 10}).size();
        size_t c40 = paginate(d.md, PageParams{40, 80, 10}).size();
        size_t c80 = paginate(d.md, PageParams{80, 80, 10}).size();
        c.expect(c20 >= c40 && c40 >= c80,
                 "page count increased as the line budget doubled" + tag);
    }

    std::string book;
    int line_no = 0;
    while (book.size() < 400'000) {
        book += "word after word marches across the page of this very long book volume " +
                std::to_string(line_no);
        ++line_no;
        book += line_no % 6 == 5 ? "\n\n" : "\n";
    }
    size_t book_pages = paginate(book, defaults).size();
    c.expect(book_pages > 100, "400k-char book produced only " +
                                   std::to_string(book_pages) + " pages");
}

// ---------------------------------------------------------------------------
// 5. Schema mutants: ten broken entries, ten exact codes, exit code 1.
// ---------------------------------------------------------------------------

void criterion_mutants(Check& c) {
    testutil::TmpDir tmp("acceptmut");
    fs::path part = tmp.path / "ds" / "part00";
    fs::create_directories(part / "content_image");
    fs::create_directories(part / "overall_image");
    {
        std::ofstream out(part / "part00.jsonl", std::ios::binary);
        for (const auto& m : testutil::schema_mutants()) out << m.line << "\n";
    }
    {
        std::ofstream png(part / "content_image" / "phantom.png", std::ios::binary);
        png << "png";
    }

    CommandResult run = run_command("'" + cli_path() + "' --json validate --strict " +
                                        "--check-files ds",
                                    30'000, tmp.path.string());
    c.expect(!run.timed_out, "validate timed out");
    c.expect(run.exit_code == 1,
             "validate exited " + std::to_string(run.exit_code) + ", wanted 1");

    size_t brace = run.output.rfind("\n{");
    std::string summary_line =
        brace == std::string::npos ? run.output : run.output.substr(brace + 1);
    Json summary;
    try {
        summary = Json::parse(summary_line);
    } catch (const Json::parse_error&) {
        c.expect(false, "no JSON summary in validate output");
        return;
    }
    c.expect(summary.value("entries", -1) == 10, "validator saw wrong entry count");
    c.expect(summary.value("parse_errors", -1) == 0, "mutants failed to decode");
    Json codes = summary.value("codes", Json::object());
    c.expect(codes.size() == testutil::schema_mutants().size(),
             "expected 10 distinct violation codes, saw " + std::to_string(codes.size()));
    for (const auto& m : testutil::schema_mutants()) {
        c.expect(codes.value(m.expected_code, 0) == 1,
                 std::string("code ") + m.expected_code + " not reported exactly once");
    }
}

// ---------------------------------------------------------------------------
// 6. Converters: kind sequences survive, reading order is reproduced.
// ---------------------------------------------------------------------------

void criterion_convert(Check& c) {
    testutil::Rng rng(9006);
    auto opts_for = [](int64_t id) {
        ConvertOptions o;
        o.id = id;
        o.doc_id = DocId(id);
        o.source_dataset = "acceptconv";
        o.license = "CC0";
        o.date_download = "2024-04-02";
        return o;
    };
    auto kinds_of = [](const std::string& md) {
        std::vector<bool> kinds;
        for (const ModalUnit& u : parse_modal_sequence(md).units) {
            kinds.push_back(is_text(u));
        }
        return kinds;
    };

    for (int it = 0; it < 500; ++it) {
        InterleavedListDoc doc;
        int n = testutil::irand(rng, 1, 12);
        std::vector<bool> expected;  // input kinds with adjacent texts coalesced
        for (int i = 0; i < n; ++i) {
            if (testutil::chance(rng, 0.5)) {
                doc.items.push_back(
                    {SourceItemKind::kText, testutil::rand_sentence(rng, 1, 6), ""});
                if (expected.empty() || !expected.back()) expected.push_back(true);
            } else {
                doc.items.push_back(
                    {SourceItemKind::kImage, "", "src/i" + std::to_string(i) + ".png"});
                expected.push_back(false);
            }
        }
        EntryDraft d = from_interleaved_list(doc, opts_for(it));
        c.expect(kinds_of(d.entry.md) == expected,
                 "kind sequence changed (doc " + std::to_string(it) + ")");
    }

    LayoutAnnotatedPage single;
    single.elements = {{0, 30, 100, 60, LayoutCategory::kText, "middle paragraph", ""},
                       {0, 70, 100, 95, LayoutCategory::kText, "closing paragraph", ""},
                       {0, 0, 100, 10, LayoutCategory::kTitle, "Heading", ""}};
    std::string got = from_layout_annotations(single, opts_for(600)).entry.md;
    c.expect(got == "# Heading\n\nmiddle paragraph\n\nclosing paragraph",
             "single-column reading order wrong: " + got);

    LayoutAnnotatedPage columns;
    columns.elements = {{55, 0, 100, 40, LayoutCategory::kText, "right top", ""},
                        {55, 50, 100, 90, LayoutCategory::kText, "right bottom", ""},
                        {0, 50, 45, 90, LayoutCategory::kText, "left bottom", ""},
                        {0, 0, 45, 40, LayoutCategory::kText, "left top", ""}};
    got = from_layout_annotations(columns, opts_for(601)).entry.md;
    c.expect(got == "left top\n\nleft bottom\n\nright top\n\nright bottom",
             "two-column reading order wrong: " + got);
}

// ---------------------------------------------------------------------------
// 7. Aggregation conventions: unweighted total and permutation stability.
// ---------------------------------------------------------------------------

void criterion_aggregation(Check& c) {
    SubsetStats lo, hi;
    lo.subset = "lo";
    lo.total_docs = 3;
    lo.avg_itif = 0.0;
    hi.subset = "hi";
    hi.total_docs = 5;
    hi.avg_itif = 8.72;
    SubsetStats total = aggregate_total({lo, hi}, /*weighted=*/false);
    c.expect(total.avg_itif == 4.36,
             "unweighted mean of {0.0, 8.72} is not exactly 4.36");

    testutil::Rng rng(9007);
    std::vector<PinEntry> entries;
    for (int64_t id = 0; id < 10'000; ++id) {
        PinEntry e = base_entry(id, "x");
        e.content_image.assign(static_cast<size_t>(testutil::irand(rng, 0, 6)),
                               "content_image/a.png");
        QualitySignals qs;
        qs.image_text_interleaving_count = testutil::irand(rng, 0, 30);
        qs.text_block_count = testutil::irand(rng, 0, 20);
        qs.total_token_count = testutil::irand(rng, 0, 4000);
        qs.doc_length = testutil::irand(rng, 0, 20'000);
        qs.avg_tokens_per_text_block = testutil::irand(rng, 0, 500) / 8.0;
        qs.avg_text_block_length = testutil::irand(rng, 0, 3000) / 16.0;
        qs.bold_char_count = testutil::irand(rng, 0, 300);
        qs.italic_char_count = testutil::irand(rng, 0, 300);
        qs.title_count = testutil::irand(rng, 0, 12);
        qs.present = (1u << QualitySignals::kFieldCount) - 1;
        e.quality_signals = qs;
        entries.push_back(std::move(e));
    }

    SubsetAccumulator streaming("all");
    for (const PinEntry& e : entries) streaming.add(e);
    SubsetStats in_order = streaming.finish();

    std::vector<PinEntry> shuffled = entries;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    std::vector<SubsetAccumulator> chunks(8, SubsetAccumulator("all"));
    for (size_t i = 0; i < shuffled.size(); ++i) chunks[i % 8].add(shuffled[i]);
    std::shuffle(chunks.begin(), chunks.end(), rng);
    SubsetAccumulator merged("all");
    for (const SubsetAccumulator& chunk : chunks) merged.merge(chunk);
    SubsetStats permuted = merged.finish();

    c.expect(permuted.total_docs == in_order.total_docs, "total_docs changed");
    c.expect(permuted.total_content_images == in_order.total_content_images,
             "total_content_images changed");
    c.expect(permuted.total_tokens == in_order.total_tokens, "total_tokens changed");
    c.expect(permuted.total_length == in_order.total_length, "total_length changed");
    c.expect(close_rel(permuted.avg_images_per_doc, in_order.avg_images_per_doc),
             "avg_images_per_doc drifted");
    c.expect(close_rel(permuted.avg_itif, in_order.avg_itif), "avg_itif drifted");
    c.expect(close_rel(permuted.avg_tokens_per_text_block,
                       in_order.avg_tokens_per_text_block),
             "avg_tokens_per_text_block drifted");
    c.expect(close_rel(permuted.avg_bold_chars, in_order.avg_bold_chars),
             "avg_bold_chars drifted");
    c.expect(close_rel(permuted.avg_italic_chars, in_order.avg_italic_chars),
             "avg_italic_chars drifted");
    c.expect(close_rel(permuted.avg_heading_count, in_order.avg_heading_count),
             "avg_heading_count drifted");
}

// ---------------------------------------------------------------------------
// 8. Batch rendering: 90 successes with compiling provenance, 10 isolated
//    failure records, failed entries untouched.
// ---------------------------------------------------------------------------

void criterion_render(Check& c) {
    testutil::TmpDir tmp("acceptrender");
    std::vector<PinEntry> entries;
    for (int64_t id = 0; id < 100; ++id) {
        std::string md = "# Doc " + std::to_string(id) + "\n\nSome body text.";
        if (id % 10 == 9) md += " FAILME";
        entries.push_back(base_entry(id, md));
    }

    RendererConfig cfg;
    cfg.command =
        "'" + cli_path() + "' mock-render --fail-marker FAILME '{input}' '{output}'";
    cfg.timeout_ms = 30'000;
    cfg.parallelism = 4;
    BatchRenderResult res = render_batch(entries, cfg, tmp.path.string());

    int64_t compiled = 0;
    for (const PinEntry& e : res.entries) {
        if (e.meta.oi_exist && e.meta.oi_source == OiSource::kCompiling) ++compiled;
    }
    c.expect(compiled == 90, "expected 90 rendered entries, saw " +
                                 std::to_string(compiled));
    c.expect(res.rendered == 90, "rendered counter is not 90");
    c.expect(res.failures.size() == 10,
             "expected 10 failure records, saw " + std::to_string(res.failures.size()));
    for (const RenderFailure& f : res.failures) {
        c.expect(f.index % 10 == 9, "failure recorded for the wrong entry");
        c.expect(f.kind == RenderFailureKind::kNonzeroExit,
                 "failure kind is not nonzero_exit");
        if (f.index < res.entries.size()) {
            c.expect(entries_equal(res.entries[f.index], entries[f.index]),
                     "failed entry was modified");
        }
    }
    for (int64_t id = 0; id < 100; ++id) {
        bool expect_file = id % 10 != 9;
        bool exists = fs::exists(tmp.path / "overall_image" / (std::to_string(id) + ".png"));
        c.expect(exists == expect_file,
                 "overall image presence wrong for entry " + std::to_string(id));
    }
}

// ---------------------------------------------------------------------------
// 9. Signals throughput: 100 MB corpus, single-thread floor, jobs-8 scaling.
// ---------------------------------------------------------------------------

void criterion_throughput(Check& c) {
    testutil::TmpDir tmp("acceptperf");

    std::vector<std::string> tails;
    {
        testutil::Rng rng(9009);
        for (int v = 0; v < 64; ++v) {
            std::string md;
            while (md.size() < 2500) {
                md += testutil::rand_sentence(rng, 8, 16);
                md += testutil::chance(rng, 0.3) ? "\n\n" : " ";
            }
            std::string dump = encode_entry(base_entry(0, md)).dump();
            tails.push_back(dump.substr(dump.find(',')));
        }
    }
    fs::path big = tmp.path / "big.jsonl";
    int64_t bytes = 0;
    {
        std::ofstream out(big, std::ios::binary);
        int64_t id = 0;
        while (bytes < kCorpusBytes) {
            std::string line =
                "{\"id\":" + std::to_string(id) + tails[id % tails.size()] + "\n";
            out << line;
            bytes += static_cast<int64_t>(line.size());
            ++id;
        }
        c.expect(bool(out), "could not write the corpus file");
    }

    auto timed_run = [&](const std::string& jobs, const std::string& outfile) {
        auto t0 = Clock::now();
        CommandResult run = run_command("'" + cli_path() + "' signals --in big.jsonl --out " +
                                            outfile + " --jobs " + jobs,
                                        600'000, tmp.path.string());
        double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        c.expect(!run.timed_out, "signals run with --jobs " + jobs + " timed out");
        c.expect(run.exit_code == 0, "signals run with --jobs " + jobs + " exited " +
                                         std::to_string(run.exit_code));
        return secs;
    };

    double t1 = timed_run("1", "out1.jsonl");
    c.expect(t1 < kSingleThreadLimitS,
             "single-threaded pass took " + fmt_seconds(t1) + "s, limit " +
                 fmt_seconds(kSingleThreadLimitS) + "s");
    double t8 = timed_run("8", "out8.jsonl");

    std::ifstream a(tmp.path / "out1.jsonl", std::ios::binary);
    std::ifstream b(tmp.path / "out8.jsonl", std::ios::binary);
    c.expect(std::equal(std::istreambuf_iterator<char>(a), {},
                        std::istreambuf_iterator<char>(b), {}),
             "jobs-8 output differs from single-threaded output");

    double speedup = t8 > 0.0 ? t1 / t8 : 0.0;
    c.expect(speedup >= kScalingFloor,
             "jobs-8 speedup " + fmt_seconds(speedup) + "x over single-threaded (" +
                 fmt_seconds(t1) + "s vs " + fmt_seconds(t8) + "s), floor " +
                 fmt_seconds(kScalingFloor) + "x");
}

struct Criterion {
    const char* name;
    double budget_s;
    std::function<void(Check&)> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"interleaving worked examples and pair oracle", kBudgetItif, criterion_itif},
        {"signal recomputation equivalence", kBudgetSignalOracle, criterion_signal_oracle},
        {"entry and markdown round-trips", kBudgetRoundTrip, criterion_round_trip},
        {"pagination losslessness and budgets", kBudgetPagination, criterion_pagination},
        {"schema mutant detection via validate", kBudgetMutants, criterion_mutants},
        {"converter kinds and reading order", kBudgetConvert, criterion_convert},
        {"aggregation conventions and stability", kBudgetAggregation,
         criterion_aggregation},
        {"mock renderer batch contract", kBudgetRender, criterion_render},
        {"signals throughput floor and scaling", kBudgetThroughput,
         criterion_throughput},
    };

    int failed = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        const Criterion& cr = criteria[i];
        Check check;
        auto t0 = Clock::now();
        try {
            cr.run(check);
        } catch (const std::exception& e) {
            check.expect(false, std::string("unexpected exception: ") + e.what());
        }
        double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        if (cr.budget_s > 0.0 && secs > cr.budget_s) {
            check.expect(false, "exceeded the " + fmt_seconds(cr.budget_s) +
                                    "s budget (took " + fmt_seconds(secs) + "s)");
        }

        std::string line = check.failures == 0 ? "[PASS]" : "[FAIL]";
        line += " criterion " + std::to_string(i + 1) + "/9 " + cr.name + " (" +
                fmt_seconds(secs) + "s)";
        if (check.failures > 0) {
            line += ": " + check.first;
            if (check.failures > 1) {
                line += " [+" + std::to_string(check.failures - 1) + " more]";
            }
            ++failed;
        }
        std::cout << line << "\n" << std::flush;
    }
    return failed == 0 ? 0 : 1;
}

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

#include "pin/render.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "pin/io.hpp"
#include "testutil.hpp"

using namespace pin;
namespace fs = std::filesystem;

namespace {

// printf escapes for a valid 24-byte PNG stub (signature plus filler).
const char* kPngPrintf = R"(printf '\211PNG\r\n\032\n0123456789abcdef')";

std::string write_script(const fs::path& dir, const std::string& name,
                         const std::string& body) {
    fs::path p = dir / name;
    std::ofstream(p) << "#!/bin/sh\n" << body;
    return "/bin/sh " + p.string() + " {input} {output}";
}

std::string ok_command(const fs::path& dir) {
    return write_script(dir, "ok.sh", std::string(kPngPrintf) + " > \"$2\"\n");
}

std::string file_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

PinEntry make_entry(int64_t id, std::string md) {
    PinEntry e;
    e.id = id;
    e.meta.doc_id = id;
    e.meta.source_dataset = "renderdocs";
    e.meta.date_download = "2024-06-15";
    e.license = "CC-BY-4.0";
    e.md = std::move(md);
    return e;
}

bool has_temp_litter(const fs::path& root) {
    for (const auto& ent : fs::directory_iterator(root)) {
        if (ent.path().filename().string().rfind(".render-", 0) == 0) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("run_command captures output and exit status") {
    CommandResult r = run_command("echo out; echo err >&2", 5000);
    CHECK(r.exit_code == 0);
    CHECK(!r.timed_out);
    CHECK(r.output == "out\nerr\n");

    CHECK(run_command("exit 7", 5000).exit_code == 7);
    CHECK(run_command("true", 5000).exit_code == 0);

    testutil::TmpDir tmp("cmd");
    CommandResult cwd = run_command("pwd", 5000, tmp.path.string());
    CHECK(cwd.output.find(tmp.path.filename().string()) != std::string::npos);
}

TEST_CASE("run_command kills a stuck process at the deadline") {
    auto start = std::chrono::steady_clock::now();
    CommandResult r = run_command("sleep 30", 300);
    auto elapsed = std::chrono::steady_clock::now() - start;
    CHECK(r.timed_out);
    CHECK(r.exit_code == -1);
    CHECK(elapsed < std::chrono::seconds(10));
}

TEST_CASE("markdown_to_html covers the block constructs") {
    std::string html = markdown_to_html("# Title\n\nA paragraph.");
    CHECK(html.rfind("<!DOCTYPE html>\n", 0) == 0);
    CHECK(html.find("<h1>Title</h1>") != std::string::npos);
    CHECK(html.find("<p>A paragraph.</p>") != std::string::npos);

    html = markdown_to_html("first\n\nsecond line a\nsecond line b");
    CHECK(html.find("<p>first</p>") != std::string::npos);
    CHECK(html.find("<p>second line a\nsecond line b</p>") != std::string::npos);

    html = markdown_to_html("**bold** and *ital* and snake_case");
    CHECK(html.find("<strong>bold</strong>") != std::string::npos);
    CHECK(html.find("<em>ital</em>") != std::string::npos);
    CHECK(html.find("snake_case") != std::string::npos);
    CHECK(html.find("<em>case</em>") == std::string::npos);

    html = markdown_to_html("## **Big** news");
    CHECK(html.find("<h2><strong>Big</strong> news</h2>") != std::string::npos);

    html = markdown_to_html("```py\nif a < b:\n    pass\n```");
    CHECK(html.find("<pre><code class=\"language-py\">if a &lt; b:\n    pass\n"
                    "</code></pre>") != std::string::npos);

    html = markdown_to_html("~~~\n<script>alert(1)</script>\n~~~");
    CHECK(html.find("&lt;script&gt;alert(1)&lt;/script&gt;") != std::string::npos);
    CHECK(html.find("<script>") == std::string::npos);

    html = markdown_to_html("a < b & c > d");
    CHECK(html.find("a &lt; b &amp; c &gt; d") != std::string::npos);
}

TEST_CASE("markdown_to_html keeps images and embedded html") {
    std::string html = markdown_to_html("before\n\n<img src='content_image/1-0.png'>\n\nafter");
    CHECK(html.find("<img src='content_image/1-0.png'>") != std::string::npos);

    html = markdown_to_html("see ![a fig](content_image/2-0.png) here");
    CHECK(html.find("<img src=\"content_image/2-0.png\" alt=\"a fig\">") !=
          std::string::npos);

    html = markdown_to_html("<div class='x'>\nraw & <span>bits</span>\n</div>\n\ntext");
    CHECK(html.find("<div class='x'>\nraw & <span>bits</span>\n</div>\n") !=
          std::string::npos);
    CHECK(html.find("<p>text</p>") != std::string::npos);

    html = markdown_to_html("inline <b>kept</b> tag");
    CHECK(html.find("<p>inline <b>kept</b> tag</p>") != std::string::npos);
}

TEST_CASE("markdown_to_html renders pipe tables") {
    std::string html = markdown_to_html("| h1 | h2 |\n|----|:--:|\n| a | **b** |");
    CHECK(html.find("<table>") != std::string::npos);
    CHECK(html.find("<th>h1</th><th>h2</th>") != std::string::npos);
    CHECK(html.find("<td>a</td><td><strong>b</strong></td>") != std::string::npos);

    // No separator: every row is body.
    html = markdown_to_html("| a | b |\n| c | d |");
    CHECK(html.find("<th>") == std::string::npos);
    CHECK(html.find("<td>a</td><td>b</td>") != std::string::npos);
    CHECK(html.find("<td>c</td><td>d</td>") != std::string::npos);
}

TEST_CASE("markdown_to_html is deterministic and total") {
    std::string empty = markdown_to_html("");
    CHECK(empty.find("<body>\n</body>") != std::string::npos);
    CHECK(empty.rfind("<!DOCTYPE html>\n", 0) == 0);

    CHECK(markdown_to_html("# T") == markdown_to_html("# T"));
    CHECK(markdown_to_html("# T").find("<h1>T</h1>") != std::string::npos);

    // Lenient on anything: unclosed fence, lone pipes, stray delimiters.
    for (const char* s : {"```\nnever closed", "|", "** dangling", "####### seven",
                          "<notatag", "\n\n\n"}) {
        std::string out = markdown_to_html(s);
        CHECK(out.rfind("<!DOCTYPE html>\n", 0) == 0);
        CHECK(out.substr(out.size() - 8) == "</html>\n");
    }
}

namespace {

// Fixed corpus exercising every construct; pure function of the index so the
// golden file stays reproducible.
std::string corpus_doc(int i) {
    std::string md;
    md += std::string(static_cast<size_t>(i % 6) + 1, '#') + " Document " +
          std::to_string(i) + "\n\n";
    switch (i % 7) {
        case 0: md += "Plain opening text with **strong words** inside.\n\n"; break;
        case 1: md += "An *italic run* and a snake_case_name together.\n\n"; break;
        case 2: md += "Nested **_emphasis_** and more text.\n\n"; break;
        case 3: md += "Deep *__mix x__* of delimiters.\n\n"; break;
        case 4: md += "Unbalanced **opener stays literal.\n\n"; break;
        case 5: md += "Unicode: héllo — ünïcode ∑ κόσμος.\n\n"; break;
        default: md += "Just a plain paragraph, line one.\nAnd line two.\n\n"; break;
    }
    if (i % 3 == 0) {
        const char* lang = i % 2 == 0 ? "py" : "";
        md += "```" + std::string(lang) + "\nvalue = a < b & c\nprint('`ticks`')\n```\n\n";
    }
    if (i % 4 == 0) {
        md += "| name | count |\n| --- | ---: |\n| alpha | " + std::to_string(i) +
              " |\n| beta | " + std::to_string(i * 2) + " |\n\n";
    }
    if (i % 5 == 0) {
        md += "<div class='note'>\nraw html & entities stay\n</div>\n\n";
    }
    if (i % 2 == 0) {
        md += "<img src='content_image/" + std::to_string(i) + "-0.png'>\n\n";
    } else {
        md += "![figure " + std::to_string(i) + "](content_image/" +
              std::to_string(i) + "-0.png)\n\n";
    }
    if (i == 48) return "# Solo\n";
    if (i == 49) return "";
    md += "Closing paragraph for document " + std::to_string(i) + ".";
    return md;
}

}  // namespace

TEST_CASE("markdown_to_html matches the golden corpus") {
    std::string blob;
    for (int i = 0; i < 50; ++i) {
        blob += "=== doc " + std::to_string(i) + " ===\n";
        blob += markdown_to_html(corpus_doc(i));
    }
    fs::path golden = fs::path(PIN_TEST_DATA_DIR) / "markdown_html.golden";
    if (std::getenv("PIN_UPDATE_GOLDENS") != nullptr) {
        std::ofstream(golden, std::ios::binary) << blob;
        MESSAGE("golden rewritten: ", golden.string());
        return;
    }
    REQUIRE(fs::exists(golden));
    CHECK(file_bytes(golden) == blob);
}

TEST_CASE("render_overall_image produces and attaches the png") {
    testutil::TmpDir tmp("render");
    PinEntry e = make_entry(1997, "# Hello\n\nA body with `code`.");
    e.content_image = {"content_image/1997-0.png"};
    RendererConfig cfg{ok_command(tmp.path)};

    RenderResult r = render_overall_image(e, cfg, tmp.path.string());
    REQUIRE(!r.failure);
    CHECK(r.rendered);
    CHECK(!r.skipped);
    CHECK(r.entry.meta.oi_exist);
    CHECK(r.entry.meta.oi_source == OiSource::kCompiling);
    CHECK(r.entry.overall_image == std::vector<std::string>{"overall_image/1997.png"});
    CHECK(r.entry.overall_image_was_scalar);
    CHECK(r.entry.md == e.md);
    CHECK(r.entry.content_image == e.content_image);

    std::string bytes = file_bytes(tmp.path / "overall_image" / "1997.png");
    CHECK(bytes.substr(0, 4) == "\x89PNG");
    CHECK(!has_temp_litter(tmp.path));
}

TEST_CASE("render_overall_image names multi-page outputs by page") {
    testutil::TmpDir tmp("pages");
    RendererConfig cfg{ok_command(tmp.path)};

    PinEntry first = make_entry(7, "page one");
    first.meta.page_id = 0;
    RenderResult r0 = render_overall_image(first, cfg, tmp.path.string());
    REQUIRE(!r0.failure);
    CHECK(r0.entry.overall_image == std::vector<std::string>{"overall_image/7.png"});

    PinEntry later = make_entry(7, "page three");
    later.meta.page_id = 2;
    RenderResult r2 = render_overall_image(later, cfg, tmp.path.string());
    REQUIRE(!r2.failure);
    CHECK(r2.entry.overall_image == std::vector<std::string>{"overall_image/7-2.png"});
    CHECK(fs::exists(tmp.path / "overall_image" / "7.png"));
    CHECK(fs::exists(tmp.path / "overall_image" / "7-2.png"));

    PinEntry named = make_entry(8, "string id");
    named.meta.doc_id = DocId("book-3");
    RenderResult rn = render_overall_image(named, cfg, tmp.path.string());
    REQUIRE(!rn.failure);
    CHECK(rn.entry.overall_image == std::vector<std::string>{"overall_image/book-3.png"});
}

TEST_CASE("render_overall_image maps each failure mode") {
    testutil::TmpDir tmp("fails");
    PinEntry e = make_entry(5, "body");

    auto run_with = [&](const std::string& cmd) {
        RendererConfig cfg{cmd};
        cfg.timeout_ms = 400;
        return render_overall_image(e, cfg, tmp.path.string());
    };

    RenderResult r = run_with(write_script(tmp.path, "fail.sh", "echo boom >&2\nexit 3\n"));
    REQUIRE(r.failure);
    CHECK(r.failure->kind == RenderFailureKind::kNonzeroExit);
    CHECK(r.failure->message.find("status 3") != std::string::npos);
    CHECK(r.failure->log.find("boom") != std::string::npos);
    CHECK(r.failure->entry_id == 5);
    CHECK(!r.entry.meta.oi_exist);
    CHECK(r.entry.overall_image.empty());

    r = run_with(write_script(tmp.path, "slow.sh", "sleep 30\n"));
    REQUIRE(r.failure);
    CHECK(r.failure->kind == RenderFailureKind::kTimeout);

    r = run_with(write_script(tmp.path, "noout.sh", "exit 0\n"));
    REQUIRE(r.failure);
    CHECK(r.failure->kind == RenderFailureKind::kMissingOutput);

    r = run_with(write_script(tmp.path, "tiny.sh", "printf x > \"$2\"\n"));
    REQUIRE(r.failure);
    CHECK(r.failure->kind == RenderFailureKind::kEmptyOutput);
    CHECK(r.failure->message.find("1 bytes") != std::string::npos);

    CHECK(!fs::exists(tmp.path / "overall_image" / "5.png"));
    CHECK(!has_temp_litter(tmp.path));
}

TEST_CASE("existing overall images are kept unless forced") {
    testutil::TmpDir tmp("skip");
    // A command that would fail loudly proves skipping never invokes it.
    std::string failing = write_script(tmp.path, "never.sh", "exit 9\n");

    PinEntry ori = make_entry(12, "has one already");
    ori.meta.oi_exist = true;
    ori.meta.oi_source = OiSource::kOri;
    ori.overall_image = {"overall_image/12.png"};

    RenderResult r = render_overall_image(ori, RendererConfig{failing}, tmp.path.string());
    CHECK(r.skipped);
    CHECK(!r.rendered);
    CHECK(!r.failure);
    CHECK(r.entry.meta.oi_source == OiSource::kOri);
    CHECK(r.entry.overall_image == ori.overall_image);

    PinEntry compiled = ori;
    compiled.meta.oi_source = OiSource::kCompiling;
    CHECK(render_overall_image(compiled, RendererConfig{failing}, tmp.path.string()).skipped);

    RendererConfig force{ok_command(tmp.path)};
    force.force = true;
    r = render_overall_image(ori, force, tmp.path.string());
    REQUIRE(!r.failure);
    CHECK(r.rendered);
    CHECK(r.entry.meta.oi_source == OiSource::kCompiling);
    CHECK(fs::exists(tmp.path / "overall_image" / "12.png"));
}

TEST_CASE("render preconditions throw") {
    RendererConfig no_output{"render {input}"};
    CHECK(!no_output.valid());
    RendererConfig no_input{"render {output}"};
    CHECK(!no_input.valid());
    RendererConfig good{"render {input} {output}"};
    CHECK(good.valid());

    PinEntry e = make_entry(1, "text");
    CHECK_THROWS_AS(render_overall_image(e, no_output, "."), std::invalid_argument);
    CHECK_THROWS_AS(render_batch({e}, no_input, "."), std::invalid_argument);
    PinEntry empty = make_entry(2, "");
    CHECK_THROWS_AS(render_overall_image(empty, good, "."), std::invalid_argument);
}

TEST_CASE("renderer runs rooted so relative resources resolve") {
    testutil::TmpDir tmp("cwd");
    fs::create_directories(tmp.path / "content_image");
    std::ofstream(tmp.path / "content_image" / "probe.png") << "x";
    std::string cmd = write_script(
        tmp.path, "probe.sh",
        "[ -f content_image/probe.png ] || exit 9\n" + std::string(kPngPrintf) +
            " > \"$2\"\n");

    PinEntry e = make_entry(3, "<img src='content_image/probe.png'>\n\ncaption");
    RenderResult r = render_overall_image(e, RendererConfig{cmd}, tmp.path.string());
    REQUIRE(!r.failure);
    CHECK(r.rendered);
}

TEST_CASE("render_batch isolates failures and renders the rest") {
    testutil::TmpDir tmp("batch");
    std::string cmd = write_script(
        tmp.path, "marker.sh",
        "if grep -q FAILME \"$1\"; then echo \"marker hit\" >&2; exit 1; fi\n" +
            std::string(kPngPrintf) + " > \"$2\"\n");

    std::vector<PinEntry> entries;
    for (int i = 0; i < 100; ++i) {
        std::string md = "# Doc " + std::to_string(i) + "\n\nBody text.";
        if (i % 10 == 0) md += "\n\nFAILME";
        entries.push_back(make_entry(i, md));
    }
    RendererConfig cfg{cmd};
    cfg.parallelism = 4;
    BatchRenderResult out = render_batch(entries, cfg, tmp.path.string());

    CHECK(out.rendered == 90);
    CHECK(out.skipped == 0);
    REQUIRE(out.failures.size() == 10);
    std::set<size_t> failed;
    for (const RenderFailure& f : out.failures) {
        failed.insert(f.index);
        CHECK(f.kind == RenderFailureKind::kNonzeroExit);
        CHECK(f.log.find("marker hit") != std::string::npos);
        CHECK(f.entry_id == static_cast<int64_t>(f.index));
    }
    for (int i = 0; i < 100; ++i) {
        bool should_fail = i % 10 == 0;
        CHECK(failed.count(static_cast<size_t>(i)) == (should_fail ? 1u : 0u));
        const PinEntry& got = out.entries[static_cast<size_t>(i)];
        CHECK(got.meta.oi_exist == !should_fail);
        if (should_fail) {
            CHECK(entries_equal(got, entries[static_cast<size_t>(i)]));
        } else {
            CHECK(got.meta.oi_source == OiSource::kCompiling);
            CHECK(fs::exists(tmp.path / got.overall_image.at(0)));
        }
    }
    CHECK(!has_temp_litter(tmp.path));

    PinEntry hollow = make_entry(500, "");
    BatchRenderResult empty_md = render_batch({hollow}, cfg, tmp.path.string());
    REQUIRE(empty_md.failures.size() == 1);
    CHECK(empty_md.failures[0].kind == RenderFailureKind::kError);
}

TEST_CASE("render_batch outcome is independent of parallelism") {
    testutil::TmpDir a("par1");
    testutil::TmpDir b("par8");
    auto make_cmd = [&](const fs::path& dir) {
        return write_script(
            dir, "m.sh",
            "if grep -q FAILME \"$1\"; then exit 1; fi\n" + std::string(kPngPrintf) +
                " > \"$2\"\n");
    };
    std::vector<PinEntry> entries;
    for (int i = 0; i < 20; ++i) {
        std::string md = "Doc body " + std::to_string(i) + ".";
        if (i % 7 == 0) md += " FAILME";
        entries.push_back(make_entry(i, md));
    }

    RendererConfig serial{make_cmd(a.path)};
    serial.parallelism = 1;
    RendererConfig wide{make_cmd(b.path)};
    wide.parallelism = 8;
    BatchRenderResult r1 = render_batch(entries, serial, a.path.string());
    BatchRenderResult r8 = render_batch(entries, wide, b.path.string());

    CHECK(r1.rendered == r8.rendered);
    REQUIRE(r1.failures.size() == r8.failures.size());
    for (size_t i = 0; i < r1.failures.size(); ++i) {
        CHECK(r1.failures[i].index == r8.failures[i].index);
    }
    for (size_t i = 0; i < entries.size(); ++i) {
        CHECK(encode_entry(r1.entries[i]) == encode_entry(r8.entries[i]));
    }
}

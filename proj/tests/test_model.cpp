#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "pin/model.hpp"
#include "pin/text.hpp"
#include "testutil.hpp"

using namespace pin;

namespace {

std::vector<bool> kinds_of(const ModalSequence& seq) {
    std::vector<bool> kinds;
    for (const auto& u : seq.units) kinds.push_back(is_text(u));
    return kinds;
}

}  // namespace

TEST_CASE("plain text parses to a single block") {
    ModalSequence seq = parse_modal_sequence("hello");
    REQUIRE(seq.size() == 1);
    CHECK(is_text(seq.units[0]));
    CHECK(std::get<TextBlock>(seq.units[0]).content == "hello");
    CHECK(seq.warnings.empty());
}

TEST_CASE("empty input parses to an empty sequence") {
    ModalSequence seq = parse_modal_sequence("");
    CHECK(seq.empty());
}

TEST_CASE("reference entry md parses to image/text alternation") {
    ModalSequence seq = parse_modal_sequence(testutil::kRefEntryMd);
    CHECK(kinds_of(seq) == std::vector<bool>{false, true, false, true});
    CHECK(extract_image_refs(testutil::kRefEntryMd) ==
          std::vector<std::string>{"content_image/1997-0.png",
                                   "content_image/1997-1.png"});
    CHECK(serialize_modal_sequence(seq) == testutil::kRefEntryMd);
}

TEST_CASE("html img tag variants") {
    CHECK(extract_image_refs("<img src=\"a.png\">") == std::vector<std::string>{"a.png"});
    CHECK(extract_image_refs("<IMG SRC=a.png >") == std::vector<std::string>{"a.png"});
    CHECK(extract_image_refs("<img width='9' src='b.jpg'/>") ==
          std::vector<std::string>{"b.jpg"});
    CHECK(extract_image_refs("x <img\n  src='c.png'\n> y") ==
          std::vector<std::string>{"c.png"});
    // A tag without src still counts as an image unit with an empty path.
    ModalSequence seq = parse_modal_sequence("<img alt='no source'>");
    REQUIRE(seq.size() == 1);
    CHECK(is_image(seq.units[0]));
    CHECK(std::get<ImageRef>(seq.units[0]).path.empty());
}

TEST_CASE("markdown image syntax") {
    ModalSequence seq = parse_modal_sequence("before ![alt](path.png \"t\") after");
    REQUIRE(seq.size() == 3);
    CHECK(std::get<ImageRef>(seq.units[1]).path == "path.png");
    CHECK(serialize_modal_sequence(seq) == "before ![alt](path.png \"t\") after");
    // Bare ! without image syntax stays text.
    CHECK(parse_modal_sequence("hey! there").size() == 1);
}

TEST_CASE("malformed img tags stay text and warn with byte offsets") {
    std::string md = "ok <img src='x and on";
    ModalSequence seq = parse_modal_sequence(md);
    REQUIRE(seq.size() == 1);
    CHECK(is_text(seq.units[0]));
    REQUIRE(seq.warnings.size() == 1);
    CHECK(seq.warnings[0].byte_offset == 3);
    CHECK(serialize_modal_sequence(seq) == md);

    ModalSequence unterminated = parse_modal_sequence("<img src=a.png");
    REQUIRE(unterminated.warnings.size() == 1);
    CHECK(unterminated.warnings[0].byte_offset == 0);
    CHECK(serialize_modal_sequence(unterminated) == "<img src=a.png");
}

TEST_CASE("random interleavings parse to the constructed kinds") {
    testutil::Rng rng(101);
    for (int iter = 0; iter < 300; ++iter) {
        testutil::GenDoc doc = testutil::gen_interleaved_doc(rng, 1, 50);
        ModalSequence seq = parse_modal_sequence(doc.md);
        CAPTURE(doc.md);
        REQUIRE(kinds_of(seq) == doc.kinds);
        CHECK(extract_image_refs(doc.md) == doc.image_paths);
        CHECK(serialize_modal_sequence(seq) == doc.md);
    }
}

TEST_CASE("round trip is byte exact across the mixed corpus") {
    testutil::Rng rng(202);
    PageParams params;
    for (int iter = 0; iter < 1000; ++iter) {
        std::string md;
        int pick = iter % 3;
        if (pick == 0) {
            md = testutil::gen_interleaved_doc(rng, 1, 30).md;
        } else if (pick == 1) {
            md = testutil::gen_markup_doc(rng).md;
        } else {
            md = testutil::gen_paged_doc(rng, params, testutil::irand(rng, 1, 12)).md;
        }
        CAPTURE(md);
        REQUIRE(serialize_modal_sequence(parse_modal_sequence(md)) == md);
        REQUIRE(serialize_modal_sequence(
                    parse_modal_sequence(md, Segmentation::kParagraph)) == md);
    }
}

TEST_CASE("paragraph segmentation splits after blank-line runs") {
    ModalSequence seq =
        parse_modal_sequence("one\ntwo\n\nthree\n\n\nfour", Segmentation::kParagraph);
    REQUIRE(seq.size() == 3);
    CHECK(std::get<TextBlock>(seq.units[0]).content == "one\ntwo\n\n");
    CHECK(std::get<TextBlock>(seq.units[1]).content == "three\n\n\n");
    CHECK(std::get<TextBlock>(seq.units[2]).content == "four");
}

TEST_CASE("image-delimited mode keeps whitespace gaps as text units") {
    ModalSequence seq = parse_modal_sequence("<img src='a.png'>\n\n<img src='b.png'>");
    CHECK(kinds_of(seq) == std::vector<bool>{false, true, false});
    // Truly adjacent tags produce adjacent image units.
    ModalSequence adjacent = parse_modal_sequence("<img src='a.png'><img src='b.png'>");
    CHECK(kinds_of(adjacent) == std::vector<bool>{false, false});
}

TEST_CASE("rewrite_image_refs splices only the path bytes") {
    std::string md = "a <img width='9' src='old.png'/> b ![x](old2.png) c";
    auto same = rewrite_image_refs(md, [](const std::string& p) { return p; });
    CHECK(same == md);
    auto mapped = rewrite_image_refs(md, [](const std::string& p) {
        return p == "old.png" ? std::string("new/one.png") : p;
    });
    CHECK(mapped == "a <img width='9' src='new/one.png'/> b ![x](old2.png) c");
    auto both = rewrite_image_refs(md, [](const std::string& p) { return "z/" + p; });
    CHECK(both == "a <img width='9' src='z/old.png'/> b ![x](z/old2.png) c");
    CHECK(extract_image_refs(both) ==
          std::vector<std::string>{"z/old.png", "z/old2.png"});
}

TEST_CASE("markup stats on fixed documents") {
    CHECK(compute_markup_stats("**ab** plain") ==
          MarkupStats{2, 0, 0});
    CHECK(compute_markup_stats("*a*") == MarkupStats{0, 1, 0});
    CHECK(compute_markup_stats("# T\n## U\ntext") == MarkupStats{0, 0, 2});
    CHECK(compute_markup_stats("") == MarkupStats{0, 0, 0});
    CHECK(compute_markup_stats("___x___") == MarkupStats{1, 1, 0});
    CHECK(compute_markup_stats("***abc***") == MarkupStats{3, 3, 0});
    // Unbalanced delimiters capture nothing.
    CHECK(compute_markup_stats("**ab") == MarkupStats{0, 0, 0});
    CHECK(compute_markup_stats("ab**") == MarkupStats{0, 0, 0});
    // Whitespace-flanked delimiters cannot open or close.
    CHECK(compute_markup_stats("a ** b ** c") == MarkupStats{0, 0, 0});
    // Nesting counts content once per style; consumed delimiters never count.
    CHECK(compute_markup_stats("**a _b_ c**") == MarkupStats{5, 1, 0});
    // Seven hashes or a missing space is not a heading.
    CHECK(compute_markup_stats("####### x\n#x\n#### ok") == MarkupStats{0, 0, 1});
}

TEST_CASE("merged and chained delimiter runs") {
    // Back-to-back spans share one four-star run.
    CHECK(compute_markup_stats("**ab****cd**") == MarkupStats{4, 0, 0});
    // A three-star run closes one span and opens the other.
    CHECK(compute_markup_stats("*a***b**") == MarkupStats{1, 1, 0});
    CHECK(compute_markup_stats("**a***b*") == MarkupStats{1, 1, 0});
    // Opener and closer chains of alternating characters nest cleanly.
    CHECK(compute_markup_stats("*__**x**__*") == MarkupStats{1, 1, 0});
    CHECK(compute_markup_stats("**_**x**_**") == MarkupStats{1, 1, 0});
    CHECK(compute_markup_stats("*__a b__ c*") == MarkupStats{3, 5, 0});
    // Word-adjacent single runs still pair up.
    CHECK(compute_markup_stats("d**x**e") == MarkupStats{1, 0, 0});
    CHECK(compute_markup_stats("a**b*c") == MarkupStats{0, 1, 0});
    // An intraword underscore finds no partner.
    CHECK(compute_markup_stats("snake_case") == MarkupStats{0, 0, 0});
}

TEST_CASE("generated emphasis trees match construction counts") {
    testutil::Rng rng(303);
    for (int iter = 0; iter < 2000; ++iter) {
        testutil::GenMarkup m = testutil::gen_emphasis_text(rng);
        MarkupStats got = compute_markup_stats(m.text);
        CAPTURE(m.text);
        REQUIRE(got.bold_char_count == m.bold);
        REQUIRE(got.italic_char_count == m.italic);
        REQUIRE(got.title_count == 0);
    }
}

TEST_CASE("generated markup documents match construction counts") {
    testutil::Rng rng(404);
    for (int iter = 0; iter < 500; ++iter) {
        testutil::GenMarkupDoc d = testutil::gen_markup_doc(rng);
        MarkupStats got = compute_markup_stats(d.md);
        CAPTURE(d.md);
        REQUIRE(got == d.expected);
    }
}

TEST_CASE("appending a detached bold atom raises bold count by exactly one") {
    // The leading space keeps the appended opener from closing anything in
    // the prefix, so the delta is +1 bold no matter how mangled the prefix.
    testutil::Rng rng(505);
    for (int iter = 0; iter < 500; ++iter) {
        std::string md;
        int pick = iter % 4;
        if (pick == 0) {
            md = testutil::gen_markup_doc(rng).md;
        } else if (pick == 1) {
            md = testutil::gen_interleaved_doc(rng, 1, 10).md;
        } else if (pick == 2) {
            md = testutil::gen_emphasis_text(rng).text;
            // Truncate to force unbalanced delimiters.
            if (!md.empty()) md.resize(md.size() - testutil::irand(rng, 0, 2));
        } else {
            static const char* awkward[] = {"**ab", "a*", "**", "*", "_x __",
                                            "a**b*c", "", "# h", "# "};
            md = awkward[iter % 9];
        }
        MarkupStats before = compute_markup_stats(md);
        MarkupStats after = compute_markup_stats(md + " **x**");
        CAPTURE(md);
        REQUIRE(after.bold_char_count == before.bold_char_count + 1);
        REQUIRE(after.italic_char_count == before.italic_char_count);
        REQUIRE(after.title_count == before.title_count);
    }
}

TEST_CASE("scalar counting matches the independent decoder") {
    testutil::Rng rng(606);
    CHECK(scalar_count("") == 0);
    CHECK(scalar_count("abc") == 3);
    CHECK(scalar_count("\xc3\xa9t\xc3\xa9") == 3);
    CHECK(scalar_count("\xe6\xa8\xa1\xe5\x9e\x8b") == 2);
    for (int iter = 0; iter < 200; ++iter) {
        std::string md = testutil::gen_interleaved_doc(rng, 1, 20).md;
        CHECK(scalar_count(md) == oracles::scalar_count(md));
    }
}

TEST_CASE("split_lines joins back losslessly") {
    for (const std::string s : {std::string(""), std::string("a"), std::string("a\nb"),
                                std::string("\n"), std::string("a\n\n\nb\n")}) {
        auto lines = split_lines(s);
        std::string joined;
        for (size_t i = 0; i < lines.size(); ++i) {
            if (i > 0) joined += '\n';
            joined += lines[i];
        }
        CHECK(joined == s);
    }
    CHECK(split_lines("").size() == 1);
    CHECK(split_lines("a\n").size() == 2);
}

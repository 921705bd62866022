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

#include "pin/signals.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include "pin/text.hpp"

namespace pin {

struct VocabIndex {
    // Tokens grouped by byte length, probed longest first.
    std::vector<std::pair<size_t, std::unordered_set<std::string>>> by_length;
    size_t max_length = 0;
};

Tokenizer Tokenizer::whitespace() {
    return Tokenizer();
}

Tokenizer Tokenizer::from_vocabulary(std::vector<std::string> tokens, std::string identity) {
    auto index = std::make_shared<VocabIndex>();
    std::unordered_set<std::string> seen;
    for (auto& t : tokens) {
        if (t.empty() || !seen.insert(t).second) continue;
        size_t len = t.size();
        auto it = std::find_if(index->by_length.begin(), index->by_length.end(),
                               [len](const auto& p) { return p.first == len; });
        if (it == index->by_length.end()) {
            index->by_length.push_back({len, {}});
            it = std::prev(index->by_length.end());
        }
        it->second.insert(std::move(t));
        index->max_length = std::max(index->max_length, len);
    }
    if (seen.empty()) throw std::runtime_error("vocabulary holds no tokens");
    std::sort(index->by_length.begin(), index->by_length.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    Tokenizer tok;
    tok.whitespace_mode_ = false;
    tok.identity_ = std::move(identity);
    tok.vocab_ = std::move(index);
    return tok;
}

Tokenizer Tokenizer::from_vocabulary_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open vocabulary file: " + path);
    std::vector<std::string> tokens;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) tokens.push_back(line);
    }
    return from_vocabulary(std::move(tokens), "vocab:" + path);
}

namespace {

// Invokes fn(begin, end) for each token span in text under whitespace mode.
template <typename Fn>
void scan_whitespace_tokens(std::string_view text, Fn&& fn) {
    size_t i = 0;
    size_t tok_begin = std::string_view::npos;
    while (i < text.size()) {
        size_t start = i;
        char32_t cp = decode_scalar(text, i);
        if (is_unicode_whitespace(cp)) {
            if (tok_begin != std::string_view::npos) {
                fn(tok_begin, start);
                tok_begin = std::string_view::npos;
            }
        } else if (tok_begin == std::string_view::npos) {
            tok_begin = start;
        }
    }
    if (tok_begin != std::string_view::npos) fn(tok_begin, text.size());
}

// Invokes fn(begin, end) for each greedy longest-match vocabulary token;
// unmatched positions fall back to a single scalar.
template <typename Fn>
void scan_vocab_tokens(std::string_view text, const VocabIndex& vocab, Fn&& fn) {
    size_t i = 0;
    while (i < text.size()) {
        size_t matched = 0;
        for (const auto& [len, set] : vocab.by_length) {
            if (len > text.size() - i) continue;
            if (set.count(std::string(text.substr(i, len)))) {
                matched = len;
                break;
            }
        }
        if (matched == 0) {
            size_t j = i;
            decode_scalar(text, j);
            matched = j - i;
        }
        fn(i, i + matched);
        i += matched;
    }
}

}  // namespace

std::vector<std::string> Tokenizer::tokenize(std::string_view text) const {
    std::vector<std::string> out;
    auto push = [&](size_t b, size_t e) { out.emplace_back(text.substr(b, e - b)); };
    if (whitespace_mode_) {
        scan_whitespace_tokens(text, push);
    } else {
        scan_vocab_tokens(text, *vocab_, push);
    }
    return out;
}

int64_t Tokenizer::count_tokens(std::string_view text) const {
    int64_t n = 0;
    auto bump = [&](size_t, size_t) { ++n; };
    if (whitespace_mode_) {
        scan_whitespace_tokens(text, bump);
    } else {
        scan_vocab_tokens(text, *vocab_, bump);
    }
    return n;
}

int64_t itif_count(const ModalSequence& seq) {
    int64_t n = 0;
    for (size_t i = 1; i < seq.units.size(); ++i) {
        if (is_text(seq.units[i]) != is_text(seq.units[i - 1])) ++n;
    }
    return n;
}

double itif_normalized(const ModalSequence& seq) {
    if (seq.units.size() < 2) return 0.0;
    return static_cast<double>(itif_count(seq)) /
           static_cast<double>(seq.units.size() - 1);
}

int64_t text_block_count(const ModalSequence& seq) {
    int64_t n = 0;
    for (const auto& u : seq.units) {
        if (is_text(u)) ++n;
    }
    return n;
}

QualitySignals compute_signals(const PinEntry& entry, const Tokenizer& tok) {
    ModalSequence seq = parse_modal_sequence(entry.md);
    QualitySignals qs;
    qs.image_text_interleaving_count = itif_count(seq);
    qs.text_block_count = text_block_count(seq);
    qs.doc_length = scalar_count(entry.md);

    qs.total_token_count = tok.count_tokens(entry.md);

    int64_t block_tokens = 0;
    int64_t block_scalars = 0;
    for (const auto& u : seq.units) {
        if (!is_text(u)) continue;
        const auto& block = std::get<TextBlock>(u).content;
        block_tokens += tok.count_tokens(block);
        block_scalars += scalar_count(block);
    }
    if (qs.text_block_count > 0) {
        qs.avg_tokens_per_text_block =
            static_cast<double>(block_tokens) / static_cast<double>(qs.text_block_count);
        qs.avg_text_block_length =
            static_cast<double>(block_scalars) / static_cast<double>(qs.text_block_count);
    } else {
        qs.avg_tokens_per_text_block = 0.0;
        qs.avg_text_block_length = 0.0;
    }

    MarkupStats ms = compute_markup_stats(entry.md);
    qs.bold_char_count = ms.bold_char_count;
    qs.italic_char_count = ms.italic_char_count;
    qs.title_count = ms.title_count;
    qs.present = (1u << QualitySignals::kFieldCount) - 1;
    return qs;
}

FilterResult signal_filter(const std::vector<PinEntry>& entries,
                           const std::function<bool(const QualitySignals&)>& predicate,
                           bool compute_missing,
                           const Tokenizer& tok) {
    FilterResult res;
    for (const auto& e : entries) {
        if (e.quality_signals.has_value()) {
            if (predicate(*e.quality_signals)) res.entries.push_back(e);
        } else if (compute_missing) {
            QualitySignals qs = compute_signals(e, tok);
            if (predicate(qs)) res.entries.push_back(e);
        } else {
            ++res.skipped_without_signals;
        }
    }
    return res;
}

}  // namespace pin

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

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "pin/model.hpp"

namespace pin {

/// Deterministic text tokenizer. Two built-in modes: whitespace splitting and
/// greedy longest-match over a loaded subword vocabulary with per-scalar
/// fallback. Instances are immutable after construction and shareable across
/// threads.
class Tokenizer {
public:
    /// Splits on Unicode whitespace runs; tokens are the maximal
    /// non-whitespace runs.
    static Tokenizer whitespace();

    /// Loads a vocabulary file: UTF-8, one token per line, blank lines
    /// skipped, first occurrence wins. Throws std::runtime_error when the
    /// file is unreadable or holds no tokens.
    static Tokenizer from_vocabulary_file(const std::string& path);

    /// Vocabulary mode from an in-memory token list (same matching rules).
    static Tokenizer from_vocabulary(std::vector<std::string> tokens, std::string identity);

    const std::string& identity() const { return identity_; }

    std::vector<std::string> tokenize(std::string_view text) const;

    /// Token count without materializing the tokens.
    int64_t count_tokens(std::string_view text) const;

private:
    Tokenizer() = default;

    bool whitespace_mode_ = true;
    std::string identity_ = "whitespace";
    // Vocabulary lookup grouped by byte length, longest first.
    std::shared_ptr<const struct VocabIndex> vocab_;
};

/// Number of adjacent modality changes in the sequence (raw count).
int64_t itif_count(const ModalSequence& seq);

/// Count normalized by the number of adjacent pairs; 0 when the sequence has
/// fewer than two units.
double itif_normalized(const ModalSequence& seq);

/// Number of text-block units.
int64_t text_block_count(const ModalSequence& seq);

/// Computes every signal for an entry: interleaving and block counts over the
/// image-delimited modal sequence, token and character totals, per-block
/// averages, and markup statistics.
QualitySignals compute_signals(const PinEntry& entry, const Tokenizer& tok);

/// Filters entries by a predicate over their quality signals, preserving
/// order. Entries without stored signals are computed on the fly when
/// `compute_missing` is set, otherwise skipped and counted.
struct FilterResult {
    std::vector<PinEntry> entries;
    int64_t skipped_without_signals = 0;
};

FilterResult signal_filter(const std::vector<PinEntry>& entries,
                           const std::function<bool(const QualitySignals&)>& predicate,
                           bool compute_missing = true,
                           const Tokenizer& tok = Tokenizer::whitespace());

}  // namespace pin

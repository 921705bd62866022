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
#include <string>
#include <string_view>

#include "pin/pagination.hpp"

namespace pin {

/// Toolkit-wide settings shared by the command-line tools. Sources stack as
/// defaults < config file < command-line flags.
struct Config {
    PageParams page;

    std::string tokenizer_mode = "whitespace";  // "whitespace" or "vocabulary"
    std::string tokenizer_vocab;                // vocabulary file path

    std::string render_command;  // template with {input} and {output}
    int render_timeout_ms = 30000;
    std::string render_theme = "gfm-light";

    int64_t partition_size = 1000;

    uint64_t seed = 0;
    int jobs = 0;  // 0 = logical CPU count
    bool strict = false;
    bool check_files = false;
};

/// Parses a TOML-subset config file:
///   - `key = value` lines, `[section]` headers prefixing keys as section.key
///   - values: "basic strings" with \\ \" \n \t escapes, 'literal strings',
///     integers, true/false
///   - `#` starts a comment outside of strings; blank lines are skipped
/// Recognized keys: page.n_line, page.n_text, page.n_image, tokenizer.mode,
/// tokenizer.vocabulary, render.command, render.timeout_ms, render.theme,
/// partition.size, run.seed, run.jobs, run.strict, run.check_files.
/// Every field is validated; unknown keys, malformed lines, or out-of-range
/// values throw std::runtime_error naming the line.
Config parse_config(std::string_view text);

/// parse_config over a file's bytes. Throws std::runtime_error when the file
/// cannot be read.
Config load_config_file(const std::string& path);

/// Configuration discovery: an explicit path (from a --config flag) wins,
/// then the PIN_CONFIG environment variable, then ./pin.toml if present,
/// otherwise built-in defaults. An explicit or PIN_CONFIG path that cannot be
/// read is an error; a missing ./pin.toml is not.
Config resolve_config(const std::string& explicit_path = "");

}  // namespace pin

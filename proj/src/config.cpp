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

#include "pin/config.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pin/text.hpp"

namespace pin {

namespace {

[[noreturn]] void fail(int line, const std::string& message) {
    throw std::runtime_error("config line " + std::to_string(line) + ": " + message);
}

// A string, integer, or boolean scalar in source form.
struct RawValue {
    std::string text;
    bool was_string = false;
};

RawValue parse_value(std::string_view v, int line) {
    RawValue out;
    if (v.empty()) fail(line, "missing value");
    if (v[0] == '"') {
        out.was_string = true;
        size_t i = 1;
        for (; i < v.size(); ++i) {
            char c = v[i];
            if (c == '"') break;
            if (c == '\\') {
                if (i + 1 >= v.size()) fail(line, "dangling escape");
                char e = v[++i];
                if (e == 'n') {
                    out.text += '\n';
                } else if (e == 't') {
                    out.text += '\t';
                } else if (e == '"' || e == '\\') {
                    out.text += e;
                } else {
                    fail(line, "unsupported escape \\" + std::string(1, e));
                }
                continue;
            }
            out.text += c;
        }
        if (i >= v.size()) fail(line, "unterminated string");
        if (!trim(v.substr(i + 1)).empty()) fail(line, "trailing content after string");
        return out;
    }
    if (v[0] == '\'') {
        out.was_string = true;
        size_t close = v.find('\'', 1);
        if (close == std::string_view::npos) fail(line, "unterminated string");
        if (!trim(v.substr(close + 1)).empty()) fail(line, "trailing content after string");
        out.text = std::string(v.substr(1, close - 1));
        return out;
    }
    out.text = std::string(v);
    return out;
}

int64_t as_int(const RawValue& v, int line, int64_t lo, int64_t hi) {
    if (v.was_string) fail(line, "expected an integer");
    int64_t n = 0;
    auto [p, ec] = std::from_chars(v.text.data(), v.text.data() + v.text.size(), n);
    if (ec != std::errc{} || p != v.text.data() + v.text.size()) {
        fail(line, "not an integer: " + v.text);
    }
    if (n < lo || n > hi) fail(line, "value out of range: " + v.text);
    return n;
}

bool as_bool(const RawValue& v, int line) {
    if (v.was_string) fail(line, "expected true or false");
    if (v.text == "true") return true;
    if (v.text == "false") return false;
    fail(line, "expected true or false, got " + v.text);
}

std::string as_string(const RawValue& v, int line) {
    if (!v.was_string) fail(line, "expected a quoted string");
    return v.text;
}

}  // namespace

Config parse_config(std::string_view text) {
    Config cfg;
    std::string section;
    int line_no = 0;
    for (std::string_view line : split_lines(text)) {
        ++line_no;
        // Strip comments outside of quotes.
        std::string stripped;
        char quote = 0;
        for (size_t i = 0; i < line.size(); ++i) {
            char c = line[i];
            if (quote != 0) {
                if (c == quote && (quote != '"' || line[i - 1] != '\\')) quote = 0;
            } else if (c == '"' || c == '\'') {
                quote = c;
            } else if (c == '#') {
                break;
            }
            stripped += c;
        }
        std::string_view t = trim(stripped);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']') fail(line_no, "malformed section header");
            section = std::string(trim(t.substr(1, t.size() - 2)));
            if (section.empty()) fail(line_no, "empty section name");
            continue;
        }
        size_t eq = t.find('=');
        if (eq == std::string_view::npos) fail(line_no, "expected key = value");
        std::string key = std::string(trim(t.substr(0, eq)));
        if (key.empty()) fail(line_no, "empty key");
        if (!section.empty()) key = section + "." + key;
        RawValue value = parse_value(trim(t.substr(eq + 1)), line_no);

        if (key == "page.n_line") {
            cfg.page.n_line = as_int(value, line_no, 1, 1'000'000);
        } else if (key == "page.n_text") {
            cfg.page.n_text = as_int(value, line_no, 1, 1'000'000);
        } else if (key == "page.n_image") {
            cfg.page.n_image = as_int(value, line_no, 1, 1'000'000);
        } else if (key == "tokenizer.mode") {
            cfg.tokenizer_mode = as_string(value, line_no);
            if (cfg.tokenizer_mode != "whitespace" && cfg.tokenizer_mode != "vocabulary") {
                fail(line_no, "tokenizer.mode must be whitespace or vocabulary");
            }
        } else if (key == "tokenizer.vocabulary") {
            cfg.tokenizer_vocab = as_string(value, line_no);
        } else if (key == "render.command") {
            cfg.render_command = as_string(value, line_no);
        } else if (key == "render.timeout_ms") {
            cfg.render_timeout_ms =
                static_cast<int>(as_int(value, line_no, 1, 86'400'000));
        } else if (key == "render.theme") {
            cfg.render_theme = as_string(value, line_no);
            if (cfg.render_theme != "gfm-light") {
                fail(line_no, "render.theme must be gfm-light");
            }
        } else if (key == "partition.size") {
            cfg.partition_size = as_int(value, line_no, 1, INT64_MAX);
        } else if (key == "run.seed") {
            cfg.seed = static_cast<uint64_t>(as_int(value, line_no, 0, INT64_MAX));
        } else if (key == "run.jobs") {
            cfg.jobs = static_cast<int>(as_int(value, line_no, 0, 4096));
        } else if (key == "run.strict") {
            cfg.strict = as_bool(value, line_no);
        } else if (key == "run.check_files") {
            cfg.check_files = as_bool(value, line_no);
        } else {
            fail(line_no, "unknown key: " + key);
        }
    }
    if (!cfg.page.valid()) {
        throw std::runtime_error("config: page parameters are inconsistent");
    }
    if (cfg.tokenizer_mode == "vocabulary" && cfg.tokenizer_vocab.empty()) {
        throw std::runtime_error("config: tokenizer.vocabulary path is required");
    }
    return cfg;
}

Config load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

Config resolve_config(const std::string& explicit_path) {
    if (!explicit_path.empty()) return load_config_file(explicit_path);
    if (const char* env = std::getenv("PIN_CONFIG"); env != nullptr && *env != '\0') {
        return load_config_file(env);
    }
    if (std::filesystem::exists("pin.toml")) return load_config_file("pin.toml");
    return Config{};
}

}  // namespace pin

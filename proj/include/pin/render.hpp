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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pin/model.hpp"

namespace pin {

enum class Theme { kGfmLight };

/// External renderer invocation. `command` is a shell command line holding the
/// placeholders {input} (HTML file) and {output} (PNG file); both must appear
/// or the config is invalid. The command runs with the dataset root as working
/// directory so relative content_image paths resolve.
struct RendererConfig {
    std::string command;
    int timeout_ms = 30000;
    Theme theme = Theme::kGfmLight;
    bool force = false;   // re-render entries that already have an overall image
    int parallelism = 4;  // concurrent renderer processes in render_batch

    bool valid() const {
        return command.find("{input}") != std::string::npos &&
               command.find("{output}") != std::string::npos && timeout_ms > 0 &&
               parallelism > 0;
    }
};

enum class RenderFailureKind {
    kNonzeroExit,    // renderer process returned a nonzero status
    kTimeout,        // killed after timeout_ms
    kMissingOutput,  // process succeeded but wrote no output file
    kEmptyOutput,    // output file exists but is not a PNG
    kError,          // internal fault (filesystem, fork)
};

const char* to_string(RenderFailureKind kind);

struct RenderFailure {
    size_t index = 0;  // position in the batch (0 for single renders)
    int64_t entry_id = 0;
    RenderFailureKind kind = RenderFailureKind::kError;
    std::string message;
    std::string log;  // captured renderer stdout + stderr
};

struct RenderResult {
    PinEntry entry;
    bool rendered = false;
    bool skipped = false;  // already had an overall image and force was unset
    std::optional<RenderFailure> failure;
};

struct BatchRenderResult {
    std::vector<PinEntry> entries;  // input order, failed entries unchanged
    std::vector<RenderFailure> failures;
    int64_t rendered = 0;
    int64_t skipped = 0;
};

/// Captured subprocess run. `output` interleaves stdout and stderr in arrival
/// order. A timed-out process is killed together with its process group and
/// reports exit_code -1.
struct CommandResult {
    int exit_code = -1;
    bool timed_out = false;
    std::string output;
};

/// Runs `command` through /bin/sh -c with `working_dir` as current directory,
/// enforcing the timeout with SIGKILL on the process group.
CommandResult run_command(const std::string& command, int timeout_ms,
                          const std::string& working_dir = ".");

/// Renders markdown to a standalone HTML document. The output is a pure
/// function of the input bytes: same input, same bytes out. Supported
/// constructs: ATX headings, paragraphs, bold/italic emphasis (same grammar
/// as the markup counters), fenced code blocks, inline images in HTML and
/// markdown form (src kept relative), pipe tables with an optional separator
/// header row, and embedded HTML passed through verbatim. Everything else is
/// paragraph text. Empty input yields a valid document with an empty body.
std::string markdown_to_html(std::string_view md, Theme theme = Theme::kGfmLight);

/// Produces the page-level overall image for one entry: writes the rendered
/// HTML to a unique temp file under root, substitutes the config placeholders,
/// runs the command, and on success moves the PNG to
/// overall_image/<doc_id>.png (a "-<page_id>" suffix is added for pages past
/// the first) and flips oi_exist/oi_source to true/"compiling" on the returned
/// copy. Any failure leaves the entry unchanged and carries a failure record
/// instead. Entries that already have an overall image are skipped unless
/// cfg.force is set; in particular oi_source "ori" images are never replaced
/// without it. Never touches md or content_image.
/// Throws std::invalid_argument when cfg is invalid or md is empty.
RenderResult render_overall_image(const PinEntry& entry, const RendererConfig& cfg,
                                  const std::string& root);

/// Renders a batch with at most cfg.parallelism concurrent renderer processes.
/// Each entry succeeds or fails in isolation; results attach by input index so
/// the outcome is independent of scheduling. Entries with empty md are counted
/// as failures, not errors. Throws std::invalid_argument when cfg is invalid.
BatchRenderResult render_batch(const std::vector<PinEntry>& entries,
                               const RendererConfig& cfg, const std::string& root);

}  // namespace pin

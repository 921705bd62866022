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

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cctype>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "pin/text.hpp"

namespace pin {

namespace fs = std::filesystem;

const char* to_string(RenderFailureKind kind) {
    switch (kind) {
        case RenderFailureKind::kNonzeroExit: return "nonzero_exit";
        case RenderFailureKind::kTimeout: return "timeout";
        case RenderFailureKind::kMissingOutput: return "missing_output";
        case RenderFailureKind::kEmptyOutput: return "empty_output";
        case RenderFailureKind::kError: return "error";
    }
    return "error";
}

// ---------------------------------------------------------------------------
// Subprocess
// ---------------------------------------------------------------------------

CommandResult run_command(const std::string& command, int timeout_ms,
                          const std::string& working_dir) {
    CommandResult res;
    int fds[2];
    if (pipe(fds) != 0) {
        res.output = "pipe() failed";
        return res;
    }
    pid_t pid = fork();
    if (pid < 0) {
        close(fds[0]);
        close(fds[1]);
        res.output = "fork() failed";
        return res;
    }
    if (pid == 0) {
        setpgid(0, 0);
        if (!working_dir.empty() && chdir(working_dir.c_str()) != 0) _exit(127);
        dup2(fds[1], 1);
        dup2(fds[1], 2);
        close(fds[0]);
        close(fds[1]);
        int devnull = open("/dev/null", O_RDONLY);
        if (devnull >= 0) {
            dup2(devnull, 0);
            close(devnull);
        }
        execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    setpgid(pid, pid);  // also from the parent so the group exists before a kill
    close(fds[1]);
    fcntl(fds[0], F_SETFL, O_NONBLOCK);

    auto deadline = std::chrono::steady_clock::now() +
                    std::chrono::milliseconds(timeout_ms);
    bool eof = false;
    bool have_status = false;
    int status = 0;
    char buf[4096];
    auto drain = [&] {
        ssize_t n;
        while ((n = read(fds[0], buf, sizeof buf)) > 0) {
            res.output.append(buf, static_cast<size_t>(n));
        }
        if (n == 0) eof = true;
    };
    // Pipe EOF can race ahead of the process becoming reapable, so the exit
    // status, not the pipe, decides when to stop waiting.
    for (;;) {
        struct pollfd pf{fds[0], POLLIN, 0};
        if (eof) {
            struct timespec tick{0, 5 * 1000 * 1000};
            nanosleep(&tick, nullptr);
        } else if (poll(&pf, 1, 20) > 0) {
            drain();
        }
        pid_t r = waitpid(pid, &status, WNOHANG);
        if (r == pid) {
            have_status = true;
            break;
        }
        if (r < 0) break;  // reaped elsewhere; status unknowable
        if (std::chrono::steady_clock::now() >= deadline) {
            kill(-pid, SIGKILL);
            if (waitpid(pid, &status, 0) == pid) have_status = true;
            res.timed_out = true;
            break;
        }
    }
    while (!eof) {
        struct pollfd pf{fds[0], POLLIN, 0};
        if (poll(&pf, 1, 50) <= 0) break;  // quiet pipe: orphaned writer holds it
        drain();
    }
    close(fds[0]);
    if (res.timed_out) {
        res.exit_code = -1;
    } else if (have_status && WIFEXITED(status)) {
        res.exit_code = WEXITSTATUS(status);
    } else if (have_status && WIFSIGNALED(status)) {
        res.exit_code = 128 + WTERMSIG(status);
    }
    return res;
}

// ---------------------------------------------------------------------------
// HTML
// ---------------------------------------------------------------------------

namespace {

constexpr char kGfmLightCss[] =
    "body{font-family:-apple-system,'Segoe UI',Helvetica,Arial,sans-serif;"
    "margin:0 auto;max-width:980px;padding:32px;background:#ffffff;"
    "color:#1f2328;line-height:1.5}"
    "h1,h2{border-bottom:1px solid #d1d9e0;padding-bottom:.3em}"
    "pre{background:#f6f8fa;padding:16px;border-radius:6px;overflow:auto}"
    "code{font-family:ui-monospace,SFMono-Regular,Menlo,Consolas,monospace;"
    "font-size:85%}"
    "table{border-collapse:collapse;margin-bottom:16px}"
    "td,th{border:1px solid #d1d9e0;padding:6px 13px}"
    "img{max-width:100%}";

void append_escaped(std::string& out, std::string_view text) {
    for (char c : text) {
        if (c == '&') {
            out += "&amp;";
        } else if (c == '<') {
            out += "&lt;";
        } else if (c == '>') {
            out += "&gt;";
        } else {
            out += c;
        }
    }
}

void append_attr(std::string& out, std::string_view text) {
    for (char c : text) {
        if (c == '&') {
            out += "&amp;";
        } else if (c == '<') {
            out += "&lt;";
        } else if (c == '>') {
            out += "&gt;";
        } else if (c == '"') {
            out += "&quot;";
        } else {
            out += c;
        }
    }
}

// One past the closing '>' of an HTML tag starting at i, or npos when the
// bytes do not form a tag. Quoted attribute values may hold '>' safely.
size_t tag_end(std::string_view s, size_t i) {
    size_t j = i + 1;
    if (j < s.size() && s[j] == '/') ++j;
    if (j >= s.size() || !std::isalpha(static_cast<unsigned char>(s[j]))) {
        return std::string_view::npos;
    }
    while (j < s.size()) {
        char c = s[j];
        if (c == '\'' || c == '"') {
            size_t q = s.find(c, j + 1);
            if (q == std::string_view::npos) return std::string_view::npos;
            j = q + 1;
            continue;
        }
        if (c == '>') return j + 1;
        if (c == '<') return std::string_view::npos;
        ++j;
    }
    return std::string_view::npos;
}

// Emphasis-styled text: <strong>/<em> follow the same span analysis the
// markup counters use, embedded tags pass through verbatim, the rest is
// escaped. Tags are emitted whole, so a style change never splits one.
void append_styled(std::string& out, std::string_view text) {
    EmphasisAnalysis em = analyze_emphasis(text);
    std::vector<char> bold(text.size(), 0);
    std::vector<char> ital(text.size(), 0);
    for (const EmphasisSpan& sp : em.spans) {
        auto& mask = sp.width == 2 ? bold : ital;
        for (size_t k = sp.begin; k < sp.end; ++k) mask[k] = 1;
    }
    bool in_b = false;
    bool in_i = false;
    auto set_style = [&](bool b, bool it) {
        if (b == in_b && it == in_i) return;
        if (in_i) out += "</em>";
        if (in_b && !b) out += "</strong>";
        if (b && !in_b) out += "<strong>";
        if (it) out += "<em>";
        in_b = b;
        in_i = it;
    };
    size_t i = 0;
    while (i < text.size()) {
        if (em.consumed[i]) {
            ++i;
            continue;
        }
        set_style(bold[i] != 0, ital[i] != 0);
        if (text[i] == '<') {
            size_t e = tag_end(text, i);
            if (e != std::string_view::npos) {
                out.append(text.substr(i, e - i));
                i = e;
                continue;
            }
        }
        append_escaped(out, text.substr(i, 1));
        ++i;
    }
    set_style(false, false);
}

// Inline content: image refs become <img> tags (HTML-form refs verbatim),
// everything else goes through emphasis styling.
void append_inline(std::string& out, std::string_view text) {
    ModalSequence seq = parse_modal_sequence(text);
    for (const ModalUnit& u : seq.units) {
        if (is_text(u)) {
            append_styled(out, std::get<TextBlock>(u).content);
            continue;
        }
        const ImageRef& ref = std::get<ImageRef>(u);
        if (!ref.raw.empty() && ref.raw[0] == '<') {
            out += ref.raw;
            continue;
        }
        std::string alt;
        if (starts_with(ref.raw, "![")) {
            size_t close = ref.raw.find(']', 2);
            if (close != std::string::npos) alt = ref.raw.substr(2, close - 2);
        }
        out += "<img src=\"";
        append_attr(out, ref.path);
        out += "\" alt=\"";
        append_attr(out, alt);
        out += "\">";
    }
}

size_t fence_open_len(std::string_view trimmed, char& fence_ch) {
    if (trimmed.size() < 3) return 0;
    char c = trimmed[0];
    if (c != '`' && c != '~') return 0;
    size_t n = 0;
    while (n < trimmed.size() && trimmed[n] == c) ++n;
    if (n < 3) return 0;
    fence_ch = c;
    return n;
}

bool fence_close(std::string_view trimmed, char fence_ch, size_t open_len) {
    size_t n = 0;
    while (n < trimmed.size() && trimmed[n] == fence_ch) ++n;
    return n >= open_len && n == trimmed.size();
}

// Heading level when the line's leading spaces are followed by 1-6 '#' and a
// space; 0 otherwise. Same rule as the title counter.
int heading_level(std::string_view line) {
    size_t i = 0;
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    size_t start = i;
    while (i < line.size() && line[i] == '#') ++i;
    size_t hashes = i - start;
    if (hashes < 1 || hashes > 6) return 0;
    if (i >= line.size() || line[i] != ' ') return 0;
    return static_cast<int>(hashes);
}

bool table_line(std::string_view line) {
    std::string_view t = trim(line);
    return !t.empty() && t[0] == '|';
}

// Raw HTML block: the first non-space byte opens a tag. Lines pass through
// verbatim until the next blank line.
bool html_block_start(std::string_view line) {
    std::string_view t = trim(line);
    return !t.empty() && t[0] == '<' &&
           tag_end(t, 0) != std::string_view::npos;
}

std::vector<std::string> table_cells(std::string_view line) {
    std::string_view t = trim(line);
    if (!t.empty() && t.front() == '|') t.remove_prefix(1);
    if (!t.empty() && t.back() == '|') t.remove_suffix(1);
    std::vector<std::string> cells;
    size_t start = 0;
    while (true) {
        size_t bar = t.find('|', start);
        std::string_view cell =
            bar == std::string_view::npos ? t.substr(start) : t.substr(start, bar - start);
        cells.emplace_back(trim(cell));
        if (bar == std::string_view::npos) break;
        start = bar + 1;
    }
    return cells;
}

bool separator_row(const std::vector<std::string>& cells) {
    if (cells.empty()) return false;
    for (const std::string& c : cells) {
        std::string_view v = c;
        if (!v.empty() && v.front() == ':') v.remove_prefix(1);
        if (!v.empty() && v.back() == ':') v.remove_suffix(1);
        if (v.empty()) return false;
        for (char ch : v) {
            if (ch != '-') return false;
        }
    }
    return true;
}

void append_table(std::string& out, const std::vector<std::string_view>& lines,
                  size_t begin, size_t end) {
    std::vector<std::vector<std::string>> rows;
    for (size_t i = begin; i < end; ++i) rows.push_back(table_cells(lines[i]));
    bool has_header = rows.size() >= 2 && separator_row(rows[1]);
    out += "<table>\n";
    size_t body_start = 0;
    if (has_header) {
        out += "<thead>\n<tr>";
        for (const std::string& c : rows[0]) {
            out += "<th>";
            append_inline(out, c);
            out += "</th>";
        }
        out += "</tr>\n</thead>\n";
        body_start = 2;
    }
    out += "<tbody>\n";
    for (size_t r = body_start; r < rows.size(); ++r) {
        out += "<tr>";
        for (const std::string& c : rows[r]) {
            out += "<td>";
            append_inline(out, c);
            out += "</td>";
        }
        out += "</tr>\n";
    }
    out += "</tbody>\n</table>";
}

void append_paragraph(std::string& out, const std::vector<std::string_view>& lines,
                      size_t begin, size_t end) {
    std::string text;
    for (size_t i = begin; i < end; ++i) {
        if (i > begin) text += '\n';
        text += lines[i];
    }
    out += "<p>";
    append_inline(out, text);
    out += "</p>";
}

}  // namespace

std::string markdown_to_html(std::string_view md, Theme theme) {
    std::string out = "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<style>";
    switch (theme) {
        case Theme::kGfmLight: out += kGfmLightCss; break;
    }
    out += "</style>\n</head>\n<body>\n";

    std::vector<std::string_view> lines = split_lines(md);
    size_t i = 0;
    while (i < lines.size()) {
        std::string_view line = lines[i];
        if (is_blank_line(line)) {
            ++i;
            continue;
        }
        std::string_view trimmed = trim(line);
        char fence_ch = 0;
        size_t open_len = fence_open_len(trimmed, fence_ch);
        if (open_len > 0) {
            std::string info(trim(trimmed.substr(open_len)));
            size_t space = info.find(' ');
            if (space != std::string::npos) info.resize(space);
            ++i;
            std::string body;
            while (i < lines.size()) {
                if (fence_close(trim(lines[i]), fence_ch, open_len)) {
                    ++i;
                    break;
                }
                body += lines[i];
                body += '\n';
                ++i;
            }
            out += "<pre><code";
            if (!info.empty()) {
                out += " class=\"language-";
                append_attr(out, info);
                out += "\"";
            }
            out += ">";
            append_escaped(out, body);
            out += "</code></pre>\n";
            continue;
        }
        if (int level = heading_level(line); level > 0) {
            size_t p = 0;
            while (p < line.size() && (line[p] == ' ' || line[p] == '\t')) ++p;
            p += static_cast<size_t>(level) + 1;  // hashes plus the separator
            std::string_view rest = p < line.size() ? line.substr(p) : std::string_view{};
            out += "<h" + std::to_string(level) + ">";
            append_inline(out, trim(rest));
            out += "</h" + std::to_string(level) + ">\n";
            ++i;
            continue;
        }
        if (table_line(line)) {
            size_t begin = i;
            while (i < lines.size() && table_line(lines[i])) ++i;
            append_table(out, lines, begin, i);
            out += "\n";
            continue;
        }
        if (html_block_start(line)) {
            while (i < lines.size() && !is_blank_line(lines[i])) {
                out += lines[i];
                out += "\n";
                ++i;
            }
            continue;
        }
        // Paragraph: plain lines until a blank or a structural opener.
        size_t begin = i;
        while (i < lines.size() && !is_blank_line(lines[i])) {
            std::string_view t = trim(lines[i]);
            char fc = 0;
            if (fence_open_len(t, fc) > 0) break;
            if (heading_level(lines[i]) > 0) break;
            if (table_line(lines[i])) break;
            ++i;
        }
        append_paragraph(out, lines, begin, i);
        out += "\n";
    }
    out += "</body>\n</html>\n";
    return out;
}

// ---------------------------------------------------------------------------
// Overall image rendering
// ---------------------------------------------------------------------------

namespace {

bool png_bytes(const std::string& bytes) {
    static const char kSig[8] = {'\x89', 'P', 'N', 'G', '\r', '\n', '\x1a', '\n'};
    return bytes.size() >= 8 && std::memcmp(bytes.data(), kSig, 8) == 0;
}

std::string overall_name(const PinEntry& entry) {
    std::string name = entry.meta.doc_id.display();
    if (entry.meta.page_id && *entry.meta.page_id > 0) {
        name += "-" + std::to_string(*entry.meta.page_id);
    }
    return name + ".png";
}

void replace_all(std::string& s, std::string_view from, std::string_view to) {
    size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
}

// Core of one render; the caller has already checked cfg and md.
RenderResult render_one(const PinEntry& entry, const RendererConfig& cfg,
                        const fs::path& root, size_t index) {
    RenderResult res;
    res.entry = entry;
    if (entry.meta.oi_exist && !cfg.force) {
        res.skipped = true;
        return res;
    }
    auto fail = [&](RenderFailureKind kind, std::string message,
                    std::string log = {}) {
        res.failure = RenderFailure{index, entry.id, kind, std::move(message),
                                    std::move(log)};
        return res;
    };

    static std::atomic<uint64_t> counter{0};
    std::string tag = std::to_string(::getpid()) + "-" +
                      std::to_string(counter.fetch_add(1));
    // Substituted paths must stay valid from the renderer's working directory
    // (the root itself), so a relative root has to be absolutized.
    fs::path abs_root = fs::absolute(root);
    fs::path html_path = abs_root / (".render-" + tag + ".html");
    fs::path png_path = abs_root / (".render-" + tag + ".png");
    auto cleanup = [&] {
        std::error_code ec;
        fs::remove(html_path, ec);
        fs::remove(png_path, ec);
    };

    {
        std::ofstream html(html_path, std::ios::binary);
        html << markdown_to_html(entry.md, cfg.theme);
        if (!html) {
            cleanup();
            return fail(RenderFailureKind::kError,
                        "cannot write html to " + html_path.string());
        }
    }
    std::string cmd = cfg.command;
    replace_all(cmd, "{input}", html_path.string());
    replace_all(cmd, "{output}", png_path.string());

    CommandResult run = run_command(cmd, cfg.timeout_ms, root.string());
    if (run.timed_out) {
        cleanup();
        return fail(RenderFailureKind::kTimeout,
                    "renderer timed out after " + std::to_string(cfg.timeout_ms) + "ms",
                    std::move(run.output));
    }
    if (run.exit_code != 0) {
        cleanup();
        return fail(RenderFailureKind::kNonzeroExit,
                    "renderer exited with status " + std::to_string(run.exit_code),
                    std::move(run.output));
    }
    std::error_code ec;
    if (!fs::exists(png_path, ec)) {
        cleanup();
        return fail(RenderFailureKind::kMissingOutput,
                    "renderer produced no output file", std::move(run.output));
    }
    std::string bytes;
    {
        std::ifstream in(png_path, std::ios::binary);
        bytes.assign(std::istreambuf_iterator<char>(in), {});
    }
    if (!png_bytes(bytes)) {
        cleanup();
        return fail(RenderFailureKind::kEmptyOutput,
                    "output is not a PNG (" + std::to_string(bytes.size()) + " bytes)",
                    std::move(run.output));
    }

    fs::create_directories(root / "overall_image", ec);
    std::string name = overall_name(entry);
    fs::rename(png_path, root / "overall_image" / name, ec);
    if (ec) {
        cleanup();
        return fail(RenderFailureKind::kError,
                    "cannot move output into place: " + ec.message());
    }
    std::error_code ignore;
    fs::remove(html_path, ignore);

    res.entry.meta.oi_exist = true;
    res.entry.meta.oi_source = OiSource::kCompiling;
    res.entry.overall_image = {"overall_image/" + name};
    res.entry.overall_image_was_scalar = true;
    res.rendered = true;
    return res;
}

}  // namespace

RenderResult render_overall_image(const PinEntry& entry, const RendererConfig& cfg,
                                  const std::string& root) {
    if (!cfg.valid()) {
        throw std::invalid_argument("renderer command needs {input} and {output}");
    }
    if (entry.md.empty()) {
        throw std::invalid_argument("entry has no markdown body");
    }
    return render_one(entry, cfg, root, 0);
}

BatchRenderResult render_batch(const std::vector<PinEntry>& entries,
                               const RendererConfig& cfg, const std::string& root) {
    if (!cfg.valid()) {
        throw std::invalid_argument("renderer command needs {input} and {output}");
    }
    BatchRenderResult out;
    out.entries = entries;
    std::vector<std::optional<RenderFailure>> failures(entries.size());
    std::vector<char> rendered(entries.size(), 0);
    std::vector<char> skipped(entries.size(), 0);

    std::atomic<size_t> cursor{0};
    auto work = [&] {
        for (size_t i; (i = cursor.fetch_add(1)) < entries.size();) {
            const PinEntry& e = entries[i];
            if (e.md.empty()) {
                failures[i] = RenderFailure{i, e.id, RenderFailureKind::kError,
                                            "entry has no markdown body", ""};
                continue;
            }
            try {
                RenderResult r = render_one(e, cfg, root, i);
                if (r.failure) {
                    failures[i] = std::move(*r.failure);
                } else {
                    out.entries[i] = std::move(r.entry);
                    rendered[i] = r.rendered ? 1 : 0;
                    skipped[i] = r.skipped ? 1 : 0;
                }
            } catch (const std::exception& ex) {
                failures[i] = RenderFailure{i, e.id, RenderFailureKind::kError,
                                            ex.what(), ""};
            }
        }
    };
    size_t workers = std::min<size_t>(static_cast<size_t>(cfg.parallelism),
                                      std::max<size_t>(entries.size(), 1));
    std::vector<std::thread> pool;
    for (size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (std::thread& t : pool) t.join();

    for (size_t i = 0; i < entries.size(); ++i) {
        if (failures[i]) out.failures.push_back(std::move(*failures[i]));
        out.rendered += rendered[i];
        out.skipped += skipped[i];
    }
    return out;
}

}  // namespace pin

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <companion/context.hpp>
#include <companion/session.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace companion::cli
{

enum ExitCode : int
{
    exit_pass = 0,
    exit_failure = 1,
    exit_usage = 2,
};

inline constexpr auto default_continue_prompt = "What will you draw next?";
inline constexpr auto ablation_continue_prompt = "please continue the drawing";

struct IllustrateOptions
{
    std::string prompt;
    std::string backend = "live";
    std::optional<std::string> model;
    LibraryMode mode = LibraryMode::none;
    std::optional<std::filesystem::path> library;
    std::uint64_t seed = 0;
    std::filesystem::path out = "out";
    int max_turns = 12;
    std::string continue_prompt = default_continue_prompt;
    std::string completion_phrase = "complete";
};

enum class StopReason
{
    completed,
    cap_reached,
    backend_failed,
};

struct IllustrateResult
{
    SessionTranscript transcript;
    CanvasState canvas;
    StopReason stop = StopReason::completed;
    std::string error;
};

/// True when a reply ends an illustration: no tool calls and the phrase
/// appears in the text (case-insensitive).
bool signals_completion(const AgentReply& reply, const std::string& phrase);

/// Runs the prompt, then the continuation prompt, until completion or the
/// turn cap. Backend failures stop the loop and are reported in the result.
IllustrateResult illustrate(const IllustrateOptions& options, std::ostream& log);

/// drawing.svg, drawing.pen, canvas.json and transcript.json under `dir`.
void write_artifacts(const std::filesystem::path& dir, const SessionTranscript& transcript, const CanvasState& canvas);

int cmd_illustrate(const IllustrateOptions& options, std::ostream& out, std::ostream& err);

struct AblationOptions
{
    std::vector<std::string> subjects;
    /// May contain {subject} and {mode}; {mode} expands to none, images or images-methods.
    std::string backend = "live";
    std::optional<std::string> model;
    std::filesystem::path library;
    std::uint64_t seed = 0;
    std::filesystem::path out = "ablation";
    int max_turns = 12;
    std::string prompt_template = "draw a {subject}";
    std::string continue_prompt = ablation_continue_prompt;
    std::string completion_phrase = "complete";
};

/// File-name form of a library mode.
std::string mode_slug(LibraryMode mode);
std::string subject_slug(const std::string& subject);

int cmd_ablation(const AblationOptions& options, std::ostream& out, std::ostream& err);

/// Loads canvas.json, or replays transcript.json, whichever `path` holds.
CanvasState load_canvas(const std::filesystem::path& path);

int cmd_verify(const std::filesystem::path& canvas, const std::filesystem::path& script, std::ostream& out, std::ostream& err);

struct ReplayOptions
{
    std::filesystem::path transcript;
    std::optional<std::filesystem::path> out;
    std::optional<std::filesystem::path> check;
};

int cmd_replay(const ReplayOptions& options, std::ostream& out, std::ostream& err);

int cmd_export(const std::filesystem::path& canvas,
               const std::string& format,
               const std::optional<std::filesystem::path>& output,
               std::ostream& out,
               std::ostream& err);

int cmd_instructions(const std::optional<std::filesystem::path>& params, std::ostream& out);
int cmd_schema(std::ostream& out);

struct RectifyOptions
{
    std::filesystem::path photo;
    std::filesystem::path corners;
    std::filesystem::path output;
    int width = 1200;
    int height = 900;
    int tiles = 8;
    double clip_limit = 2.0;
};

int cmd_rectify(const RectifyOptions& options, std::ostream& out, std::ostream& err);

struct BootstrapOptions
{
    std::filesystem::path library;
    std::filesystem::path output;
    std::string backend = "live";
    std::optional<std::string> model;
    BootstrapPrompt prompt = BootstrapPrompt::step_by_step;
    bool overwrite = false;
};

/// Writes a copy of the manifest with drawing methods filled in by the backend.
int cmd_bootstrap(const BootstrapOptions& options, std::ostream& out, std::ostream& err);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace companion::cli

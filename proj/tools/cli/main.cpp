// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include <companion/error.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <iostream>

namespace
{

using namespace companion;
using namespace companion::cli;

const std::map<std::string, LibraryMode> mode_names {
    { "none", LibraryMode::none },
    { "images", LibraryMode::images_only },
    { "images+methods", LibraryMode::images_and_methods },
};

void add_backend_options(CLI::App& cmd, std::string& backend, std::optional<std::string>& model)
{
    cmd.add_option("--backend", backend, "scripted:FILE or live")->capture_default_str();
    cmd.add_option("--model", model, "Model name for the live backend");
}

} // namespace

int main(int argc, char** argv)
{
    auto app = CLI::App { "Companion drawing agent: batch sessions, ablations, verification and export" };
    app.require_subcommand(1);
    std::function<int()> action;

    auto illustrate = IllustrateOptions {};
    std::optional<std::filesystem::path> story;
    auto illustrate_mode = std::string { "none" };
    {
        auto* cmd = app.add_subcommand("illustrate", "Draw from a prompt, looping the continuation prompt");
        auto* prompt = cmd->add_option("--prompt", illustrate.prompt, "Opening request");
        cmd->add_option("--story", story, "File holding the opening request")->check(CLI::ExistingFile)->excludes(prompt);
        add_backend_options(*cmd, illustrate.backend, illustrate.model);
        cmd->add_option("--mode", illustrate_mode, "none, images or images+methods")
            ->check(CLI::IsMember(mode_names))
            ->capture_default_str();
        cmd->add_option("--library", illustrate.library, "Vocabulary manifest")->check(CLI::ExistingFile);
        cmd->add_option("--seed", illustrate.seed, "Session seed")->capture_default_str();
        cmd->add_option("--out", illustrate.out, "Output directory")->capture_default_str();
        cmd->add_option("--max-turns", illustrate.max_turns, "Turn cap")->check(CLI::NonNegativeNumber)->capture_default_str();
        cmd->add_option("--continue-prompt", illustrate.continue_prompt, "Prompt sent after the first turn")
            ->capture_default_str();
        cmd->add_option("--completion-phrase", illustrate.completion_phrase, "Phrase that ends the loop")
            ->capture_default_str();
        cmd->callback([&] {
            illustrate.mode = mode_names.at(illustrate_mode);
            if (story)
                illustrate.prompt = read_text_file(*story);
            if (illustrate.prompt.empty())
                throw CLI::ValidationError("--prompt", "a prompt or --story file is required");
            action = [&] { return cmd_illustrate(illustrate, std::cout, std::cerr); };
        });
    }

    auto ablation = AblationOptions {};
    {
        auto* cmd = app.add_subcommand("ablation", "Draw each subject under the three library modes");
        cmd->add_option("subjects", ablation.subjects, "Subjects to draw");
        cmd->add_option("--backend", ablation.backend, "Backend spec; {subject} and {mode} are expanded")
            ->capture_default_str();
        cmd->add_option("--model", ablation.model, "Model name for the live backend");
        cmd->add_option("--library", ablation.library, "Vocabulary manifest")->required()->check(CLI::ExistingFile);
        cmd->add_option("--seed", ablation.seed, "Shared seed")->capture_default_str();
        cmd->add_option("--out", ablation.out, "Output directory")->capture_default_str();
        cmd->add_option("--max-turns", ablation.max_turns, "Turn cap")->check(CLI::NonNegativeNumber)->capture_default_str();
        cmd->add_option("--prompt-template", ablation.prompt_template, "Opening request")->capture_default_str();
        cmd->add_option("--continue-prompt", ablation.continue_prompt, "Follow-up prompt")->capture_default_str();
        cmd->add_option("--completion-phrase", ablation.completion_phrase, "Phrase that ends the loop")
            ->capture_default_str();
        cmd->callback([&] { action = [&] { return cmd_ablation(ablation, std::cout, std::cerr); }; });
    }

    std::filesystem::path verify_canvas, verify_script;
    {
        auto* cmd = app.add_subcommand("verify", "Check geometric assertions against a canvas or transcript");
        cmd->add_option("canvas", verify_canvas, "canvas.json or transcript.json")->required()->check(CLI::ExistingFile);
        cmd->add_option("script", verify_script, "Assertion script")->required()->check(CLI::ExistingFile);
        cmd->callback([&] { action = [&] { return cmd_verify(verify_canvas, verify_script, std::cout, std::cerr); }; });
    }

    auto replay_options = ReplayOptions {};
    {
        auto* cmd = app.add_subcommand("replay", "Re-execute a transcript with its recorded seeds");
        cmd->add_option("transcript", replay_options.transcript, "transcript.json")->required()->check(CLI::ExistingFile);
        cmd->add_option("--out", replay_options.out, "Write artifacts to this directory");
        cmd->add_option("--check", replay_options.check, "Golden SVG to compare byte for byte")->check(CLI::ExistingFile);
        cmd->callback([&] { action = [&] { return cmd_replay(replay_options, std::cout, std::cerr); }; });
    }

    std::filesystem::path export_canvas;
    std::string export_format = "svg";
    std::optional<std::filesystem::path> export_out;
    {
        auto* cmd = app.add_subcommand("export", "Export a canvas or transcript as SVG or pen program");
        cmd->add_option("canvas", export_canvas, "canvas.json or transcript.json")->required()->check(CLI::ExistingFile);
        cmd->add_option("--format", export_format, "svg or pen")->capture_default_str();
        cmd->add_option("--out", export_out, "Output file (default stdout)");
        cmd->callback([&] {
            action = [&] { return cmd_export(export_canvas, export_format, export_out, std::cout, std::cerr); };
        });
    }

    std::optional<std::filesystem::path> params_path;
    {
        auto* cmd = app.add_subcommand("instructions", "Print the rendered system instructions");
        cmd->add_option("--params", params_path, "Instruction parameters (JSON)")->check(CLI::ExistingFile);
        cmd->callback([&] { action = [&] { return cmd_instructions(params_path, std::cout); }; });
    }
    {
        auto* cmd = app.add_subcommand("schema", "Print the tool schema");
        cmd->callback([&] { action = [&] { return cmd_schema(std::cout); }; });
    }

    auto rectify = RectifyOptions {};
    {
        auto* cmd = app.add_subcommand("rectify", "Rectify and enhance a photographed page");
        cmd->add_option("photo", rectify.photo, "Photo (PNG)")->required()->check(CLI::ExistingFile);
        cmd->add_option("--corners", rectify.corners, "Corner file: four 'x y' lines, TL TR BR BL")
            ->required()
            ->check(CLI::ExistingFile);
        cmd->add_option("--out", rectify.output, "Output PNG")->required();
        cmd->add_option("--width", rectify.width)->check(CLI::PositiveNumber)->capture_default_str();
        cmd->add_option("--height", rectify.height)->check(CLI::PositiveNumber)->capture_default_str();
        cmd->add_option("--tiles", rectify.tiles, "CLAHE tiles per axis")->check(CLI::PositiveNumber)->capture_default_str();
        cmd->add_option("--clip-limit", rectify.clip_limit, "CLAHE clip limit")->capture_default_str();
        cmd->callback([&] { action = [&] { return cmd_rectify(rectify, std::cout, std::cerr); }; });
    }

    auto bootstrap = BootstrapOptions {};
    auto bootstrap_prompt = std::string { "step-by-step" };
    {
        auto* cmd = app.add_subcommand("bootstrap", "Ask the backend for drawing methods of a vocabulary");
        cmd->add_option("library", bootstrap.library, "Vocabulary manifest")->required()->check(CLI::ExistingFile);
        cmd->add_option("--out", bootstrap.output, "Output manifest")->required();
        add_backend_options(*cmd, bootstrap.backend, bootstrap.model);
        cmd->add_option("--prompt", bootstrap_prompt, "step-by-step or versatile")
            ->check(CLI::IsMember({ "step-by-step", "versatile" }))
            ->capture_default_str();
        cmd->add_flag("--overwrite", bootstrap.overwrite, "Replace methods already present");
        cmd->callback([&] {
            bootstrap.prompt = bootstrap_prompt == "versatile" ? BootstrapPrompt::versatile : BootstrapPrompt::step_by_step;
            action = [&] { return cmd_bootstrap(bootstrap, std::cout, std::cerr); };
        });
    }

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        auto const code = app.exit(e);
        return code == 0 ? exit_pass : exit_usage;
    }
    catch (const Error& e)
    {
        fmt::print(stderr, "error: {}: {}\n", to_string(e.code()), e.what());
        return exit_usage;
    }

    try
    {
        return action();
    }
    catch (const Error& e)
    {
        fmt::print(stderr, "error: {}: {}\n", to_string(e.code()), e.what());
        return exit_failure;
    }
    catch (const std::exception& e)
    {
        fmt::print(stderr, "error: {}\n", e.what());
        return exit_failure;
    }
}

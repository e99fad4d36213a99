// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <companion/messages.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace companion
{

class Backend;

enum class LibraryMode
{
    none,
    images_only,
    images_and_methods,
};

/// "none", "images", "images+methods".
std::string_view to_string(LibraryMode mode);
LibraryMode library_mode_from_string(std::string_view text);

struct VocabularyEntry
{
    std::string subject;
    ImageRef image;
    std::optional<std::string> method;
};

struct ContextLibrary
{
    std::vector<VocabularyEntry> entries;
    LibraryMode mode = LibraryMode::none;
};

/// Reads a manifest {"entries": [{"subject", "image", "method"?}]}; image
/// paths are relative to the manifest.
ContextLibrary load_library(const std::filesystem::path& manifest, LibraryMode mode);

/// In-context examples, one user message per entry:
///   images_only:        [image, "<subject> example."]
///   images_and_methods: [image, "<subject> example.", "Method to draw it:", method]
/// Throws MissingMethod when methods are required but absent.
std::vector<Message> assemble_context(const ContextLibrary& library);

enum class BootstrapPrompt
{
    step_by_step,
    versatile,
};

std::string_view bootstrap_prompt_text(BootstrapPrompt prompt);

/// Asks the backend to write a drawing method for `image`; the answer is
/// meant to be stored in a VocabularyEntry.
std::string bootstrap_method_text(const ImageRef& image,
                                  Backend& backend,
                                  BootstrapPrompt prompt = BootstrapPrompt::step_by_step);

} // namespace companion

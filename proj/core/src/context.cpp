// SPDX-License-Identifier: Apache-2.0
#include <companion/backend.hpp>
#include <companion/context.hpp>
#include <companion/error.hpp>

#include <fmt/format.h>

#include <fstream>
#include <iterator>

namespace companion
{

std::string_view to_string(LibraryMode mode)
{
    switch (mode)
    {
        case LibraryMode::none: return "none";
        case LibraryMode::images_only: return "images";
        case LibraryMode::images_and_methods: return "images+methods";
    }
    return "none";
}

LibraryMode library_mode_from_string(std::string_view text)
{
    if (text == "none")
        return LibraryMode::none;
    if (text == "images" || text == "images_only")
        return LibraryMode::images_only;
    if (text == "images+methods" || text == "images_and_methods")
        return LibraryMode::images_and_methods;
    throw Error(ErrorCode::BadConfig, fmt::format("unknown library mode '{}'", text));
}

namespace
{

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path)
{
    auto in = std::ifstream(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::Io, fmt::format("cannot read {}", path.string()));
    return { std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>() };
}

std::string media_type_for(const std::filesystem::path& path)
{
    auto const ext = path.extension().string();
    if (ext == ".jpg" || ext == ".jpeg")
        return "image/jpeg";
    if (ext == ".svg")
        return "image/svg+xml";
    return "image/png";
}

} // namespace

ContextLibrary load_library(const std::filesystem::path& manifest, LibraryMode mode)
{
    auto library = ContextLibrary { {}, mode };
    auto in = std::ifstream(manifest);
    if (!in)
        throw Error(ErrorCode::Io, fmt::format("cannot read {}", manifest.string()));
    auto doc = nlohmann::json {};
    try
    {
        doc = nlohmann::json::parse(in);
    }
    catch (const nlohmann::json::exception& e)
    {
        throw Error(ErrorCode::InvalidDocument, fmt::format("{}: {}", manifest.string(), e.what()));
    }
    if (!doc.contains("entries") || !doc["entries"].is_array())
        throw Error(ErrorCode::InvalidDocument, "library manifest needs an 'entries' array");

    auto const base = manifest.parent_path();
    for (auto const& item: doc["entries"])
    {
        auto entry = VocabularyEntry {};
        entry.subject = item.at("subject").get<std::string>();
        auto const image_path = base / item.at("image").get<std::string>();
        entry.image = ImageRef { image_path.filename().string(), media_type_for(image_path), read_bytes(image_path) };
        if (item.contains("method") && item["method"].is_string())
            entry.method = item["method"].get<std::string>();
        library.entries.push_back(std::move(entry));
    }
    return library;
}

std::vector<Message> assemble_context(const ContextLibrary& library)
{
    auto out = std::vector<Message> {};
    if (library.mode == LibraryMode::none)
        return out;
    for (auto const& entry: library.entries)
    {
        if (entry.image.empty())
            throw Error(ErrorCode::InvalidImage, fmt::format("vocabulary entry '{}' has no image", entry.subject));
        auto message = Message {};
        message.role = Role::user;
        message.parts.push_back(Part::of_image(entry.image));
        message.parts.push_back(Part::of_text(entry.subject + " example."));
        if (library.mode == LibraryMode::images_and_methods)
        {
            if (!entry.method || entry.method->empty())
                throw Error(ErrorCode::MissingMethod,
                            fmt::format("vocabulary entry '{}' has no method", entry.subject),
                            { { "subject", entry.subject } });
            message.parts.push_back(Part::of_text("Method to draw it:"));
            message.parts.push_back(Part::of_text(*entry.method));
        }
        out.push_back(std::move(message));
    }
    return out;
}

std::string_view bootstrap_prompt_text(BootstrapPrompt prompt)
{
    switch (prompt)
    {
        case BootstrapPrompt::step_by_step:
            return "Observe this drawing. Write a simple step-by-step method to draw it roughly. (no text formatting "
                   "in the answers).";
        case BootstrapPrompt::versatile:
            return "Observe this drawing. Write a simple, flexible and versatile method to roughly draw it. (no text "
                   "formatting in the answers).";
    }
    return {};
}

std::string bootstrap_method_text(const ImageRef& image, Backend& backend, BootstrapPrompt prompt)
{
    if (image.empty())
        throw Error(ErrorCode::InvalidImage, "bootstrap needs a non-empty image");
    auto message = Message {};
    message.role = Role::user;
    message.parts.push_back(Part::of_image(image));
    message.parts.push_back(Part::of_text(std::string(bootstrap_prompt_text(prompt))));
    auto const history = std::vector<Message> { std::move(message) };
    auto const reply = backend.generate(history, nlohmann::json { { "function_declarations", nlohmann::json::array() } });
    if (reply.text.empty())
        throw Error(ErrorCode::BackendError, "backend returned no method text");
    return reply.text;
}

} // namespace companion

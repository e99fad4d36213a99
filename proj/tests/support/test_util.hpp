// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <companion/error.hpp>

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include <unistd.h>

namespace testutil
{

/// Code of the companion::Error raised by `fn`; fails the test when nothing is thrown.
inline companion::ErrorCode code_of(auto&& fn)
{
    try
    {
        fn();
    }
    catch (const companion::Error& e)
    {
        return e.code();
    }
    FAIL("no error raised");
    return companion::ErrorCode::Io;
}

inline std::filesystem::path source_path(const std::string& relative)
{
    return std::filesystem::path(COMPANION_SOURCE_DIR) / relative;
}

inline std::string slurp(const std::filesystem::path& path)
{
    auto in = std::ifstream(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "cannot open ", path.string());
    return { std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>() };
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("companion-test-" + name + "-" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace testutil

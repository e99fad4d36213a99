// SPDX-License-Identifier: Apache-2.0
#include <companion/error.hpp>
#include <companion/hershey.hpp>

#include <fmt/format.h>

#include <cctype>
#include <string>

namespace companion::hershey
{

// Generated at configure time from data/futural.jhf.
extern const std::string_view kRomanSimplexJhf;

std::vector<Glyph> parse_jhf(std::string_view text)
{
    auto glyphs = std::vector<Glyph> {};
    auto pending = std::string {};
    auto expected_chars = std::size_t { 0 };

    auto const finish = [&](std::string_view record) {
        auto glyph = Glyph {};
        // columns 0-4 glyph number, 5-7 vertex count, then coordinate pairs
        auto const body = record.substr(8);
        if (body.size() < 2)
            throw Error(ErrorCode::InvalidDocument, "hershey glyph record too short");
        glyph.left = body[0] - 'R';
        glyph.right = body[1] - 'R';
        auto current = std::vector<GlyphPoint> {};
        for (std::size_t i = 2; i + 1 < body.size(); i += 2)
        {
            if (body[i] == ' ' && body[i + 1] == 'R')
            {
                if (!current.empty())
                    glyph.strokes.push_back(std::move(current));
                current.clear();
                continue;
            }
            current.push_back({ body[i] - 'R', body[i + 1] - 'R' });
        }
        if (!current.empty())
            glyph.strokes.push_back(std::move(current));
        glyphs.push_back(std::move(glyph));
    };

    std::size_t pos = 0;
    while (pos < text.size())
    {
        auto const eol = text.find('\n', pos);
        auto line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() : eol + 1;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (line.empty())
            continue;

        if (pending.empty())
        {
            if (line.size() < 8)
                throw Error(ErrorCode::InvalidDocument, fmt::format("bad hershey line '{}'", line));
            auto const count = std::stoul(std::string(line.substr(5, 3)));
            expected_chars = 8 + 2 * count;
        }
        pending += line;
        if (pending.size() >= expected_chars)
        {
            finish(std::string_view(pending).substr(0, expected_chars));
            pending.clear();
        }
    }
    if (!pending.empty())
        throw Error(ErrorCode::InvalidDocument, "truncated hershey glyph record");
    return glyphs;
}

const Glyph* glyph(char c)
{
    static const auto table = parse_jhf(kRomanSimplexJhf);
    auto const code = static_cast<unsigned char>(c);
    if (code < 32 || code > 126)
        return nullptr;
    auto const index = static_cast<std::size_t>(code - 32);
    return index < table.size() ? &table[index] : nullptr;
}

} // namespace companion::hershey

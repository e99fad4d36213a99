// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string_view>
#include <vector>

namespace companion::hershey
{

/// Font units: y grows downwards, the capital line sits at -12 and the
/// baseline at 9.
inline constexpr int kCapLine = -12;
inline constexpr int kBaseLine = 9;

struct GlyphPoint
{
    int x;
    int y;
};

struct Glyph
{
    int left = 0;
    int right = 0;
    std::vector<std::vector<GlyphPoint>> strokes;
};

/// Roman simplex glyph for printable ASCII (32..126); nullopt otherwise.
const Glyph* glyph(char c);

/// Parses the classic .jhf text format.
std::vector<Glyph> parse_jhf(std::string_view text);

} // namespace companion::hershey

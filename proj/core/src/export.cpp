// SPDX-License-Identifier: Apache-2.0
#include <companion/export.hpp>

#include <fmt/format.h>

#include <string>

namespace companion
{

std::string format_coord(double value)
{
    auto text = fmt::format("{:.3f}", value);
    if (text == "-0.000")
        return "0.000";
    return text;
}

namespace
{

std::string escape_xml(std::string_view text)
{
    auto out = std::string {};
    out.reserve(text.size());
    for (auto c: text)
    {
        switch (c)
        {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string format_dim(double value)
{
    // Integral page sizes print without decimals, as the SVG header expects.
    if (value == static_cast<double>(static_cast<long long>(value)))
        return std::to_string(static_cast<long long>(value));
    return format_coord(value);
}

} // namespace

std::string export_svg(const CanvasState& canvas)
{
    auto const w = format_dim(canvas.constraints.width);
    auto const h = format_dim(canvas.constraints.height);

    auto out = std::string {};
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n",
        w,
        h);
    out += "<g fill=\"none\" stroke=\"black\" stroke-width=\"2\" stroke-linecap=\"round\" stroke-linejoin=\"round\">\n";
    for (auto const& element: canvas.elements)
    {
        out += fmt::format("<g id=\"{}\" class=\"{}\"", escape_xml(element.id), to_string(element.author));
        if (!element.label.empty())
            out += fmt::format(" data-label=\"{}\"", escape_xml(element.label));
        out += ">\n";
        for (auto const& stroke: element.strokes)
        {
            out += "<path d=\"";
            auto first = true;
            for (auto const& p: stroke.points())
            {
                out += first ? "M " : " L ";
                out += format_coord(p.x);
                out += ' ';
                out += format_coord(p.y);
                first = false;
            }
            out += "\"/>\n";
        }
        out += "</g>\n";
    }
    out += "</g>\n</svg>\n";
    return out;
}

std::string export_pen_program(const CanvasState& canvas)
{
    auto out = std::string {};
    auto const move = [&out](char cmd, Point p) {
        out += cmd;
        out += ' ';
        out += format_coord(p.x);
        out += ' ';
        out += format_coord(p.y);
        out += '\n';
    };

    auto last = std::optional<Point> {};
    for (auto const& element: canvas.elements)
    {
        for (auto const& stroke: element.strokes)
        {
            auto const& pts = stroke.points();
            move('U', pts.front());
            for (std::size_t i = 1; i < pts.size(); ++i)
                move('D', pts[i]);
            last = pts.back();
        }
    }

    if (last)
        move('U', *last);
    else
        move('U', { canvas.constraints.edge_margin, canvas.constraints.edge_margin });
    return out;
}

} // namespace companion

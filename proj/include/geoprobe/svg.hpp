// Copyright 2026 The geoprobe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// SPDX-License-Identifier: Apache-2.0
//
// Scene <-> SVG 1.1. The writer is byte-deterministic: every numeric
// attribute is formatted with exactly 3 decimal places and elements are
// emitted in paint order. The parser understands exactly the subset the
// writer produces; datasets keep the SVG next to each PNG so ground truth
// can be re-derived from the stored drawing alone.

#pragma once

#include <charconv>
#include <cstdio>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "geoprobe/core.hpp"
#include "geoprobe/scene.hpp"

namespace geoprobe {

namespace detail {

inline std::string fmt3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

inline std::string points_attr(const std::vector<Point>& pts) {
  std::string s;
  for (size_t i = 0; i < pts.size(); ++i) {
    if (i) s.push_back(' ');
    s += fmt3(pts[i].x);
    s.push_back(',');
    s += fmt3(pts[i].y);
  }
  return s;
}

inline std::string style_attrs(const Style& st) {
  std::string s = " fill=\"";
  s += st.fill ? st.fill->hex() : std::string("none");
  s += "\" stroke=\"" + st.stroke.hex() + "\" stroke-width=\"" +
       fmt3(st.stroke_width) + "\"";
  return s;
}

}  // namespace detail

inline std::string scene_to_svg(const Scene& scene) {
  validate_scene(scene);
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(scene.width) + "\" height=\"" +
         std::to_string(scene.height) + "\" viewBox=\"0 0 " +
         std::to_string(scene.width) + " " + std::to_string(scene.height) +
         "\">\n";
  out += "<rect width=\"" + std::to_string(scene.width) + "\" height=\"" +
         std::to_string(scene.height) + "\" fill=\"" + scene.background.hex() +
         "\"/>\n";
  for (const SceneElement& e : scene.elements) {
    const Style& st = e.style;
    struct Visitor {
      std::string& out;
      const Style& st;
      void operator()(const ScenePolyline& p) const {
        out += "<polyline points=\"" + detail::points_attr(p.points) + "\"" +
               detail::style_attrs(st) + "/>\n";
      }
      void operator()(const SceneCircle& c) const {
        out += "<circle cx=\"" + detail::fmt3(c.center.x) + "\" cy=\"" +
               detail::fmt3(c.center.y) + "\" r=\"" + detail::fmt3(c.radius) +
               "\"" + detail::style_attrs(st) + "/>\n";
      }
      void operator()(const SceneSquare& s) const {
        Square sq(s.center, s.half_size, s.rotation);
        out += "<polygon points=\"" + detail::points_attr(sq.corners()) +
               "\"" + detail::style_attrs(st) + "/>\n";
      }
      void operator()(const GlyphRun& g) const {
        double baseline = g.origin.y + kGlyphBaselineRatio * g.font_size;
        out += "<text x=\"" + detail::fmt3(g.origin.x) + "\" y=\"" +
               detail::fmt3(baseline) + "\" font-family=\"monospace\"" +
               " font-size=\"" + detail::fmt3(g.font_size) + "\" fill=\"" +
               st.stroke.hex() + "\">" + detail::xml_escape(g.text) +
               "</text>\n";
      }
      void operator()(const AnnotationEllipse& el) const {
        out += "<ellipse cx=\"" + detail::fmt3(el.center.x) + "\" cy=\"" +
               detail::fmt3(el.center.y) + "\" rx=\"" + detail::fmt3(el.rx) +
               "\" ry=\"" + detail::fmt3(el.ry) + "\"" +
               detail::style_attrs(st) + "/>\n";
      }
    };
    std::visit(Visitor{out, st}, e.shape);
  }
  out += "</svg>\n";
  return out;
}

namespace detail {

struct SvgTag {
  std::string name;
  std::map<std::string, std::string> attrs;
  std::string content;  // inner text, for <text> only
};

inline double parse_double(const std::string& s) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw IoError("svg: bad numeric attribute '" + s + "'");
  return v;
}

inline std::vector<Point> parse_points(const std::string& s) {
  std::vector<Point> pts;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') ++i;
    if (i >= s.size()) break;
    size_t comma = s.find(',', i);
    size_t end = s.find(' ', i);
    if (end == std::string::npos) end = s.size();
    if (comma == std::string::npos || comma > end)
      throw IoError("svg: bad points attribute");
    pts.push_back({parse_double(s.substr(i, comma - i)),
                   parse_double(s.substr(comma + 1, end - comma - 1))});
    i = end;
  }
  return pts;
}

inline std::string xml_unescape(const std::string& s) {
  std::string out;
  for (size_t i = 0; i < s.size();) {
    if (s[i] == '&') {
      if (s.compare(i, 5, "&amp;") == 0) { out += '&'; i += 5; continue; }
      if (s.compare(i, 4, "&lt;") == 0) { out += '<'; i += 4; continue; }
      if (s.compare(i, 4, "&gt;") == 0) { out += '>'; i += 4; continue; }
      if (s.compare(i, 6, "&quot;") == 0) { out += '"'; i += 6; continue; }
    }
    out += s[i++];
  }
  return out;
}

// Minimal scanner for the writer's own output.
inline std::vector<SvgTag> scan_svg(const std::string& text) {
  std::vector<SvgTag> tags;
  size_t pos = 0;
  while ((pos = text.find('<', pos)) != std::string::npos) {
    if (text.compare(pos, 2, "<?") == 0 || text.compare(pos, 2, "</") == 0) {
      pos = text.find('>', pos);
      if (pos == std::string::npos) break;
      continue;
    }
    size_t close = text.find('>', pos);
    if (close == std::string::npos) throw IoError("svg: unterminated tag");
    SvgTag tag;
    size_t name_end = pos + 1;
    while (name_end < close && !isspace(static_cast<unsigned char>(text[name_end])) &&
           text[name_end] != '/' && text[name_end] != '>')
      ++name_end;
    tag.name = text.substr(pos + 1, name_end - pos - 1);
    size_t i = name_end;
    while (i < close) {
      while (i < close && (isspace(static_cast<unsigned char>(text[i])) || text[i] == '/'))
        ++i;
      if (i >= close) break;
      size_t eq = text.find('=', i);
      if (eq == std::string::npos || eq > close) break;
      std::string key = text.substr(i, eq - i);
      if (text[eq + 1] != '"') throw IoError("svg: unquoted attribute");
      size_t vend = text.find('"', eq + 2);
      if (vend == std::string::npos || vend > close)
        throw IoError("svg: unterminated attribute");
      tag.attrs[key] = text.substr(eq + 2, vend - eq - 2);
      i = vend + 1;
    }
    if (text[close - 1] != '/' && tag.name == "text") {
      size_t end_open = text.find("</text>", close);
      if (end_open == std::string::npos) throw IoError("svg: unterminated text");
      tag.content = xml_unescape(text.substr(close + 1, end_open - close - 1));
      pos = end_open + 7;
    } else {
      pos = close + 1;
    }
    tags.push_back(std::move(tag));
  }
  return tags;
}

inline Style style_from_attrs(const SvgTag& tag) {
  Style st;
  auto fill_it = tag.attrs.find("fill");
  if (fill_it != tag.attrs.end() && fill_it->second != "none")
    st.fill = Color::from_hex(fill_it->second);
  auto stroke_it = tag.attrs.find("stroke");
  if (stroke_it != tag.attrs.end()) st.stroke = Color::from_hex(stroke_it->second);
  auto width_it = tag.attrs.find("stroke-width");
  if (width_it != tag.attrs.end())
    st.stroke_width = parse_double(width_it->second);
  return st;
}

inline SceneSquare square_from_corners(const std::vector<Point>& corners) {
  if (corners.size() != 4) throw IoError("svg: polygon is not a square");
  Point center{(corners[0].x + corners[2].x) / 2,
               (corners[0].y + corners[2].y) / 2};
  double side = distance(corners[0], corners[1]);
  Point edge = corners[1] - corners[0];
  double rot = std::atan2(edge.y, edge.x);
  const double quarter = std::numbers::pi / 2;
  rot = std::fmod(std::fmod(rot, quarter) + quarter, quarter);
  if (rot >= quarter) rot = 0;
  return SceneSquare{center, side / 2, rot};
}

}  // namespace detail

// Parses the writer's own SVG output back into a Scene.
inline Scene scene_from_svg(const std::string& text) {
  Scene scene;
  bool saw_svg = false, saw_background = false;
  for (const detail::SvgTag& tag : detail::scan_svg(text)) {
    if (tag.name == "svg") {
      scene.width = static_cast<int>(detail::parse_double(tag.attrs.at("width")));
      scene.height = static_cast<int>(detail::parse_double(tag.attrs.at("height")));
      saw_svg = true;
    } else if (tag.name == "rect" && !saw_background) {
      scene.background = Color::from_hex(tag.attrs.at("fill"));
      saw_background = true;
    } else if (tag.name == "polyline") {
      scene.elements.push_back(
          {ScenePolyline{detail::parse_points(tag.attrs.at("points"))},
           detail::style_from_attrs(tag)});
    } else if (tag.name == "circle") {
      scene.elements.push_back(
          {SceneCircle{{detail::parse_double(tag.attrs.at("cx")),
                        detail::parse_double(tag.attrs.at("cy"))},
                       detail::parse_double(tag.attrs.at("r"))},
           detail::style_from_attrs(tag)});
    } else if (tag.name == "polygon") {
      scene.elements.push_back(
          {detail::square_from_corners(detail::parse_points(tag.attrs.at("points"))),
           detail::style_from_attrs(tag)});
    } else if (tag.name == "ellipse") {
      scene.elements.push_back(
          {AnnotationEllipse{{detail::parse_double(tag.attrs.at("cx")),
                              detail::parse_double(tag.attrs.at("cy"))},
                             detail::parse_double(tag.attrs.at("rx")),
                             detail::parse_double(tag.attrs.at("ry"))},
           detail::style_from_attrs(tag)});
    } else if (tag.name == "text") {
      double font_size = detail::parse_double(tag.attrs.at("font-size"));
      Point origin{detail::parse_double(tag.attrs.at("x")),
                   detail::parse_double(tag.attrs.at("y")) -
                       kGlyphBaselineRatio * font_size};
      GlyphRun run{tag.content, origin, font_size};
      Style st;
      st.stroke = Color::from_hex(tag.attrs.at("fill"));
      st.stroke_width = 1.0;
      scene.elements.push_back({run, st});
    } else if (tag.name != "rect") {
      throw IoError("svg: unsupported element <" + tag.name + ">");
    }
  }
  if (!saw_svg) throw IoError("svg: missing <svg> root");
  return scene;
}

}  // namespace geoprobe

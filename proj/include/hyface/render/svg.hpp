#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "hyface/core/format.hpp"
#include "hyface/render/scene.hpp"

namespace hyface::vg {

namespace detail {

inline std::string attr(const char* name, double v) { return std::string(" ") + name + "=\"" + fixed(v) + "\""; }

inline std::string attr(const char* name, const std::string& v) {
  return std::string(" ") + name + "=\"" + v + "\"";
}

inline std::string paint(const Primitive& p) {
  std::string s = attr("fill", p.fill) + attr("stroke", p.stroke);
  if (p.stroke != "none") s += attr("stroke-width", p.stroke_width);
  return s;
}

inline std::string transform(const Primitive& p) {
  if (p.rotation_deg == 0.0) return {};
  return " transform=\"rotate(" + fixed(p.rotation_deg) + " " + fixed(p.center.x) + " " + fixed(p.center.y) +
         ")\"";
}

inline std::string element(const Primitive& p) {
  std::string id = std::string(to_string(p.part));
  if (p.side != Side::none) id += "-" + std::string(to_string(p.side));
  const std::string cls = attr("class", id);
  switch (p.shape) {
    case Shape::circle:
      return "<circle" + cls + attr("cx", p.center.x) + attr("cy", p.center.y) + attr("r", p.width / 2) +
             paint(p) + "/>";
    case Shape::ellipse:
      return "<ellipse" + cls + attr("cx", p.center.x) + attr("cy", p.center.y) + attr("rx", p.width / 2) +
             attr("ry", p.height / 2) + paint(p) + transform(p) + "/>";
    case Shape::rounded_rect:
      return "<rect" + cls + attr("x", p.center.x - p.width / 2) + attr("y", p.center.y - p.height / 2) +
             attr("width", p.width) + attr("height", p.height) + attr("rx", p.corner_radius) + paint(p) +
             transform(p) + "/>";
    case Shape::cubic_curve: {
      const auto& c = p.ctrl;
      const std::string d = "M " + fixed(c[0].x) + " " + fixed(c[0].y) + " C " + fixed(c[1].x) + " " +
                            fixed(c[1].y) + " " + fixed(c[2].x) + " " + fixed(c[2].y) + " " + fixed(c[3].x) +
                            " " + fixed(c[3].y);
      return "<path" + cls + attr("d", d) + paint(p) + attr("stroke-linecap", std::string("round")) + "/>";
    }
    case Shape::line_segment: {
      const double h = p.width / 2;
      return "<line" + cls + attr("x1", p.center.x - h) + attr("y1", p.center.y) + attr("x2", p.center.x + h) +
             attr("y2", p.center.y) + paint(p) + attr("stroke-linecap", std::string("round")) + transform(p) +
             "/>";
    }
  }
  return {};
}

}  // namespace detail

/// Standalone SVG document, one element per primitive in z order. Numbers use
/// fixed six-decimal formatting so equal scenes serialize to identical bytes.
inline std::string to_vector_text(const SceneGraph& scene) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\"" +
         detail::attr("width", fixed(scene.width) + "mm") + detail::attr("height", fixed(scene.height) + "mm") +
         detail::attr("viewBox", "0 0 " + fixed(scene.width) + " " + fixed(scene.height)) + ">\n";
  for (const auto& p : scene.primitives) out += "  " + detail::element(p) + "\n";
  out += "</svg>\n";
  return out;
}

inline nlohmann::json to_json(const Primitive& p) {
  nlohmann::json j{{"shape", to_string(p.shape)},
                   {"part", to_string(p.part)},
                   {"side", to_string(p.side)},
                   {"z", p.z},
                   {"fill", p.fill},
                   {"stroke", p.stroke},
                   {"stroke_width", p.stroke_width}};
  if (p.shape == Shape::cubic_curve) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& c : p.ctrl) pts.push_back({c.x, c.y});
    j["ctrl"] = pts;
  } else {
    j["cx"] = p.center.x;
    j["cy"] = p.center.y;
    j["width"] = p.width;
    j["height"] = p.height;
    j["rotation_deg"] = p.rotation_deg;
    if (p.shape == Shape::rounded_rect) j["corner_radius"] = p.corner_radius;
  }
  return j;
}

// Structured form of a scene for the UI frame stream.
inline nlohmann::json to_json(const SceneGraph& s) {
  nlohmann::json prims = nlohmann::json::array();
  for (const auto& p : s.primitives) prims.push_back(to_json(p));
  return {{"width", s.width}, {"height", s.height}, {"primitives", prims}};
}

}  // namespace hyface::vg

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

namespace hyface::vg {

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

enum class Shape { ellipse, circle, rounded_rect, cubic_curve, line_segment };

// Facial feature a primitive belongs to.
enum class Part { background, face_outline, nose, sclera, iris, pupil, lid, brow, mouth };

enum class Side { none, left, right };

constexpr std::string_view to_string(Shape s) {
  constexpr std::array<std::string_view, 5> names{"ellipse", "circle", "rounded_rect", "cubic_curve",
                                                  "line_segment"};
  return names[static_cast<std::size_t>(s)];
}

constexpr std::string_view to_string(Part p) {
  constexpr std::array<std::string_view, 9> names{"background", "face_outline", "nose", "sclera", "iris",
                                                  "pupil",      "lid",          "brow", "mouth"};
  return names[static_cast<std::size_t>(p)];
}

constexpr std::string_view to_string(Side s) {
  constexpr std::array<std::string_view, 3> names{"none", "left", "right"};
  return names[static_cast<std::size_t>(s)];
}

/// One drawable element. Geometry interpretation depends on `shape`:
///   ellipse       center, width/height are full diameters, rotated about center
///   circle        center, width is the diameter
///   rounded_rect  center, width/height, corner_radius, rotated about center
///   cubic_curve   ctrl[0..3] bezier control points
///   line_segment  center, width is the length, rotated about center
struct Primitive {
  Shape shape = Shape::circle;
  Part part = Part::background;
  Side side = Side::none;
  Point center{};
  double width = 0.0;
  double height = 0.0;
  double corner_radius = 0.0;
  double rotation_deg = 0.0;
  std::array<Point, 4> ctrl{};
  std::string fill = "none";
  std::string stroke = "none";
  double stroke_width = 0.0;
  int z = 0;

  bool operator==(const Primitive&) const = default;
};

struct BoundingBox {
  double min_x, min_y, max_x, max_y;
};

namespace detail {
inline Point rotate_about(Point p, Point c, double deg) {
  const double r = deg * std::numbers::pi / 180.0;
  const double cs = std::cos(r), sn = std::sin(r);
  const double dx = p.x - c.x, dy = p.y - c.y;
  return {c.x + dx * cs - dy * sn, c.y + dx * sn + dy * cs};
}
}  // namespace detail

// Conservative extent including half the stroke width.
inline BoundingBox bounds(const Primitive& p) {
  std::vector<Point> pts;
  switch (p.shape) {
    case Shape::circle: {
      const double r = p.width / 2;
      pts = {{p.center.x - r, p.center.y - r}, {p.center.x + r, p.center.y + r}};
      break;
    }
    case Shape::ellipse: {
      const double r = std::max(p.width, p.height) / 2;
      const double rx = p.rotation_deg == 0.0 ? p.width / 2 : r;
      const double ry = p.rotation_deg == 0.0 ? p.height / 2 : r;
      pts = {{p.center.x - rx, p.center.y - ry}, {p.center.x + rx, p.center.y + ry}};
      break;
    }
    case Shape::rounded_rect: {
      const double hw = p.width / 2, hh = p.height / 2;
      for (Point corner : {Point{-hw, -hh}, Point{hw, -hh}, Point{hw, hh}, Point{-hw, hh}})
        pts.push_back(detail::rotate_about({p.center.x + corner.x, p.center.y + corner.y}, p.center,
                                           p.rotation_deg));
      break;
    }
    case Shape::cubic_curve:
      pts.assign(p.ctrl.begin(), p.ctrl.end());
      break;
    case Shape::line_segment: {
      const double h = p.width / 2;
      pts = {detail::rotate_about({p.center.x - h, p.center.y}, p.center, p.rotation_deg),
             detail::rotate_about({p.center.x + h, p.center.y}, p.center, p.rotation_deg)};
      break;
    }
  }
  BoundingBox b{pts[0].x, pts[0].y, pts[0].x, pts[0].y};
  for (const auto& q : pts) {
    b.min_x = std::min(b.min_x, q.x);
    b.min_y = std::min(b.min_y, q.y);
    b.max_x = std::max(b.max_x, q.x);
    b.max_y = std::max(b.max_y, q.y);
  }
  const double s = p.stroke == "none" ? 0.0 : p.stroke_width / 2;
  return {b.min_x - s, b.min_y - s, b.max_x + s, b.max_y + s};
}

/// Canvas plus primitives in ascending z. z values are unique.
struct SceneGraph {
  double width = 0.0;
  double height = 0.0;
  std::vector<Primitive> primitives;

  bool operator==(const SceneGraph&) const = default;

  std::size_t count(Part part) const {
    return static_cast<std::size_t>(
        std::count_if(primitives.begin(), primitives.end(), [&](const auto& p) { return p.part == part; }));
  }

  const Primitive* find(Part part, Side side) const {
    for (const auto& p : primitives)
      if (p.part == part && p.side == side) return &p;
    return nullptr;
  }
};

inline bool inside_canvas(const SceneGraph& s, const Primitive& p) {
  const auto b = bounds(p);
  return b.min_x >= 0.0 && b.min_y >= 0.0 && b.max_x <= s.width && b.max_y <= s.height;
}

}  // namespace hyface::vg

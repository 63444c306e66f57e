#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "hyface/core/error.hpp"
#include "hyface/face/face_state.hpp"
#include "hyface/render/geometry.hpp"
#include "hyface/render/scene.hpp"

namespace hyface::vg {

enum class RenderMode { hybrid_full, eyes_only };

constexpr std::string_view to_string(RenderMode m) {
  return m == RenderMode::hybrid_full ? "hybrid_full" : "eyes_only";
}

inline std::optional<RenderMode> parse_render_mode(std::string_view s) {
  if (s == "hybrid_full") return RenderMode::hybrid_full;
  if (s == "eyes_only") return RenderMode::eyes_only;
  return std::nullopt;
}

namespace detail {

struct EyeParams {
  Side side;
  double cx, cy;
  double lid_open;
  double brow_angle;
  double sclera_scale;
  double lid_slant_deg;
};

// The left brow sits on the viewer's left, so its inner end is its right end.
// Positive SVG rotation is clockwise, which lowers the right end.
inline double brow_rotation(Side side, double brow_angle, double max_deg) {
  return side == Side::left ? -brow_angle * max_deg : brow_angle * max_deg;
}

inline void emit_eye(SceneGraph& scene, const FaceState& s, const EyeParams& e, const Geometry& g,
                     const char* lid_color) {
  const double r_sclera = g.sclera_diameter * e.sclera_scale / 2;
  const double r_iris = g.iris_diameter / 2;
  const double travel = r_sclera - r_iris - g.iris_margin;

  Primitive sclera;
  sclera.shape = Shape::circle;
  sclera.part = Part::sclera;
  sclera.side = e.side;
  sclera.center = {e.cx, e.cy};
  sclera.width = 2 * r_sclera;
  sclera.fill = g.sclera_color;
  scene.primitives.push_back(sclera);

  // Fully closed lid hides iris and pupil; they are culled rather than drawn under the lid.
  if (e.lid_open > 0.0) {
    // Gaze vector is limited to the unit disc so diagonal gaze keeps the iris inside.
    const double gaze = std::max(1.0, std::hypot(s.eye_yaw, s.eye_pitch));
    const Point c{e.cx + s.eye_yaw / gaze * travel, e.cy - s.eye_pitch / gaze * travel};
    Primitive iris;
    iris.shape = Shape::circle;
    iris.part = Part::iris;
    iris.side = e.side;
    iris.center = c;
    iris.width = g.iris_diameter;
    iris.fill = g.iris_color;
    scene.primitives.push_back(iris);

    Primitive pupil;
    pupil.shape = Shape::circle;
    pupil.part = Part::pupil;
    pupil.side = e.side;
    pupil.center = c;
    pupil.width = s.pupil * g.iris_diameter;
    pupil.fill = g.pupil_color;
    scene.primitives.push_back(pupil);
  }

  // Lid: a skin-coloured rectangle hanging from above the eye, covering the top
  // (1 - lid_open) of the sclera plus the overhang needed for slant.
  const double width = g.lid_width_factor * 2 * r_sclera;
  const double slant_allowance =
      (width / 2) * std::sin(std::abs(e.lid_slant_deg) * std::numbers::pi / 180.0);
  const double top = e.cy - r_sclera - g.lid_margin;
  const double height = g.lid_margin + (1.0 - e.lid_open) * (2 * r_sclera + g.lid_margin + slant_allowance);
  Primitive lid;
  lid.shape = Shape::rounded_rect;
  lid.part = Part::lid;
  lid.side = e.side;
  lid.center = {e.cx, top + height / 2};
  lid.width = width;
  lid.height = height;
  lid.corner_radius = std::min(4.0, height / 2);
  lid.rotation_deg = e.lid_slant_deg;
  lid.fill = lid_color;
  scene.primitives.push_back(lid);
}

inline void emit_brow(SceneGraph& scene, Side side, double cx, double eye_y, double angle,
                      double height, const Geometry& g) {
  Primitive brow;
  brow.shape = Shape::line_segment;
  brow.part = Part::brow;
  brow.side = side;
  brow.center = {cx, eye_y - g.brow_offset - g.brow_travel * height};
  brow.width = g.brow_length;
  brow.rotation_deg = brow_rotation(side, angle, g.brow_max_deg);
  brow.stroke = g.brow_color;
  brow.stroke_width = g.brow_width;
  scene.primitives.push_back(brow);
}

inline void emit_mouth(SceneGraph& scene, const FaceState& s, const Geometry& g) {
  const double cx = g.canvas_width / 2;
  const double hw = g.mouth_min_half_width + g.mouth_width_travel * s.mouth_width;
  const double corner_y = g.mouth_y - g.mouth_corner_travel * s.mouth_corner_height;
  const Point left{cx - hw, corner_y};
  const Point right{cx + hw, corner_y};

  Primitive upper;
  upper.shape = Shape::cubic_curve;
  upper.part = Part::mouth;
  upper.side = Side::none;
  const double uy = g.mouth_y - g.lip_top_travel * s.lip_open_top;
  upper.ctrl = {left, Point{cx - hw / 2, uy}, Point{cx + hw / 2, uy}, right};
  upper.stroke = g.mouth_color;
  upper.stroke_width = g.mouth_stroke;
  scene.primitives.push_back(upper);

  Primitive lower = upper;
  const double ly = g.mouth_y + g.lip_bottom_travel * s.lip_open_bottom;
  lower.ctrl = {left, Point{cx - hw / 2, ly}, Point{cx + hw / 2, ly}, right};
  scene.primitives.push_back(lower);
}

inline void emit_face_decoration(SceneGraph& scene, const Geometry& g) {
  Primitive face;
  face.shape = Shape::ellipse;
  face.part = Part::face_outline;
  face.center = {g.canvas_width / 2, g.canvas_height / 2};
  face.width = 2 * g.face_rx;
  face.height = 2 * g.face_ry;
  face.fill = g.skin;
  face.stroke = g.outline;
  face.stroke_width = 3.0;
  scene.primitives.push_back(face);

  const double cx = g.canvas_width / 2;
  Primitive nose;
  nose.shape = Shape::cubic_curve;
  nose.part = Part::nose;
  nose.ctrl = {Point{cx, g.eye_y + 20}, Point{cx - 4, g.eye_y + 50}, Point{cx - 16, g.eye_y + 70},
               Point{cx + 2, g.eye_y + 76}};
  nose.stroke = g.outline;
  nose.stroke_width = 3.0;
  scene.primitives.push_back(nose);
}

}  // namespace detail

/// Maps a face state to a 2-D scene. Pure: equal inputs give equal scenes.
inline SceneGraph render(const FaceState& state, RenderMode mode, const Geometry& g = default_geometry()) {
  validate(state);
  SceneGraph scene;
  scene.width = g.canvas_width;
  scene.height = g.canvas_height;

  if (mode == RenderMode::hybrid_full) {
    detail::emit_face_decoration(scene, g);
    const double lx = g.canvas_width / 2 - g.eye_spacing / 2;
    const double rx = g.canvas_width / 2 + g.eye_spacing / 2;
    detail::emit_eye(scene, state, {Side::left, lx, g.eye_y, state.lid_open_left, 0.0, 1.0, 0.0}, g, g.skin);
    detail::emit_eye(scene, state, {Side::right, rx, g.eye_y, state.lid_open_right, 0.0, 1.0, 0.0}, g, g.skin);
    detail::emit_brow(scene, Side::left, lx, g.eye_y, state.brow_angle_left, state.brow_height_left, g);
    detail::emit_brow(scene, Side::right, rx, g.eye_y, state.brow_angle_right, state.brow_height_right, g);
    detail::emit_mouth(scene, state, g);
  } else {
    Primitive bg;
    bg.shape = Shape::rounded_rect;
    bg.part = Part::background;
    bg.center = {g.canvas_width / 2, g.canvas_height / 2};
    bg.width = g.canvas_width;
    bg.height = g.canvas_height;
    bg.corner_radius = 24.0;
    bg.fill = g.screen;
    scene.primitives.push_back(bg);

    const double mean_height = 0.5 * (state.brow_height_left + state.brow_height_right);
    const double scale = 1.0 + g.miko_max_eye_scale * std::max(mean_height, 0.0);
    const double lx = g.canvas_width / 2 - g.miko_eye_spacing / 2;
    const double rx = g.canvas_width / 2 + g.miko_eye_spacing / 2;
    detail::emit_eye(scene, state,
                     {Side::left, lx, g.miko_eye_y, state.lid_open_left, state.brow_angle_left, scale,
                      detail::brow_rotation(Side::left, state.brow_angle_left, g.miko_lid_slant_deg)},
                     g, g.screen);
    detail::emit_eye(scene, state,
                     {Side::right, rx, g.miko_eye_y, state.lid_open_right, state.brow_angle_right, scale,
                      detail::brow_rotation(Side::right, state.brow_angle_right, g.miko_lid_slant_deg)},
                     g, g.screen);
  }

  // Paint order is emission order; z is the rank within it.
  for (std::size_t i = 0; i < scene.primitives.size(); ++i) scene.primitives[i].z = static_cast<int>(i);
  return scene;
}

}  // namespace hyface::vg

#pragma once

namespace hyface::vg {

/// Every layout constant of the face renderer, in millimetre-equivalent canvas
/// units. Only the eye dimensions come from the physical robot (85 mm sclera,
/// 45 mm iris); the rest is tuned for legibility.
struct Geometry {
  double canvas_width = 400.0;
  double canvas_height = 300.0;

  double sclera_diameter = 85.0;
  double iris_diameter = 45.0;
  double iris_margin = 2.0;  // iris never touches the sclera rim

  // hybrid_full layout
  double eye_spacing = 160.0;  // centre-to-centre
  double eye_y = 130.0;
  double face_rx = 190.0;
  double face_ry = 145.0;
  double brow_offset = 62.0;  // above eye centre at brow_height = 0
  double brow_travel = 15.0;  // per unit brow_height
  double brow_length = 70.0;
  double brow_width = 8.0;
  double brow_max_deg = 25.0;  // at |brow_angle| = 1
  double mouth_y = 240.0;
  double mouth_min_half_width = 30.0;
  double mouth_width_travel = 40.0;
  double mouth_corner_travel = 18.0;
  double lip_top_travel = 20.0;
  double lip_bottom_travel = 25.0;
  double mouth_stroke = 5.0;

  // eyes_only layout: no brows or mouth; brow_angle becomes lid slant and the
  // mean positive brow height enlarges the eye white (surprise reads as wide eyes).
  double miko_eye_spacing = 180.0;
  double miko_eye_y = 150.0;
  double miko_lid_slant_deg = 20.0;
  double miko_max_eye_scale = 0.25;

  // Lid rectangle overhang, so a closed or slanted lid still covers the white.
  double lid_margin = 6.0;
  double lid_width_factor = 1.3;  // times sclera diameter

  const char* skin = "#e9cdb4";
  const char* outline = "#5b4636";
  const char* sclera_color = "#ffffff";
  const char* iris_color = "#4f8fd6";
  const char* pupil_color = "#101010";
  const char* brow_color = "#3a2a1e";
  const char* mouth_color = "#9c3b3b";
  const char* screen = "#111418";
};

inline const Geometry& default_geometry() {
  static const Geometry g;
  return g;
}

}  // namespace hyface::vg

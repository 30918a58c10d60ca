#pragma once

namespace hoikit {

/// Axis-aligned box in absolute pixel coordinates, origin top-left.
/// Constructed boxes are canonical: x1 <= x2 and y1 <= y2.
struct BBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  /// Orders each axis by min/max, so swapped corners are accepted.
  static BBox canonical(double ax, double ay, double bx, double by);

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }
  bool degenerate() const { return !(area() > 0.0); }

  bool operator==(const BBox&) const = default;
};

/// Clamps a canonical box to [0,width]x[0,height].
BBox clamp_to_image(const BBox& box, double width, double height);

/// Intersection over union; 0 when the union is empty.
double iou(const BBox& a, const BBox& b);

struct BoxPair {
  BBox human;
  BBox object;
};

/// Mean of the human-box IoU and the object-box IoU.
double pair_similarity(const BoxPair& pred, const BoxPair& gt);

}  // namespace hoikit

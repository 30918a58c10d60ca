#include "hoikit/box.hpp"

#include <algorithm>

namespace hoikit {

BBox BBox::canonical(double ax, double ay, double bx, double by) {
  return BBox{std::min(ax, bx), std::min(ay, by), std::max(ax, bx), std::max(ay, by)};
}

BBox clamp_to_image(const BBox& box, double width, double height) {
  auto clamp = [](double v, double hi) { return std::clamp(v, 0.0, hi); };
  return BBox{clamp(box.x1, width), clamp(box.y1, height), clamp(box.x2, width), clamp(box.y2, height)};
}

double iou(const BBox& a, const BBox& b) {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  const double inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
  const double uni = a.area() + b.area() - inter;
  if (!(uni > 0.0)) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double pair_similarity(const BoxPair& pred, const BoxPair& gt) {
  return 0.5 * (iou(pred.human, gt.human) + iou(pred.object, gt.object));
}

}  // namespace hoikit

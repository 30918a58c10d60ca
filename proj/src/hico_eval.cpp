#include "hoikit/hico_eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <unordered_map>

#include "hoikit/parallel.hpp"

namespace hoikit {

namespace {

std::optional<BBox> box_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array() || j.at(key).size() != 4) return std::nullopt;
  double v[4];
  for (int i = 0; i < 4; ++i) {
    if (!j.at(key)[i].is_number()) return std::nullopt;
    v[i] = j.at(key)[i].get<double>();
    if (!std::isfinite(v[i])) return std::nullopt;
  }
  return BBox::canonical(v[0], v[1], v[2], v[3]);
}

std::string join_ids(const std::vector<std::string>& ids) {
  std::string s;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) s += ", ";
    s += ids[i];
  }
  return s;
}

std::optional<double> mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return std::nullopt;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

MapCells aggregate(const std::vector<std::optional<double>>& aps, const std::set<HoiId>& rare) {
  std::vector<double> all, r, nr;
  for (std::size_t c = 0; c < aps.size(); ++c) {
    if (!aps[c]) continue;
    all.push_back(*aps[c]);
    (rare.count(static_cast<HoiId>(c)) ? r : nr).push_back(*aps[c]);
  }
  return MapCells{mean_of(all), mean_of(r), mean_of(nr)};
}

double rounded(double x, double scale) { return std::round(x * scale) / scale; }

nlohmann::ordered_json cell_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  return rounded(*v * 100.0, 1e6);
}

nlohmann::ordered_json cells_json(const MapCells& cells) {
  return {{"full", cell_json(cells.full)}, {"rare", cell_json(cells.rare)}, {"non_rare", cell_json(cells.non_rare)}};
}

std::string cell_text(const std::optional<double>& v) {
  char buf[32];
  if (v) {
    std::snprintf(buf, sizeof buf, "%10.2f", *v * 100.0);
  } else {
    std::snprintf(buf, sizeof buf, "%10s", "-");
  }
  return buf;
}

}  // namespace

const char* to_string(ScoreMode mode) { return mode == ScoreMode::output_order ? "output-order" : "constant"; }

ScoreMode score_mode_from_string(const std::string& s) {
  if (s == "output-order") return ScoreMode::output_order;
  if (s == "constant") return ScoreMode::constant;
  throw std::invalid_argument("unknown score mode '" + s + "' (expected output-order or constant)");
}

UnknownImageError::UnknownImageError(std::vector<std::string> ids)
    : std::runtime_error("predictions reference unknown image ids: " + join_ids(ids)), ids_(std::move(ids)) {}

std::vector<PredictionTriplet> expand_triplets(const ParsedCompletion& parsed, std::string_view image_id,
                                               const Vocabulary& vocab, ScoreMode mode) {
  std::vector<PredictionTriplet> out;
  if (!parsed.has_answer_tag) return out;
  for (std::size_t rank = 0; rank < parsed.instances.size(); ++rank) {
    const auto& inst = parsed.instances[rank];
    if (!inst.human || !inst.object || !inst.object_class) continue;
    const auto obj = vocab.resolve_object(*inst.object_class);
    if (!obj) continue;
    const double score = mode == ScoreMode::output_order ? 1.0 - static_cast<double>(rank) * kRankStep : 1.0;
    std::vector<HoiId> seen;
    for (const auto& v : inst.verb_classes) {
      const auto verb = vocab.resolve_verb(v);
      if (!verb) continue;
      const auto cat = vocab.hoi_category(*verb, *obj);
      if (!cat || std::find(seen.begin(), seen.end(), *cat) != seen.end()) continue;
      seen.push_back(*cat);
      out.push_back(PredictionTriplet{std::string(image_id), *inst.human, *inst.object, *cat, score});
    }
  }
  return out;
}

std::vector<bool> match_image(std::span<const PredictionTriplet> preds, std::span<const GtPair> gt,
                              const HoiTriple& category, double iou_threshold) {
  std::vector<std::size_t> candidates;
  for (std::size_t g = 0; g < gt.size(); ++g) {
    const auto& p = gt[g];
    if (p.object_class == category.object &&
        std::binary_search(p.verb_classes.begin(), p.verb_classes.end(), category.verb)) {
      candidates.push_back(g);
    }
  }
  std::vector<bool> matched(gt.size(), false);
  std::vector<bool> tp(preds.size(), false);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    double best = -1.0;
    std::optional<std::size_t> best_g;
    for (std::size_t g : candidates) {
      if (matched[g]) continue;
      const double h = iou(preds[i].human, gt[g].human);
      const double o = iou(preds[i].object, gt[g].object);
      if (h < iou_threshold || o < iou_threshold) continue;
      const double s = 0.5 * (h + o);
      if (s > best) {
        best = s;
        best_g = g;
      }
    }
    if (best_g) {
      matched[*best_g] = true;
      tp[i] = true;
    }
  }
  return tp;
}

std::optional<double> average_precision(const std::vector<bool>& ranked_tp, std::size_t n_gt) {
  if (n_gt == 0) return std::nullopt;
  const std::size_t n = ranked_tp.size();
  std::vector<double> rec(n + 2, 0.0), prec(n + 2, 0.0);
  std::size_t tp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (ranked_tp[i]) ++tp;
    rec[i + 1] = static_cast<double>(tp) / static_cast<double>(n_gt);
    prec[i + 1] = static_cast<double>(tp) / static_cast<double>(i + 1);
  }
  rec[n + 1] = 1.0;
  prec[n + 1] = 0.0;
  for (std::size_t i = n + 1; i-- > 0;) prec[i] = std::max(prec[i], prec[i + 1]);
  double ap = 0.0;
  for (std::size_t i = 0; i + 1 < n + 2; ++i) {
    if (rec[i + 1] != rec[i]) ap += (rec[i + 1] - rec[i]) * prec[i + 1];
  }
  return std::clamp(ap, 0.0, 1.0);
}

EvalTable evaluate(std::span<const PredictionTriplet> predictions, const Dataset& dataset,
                   const std::set<HoiId>& rare_set, const EvalOptions& options) {
  const auto& vocab = dataset.vocab();
  const auto& images = dataset.images();
  const std::size_t n_cat = vocab.hoi_triples().size();

  std::unordered_map<std::string, std::size_t> image_index;
  for (std::size_t i = 0; i < images.size(); ++i) image_index.emplace(images[i].image_id, i);

  std::vector<std::string> unknown;
  std::vector<std::size_t> pred_image(predictions.size());
  std::vector<std::vector<std::size_t>> by_category(n_cat);
  for (std::size_t p = 0; p < predictions.size(); ++p) {
    const auto it = image_index.find(predictions[p].image_id);
    if (it == image_index.end()) {
      if (std::find(unknown.begin(), unknown.end(), predictions[p].image_id) == unknown.end()) {
        unknown.push_back(predictions[p].image_id);
      }
      continue;
    }
    const auto cat = predictions[p].hoi_category;
    if (cat < 0 || static_cast<std::size_t>(cat) >= n_cat) {
      throw std::invalid_argument("prediction " + std::to_string(p) + " has hoi_category " + std::to_string(cat) +
                                  " outside [0," + std::to_string(n_cat) + ")");
    }
    pred_image[p] = it->second;
    by_category[static_cast<std::size_t>(cat)].push_back(p);
  }
  if (!unknown.empty()) throw UnknownImageError(std::move(unknown));

  // Images whose GT contains each object class (Known-Object restriction).
  std::vector<std::vector<char>> has_object(vocab.objects().size(), std::vector<char>(images.size(), 0));
  EvalTable table;
  table.per_category_gt.assign(n_cat, 0);
  for (std::size_t i = 0; i < images.size(); ++i) {
    for (const auto& pair : images[i].pairs) {
      has_object[static_cast<std::size_t>(pair.object_class)][i] = 1;
      for (VerbId v : pair.verb_classes) {
        if (const auto c = vocab.hoi_category(v, pair.object_class)) ++table.per_category_gt[static_cast<std::size_t>(*c)];
      }
    }
  }

  table.per_category_ap.assign(n_cat, std::nullopt);
  table.per_category_ap_known.assign(n_cat, std::nullopt);
  table.rare_set = rare_set;

  auto eval_category = [&](std::size_t c) {
    const std::size_t n_gt = table.per_category_gt[c];
    if (n_gt == 0) return;
    const auto& triple = vocab.category(static_cast<HoiId>(c));
    auto order = by_category[c];
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return predictions[a].score > predictions[b].score; });

    // Matching inside one image only depends on that image's predictions in rank order.
    std::unordered_map<std::size_t, std::vector<std::size_t>> per_image;
    for (std::size_t r = 0; r < order.size(); ++r) per_image[pred_image[order[r]]].push_back(r);
    std::vector<bool> tp(order.size(), false);
    for (const auto& [img, ranks] : per_image) {
      std::vector<PredictionTriplet> preds;
      preds.reserve(ranks.size());
      for (std::size_t r : ranks) preds.push_back(predictions[order[r]]);
      const auto flags = match_image(preds, images[img].pairs, triple, options.iou_threshold);
      for (std::size_t k = 0; k < ranks.size(); ++k) tp[ranks[k]] = flags[k];
    }
    table.per_category_ap[c] = average_precision(tp, n_gt);

    std::vector<bool> known;
    const auto& present = has_object[static_cast<std::size_t>(triple.object)];
    for (std::size_t r = 0; r < order.size(); ++r) {
      if (present[pred_image[order[r]]]) known.push_back(tp[r]);
    }
    table.per_category_ap_known[c] = average_precision(known, n_gt);
  };

  parallel_for(n_cat, options.workers, eval_category);

  table.default_setting = aggregate(table.per_category_ap, rare_set);
  table.known_object = aggregate(table.per_category_ap_known, rare_set);
  for (std::size_t c = 0; c < n_cat; ++c) {
    if (!table.per_category_ap[c]) continue;
    ++table.evaluated_categories;
    if (rare_set.count(static_cast<HoiId>(c))) ++table.evaluated_rare;
  }
  return table;
}

nlohmann::ordered_json eval_report_json(const EvalTable& table, const Vocabulary& vocab) {
  nlohmann::ordered_json j;
  j["iou_threshold"] = kMatchIou;
  j["default"] = cells_json(table.default_setting);
  j["known_object"] = cells_json(table.known_object);
  j["evaluated_categories"] = table.evaluated_categories;
  j["evaluated_rare"] = table.evaluated_rare;
  auto per = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < table.per_category_ap.size(); ++c) {
    if (!table.per_category_ap[c]) continue;
    const auto& t = vocab.category(static_cast<HoiId>(c));
    per.push_back({{"category", c},
                   {"verb", vocab.verb_name(t.verb)},
                   {"object", vocab.object_name(t.object)},
                   {"n_gt", table.per_category_gt[c]},
                   {"rare", table.rare_set.count(static_cast<HoiId>(c)) > 0},
                   {"ap", rounded(*table.per_category_ap[c], 1e9)},
                   {"ap_known", rounded(*table.per_category_ap_known[c], 1e9)}});
  }
  j["per_category"] = std::move(per);
  return j;
}

std::string format_eval_table(const EvalTable& table) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-30s  %-30s\n", "Default", "Known Object");
  out += line;
  std::snprintf(line, sizeof line, "%10s%10s%10s  %10s%10s%10s\n", "Full", "Rare", "Non-Rare", "Full", "Rare",
                "Non-Rare");
  out += line;
  out += cell_text(table.default_setting.full) + cell_text(table.default_setting.rare) +
         cell_text(table.default_setting.non_rare) + "  " + cell_text(table.known_object.full) +
         cell_text(table.known_object.rare) + cell_text(table.known_object.non_rare) + "\n";
  return out;
}

std::optional<PredictionTriplet> triplet_from_json(const nlohmann::json& j, const Vocabulary& vocab,
                                                   std::string& error) {
  PredictionTriplet t;
  if (!j.is_object() || !j.contains("image_id") || !j.at("image_id").is_string()) {
    error = "image_id must be a string";
    return std::nullopt;
  }
  t.image_id = j.at("image_id").get<std::string>();
  const auto h = box_field(j, "human");
  const auto o = box_field(j, "object");
  if (!h || !o) {
    error = "human and object must be 4-number boxes";
    return std::nullopt;
  }
  t.human = *h;
  t.object = *o;
  if (!j.contains("score") || !j.at("score").is_number()) {
    error = "score must be a number";
    return std::nullopt;
  }
  t.score = j.at("score").get<double>();
  if (j.contains("hoi_category") && j.at("hoi_category").is_number_integer()) {
    t.hoi_category = j.at("hoi_category").get<int>();
    if (t.hoi_category < 0 || static_cast<std::size_t>(t.hoi_category) >= vocab.hoi_triples().size()) {
      error = "hoi_category out of range";
      return std::nullopt;
    }
    return t;
  }
  if (!j.contains("verb") || !j.at("verb").is_string() || !j.contains("object_class") ||
      !j.at("object_class").is_string()) {
    error = "need hoi_category or verb and object_class";
    return std::nullopt;
  }
  const auto verb = vocab.resolve_verb(j.at("verb").get<std::string>());
  const auto obj = vocab.resolve_object(j.at("object_class").get<std::string>());
  const auto cat = (verb && obj) ? vocab.hoi_category(*verb, *obj) : std::nullopt;
  if (!cat) {
    error = "not a valid verb-object category";
    return std::nullopt;
  }
  t.hoi_category = *cat;
  return t;
}

}  // namespace hoikit

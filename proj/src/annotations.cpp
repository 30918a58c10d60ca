#include "hoikit/annotations.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

namespace hoikit {

namespace {

std::optional<BBox> box_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 4) return std::nullopt;
  double v[4];
  for (std::size_t i = 0; i < 4; ++i) {
    if (!j[i].is_number()) return std::nullopt;
    v[i] = j[i].get<double>();
    if (!std::isfinite(v[i])) return std::nullopt;
  }
  return BBox::canonical(v[0], v[1], v[2], v[3]);
}

nlohmann::json box_to_json(const BBox& b) {
  return nlohmann::json::array({b.x1, b.y1, b.x2, b.y2});
}

BBox ingest_box(const BBox& b, double width, double height) {
  if (width > 0.0 && height > 0.0) return clamp_to_image(b, width, height);
  return BBox::canonical(std::max(b.x1, 0.0), std::max(b.y1, 0.0), std::max(b.x2, 0.0), std::max(b.y2, 0.0));
}

double read_dim(const nlohmann::json& img, const char* key) {
  if (img.contains(key) && img.at(key).is_number()) return img.at(key).get<double>();
  return 0.0;
}

std::optional<int> label_from_json(const nlohmann::json& j, LabelKind kind, const Vocabulary& vocab) {
  if (j.is_string()) return vocab.resolve(j.get<std::string>(), kind);
  if (j.is_number_integer()) {
    const int id = j.get<int>();
    const auto n = kind == LabelKind::object ? vocab.objects().size() : vocab.verbs().size();
    if (id >= 0 && static_cast<std::size_t>(id) < n) return id;
  }
  return std::nullopt;
}

void finalize_image(GtImage image, std::size_t image_index, std::vector<GtImage>& images,
                    std::unordered_map<std::string, std::size_t>& seen, LoadResult& result) {
  if (seen.count(image.image_id)) {
    result.diagnostics.push_back({image_index, std::nullopt, "duplicate image_id '" + image.image_id + "' skipped"});
    return;
  }
  seen.emplace(image.image_id, images.size());
  if (image.pairs.empty()) result.flagged_images.push_back(image.image_id);
  images.push_back(std::move(image));
}

}  // namespace

const char* to_string(Split split) { return split == Split::train ? "train" : "test"; }

Split split_from_string(const std::string& s) {
  if (s == "train") return Split::train;
  if (s == "test") return Split::test;
  throw std::invalid_argument("unknown split '" + s + "'");
}

Dataset::Dataset(Split split, std::vector<GtImage> images, std::shared_ptr<const Vocabulary> vocab)
    : split_(split), images_(std::move(images)), vocab_(std::move(vocab)) {
  if (!vocab_) throw std::invalid_argument("dataset requires a vocabulary");
  for (std::size_t i = 0; i < images_.size(); ++i) {
    if (!index_.emplace(images_[i].image_id, i).second) {
      throw std::invalid_argument("duplicate image_id '" + images_[i].image_id + "'");
    }
  }
}

const GtImage* Dataset::find(const std::string& image_id) const {
  const auto it = index_.find(image_id);
  return it == index_.end() ? nullptr : &images_[it->second];
}

LoadResult parse_canonical(const nlohmann::json& doc, std::shared_ptr<const Vocabulary> vocab) {
  if (!doc.is_object() || !doc.contains("images") || !doc.at("images").is_array()) {
    throw std::runtime_error("canonical dataset: expected an object with an 'images' array");
  }
  const int version = doc.value("schema_version", 0);
  if (version != kCanonicalSchemaVersion) {
    throw std::runtime_error("canonical dataset: unsupported schema_version " + std::to_string(version));
  }
  const Split split = split_from_string(doc.value("split", std::string("test")));
  LoadResult result{Dataset(split, {}, vocab), {}, {}};
  std::vector<GtImage> images;
  std::unordered_map<std::string, std::size_t> seen;

  const auto& list = doc.at("images");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto& img = list[i];
    if (!img.is_object() || !img.contains("image_id") || !img.at("image_id").is_string()) {
      result.diagnostics.push_back({i, std::nullopt, "image record without string image_id"});
      continue;
    }
    GtImage image;
    image.image_id = img.at("image_id").get<std::string>();
    image.width = read_dim(img, "width");
    image.height = read_dim(img, "height");
    const auto pairs = img.value("pairs", nlohmann::json::array());
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const auto& pj = pairs[p];
      auto fail = [&](const std::string& msg) { result.diagnostics.push_back({i, p, msg}); };
      if (!pj.is_object()) {
        fail("pair is not an object");
        continue;
      }
      const auto human = box_from_json(pj.value("human", nlohmann::json()));
      const auto object = box_from_json(pj.value("object", nlohmann::json()));
      if (!human || !object) {
        fail("pair needs 4-number 'human' and 'object' boxes");
        continue;
      }
      const auto obj = label_from_json(pj.value("object_class", nlohmann::json()), LabelKind::object, *vocab);
      if (!obj) {
        fail("unknown object_class");
        continue;
      }
      GtPair pair{ingest_box(*human, image.width, image.height), ingest_box(*object, image.width, image.height), *obj,
                  {}};
      for (const auto& vj : pj.value("verb_classes", nlohmann::json::array())) {
        const auto verb = label_from_json(vj, LabelKind::verb, *vocab);
        if (!verb) {
          fail("unknown verb " + vj.dump());
        } else if (!vocab->hoi_category(*verb, *obj)) {
          fail("invalid verb-object combination " + vocab->verb_name(*verb) + " " + vocab->object_name(*obj));
        } else {
          pair.verb_classes.push_back(*verb);
        }
      }
      std::sort(pair.verb_classes.begin(), pair.verb_classes.end());
      pair.verb_classes.erase(std::unique(pair.verb_classes.begin(), pair.verb_classes.end()), pair.verb_classes.end());
      if (pair.verb_classes.empty()) {
        fail("pair has no valid verb");
        continue;
      }
      image.pairs.push_back(std::move(pair));
    }
    finalize_image(std::move(image), i, images, seen, result);
  }
  result.dataset = Dataset(split, std::move(images), std::move(vocab));
  return result;
}

LoadResult parse_hico_json(const nlohmann::json& doc, std::shared_ptr<const Vocabulary> vocab, Split split) {
  const nlohmann::json* list = &doc;
  if (doc.is_object() && doc.contains("images")) list = &doc.at("images");
  if (!list->is_array()) throw std::runtime_error("hico_json: expected a list of image records");

  LoadResult result{Dataset(split, {}, vocab), {}, {}};
  std::vector<GtImage> images;
  std::unordered_map<std::string, std::size_t> seen;

  for (std::size_t i = 0; i < list->size(); ++i) {
    const auto& img = (*list)[i];
    if (!img.is_object() || !img.contains("file_name") || !img.at("file_name").is_string()) {
      result.diagnostics.push_back({i, std::nullopt, "image record without string file_name"});
      continue;
    }
    GtImage image;
    image.image_id = img.at("file_name").get<std::string>();
    image.width = read_dim(img, "width");
    image.height = read_dim(img, "height");

    struct Box {
      BBox box;
      std::optional<ObjectId> object_class;
    };
    std::vector<std::optional<Box>> boxes;
    const auto annotations = img.value("annotations", nlohmann::json::array());
    for (std::size_t a = 0; a < annotations.size(); ++a) {
      const auto& aj = annotations[a];
      const auto box = aj.is_object() ? box_from_json(aj.value("bbox", nlohmann::json())) : std::nullopt;
      if (!box) {
        result.diagnostics.push_back({i, a, "annotation without a 4-number bbox"});
        boxes.emplace_back();
        continue;
      }
      std::optional<ObjectId> cls;
      if (aj.contains("category_id") && aj.at("category_id").is_number_integer()) {
        cls = vocab->object_from_external_id(aj.at("category_id").get<int>());
      }
      boxes.push_back(Box{ingest_box(*box, image.width, image.height), cls});
    }

    // Keyed by (subject index, object index); verbs on the same key merge into one pair.
    std::map<std::pair<long long, long long>, std::size_t> pair_slot;
    std::vector<GtPair> pairs;
    const auto hois = img.value("hoi_annotation", nlohmann::json::array());
    for (std::size_t h = 0; h < hois.size(); ++h) {
      const auto& hj = hois[h];
      auto fail = [&](const std::string& msg) { result.diagnostics.push_back({i, h, "hoi_annotation: " + msg}); };
      if (!hj.is_object() || !hj.contains("subject_id") || !hj.contains("object_id") || !hj.contains("category_id") ||
          !hj.at("subject_id").is_number_integer() || !hj.at("object_id").is_number_integer() ||
          !hj.at("category_id").is_number_integer()) {
        fail("expected integer subject_id, object_id, category_id");
        continue;
      }
      const long long s = hj.at("subject_id").get<long long>();
      const long long o = hj.at("object_id").get<long long>();
      const int verb_one_based = hj.at("category_id").get<int>();
      const auto in_range = [&](long long idx) {
        return idx >= 0 && static_cast<std::size_t>(idx) < boxes.size() && boxes[static_cast<std::size_t>(idx)];
      };
      if (!in_range(s) || !in_range(o)) {
        fail("subject or object index does not reference a valid annotation");
        continue;
      }
      const auto& obj = *boxes[static_cast<std::size_t>(o)];
      if (!obj.object_class) {
        fail("object annotation has unknown category_id");
        continue;
      }
      const int verb = verb_one_based - 1;
      if (verb < 0 || static_cast<std::size_t>(verb) >= vocab->verbs().size()) {
        fail("verb category_id " + std::to_string(verb_one_based) + " out of range");
        continue;
      }
      if (!vocab->hoi_category(verb, *obj.object_class)) {
        fail("invalid verb-object combination " + vocab->verb_name(verb) + " " +
             vocab->object_name(*obj.object_class));
        continue;
      }
      auto [it, inserted] = pair_slot.emplace(std::make_pair(s, o), pairs.size());
      if (inserted) {
        pairs.push_back(GtPair{boxes[static_cast<std::size_t>(s)]->box, obj.box, *obj.object_class, {}});
      }
      auto& verbs = pairs[it->second].verb_classes;
      if (std::find(verbs.begin(), verbs.end(), verb) == verbs.end()) verbs.push_back(verb);
    }
    for (auto& p : pairs) std::sort(p.verb_classes.begin(), p.verb_classes.end());
    image.pairs = std::move(pairs);
    finalize_image(std::move(image), i, images, seen, result);
  }
  result.dataset = Dataset(split, std::move(images), std::move(vocab));
  return result;
}

LoadResult load_annotations(const std::filesystem::path& path, AnnotationFormat format,
                            std::shared_ptr<const Vocabulary> vocab, Split split) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("dataset " + path.string() + ": " + e.what());
  }
  return format == AnnotationFormat::canonical ? parse_canonical(doc, std::move(vocab))
                                               : parse_hico_json(doc, std::move(vocab), split);
}

nlohmann::json to_canonical_json(const Dataset& dataset) {
  const auto& vocab = dataset.vocab();
  auto images = nlohmann::json::array();
  for (const auto& img : dataset.images()) {
    auto pairs = nlohmann::json::array();
    for (const auto& p : img.pairs) {
      auto verbs = nlohmann::json::array();
      for (VerbId v : p.verb_classes) verbs.push_back(vocab.verb_name(v));
      pairs.push_back({{"human", box_to_json(p.human)},
                       {"object", box_to_json(p.object)},
                       {"object_class", vocab.object_name(p.object_class)},
                       {"verb_classes", std::move(verbs)}});
    }
    images.push_back({{"image_id", img.image_id}, {"width", img.width}, {"height", img.height}, {"pairs", pairs}});
  }
  return {{"schema_version", kCanonicalSchemaVersion}, {"split", to_string(dataset.split())}, {"images", images}};
}

void save_canonical(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write dataset file: " + path.string());
  out << to_canonical_json(dataset).dump(1) << '\n';
}

std::vector<std::size_t> category_instance_counts(const Dataset& dataset) {
  const auto& vocab = dataset.vocab();
  std::vector<std::size_t> counts(vocab.hoi_triples().size(), 0);
  for (const auto& img : dataset.images()) {
    for (const auto& p : img.pairs) {
      for (VerbId v : p.verb_classes) {
        if (const auto id = vocab.hoi_category(v, p.object_class)) ++counts[static_cast<std::size_t>(*id)];
      }
    }
  }
  return counts;
}

std::set<HoiId> derive_rare_categories(const Dataset& train, std::size_t threshold) {
  const auto counts = category_instance_counts(train);
  std::set<HoiId> rare;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] < threshold) rare.insert(static_cast<HoiId>(c));
  }
  return rare;
}

}  // namespace hoikit

#include "hoikit/vocabulary.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <stdexcept>

namespace hoikit {

extern const char* const kBundledVocabularyJson;

namespace {

long long triple_key(VerbId verb, ObjectId object) {
  return (static_cast<long long>(verb) << 32) | static_cast<unsigned int>(object);
}

std::vector<std::string> read_names(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key) || !doc.at(key).is_array()) {
    throw std::invalid_argument(std::string("vocabulary: missing array '") + key + "'");
  }
  std::vector<std::string> names;
  for (const auto& item : doc.at(key)) {
    if (!item.is_string()) throw std::invalid_argument(std::string("vocabulary: non-string entry in '") + key + "'");
    names.push_back(item.get<std::string>());
  }
  return names;
}

std::unordered_map<std::string, int> build_index(const std::vector<std::string>& names, const char* what) {
  std::unordered_map<std::string, int> index;
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto [it, inserted] = index.emplace(normalize_label(names[i]), static_cast<int>(i));
    if (!inserted) throw std::invalid_argument(std::string("vocabulary: duplicate ") + what + " name '" + names[i] + "'");
  }
  return index;
}

}  // namespace

std::string normalize_label(std::string_view name) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  std::size_t b = 0;
  std::size_t e = name.size();
  while (b < e && is_space(static_cast<unsigned char>(name[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(name[e - 1]))) --e;
  std::string out;
  out.reserve(e - b);
  for (std::size_t i = b; i < e; ++i) {
    const auto c = static_cast<unsigned char>(name[i]);
    out.push_back(c == ' ' ? '_' : static_cast<char>(std::tolower(c)));
  }
  return out;
}

Vocabulary Vocabulary::from_json(const nlohmann::json& doc, std::vector<std::string>* warnings) {
  Vocabulary v;
  v.objects_ = read_names(doc, "objects");
  v.verbs_ = read_names(doc, "verbs");
  v.object_index_ = build_index(v.objects_, "object");
  v.verb_index_ = build_index(v.verbs_, "verb");

  if (!doc.contains("hoi_triples") || !doc.at("hoi_triples").is_array()) {
    throw std::invalid_argument("vocabulary: missing array 'hoi_triples'");
  }
  for (const auto& t : doc.at("hoi_triples")) {
    if (!t.is_array() || t.size() != 2 || !t[0].is_number_integer() || !t[1].is_number_integer()) {
      throw std::invalid_argument("vocabulary: hoi_triples entries must be [verb_index, object_index]");
    }
    const int verb = t[0].get<int>();
    const int object = t[1].get<int>();
    if (verb < 0 || verb >= static_cast<int>(v.verbs_.size()) || object < 0 ||
        object >= static_cast<int>(v.objects_.size())) {
      throw std::invalid_argument("vocabulary: hoi triple [" + std::to_string(verb) + "," + std::to_string(object) +
                                  "] out of range");
    }
    auto [it, inserted] = v.triple_index_.emplace(triple_key(verb, object), static_cast<HoiId>(v.triples_.size()));
    if (!inserted) {
      throw std::invalid_argument("vocabulary: duplicate hoi triple [" + std::to_string(verb) + "," +
                                  std::to_string(object) + "]");
    }
    v.triples_.push_back({verb, object});
  }

  if (doc.contains("object_category_ids")) {
    const auto& ids = doc.at("object_category_ids");
    if (!ids.is_array() || ids.size() != v.objects_.size()) {
      throw std::invalid_argument("vocabulary: object_category_ids must parallel 'objects'");
    }
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const int ext = ids[i].get<int>();
      v.external_object_ids_.push_back(ext);
      v.external_index_.emplace(ext, static_cast<ObjectId>(i));
    }
  }

  if (warnings) {
    auto check = [&](std::size_t got, std::size_t want, const char* what) {
      if (got != want) {
        warnings->push_back(std::string("vocabulary has ") + std::to_string(got) + " " + what + ", HICO-DET has " +
                            std::to_string(want));
      }
    };
    check(v.objects_.size(), kHicoObjects, "objects");
    check(v.verbs_.size(), kHicoVerbs, "verbs");
    check(v.triples_.size(), kHicoCategories, "categories");
  }
  return v;
}

Vocabulary Vocabulary::load(const std::filesystem::path& path, std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open vocabulary file: " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("vocabulary " + path.string() + ": " + e.what());
  }
  return from_json(doc, warnings);
}

const Vocabulary& Vocabulary::hico_det() {
  static const Vocabulary bundled = from_json(nlohmann::json::parse(kBundledVocabularyJson));
  return bundled;
}

std::optional<int> Vocabulary::resolve(std::string_view name, LabelKind kind) const {
  const auto& index = kind == LabelKind::object ? object_index_ : verb_index_;
  const auto it = index.find(normalize_label(name));
  if (it == index.end()) return std::nullopt;
  return it->second;
}

std::optional<HoiId> Vocabulary::hoi_category(VerbId verb, ObjectId object) const {
  const auto it = triple_index_.find(triple_key(verb, object));
  if (it == triple_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<ObjectId> Vocabulary::object_from_external_id(int external_id) const {
  const auto it = external_index_.find(external_id);
  if (it == external_index_.end()) return std::nullopt;
  return it->second;
}

nlohmann::json Vocabulary::to_json() const {
  nlohmann::json doc;
  doc["objects"] = objects_;
  doc["verbs"] = verbs_;
  auto triples = nlohmann::json::array();
  for (const auto& t : triples_) triples.push_back({t.verb, t.object});
  doc["hoi_triples"] = std::move(triples);
  if (!external_object_ids_.empty()) doc["object_category_ids"] = external_object_ids_;
  return doc;
}

}  // namespace hoikit

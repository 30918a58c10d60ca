#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace hoikit {

using ObjectId = int;
using VerbId = int;
/// Index into Vocabulary::hoi_triples().
using HoiId = int;

enum class LabelKind { object, verb };

struct HoiTriple {
  VerbId verb = 0;
  ObjectId object = 0;
  bool operator==(const HoiTriple&) const = default;
};

/// Lowercase, trim, and map spaces to underscores.
std::string normalize_label(std::string_view name);

/// Object, verb and verb-object category lists with normalized name lookup.
///
/// The bundled HICO-DET file has 80 objects, 117 verbs and 600 categories.
/// Other files may be loaded; count mismatches are reported as warnings.
/// Immutable after construction.
class Vocabulary {
 public:
  static constexpr std::size_t kHicoObjects = 80;
  static constexpr std::size_t kHicoVerbs = 117;
  static constexpr std::size_t kHicoCategories = 600;

  /// Throws std::invalid_argument on structural errors (bad indices, duplicate names or triples).
  static Vocabulary from_json(const nlohmann::json& doc, std::vector<std::string>* warnings = nullptr);
  static Vocabulary load(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);

  /// The vocabulary compiled into the library.
  static const Vocabulary& hico_det();

  const std::vector<std::string>& objects() const { return objects_; }
  const std::vector<std::string>& verbs() const { return verbs_; }
  const std::vector<HoiTriple>& hoi_triples() const { return triples_; }

  const std::string& object_name(ObjectId id) const { return objects_.at(static_cast<std::size_t>(id)); }
  const std::string& verb_name(VerbId id) const { return verbs_.at(static_cast<std::size_t>(id)); }

  std::optional<int> resolve(std::string_view name, LabelKind kind) const;
  std::optional<ObjectId> resolve_object(std::string_view name) const { return resolve(name, LabelKind::object); }
  std::optional<VerbId> resolve_verb(std::string_view name) const { return resolve(name, LabelKind::verb); }

  std::optional<HoiId> hoi_category(VerbId verb, ObjectId object) const;
  const HoiTriple& category(HoiId id) const { return triples_.at(static_cast<std::size_t>(id)); }

  /// Maps an external object category id (COCO numbering in HICO-DET json exports).
  std::optional<ObjectId> object_from_external_id(int external_id) const;

  nlohmann::json to_json() const;

 private:
  std::vector<std::string> objects_;
  std::vector<std::string> verbs_;
  std::vector<HoiTriple> triples_;
  std::vector<int> external_object_ids_;
  std::unordered_map<std::string, ObjectId> object_index_;
  std::unordered_map<std::string, VerbId> verb_index_;
  std::unordered_map<long long, HoiId> triple_index_;
  std::unordered_map<int, ObjectId> external_index_;
};

}  // namespace hoikit

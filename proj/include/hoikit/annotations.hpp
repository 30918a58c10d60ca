#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "hoikit/box.hpp"
#include "hoikit/vocabulary.hpp"

namespace hoikit {

/// One annotated human-object pair. Verbs on the same pair are merged at ingestion.
struct GtPair {
  BBox human;
  BBox object;
  ObjectId object_class = 0;
  std::vector<VerbId> verb_classes;  // sorted, unique, non-empty

  bool operator==(const GtPair&) const = default;
};

struct GtImage {
  std::string image_id;
  double width = 0.0;   // 0 when unknown
  double height = 0.0;  // 0 when unknown
  std::vector<GtPair> pairs;

  bool operator==(const GtImage&) const = default;
};

enum class Split { train, test };

const char* to_string(Split split);
Split split_from_string(const std::string& s);

/// Annotated images of one split. Image ids are unique.
class Dataset {
 public:
  Dataset(Split split, std::vector<GtImage> images, std::shared_ptr<const Vocabulary> vocab);

  Split split() const { return split_; }
  const std::vector<GtImage>& images() const { return images_; }
  const Vocabulary& vocab() const { return *vocab_; }
  std::shared_ptr<const Vocabulary> vocab_ptr() const { return vocab_; }
  std::size_t size() const { return images_.size(); }

  const GtImage* find(const std::string& image_id) const;

 private:
  Split split_;
  std::vector<GtImage> images_;
  std::shared_ptr<const Vocabulary> vocab_;
  std::unordered_map<std::string, std::size_t> index_;
};

enum class AnnotationFormat { canonical, hico_json };

struct IngestDiagnostic {
  std::size_t image_index = 0;
  std::optional<std::size_t> record_index;
  std::string message;
};

struct LoadResult {
  Dataset dataset;
  std::vector<IngestDiagnostic> diagnostics;
  /// Images kept even though they have no valid pair.
  std::vector<std::string> flagged_images;
};

inline constexpr int kCanonicalSchemaVersion = 1;

/// Reads a dataset file. Throws std::runtime_error when the file cannot be read
/// or is not JSON; malformed records are reported in LoadResult::diagnostics.
LoadResult load_annotations(const std::filesystem::path& path, AnnotationFormat format,
                            std::shared_ptr<const Vocabulary> vocab, Split split = Split::test);

LoadResult parse_canonical(const nlohmann::json& doc, std::shared_ptr<const Vocabulary> vocab);
/// Importer for the widely distributed per-image list format
/// (file_name, annotations[{bbox, category_id}], hoi_annotation[{subject_id, object_id, category_id}]).
LoadResult parse_hico_json(const nlohmann::json& doc, std::shared_ptr<const Vocabulary> vocab, Split split);

nlohmann::json to_canonical_json(const Dataset& dataset);
void save_canonical(const Dataset& dataset, const std::filesystem::path& path);

/// Number of ground-truth instances per category (one per (pair, verb)).
std::vector<std::size_t> category_instance_counts(const Dataset& dataset);

inline constexpr std::size_t kRareThreshold = 10;

/// Categories with fewer than `threshold` training instances, including absent ones.
std::set<HoiId> derive_rare_categories(const Dataset& train, std::size_t threshold = kRareThreshold);

}  // namespace hoikit

#pragma once

#include <filesystem>
#include <memory>
#include <random>
#include <string>

#include "hoikit/annotations.hpp"
#include "hoikit/vocabulary.hpp"

namespace hoikit::test {

inline std::filesystem::path data_dir() { return HOIKIT_TEST_DATA; }
inline std::filesystem::path data(const std::string& name) { return data_dir() / name; }

inline std::shared_ptr<const Vocabulary> vocab_ptr() {
  static const auto v = std::make_shared<const Vocabulary>(Vocabulary::hico_det());
  return v;
}
inline const Vocabulary& vocab() { return *vocab_ptr(); }

inline const Dataset& mini() {
  static const Dataset d =
      load_annotations(data("mini_canonical.json"), AnnotationFormat::canonical, vocab_ptr()).dataset;
  return d;
}

inline HoiId cat(const std::string& verb, const std::string& object) {
  return *vocab().hoi_category(*vocab().resolve_verb(verb), *vocab().resolve_object(object));
}

inline GtPair gt_pair(BBox h, BBox o, const std::string& object, std::initializer_list<const char*> verbs) {
  GtPair p{h, o, *vocab().resolve_object(object), {}};
  for (const char* v : verbs) p.verb_classes.push_back(*vocab().resolve_verb(v));
  std::sort(p.verb_classes.begin(), p.verb_classes.end());
  return p;
}

/// Random non-degenerate box inside a 640x480 frame.
inline BBox random_box(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> x(0.0, 600.0), y(0.0, 440.0), s(5.0, 200.0);
  const double x1 = x(rng), y1 = y(rng);
  return BBox{x1, y1, x1 + s(rng), y1 + s(rng)};
}

/// Temporary directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() / ("hoikit_test_" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace hoikit::test

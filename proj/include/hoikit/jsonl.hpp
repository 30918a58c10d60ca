#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace hoikit {

/// First line of every JSONL file the tools write:
/// {"_meta": {"tool", "version", "command", "config"}}.
nlohmann::ordered_json meta_header(std::string_view command, const nlohmann::ordered_json& config);
bool is_meta_record(const nlohmann::json& record);

struct JsonlLine {
  std::size_t line_no = 0;  // 1-based
  std::optional<nlohmann::json> value;
  std::string error;  // set when value is empty
};

/// Line-at-a-time reader. Blank lines and the _meta header are skipped.
class JsonlReader {
 public:
  /// Throws std::runtime_error when the file cannot be opened.
  explicit JsonlReader(const std::filesystem::path& path);
  bool next(JsonlLine& out);

 private:
  std::ifstream in_;
  std::size_t line_no_ = 0;
};

}  // namespace hoikit

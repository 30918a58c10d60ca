#include "hoikit/jsonl.hpp"

#include <stdexcept>

#include "hoikit/version.hpp"

namespace hoikit {

nlohmann::ordered_json meta_header(std::string_view command, const nlohmann::ordered_json& config) {
  nlohmann::ordered_json meta;
  meta["tool"] = "hoikit";
  meta["version"] = kVersion;
  meta["command"] = std::string(command);
  meta["config"] = config;
  nlohmann::ordered_json out;
  out["_meta"] = std::move(meta);
  return out;
}

bool is_meta_record(const nlohmann::json& record) { return record.is_object() && record.contains("_meta"); }

JsonlReader::JsonlReader(const std::filesystem::path& path) : in_(path) {
  if (!in_) throw std::runtime_error("cannot open " + path.string());
}

bool JsonlReader::next(JsonlLine& out) {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    out = JsonlLine{};
    out.line_no = line_no_;
    try {
      auto value = nlohmann::json::parse(line);
      if (is_meta_record(value)) continue;
      out.value = std::move(value);
    } catch (const nlohmann::json::parse_error& e) {
      out.error = e.what();
    }
    return true;
  }
  return false;
}

}  // namespace hoikit

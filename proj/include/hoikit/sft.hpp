#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hoikit/annotations.hpp"
#include "hoikit/prompt.hpp"

namespace hoikit {

struct SftRecord {
  std::string image_id;
  std::string prompt;
  std::string think;   // teacher reasoning
  std::string answer;  // canonical GT serialization

  nlohmann::ordered_json to_json() const;
};

struct SftAssembly {
  std::vector<SftRecord> records;
  std::size_t skipped = 0;  // images without a trace
};

using TraceMap = std::map<std::string, std::string>;

/// Trace file: JSON lines {"image_id", "think"}. Malformed lines are skipped
/// and counted in `bad_lines` when given.
TraceMap read_traces(const std::filesystem::path& path, std::size_t* bad_lines = nullptr);

SftAssembly assemble_sft(const Dataset& dataset, const TraceMap& traces, const TemplateConfig& config = {});

/// Chat-completions endpoint used to generate teacher reasoning.
struct EndpointConfig {
  std::string base_url = "https://api.openai.com";
  std::string path = "/v1/chat/completions";
  std::string model = "gpt-4o-mini";
  std::string token_env = "HOI_TEACHER_API_KEY";
  /// Prepended to image_id to form the image reference sent with each request.
  std::string image_url_prefix;
  /// Request text; the reasoning guidance of the default template when unset.
  std::optional<std::string> prompt;
  int max_attempts = 5;
  int initial_backoff_ms = 500;
  int max_backoff_ms = 30000;
  int concurrency = 4;
  int min_interval_ms = 0;  // between request starts, across workers
  int timeout_s = 120;

  static EndpointConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct FetchReport {
  std::size_t already_present = 0;
  std::size_t fetched = 0;
  std::vector<std::string> failed;
  std::map<std::string, int> attempts;
  std::vector<std::string> log;
};

struct FetchOptions {
  /// Stop after this many new requests' images (for partial runs).
  std::optional<std::size_t> limit;
};

/// Fetches a reasoning trace for every image missing from `trace_path`,
/// appending results in image_id order. Failed ids go to `<trace_path>.failed`.
FetchReport fetch_traces(const Dataset& dataset, const EndpointConfig& endpoint, const std::filesystem::path& trace_path,
                         const FetchOptions& options = {});

/// Reasoning text from a chat-completions response body; the content of the
/// first <think> block when present. nullopt when the body has no content.
std::optional<std::string> trace_from_response(const std::string& body);

}  // namespace hoikit

#pragma once

// Minimal JSON reader that keeps duplicate object keys in source order.
// Standard parsers collapse duplicates, which loses the key counts the
// format reward depends on.

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace hoikit::detail {

struct JsonValue;
using JsonArray = std::vector<JsonValue>;
using JsonMembers = std::vector<std::pair<std::string, JsonValue>>;

struct JsonValue {
  struct Object {
    JsonMembers members;
  };
  std::variant<std::nullptr_t, bool, double, std::string, JsonArray, Object> value;

  bool is_number() const { return std::holds_alternative<double>(value); }
  bool is_string() const { return std::holds_alternative<std::string>(value); }
  bool is_array() const { return std::holds_alternative<JsonArray>(value); }
  bool is_object() const { return std::holds_alternative<Object>(value); }
  double as_number() const { return std::get<double>(value); }
  const std::string& as_string() const { return std::get<std::string>(value); }
  const JsonArray& as_array() const { return std::get<JsonArray>(value); }
  const JsonMembers& members() const { return std::get<Object>(value).members; }

  /// Compact JSON text for the value.
  std::string dump() const;
};

struct ScanError {
  std::size_t position = 0;
  std::string message;
};

/// Recursive-descent reader over one text. Nesting depth is capped.
class JsonScanner {
 public:
  static constexpr int kMaxDepth = 64;

  explicit JsonScanner(std::string_view text) : text_(text) {}

  /// Parses one value starting at `pos` (leading whitespace skipped).
  /// On success `pos` is advanced past the value.
  std::optional<JsonValue> parse_value(std::size_t& pos);

  const ScanError& error() const { return error_; }

  void skip_ws(std::size_t& pos) const;

 private:
  std::optional<JsonValue> value_at(std::size_t& pos, int depth);
  std::optional<JsonValue> array_at(std::size_t& pos, int depth);
  std::optional<JsonValue> object_at(std::size_t& pos, int depth);
  std::optional<std::string> string_at(std::size_t& pos);
  std::optional<JsonValue> number_at(std::size_t& pos);
  bool literal_at(std::size_t& pos, std::string_view word);
  std::nullopt_t fail(std::size_t pos, std::string message);

  std::string_view text_;
  ScanError error_;
};

}  // namespace hoikit::detail

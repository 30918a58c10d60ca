#include "json_scan.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace hoikit::detail {

namespace {

void append_utf8(std::string& out, unsigned cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::optional<unsigned> hex4(std::string_view text, std::size_t pos) {
  if (pos + 4 > text.size()) return std::nullopt;
  unsigned v = 0;
  for (std::size_t i = pos; i < pos + 4; ++i) {
    const char c = text[i];
    v <<= 4;
    if (c >= '0' && c <= '9') v |= static_cast<unsigned>(c - '0');
    else if (c >= 'a' && c <= 'f') v |= static_cast<unsigned>(c - 'a' + 10);
    else if (c >= 'A' && c <= 'F') v |= static_cast<unsigned>(c - 'A' + 10);
    else return std::nullopt;
  }
  return v;
}

void dump_string(std::string& out, const std::string& s) {
  out.push_back('"');
  for (const char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", static_cast<unsigned>(static_cast<unsigned char>(c)));
          out += buf;
        } else {
          out.push_back(c);
        }
    }
  }
  out.push_back('"');
}

void dump_value(std::string& out, const JsonValue& v) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::nullptr_t>) {
          out += "null";
        } else if constexpr (std::is_same_v<T, bool>) {
          out += x ? "true" : "false";
        } else if constexpr (std::is_same_v<T, double>) {
          char buf[32];
          const auto res = std::to_chars(buf, buf + sizeof buf, x);
          out.append(buf, res.ptr);
        } else if constexpr (std::is_same_v<T, std::string>) {
          dump_string(out, x);
        } else if constexpr (std::is_same_v<T, JsonArray>) {
          out.push_back('[');
          for (std::size_t i = 0; i < x.size(); ++i) {
            if (i) out.push_back(',');
            dump_value(out, x[i]);
          }
          out.push_back(']');
        } else {
          out.push_back('{');
          for (std::size_t i = 0; i < x.members.size(); ++i) {
            if (i) out.push_back(',');
            dump_string(out, x.members[i].first);
            out.push_back(':');
            dump_value(out, x.members[i].second);
          }
          out.push_back('}');
        }
      },
      v.value);
}

}  // namespace

std::string JsonValue::dump() const {
  std::string out;
  dump_value(out, *this);
  return out;
}

std::nullopt_t JsonScanner::fail(std::size_t pos, std::string message) {
  error_ = ScanError{pos, std::move(message)};
  return std::nullopt;
}

void JsonScanner::skip_ws(std::size_t& pos) const {
  while (pos < text_.size() &&
         (text_[pos] == ' ' || text_[pos] == '\t' || text_[pos] == '\n' || text_[pos] == '\r')) {
    ++pos;
  }
}

std::optional<JsonValue> JsonScanner::parse_value(std::size_t& pos) {
  std::size_t p = pos;
  auto v = value_at(p, 0);
  if (v) pos = p;
  return v;
}

std::optional<JsonValue> JsonScanner::value_at(std::size_t& pos, int depth) {
  if (depth > kMaxDepth) return fail(pos, "nesting too deep");
  skip_ws(pos);
  if (pos >= text_.size()) return fail(pos, "unexpected end of text");
  const char c = text_[pos];
  switch (c) {
    case '[': return array_at(pos, depth + 1);
    case '{': return object_at(pos, depth + 1);
    case '"': {
      auto s = string_at(pos);
      if (!s) return std::nullopt;
      return JsonValue{std::move(*s)};
    }
    case 't':
      if (literal_at(pos, "true")) return JsonValue{true};
      return fail(pos, "invalid literal");
    case 'f':
      if (literal_at(pos, "false")) return JsonValue{false};
      return fail(pos, "invalid literal");
    case 'n':
      if (literal_at(pos, "null")) return JsonValue{nullptr};
      return fail(pos, "invalid literal");
    default:
      if (c == '-' || (c >= '0' && c <= '9')) return number_at(pos);
      return fail(pos, std::string("unexpected character '") + c + "'");
  }
}

bool JsonScanner::literal_at(std::size_t& pos, std::string_view word) {
  if (text_.substr(pos, word.size()) != word) return false;
  pos += word.size();
  return true;
}

std::optional<JsonValue> JsonScanner::number_at(std::size_t& pos) {
  // JSON grammar: -?(0|[1-9][0-9]*)(\.[0-9]+)?([eE][+-]?[0-9]+)?
  const std::size_t start = pos;
  std::size_t p = pos;
  auto digits = [&] {
    const std::size_t s = p;
    while (p < text_.size() && text_[p] >= '0' && text_[p] <= '9') ++p;
    return p > s;
  };
  if (p < text_.size() && text_[p] == '-') ++p;
  if (p < text_.size() && text_[p] == '0') {
    ++p;
  } else if (!digits()) {
    return fail(start, "malformed number");
  }
  if (p < text_.size() && text_[p] == '.') {
    ++p;
    if (!digits()) return fail(start, "malformed number");
  }
  if (p < text_.size() && (text_[p] == 'e' || text_[p] == 'E')) {
    ++p;
    if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
    if (!digits()) return fail(start, "malformed number");
  }
  double value = 0.0;
  const auto res = std::from_chars(text_.data() + start, text_.data() + p, value);
  if (res.ec == std::errc::result_out_of_range) {
    value = text_[start] == '-' ? -HUGE_VAL : HUGE_VAL;
  } else if (res.ec != std::errc{}) {
    return fail(start, "malformed number");
  }
  pos = p;
  return JsonValue{value};
}

std::optional<std::string> JsonScanner::string_at(std::size_t& pos) {
  const std::size_t start = pos;
  ++pos;  // opening quote
  std::string out;
  while (pos < text_.size()) {
    const char c = text_[pos];
    if (c == '"') {
      ++pos;
      return out;
    }
    if (static_cast<unsigned char>(c) < 0x20) {
      fail(pos, "control character in string");
      return std::nullopt;
    }
    if (c != '\\') {
      out.push_back(c);
      ++pos;
      continue;
    }
    if (pos + 1 >= text_.size()) break;
    const char e = text_[pos + 1];
    pos += 2;
    switch (e) {
      case '"': out.push_back('"'); break;
      case '\\': out.push_back('\\'); break;
      case '/': out.push_back('/'); break;
      case 'b': out.push_back('\b'); break;
      case 'f': out.push_back('\f'); break;
      case 'n': out.push_back('\n'); break;
      case 'r': out.push_back('\r'); break;
      case 't': out.push_back('\t'); break;
      case 'u': {
        auto cp = hex4(text_, pos);
        if (!cp) {
          fail(pos, "bad \\u escape");
          return std::nullopt;
        }
        pos += 4;
        if (*cp >= 0xD800 && *cp < 0xDC00 && text_.substr(pos, 2) == "\\u") {
          if (auto lo = hex4(text_, pos + 2); lo && *lo >= 0xDC00 && *lo < 0xE000) {
            *cp = 0x10000 + ((*cp - 0xD800) << 10) + (*lo - 0xDC00);
            pos += 6;
          }
        }
        append_utf8(out, *cp);
        break;
      }
      default:
        fail(pos - 1, "bad escape");
        return std::nullopt;
    }
  }
  fail(start, "unterminated string");
  return std::nullopt;
}

std::optional<JsonValue> JsonScanner::array_at(std::size_t& pos, int depth) {
  ++pos;  // '['
  JsonArray items;
  skip_ws(pos);
  if (pos < text_.size() && text_[pos] == ']') {
    ++pos;
    return JsonValue{std::move(items)};
  }
  while (true) {
    auto item = value_at(pos, depth);
    if (!item) return std::nullopt;
    items.push_back(std::move(*item));
    skip_ws(pos);
    if (pos >= text_.size()) return fail(pos, "unterminated array");
    if (text_[pos] == ',') {
      ++pos;
      continue;
    }
    if (text_[pos] == ']') {
      ++pos;
      return JsonValue{std::move(items)};
    }
    return fail(pos, "expected ',' or ']' in array");
  }
}

std::optional<JsonValue> JsonScanner::object_at(std::size_t& pos, int depth) {
  ++pos;  // '{'
  JsonValue::Object obj;
  skip_ws(pos);
  if (pos < text_.size() && text_[pos] == '}') {
    ++pos;
    return JsonValue{std::move(obj)};
  }
  while (true) {
    skip_ws(pos);
    if (pos >= text_.size() || text_[pos] != '"') return fail(pos, "expected string key");
    auto key = string_at(pos);
    if (!key) return std::nullopt;
    skip_ws(pos);
    if (pos >= text_.size() || text_[pos] != ':') return fail(pos, "expected ':' after key");
    ++pos;
    auto value = value_at(pos, depth);
    if (!value) return std::nullopt;
    obj.members.emplace_back(std::move(*key), std::move(*value));
    skip_ws(pos);
    if (pos >= text_.size()) return fail(pos, "unterminated object");
    if (text_[pos] == ',') {
      ++pos;
      continue;
    }
    if (text_[pos] == '}') {
      ++pos;
      return JsonValue{std::move(obj)};
    }
    return fail(pos, "expected ',' or '}' in object");
  }
}

}  // namespace hoikit::detail

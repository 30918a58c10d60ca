#include "hoikit/answer_parser.hpp"

#include <cmath>

#include "json_scan.hpp"

namespace hoikit {

using detail::JsonScanner;
using detail::JsonValue;

namespace {

std::optional<std::string> block(std::string_view text, std::string_view open, std::string_view close) {
  const auto b = text.find(open);
  if (b == std::string_view::npos) return std::nullopt;
  const auto start = b + open.size();
  const auto e = text.find(close, start);
  if (e == std::string_view::npos) return std::string(text.substr(start));
  return std::string(text.substr(start, e - start));
}

std::optional<BBox> box_value(const JsonValue& v) {
  if (!v.is_array()) return std::nullopt;
  const auto& a = v.as_array();
  if (a.size() != 4) return std::nullopt;
  double c[4];
  for (std::size_t i = 0; i < 4; ++i) {
    if (!a[i].is_number() || !std::isfinite(a[i].as_number())) return std::nullopt;
    c[i] = a[i].as_number();
  }
  return BBox::canonical(c[0], c[1], c[2], c[3]);
}

std::string label_text(const JsonValue& v) { return v.is_string() ? v.as_string() : v.dump(); }

HoiInstance instance_from(const JsonValue& entry) {
  HoiInstance inst;
  for (const auto& [raw_key, value] : entry.members()) {
    ++inst.key_count;
    const auto key = canonical_key(raw_key);
    if (!key || inst.present_keys.contains(*key)) continue;
    inst.present_keys.insert(*key);
    switch (*key) {
      case AnswerKey::human: inst.human = box_value(value); break;
      case AnswerKey::object: inst.object = box_value(value); break;
      case AnswerKey::object_class:
        if (value.is_string()) inst.object_class = value.as_string();
        break;
      case AnswerKey::verb_class:
        if (value.is_string()) {
          inst.verb_classes.push_back(value.as_string());
        } else if (value.is_array()) {
          for (const auto& item : value.as_array()) inst.verb_classes.push_back(label_text(item));
        }
        break;
    }
  }
  return inst;
}

void collect(const JsonValue& array, std::vector<HoiInstance>& out, std::vector<ParseDiagnostic>* diags,
             std::size_t pos) {
  for (const auto& item : array.as_array()) {
    if (item.is_object()) {
      out.push_back(instance_from(item));
    } else if (diags) {
      diags->push_back({pos, "non-object array element skipped"});
    }
  }
}

}  // namespace

std::optional<AnswerKey> canonical_key(std::string_view raw) {
  std::size_t b = 0;
  std::size_t e = raw.size();
  auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
  while (b < e && ws(raw[b])) ++b;
  while (e > b && ws(raw[e - 1])) --e;
  std::string key;
  for (std::size_t i = b; i < e; ++i) {
    const char c = raw[i];
    key.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
  }
  if (key == "human") return AnswerKey::human;
  if (key == "object") return AnswerKey::object;
  if (key == "object class") return AnswerKey::object_class;
  if (key == "verb class") return AnswerKey::verb_class;
  return std::nullopt;
}

const char* key_name(AnswerKey key) {
  switch (key) {
    case AnswerKey::human: return "human";
    case AnswerKey::object: return "object";
    case AnswerKey::object_class: return "object class";
    case AnswerKey::verb_class: return "verb class";
  }
  return "";
}

TagContents extract_tags(std::string_view text) {
  return TagContents{block(text, kThinkOpen, kThinkClose), block(text, kAnswerOpen, kAnswerClose)};
}

std::vector<HoiInstance> parse_answer(std::string_view text, std::vector<ParseDiagnostic>* diags) {
  std::vector<HoiInstance> out;
  JsonScanner scanner(text);

  // Strict: the first '[' opens a complete array. Anything after it is ignored.
  const auto open = text.find('[');
  if (open != std::string_view::npos) {
    std::size_t pos = open;
    if (auto arr = scanner.parse_value(pos); arr && arr->is_array()) {
      collect(*arr, out, diags, open);
      return out;
    }
    if (diags) diags->push_back({scanner.error().position, "strict parse failed: " + scanner.error().message});
  }

  // Lenient: recover every well-formed object entry, skipping garbage between them.
  std::size_t pos = open == std::string_view::npos ? 0 : open + 1;
  while (pos < text.size()) {
    const auto brace = text.find('{', pos);
    if (brace == std::string_view::npos) break;
    std::size_t p = brace;
    if (auto obj = scanner.parse_value(p); obj && obj->is_object()) {
      out.push_back(instance_from(*obj));
      pos = p;
    } else {
      if (diags) diags->push_back({brace, "unrecoverable entry: " + scanner.error().message});
      pos = brace + 1;
    }
  }
  return out;
}

ParsedCompletion parse_completion(std::string_view text, std::size_t max_chars) {
  if (text.size() > max_chars) text = text.substr(0, max_chars);
  ParsedCompletion parsed;
  parsed.has_think_tag = text.find(kThinkOpen) != std::string_view::npos;
  auto tags = extract_tags(text);
  parsed.think_text = std::move(tags.think);
  parsed.has_answer_tag = tags.answer.has_value();
  if (parsed.has_answer_tag) parsed.instances = parse_answer(*tags.answer, &parsed.diagnostics);
  return parsed;
}

}  // namespace hoikit

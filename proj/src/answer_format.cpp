#include "hoikit/answer_format.hpp"

#include <cmath>

#include <json.hpp>

#include "hoikit/answer_parser.hpp"

namespace hoikit {

namespace {

nlohmann::ordered_json int_box(const BBox& b) {
  auto r = [](double x) { return static_cast<long long>(std::floor(x + 0.5)); };
  return nlohmann::ordered_json::array({r(b.x1), r(b.y1), r(b.x2), r(b.y2)});
}

}  // namespace

nlohmann::ordered_json answer_entry(const BBox& human, const BBox& object, const std::string& object_class,
                                    const std::vector<std::string>& verbs) {
  nlohmann::ordered_json e;
  e[key_name(AnswerKey::human)] = int_box(human);
  e[key_name(AnswerKey::object)] = int_box(object);
  e[key_name(AnswerKey::object_class)] = object_class;
  e[key_name(AnswerKey::verb_class)] = verbs;
  return e;
}

std::string gt_to_answer(const GtImage& image, const Vocabulary& vocab) {
  auto entries = nlohmann::ordered_json::array();
  for (const auto& p : image.pairs) {
    std::vector<std::string> verbs;
    for (VerbId v : p.verb_classes) verbs.push_back(vocab.verb_name(v));
    entries.push_back(answer_entry(p.human, p.object, vocab.object_name(p.object_class), verbs));
  }
  return entries.dump();
}

std::string wrap_completion(std::string_view think, std::string_view answer) {
  std::string out;
  out.reserve(think.size() + answer.size() + 40);
  out += kThinkOpen;
  out += think;
  out += kThinkClose;
  out += kAnswerOpen;
  out += answer;
  out += kAnswerClose;
  return out;
}

}  // namespace hoikit

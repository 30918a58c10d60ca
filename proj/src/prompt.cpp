#include "hoikit/prompt.hpp"

#include <algorithm>
#include <numeric>

#include "hoikit/answer_format.hpp"

namespace hoikit {

TemplateConfig TemplateConfig::from_json(const nlohmann::json& j) {
  TemplateConfig c;
  c.role_line = j.value("role_line", c.role_line);
  c.include_task_description = j.value("include_task_description", c.include_task_description);
  c.include_reasoning_guidance = j.value("include_reasoning_guidance", c.include_reasoning_guidance);
  c.include_format_example = j.value("include_format_example", c.include_format_example);
  c.reasoning_guidance = j.value("reasoning_guidance", c.reasoning_guidance);
  c.example_think = j.value("example_think", c.example_think);
  c.example_answer = j.value("example_answer", c.example_answer);
  return c;
}

nlohmann::json TemplateConfig::to_json() const {
  return {{"role_line", role_line},
          {"include_task_description", include_task_description},
          {"include_reasoning_guidance", include_reasoning_guidance},
          {"include_format_example", include_format_example},
          {"reasoning_guidance", reasoning_guidance},
          {"example_think", example_think},
          {"example_answer", example_answer}};
}

std::string build_prompt(const Vocabulary& vocab, const TemplateConfig& config) {
  std::string p = config.role_line;
  p += '\n';

  if (config.include_task_description) {
    p += "Detect every human-object interaction (HOI) in the image. Each HOI instance is a human box, an object "
         "box, the object class, and the verb classes describing what the human does with the object. Boxes are "
         "[x1, y1, x2, y2] in absolute pixel coordinates.\n\n";
    p += kObjectsOpen;
    p += '\n';
    for (std::size_t i = 0; i < vocab.objects().size(); ++i) {
      if (i) p += ", ";
      p += vocab.objects()[i];
    }
    p += '\n';
    p += kObjectsClose;
    p += "\n\n";

    p += kInteractionsOpen;
    p += '\n';
    // Grouped by object in vocabulary order; verbs keep category order within a group.
    std::vector<HoiId> order(vocab.hoi_triples().size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](HoiId a, HoiId b) { return vocab.category(a).object < vocab.category(b).object; });
    for (HoiId id : order) {
      const auto& t = vocab.category(id);
      p += vocab.verb_name(t.verb);
      p += ' ';
      p += vocab.object_name(t.object);
      p += '\n';
    }
    p += kInteractionsClose;
    p += "\n\n";
  }

  if (config.include_reasoning_guidance) {
    p += config.reasoning_guidance;
    p += "\n\n";
  }

  if (config.include_format_example) {
    p += "Output the thinking process in <think> </think> tags and the final answer as a JSON list in "
         "<answer> </answer> tags. Merge all verbs of one human-object pair into a single entry. Example:\n";
    p += wrap_completion(config.example_think, config.example_answer);
    p += '\n';
  }
  return p;
}

}  // namespace hoikit

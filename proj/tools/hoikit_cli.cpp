// hoikit command-line front end.
//
// Exit codes: 0 success, 1 validation failures present in the output,
// 2 I/O or environment failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hoikit/annotations.hpp"
#include "hoikit/config.hpp"
#include "hoikit/hico_eval.hpp"
#include "hoikit/jsonl.hpp"
#include "hoikit/parallel.hpp"
#include "hoikit/prompt.hpp"
#include "hoikit/reward.hpp"
#include "hoikit/session.hpp"
#include "hoikit/sft.hpp"
#include "hoikit/simulate.hpp"
#include "hoikit/training_math.hpp"
#include "hoikit/version.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace hoikit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitEnv = 2;
constexpr std::size_t kChunk = 4096;

struct Globals {
  std::string config_path;
  std::string weights;
  std::string dedup_mode;
  unsigned workers = 1;
  std::uint64_t seed = 0;
};

struct DatasetArgs {
  std::string path;
  std::string format = "canonical";
};

/// Output sink: a file, or stdout for "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path != "-") {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
  void line(const ordered_json& j) { stream() << j.dump() << '\n'; }

 private:
  std::ofstream file_;
};

Config load_config(const Globals& g) {
  Config c = g.config_path.empty() ? Config{} : Config::load(g.config_path);
  if (!g.weights.empty()) c.apply_weight_overrides(g.weights);
  if (!g.dedup_mode.empty()) c.reward.dedup_mode = dedup_mode_from_string(g.dedup_mode);
  return c;
}

AnnotationFormat parse_format(const std::string& s) {
  if (s == "canonical") return AnnotationFormat::canonical;
  if (s == "hico_json") return AnnotationFormat::hico_json;
  throw std::invalid_argument("unknown dataset format '" + s + "'");
}

void apply_dataset_args(Config& c, const DatasetArgs& d) {
  if (!d.path.empty()) {
    c.dataset_path = d.path;
    c.dataset_format = parse_format(d.format);
  }
  if (!c.dataset_path) throw std::invalid_argument("no dataset given (use --dataset or paths.dataset in --config)");
}

std::shared_ptr<const Dataset> load_dataset(const Config& c) {
  auto vocab = load_vocabulary(c);
  auto loaded = load_annotations(*c.dataset_path, c.dataset_format, vocab);
  for (const auto& d : loaded.diagnostics) {
    std::cerr << "warning: " << c.dataset_path->string() << ": image " << d.image_index << ": " << d.message << '\n';
  }
  return std::make_shared<const Dataset>(std::move(loaded.dataset));
}

ordered_json config_echo(const Config& c) { return c.to_json(); }

double percentile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
  return sorted[std::min(sorted.size() - 1, rank == 0 ? 0 : rank - 1)];
}

int cmd_prompts_build(const Globals& g, const DatasetArgs& d, const std::string& out_path) {
  Config c = load_config(g);
  apply_dataset_args(c, d);
  const auto dataset = load_dataset(c);
  const std::string prompt = build_prompt(dataset->vocab(), c.prompt);
  Output out(out_path);
  out.line(meta_header("prompts build", config_echo(c)));
  for (const auto& img : dataset->images()) out.line({{"image_id", img.image_id}, {"prompt", prompt}});
  return kExitOk;
}

int cmd_simulate(const Globals& g, const DatasetArgs& d, const std::string& out_path, double level,
                 const std::string& profile_path, int samples_per_image) {
  Config c = load_config(g);
  apply_dataset_args(c, d);
  const auto dataset = load_dataset(c);
  NoiseProfile base = NoiseProfile::at_level(level, g.seed);
  if (!profile_path.empty()) {
    std::ifstream in(profile_path);
    if (!in) throw std::runtime_error("cannot open noise profile: " + profile_path);
    base = NoiseProfile::from_json(nlohmann::json::parse(in));
    base.seed = g.seed;
  }
  base.validate();
  if (samples_per_image < 1) throw std::invalid_argument("--samples must be at least 1");

  const auto& images = dataset->images();
  const std::size_t total = images.size() * static_cast<std::size_t>(samples_per_image);
  std::vector<std::string> completions(total);
  parallel_for(total, g.workers, [&](std::size_t k) {
    NoiseProfile p = base;
    p.seed = derive_seed(g.seed, k);
    completions[k] = simulate_policy(images[k / static_cast<std::size_t>(samples_per_image)], dataset->vocab(), p);
  });

  auto echo = config_echo(c);
  echo["simulate"] = {{"seed", g.seed}, {"samples_per_image", samples_per_image}, {"noise", base.to_json()}};
  Output out(out_path);
  out.line(meta_header("simulate", echo));
  for (std::size_t k = 0; k < total; ++k) {
    out.line({{"image_id", images[k / static_cast<std::size_t>(samples_per_image)].image_id},
              {"completion", completions[k]}});
  }
  return kExitOk;
}

struct ScoreLine {
  std::size_t line_no = 0;
  std::optional<CompletionSample> sample;
  std::string error;
};

std::optional<CompletionSample> sample_from_json(const nlohmann::json& j, std::string& error) {
  if (!j.is_object() || !j.contains("image_id") || !j.at("image_id").is_string()) {
    error = "record needs a string image_id";
    return std::nullopt;
  }
  CompletionSample s;
  s.image_id = j.at("image_id").get<std::string>();
  if (j.contains("completion")) {
    if (!j.at("completion").is_string()) {
      error = "completion must be a string";
      return std::nullopt;
    }
    s.completion = j.at("completion").get<std::string>();
  }
  return s;
}

int cmd_reward_score(const Globals& g, const DatasetArgs& d, const std::string& completions_path,
                     const std::string& out_path) {
  Config c = load_config(g);
  apply_dataset_args(c, d);
  const auto session = std::make_shared<const Session>(c, load_dataset(c), std::set<HoiId>{});
  JsonlReader reader(completions_path);
  Output out(out_path);
  out.line(meta_header("reward score", config_echo(c)));

  std::vector<double> totals;
  std::size_t errors = 0;
  bool done = false;
  while (!done) {
    std::vector<ScoreLine> chunk;
    JsonlLine line;
    while (chunk.size() < kChunk) {
      if (!reader.next(line)) {
        done = true;
        break;
      }
      ScoreLine sl;
      sl.line_no = line.line_no;
      if (line.value) {
        sl.sample = sample_from_json(*line.value, sl.error);
      } else {
        sl.error = "invalid JSON: " + line.error;
      }
      chunk.push_back(std::move(sl));
    }
    std::vector<std::optional<RewardBreakdown>> results(chunk.size());
    parallel_for(chunk.size(), g.workers, [&](std::size_t i) {
      auto& sl = chunk[i];
      if (!sl.sample) return;
      if (!session->dataset().find(sl.sample->image_id)) {
        sl.error = "unknown image_id '" + sl.sample->image_id + "'";
        return;
      }
      results[i] = session->score_one(*sl.sample);
    });
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      if (!results[i]) {
        ++errors;
        ordered_json e;
        e["line"] = chunk[i].line_no;
        if (chunk[i].sample) e["image_id"] = chunk[i].sample->image_id;
        e["error"] = chunk[i].error;
        out.line(e);
        continue;
      }
      ordered_json rec;
      rec["image_id"] = chunk[i].sample->image_id;
      const auto body = to_json(*results[i]);
      for (const auto& [k, v] : body.items()) rec[k] = v;
      out.line(rec);
      totals.push_back(results[i]->total);
    }
  }

  std::sort(totals.begin(), totals.end());
  double mean = 0.0;
  for (double t : totals) mean += t;
  if (!totals.empty()) mean /= static_cast<double>(totals.size());
  char buf[256];
  std::snprintf(buf, sizeof buf, "scored %zu, errors %zu, mean %.4f, p10 %.4f, p50 %.4f, p90 %.4f\n",
                totals.size(), errors, mean, percentile(totals, 0.1), percentile(totals, 0.5),
                percentile(totals, 0.9));
  std::cerr << buf;
  return errors ? kExitInvalid : kExitOk;
}

int cmd_eval_map(const Globals& g, const DatasetArgs& d, const std::string& predictions_path,
                 const std::string& rare_path, const std::string& train_path, const std::string& format,
                 const std::string& out_path) {
  Config c = load_config(g);
  apply_dataset_args(c, d);
  if (format != "jsonl" && format != "table") throw std::invalid_argument("--format must be jsonl or table");
  if (!rare_path.empty()) c.rare_categories_path = rare_path;
  if (!train_path.empty()) c.train_dataset_path = train_path;
  const auto session = make_session(c);

  std::vector<PredictionTriplet> triplets;
  std::vector<std::string> unknown;
  std::size_t errors = 0;
  JsonlReader reader(predictions_path);
  JsonlLine line;
  while (reader.next(line)) {
    std::string error;
    if (!line.value) {
      error = "invalid JSON: " + line.error;
    } else if (const auto sample = sample_from_json(*line.value, error)) {
      if (!session->dataset().find(sample->image_id)) {
        if (std::find(unknown.begin(), unknown.end(), sample->image_id) == unknown.end()) {
          unknown.push_back(sample->image_id);
        }
        continue;
      }
      if (line.value->contains("completion")) {
        auto t = session->expand(std::span<const CompletionSample>(&*sample, 1));
        triplets.insert(triplets.end(), t.begin(), t.end());
        continue;
      }
      if (auto t = triplet_from_json(*line.value, session->vocab(), error)) {
        triplets.push_back(std::move(*t));
        continue;
      }
    }
    ++errors;
    std::cerr << predictions_path << ":" << line.line_no << ": " << error << '\n';
  }

  if (!unknown.empty()) {
    std::cerr << "error: " << UnknownImageError(unknown).what() << '\n';
    return kExitInvalid;
  }

  EvalOptions options;
  options.workers = g.workers;
  EvalTable table;
  try {
    table = evaluate(triplets, session->dataset(), session->rare_set(), options);
  } catch (const UnknownImageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  Output out(out_path);
  if (format == "table") {
    out.stream() << "# hoikit " << kVersion << " eval map " << config_echo(c).dump() << '\n';
    out.stream() << format_eval_table(table);
  } else {
    out.line(meta_header("eval map", config_echo(c)));
    out.line(eval_report_json(table, session->vocab()));
  }
  return errors ? kExitInvalid : kExitOk;
}

/// Lines are either groups (a bare array or {"group_id", "rewards": [...]}) or scored
/// records with a "total", grouped consecutively by the configured size.
int cmd_grpo_advantages(const Globals& g, const std::string& in_path, const std::string& out_path) {
  const Config c = load_config(g);
  JsonlReader reader(in_path);
  Output out(out_path);
  auto echo = config_echo(c);
  out.line(meta_header("grpo advantages", echo));

  std::size_t errors = 0;
  std::vector<double> pending;
  std::size_t pending_line = 0;
  auto emit = [&](const std::vector<double>& rewards, std::size_t line_no, const nlohmann::json& group_id) {
    try {
      ordered_json rec;
      if (!group_id.is_null()) rec["group_id"] = group_id;
      rec["rewards"] = rewards;
      rec["advantages"] = group_advantages(rewards);
      out.line(rec);
    } catch (const std::invalid_argument& e) {
      ++errors;
      out.line({{"line", line_no}, {"error", e.what()}});
    }
  };
  JsonlLine line;
  while (reader.next(line)) {
    if (!line.value) {
      ++errors;
      out.line({{"line", line.line_no}, {"error", "invalid JSON: " + line.error}});
      continue;
    }
    const auto& v = *line.value;
    try {
      if (v.is_array() || (v.is_object() && v.contains("rewards"))) {
        const nlohmann::json group_id = v.is_object() ? v.value("group_id", nlohmann::json()) : nlohmann::json();
        emit((v.is_array() ? v : v.at("rewards")).get<std::vector<double>>(), line.line_no, group_id);
      } else if (v.is_object() && v.contains("total")) {
        if (pending.empty()) pending_line = line.line_no;
        pending.push_back(v.at("total").get<double>());
        if (pending.size() == static_cast<std::size_t>(c.group_size)) {
          emit(pending, pending_line, nlohmann::json());
          pending.clear();
        }
      } else {
        throw std::invalid_argument("expected a reward array, {\"rewards\": [...]} or a record with \"total\"");
      }
    } catch (const std::exception& e) {
      ++errors;
      out.line({{"line", line.line_no}, {"error", e.what()}});
    }
  }
  if (!pending.empty()) {
    ++errors;
    out.line({{"line", pending_line},
              {"error", "incomplete group of " + std::to_string(pending.size()) + " at end of input"}});
  }
  return errors ? kExitInvalid : kExitOk;
}

int cmd_sft_assemble(const Globals& g, const DatasetArgs& d, const std::string& traces_path,
                     const std::string& out_path) {
  Config c = load_config(g);
  apply_dataset_args(c, d);
  const auto dataset = load_dataset(c);
  if (!fs::exists(traces_path)) throw std::runtime_error("trace file not found: " + traces_path);
  std::size_t bad = 0;
  const auto traces = read_traces(traces_path, &bad);
  const auto assembly = assemble_sft(*dataset, traces, c.prompt);
  Output out(out_path);
  out.line(meta_header("sft assemble", config_echo(c)));
  for (const auto& r : assembly.records) out.line(r.to_json());
  std::cerr << "records " << assembly.records.size() << ", images without trace " << assembly.skipped
            << ", malformed trace lines " << bad << '\n';
  return bad ? kExitInvalid : kExitOk;
}

int cmd_sft_fetch(const Globals& g, const DatasetArgs& d, const std::string& traces_path,
                  const std::string& endpoint_path, std::optional<std::size_t> limit) {
  Config c = load_config(g);
  apply_dataset_args(c, d);
  const auto dataset = load_dataset(c);
  EndpointConfig endpoint = c.endpoint;
  if (!endpoint_path.empty()) {
    std::ifstream in(endpoint_path);
    if (!in) throw std::runtime_error("cannot open endpoint config: " + endpoint_path);
    endpoint = EndpointConfig::from_json(nlohmann::json::parse(in));
  }
  FetchOptions options;
  options.limit = limit;
  const auto report = fetch_traces(*dataset, endpoint, traces_path, options);
  for (const auto& l : report.log) std::cerr << l << '\n';
  std::cerr << "already present " << report.already_present << ", fetched " << report.fetched << ", failed "
            << report.failed.size() << '\n';
  return report.failed.empty() ? kExitOk : kExitInvalid;
}

int cmd_dataset_import(const Globals& g, const std::string& in_path, const std::string& format,
                       const std::string& split, const std::string& out_path) {
  const Config c = load_config(g);
  auto vocab = load_vocabulary(c);
  auto loaded = load_annotations(in_path, parse_format(format), vocab, split_from_string(split));
  for (const auto& d : loaded.diagnostics) {
    std::cerr << in_path << ": image " << d.image_index;
    if (d.record_index) std::cerr << " record " << *d.record_index;
    std::cerr << ": " << d.message << '\n';
  }
  for (const auto& id : loaded.flagged_images) std::cerr << in_path << ": image " << id << " has no valid pair\n";
  auto doc = to_canonical_json(loaded.dataset);
  doc["_meta"] = meta_header("dataset import", config_echo(c))["_meta"];
  Output out(out_path);
  out.stream() << doc.dump(1) << '\n';
  std::size_t pairs = 0;
  for (const auto& img : loaded.dataset.images()) pairs += img.pairs.size();
  std::cerr << "images " << loaded.dataset.size() << ", pairs " << pairs << ", diagnostics "
            << loaded.diagnostics.size() << '\n';
  return loaded.diagnostics.empty() ? kExitOk : kExitInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reward, evaluation and data tooling for text-output human-object interaction detection."};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("hoikit ") + kVersion);

  Globals g;
  app.add_option("--config", g.config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--weights", g.weights, "Format reward weight overrides, e.g. w_tag=0.2,w_b=0.2 (default 0.2 each)");
  app.add_option("--dedup-mode", g.dedup_mode,
                 "pair-both (default, assumed) or either-box")
      ->check(CLI::IsMember({"pair-both", "either-box"}));
  app.add_option("--workers", g.workers, "Worker threads; results do not depend on it")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "Run seed for simulate");
  app.footer(
      "Config defaults: reward weights 0.2, group size 4. Assumed, not stated by the reference setup: clip eps 0.2, KL beta 0.04, "
      "dedup mode, SFT loss normalization, score synthesis (output-order).\n"
      "Exit codes: 0 ok, 1 validation failures in output, 2 I/O or environment failure.");

  int rc = kExitOk;
  DatasetArgs dargs;
  auto add_dataset = [&](CLI::App* sub) {
    sub->add_option("--dataset", dargs.path, "Annotation file (overrides paths.dataset)");
    sub->add_option("--dataset-format", dargs.format, "canonical or hico_json")
        ->check(CLI::IsMember({"canonical", "hico_json"}));
  };
  std::string out_path = "-";

  auto* prompts = app.add_subcommand("prompts", "Prompt construction");
  prompts->require_subcommand(1);
  auto* prompts_build = prompts->add_subcommand("build", "Write one {image_id, prompt} line per image");
  add_dataset(prompts_build);
  prompts_build->add_option("--out", out_path, "Output JSONL ('-' for stdout)");
  prompts_build->callback([&] { rc = cmd_prompts_build(g, dargs, out_path); });

  double level = 0.0;
  std::string profile_path;
  int samples = 1;
  auto* simulate = app.add_subcommand("simulate", "Noisy-policy completions from ground truth");
  add_dataset(simulate);
  simulate->add_option("--noise", level, "One-knob noise level in [0,1]");
  simulate->add_option("--noise-profile", profile_path, "JSON noise profile (overrides --noise)");
  simulate->add_option("--samples", samples, "Completions per image");
  simulate->add_option("--out", out_path, "Output JSONL");
  simulate->callback([&] { rc = cmd_simulate(g, dargs, out_path, level, profile_path, samples); });

  std::string completions_path;
  auto* reward = app.add_subcommand("reward", "Reward computation");
  reward->require_subcommand(1);
  auto* reward_score = reward->add_subcommand("score", "Score {image_id, completion} lines");
  add_dataset(reward_score);
  reward_score->add_option("--completions", completions_path, "Input JSONL")->required();
  reward_score->add_option("--out", out_path, "Output JSONL");
  reward_score->callback([&] { rc = cmd_reward_score(g, dargs, completions_path, out_path); });

  std::string predictions_path, rare_path, train_path, format = "jsonl";
  auto* eval = app.add_subcommand("eval", "Evaluation");
  eval->require_subcommand(1);
  auto* eval_map = eval->add_subcommand("map", "HICO-DET style mAP");
  add_dataset(eval_map);
  eval_map->add_option("--predictions", predictions_path,
                       "JSONL of completions or pre-expanded triplets")->required();
  eval_map->add_option("--rare", rare_path, "JSON list of rare category indices");
  eval_map->add_option("--train", train_path, "Training annotations for the rare split");
  eval_map->add_option("--format", format, "jsonl or table")->check(CLI::IsMember({"jsonl", "table"}));
  eval_map->add_option("--out", out_path, "Output path");
  eval_map->callback(
      [&] { rc = cmd_eval_map(g, dargs, predictions_path, rare_path, train_path, format, out_path); });

  std::string in_path;
  auto* grpo = app.add_subcommand("grpo", "GRPO utilities");
  grpo->require_subcommand(1);
  auto* grpo_adv = grpo->add_subcommand("advantages", "Group-normalized advantages");
  grpo_adv->add_option("--in", in_path, "Input JSONL")->required();
  grpo_adv->add_option("--out", out_path, "Output JSONL");
  grpo_adv->callback([&] { rc = cmd_grpo_advantages(g, in_path, out_path); });

  std::string traces_path, endpoint_path;
  std::optional<std::size_t> limit;
  auto* sft = app.add_subcommand("sft", "Reasoning-distillation data");
  sft->require_subcommand(1);
  auto* sft_assemble = sft->add_subcommand("assemble", "Join traces with prompts and GT answers");
  add_dataset(sft_assemble);
  sft_assemble->add_option("--traces", traces_path, "Trace JSONL")->required();
  sft_assemble->add_option("--out", out_path, "Output JSONL");
  sft_assemble->callback([&] { rc = cmd_sft_assemble(g, dargs, traces_path, out_path); });
  auto* sft_fetch = sft->add_subcommand("fetch", "Request missing traces from a chat-completions endpoint");
  add_dataset(sft_fetch);
  sft_fetch->add_option("--traces", traces_path, "Trace JSONL, appended to")->required();
  sft_fetch->add_option("--endpoint", endpoint_path, "Endpoint JSON (overrides the config's endpoint)");
  sft_fetch->add_option("--limit", limit, "Fetch at most this many images");
  sft_fetch->callback([&] { rc = cmd_sft_fetch(g, dargs, traces_path, endpoint_path, limit); });

  std::string import_format = "hico_json", split = "test";
  auto* dataset = app.add_subcommand("dataset", "Annotation files");
  dataset->require_subcommand(1);
  auto* dataset_import = dataset->add_subcommand("import", "Convert annotations to the canonical schema");
  dataset_import->add_option("--in", in_path, "Input annotations")->required();
  dataset_import->add_option("--format", import_format, "hico_json or canonical")
      ->check(CLI::IsMember({"canonical", "hico_json"}));
  dataset_import->add_option("--split", split, "train or test")->check(CLI::IsMember({"train", "test"}));
  dataset_import->add_option("--out", out_path, "Output canonical JSON");
  dataset_import->callback([&] { rc = cmd_dataset_import(g, in_path, import_format, split, out_path); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitEnv;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitEnv;
  }
  return rc;
}

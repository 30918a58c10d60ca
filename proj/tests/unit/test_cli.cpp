#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hoikit/session.hpp"
#include "support.hpp"

using namespace hoikit;
using namespace hoikit::test;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string l;
  while (std::getline(in, l)) out.push_back(l);
  return out;
}

/// Runs the CLI with `args` (shell syntax) and captures both streams.
Run cli(const TempDir& dir, const std::string& args) {
  const auto out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd = std::string("'") + HOIKIT_CLI + "' " + args + " > '" + out.string() + "' 2> '" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }
std::string fixture() { return " --dataset " + q(data("mini_canonical.json")); }

}  // namespace

TEST_CASE("version and usage errors") {
  TempDir dir;
  auto r = cli(dir, "--version");
  CHECK(r.code == 0);
  CHECK(r.out.find("0.1.0") != std::string::npos);
  CHECK(cli(dir, "").code == 2);
  CHECK(cli(dir, "reward score" + fixture()).code == 2);  // --completions required
  CHECK(cli(dir, "--weights w_q=1 prompts build" + fixture()).code == 2);
}

TEST_CASE("missing inputs exit 2 and name the path") {
  TempDir dir;
  auto r = cli(dir, "prompts build --dataset " + q(dir / "absent.json"));
  CHECK(r.code == 2);
  CHECK(r.err.find("absent.json") != std::string::npos);
  r = cli(dir, "reward score" + fixture() + " --completions " + q(dir / "nothing.jsonl"));
  CHECK(r.code == 2);
  CHECK(r.err.find("nothing.jsonl") != std::string::npos);
  r = cli(dir, "--config " + q(dir / "cfg.json") + " prompts build");
  CHECK(r.code == 2);
  CHECK(r.err.find("cfg.json") != std::string::npos);
}

TEST_CASE("prompts build writes one record per image after the header") {
  TempDir dir;
  const auto r = cli(dir, "prompts build" + fixture());
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 21);
  const auto meta = nlohmann::json::parse(ls[0]);
  CHECK(meta["_meta"]["tool"] == "hoikit");
  CHECK(meta["_meta"]["command"] == "prompts build");
  CHECK(meta["_meta"]["config"]["reward"]["w_tag"] == 0.2);
  CHECK(nlohmann::json::parse(ls[1])["image_id"] == "fx_000");
}

TEST_CASE("identical invocations give identical files") {
  TempDir dir;
  for (const auto* name : {"a.jsonl", "b.jsonl"}) {
    REQUIRE(cli(dir, "--seed 11 simulate" + fixture() + " --noise 0.2 --samples 3 --out " + q(dir / name)).code == 0);
  }
  CHECK(slurp(dir / "a.jsonl") == slurp(dir / "b.jsonl"));
  REQUIRE(cli(dir, "--seed 12 simulate" + fixture() + " --noise 0.2 --samples 3 --out " + q(dir / "c.jsonl")).code == 0);
  CHECK(slurp(dir / "a.jsonl") != slurp(dir / "c.jsonl"));
  CHECK(lines(slurp(dir / "a.jsonl")).size() == 61);
}

TEST_CASE("reward score matches in-process scoring and ignores worker count") {
  TempDir dir;
  REQUIRE(cli(dir, "--seed 3 simulate" + fixture() + " --noise 0.15 --samples 50 --out " + q(dir / "c.jsonl")).code == 0);
  REQUIRE(cli(dir, "--workers 1 reward score" + fixture() + " --completions " + q(dir / "c.jsonl") + " --out " +
                       q(dir / "r1.jsonl"))
              .code == 0);
  const auto r8 = cli(dir, "--workers 8 reward score" + fixture() + " --completions " + q(dir / "c.jsonl") +
                               " --out " + q(dir / "r8.jsonl"));
  REQUIRE(r8.code == 0);
  CHECK(r8.err.find("scored 1000, errors 0") != std::string::npos);
  CHECK(slurp(dir / "r1.jsonl") == slurp(dir / "r8.jsonl"));

  const auto session = load_session(data("mini_config.json"));
  const auto in = lines(slurp(dir / "c.jsonl"));
  const auto scored = lines(slurp(dir / "r1.jsonl"));
  REQUIRE(in.size() == 1001);
  REQUIRE(scored.size() == 1001);
  std::vector<CompletionSample> samples;
  for (std::size_t i = 1; i < in.size(); ++i) {
    const auto j = nlohmann::json::parse(in[i]);
    samples.push_back({j["image_id"], j["completion"]});
  }
  const auto batch = session->score_batch(samples, 3);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto rec = nlohmann::json::parse(scored[i + 1]);
    CHECK(rec["image_id"] == samples[i].image_id);
    CHECK(rec["total"].get<double>() == batch[i].total);
    CHECK(rec["r_iou"].get<double>() == batch[i].r_iou);
  }
}

TEST_CASE("reward score reports bad records and keeps going") {
  TempDir dir;
  {
    std::ofstream out(dir / "c.jsonl");
    out << R"({"image_id":"fx_000","completion":""})" << '\n'
        << "{oops\n"
        << R"({"image_id":"ghost","completion":"x"})" << '\n'
        << R"({"image_id":"fx_001"})" << '\n';
  }
  const auto r = cli(dir, "reward score" + fixture() + " --completions " + q(dir / "c.jsonl"));
  CHECK(r.code == 1);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 5);
  const auto first = nlohmann::json::parse(ls[1]);
  CHECK(first["total"] == 0.0);
  CHECK(first["r_tag"] == 0.0);
  const auto bad = nlohmann::json::parse(ls[2]);
  CHECK(bad["line"] == 2);
  CHECK(bad.contains("error"));
  const auto ghost = nlohmann::json::parse(ls[3]);
  CHECK(ghost["image_id"] == "ghost");
  CHECK(ghost["error"].get<std::string>().find("ghost") != std::string::npos);
  CHECK(nlohmann::json::parse(ls[4])["total"] == 0.0);
  CHECK(r.err.find("errors 2") != std::string::npos);
}

TEST_CASE("weight overrides reach the scorer") {
  TempDir dir;
  REQUIRE(cli(dir, "simulate" + fixture() + " --out " + q(dir / "c.jsonl")).code == 0);
  const auto r = cli(dir, "--weights w_tag=0,w_b=0.5 reward score" + fixture() + " --completions " + q(dir / "c.jsonl"));
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  CHECK(nlohmann::json::parse(ls[0])["_meta"]["config"]["reward"]["w_b"] == 0.5);
  CHECK(nlohmann::json::parse(ls[1])["total"].get<double>() == doctest::Approx(3.9).epsilon(1e-12));
}

TEST_CASE("eval map on the golden set") {
  TempDir dir;
  const auto g = data("golden");
  const auto r = cli(dir, "eval map --dataset " + q(g / "gt.json") + " --predictions " + q(g / "predictions.jsonl") +
                              " --rare " + q(g / "rare.json"));
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 2);
  CHECK(ls[1] + "\n" == slurp(g / "expected_report.json"));

  const auto t = cli(dir, "eval map --dataset " + q(g / "gt.json") + " --predictions " + q(g / "predictions.jsonl") +
                              " --rare " + q(g / "rare.json") + " --format table");
  REQUIRE(t.code == 0);
  CHECK(t.out.find("70.83") != std::string::npos);
  CHECK(t.out.find("Known") != std::string::npos);
}

TEST_CASE("eval map on echoed completions and unknown images") {
  TempDir dir;
  REQUIRE(cli(dir, "simulate" + fixture() + " --noise 0 --out " + q(dir / "c.jsonl")).code == 0);
  const auto r = cli(dir, "--workers 3 eval map" + fixture() + " --predictions " + q(dir / "c.jsonl"));
  REQUIRE(r.code == 0);
  const auto report = nlohmann::json::parse(lines(r.out)[1]);
  for (const auto* setting : {"default", "known_object"})
    for (const auto* cell : {"full", "rare", "non_rare"}) {
      if (!report[setting][cell].is_null()) CHECK(report[setting][cell] == 100.0);
    }
  CHECK(report["default"]["full"] == 100.0);

  std::ofstream(dir / "ghost.jsonl") << R"({"image_id":"ghost","completion":"nothing"})" << '\n';
  const auto u = cli(dir, "eval map" + fixture() + " --predictions " + q(dir / "ghost.jsonl"));
  CHECK(u.code == 1);
  CHECK(u.err.find("ghost") != std::string::npos);
}

TEST_CASE("grpo advantages") {
  TempDir dir;
  {
    std::ofstream out(dir / "g.jsonl");
    out << "[0, 1]\n"
        << R"({"group_id":"q7","rewards":[2,2,2,2]})" << '\n'
        << "[1]\n";
  }
  const auto r = cli(dir, "grpo advantages --in " + q(dir / "g.jsonl"));
  CHECK(r.code == 1);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 4);
  CHECK(nlohmann::json::parse(ls[1])["advantages"] == nlohmann::json::array({-1.0, 1.0}));
  const auto q7 = nlohmann::json::parse(ls[2]);
  CHECK(q7["group_id"] == "q7");
  CHECK(q7["advantages"] == nlohmann::json::array({0.0, 0.0, 0.0, 0.0}));
  CHECK(nlohmann::json::parse(ls[3]).contains("error"));

  // Scored records are grouped by the configured group size.
  REQUIRE(cli(dir, "--seed 1 simulate" + fixture() + " --noise 0.3 --samples 4 --out " + q(dir / "c.jsonl")).code == 0);
  REQUIRE(cli(dir, "reward score" + fixture() + " --completions " + q(dir / "c.jsonl") + " --out " + q(dir / "s.jsonl"))
              .code == 0);
  const auto a = cli(dir, "grpo advantages --in " + q(dir / "s.jsonl"));
  REQUIRE(a.code == 0);
  CHECK(lines(a.out).size() == 21);
}

TEST_CASE("sft assemble and dataset import") {
  TempDir dir;
  {
    std::ofstream out(dir / "t.jsonl");
    for (int i = 0; i < 20; ++i) {
      char id[16];
      std::snprintf(id, sizeof id, "fx_%03d", i);
      out << nlohmann::json{{"image_id", id}, {"think", "trace"}}.dump() << '\n';
    }
  }
  const auto r = cli(dir, "sft assemble" + fixture() + " --traces " + q(dir / "t.jsonl"));
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 21);
  const auto rec = nlohmann::json::parse(ls[1]);
  CHECK(rec["think"] == "trace");
  CHECK(rec["answer"].get<std::string>().find("bicycle") != std::string::npos);

  const auto imp = cli(dir, "dataset import --in " + q(data("mini_hico.json")) + " --format hico_json --out " +
                                q(dir / "canon.json"));
  REQUIRE(imp.code == 0);
  const auto reloaded = load_annotations(dir / "canon.json", AnnotationFormat::canonical, vocab_ptr());
  CHECK(reloaded.diagnostics.empty());
  CHECK(reloaded.dataset.images() == mini().images());
}

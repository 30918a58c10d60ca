#include "hoikit/sft.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <thread>

#include <httplib.h>

#include "hoikit/answer_format.hpp"
#include "hoikit/answer_parser.hpp"

namespace hoikit {

namespace {

using Clock = std::chrono::steady_clock;

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

class RateLimiter {
 public:
  explicit RateLimiter(int min_interval_ms) : interval_(min_interval_ms) {}
  void wait() {
    if (interval_.count() <= 0) return;
    std::unique_lock lock(mu_);
    const auto now = Clock::now();
    const auto slot = std::max(now, next_);
    next_ = slot + interval_;
    lock.unlock();
    std::this_thread::sleep_until(slot);
  }

 private:
  std::chrono::milliseconds interval_;
  std::mutex mu_;
  Clock::time_point next_{};
};

struct Outcome {
  std::optional<std::string> think;
  int attempts = 0;
  std::vector<std::string> log;
};

Outcome fetch_one(const std::string& image_id, const EndpointConfig& cfg, const std::string& prompt,
                  const std::string& token, RateLimiter& limiter) {
  Outcome out;
  httplib::Client client(cfg.base_url);
  client.set_connection_timeout(cfg.timeout_s, 0);
  client.set_read_timeout(cfg.timeout_s, 0);
  httplib::Headers headers;
  if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);

  const nlohmann::json body = {
      {"model", cfg.model},
      {"messages",
       {{{"role", "user"},
         {"content",
          {{{"type", "text"}, {"text", prompt}},
           {{"type", "image_url"}, {"image_url", {{"url", cfg.image_url_prefix + image_id}}}}}}}}}};
  const std::string payload = body.dump();

  int backoff = cfg.initial_backoff_ms;
  for (int attempt = 1; attempt <= cfg.max_attempts; ++attempt) {
    limiter.wait();
    out.attempts = attempt;
    auto res = client.Post(cfg.path, headers, payload, "application/json");
    std::string failure;
    if (!res) {
      failure = "transport error: " + httplib::to_string(res.error());
    } else if (res->status == 200) {
      if (auto think = trace_from_response(res->body)) {
        out.think = std::move(think);
        out.log.push_back(image_id + ": attempt " + std::to_string(attempt) + " ok");
        return out;
      }
      failure = "response without message content";
    } else {
      failure = "HTTP " + std::to_string(res->status);
    }
    out.log.push_back(image_id + ": attempt " + std::to_string(attempt) + " failed (" + failure + ")");
    if (attempt < cfg.max_attempts) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
      backoff = std::min(backoff * 2, cfg.max_backoff_ms);
    }
  }
  return out;
}

}  // namespace

nlohmann::ordered_json SftRecord::to_json() const {
  return {{"image_id", image_id}, {"prompt", prompt}, {"think", think}, {"answer", answer}};
}

TraceMap read_traces(const std::filesystem::path& path, std::size_t* bad_lines) {
  TraceMap traces;
  std::ifstream in(path);
  if (!in) return traces;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("image_id") || !j.contains("think") ||
        !j.at("image_id").is_string() || !j.at("think").is_string()) {
      if (!(j.is_object() && j.contains("_meta")) && bad_lines) ++*bad_lines;
      continue;
    }
    traces.emplace(j.at("image_id").get<std::string>(), j.at("think").get<std::string>());
  }
  return traces;
}

SftAssembly assemble_sft(const Dataset& dataset, const TraceMap& traces, const TemplateConfig& config) {
  SftAssembly out;
  const std::string prompt = build_prompt(dataset.vocab(), config);
  for (const auto& img : dataset.images()) {
    const auto it = traces.find(img.image_id);
    if (it == traces.end()) {
      ++out.skipped;
      continue;
    }
    out.records.push_back(SftRecord{img.image_id, prompt, it->second, gt_to_answer(img, dataset.vocab())});
  }
  return out;
}

EndpointConfig EndpointConfig::from_json(const nlohmann::json& j) {
  EndpointConfig c;
  c.base_url = j.value("base_url", c.base_url);
  c.path = j.value("path", c.path);
  c.model = j.value("model", c.model);
  c.token_env = j.value("token_env", c.token_env);
  c.image_url_prefix = j.value("image_url_prefix", c.image_url_prefix);
  if (j.contains("prompt") && j.at("prompt").is_string()) c.prompt = j.at("prompt").get<std::string>();
  c.max_attempts = std::max(1, j.value("max_attempts", c.max_attempts));
  c.initial_backoff_ms = j.value("initial_backoff_ms", c.initial_backoff_ms);
  c.max_backoff_ms = j.value("max_backoff_ms", c.max_backoff_ms);
  c.concurrency = std::max(1, j.value("concurrency", c.concurrency));
  c.min_interval_ms = j.value("min_interval_ms", c.min_interval_ms);
  c.timeout_s = j.value("timeout_s", c.timeout_s);
  return c;
}

nlohmann::json EndpointConfig::to_json() const {
  nlohmann::json j = {{"base_url", base_url},
                      {"path", path},
                      {"model", model},
                      {"token_env", token_env},
                      {"image_url_prefix", image_url_prefix},
                      {"max_attempts", max_attempts},
                      {"initial_backoff_ms", initial_backoff_ms},
                      {"max_backoff_ms", max_backoff_ms},
                      {"concurrency", concurrency},
                      {"min_interval_ms", min_interval_ms},
                      {"timeout_s", timeout_s}};
  if (prompt) j["prompt"] = *prompt;
  return j;
}

std::optional<std::string> trace_from_response(const std::string& body) {
  const auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  const auto choices = j.value("choices", nlohmann::json::array());
  if (!choices.is_array() || choices.empty() || !choices[0].is_object()) return std::nullopt;
  const auto message = choices[0].value("message", nlohmann::json::object());
  if (!message.is_object() || !message.contains("content") || !message.at("content").is_string()) return std::nullopt;
  const std::string content = message.at("content").get<std::string>();
  if (const auto think = extract_tags(content).think) return trim(*think);
  return trim(content);
}

FetchReport fetch_traces(const Dataset& dataset, const EndpointConfig& endpoint, const std::filesystem::path& trace_path,
                         const FetchOptions& options) {
  FetchReport report;
  const TraceMap existing = read_traces(trace_path);

  std::vector<std::string> pending;
  for (const auto& img : dataset.images()) {
    if (existing.count(img.image_id)) {
      ++report.already_present;
    } else {
      pending.push_back(img.image_id);
    }
  }
  std::sort(pending.begin(), pending.end());
  if (options.limit && pending.size() > *options.limit) pending.resize(*options.limit);

  const std::string prompt = endpoint.prompt.value_or(TemplateConfig{}.reasoning_guidance);
  std::string token;
  if (const char* t = std::getenv(endpoint.token_env.c_str())) token = t;
  if (token.empty()) report.log.push_back("warning: " + endpoint.token_env + " is not set; sending no credentials");

  std::ofstream out(trace_path, std::ios::app);
  if (!out) throw std::runtime_error("cannot write trace file: " + trace_path.string());
  RateLimiter limiter(endpoint.min_interval_ms);

  const std::size_t batch = static_cast<std::size_t>(std::max(1, endpoint.concurrency));
  for (std::size_t start = 0; start < pending.size(); start += batch) {
    const std::size_t end = std::min(pending.size(), start + batch);
    std::vector<Outcome> outcomes(end - start);
    std::vector<std::thread> workers;
    for (std::size_t k = start; k < end; ++k) {
      workers.emplace_back([&, k] { outcomes[k - start] = fetch_one(pending[k], endpoint, prompt, token, limiter); });
    }
    for (auto& w : workers) w.join();
    for (std::size_t k = start; k < end; ++k) {
      auto& o = outcomes[k - start];
      report.attempts[pending[k]] = o.attempts;
      report.log.insert(report.log.end(), o.log.begin(), o.log.end());
      if (o.think) {
        out << nlohmann::ordered_json{{"image_id", pending[k]}, {"think", *o.think}}.dump() << '\n';
        ++report.fetched;
      } else {
        report.failed.push_back(pending[k]);
      }
    }
    out.flush();
  }

  auto failed_path = trace_path;
  failed_path += ".failed";
  if (!report.failed.empty()) {
    std::ofstream f(failed_path);
    for (const auto& id : report.failed) f << id << '\n';
  } else {
    std::error_code ec;
    std::filesystem::remove(failed_path, ec);
  }
  return report;
}

}  // namespace hoikit

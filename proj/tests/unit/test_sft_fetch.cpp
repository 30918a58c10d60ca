#include <doctest.h>

#include <atomic>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include <httplib.h>

#include "hoikit/sft.hpp"
#include "support.hpp"

using namespace hoikit;
using namespace hoikit::test;

namespace {

/// Local chat-completions stub. Responds "T" unless a scripted status list says otherwise.
class StubServer {
 public:
  StubServer() {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      const auto body = nlohmann::json::parse(req.body);
      const std::string url = body["messages"][0]["content"][1]["image_url"]["url"];
      const std::string id = url.substr(url.rfind('/') + 1);
      int status = 200;
      {
        std::lock_guard lock(mu_);
        ++requests_[id];
        auto& script = scripts_[id];
        if (!script.empty()) {
          status = script.front();
          script.erase(script.begin());
        }
      }
      res.status = status;
      if (status == 200) res.set_content(R"({"choices":[{"message":{"content":"T"}}]})", "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  void script(const std::string& id, std::vector<int> statuses) { scripts_[id] = std::move(statuses); }
  int requests(const std::string& id) {
    std::lock_guard lock(mu_);
    return requests_[id];
  }
  int total_requests() {
    std::lock_guard lock(mu_);
    int n = 0;
    for (const auto& [id, k] : requests_) n += k;
    return n;
  }

  EndpointConfig endpoint() const {
    EndpointConfig e;
    e.base_url = "http://127.0.0.1:" + std::to_string(port_);
    e.image_url_prefix = "file:///images/";
    e.initial_backoff_ms = 5;
    e.max_backoff_ms = 20;
    e.token_env = "HOIKIT_TEST_UNSET_TOKEN";
    e.timeout_s = 5;
    return e;
  }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::mutex mu_;
  std::map<std::string, int> requests_;
  std::map<std::string, std::vector<int>> scripts_;
};

}  // namespace

TEST_CASE("fetch writes one trace per image and resumes without repeats") {
  StubServer stub;
  TempDir dir;
  const auto path = dir / "traces.jsonl";

  FetchOptions first;
  first.limit = 7;
  auto r1 = fetch_traces(mini(), stub.endpoint(), path, first);
  CHECK(r1.fetched == 7);
  CHECK(r1.already_present == 0);
  CHECK(stub.total_requests() == 7);

  auto r2 = fetch_traces(mini(), stub.endpoint(), path);
  CHECK(r2.already_present == 7);
  CHECK(r2.fetched == 13);
  CHECK(r2.failed.empty());
  CHECK(stub.total_requests() == 20);
  for (const auto& img : mini().images()) CHECK(stub.requests(img.image_id) == 1);

  const auto traces = read_traces(path);
  CHECK(traces.size() == 20);
  for (const auto& [id, think] : traces) CHECK(think == "T");
  CHECK(assemble_sft(mini(), traces).records.size() == 20);

  auto r3 = fetch_traces(mini(), stub.endpoint(), path);
  CHECK(r3.already_present == 20);
  CHECK(stub.total_requests() == 20);
  CHECK_FALSE(std::filesystem::exists(dir / "traces.jsonl.failed"));
}

TEST_CASE("fetch retries rate limits with backoff") {
  StubServer stub;
  stub.script("fx_003", {429, 429, 200});
  TempDir dir;
  const auto r = fetch_traces(mini(), stub.endpoint(), dir / "t.jsonl");
  CHECK(r.fetched == 20);
  CHECK(r.attempts.at("fx_003") == 3);
  CHECK(r.attempts.at("fx_004") == 1);
  CHECK(stub.requests("fx_003") == 3);
}

TEST_CASE("fetch records exhausted ids in the failed sidecar") {
  StubServer stub;
  stub.script("fx_010", {500, 500, 500});
  stub.script("fx_011", {503, 200});
  auto e = stub.endpoint();
  e.max_attempts = 3;
  TempDir dir;
  const auto r = fetch_traces(mini(), e, dir / "t.jsonl");
  CHECK(r.fetched == 19);
  CHECK(r.failed == std::vector<std::string>{"fx_010"});
  std::ifstream f(dir / "t.jsonl.failed");
  std::string line;
  REQUIRE(std::getline(f, line));
  CHECK(line == "fx_010");
  CHECK(read_traces(dir / "t.jsonl").size() == 19);

  // Second run picks up only the failed id and clears the sidecar.
  const auto again = fetch_traces(mini(), e, dir / "t.jsonl");
  CHECK(again.fetched == 1);
  CHECK(stub.requests("fx_010") == 4);
  CHECK_FALSE(std::filesystem::exists(dir / "t.jsonl.failed"));
}

TEST_CASE("fetch reports transport errors as failures") {
  auto e = StubServer().endpoint();  // server already stopped
  e.max_attempts = 2;
  TempDir dir;
  FetchOptions o;
  o.limit = 2;
  const auto r = fetch_traces(mini(), e, dir / "t.jsonl", o);
  CHECK(r.failed.size() == 2);
  bool saw_transport = false;
  for (const auto& l : r.log) saw_transport = saw_transport || l.find("transport error") != std::string::npos;
  CHECK(saw_transport);
}

#pragma once

// Local HTTP stand-in for a remote scorer. Paths select the behaviour:
//   /ok     one score per option, the last option highest
//   /short  a single score regardless of the option count
//   /bad    a body that is not JSON
//   /noscores  valid JSON without a scores array
//   /fail   HTTP 500 every time
//   /flaky  HTTP 500 on the first request, then like /ok

#include <atomic>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

namespace stub {

class ScorerServer {
 public:
  ScorerServer() {
    auto ok = [this](const httplib::Request& req, httplib::Response& res) {
      remember(req);
      const auto j = nlohmann::json::parse(req.body);
      nlohmann::json out;
      out["scores"] = nlohmann::json::array();
      const std::size_t n = j["options"].size();
      for (std::size_t i = 0; i < n; ++i) out["scores"].push_back(static_cast<double>(i + 1) / static_cast<double>(n));
      out["rationale"] = "stub";
      res.set_content(out.dump(), "application/json");
    };
    server_.Post("/ok", ok);
    server_.Post("/short", [this](const httplib::Request& req, httplib::Response& res) {
      remember(req);
      res.set_content(R"({"scores":[0.5]})", "application/json");
    });
    server_.Post("/bad", [this](const httplib::Request& req, httplib::Response& res) {
      remember(req);
      res.set_content("<html>nope</html>", "text/html");
    });
    server_.Post("/noscores", [this](const httplib::Request& req, httplib::Response& res) {
      remember(req);
      res.set_content(R"({"rationale":"forgot"})", "application/json");
    });
    server_.Post("/fail", [this](const httplib::Request& req, httplib::Response& res) {
      remember(req);
      res.status = 500;
    });
    server_.Post("/flaky", [this, ok](const httplib::Request& req, httplib::Response& res) {
      if (flaky_.fetch_add(1) == 0) {
        remember(req);
        res.status = 500;
        return;
      }
      ok(req, res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~ScorerServer() {
    server_.stop();
    thread_.join();
  }

  ScorerServer(const ScorerServer&) = delete;
  ScorerServer& operator=(const ScorerServer&) = delete;

  [[nodiscard]] std::string url(const std::string& path) const {
    return "http://127.0.0.1:" + std::to_string(port_) + path;
  }
  [[nodiscard]] int port() const { return port_; }

  [[nodiscard]] std::vector<std::string> bodies() {
    std::lock_guard lock(mu_);
    return bodies_;
  }
  [[nodiscard]] std::size_t hits() {
    std::lock_guard lock(mu_);
    return bodies_.size();
  }

 private:
  void remember(const httplib::Request& req) {
    std::lock_guard lock(mu_);
    bodies_.push_back(req.body);
  }

  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> flaky_{0};
  std::mutex mu_;
  std::vector<std::string> bodies_;
};

/// A loopback port with nothing listening on it.
inline int dead_port() {
  httplib::Server s;
  return s.bind_to_any_port("127.0.0.1");  // released when s goes out of scope
}

}  // namespace stub

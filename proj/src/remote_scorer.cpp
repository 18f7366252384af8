#include "navgaze/remote_scorer.hpp"

#include <cmath>
#include <regex>

#include <httplib.h>

#include "navgaze/errors.hpp"

namespace navgaze {

nlohmann::ordered_json build_request(const std::string& task, const std::string& stage,
                                     const std::vector<RemoteOption>& options) {
  const char* key = stage == "score_candidates" ? "marker" : "index";
  nlohmann::ordered_json j;
  j["task"] = task;
  j["stage"] = stage;
  auto& arr = j["options"] = nlohmann::ordered_json::array();
  for (const auto& o : options) {
    nlohmann::ordered_json e;
    e[key] = o.id;
    e["image"] = o.image_b64;
    arr.push_back(std::move(e));
  }
  return j;
}

ScorerDecision parse_response(const std::string& body, std::size_t option_count) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::Malformed, std::string("response is not JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("scores") || !j["scores"].is_array()) {
    throw Error(ErrorCode::Malformed, "response has no 'scores' array");
  }
  std::vector<double> scores;
  for (const auto& s : j["scores"]) {
    if (!s.is_number()) throw Error(ErrorCode::Malformed, "non-numeric entry in 'scores'");
    const double v = s.get<double>();
    if (!std::isfinite(v)) throw Error(ErrorCode::Malformed, "non-finite score");
    scores.push_back(v);
  }
  if (scores.size() != option_count) {
    throw Error(ErrorCode::LengthMismatch, "got " + std::to_string(scores.size()) + " scores for " +
                                               std::to_string(option_count) + " options");
  }
  std::string rationale;
  if (j.contains("rationale") && j["rationale"].is_string()) rationale = j["rationale"].get<std::string>();
  return make_decision(std::move(scores), std::move(rationale));
}

namespace {

struct Endpoint {
  std::string base;  // scheme://host[:port]
  std::string path;
};

Endpoint split_endpoint(const std::string& url) {
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw Error(ErrorCode::InvalidConfig, "bad scorer endpoint '" + url + "'");
  return {m[1].str(), m[2].matched ? m[2].str() : "/"};
}

}  // namespace

ScorerDecision remote_score(const std::string& endpoint, const nlohmann::ordered_json& request,
                            const RemoteOptions& opts) {
  const Endpoint ep = split_endpoint(endpoint);
  httplib::Client client(ep.base);
  const auto sec = static_cast<time_t>(opts.timeout_s);
  const auto usec = static_cast<time_t>((opts.timeout_s - static_cast<double>(sec)) * 1e6);
  client.set_connection_timeout(sec, usec);
  client.set_read_timeout(sec, usec);
  client.set_write_timeout(sec, usec);
  const std::string body = request.dump();
  const std::size_t n = request.contains("options") ? request["options"].size() : 0;

  std::string last_error;
  for (int attempt = 0; attempt <= opts.retries; ++attempt) {
    auto res = client.Post(ep.path, body, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    return parse_response(res->body, n);
  }
  throw Error(ErrorCode::Transport, "scorer at " + endpoint + " failed after " + std::to_string(opts.retries + 1) +
                                        " attempts: " + last_error);
}

std::string base64_ppm(const RgbImage& img) { return httplib::detail::base64_encode(encode_ppm(img)); }

RemoteScorer::RemoteScorer(std::string endpoint, RemoteOptions opts) : endpoint_(std::move(endpoint)), opts_(opts) {
  split_endpoint(endpoint_);
}

std::vector<double> RemoteScorer::call(const TaskQuery& query, const char* stage,
                                       const std::vector<RemoteOption>& options) {
  std::lock_guard lock(mu_);
  auto d = remote_score(endpoint_, build_request(query.text, stage, options), opts_);
  rationale_ = d.rationale;
  return std::move(d.scores);
}

std::vector<double> RemoteScorer::score_images(const std::vector<Frame>& frames, const TaskQuery& query) {
  std::vector<RemoteOption> opts;
  for (const auto& f : frames) opts.push_back({f.index, base64_ppm(f.seg_color_image())});
  return call(query, "select_image", opts);
}

std::vector<double> RemoteScorer::score_segments(const Frame& frame, const std::vector<int>& segment_ids,
                                                 const TaskQuery& query) {
  const RgbImage base = frame.seg_color_image();
  std::vector<RemoteOption> opts;
  for (const int id : segment_ids) {
    RgbImage img = base;
    for (int v = 0; v < frame.height; ++v) {
      for (int u = 0; u < frame.width; ++u) {
        if (frame.seg_at(u, v) == id) continue;
        Rgb c = img.get(u, v);
        for (auto& ch : c) ch = static_cast<std::uint8_t>(ch / 4);
        img.set(u, v, c);
      }
    }
    opts.push_back({id, base64_ppm(img)});
  }
  return call(query, "select_image", opts);
}

std::vector<double> RemoteScorer::score_candidates(const Frame& frame, const std::vector<CandidateOption>& options,
                                                   const TaskQuery& query) {
  std::vector<RemoteOption> opts;
  for (const auto& o : options) {
    MarkerOverlay overlay;
    overlay.frame_index = frame.index;
    overlay.markers.push_back({o.marker, o.pixel, true});
    opts.push_back({o.marker, base64_ppm(annotate_frame(frame, overlay))});
  }
  return call(query, "score_candidates", opts);
}

}  // namespace navgaze

#pragma once

#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "navgaze/scorer.hpp"

namespace navgaze {

struct RemoteOptions {
  double timeout_s = 30.0;
  int retries = 2;  // extra attempts after the first
};

/// One option in a request: {"index"|"marker": id, "image": base64 PPM}.
struct RemoteOption {
  int id = 0;
  std::string image_b64;
};

/// {task, stage, options: [{<key>: id, image}]}; key is "marker" for the
/// score_candidates stage and "index" otherwise.
nlohmann::ordered_json build_request(const std::string& task, const std::string& stage,
                                     const std::vector<RemoteOption>& options);

/// Parses {scores: [number], rationale?: string}.
/// Throws Error(Malformed) or Error(LengthMismatch).
ScorerDecision parse_response(const std::string& body, std::size_t option_count);

/// POSTs the request as JSON to `endpoint` (http://host:port/path) and parses
/// the reply. Network failures and non-2xx replies are retried, then raise
/// Error(Transport).
ScorerDecision remote_score(const std::string& endpoint, const nlohmann::ordered_json& request,
                            const RemoteOptions& opts = {});

std::string base64_ppm(const RgbImage& img);

/// Scorer backed by an HTTP service. Calls are serialised per instance.
/// Segment selection is sent as a "select_image" request with one
/// highlighted image per segment.
class RemoteScorer final : public Scorer {
 public:
  explicit RemoteScorer(std::string endpoint, RemoteOptions opts = {});
  [[nodiscard]] std::string name() const override { return "remote"; }
  std::vector<double> score_images(const std::vector<Frame>& frames, const TaskQuery& query) override;
  std::vector<double> score_segments(const Frame& frame, const std::vector<int>& segment_ids,
                                     const TaskQuery& query) override;
  std::vector<double> score_candidates(const Frame& frame, const std::vector<CandidateOption>& options,
                                       const TaskQuery& query) override;
  [[nodiscard]] const std::string& last_rationale() const noexcept { return rationale_; }

 private:
  std::vector<double> call(const TaskQuery& query, const char* stage, const std::vector<RemoteOption>& options);

  std::string endpoint_;
  RemoteOptions opts_;
  std::string rationale_;
  std::mutex mu_;
};

}  // namespace navgaze

#include <doctest.h>

#include "navgaze/errors.hpp"
#include "navgaze/remote_scorer.hpp"
#include "navgaze/scene_gen.hpp"
#include "stub_server.hpp"

using namespace navgaze;

namespace {

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Precondition;
}

const RemoteOptions kFast{2.0, 1};

}  // namespace

TEST_CASE("request layout") {
  const auto a = build_request("find the oven", "select_image", {{3, "AAA"}, {4, "BBB"}});
  CHECK(a.dump() ==
        R"({"task":"find the oven","stage":"select_image","options":[{"index":3,"image":"AAA"},{"index":4,"image":"BBB"}]})");
  const auto b = build_request("t", "score_candidates", {{7, "C"}});
  CHECK(b["options"][0]["marker"] == 7);
  CHECK_FALSE(b["options"][0].contains("index"));
}

TEST_CASE("response parsing") {
  const auto d = parse_response(R"({"scores":[0.1,0.9],"rationale":"front"})", 2);
  CHECK(d.chosen == 1);  // option 2
  CHECK(d.rationale == "front");
  CHECK(code_of([] { parse_response(R"({"scores":[0.5]})", 2); }) == ErrorCode::LengthMismatch);
  CHECK(code_of([] { parse_response("nope", 1); }) == ErrorCode::Malformed);
  CHECK(code_of([] { parse_response(R"({"scores":["a"]})", 1); }) == ErrorCode::Malformed);
  CHECK(code_of([] { parse_response(R"([1,2])", 2); }) == ErrorCode::Malformed);
}

TEST_CASE("round trip against the stub") {
  stub::ScorerServer server;
  const auto req = build_request("open the fridge", "score_candidates", {{1, "x"}, {2, "y"}, {5, "z"}});
  const auto d = remote_score(server.url("/ok"), req, kFast);
  CHECK(d.chosen == 2);
  CHECK(d.scores.size() == 3);
  CHECK(d.rationale == "stub");
  REQUIRE(server.hits() == 1);
  CHECK(nlohmann::json::parse(server.bodies()[0]) == nlohmann::json::parse(req.dump()));
}

TEST_CASE("error cases") {
  stub::ScorerServer server;
  const auto req = build_request("t", "select_image", {{1, "x"}, {2, "y"}});
  CHECK(code_of([&] { remote_score(server.url("/short"), req, kFast); }) == ErrorCode::LengthMismatch);
  CHECK(code_of([&] { remote_score(server.url("/bad"), req, kFast); }) == ErrorCode::Malformed);
  CHECK(code_of([&] { remote_score(server.url("/noscores"), req, kFast); }) == ErrorCode::Malformed);

  const auto before = server.hits();
  CHECK(code_of([&] { remote_score(server.url("/fail"), req, RemoteOptions{2.0, 2}); }) == ErrorCode::Transport);
  CHECK(server.hits() - before == 3);

  const std::string dead = "http://127.0.0.1:" + std::to_string(stub::dead_port()) + "/";
  CHECK(code_of([&] { remote_score(dead, req, kFast); }) == ErrorCode::Transport);

  CHECK(remote_score(server.url("/flaky"), req, kFast).chosen == 1);
  CHECK(code_of([] { RemoteScorer bad("ftp://nowhere"); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("remote scorer drives the image and candidate stages") {
  stub::ScorerServer server;
  const SceneSpec s = generate_scene("open-room", 2);
  RemoteScorer scorer(server.url("/ok"), kFast);
  const auto frames = scene_image_set(s, s.capture_poses, CameraConfig{});
  const auto scores = scorer.score_images(frames, {"find it", "x"});
  CHECK(scores.size() == frames.size());
  const auto segs = scorer.score_segments(frames[0], frames[0].segment_ids(), {"find it", "x"});
  CHECK(segs.size() == frames[0].segment_ids().size());
  const auto cand = scorer.score_candidates(frames[0], {{1, Vec2(0, 0), Vec2(10, 10)}, {2, Vec2(1, 0), Vec2(20, 10)}},
                                            {"find it", "x"});
  CHECK(cand.size() == 2);
  const auto bodies = server.bodies();
  REQUIRE(bodies.size() == 3);
  const auto first = nlohmann::json::parse(bodies[0]);
  CHECK(first["stage"] == "select_image");
  CHECK(first["task"] == "find it");
  CHECK(first["options"][0]["index"] == frames[0].index);
  CHECK(first["options"][0]["image"].get<std::string>().rfind("UDYK", 0) == 0);  // base64 of "P6\n"
  const auto last = nlohmann::json::parse(bodies[2]);
  CHECK(last["stage"] == "score_candidates");
  CHECK(last["options"][1]["marker"] == 2);
  CHECK(scorer.last_rationale() == "stub");
}

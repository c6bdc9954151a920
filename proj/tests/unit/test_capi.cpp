// Copyright 2026 The Clarify Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <clarify/clarify.h>
#include <httplib.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>

using nlohmann::json;

namespace {

const std::string kRoot = CLARIFY_SOURCE_DIR;

std::string path(const std::string& rel) { return kRoot + "/" + rel; }

// Takes ownership of a library-allocated string.
json take(char* s) {
  REQUIRE(s != nullptr);
  auto j = json::parse(s);
  clarify_string_free(s);
  return j;
}

struct EngineDeleter {
  void operator()(clarify_engine* e) const { clarify_engine_free(e); }
};
using EnginePtr = std::unique_ptr<clarify_engine, EngineDeleter>;

EnginePtr open_fixture() {
  clarify_engine* e = nullptr;
  REQUIRE(clarify_engine_open(path("configs/fixture.json").c_str(), nullptr, 7, &e) == CLARIFY_OK);
  return EnginePtr(e);
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(clarify_version()) == "0.1.0");
  CHECK(std::string(clarify_status_name(CLARIFY_OK)) == "ok");
  CHECK(std::string(clarify_status_name(CLARIFY_ERR_TURN_LIMIT)).size() > 0);
}

TEST_CASE("engine open errors") {
  clarify_engine* e = nullptr;
  CHECK(clarify_engine_open(nullptr, nullptr, 0, &e) == CLARIFY_ERR_INVALID_ARGUMENT);
  CHECK(clarify_engine_open(path("configs/fixture.json").c_str(), nullptr, 0, nullptr) ==
        CLARIFY_ERR_INVALID_ARGUMENT);
  CHECK(clarify_engine_open(path("configs/missing.json").c_str(), nullptr, 0, &e) == CLARIFY_ERR_IO);
  CHECK(e == nullptr);
  CHECK(std::string(clarify_last_error()).find("missing.json") != std::string::npos);
  CHECK(clarify_engine_open(path("configs/fixture.json").c_str(), "nope", 0, &e) == CLARIFY_ERR_NOT_FOUND);
  CHECK(clarify_engine_create("{not json", ".", nullptr, 0, &e) == CLARIFY_ERR_SCHEMA);
  clarify_engine_free(nullptr);
}

TEST_CASE("rank through the c api") {
  auto e = open_fixture();
  char* out = nullptr;
  REQUIRE(clarify_rank(e.get(), "discriminator", path("tests/data/situations.jsonl").c_str(), &out) ==
          CLARIFY_OK);
  const auto rows = take(out);
  REQUIRE(rows.is_array());
  CHECK(rows.size() == 4);
  for (const auto& r : rows) {
    CHECK(r["method"] == "discriminator");
    CHECK(r["question"].is_string());
  }
  CHECK(clarify_rank(e.get(), "oracle", path("tests/data/situations.jsonl").c_str(), &out) ==
        CLARIFY_ERR_INVALID_ARGUMENT);
  CHECK(clarify_rank(e.get(), "finetuned", path("tests/data/none.jsonl").c_str(), &out) ==
        CLARIFY_ERR_IO);
}

TEST_CASE("evaluate and corpus stats") {
  auto e = open_fixture();
  char* out = nullptr;
  REQUIRE(clarify_evaluate(e.get(), path("tests/data/eval.jsonl").c_str(), &out) == CLARIFY_OK);
  const auto rep = take(out);
  CHECK(rep["n"] == 3);
  CHECK(rep.contains("provenance"));

  REQUIRE(clarify_corpus_stats(path("tests/data/gold.jsonl").c_str(), "gold", &out) == CLARIFY_OK);
  const auto stats = take(out);
  CHECK(stats.contains("errors"));
  CHECK(clarify_corpus_stats(path("tests/data/gold.jsonl").c_str(), "bronze", &out) ==
        CLARIFY_ERR_INVALID_ARGUMENT);
}

TEST_CASE("sessions through the c api") {
  auto e = open_fixture();
  char* out = nullptr;
  REQUIRE(clarify_session_create(e.get(), "lie to my friend", &out) == CLARIFY_OK);
  const std::string id = take(out)["session_id"];
  for (int i = 0; i < 3; ++i) {
    REQUIRE(clarify_session_answer(e.get(), id.c_str(), "it was small", &out) == CLARIFY_OK);
    take(out);
  }
  CHECK(clarify_session_answer(e.get(), id.c_str(), "again", &out) == CLARIFY_ERR_TURN_LIMIT);
  REQUIRE(clarify_session_get(e.get(), id.c_str(), &out) == CLARIFY_OK);
  const auto st = take(out);
  CHECK(st["turns"].size() == 3);
  CHECK(st["terminal"] == true);
  CHECK(clarify_session_get(e.get(), "unknown", &out) == CLARIFY_ERR_NOT_FOUND);
  CHECK(clarify_session_create(nullptr, "x", &out) == CLARIFY_ERR_INVALID_ARGUMENT);
}

TEST_CASE("server through the c api") {
  auto e = open_fixture();
  clarify_server* srv = nullptr;
  int port = 0;
  REQUIRE(clarify_server_start(e.get(), "127.0.0.1", 0, &srv, &port) == CLARIFY_OK);
  REQUIRE(port > 0);
  httplib::Client cli("127.0.0.1", port);
  auto res = cli.Post("/sessions", R"({"situation":"lie to my friend"})", "application/json");
  REQUIRE(res);
  CHECK(res->status == 201);
  const std::string id = json::parse(res->body)["session_id"];
  res = cli.Get("/sessions/" + id);
  REQUIRE(res);
  CHECK(res->status == 200);
  clarify_server_stop(srv);
  CHECK(clarify_server_wait(srv) == CLARIFY_OK);
  clarify_server_free(srv);
}

TEST_CASE("training through the c api") {
  std::ifstream in(path("configs/toy.json"));
  auto cfg = json::parse(in);
  cfg["ppo"]["total_steps"] = 64;
  clarify_engine* raw = nullptr;
  REQUIRE(clarify_engine_create(cfg.dump().c_str(), path("configs").c_str(), nullptr, 3, &raw) ==
          CLARIFY_OK);
  EnginePtr e(raw);
  const auto dir = std::filesystem::temp_directory_path() / "clarify_capi_train";
  std::filesystem::remove_all(dir);
  char* out = nullptr;
  REQUIRE(clarify_train(e.get(), path("tests/data/toy_situations.jsonl").c_str(), nullptr,
                        dir.string().c_str(), &out) == CLARIFY_OK);
  const auto summary = take(out);
  CHECK(summary["steps"] == 64);
  CHECK(std::filesystem::exists(dir / "train_log.jsonl"));
  std::filesystem::remove_all(dir);

  // The fixture profile has no trainable policy.
  auto f = open_fixture();
  CHECK(clarify_train(f.get(), path("tests/data/toy_situations.jsonl").c_str(), nullptr,
                      dir.string().c_str(), &out) != CLARIFY_OK);
}

TEST_CASE("metric entry points") {
  const double p[3] = {0.8, 0.1, 0.1}, q[3] = {0.1, 0.1, 0.8};
  double v = -1;
  REQUIRE(clarify_jsd(p, p, &v) == CLARIFY_OK);
  CHECK(v == 0.0);
  REQUIRE(clarify_jsd(p, q, &v) == CLARIFY_OK);
  CHECK(v > 0.0);
  CHECK(v <= 1.0);
  const double neg[3] = {-1, 1, 1};
  CHECK(clarify_jsd(neg, q, &v) != CLARIFY_OK);
  const double nan3[3] = {NAN, 1, 1};
  CHECK(clarify_jsd(nan3, q, &v) != CLARIFY_OK);
  const double unnormalized[3] = {1, 1, 1};
  CHECK(clarify_jsd(unnormalized, q, &v) == CLARIFY_ERR_INVALID_ARGUMENT);

  int c = -1;
  const double tie[3] = {0.4, 0.2, 0.4};
  REQUIRE(clarify_argmax_judgment(tie, &c) == CLARIFY_OK);
  CHECK(c == 0);
  REQUIRE(clarify_argmax_judgment(q, &c) == CLARIFY_OK);
  CHECK(c == 2);

  const char* refs[] = {"the cat is on the mat"};
  REQUIRE(clarify_bleu4("the cat is on the mat", refs, 1, 0, &v) == CLARIFY_OK);
  CHECK(v == 1.0);
  REQUIRE(clarify_bleu4("the cat sat on the mat", refs, 1, 1, &v) == CLARIFY_OK);
  CHECK(std::abs(v - 0.48549177170732344) < 1e-9);
  CHECK(clarify_bleu4("x", nullptr, 1, 0, &v) == CLARIFY_ERR_INVALID_ARGUMENT);
  REQUIRE(clarify_rouge_l("a b c d", "a c d", &v) == CLARIFY_OK);
  CHECK(std::abs(v - 6.0 / 7.0) < 1e-9);
  CHECK(clarify_rouge_l(nullptr, "a", &v) == CLARIFY_ERR_INVALID_ARGUMENT);
}

// tests/unit/service_test.cc

// Copyright 2024-2026  The scriptorium authors

// See LICENSE at the top of the source tree.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include <gtest/gtest.h>
#include <httplib.h>

#include "scriptorium/binary_io.hpp"
#include "scriptorium/error.hpp"
#include "scriptorium/imaging.hpp"
#include "scriptorium/lemma_align.hpp"
#include "scriptorium/service.hpp"
#include "test_support.h"

namespace scriptorium::workbench {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

// Project with two lines and the account-book glossary, served on a free
// port for the duration of a test.
class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    {
      auto project = Project::open(dir_.path());
      for (int i = 1; i <= 2; ++i) {
        LineRecord r;
        r.id = "p1_l000" + std::to_string(i);
        r.page_id = "p1";
        r.bbox = {0, 10 * i, 40, 8};
        r.image_path = project.line_image_path(r.id);
        imaging::write_png(r.image_path, imaging::GrayImage(40, 8, static_cast<uint8_t>(200 + i)));
        if (i == 1) {
          r.pred_text = "domna";
          r.status = LineStatus::kPredicted;
        }
        project.save_line(r);
      }
    }
    fs::copy_file(testing::data_dir() / "montferrand/glossary.xml", dir_ / "lexicon/glossary.xml");
    fs::copy_file(testing::data_dir() / "montferrand/lexicon.tsv", dir_ / "lexicon/lexicon.tsv");
    start();
  }

  void TearDown() override { shutdown(); }

  void start() {
    store_ = std::make_unique<ProjectStore>(dir_.path());
    log_ = std::make_unique<JobLog>(dir_ / "jobs.log");
    queue_ = std::make_unique<JobQueue>(*store_, *log_);
    ServiceOptions opts;
    opts.port = 0;
    service_ = std::make_unique<Service>(*store_, *log_, *queue_, opts);
    port_ = service_->bind();
    thread_ = std::thread([this] { service_->listen(); });
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    client_->set_read_timeout(30);
    for (int i = 0; i < 200 && !service_->running(); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }

  void shutdown() {
    if (!service_) return;
    service_->stop();
    thread_.join();
    client_.reset();
    service_.reset();
    queue_.reset();
    log_.reset();
    store_.reset();
  }

  json get_json(const std::string& path, int expect = 200) {
    auto r = client_->Get(path);
    EXPECT_TRUE(r) << path;
    if (!r) return nullptr;
    EXPECT_EQ(r->status, expect) << path << " " << r->body;
    return json::parse(r->body);
  }

  httplib::Result post(const std::string& path, const json& body, const std::string& key = "") {
    httplib::Headers h;
    if (!key.empty()) h.emplace("Idempotency-Key", key);
    return client_->Post(path, h, body.dump(), "application/json");
  }

  TempDir dir_{"svc"};
  std::unique_ptr<ProjectStore> store_;
  std::unique_ptr<JobLog> log_;
  std::unique_ptr<JobQueue> queue_;
  std::unique_ptr<Service> service_;
  std::unique_ptr<httplib::Client> client_;
  std::thread thread_;
  int port_ = 0;
};

TEST_F(ServiceTest, ListsAndFiltersLines) {
  const auto all = get_json("/api/lines");
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[0]["id"], "p1_l0001");
  EXPECT_EQ(all[0]["pred_text"], "domna");
  EXPECT_TRUE(all[1]["gt_text"].is_null());
  EXPECT_EQ(get_json("/api/lines?status=predicted").size(), 1u);
  EXPECT_EQ(get_json("/api/lines?status=validated").size(), 0u);
  get_json("/api/lines?status=bogus", 400);
  EXPECT_EQ(get_json("/api/lines/p1_l0002")["status"], "unseen");
  EXPECT_TRUE(get_json("/api/lines/nope", 404).contains("error"));
}

TEST_F(ServiceTest, ServesLineImages) {
  auto r = client_->Get("/api/lines/p1_l0001/image");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(r->get_header_value("Content-Type"), "image/png");
  EXPECT_EQ(r->body, read_file(dir_ / "lines/p1_l0001.png"));
  EXPECT_EQ(client_->Get("/api/lines/zz/image")->status, 404);
}

TEST_F(ServiceTest, TranscriptionIsSavedOnceAndReplayed) {
  auto r = post("/api/lines/p1_l0001/transcription", {{"text", "dompna"}}, "k1");
  ASSERT_TRUE(r);
  ASSERT_EQ(r->status, 200) << r->body;
  const auto body = json::parse(r->body);
  EXPECT_EQ(body["gt_text"], "dompna");
  EXPECT_EQ(body["status"], "corrected");
  // Same key with a different body replays the first reply.
  auto again = post("/api/lines/p1_l0001/transcription", {{"text", "other"}}, "k1");
  EXPECT_EQ(again->body, r->body);
  EXPECT_EQ(*Project::open(dir_.path()).find_line("p1_l0001")->gt_text, "dompna");
  EXPECT_EQ(read_file(dir_ / "lines/p1_l0001.gt.txt").substr(0, 6), "dompna");

  EXPECT_EQ(post("/api/lines/nope/transcription", {{"text", "x"}})->status, 404);
  EXPECT_EQ(post("/api/lines/p1_l0001/transcription", {{"txt", "x"}})->status, 400);
  EXPECT_EQ(client_->Post("/api/lines/p1_l0001/transcription", "{not json", "application/json")->status, 400);
  EXPECT_EQ(post("/api/lines/p1_l0001/transcription", {{"text", "a\nb"}})->status, 400);
}

TEST_F(ServiceTest, AlignmentQueueAndCandidates) {
  const auto pending = get_json("/api/alignments?status=pending");
  EXPECT_EQ(pending.size(), 10u);
  EXPECT_EQ(get_json("/api/alignments?status=resolved").size(), 0u);
  get_json("/api/alignments?status=maybe", 400);
  const auto aver = get_json("/api/alignments/gloss_a116");
  EXPECT_EQ(aver["headword"], "aver");
  ASSERT_FALSE(aver["candidates"].empty());
  EXPECT_EQ(aver["candidates"][0]["lemma"], "avẹr");
  EXPECT_EQ(aver["candidates"][0]["score"], 1.0);
  get_json("/api/alignments/gloss_x1", 404);
}

TEST_F(ServiceTest, DecisionsAreValidatedLoggedAndIdempotent) {
  auto r = post("/api/alignments/gloss_a116/decision", {{"accept", "avẹr"}, {"request_id", "r1"}});
  ASSERT_EQ(r->status, 200) << r->body;
  const auto d = json::parse(r->body);
  EXPECT_EQ(d["lemma"], "avẹr");
  EXPECT_FALSE(d["candidates"].empty());
  auto replay = post("/api/alignments/gloss_a116/decision", {{"accept", "avars"}, {"request_id", "r1"}});
  EXPECT_EQ(replay->body, r->body);
  EXPECT_EQ(lemma_align::DecisionLog(dir_ / "decisions.log").decisions().size(), 1u);

  const auto item = get_json("/api/alignments/gloss_a116");
  EXPECT_EQ(item["status"], "resolved");
  EXPECT_EQ(item["lemma"], "avẹr");
  EXPECT_EQ(get_json("/api/alignments?status=pending").size(), 9u);

  EXPECT_EQ(post("/api/alignments/gloss_x1/decision", {{"accept", "avẹr"}})->status, 404);
  EXPECT_EQ(post("/api/alignments/gloss_a116/decision", {{"accept", "zzz"}})->status, 400);
  EXPECT_EQ(post("/api/alignments/gloss_a116/decision", {{"maybe", "x"}})->status, 400);
  EXPECT_EQ(post("/api/alignments/gloss_d57/decision", {{"new", "nou"}})->status, 400);
  EXPECT_EQ(lemma_align::DecisionLog(dir_ / "decisions.log").decisions().size(), 1u);

  auto created = post("/api/alignments/gloss_d57/decision",
                      {{"new", "da+lo3"}, {"pos", "préposition"}, {"documentation", "contraction"}}, "r2");
  ASSERT_EQ(created->status, 200) << created->body;
  const auto lex = lemma_align::LemmaLexicon::load(dir_ / "lexicon/lexicon.tsv");
  ASSERT_NE(lex.find("da+lo3"), nullptr);
  EXPECT_EQ(lex.find("da+lo3")->provenance, lemma_align::Provenance::kProjectCreated);

  auto reject = post("/api/alignments/gloss_a116/decision", {{"reject", true}});
  ASSERT_EQ(reject->status, 200);
  EXPECT_FALSE(get_json("/api/alignments/gloss_a116").contains("lemma"));
}

TEST_F(ServiceTest, DecisionLogSurvivesRestartAndKeepsRequestIds) {
  ASSERT_EQ(post("/api/alignments/gloss_q11/decision", {{"accept", "que"}}, "r7")->status, 200);
  shutdown();
  start();
  EXPECT_EQ(get_json("/api/alignments/gloss_q11")["lemma"], "que");
  // The in-memory cache is gone; the log still recognizes the request.
  ASSERT_EQ(post("/api/alignments/gloss_q11/decision", {{"accept", "que"}}, "r7")->status, 200);
  EXPECT_EQ(lemma_align::DecisionLog(dir_ / "decisions.log").decisions().size(), 1u);
}

TEST_F(ServiceTest, ConcurrentDecisionsAreAllRecorded) {
  const std::vector<std::string> glosses{"gloss_a47", "gloss_d40", "gloss_d49", "gloss_e9",
                                         "gloss_g16", "gloss_m73", "gloss_p30", "gloss_q11"};
  const std::vector<std::string> lemmas{"anar", "desus", "dire", "ẹn", "gẹn", "mostrar", "pẹr", "que"};
  std::vector<std::thread> threads;
  std::vector<int> status(glosses.size(), 0);
  for (std::size_t i = 0; i < glosses.size(); ++i) {
    threads.emplace_back([&, i] {
      httplib::Client c("127.0.0.1", port_);
      auto r = c.Post("/api/alignments/" + glosses[i] + "/decision", json{{"accept", lemmas[i]}}.dump(),
                      "application/json");
      status[i] = r ? r->status : -1;
    });
  }
  for (auto& t : threads) t.join();
  for (int s : status) EXPECT_EQ(s, 200);
  const auto log = lemma_align::DecisionLog(dir_ / "decisions.log");
  EXPECT_EQ(log.decisions().size(), glosses.size());
  EXPECT_EQ(log.active().size(), glosses.size());
}

TEST_F(ServiceTest, JobsAreQueuedAndReported) {
  auto r = post("/api/jobs", {{"kind", "eval"}, {"params", {{"lines", json::array()}}}}, "j1");
  ASSERT_EQ(r->status, 202) << r->body;
  const auto job = json::parse(r->body);
  EXPECT_EQ(job["state"], "queued");
  EXPECT_EQ(post("/api/jobs", {{"kind", "eval"}}, "j1")->body, r->body);
  queue_->wait_idle();
  const auto done = get_json("/api/jobs/" + job["id"].get<std::string>());
  EXPECT_EQ(done["state"], "failed");
  EXPECT_EQ(done["message"], "empty dev set");
  EXPECT_EQ(get_json("/api/jobs").size(), 1u);
  get_json("/api/jobs/job_999999", 404);
  EXPECT_EQ(post("/api/jobs", {{"kind", "compile"}})->status, 400);
  EXPECT_EQ(post("/api/jobs", {{"params", json::object()}})->status, 400);
}

TEST_F(ServiceTest, ListsModels) {
  EXPECT_EQ(get_json("/api/models").size(), 0u);
  write_file(dir_ / "models/htr.model", "x");
  write_file(dir_ / "models/htr.history.json", json{{"best_iteration", 300}, {"dev_cer", 0.25}}.dump());
  write_file(dir_ / "models/embeddings.bin", "y");
  write_file(dir_ / "models/notes.txt", "z");
  const auto models = get_json("/api/models");
  ASSERT_EQ(models.size(), 2u);
  EXPECT_EQ(models[0]["kind"], "embeddings");
  EXPECT_EQ(models[1]["kind"], "htr");
  EXPECT_EQ(models[1]["best_iteration"], 300);
  EXPECT_EQ(models[1]["dev_cer"], 0.25);
}

TEST_F(ServiceTest, UnknownRouteIsJson404) {
  auto r = client_->Get("/api/nothing");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 404);
  EXPECT_TRUE(json::parse(r->body).contains("error"));
}

TEST_F(ServiceTest, BusyPortIsReported) {
  ServiceOptions opts;
  opts.port = port_;
  Service second(*store_, *log_, *queue_, opts);
  EXPECT_THROW(second.bind(), Error);
}

}  // namespace
}  // namespace scriptorium::workbench

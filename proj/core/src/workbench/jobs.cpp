// core/src/workbench/jobs.cpp

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

#include <algorithm>
#include <array>
#include <chrono>
#include <ctime>
#include <map>

#include "scriptorium/error.hpp"
#include "scriptorium/workbench.hpp"
#include "scriptorium/workbench_tasks.hpp"

namespace scriptorium::workbench {
namespace fs = std::filesystem;

namespace {

constexpr std::array<std::pair<JobKind, const char*>, 8> kKindNames{{
    {JobKind::kPreprocess, "preprocess"},
    {JobKind::kAugment, "augment"},
    {JobKind::kTrainHtr, "train_htr"},
    {JobKind::kRecognize, "recognize"},
    {JobKind::kEval, "eval"},
    {JobKind::kEmbed, "embed"},
    {JobKind::kLemmatizeTrain, "lemmatize_train"},
    {JobKind::kLemmatizeApply, "lemmatize_apply"},
}};

json params_without_force(json p) {
  if (p.is_object()) p.erase("force");
  return p;
}

}  // namespace

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string to_string(JobKind kind) {
  for (const auto& [k, n] : kKindNames) {
    if (k == kind) return n;
  }
  return "?";
}

JobKind parse_job_kind(const std::string& s) {
  for (const auto& [k, n] : kKindNames) {
    if (s == n) return k;
  }
  throw ValidationError("unknown job kind '" + s + "'");
}

std::string to_string(JobState state) {
  switch (state) {
    case JobState::kQueued: return "queued";
    case JobState::kRunning: return "running";
    case JobState::kDone: return "done";
    case JobState::kFailed: return "failed";
  }
  return "?";
}

JobState parse_job_state(const std::string& s) {
  if (s == "queued") return JobState::kQueued;
  if (s == "running") return JobState::kRunning;
  if (s == "done") return JobState::kDone;
  if (s == "failed") return JobState::kFailed;
  throw ValidationError("unknown job state '" + s + "'");
}

json Job::to_json() const {
  return {{"id", id},           {"kind", to_string(kind)},    {"params", params},
          {"state", to_string(state)}, {"message", message}, {"artifacts", artifacts},
          {"reused_from", reused_from}, {"created", created}, {"finished", finished}};
}

Job Job::from_json(const json& j) {
  Job job;
  job.id = j.at("id").get<std::string>();
  job.kind = parse_job_kind(j.at("kind").get<std::string>());
  job.params = j.value("params", json::object());
  job.state = parse_job_state(j.at("state").get<std::string>());
  job.message = j.value("message", "");
  job.artifacts = j.value("artifacts", std::vector<std::string>{});
  job.reused_from = j.value("reused_from", "");
  job.created = j.value("created", "");
  job.finished = j.value("finished", "");
  return job;
}

void advance(Job& job, JobState to) {
  const bool ok = (job.state == JobState::kQueued && to == JobState::kRunning) ||
                  (job.state == JobState::kRunning &&
                   (to == JobState::kDone || to == JobState::kFailed));
  if (!ok) {
    throw ValidationError("job " + job.id + ": illegal transition " + to_string(job.state) +
                          " -> " + to_string(to));
  }
  job.state = to;
}

std::vector<Job> read_jobs(const fs::path& jobs_log) {
  std::map<std::string, Job> latest;
  for (const auto& line : read_json_lines(jobs_log)) {
    auto job = Job::from_json(json::parse(line));
    latest[job.id] = std::move(job);
  }
  std::vector<Job> out;
  for (auto& [id, job] : latest) out.push_back(std::move(job));
  return out;
}

JobLog::JobLog(fs::path path) : path_(std::move(path)) {
  for (const auto& j : read_jobs(path_)) {
    const auto pos = j.id.find_last_of('_');
    if (pos != std::string::npos) {
      next_id_ = std::max<uint64_t>(next_id_, std::stoull(j.id.substr(pos + 1)) + 1);
    }
  }
}

Job JobLog::create(JobKind kind, json params) {
  std::lock_guard lock(mutex_);
  Job job;
  job.id = "job_" + format_id(next_id_++, 6);
  job.kind = kind;
  job.params = params.is_null() ? json::object() : std::move(params);
  job.created = utc_timestamp();
  append_json_line(path_, job.to_json().dump());
  return job;
}

void JobLog::record(const Job& job) {
  std::lock_guard lock(mutex_);
  append_json_line(path_, job.to_json().dump());
}

std::vector<Job> JobLog::jobs() const {
  std::lock_guard lock(mutex_);
  return read_jobs(path_);
}

std::optional<Job> JobLog::find(const std::string& id) const {
  for (auto& j : jobs()) {
    if (j.id == id) return j;
  }
  return std::nullopt;
}

std::optional<Job> JobLog::find_reusable(const Job& job, const fs::path& root) const {
  const json wanted = params_without_force(job.params);
  for (const auto& j : jobs()) {
    if (j.id == job.id || j.kind != job.kind || j.state != JobState::kDone) continue;
    if (!j.reused_from.empty() || params_without_force(j.params) != wanted) continue;
    const bool present = std::all_of(j.artifacts.begin(), j.artifacts.end(),
                                     [&](const std::string& a) { return fs::exists(root / a); });
    if (present) return j;
  }
  return std::nullopt;
}

Job run_job(ProjectStore& store, JobLog& log, Job job) {
  advance(job, JobState::kRunning);
  log.record(job);
  try {
    const bool force = job.params.value("force", false);
    std::optional<Job> previous;
    if (!force) previous = log.find_reusable(job, store.root());
    if (previous) {
      job.reused_from = previous->id;
      job.message = "up to date (" + previous->id + ")";
    } else {
      TaskResult result = run_task(store, job.kind, job.params);
      job.artifacts = std::move(result.artifacts);
      job.message = std::move(result.message);
    }
    advance(job, JobState::kDone);
  } catch (const std::exception& e) {
    job.message = e.what();
    job.artifacts.clear();
    advance(job, JobState::kFailed);
  }
  job.finished = utc_timestamp();
  log.record(job);
  return job;
}

Job run_job(ProjectStore& store, JobLog& log, JobKind kind, json params) {
  return run_job(store, log, log.create(kind, std::move(params)));
}

JobQueue::JobQueue(ProjectStore& store, JobLog& log)
    : store_(store), log_(log), worker_([this] { loop(); }) {}

JobQueue::~JobQueue() {
  {
    std::lock_guard lock(mutex_);
    stop_ = true;
  }
  cv_.notify_all();
  worker_.join();
}

Job JobQueue::submit(JobKind kind, json params) {
  Job job = log_.create(kind, std::move(params));
  {
    std::lock_guard lock(mutex_);
    pending_.push_back(job);
  }
  cv_.notify_all();
  return job;
}

void JobQueue::wait_idle() {
  std::unique_lock lock(mutex_);
  cv_.wait(lock, [this] { return pending_.empty() && !busy_; });
}

void JobQueue::loop() {
  while (true) {
    Job job;
    {
      std::unique_lock lock(mutex_);
      cv_.wait(lock, [this] { return stop_ || !pending_.empty(); });
      if (stop_ && pending_.empty()) return;
      job = std::move(pending_.front());
      pending_.pop_front();
      busy_ = true;
    }
    run_job(store_, log_, std::move(job));
    {
      std::lock_guard lock(mutex_);
      busy_ = false;
    }
    cv_.notify_all();
  }
}

}  // namespace scriptorium::workbench

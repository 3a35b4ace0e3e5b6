// core/include/scriptorium/workbench.hpp

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

#pragma once

#include <atomic>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "scriptorium/corpus.hpp"

// Orchestration: a locked project store, pipeline jobs with a provenance
// log, and the background worker used by the HTTP service.
namespace scriptorium::workbench {

using json = nlohmann::json;

// Many readers or one writer at a time over an open Project.
class ProjectStore {
 public:
  explicit ProjectStore(const std::filesystem::path& root) : project_(Project::open(root)) {}

  template <typename F>
  auto read(F&& f) const {
    std::shared_lock lock(mutex_);
    return f(static_cast<const Project&>(project_));
  }
  template <typename F>
  auto write(F&& f) {
    std::unique_lock lock(mutex_);
    return f(project_);
  }
  const std::filesystem::path& root() const { return project_.root(); }

 private:
  mutable std::shared_mutex mutex_;
  Project project_;
};

enum class JobKind {
  kPreprocess,
  kAugment,
  kTrainHtr,
  kRecognize,
  kEval,
  kEmbed,
  kLemmatizeTrain,
  kLemmatizeApply
};
enum class JobState { kQueued, kRunning, kDone, kFailed };

std::string to_string(JobKind kind);
std::string to_string(JobState state);
JobKind parse_job_kind(const std::string& s);
JobState parse_job_state(const std::string& s);

struct Job {
  std::string id;
  JobKind kind = JobKind::kPreprocess;
  json params = json::object();
  JobState state = JobState::kQueued;
  std::string message;
  std::vector<std::string> artifacts;  // paths relative to the project root
  std::string reused_from;             // set when skipped as up to date
  std::string created;
  std::string finished;

  json to_json() const;
  static Job from_json(const json& j);
};

// Throws ValidationError when `to` does not follow queued -> running ->
// done|failed.
void advance(Job& job, JobState to);

// Latest record of every job in jobs.log, in id order.
std::vector<Job> read_jobs(const std::filesystem::path& jobs_log);

// Serializes access to jobs.log and hands out job ids.
class JobLog {
 public:
  explicit JobLog(std::filesystem::path path);
  Job create(JobKind kind, json params);
  void record(const Job& job);
  std::vector<Job> jobs() const;
  std::optional<Job> find(const std::string& id) const;
  // A finished job with the same kind and parameters whose artifacts all
  // still exist.
  std::optional<Job> find_reusable(const Job& job, const std::filesystem::path& root) const;

 private:
  std::filesystem::path path_;
  mutable std::mutex mutex_;
  uint64_t next_id_ = 1;
};

// Runs `job` synchronously. Module errors are captured: the job ends in
// kFailed with the message. A job identical to an earlier finished one is
// skipped unless params["force"] is true.
Job run_job(ProjectStore& store, JobLog& log, Job job);

// Convenience: create + run.
Job run_job(ProjectStore& store, JobLog& log, JobKind kind, json params);

// Single background worker draining a FIFO of queued jobs.
class JobQueue {
 public:
  JobQueue(ProjectStore& store, JobLog& log);
  ~JobQueue();
  JobQueue(const JobQueue&) = delete;
  JobQueue& operator=(const JobQueue&) = delete;

  Job submit(JobKind kind, json params);
  // Blocks until the queue is empty and the worker idle.
  void wait_idle();

 private:
  void loop();

  ProjectStore& store_;
  JobLog& log_;
  std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<Job> pending_;
  bool busy_ = false;
  bool stop_ = false;
  std::thread worker_;
};

std::string utc_timestamp();

}  // namespace scriptorium::workbench

// core/include/scriptorium/service.hpp

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

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>

#include "scriptorium/workbench.hpp"

namespace httplib {
class Server;
}

// JSON API over an open project for the review interface.
namespace scriptorium::workbench {

struct ServiceOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::string reviewer = "reviewer";
};

// Project-relative locations of the alignment inputs; overridable in
// project.cfg through the keys `glossary` and `lexicon`.
std::filesystem::path glossary_path(const Project& project);
std::filesystem::path lexicon_path(const Project& project);

class Service {
 public:
  Service(ProjectStore& store, JobLog& log, JobQueue& queue, ServiceOptions options = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds the listening socket; throws Error when the port is taken.
  // Returns the bound port.
  int bind();
  // Serves until stop(); requires a successful bind().
  void listen();
  void stop();
  bool running() const;

 private:
  struct Reply {
    int status = 200;
    std::string body;
  };
  void routes();
  // Replays the stored reply for a request id seen before.
  std::optional<Reply> replayed(const std::string& key);
  void remember(const std::string& key, const Reply& reply);

  ProjectStore& store_;
  JobLog& log_;
  JobQueue& queue_;
  ServiceOptions options_;
  std::unique_ptr<httplib::Server> server_;
  std::mutex requests_mutex_;
  std::map<std::string, Reply> requests_;
};

}  // namespace scriptorium::workbench

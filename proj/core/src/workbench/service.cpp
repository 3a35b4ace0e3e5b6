// core/src/workbench/service.cpp

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

#include "scriptorium/service.hpp"

#include <algorithm>

#include <httplib.h>

#include "scriptorium/binary_io.hpp"
#include "scriptorium/error.hpp"
#include "scriptorium/lemma_align.hpp"
#include "scriptorium/tei.hpp"
#include "scriptorium/unicode.hpp"

namespace scriptorium::workbench {
namespace fs = std::filesystem;
namespace la = lemma_align;

namespace {

constexpr const char* kJson = "application/json; charset=utf-8";

json line_to_json(const LineRecord& r) {
  auto opt = [](const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); };
  return {{"id", r.id},
          {"page_id", r.page_id},
          {"status", to_string(r.status)},
          {"origin", to_string(r.origin)},
          {"gt_text", opt(r.gt_text)},
          {"pred_text", opt(r.pred_text)},
          {"parent_id", opt(r.parent_id)},
          {"bbox", {{"x", r.bbox.x}, {"y", r.bbox.y}, {"width", r.bbox.width}, {"height", r.bbox.height}}},
          {"image", "/api/lines/" + r.id + "/image"}};
}

json error_body(const std::string& message) { return {{"error", message}}; }

void send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

// Alignment inputs read under the store lock.
struct AlignmentState {
  std::vector<la::GlossEntry> entries;
  la::LemmaLexicon lexicon;
  la::DecisionLog log;
};

AlignmentState load_alignment(const Project& project) {
  AlignmentState s;
  const auto glossary = glossary_path(project);
  if (fs::exists(glossary)) s.entries = la::parse_glossary(tei::parse_tei(read_file(glossary)));
  const auto lexicon = lexicon_path(project);
  if (fs::exists(lexicon)) s.lexicon = la::LemmaLexicon::load(lexicon);
  s.log = la::DecisionLog(project.decisions_log());
  return s;
}

json alignment_to_json(const la::GlossEntry& e, const AlignmentState& s) {
  json candidates = json::array();
  for (const auto& c : la::propose_candidates(e, s.lexicon)) {
    candidates.push_back({{"lemma", c.lemma}, {"score", c.score}});
  }
  json decisions = json::array();
  for (const auto& d : s.log.decisions()) {
    if (d.gloss_id == e.id) decisions.push_back(json::parse(d.to_json()));
  }
  json out = {{"id", e.id},
              {"headword", e.headword},
              {"pos", e.pos()},
              {"candidates", candidates},
              {"decisions", decisions},
              {"status", decisions.empty() ? "pending" : "resolved"}};
  const auto active = s.log.active();
  if (auto it = active.find(e.id); it != active.end()) out["lemma"] = it->second;
  return out;
}

std::string request_key(const httplib::Request& req, const json& body) {
  std::string id = req.get_header_value("Idempotency-Key");
  if (id.empty() && body.is_object() && body.contains("request_id") && body["request_id"].is_string()) {
    id = body["request_id"].get<std::string>();
  }
  return id;
}

}  // namespace

fs::path glossary_path(const Project& project) {
  return project.root() / project.config().get("glossary", "lexicon/glossary.xml");
}

fs::path lexicon_path(const Project& project) {
  return project.root() / project.config().get("lexicon", "lexicon/lexicon.tsv");
}

Service::Service(ProjectStore& store, JobLog& log, JobQueue& queue, ServiceOptions options)
    : store_(store),
      log_(log),
      queue_(queue),
      options_(std::move(options)),
      server_(std::make_unique<httplib::Server>()) {
  // SO_REUSEADDR only: with SO_REUSEPORT a second service would silently
  // share a port that is already taken.
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  });
  routes();
}

Service::~Service() { stop(); }

int Service::bind() {
  int port = options_.port;
  if (port == 0) {
    port = server_->bind_to_any_port(options_.host);
    if (port < 0) throw Error("cannot bind " + options_.host);
    return port;
  }
  if (!server_->bind_to_port(options_.host, port)) {
    throw Error("cannot bind " + options_.host + ":" + std::to_string(port) +
                " (port in use?)");
  }
  return port;
}

void Service::listen() {
  if (!server_->listen_after_bind()) throw Error("service stopped with an error");
}

void Service::stop() {
  if (server_) server_->stop();
}

bool Service::running() const { return server_->is_running(); }

std::optional<Service::Reply> Service::replayed(const std::string& key) {
  if (key.empty()) return std::nullopt;
  auto it = requests_.find(key);
  if (it == requests_.end()) return std::nullopt;
  return it->second;
}

void Service::remember(const std::string& key, const Reply& reply) {
  if (!key.empty() && reply.status < 500) requests_[key] = reply;
}

void Service::routes() {
  auto& s = *server_;

  s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const ValidationError& e) {
      send(res, 400, error_body(e.what()));
    } catch (const ParseError& e) {
      send(res, 400, error_body(e.what()));
    } catch (const json::exception& e) {
      send(res, 400, error_body(std::string("invalid JSON: ") + e.what()));
    } catch (const std::exception& e) {
      send(res, 500, error_body(e.what()));
    }
  });
  s.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) res.set_content(error_body(httplib::status_message(res.status)).dump(), kJson);
  });

  s.Get("/api/lines", [this](const httplib::Request& req, httplib::Response& res) {
    std::optional<LineStatus> status;
    if (req.has_param("status")) status = parse_line_status(req.get_param_value("status"));
    std::optional<LineOrigin> origin;
    if (req.has_param("origin")) origin = parse_line_origin(req.get_param_value("origin"));
    const json out = store_.read([&](const Project& p) {
      json arr = json::array();
      for (const auto& [id, r] : p.lines()) {
        if (status && r.status != *status) continue;
        if (origin && r.origin != *origin) continue;
        arr.push_back(line_to_json(r));
      }
      return arr;
    });
    send(res, 200, out);
  });

  s.Get(R"(/api/lines/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    const auto line = store_.read([&](const Project& p) -> std::optional<LineRecord> {
      if (const auto* r = p.find_line(id)) return *r;
      return std::nullopt;
    });
    if (!line) return send(res, 404, error_body("unknown line '" + id + "'"));
    send(res, 200, line_to_json(*line));
  });

  s.Get(R"(/api/lines/([^/]+)/image)", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    const auto png = store_.read([&](const Project& p) -> std::optional<std::string> {
      const auto* r = p.find_line(id);
      if (!r || !fs::exists(r->image_path)) return std::nullopt;
      return read_file(r->image_path);
    });
    if (!png) return send(res, 404, error_body("no image for line '" + id + "'"));
    res.set_content(*png, "image/png");
  });

  s.Post(R"(/api/lines/([^/]+)/transcription)", [this](const httplib::Request& req,
                                                       httplib::Response& res) {
    const std::string id = req.matches[1];
    const json body = json::parse(req.body);
    if (!body.is_object() || !body.contains("text") || !body["text"].is_string()) {
      return send(res, 400, error_body("expected {\"text\": string}"));
    }
    std::lock_guard lock(requests_mutex_);
    const std::string rid = request_key(req, body);
    const std::string key = rid.empty() ? "" : "transcription:" + id + ":" + rid;
    if (auto r = replayed(key)) {
      res.status = r->status;
      res.set_content(r->body, kJson);
      return;
    }
    const std::string text = clean_line_text(body["text"].get<std::string>());
    Reply reply = store_.write([&](Project& p) -> Reply {
      const auto* found = p.find_line(id);
      if (!found) return {404, error_body("unknown line '" + id + "'").dump()};
      LineRecord r = *found;
      r.gt_text = text;
      r.status = LineStatus::kCorrected;
      p.save_line(r);
      return {200, line_to_json(r).dump()};
    });
    remember(key, reply);
    res.status = reply.status;
    res.set_content(reply.body, kJson);
  });

  s.Get("/api/alignments", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string want = req.has_param("status") ? req.get_param_value("status") : "";
    if (!want.empty() && want != "pending" && want != "resolved") {
      return send(res, 400, error_body("status must be pending or resolved"));
    }
    const auto state = store_.read([](const Project& p) { return load_alignment(p); });
    json out = json::array();
    for (const auto& e : state.entries) {
      json item = alignment_to_json(e, state);
      if (!want.empty() && item["status"] != want) continue;
      out.push_back(std::move(item));
    }
    send(res, 200, out);
  });

  s.Get(R"(/api/alignments/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    const auto state = store_.read([](const Project& p) { return load_alignment(p); });
    for (const auto& e : state.entries) {
      if (e.id == id) return send(res, 200, alignment_to_json(e, state));
    }
    send(res, 404, error_body("unknown gloss '" + id + "'"));
  });

  s.Post(R"(/api/alignments/([^/]+)/decision)", [this](const httplib::Request& req,
                                                       httplib::Response& res) {
    const std::string id = req.matches[1];
    const json body = json::parse(req.body);
    if (!body.is_object()) return send(res, 400, error_body("expected a JSON object"));
    la::Decision d;
    d.gloss_id = id;
    if (body.contains("accept")) {
      d.action = la::Action::kAccept;
      d.lemma = body["accept"].get<std::string>();
    } else if (body.contains("new")) {
      d.action = la::Action::kNew;
      d.lemma = body["new"].get<std::string>();
      d.pos = body.value("pos", "");
      d.documentation = body.value("documentation", "");
    } else if (body.contains("reject")) {
      d.action = la::Action::kReject;
    } else {
      return send(res, 400, error_body("expected one of accept, new, reject"));
    }
    d.lemma = unicode::nfc(d.lemma);
    d.reviewer = body.value("reviewer", options_.reviewer);
    d.request_id = request_key(req, body);

    std::lock_guard lock(requests_mutex_);
    const std::string key = d.request_id.empty() ? "" : "decision:" + id + ":" + d.request_id;
    if (auto r = replayed(key)) {
      res.status = r->status;
      res.set_content(r->body, kJson);
      return;
    }
    Reply reply = store_.write([&](Project& p) -> Reply {
      auto state = load_alignment(p);
      if (state.log.has_request(d.request_id)) {
        for (const auto& prior : state.log.decisions()) {
          if (prior.request_id == d.request_id && prior.gloss_id == id) {
            return {200, prior.to_json()};
          }
        }
      }
      std::vector<std::string> known;
      const la::GlossEntry* entry = nullptr;
      for (const auto& e : state.entries) {
        known.push_back(e.id);
        if (e.id == id) entry = &e;
      }
      if (!entry) return {404, error_body("unknown gloss '" + id + "'").dump()};
      d.candidates = la::propose_candidates(*entry, state.lexicon);
      const std::size_t before = state.lexicon.size();
      la::record_decision(state.log, state.lexicon, known, d);
      if (state.lexicon.size() != before) state.lexicon.save(lexicon_path(p));
      return {200, state.log.decisions().back().to_json()};
    });
    remember(key, reply);
    res.status = reply.status;
    res.set_content(reply.body, kJson);
  });

  s.Get("/api/jobs", [this](const httplib::Request&, httplib::Response& res) {
    json out = json::array();
    for (const auto& j : log_.jobs()) out.push_back(j.to_json());
    send(res, 200, out);
  });

  s.Get(R"(/api/jobs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    const auto job = log_.find(req.matches[1]);
    if (!job) return send(res, 404, error_body("unknown job '" + std::string(req.matches[1]) + "'"));
    send(res, 200, job->to_json());
  });

  s.Post("/api/jobs", [this](const httplib::Request& req, httplib::Response& res) {
    const json body = json::parse(req.body);
    if (!body.is_object() || !body.contains("kind")) {
      return send(res, 400, error_body("expected {\"kind\": string, \"params\": object}"));
    }
    const JobKind kind = parse_job_kind(body["kind"].get<std::string>());
    json params = body.value("params", json::object());
    if (!params.is_object()) return send(res, 400, error_body("params must be an object"));
    std::lock_guard lock(requests_mutex_);
    const std::string rid = request_key(req, body);
    const std::string key = rid.empty() ? "" : "job:" + rid;
    if (auto r = replayed(key)) {
      res.status = r->status;
      res.set_content(r->body, kJson);
      return;
    }
    const Job job = queue_.submit(kind, std::move(params));
    Reply reply{202, job.to_json().dump()};
    remember(key, reply);
    res.status = reply.status;
    res.set_content(reply.body, kJson);
  });

  s.Get("/api/models", [this](const httplib::Request&, httplib::Response& res) {
    const fs::path dir = store_.root() / "models";
    json out = json::array();
    if (fs::exists(dir)) {
      std::vector<fs::path> files;
      for (const auto& f : fs::directory_iterator(dir)) {
        if (f.is_regular_file()) files.push_back(f.path());
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) {
        const std::string name = f.filename().string();
        std::string kind;
        if (name.ends_with(".lemmatizer.model") || name == "lemmatizer.model") {
          kind = "lemmatizer";
        } else if (name.ends_with(".model")) {
          kind = "htr";
        } else if (name.ends_with(".bin")) {
          kind = "embeddings";
        } else {
          continue;
        }
        json m = {{"name", f.stem().string()}, {"file", "models/" + name}, {"kind", kind},
                  {"bytes", fs::file_size(f)}};
        fs::path history = f;
        history.replace_extension(".history.json");
        if (kind == "htr" && fs::exists(history)) {
          const auto h = json::parse(read_file(history));
          m["best_iteration"] = h.value("best_iteration", 0);
          m["dev_cer"] = h.value("dev_cer", -1.0);
        }
        out.push_back(std::move(m));
      }
    }
    send(res, 200, out);
  });
}

}  // namespace scriptorium::workbench

#pragma once

// HTTP front end for SessionStore, versioned under /api/v1:
//
//   POST   /api/v1/sessions[?label=...]         text/csv body -> {session_id, status}
//   GET    /api/v1/sessions                     -> {sessions: [...]}
//   GET    /api/v1/sessions/{id}/scene          ?density&smooth&layers&fine_objects
//   DELETE /api/v1/sessions/{id}
//   GET    /api/v1/health
//
// Errors are JSON bodies {error, message[, report]}.

#include <filesystem>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "movi/error.hpp"
#include "movi/pipeline.hpp"
#include "movi/session_store.hpp"

namespace movi {

inline nlohmann::json issues_to_json(const std::vector<Issue>& issues) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& i : issues) {
    nlohmann::json j{{"severity", i.severity == Severity::violation ? "violation" : "warning"},
                     {"code", i.code},
                     {"entity", i.entity_id},
                     {"message", i.message}};
    if (i.sample) j["sample"] = *i.sample;
    out.push_back(std::move(j));
  }
  return out;
}

class SessionService {
 public:
  /// `viewer_dir` is mounted at / when it exists.
  explicit SessionService(SessionStore& store, std::filesystem::path viewer_dir = {})
      : store_(store) {
    routes();
    if (!viewer_dir.empty() && std::filesystem::is_directory(viewer_dir))
      server_.set_mount_point("/", viewer_dir.string());
  }

  /// Binds; port 0 picks a free port. Returns the bound port or -1.
  int bind(const std::string& host, int port) {
    if (port == 0) return server_.bind_to_any_port(host);
    return server_.bind_to_port(host, port) ? port : -1;
  }

  /// Blocks until stop().
  bool listen() { return server_.listen_after_bind(); }

  void stop() { server_.stop(); }
  void wait_until_ready() { server_.wait_until_ready(); }

 private:
  static void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static void send_error(httplib::Response& res, int status, const Error& e) {
    nlohmann::json body{{"error", to_string(e.code())}, {"message", e.what()}};
    if (auto* invalid = dynamic_cast<const InvalidRecording*>(&e)) body["report"] = issues_to_json(invalid->issues());
    send_json(res, status, body);
  }

  static void not_found(httplib::Response& res, const std::string& id) {
    send_json(res, 404, {{"error", "NotFound"}, {"message", "no session " + id}});
  }

  static SceneParams scene_params(const httplib::Request& req) {
    SceneParams p;
    if (req.has_param("density")) p.density = parse_density(req.get_param_value("density"));
    if (req.has_param("smooth")) p.smooth = parse_smooth(req.get_param_value("smooth"));
    if (req.has_param("layers")) p.layers = parse_layers(req.get_param_value("layers"));
    if (req.has_param("fine_objects")) p.fine_objects = parse_flag(req.get_param_value("fine_objects"));
    if (p.layers.empty()) throw Error(ErrorCode::bad_staging, "at least one layer is required");
    return p;
  }

  void routes() {
    server_.Post("/api/v1/sessions", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        const auto result = store_.upload(req.body, req.get_param_value("label"));
        send_json(res, result.created ? 201 : 200,
                  {{"session_id", result.session_id}, {"status", result.created ? "created" : "exists"}});
      } catch (const Error& e) {
        send_error(res, e.code() == ErrorCode::io_error ? 500 : 400, e);
      }
    });

    server_.Get("/api/v1/sessions", [this](const httplib::Request&, httplib::Response& res) {
      nlohmann::json sessions = nlohmann::json::array();
      for (const auto& s : store_.list()) {
        sessions.push_back({{"session_id", s.session_id},
                            {"label", s.label},
                            {"created_at", s.created_at},
                            {"duration", s.duration}});
      }
      send_json(res, 200, {{"sessions", sessions}});
    });

    server_.Get(R"(/api/v1/sessions/([^/]+)/scene)", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.matches[1];
      SceneParams params;
      try {
        params = scene_params(req);
      } catch (const Error& e) {
        send_error(res, 400, e);
        return;
      }
      const auto rec = store_.get(id);
      if (!rec) return not_found(res, id);
      try {
        res.status = 200;
        res.set_content(compile_scene_bytes(*rec, params), "application/json");
      } catch (const Error& e) {
        send_error(res, 400, e);
      }
    });

    server_.Delete(R"(/api/v1/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.matches[1];
      try {
        if (!store_.remove(id)) return not_found(res, id);
      } catch (const Error& e) {
        send_error(res, 500, e);
        return;
      }
      send_json(res, 200, {{"deleted", id}});
    });

    server_.Get("/api/v1/health", [this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200,
                {{"status", "ok"},
                 {"version", kVersion},
                 {"store", store_.root().string()},
                 {"session_count", store_.size()}});
    });
  }

  SessionStore& store_;
  httplib::Server server_;
};

}  // namespace movi

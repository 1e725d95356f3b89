#include "pforge/service/server.h"

#include <charconv>
#include <cstdio>

#include "httplib.h"
#include "pforge/pointcloud/ply.h"

namespace pforge::service {

using nlohmann::json;

namespace {

void send_error(httplib::Response& res, int status, const std::string& msg,
                std::optional<std::size_t> position = std::nullopt) {
  json j{{"error", msg}};
  if (position) j["position"] = *position;
  res.status = status;
  res.set_content(j.dump(), "application/json");
}

// Runs a handler, mapping SessionError and parse failures to JSON errors.
template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const SessionError& e) {
      send_error(res, e.status(), e.what(), e.position());
    } catch (const json::parse_error& e) {
      send_error(res, 400, std::string("json: ") + e.what(), e.byte);
    } catch (const std::invalid_argument& e) {
      send_error(res, 400, e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, e.what());
    }
  };
}

double query_double(const httplib::Request& req, const char* key, double fallback) {
  if (!req.has_param(key)) return fallback;
  const std::string v = req.get_param_value(key);
  double out = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw SessionError(400, std::string("query parameter '") + key + "' is not a number");
  return out;
}

std::optional<int> query_int(const httplib::Request& req, const char* key) {
  if (!req.has_param(key)) return std::nullopt;
  const std::string v = req.get_param_value(key);
  int out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw SessionError(400, std::string("query parameter '") + key + "' is not an integer");
  return out;
}

void send_summary(httplib::Response& res, const Snapshot& s, std::optional<std::size_t> changed = std::nullopt) {
  json j = summary_json(s);
  if (changed) j["changed"] = *changed;
  res.set_content(j.dump(), "application/json");
}

}  // namespace

Server::Server(SessionOptions options)
    : session_(std::make_unique<Session>(std::move(options))), http_(std::make_unique<httplib::Server>()) {
  httplib::Server& s = *http_;
  Session& session = *session_;
  s.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                         {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                         {"Access-Control-Allow-Headers", "Content-Type"},
                         {"Access-Control-Expose-Headers", "X-Mesh-Time-Ms, X-Cache"}});
  s.set_payload_max_length(256u << 20);
  s.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  s.Get("/state", guarded([&session](const httplib::Request&, httplib::Response& res) {
          send_summary(res, *session.snapshot());
        }));
  s.Post("/pointcloud", guarded([&session](const httplib::Request& req, httplib::Response& res) {
           send_summary(res, *session.upload(req.body));
         }));
  s.Get("/pointcloud", guarded([&session](const httplib::Request&, httplib::Response& res) {
          const auto snap = session.snapshot();
          if (!snap->cloud) throw SessionError(409, "no point cloud loaded");
          res.set_content(write_ply(*snap->cloud), "application/octet-stream");
        }));
  s.Post("/edit", guarded([&session](const httplib::Request& req, httplib::Response& res) {
           const json body = json::parse(req.body);
           std::optional<std::uint64_t> revision;
           const json* ops = &body;
           if (body.is_object()) {
             for (const auto& [k, v] : body.items()) {
               if (k != "revision" && k != "ops") throw SessionError(400, "edit: unknown key '" + k + "'");
             }
             if (!body.contains("ops")) throw SessionError(400, "edit: missing 'ops'");
             ops = &body.at("ops");
             if (body.contains("revision")) {
               if (!body.at("revision").is_number_unsigned()) throw SessionError(400, "edit: bad revision");
               revision = body.at("revision").get<std::uint64_t>();
             }
           }
           std::vector<EditOp> parsed;
           try {
             parsed = edit_ops_from_json(*ops);
           } catch (const std::exception& e) {
             throw SessionError(400, e.what());
           }
           auto [snap, changed] = session.edit(parsed, revision);
           send_summary(res, *snap, changed);
         }));
  s.Post("/undo", guarded([&session](const httplib::Request&, httplib::Response& res) {
           send_summary(res, *session.undo());
         }));
  s.Post("/redo", guarded([&session](const httplib::Request&, httplib::Response& res) {
           send_summary(res, *session.redo());
         }));
  s.Post("/mesh", guarded([&session](const httplib::Request& req, httplib::Response& res) {
           const MeshReply r = session.build_mesh(query_int(req, "res"));
           char ms[32];
           std::snprintf(ms, sizeof ms, "%.3f", r.entry->build_ms);
           res.set_header("X-Mesh-Time-Ms", ms);
           res.set_header("X-Cache", r.cache_hit ? "hit" : "miss");
           res.set_content(r.entry->obj, "model/obj");
         }));
  s.Get("/mesh", guarded([&session](const httplib::Request&, httplib::Response& res) {
          const auto snap = session.snapshot();
          if (!snap->mesh) throw SessionError(409, "no mesh; POST /mesh first");
          res.set_header("X-Mesh-Time-Ms", std::to_string(snap->mesh->build_ms));
          res.set_content(snap->mesh->obj, "model/obj");
        }));
  s.Get("/render", guarded([&session](const httplib::Request& req, httplib::Response& res) {
          const double az = query_double(req, "az", 0.0);
          const double el = query_double(req, "el", 0.0);
          const int size = query_int(req, "size").value_or(256);
          res.set_content(session.render_png(az, el, size), "image/png");
        }));
}

Server::~Server() { stop(); }

int Server::bind(const std::string& host, int port) {
  if (port == 0) return http_->bind_to_any_port(host);
  return http_->bind_to_port(host, port) ? port : -1;
}

bool Server::listen() { return http_->listen_after_bind(); }
void Server::stop() { http_->stop(); }
bool Server::is_running() const { return http_->is_running(); }

}  // namespace pforge::service

#include "reqdialog/server.hpp"

#include <httplib.h>

#include <string>

namespace reqdialog {

namespace {

using nlohmann::json;

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view error, const std::string& detail) {
  send_json(res, status, {{"error", error}, {"detail", detail}});
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  auto body = json::parse(req.body);
  if (!body.is_object()) throw SessionError(SessionError::Kind::Validation, "request body must be a JSON object");
  return body;
}

// Maps domain exceptions onto status codes.
template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const SessionError& e) {
      switch (e.kind()) {
        case SessionError::Kind::NotFound: send_error(res, 404, "not_found", e.what()); break;
        case SessionError::Kind::Conflict: send_error(res, 409, "conflict", e.what()); break;
        case SessionError::Kind::Validation: send_error(res, 422, "validation", e.what()); break;
      }
    } catch (const json::exception& e) {
      send_error(res, 400, "bad_request", e.what());
    } catch (const std::invalid_argument& e) {
      send_error(res, 422, "validation", e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "internal", e.what());
    }
  };
}

std::size_t parse_limit(const httplib::Request& req) {
  if (!req.has_param("limit")) return kDefaultProposalLimit;
  const auto text = req.get_param_value("limit");
  std::size_t used = 0;
  long long value = -1;
  try {
    value = std::stoll(text, &used);
  } catch (const std::exception&) {
  }
  if (used != text.size() || value < 1) {
    throw SessionError(SessionError::Kind::Validation, "limit must be a positive integer");
  }
  return static_cast<std::size_t>(value);
}

}  // namespace

void install_routes(httplib::Server& server, SessionManager& sessions) {
  server.Get("/knowledge-bases", guarded([&](const httplib::Request&, httplib::Response& res) {
               send_json(res, 200, sessions.knowledge_base_ids());
             }));

  server.Post("/sessions", guarded([&](const httplib::Request& req, httplib::Response& res) {
                const auto body = parse_body(req);
                const auto kb_id = body.at("kb_id").get<std::string>();
                send_json(res, 201, {{"session_id", sessions.create_session(kb_id)}});
              }));

  server.Get(R"(/sessions/([0-9a-z]+))", guarded([&](const httplib::Request& req, httplib::Response& res) {
               send_json(res, 200, sessions.get(req.matches[1])->state());
             }));

  server.Post(R"(/sessions/([0-9a-z]+)/utterance)",
              guarded([&](const httplib::Request& req, httplib::Response& res) {
                const auto body = parse_body(req);
                const auto text = body.at("text").get<std::string>();
                auto reactions = json::array();
                for (const auto& r : sessions.get(req.matches[1])->submit_utterance(text)) {
                  reactions.push_back(to_json(r));
                }
                send_json(res, 200, {{"reactions", reactions}});
              }));

  server.Get(R"(/sessions/([0-9a-z]+)/proposals)", guarded([&](const httplib::Request& req, httplib::Response& res) {
               const auto limit = parse_limit(req);
               auto proposals = json::array();
               for (const auto& p : sessions.get(req.matches[1])->list_proposals(limit)) {
                 proposals.push_back({{"lemma", p.lemma.str()}, {"weight", p.weight}});
               }
               send_json(res, 200, {{"proposals", proposals}});
             }));

  server.Post(R"(/sessions/([0-9a-z]+)/decision)", guarded([&](const httplib::Request& req, httplib::Response& res) {
                const auto body = parse_body(req);
                const Lemma lemma(body.at("lemma").get<std::string>());
                const auto verdict = parse_verdict(body.at("verdict").get<std::string>());
                auto decisions = json::object();
                for (const auto& [l, d] : sessions.get(req.matches[1])->record_decision(lemma, verdict)) {
                  decisions[l.str()] = std::string(to_string(d));
                }
                send_json(res, 200, {{"decisions", decisions}});
              }));

  server.Post(R"(/sessions/([0-9a-z]+)/finalize)", guarded([&](const httplib::Request& req, httplib::Response& res) {
                send_json(res, 200, to_json(sessions.get(req.matches[1])->finalize()));
              }));

  server.Get(R"(/sessions/([0-9a-z]+)/transcript)", guarded([&](const httplib::Request& req, httplib::Response& res) {
               send_json(res, 200, sessions.get(req.matches[1])->transcript());
             }));
}

bool mount_static(httplib::Server& server, const std::filesystem::path& root) {
  return server.set_mount_point("/", root.string());
}

}  // namespace reqdialog

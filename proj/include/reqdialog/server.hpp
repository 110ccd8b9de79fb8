#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>

#include "reqdialog/session.hpp"

namespace httplib {
class Server;
}

namespace reqdialog {

inline constexpr std::size_t kDefaultProposalLimit = 10;

/// Installs the session API on `server`:
///   POST /sessions                      {kb_id}          -> {session_id}
///   POST /sessions/{id}/utterance       {text}           -> {reactions}
///   GET  /sessions/{id}/proposals?limit=N                -> {proposals:[{lemma,weight}]}
///   POST /sessions/{id}/decision        {lemma, verdict} -> {decisions}
///   POST /sessions/{id}/finalize                         -> MutualModel
///   GET  /sessions/{id}/transcript                       -> event list
///   GET  /sessions/{id}                                  -> session state
///   GET  /knowledge-bases                                -> [kb_id]
/// Errors are {error, detail} with 400/404/409/422.
void install_routes(httplib::Server& server, SessionManager& sessions);

/// Serves a static single-page client from `root` at "/".
bool mount_static(httplib::Server& server, const std::filesystem::path& root);

}  // namespace reqdialog

#pragma once

#include <atomic>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace reqdialog {

/// Process exit codes shared by every command.
enum ExitCode : int { kExitOk = 0, kExitHypothesisFailed = 1, kExitUsage = 2 };

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::vector<std::filesystem::path> kb_sources;
  std::string kb_id = "default";
  double threshold = 0.8;
  bool pretagged = false;
  std::optional<std::filesystem::path> event_log;
  std::optional<std::filesystem::path> static_root;
};

/// Splits "HOST:PORT"; throws std::invalid_argument.
std::pair<std::string, int> parse_bind_address(const std::string& bind);

/// Runs the session service until SIGINT/SIGTERM or until `*stop` becomes
/// true. Returns kExitUsage when the knowledge base cannot be built or the
/// address cannot be bound.
int serve(const ServeOptions& options, std::ostream& out, std::ostream& err,
          const std::atomic<bool>* stop = nullptr);

/// Entry point for `reqdialog <extract|run|report|serve> ...`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace reqdialog

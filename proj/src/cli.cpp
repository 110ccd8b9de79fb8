#include "reqdialog/cli.hpp"

#include <httplib.h>
#include <pthread.h>
#include <signal.h>

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "reqdialog/errors.hpp"
#include "reqdialog/experiment.hpp"
#include "reqdialog/nlp.hpp"
#include "reqdialog/server.hpp"
#include "reqdialog/session.hpp"

namespace reqdialog {

namespace {

struct ExtractArgs {
  std::vector<std::string> inputs;
  std::string output;
  std::string owner;
  bool pretagged = false;
};

struct RunArgs {
  std::string config;
  std::vector<double> grid;
  std::optional<std::uint64_t> seeds;
  std::optional<std::string> tagger_mode;
  std::string out_dir = "report";
  double slack = kDefaultTrendSlack;
};

struct ReportArgs {
  std::string input;
  std::string out_dir;
};

std::vector<std::filesystem::path> to_paths(const std::vector<std::string>& v) {
  return {v.begin(), v.end()};
}

int cmd_extract(const ExtractArgs& args, std::ostream& out, std::ostream& err) {
  try {
    const auto paths = to_paths(args.inputs);
    const std::string owner = args.owner.empty() ? paths.front().stem().string() : args.owner;
    const auto set = build_noun_set_from_files(owner, paths, args.pretagged ? TaggerMode::pretagged : TaggerMode::builtin);
    std::ofstream file(args.output, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot write " + args.output);
    file << to_json(set).dump(2) << '\n';
    if (!file) throw IoError("error writing " + args.output);
    out << set.size() << " lemmas written to " << args.output << '\n';
    return kExitOk;
  } catch (const Error& e) {
    err << "extract: " << e.what() << '\n';
    return kExitUsage;
  }
}

int cmd_run(const RunArgs& args, std::ostream& out, std::ostream& err) {
  ExperimentReport report;
  try {
    auto config = load_config(args.config);
    if (!args.grid.empty()) config.factor_grid = args.grid;
    if (args.seeds) config.seeds = seed_range(*args.seeds);
    if (args.tagger_mode) config.tagger_mode = parse_tagger_mode(*args.tagger_mode);
    config.validate();
    report = run_experiment(config);
    for (const auto& path : emit_report(report, args.out_dir)) out << "wrote " << path.string() << '\n';
  } catch (const Error& e) {
    err << "run: " << e.what() << '\n';
    return kExitUsage;
  }

  const auto h1 = check_hypothesis_1(report, args.slack);
  const auto h2 = check_hypothesis_2(report);
  out << "hypothesis 1 (trend): " << (h1.pass ? "PASS" : "FAIL") << "  worst_drop=" << format_number(h1.worst_violation)
      << " slack=" << format_number(args.slack) << " spearman=" << format_number(h1.spearman)
      << " endpoint=" << (h1.endpoint_ok ? "ok" : "violated") << '\n';
  out << "hypothesis 2 (learning): " << (h2.pass ? "PASS" : "FAIL") << "  records=" << report.h2_records.size()
      << " counterexamples=" << h2.counterexamples.size() << (h2.vacuous ? " (vacuous)" : "") << '\n';
  if (report.aggregates.size() < 2) err << "run: warning: fewer than two grid points, trend check is trivial\n";
  return h1.pass && h2.pass ? kExitOk : kExitHypothesisFailed;
}

int cmd_report(const ReportArgs& args, std::ostream& out, std::ostream& err) {
  try {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_text_file(args.input));
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(args.input + ": " + e.what());
    }
    const auto report = report_from_json(j);
    for (const auto& path : emit_report(report, args.out_dir)) out << "wrote " << path.string() << '\n';
    return kExitOk;
  } catch (const Error& e) {
    err << "report: " << e.what() << '\n';
    return kExitUsage;
  }
}

KnowledgeBase load_knowledge_base(const ServeOptions& options) {
  if (options.kb_sources.empty()) throw ConfigError("no knowledge base sources given");
  NounSet merged{std::string(kEngineerId), {}};
  for (const auto& path : options.kb_sources) {
    NounSet part;
    if (path.extension() == ".json") {
      try {
        part = noun_set_from_json(nlohmann::json::parse(read_text_file(path)));
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
      }
    } else {
      const std::filesystem::path one[] = {path};
      part = build_noun_set_from_files(merged.owner, one, options.pretagged ? TaggerMode::pretagged : TaggerMode::builtin);
    }
    for (const auto& [lemma, count] : part.provenance) merged.provenance[lemma] += count;
  }
  if (merged.empty()) throw ConfigError("knowledge base sources contain no nouns");
  return KnowledgeBase::from_noun_set(merged);
}

}  // namespace

std::pair<std::string, int> parse_bind_address(const std::string& bind) {
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == bind.size()) {
    throw std::invalid_argument("bind address must be HOST:PORT, got '" + bind + "'");
  }
  const auto port_text = bind.substr(colon + 1);
  std::size_t used = 0;
  int port = -1;
  try {
    port = std::stoi(port_text, &used);
  } catch (const std::exception&) {
  }
  if (used != port_text.size() || port < 0 || port > 65535) {
    throw std::invalid_argument("invalid port '" + port_text + "'");
  }
  return {bind.substr(0, colon), port};
}

int serve(const ServeOptions& options, std::ostream& out, std::ostream& err, const std::atomic<bool>* stop) {
  std::unique_ptr<SessionManager> configured;
  try {
    configured = std::make_unique<SessionManager>(options.threshold);
    configured->add_knowledge_base(options.kb_id, load_knowledge_base(options));
    if (options.event_log) configured->attach_log(*options.event_log);
  } catch (const Error& e) {
    err << "serve: " << e.what() << '\n';
    return kExitUsage;
  }

  httplib::Server server;
  // httplib defaults to SO_REUSEPORT, which lets a second instance share a
  // port that is already taken instead of failing to bind.
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  install_routes(server, *configured);
  if (options.static_root && !mount_static(server, *options.static_root)) {
    err << "serve: cannot serve static files from " << options.static_root->string() << '\n';
    return kExitUsage;
  }
  std::mutex log_mutex;
  server.set_logger([&](const httplib::Request& req, const httplib::Response& res) {
    std::lock_guard lock(log_mutex);
    out << req.method << ' ' << req.path << ' ' << res.status << std::endl;
  });

  if (!server.bind_to_port(options.host, options.port)) {
    err << "serve: cannot bind " << options.host << ':' << options.port << '\n';
    return kExitUsage;
  }

  // Block the shutdown signals here so the listener threads inherit the mask
  // and the watcher below is the only receiver.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  sigset_t previous;
  pthread_sigmask(SIG_BLOCK, &signals, &previous);

  std::atomic<bool> done{false};
  std::thread watcher([&] {
    const timespec tick{0, 100'000'000};
    while (!done) {
      if (sigtimedwait(&signals, nullptr, &tick) > 0 || (stop && *stop)) {
        server.stop();
        return;
      }
    }
  });

  out << "serving knowledge base '" << options.kb_id << "' on " << options.host << ':' << options.port << std::endl;
  const bool ok = server.listen_after_bind();
  done = true;
  watcher.join();
  pthread_sigmask(SIG_SETMASK, &previous, nullptr);
  out << "shut down" << std::endl;
  return ok ? kExitOk : kExitUsage;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dialogue-based requirements analysis: noun extraction, cooperation sweeps, session service"};
  app.require_subcommand(1);

  ExtractArgs extract;
  auto* extract_cmd = app.add_subcommand("extract", "Extract a lemmatized noun set from documents");
  extract_cmd->add_option("--in", extract.inputs, "Input documents")->required()->expected(1, -1);
  extract_cmd->add_option("--out", extract.output, "Noun set JSON to write")->required();
  extract_cmd->add_option("--owner", extract.owner, "Owner id (default: first input's stem)");
  extract_cmd->add_flag("--pretagged", extract.pretagged, "Inputs are surface<TAB>tag streams");

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run the cooperation-factor sweep and both hypothesis checks");
  run_cmd->add_option("--config", run.config, "Experiment config JSON")->required();
  run_cmd->add_option("--grid", run.grid, "Cooperation factors, comma separated")->delimiter(',');
  run_cmd->add_option("--seeds", run.seeds, "Use seeds 0..N-1");
  run_cmd->add_option("--tagger-mode", run.tagger_mode, "builtin or pretagged");
  run_cmd->add_option("--out-dir", run.out_dir, "Report directory")->capture_default_str();
  run_cmd->add_option("--slack", run.slack, "Allowed drop between adjacent grid means")->capture_default_str();

  ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "Re-emit CSV/JSON/plot files from a saved report.json");
  report_cmd->add_option("--in", report.input, "Saved report.json")->required();
  report_cmd->add_option("--out-dir", report.out_dir, "Destination directory")->required();

  ServeOptions serve_opts;
  std::string bind = "127.0.0.1:8080";
  std::vector<std::string> kb_files;
  std::string log_path;
  std::string static_root;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the interactive session API");
  serve_cmd->add_option("--bind", bind, "HOST:PORT")->capture_default_str();
  serve_cmd->add_option("--kb", kb_files, "Engineer knowledge documents (text, tagged, or noun set .json)")
      ->required()
      ->expected(1, -1);
  serve_cmd->add_option("--kb-id", serve_opts.kb_id, "Name clients use to open sessions")->capture_default_str();
  serve_cmd->add_option("--threshold", serve_opts.threshold, "Similarity threshold for SIMILAR reactions")
      ->capture_default_str();
  serve_cmd->add_flag("--pretagged", serve_opts.pretagged, "Knowledge documents are tagged streams");
  serve_cmd->add_option("--log", log_path, "Append-only event log; replayed on start");
  serve_cmd->add_option("--static", static_root, "Directory with the browser client");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitUsage;
  }

  if (*extract_cmd) return cmd_extract(extract, out, err);
  if (*run_cmd) return cmd_run(run, out, err);
  if (*report_cmd) return cmd_report(report, out, err);

  try {
    std::tie(serve_opts.host, serve_opts.port) = parse_bind_address(bind);
  } catch (const std::invalid_argument& e) {
    err << "serve: " << e.what() << '\n';
    return kExitUsage;
  }
  if (!(serve_opts.threshold > 0.0 && serve_opts.threshold < 1.0)) {
    err << "serve: --threshold must lie in (0, 1)\n";
    return kExitUsage;
  }
  serve_opts.kb_sources = to_paths(kb_files);
  if (!log_path.empty()) serve_opts.event_log = log_path;
  if (!static_root.empty()) serve_opts.static_root = static_root;
  return serve(serve_opts, out, err);
}

}  // namespace reqdialog

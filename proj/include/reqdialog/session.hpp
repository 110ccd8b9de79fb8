#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "reqdialog/errors.hpp"
#include "reqdialog/nlp.hpp"
#include "reqdialog/protocol.hpp"

namespace reqdialog {

class SessionError : public Error {
 public:
  enum class Kind { NotFound, Conflict, Validation };

  SessionError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

enum class Decision { pending, accepted, rejected };

std::string_view to_string(Decision d);
/// Accepts "accepted" and "rejected" only; anything else is a Validation error.
Decision parse_verdict(std::string_view name);

struct Proposal {
  Lemma lemma;
  std::uint64_t weight;
};

struct MutualModel {
  LemmaSet mutual;
  LemmaSet accepted;
  LemmaSet customer_unique;
  std::size_t proposed = 0;
  double effective_cooperation = 0.0;
  double similarity_before = 0.0;
  double similarity_after = 0.0;

  LemmaSet model() const;
  bool operator==(const MutualModel&) const = default;
};

nlohmann::json to_json(const MutualModel& m);

/// One human customer talking to one private copy of the engineer.
/// Every public member is safe to call concurrently; mutations are
/// serialized in call order.
class Session {
 public:
  using EventSink = std::function<void(const std::string& session_id, const nlohmann::json& event)>;

  Session(std::string id, std::string kb_id, KnowledgeBase kb, double threshold,
          const Lexicon& lexicon = Lexicon::bundled(), EventSink sink = {});

  const std::string& id() const noexcept { return id_; }
  const std::string& kb_id() const noexcept { return kb_id_; }

  /// One reaction per lemma not heard before, in lemma order.
  std::vector<Reaction> submit_utterance(std::string_view text);
  /// Marks the returned lemmas as proposed (pending until decided).
  std::vector<Proposal> list_proposals(std::size_t limit);
  std::map<Lemma, Decision> record_decision(const Lemma& lemma, Decision verdict);
  MutualModel finalize();

  /// Re-applies a logged input event (utterance, proposals, decision, finalize).
  void apply(const nlohmann::json& event);

  bool finalized() const;
  LemmaSet customer_lemmas() const;
  std::map<Lemma, Decision> decisions() const;
  KnowledgeBase knowledge_base() const;
  /// Set once finalized.
  std::optional<MutualModel> mutual_model() const;
  nlohmann::json transcript() const;
  nlohmann::json state() const;

 private:
  void require_open() const;
  void log(nlohmann::json event);

  const std::string id_;
  const std::string kb_id_;
  const double threshold_;
  const Lexicon& lexicon_;
  EventSink sink_;

  mutable std::shared_mutex mutex_;
  KnowledgeBase kb_;
  NounSet customer_;
  std::map<Lemma, Decision> decisions_;
  bool finalized_ = false;
  std::optional<MutualModel> model_;
  nlohmann::json transcript_ = nlohmann::json::array();
};

/// Rebuilds a session from its transcript and returns its final model
/// (or the model a finalize would produce, if the log never finalized).
MutualModel replay_transcript(const nlohmann::json& events, const KnowledgeBase& kb, double threshold,
                              const Lexicon& lexicon = Lexicon::bundled());

/// Owns the immutable knowledge-base templates and the live sessions.
class SessionManager {
 public:
  explicit SessionManager(double threshold = kDefaultReactionThreshold, const Lexicon& lexicon = Lexicon::bundled());

  void add_knowledge_base(std::string id, KnowledgeBase kb);
  std::vector<std::string> knowledge_base_ids() const;
  double threshold() const noexcept { return threshold_; }

  std::string create_session(const std::string& kb_id);
  std::shared_ptr<Session> get(const std::string& session_id) const;
  std::size_t session_count() const;

  /// Replays any existing log at `path`, then appends every new event to it
  /// as one JSON line {"session", "event"}.
  void attach_log(const std::filesystem::path& path);

 private:
  std::shared_ptr<Session> make_session(const std::string& id, const std::string& kb_id);
  std::string fresh_id();
  void append_log(const std::string& session_id, const nlohmann::json& event);

  const double threshold_;
  const Lexicon& lexicon_;

  mutable std::shared_mutex mutex_;
  std::map<std::string, KnowledgeBase> templates_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t id_state_;

  std::mutex log_mutex_;
  std::ofstream log_;
  std::atomic<bool> replaying_{false};
};

}  // namespace reqdialog

#include "reqdialog/session.hpp"

#include <algorithm>
#include <random>

#include "reqdialog/concept_space.hpp"

namespace reqdialog {

namespace {

SessionError conflict(const std::string& what) { return {SessionError::Kind::Conflict, what}; }
SessionError validation(const std::string& what) { return {SessionError::Kind::Validation, what}; }

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

nlohmann::json decisions_json(const std::map<Lemma, Decision>& d) {
  auto out = nlohmann::json::object();
  for (const auto& [lemma, verdict] : d) out[lemma.str()] = std::string(to_string(verdict));
  return out;
}

}  // namespace

std::string_view to_string(Decision d) {
  switch (d) {
    case Decision::pending: return "pending";
    case Decision::accepted: return "accepted";
    case Decision::rejected: return "rejected";
  }
  return "?";
}

Decision parse_verdict(std::string_view name) {
  if (name == "accepted") return Decision::accepted;
  if (name == "rejected") return Decision::rejected;
  throw validation("verdict must be 'accepted' or 'rejected', got '" + std::string(name) + "'");
}

LemmaSet MutualModel::model() const {
  LemmaSet out = mutual;
  out.insert(accepted.begin(), accepted.end());
  return out;
}

nlohmann::json to_json(const MutualModel& m) {
  return {{"mutual", lemma_array(m.mutual)},
          {"accepted", lemma_array(m.accepted)},
          {"customer_unique", lemma_array(m.customer_unique)},
          {"model", lemma_array(m.model())},
          {"proposed", m.proposed},
          {"effective_cooperation", m.effective_cooperation},
          {"similarity_before", m.similarity_before},
          {"similarity_after", m.similarity_after}};
}

Session::Session(std::string id, std::string kb_id, KnowledgeBase kb, double threshold, const Lexicon& lexicon,
                 EventSink sink)
    : id_(std::move(id)),
      kb_id_(std::move(kb_id)),
      threshold_(threshold),
      lexicon_(lexicon),
      sink_(std::move(sink)),
      kb_(std::move(kb)),
      customer_{"customer", {}} {
  kb_.reset();
}

void Session::require_open() const {
  if (finalized_) throw conflict("session " + id_ + " is finalized");
}

void Session::log(nlohmann::json event) {
  event["seq"] = transcript_.size();
  transcript_.push_back(event);
  if (sink_) sink_(id_, event);
}

std::vector<Reaction> Session::submit_utterance(std::string_view text) {
  std::unique_lock lock(mutex_);
  require_open();
  const std::string docs[] = {std::string(text)};
  const NounSet heard = build_noun_set(customer_.owner, docs, TaggerMode::builtin, lexicon_);
  std::vector<Reaction> reactions;
  for (const auto& [lemma, count] : heard.provenance) {
    auto [it, fresh] = customer_.provenance.emplace(lemma, 0);
    it->second += count;
    if (fresh) reactions.push_back(classify_reaction(lemma, kb_, threshold_));
  }
  auto reactions_json = nlohmann::json::array();
  for (const auto& r : reactions) reactions_json.push_back(to_json(r));
  log({{"type", "utterance"}, {"text", std::string(text)}, {"reactions", reactions_json}});
  return reactions;
}

std::vector<Proposal> Session::list_proposals(std::size_t limit) {
  std::unique_lock lock(mutex_);
  require_open();
  LemmaSet excluded = customer_.lemmas();
  for (const auto& [lemma, verdict] : decisions_) {
    if (verdict != Decision::pending) excluded.insert(lemma);
  }
  std::vector<Proposal> out;
  auto arr = nlohmann::json::array();
  for (auto& lemma : propose_concepts(kb_, excluded, limit)) {
    decisions_.emplace(lemma, Decision::pending);
    arr.push_back({{"lemma", lemma.str()}, {"weight", kb_.weight(lemma)}});
    out.push_back({lemma, kb_.weight(lemma)});
  }
  log({{"type", "proposals"}, {"limit", limit}, {"proposals", arr}});
  return out;
}

std::map<Lemma, Decision> Session::record_decision(const Lemma& lemma, Decision verdict) {
  std::unique_lock lock(mutex_);
  require_open();
  if (verdict == Decision::pending) throw validation("a decision must be accepted or rejected");
  auto it = decisions_.find(lemma);
  if (it == decisions_.end()) throw validation("'" + lemma.str() + "' was never proposed");
  it->second = verdict;
  log({{"type", "decision"}, {"lemma", lemma.str()}, {"verdict", std::string(to_string(verdict))}});
  return decisions_;
}

MutualModel Session::finalize() {
  std::unique_lock lock(mutex_);
  require_open();
  const LemmaSet customer = customer_.lemmas();
  const LemmaSet before = kb_.lemmas();

  MutualModel m;
  m.mutual = mutual_nouns(customer, before);
  for (const auto& l : customer) {
    if (!before.contains(l)) m.customer_unique.insert(l);
  }
  for (const auto& [lemma, verdict] : decisions_) {
    if (verdict == Decision::accepted && !m.mutual.contains(lemma)) m.accepted.insert(lemma);
  }
  m.proposed = decisions_.size();
  m.effective_cooperation =
      m.proposed == 0 ? 0.0 : static_cast<double>(m.accepted.size()) / static_cast<double>(m.proposed);

  const LemmaSet model = m.model();
  kb_.append(model);
  const auto cos = learning_cosines(customer, before, model, kb_.lemmas());
  m.similarity_before = cos.before;
  m.similarity_after = cos.after;

  finalized_ = true;
  model_ = m;
  log({{"type", "finalize"}, {"model", to_json(m)}});
  return m;
}

void Session::apply(const nlohmann::json& event) {
  const auto type = event.at("type").get<std::string>();
  if (type == "create") return;
  if (type == "utterance") {
    submit_utterance(event.at("text").get<std::string>());
  } else if (type == "proposals") {
    list_proposals(event.at("limit").get<std::size_t>());
  } else if (type == "decision") {
    record_decision(Lemma(event.at("lemma").get<std::string>()), parse_verdict(event.at("verdict").get<std::string>()));
  } else if (type == "finalize") {
    finalize();
  } else {
    throw validation("unknown event type '" + type + "'");
  }
}

bool Session::finalized() const {
  std::shared_lock lock(mutex_);
  return finalized_;
}

LemmaSet Session::customer_lemmas() const {
  std::shared_lock lock(mutex_);
  return customer_.lemmas();
}

std::map<Lemma, Decision> Session::decisions() const {
  std::shared_lock lock(mutex_);
  return decisions_;
}

KnowledgeBase Session::knowledge_base() const {
  std::shared_lock lock(mutex_);
  return kb_;
}

nlohmann::json Session::transcript() const {
  std::shared_lock lock(mutex_);
  return transcript_;
}

nlohmann::json Session::state() const {
  std::shared_lock lock(mutex_);
  return {{"session_id", id_},
          {"kb_id", kb_id_},
          {"status", finalized_ ? "finalized" : "open"},
          {"customer_lemmas", lemma_array(customer_.lemmas())},
          {"decisions", decisions_json(decisions_)},
          {"model", model_ ? to_json(*model_) : nlohmann::json(nullptr)}};
}

std::optional<MutualModel> Session::mutual_model() const {
  std::shared_lock lock(mutex_);
  return model_;
}

MutualModel replay_transcript(const nlohmann::json& events, const KnowledgeBase& kb, double threshold,
                              const Lexicon& lexicon) {
  Session s("replay", "replay", kb, threshold, lexicon);
  for (const auto& e : events) s.apply(e);
  if (auto m = s.mutual_model()) return *m;
  return s.finalize();
}

SessionManager::SessionManager(double threshold, const Lexicon& lexicon)
    : threshold_(threshold), lexicon_(lexicon), id_state_(std::random_device{}()) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw DomainError("reaction threshold must lie in (0, 1)");
  id_state_ = (id_state_ << 32) ^ std::random_device{}();
}

void SessionManager::add_knowledge_base(std::string id, KnowledgeBase kb) {
  if (kb.empty()) throw DomainError("knowledge base '" + id + "' is empty");
  std::unique_lock lock(mutex_);
  templates_.insert_or_assign(std::move(id), std::move(kb));
}

std::vector<std::string> SessionManager::knowledge_base_ids() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [id, kb] : templates_) out.push_back(id);
  return out;
}

std::shared_ptr<Session> SessionManager::make_session(const std::string& id, const std::string& kb_id) {
  auto it = templates_.find(kb_id);
  if (it == templates_.end()) throw SessionError(SessionError::Kind::NotFound, "unknown knowledge base '" + kb_id + "'");
  auto session = std::make_shared<Session>(id, kb_id, it->second, threshold_, lexicon_,
                                           [this](const std::string& sid, const nlohmann::json& e) { append_log(sid, e); });
  sessions_.emplace(id, session);
  return session;
}

std::string SessionManager::fresh_id() {
  static constexpr char kDigits[] = "0123456789abcdef";
  for (;;) {
    std::uint64_t v = splitmix64(id_state_);
    std::string id(16, '0');
    for (auto& c : id) {
      c = kDigits[v & 0xf];
      v >>= 4;
    }
    if (!sessions_.contains(id)) return id;
  }
}

std::string SessionManager::create_session(const std::string& kb_id) {
  std::shared_ptr<Session> session;
  {
    std::unique_lock lock(mutex_);
    session = make_session(fresh_id(), kb_id);
  }
  append_log(session->id(), {{"type", "create"}, {"kb_id", kb_id}});
  return session->id();
}

std::shared_ptr<Session> SessionManager::get(const std::string& session_id) const {
  std::shared_lock lock(mutex_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw SessionError(SessionError::Kind::NotFound, "unknown session '" + session_id + "'");
  return it->second;
}

std::size_t SessionManager::session_count() const {
  std::shared_lock lock(mutex_);
  return sessions_.size();
}

void SessionManager::append_log(const std::string& session_id, const nlohmann::json& event) {
  if (replaying_) return;
  std::lock_guard lock(log_mutex_);
  if (!log_.is_open()) return;
  log_ << nlohmann::json{{"session", session_id}, {"event", event}}.dump() << '\n';
  log_.flush();
}

void SessionManager::attach_log(const std::filesystem::path& path) {
  if (std::filesystem::exists(path)) {
    replaying_ = true;
    const std::string text = read_text_file(path);
    std::size_t pos = 0;
    std::size_t line_no = 0;
    try {
      while (pos < text.size()) {
        const auto end = std::min(text.find('\n', pos), text.size());
        const auto line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line.empty()) continue;
        const auto entry = nlohmann::json::parse(line);
        const auto sid = entry.at("session").get<std::string>();
        const auto& event = entry.at("event");
        if (event.at("type") == "create") {
          std::unique_lock lock(mutex_);
          make_session(sid, event.at("kb_id").get<std::string>());
        } else {
          get(sid)->apply(event);
        }
      }
    } catch (const std::exception& e) {
      replaying_ = false;
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": cannot replay event log: " + e.what());
    }
    replaying_ = false;
  }
  std::lock_guard lock(log_mutex_);
  log_.open(path, std::ios::app);
  if (!log_) throw IoError("cannot open event log " + path.string());
}

}  // namespace reqdialog

#include "reqdialog/protocol.hpp"

#include <algorithm>
#include <cmath>

#include "reqdialog/concept_space.hpp"
#include "reqdialog/errors.hpp"
#include "reqdialog/permutation.hpp"

namespace reqdialog {

void require_cooperation_factor(double c) {
  if (!(c >= 0.0 && c <= 1.0)) {
    throw DomainError("cooperation factor must lie in [0, 1], got " + std::to_string(c));
  }
}

KnowledgeBase::KnowledgeBase(Weights initial) : weights_(initial), initial_(std::move(initial)) {
  for (const auto& [lemma, w] : weights_) {
    if (w == 0) throw DomainError("knowledge base weight for '" + lemma.str() + "' must be >= 1");
  }
}

KnowledgeBase KnowledgeBase::from_noun_set(const NounSet& nouns) {
  Weights w;
  for (const auto& [lemma, count] : nouns.provenance) w.emplace(lemma, count);
  return KnowledgeBase(std::move(w));
}

LemmaSet KnowledgeBase::lemmas() const {
  LemmaSet out;
  for (const auto& [lemma, w] : weights_) out.insert(out.end(), lemma);
  return out;
}

std::uint64_t KnowledgeBase::weight(const Lemma& lemma) const {
  auto it = weights_.find(lemma);
  return it == weights_.end() ? 0 : it->second;
}

void KnowledgeBase::append(const LemmaSet& lemmas) {
  for (const auto& l : lemmas) ++weights_[l];
}

std::string_view to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::CustomerNouns: return "CustomerNouns";
    case MessageKind::MutualNouns: return "MutualNouns";
    case MessageKind::EngineerNouns: return "EngineerNouns";
    case MessageKind::InteractionResult: return "InteractionResult";
    case MessageKind::Ack: return "Ack";
  }
  return "?";
}

MessageKind parse_message_kind(std::string_view name) {
  for (auto k : {MessageKind::CustomerNouns, MessageKind::MutualNouns, MessageKind::EngineerNouns,
                 MessageKind::InteractionResult, MessageKind::Ack}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown message kind '" + std::string(name) + "'");
}

LemmaSet mutual_nouns(const LemmaSet& customer, const LemmaSet& engineer) {
  LemmaSet out;
  std::set_intersection(customer.begin(), customer.end(), engineer.begin(), engineer.end(),
                        std::inserter(out, out.end()));
  return out;
}

std::size_t accepted_count(double c, std::size_t additional) {
  require_cooperation_factor(c);
  const auto k = static_cast<std::size_t>(std::floor(c * static_cast<double>(additional) + 0.5));
  return std::min(k, additional);
}

std::vector<Lemma> permuted_additional(const LemmaSet& customer, const LemmaSet& engineer, std::uint64_t seed) {
  std::vector<Lemma> additional;
  std::set_difference(engineer.begin(), engineer.end(), customer.begin(), customer.end(),
                      std::back_inserter(additional));
  seeded_shuffle(std::span<Lemma>(additional), seed);
  return additional;
}

LemmaSet take_prefix(LemmaSet mutual, const std::vector<Lemma>& ordered_additional, std::size_t k) {
  const auto n = std::min(k, ordered_additional.size());
  mutual.insert(ordered_additional.begin(), ordered_additional.begin() + static_cast<std::ptrdiff_t>(n));
  return mutual;
}

LemmaSet compose_interaction_result(const LemmaSet& customer, const LemmaSet& engineer, double c,
                                    std::uint64_t seed) {
  require_cooperation_factor(c);
  auto additional = permuted_additional(customer, engineer, seed);
  return take_prefix(mutual_nouns(customer, engineer), additional, accepted_count(c, additional.size()));
}

InteractionTranscript run_interaction(const Customer& customer, KnowledgeBase& kb, std::uint64_t seed) {
  require_cooperation_factor(customer.cooperation_factor);
  if (kb.empty()) throw DomainError("engineer knowledge base is empty");

  const LemmaSet customer_nouns = customer.nouns.lemmas();
  const LemmaSet engineer_nouns = kb.lemmas();
  const std::string engineer_id(kEngineerId);

  InteractionTranscript t;
  t.customer_id = customer.id;
  t.cooperation_factor = customer.cooperation_factor;
  t.seed = seed;
  t.messages.push_back({MessageKind::CustomerNouns, customer.id, customer_nouns});
  t.messages.push_back({MessageKind::MutualNouns, engineer_id, mutual_nouns(customer_nouns, engineer_nouns)});
  t.messages.push_back({MessageKind::EngineerNouns, engineer_id, engineer_nouns});
  t.result = compose_interaction_result(customer_nouns, engineer_nouns, customer.cooperation_factor, seed);
  t.messages.push_back({MessageKind::InteractionResult, customer.id, t.result});
  kb.append(t.result);
  t.messages.push_back({MessageKind::Ack, engineer_id, {}});
  return t;
}

LearningCosines learning_cosines(const LemmaSet& customer, const LemmaSet& engineer_before, const LemmaSet& result,
                                 const LemmaSet& engineer_after) {
  return {set_cosine(customer, engineer_before), set_cosine(result, engineer_after)};
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::KNOWN: return "KNOWN";
    case Verdict::SIMILAR: return "SIMILAR";
    case Verdict::UNKNOWN: return "UNKNOWN";
  }
  return "?";
}

std::string_view reaction_phrase(Verdict v) {
  switch (v) {
    case Verdict::KNOWN: return "I know what you are talking about";
    case Verdict::SIMILAR: return "I know something similar to what you are talking about";
    case Verdict::UNKNOWN: return "I don't know what you are talking about";
  }
  return "";
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

double edit_similarity(std::string_view a, std::string_view b) {
  const auto longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(edit_distance(a, b)) / static_cast<double>(longest);
}

Reaction classify_reaction(const Lemma& lemma, const KnowledgeBase& kb, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw DomainError("reaction threshold must lie in (0, 1), got " + std::to_string(threshold));
  }
  if (kb.contains(lemma)) return {lemma, Verdict::KNOWN, lemma, 1.0};

  std::optional<Lemma> best;
  double best_score = -1.0;
  // Map iteration is lexicographic, so keeping the first maximum breaks ties.
  for (const auto& [candidate, w] : kb.weights()) {
    const double s = edit_similarity(lemma.str(), candidate.str());
    if (s > best_score) {
      best_score = s;
      best = candidate;
    }
  }
  if (best && best_score >= threshold) return {lemma, Verdict::SIMILAR, best, best_score};
  return {lemma, Verdict::UNKNOWN, std::nullopt, std::max(best_score, 0.0)};
}

std::vector<Lemma> propose_concepts(const KnowledgeBase& kb, const LemmaSet& known, std::size_t limit) {
  std::vector<std::pair<Lemma, std::uint64_t>> candidates;
  for (const auto& [lemma, w] : kb.weights()) {
    if (!known.contains(lemma)) candidates.emplace_back(lemma, w);
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<Lemma> out;
  for (std::size_t i = 0; i < candidates.size() && i < limit; ++i) out.push_back(candidates[i].first);
  return out;
}

nlohmann::json lemma_array(const LemmaSet& set) {
  auto arr = nlohmann::json::array();
  for (const auto& l : set) arr.push_back(l.str());
  return arr;
}

LemmaSet lemma_set_from_json(const nlohmann::json& j) {
  LemmaSet out;
  for (const auto& v : j) out.insert(Lemma(v.get<std::string>()));
  return out;
}

nlohmann::json to_json(const Reaction& r) {
  return {{"lemma", r.lemma.str()},
          {"verdict", std::string(to_string(r.verdict))},
          {"nearest", r.nearest ? nlohmann::json(r.nearest->str()) : nlohmann::json(nullptr)},
          {"score", r.score},
          {"message", std::string(reaction_phrase(r.verdict))}};
}

nlohmann::json to_json(const InteractionTranscript& t) {
  auto messages = nlohmann::json::array();
  for (const auto& m : t.messages) {
    messages.push_back({{"kind", std::string(to_string(m.kind))}, {"sender", m.sender}, {"payload", lemma_array(m.payload)}});
  }
  return {{"customer_id", t.customer_id},
          {"cooperation_factor", t.cooperation_factor},
          {"seed", t.seed},
          {"messages", messages},
          {"result", lemma_array(t.result)}};
}

InteractionTranscript transcript_from_json(const nlohmann::json& j) {
  InteractionTranscript t;
  t.customer_id = j.at("customer_id").get<std::string>();
  t.cooperation_factor = j.at("cooperation_factor").get<double>();
  t.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& m : j.at("messages")) {
    t.messages.push_back({parse_message_kind(m.at("kind").get<std::string>()), m.at("sender").get<std::string>(),
                          lemma_set_from_json(m.at("payload"))});
  }
  t.result = lemma_set_from_json(j.at("result"));
  return t;
}

}  // namespace reqdialog

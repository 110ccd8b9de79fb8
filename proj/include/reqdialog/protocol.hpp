#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "reqdialog/nlp.hpp"

namespace reqdialog {

inline constexpr double kDefaultReactionThreshold = 0.8;

struct Customer {
  std::string id;
  NounSet nouns;
  double cooperation_factor = 0.0;
};

/// Throws DomainError unless 0 <= c <= 1.
void require_cooperation_factor(double c);

/// The engineer's weighted concept store. Appending a lemma bumps its weight;
/// reset() restores the snapshot taken at construction.
class KnowledgeBase {
 public:
  using Weights = std::map<Lemma, std::uint64_t>;

  KnowledgeBase() = default;
  /// Every weight must be >= 1.
  explicit KnowledgeBase(Weights initial);
  /// Initial weights are the occurrence counts.
  static KnowledgeBase from_noun_set(const NounSet& nouns);

  const Weights& weights() const noexcept { return weights_; }
  const Weights& initial_snapshot() const noexcept { return initial_; }
  LemmaSet lemmas() const;
  bool contains(const Lemma& lemma) const { return weights_.contains(lemma); }
  std::uint64_t weight(const Lemma& lemma) const;
  bool empty() const noexcept { return weights_.empty(); }
  std::size_t size() const noexcept { return weights_.size(); }

  void append(const LemmaSet& lemmas);
  void reset() { weights_ = initial_; }

 private:
  Weights weights_;
  Weights initial_;
};

enum class MessageKind { CustomerNouns, MutualNouns, EngineerNouns, InteractionResult, Ack };

std::string_view to_string(MessageKind kind);
MessageKind parse_message_kind(std::string_view name);

struct ProtocolMessage {
  MessageKind kind;
  std::string sender;
  LemmaSet payload;

  bool operator==(const ProtocolMessage&) const = default;
};

struct InteractionTranscript {
  std::string customer_id;
  double cooperation_factor = 0.0;
  std::uint64_t seed = 0;
  std::vector<ProtocolMessage> messages;
  LemmaSet result;

  bool operator==(const InteractionTranscript&) const = default;
};

inline constexpr std::string_view kEngineerId = "engineer";

LemmaSet mutual_nouns(const LemmaSet& customer, const LemmaSet& engineer);

/// Number of additional engineer nouns taken at factor c: floor(c*n + 1/2).
std::size_t accepted_count(double c, std::size_t additional);

/// Engineer nouns outside the customer set, sorted then shuffled with the
/// seeded generator.
std::vector<Lemma> permuted_additional(const LemmaSet& customer, const LemmaSet& engineer, std::uint64_t seed);

/// mutual ∪ first k of `ordered_additional`.
LemmaSet take_prefix(LemmaSet mutual, const std::vector<Lemma>& ordered_additional, std::size_t k);

/// The customer's interaction result: mutual nouns plus a seeded-shuffle
/// prefix of the engineer's remaining nouns whose length follows c.
/// Throws DomainError for c outside [0, 1].
LemmaSet compose_interaction_result(const LemmaSet& customer, const LemmaSet& engineer, double c,
                                    std::uint64_t seed);

/// One five-message exchange. Appends the result to `kb`.
InteractionTranscript run_interaction(const Customer& customer, KnowledgeBase& kb, std::uint64_t seed);

/// Before/after similarity of the customer's and the engineer's vectors.
struct LearningCosines {
  double before = 0.0;
  double after = 0.0;
};

/// before = cos(customer, engineer_before); after = cos(result, engineer_after).
LearningCosines learning_cosines(const LemmaSet& customer, const LemmaSet& engineer_before, const LemmaSet& result,
                                 const LemmaSet& engineer_after);

enum class Verdict { KNOWN, SIMILAR, UNKNOWN };

std::string_view to_string(Verdict v);
/// The engineer's phrasing of a verdict.
std::string_view reaction_phrase(Verdict v);

struct Reaction {
  Lemma lemma;
  Verdict verdict;
  std::optional<Lemma> nearest;
  double score = 0.0;

  bool operator==(const Reaction&) const = default;
};

std::size_t edit_distance(std::string_view a, std::string_view b);
/// 1 - editdist / max(len); 1 for two empty strings.
double edit_similarity(std::string_view a, std::string_view b);

/// Requires 0 < threshold < 1 (DomainError otherwise).
Reaction classify_reaction(const Lemma& lemma, const KnowledgeBase& kb, double threshold = kDefaultReactionThreshold);

/// kb lemmas not in `known`, heaviest first, ties lexicographic.
std::vector<Lemma> propose_concepts(const KnowledgeBase& kb, const LemmaSet& known, std::size_t limit);

nlohmann::json lemma_array(const LemmaSet& set);
LemmaSet lemma_set_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Reaction& r);
nlohmann::json to_json(const InteractionTranscript& t);
InteractionTranscript transcript_from_json(const nlohmann::json& j);

}  // namespace reqdialog

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "reqdialog/nlp.hpp"

namespace reqdialog {

/// Sorted union of lemmas; the coordinate system for every one-hot vector.
class Vocabulary {
 public:
  Vocabulary() = default;

  static Vocabulary build(std::span<const NounSet> sets);
  static Vocabulary from_lemmas(const LemmaSet& lemmas);

  const std::vector<Lemma>& lemmas() const noexcept { return lemmas_; }
  std::size_t size() const noexcept { return lemmas_.size(); }
  std::optional<std::size_t> position(const Lemma& lemma) const;
  /// Fingerprint of the lemma sequence; equal vocabularies share it.
  std::uint64_t id() const noexcept { return id_; }

 private:
  explicit Vocabulary(std::vector<Lemma> sorted);

  std::vector<Lemma> lemmas_;
  std::map<Lemma, std::size_t> index_;
  std::uint64_t id_ = 0;
};

struct OneHotVector {
  std::vector<std::uint8_t> bits;
  std::uint64_t vocabulary_id = 0;

  std::size_t popcount() const noexcept;
  bool operator==(const OneHotVector&) const = default;
};

/// Throws EncodingError for a lemma outside `vocab`.
OneHotVector one_hot(const LemmaSet& set, const Vocabulary& vocab);
OneHotVector one_hot(const NounSet& set, const Vocabulary& vocab);

/// Dot product over norms. cos(0,0) = 1 and cos(0,x) = 0 for x != 0.
/// Throws DimensionError when the vectors come from different vocabularies.
double cosine_similarity(const OneHotVector& u, const OneHotVector& v);

/// |A∩B| / sqrt(|A||B|) from integer cardinalities, same zero convention.
double set_cosine(const LemmaSet& a, const LemmaSet& b);

nlohmann::json to_json(const Vocabulary& vocab);
Vocabulary vocabulary_from_json(const nlohmann::json& j);

}  // namespace reqdialog

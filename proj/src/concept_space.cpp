#include "reqdialog/concept_space.hpp"

#include <algorithm>
#include <cmath>

#include "reqdialog/errors.hpp"

namespace reqdialog {

namespace {

std::uint64_t fnv1a(std::span<const Lemma> lemmas) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& l : lemmas) {
    for (unsigned char c : l.str()) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;  // separator, never a byte of a lemma in UTF-8
    h *= 0x100000001b3ULL;
  }
  return h;
}

double cardinality_cosine(std::size_t common, std::size_t a, std::size_t b) {
  if (a == 0 && b == 0) return 1.0;
  if (a == 0 || b == 0) return 0.0;
  return static_cast<double>(common) / std::sqrt(static_cast<double>(a) * static_cast<double>(b));
}

}  // namespace

Vocabulary::Vocabulary(std::vector<Lemma> sorted) : lemmas_(std::move(sorted)), id_(fnv1a(lemmas_)) {
  for (std::size_t i = 0; i < lemmas_.size(); ++i) index_.emplace(lemmas_[i], i);
}

Vocabulary Vocabulary::build(std::span<const NounSet> sets) {
  LemmaSet all;
  for (const auto& s : sets) {
    for (const auto& [lemma, count] : s.provenance) all.insert(lemma);
  }
  return from_lemmas(all);
}

Vocabulary Vocabulary::from_lemmas(const LemmaSet& lemmas) {
  // std::set<Lemma> orders by std::string comparison, i.e. byte order.
  return Vocabulary(std::vector<Lemma>(lemmas.begin(), lemmas.end()));
}

std::optional<std::size_t> Vocabulary::position(const Lemma& lemma) const {
  auto it = index_.find(lemma);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t OneHotVector::popcount() const noexcept {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

OneHotVector one_hot(const LemmaSet& set, const Vocabulary& vocab) {
  OneHotVector v{std::vector<std::uint8_t>(vocab.size(), 0), vocab.id()};
  for (const auto& lemma : set) {
    auto pos = vocab.position(lemma);
    if (!pos) throw EncodingError(lemma.str());
    v.bits[*pos] = 1;
  }
  return v;
}

OneHotVector one_hot(const NounSet& set, const Vocabulary& vocab) { return one_hot(set.lemmas(), vocab); }

double cosine_similarity(const OneHotVector& u, const OneHotVector& v) {
  if (u.vocabulary_id != v.vocabulary_id || u.bits.size() != v.bits.size()) {
    throw DimensionError("vectors from different vocabularies (" + std::to_string(u.bits.size()) + " vs " +
                         std::to_string(v.bits.size()) + " components)");
  }
  double dot = 0.0;
  double nu = 0.0;
  double nv = 0.0;
  for (std::size_t i = 0; i < u.bits.size(); ++i) {
    dot += static_cast<double>(u.bits[i]) * v.bits[i];
    nu += static_cast<double>(u.bits[i]) * u.bits[i];
    nv += static_cast<double>(v.bits[i]) * v.bits[i];
  }
  if (nu == 0.0 && nv == 0.0) return 1.0;
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return dot / std::sqrt(nu * nv);
}

double set_cosine(const LemmaSet& a, const LemmaSet& b) {
  std::size_t common = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  return cardinality_cosine(common, a.size(), b.size());
}

nlohmann::json to_json(const Vocabulary& vocab) {
  auto arr = nlohmann::json::array();
  for (const auto& l : vocab.lemmas()) arr.push_back(l.str());
  return arr;
}

Vocabulary vocabulary_from_json(const nlohmann::json& j) {
  LemmaSet lemmas;
  for (const auto& v : j) {
    if (!lemmas.insert(Lemma(v.get<std::string>())).second) {
      throw ConfigError("duplicate vocabulary entry '" + v.get<std::string>() + "'");
    }
  }
  return Vocabulary::from_lemmas(lemmas);
}

}  // namespace reqdialog

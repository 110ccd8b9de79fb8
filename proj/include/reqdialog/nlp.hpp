#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace reqdialog {

struct Token {
  std::string surface;
  std::string tag;  // Penn Treebank
  std::size_t sentence_index = 0;
  std::size_t token_index = 0;

  bool operator==(const Token&) const = default;
};

/// Canonical concept string: non-empty, lowercase, no whitespace.
class Lemma {
 public:
  /// Throws std::invalid_argument when `value` violates the invariants.
  explicit Lemma(std::string value);

  const std::string& str() const noexcept { return value_; }

  auto operator<=>(const Lemma&) const = default;
  bool operator==(const Lemma&) const = default;

 private:
  std::string value_;
};

using LemmaSet = std::set<Lemma>;

/// Lemmas extracted from one agent's documents with occurrence counts.
/// The lemma set is the key set of `provenance`, so the two cannot diverge.
struct NounSet {
  std::string owner;
  std::map<Lemma, std::size_t> provenance;

  LemmaSet lemmas() const;
  std::size_t size() const noexcept { return provenance.size(); }
  bool empty() const noexcept { return provenance.empty(); }

  bool operator==(const NounSet&) const = default;
};

enum class TaggerMode { builtin, pretagged };

TaggerMode parse_tagger_mode(std::string_view name);
std::string_view to_string(TaggerMode mode);

/// Word -> tag table backing the rule tagger. One tag per word.
class Lexicon {
 public:
  /// Format: "word<TAB>tag" per line, '#' comments and blank lines ignored.
  static Lexicon parse(std::string_view text);
  static Lexicon load(const std::filesystem::path& path);
  /// The lexicon compiled in from data/lexicon.tsv.
  static const Lexicon& bundled();

  std::optional<std::string_view> lookup(std::string_view word) const;
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::map<std::string, std::string, std::less<>> entries_;
};

using Sentence = std::vector<std::string>;

/// Splits on whitespace and punctuation. Punctuation becomes its own token;
/// hyphens and apostrophes inside a word are kept. A sentence ends after
/// '.', '!' or '?' when followed by whitespace and an uppercase letter, or by
/// the end of the text.
std::vector<Sentence> tokenize(std::string_view document);

/// Lexicon lookup, then suffix rules, then NN.
std::vector<Token> tag_pos(std::span<const Sentence> sentences,
                           const Lexicon& lexicon = Lexicon::bundled());
std::vector<Token> tag_pos(const Sentence& sentence,
                           const Lexicon& lexicon = Lexicon::bundled());

/// Reads the "surface<TAB>tag" stream. Throws ParseError.
std::vector<Token> parse_tagged(std::string_view stream);
/// Normalized form: one token per line, a single blank line between
/// sentences, no comments.
std::string serialize_tagged(std::span<const Token> tokens);

bool is_noun_tag(std::string_view tag) noexcept;

std::vector<std::string> extract_nouns(std::span<const Token> tokens);

Lemma lemmatize(std::string_view word);

/// Full pipeline over in-memory documents. In pretagged mode each document
/// is a tagged stream.
NounSet build_noun_set(std::string owner, std::span<const std::string> documents,
                       TaggerMode mode = TaggerMode::builtin,
                       const Lexicon& lexicon = Lexicon::bundled());

/// Same as build_noun_set, reading each path. I/O and parse errors are
/// rethrown with the file name prefixed.
NounSet build_noun_set_from_files(std::string owner,
                                  std::span<const std::filesystem::path> paths,
                                  TaggerMode mode = TaggerMode::builtin,
                                  const Lexicon& lexicon = Lexicon::bundled());

std::string read_text_file(const std::filesystem::path& path);

nlohmann::json to_json(const NounSet& set);
NounSet noun_set_from_json(const nlohmann::json& j);

}  // namespace reqdialog

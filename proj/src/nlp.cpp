#include "reqdialog/nlp.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "reqdialog/errors.hpp"

namespace reqdialog {

// Generated from data/lexicon.tsv at configure time.
extern const char* const kBundledLexicon;

namespace {

bool is_ascii_alnum(unsigned char c) { return std::isalnum(c) != 0; }

// Non-ASCII bytes are treated as letters so UTF-8 words stay whole.
bool is_word_byte(unsigned char c) { return c >= 0x80 || is_ascii_alnum(c); }

bool is_space(unsigned char c) { return std::isspace(c) != 0; }

bool is_upper(unsigned char c) { return c >= 'A' && c <= 'Z'; }

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (is_upper(static_cast<unsigned char>(c))) c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && is_space(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string punctuation_tag(std::string_view p) {
  if (p == "." || p == "!" || p == "?") return ".";
  if (p == ",") return ",";
  if (p == ":" || p == ";") return ":";
  if (p == "(" || p == "[" || p == "{") return "-LRB-";
  if (p == ")" || p == "]" || p == "}") return "-RRB-";
  if (p == "\"" || p == "'") return "''";
  if (p == "$") return "$";
  if (p == "#") return "#";
  return "SYM";
}

bool is_number(std::string_view w) {
  bool digit = false;
  for (unsigned char c : w) {
    if (std::isdigit(c)) {
      digit = true;
    } else if (c != '.' && c != ',') {
      return false;
    }
  }
  return digit;
}

std::optional<std::string_view> lookup_any_case(const Lexicon& lex, std::string_view w) {
  if (auto t = lex.lookup(w)) return t;
  return lex.lookup(to_lower(w));
}

// Candidate stems for a plural/3rd-person form, most specific first.
std::vector<std::string> s_stems(std::string_view w) {
  std::vector<std::string> stems;
  if (ends_with(w, "ies") && w.size() > 4) stems.push_back(std::string(w.substr(0, w.size() - 3)) + "y");
  if (ends_with(w, "es") && w.size() > 3) stems.emplace_back(w.substr(0, w.size() - 2));
  if (ends_with(w, "s") && !ends_with(w, "ss") && w.size() > 2) stems.emplace_back(w.substr(0, w.size() - 1));
  return stems;
}

std::string tag_word(std::string_view w, bool sentence_initial, const Lexicon& lex) {
  if (auto t = lex.lookup(w)) return std::string(*t);
  if (sentence_initial) {
    if (auto t = lex.lookup(to_lower(w))) return std::string(*t);
  }
  if (!is_word_byte(static_cast<unsigned char>(w.front()))) return punctuation_tag(w);
  if (is_number(w)) return "CD";

  for (const auto& stem : s_stems(w)) {
    auto t = sentence_initial ? lookup_any_case(lex, stem) : lex.lookup(stem);
    if (!t) continue;
    if (*t == "NN") return "NNS";
    if (*t == "NNP") return "NNPS";
    if (*t == "VB" || *t == "VBP") return "VBZ";
  }

  const std::string lower = to_lower(w);
  static constexpr std::array kNounSuffixes = {"tion", "sion", "ment", "ness", "ity", "ism", "ship", "ance", "ence"};
  for (std::string_view suffix : kNounSuffixes) {
    if (ends_with(lower, suffix)) return "NN";
    if (ends_with(lower, std::string(suffix) + "s")) return "NNS";
  }
  if (!sentence_initial && is_upper(static_cast<unsigned char>(w.front()))) return "NNP";
  if (ends_with(lower, "ly")) return "RB";
  if (ends_with(lower, "ing")) return "VBG";
  if (ends_with(lower, "ed")) return "VBN";
  static constexpr std::array kAdjSuffixes = {"ous", "ful", "ive", "able", "ible", "less", "ic", "al"};
  for (std::string_view suffix : kAdjSuffixes) {
    if (ends_with(lower, suffix)) return "JJ";
  }
  return "NN";
}

const std::unordered_map<std::string, std::string>& irregular_lemmas() {
  static const std::unordered_map<std::string, std::string> table = {
      {"mice", "mouse"},       {"children", "child"},  {"men", "man"},
      {"women", "woman"},      {"feet", "foot"},       {"teeth", "tooth"},
      {"geese", "goose"},      {"oxen", "ox"},         {"lives", "life"},
      {"knives", "knife"},     {"wives", "wife"},      {"leaves", "leaf"},
      {"people", "people"},    {"data", "data"},       {"criteria", "criterion"},
      {"phenomena", "phenomenon"}, {"analyses", "analysis"}, {"species", "species"},
      {"series", "series"},    {"news", "news"},       {"indices", "index"},
      {"atlases", "atlas"},    {"lenses", "lens"},     {"biases", "bias"},
      {"buses", "bus"},        {"statuses", "status"}, {"viruses", "virus"},
  };
  return table;
}

bool guarded_s_ending(std::string_view w) {
  return ends_with(w, "ss") || ends_with(w, "us") || ends_with(w, "is");
}

std::string lemmatize_once(const std::string& w) {
  const auto& irregular = irregular_lemmas();
  if (auto it = irregular.find(w); it != irregular.end()) return it->second;
  // Fixed points of the irregular table are kept verbatim.
  for (const auto& [from, to] : irregular) {
    if (to == w) return w;
  }
  if (w.size() > 4 && ends_with(w, "ies")) return w.substr(0, w.size() - 3) + "y";
  if (w.size() > 4 && ends_with(w, "ves")) return w.substr(0, w.size() - 3) + "f";
  if (w.size() > 3 && ends_with(w, "es")) {
    const std::string stem = w.substr(0, w.size() - 2);
    if (ends_with(stem, "x") || ends_with(stem, "z") || ends_with(stem, "ch") || ends_with(stem, "sh") ||
        ends_with(stem, "ss")) {
      return stem;
    }
  }
  if (w.size() > 3 && ends_with(w, "s") && !guarded_s_ending(w)) return w.substr(0, w.size() - 1);
  return w;
}

}  // namespace

Lemma::Lemma(std::string value) : value_(std::move(value)) {
  if (value_.empty()) throw std::invalid_argument("lemma must be non-empty");
  for (unsigned char c : value_) {
    if (is_space(c)) throw std::invalid_argument("lemma contains whitespace: '" + value_ + "'");
    if (is_upper(c)) throw std::invalid_argument("lemma is not lowercase: '" + value_ + "'");
  }
}

LemmaSet NounSet::lemmas() const {
  LemmaSet out;
  for (const auto& [lemma, count] : provenance) out.insert(out.end(), lemma);
  return out;
}

TaggerMode parse_tagger_mode(std::string_view name) {
  if (name == "builtin") return TaggerMode::builtin;
  if (name == "pretagged") return TaggerMode::pretagged;
  throw ConfigError("unknown tagger_mode '" + std::string(name) + "' (expected builtin|pretagged)");
}

std::string_view to_string(TaggerMode mode) {
  return mode == TaggerMode::builtin ? "builtin" : "pretagged";
}

Lexicon Lexicon::parse(std::string_view text) {
  Lexicon lex;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    const auto line = trim(text.substr(pos, end - pos));
    ++line_no;
    pos = end + 1;
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) throw ParseError(line_no, "lexicon entry without tab");
    auto word = trim(line.substr(0, tab));
    auto tag = trim(line.substr(tab + 1));
    if (word.empty() || tag.empty()) throw ParseError(line_no, "empty lexicon field");
    lex.entries_.emplace(std::string(word), std::string(tag));
  }
  return lex;
}

Lexicon Lexicon::load(const std::filesystem::path& path) { return parse(read_text_file(path)); }

const Lexicon& Lexicon::bundled() {
  static const Lexicon lex = parse(kBundledLexicon);
  return lex;
}

std::optional<std::string_view> Lexicon::lookup(std::string_view word) const {
  auto it = entries_.find(word);
  if (it == entries_.end()) return std::nullopt;
  return std::string_view(it->second);
}

std::vector<Sentence> tokenize(std::string_view doc) {
  struct Raw {
    std::string text;
    bool space_before;
  };
  std::vector<Raw> raw;
  bool space_before = true;
  std::size_t i = 0;
  while (i < doc.size()) {
    const auto c = static_cast<unsigned char>(doc[i]);
    if (is_space(c)) {
      space_before = true;
      ++i;
      continue;
    }
    if (is_word_byte(c)) {
      std::size_t j = i + 1;
      while (j < doc.size()) {
        const auto d = static_cast<unsigned char>(doc[j]);
        if (is_word_byte(d)) {
          ++j;
        } else if ((d == '-' || d == '\'') && j + 1 < doc.size() &&
                   is_word_byte(static_cast<unsigned char>(doc[j + 1]))) {
          j += 2;
        } else {
          break;
        }
      }
      raw.push_back({std::string(doc.substr(i, j - i)), space_before});
      i = j;
    } else {
      raw.push_back({std::string(1, doc[i]), space_before});
      ++i;
    }
    space_before = false;
  }

  std::vector<Sentence> sentences;
  Sentence current;
  for (std::size_t k = 0; k < raw.size(); ++k) {
    current.push_back(raw[k].text);
    const auto& t = raw[k].text;
    if (t != "." && t != "!" && t != "?") continue;
    const bool at_end = k + 1 == raw.size();
    const bool next_starts_sentence = !at_end && raw[k + 1].space_before &&
                                      is_upper(static_cast<unsigned char>(raw[k + 1].text.front()));
    if (at_end || next_starts_sentence) {
      sentences.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) sentences.push_back(std::move(current));
  return sentences;
}

std::vector<Token> tag_pos(std::span<const Sentence> sentences, const Lexicon& lexicon) {
  std::vector<Token> out;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    for (std::size_t t = 0; t < sentences[s].size(); ++t) {
      const auto& w = sentences[s][t];
      if (w.empty()) continue;
      out.push_back({w, tag_word(w, t == 0, lexicon), s, t});
    }
  }
  return out;
}

std::vector<Token> tag_pos(const Sentence& sentence, const Lexicon& lexicon) {
  return tag_pos(std::span<const Sentence>(&sentence, 1), lexicon);
}

std::vector<Token> parse_tagged(std::string_view stream) {
  std::vector<Token> out;
  std::size_t sentence = 0;
  std::size_t index = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < stream.size()) {
    const auto end = std::min(stream.find('\n', pos), stream.size());
    auto line = stream.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty() && line.front() == '#') continue;
    if (trim(line).empty()) {
      if (index > 0) {
        ++sentence;
        index = 0;
      }
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) throw ParseError(line_no, "expected surface<TAB>tag");
    const auto surface = line.substr(0, tab);
    const auto tag = line.substr(tab + 1);
    if (surface.empty() || tag.empty()) throw ParseError(line_no, "empty surface or tag");
    if (tag.find('\t') != std::string_view::npos) throw ParseError(line_no, "more than one tab");
    out.push_back({std::string(surface), std::string(tag), sentence, index++});
  }
  return out;
}

std::string serialize_tagged(std::span<const Token> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0 && tokens[i].sentence_index != tokens[i - 1].sentence_index) out += '\n';
    out += tokens[i].surface;
    out += '\t';
    out += tokens[i].tag;
    out += '\n';
  }
  return out;
}

bool is_noun_tag(std::string_view tag) noexcept {
  return tag == "NN" || tag == "NNS" || tag == "NNP" || tag == "NNPS";
}

std::vector<std::string> extract_nouns(std::span<const Token> tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens) {
    if (is_noun_tag(t.tag)) out.push_back(t.surface);
  }
  return out;
}

Lemma lemmatize(std::string_view word) {
  if (word.empty()) throw std::invalid_argument("cannot lemmatize an empty word");
  std::string current = to_lower(word);
  // Rules shorten the word or map into the irregular table's fixed points,
  // so this terminates and the result is idempotent.
  for (;;) {
    std::string next = lemmatize_once(current);
    if (next == current) break;
    current = std::move(next);
  }
  return Lemma(std::move(current));
}

NounSet build_noun_set(std::string owner, std::span<const std::string> documents, TaggerMode mode,
                       const Lexicon& lexicon) {
  NounSet set{std::move(owner), {}};
  for (const auto& doc : documents) {
    const auto tokens = mode == TaggerMode::pretagged ? parse_tagged(doc) : tag_pos(tokenize(doc), lexicon);
    for (const auto& noun : extract_nouns(tokens)) ++set.provenance[lemmatize(noun)];
  }
  return set;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path.string());
  return ss.str();
}

NounSet build_noun_set_from_files(std::string owner, std::span<const std::filesystem::path> paths,
                                  TaggerMode mode, const Lexicon& lexicon) {
  NounSet set{std::move(owner), {}};
  for (const auto& path : paths) {
    const std::string text = read_text_file(path);
    try {
      const std::string docs[] = {text};
      for (auto& [lemma, count] : build_noun_set(set.owner, docs, mode, lexicon).provenance) {
        set.provenance[lemma] += count;
      }
    } catch (const ParseError& e) {
      throw ParseError(e.line(), path.string() + ": " + e.what());
    }
  }
  return set;
}

nlohmann::json to_json(const NounSet& set) {
  nlohmann::json lemmas = nlohmann::json::array();
  nlohmann::json provenance = nlohmann::json::object();
  for (const auto& [lemma, count] : set.provenance) {
    lemmas.push_back(lemma.str());
    provenance[lemma.str()] = count;
  }
  return {{"owner", set.owner}, {"lemmas", lemmas}, {"provenance", provenance}};
}

NounSet noun_set_from_json(const nlohmann::json& j) {
  NounSet set;
  set.owner = j.at("owner").get<std::string>();
  for (const auto& [key, value] : j.at("provenance").items()) {
    const auto count = value.get<std::size_t>();
    if (count == 0) throw ConfigError("provenance count for '" + key + "' must be positive");
    set.provenance.emplace(Lemma(key), count);
  }
  LemmaSet listed;
  for (const auto& v : j.at("lemmas")) listed.insert(Lemma(v.get<std::string>()));
  if (listed != set.lemmas()) throw ConfigError("noun set lemmas and provenance keys differ");
  return set;
}

}  // namespace reqdialog

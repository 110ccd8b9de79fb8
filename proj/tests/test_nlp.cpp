#include <algorithm>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "reqdialog/errors.hpp"
#include "reqdialog/nlp.hpp"

using namespace reqdialog;

namespace {

std::vector<std::string> tags_of(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens) out.push_back(t.tag);
  return out;
}

std::vector<std::string> lemma_strings(const NounSet& set) {
  std::vector<std::string> out;
  for (const auto& l : set.lemmas()) out.push_back(l.str());
  return out;
}

const char* const kFixtures[] = {"customer_1", "customer_2", "customer_3", "engineer"};

}  // namespace

TEST_CASE("tokenize splits words, punctuation and sentences") {
  CHECK(tokenize("Akita dogs bark.") == std::vector<Sentence>{{"Akita", "dogs", "bark", "."}});
  CHECK(tokenize("").empty());
  CHECK(tokenize("   \n\t").empty());

  const auto two = tokenize("Dogs bark. Cats meow.");
  REQUIRE(two.size() == 2);
  CHECK(two[0] == Sentence{"Dogs", "bark", "."});
  CHECK(two[1] == Sentence{"Cats", "meow", "."});
}

TEST_CASE("tokenize only breaks before whitespace and an uppercase letter") {
  CHECK(tokenize("Version 2.5 shipped.").size() == 1);
  CHECK(tokenize("It works. then it stops.").size() == 1);
  CHECK(tokenize("Stop! Go? Wait.").size() == 3);
  CHECK(tokenize("A well-known dog's coat, (thick).") ==
        std::vector<Sentence>{{"A", "well-known", "dog's", "coat", ",", "(", "thick", ")", "."}});
}

TEST_CASE("tag_pos follows lexicon, suffix rules, then NN") {
  const Sentence s{"Akita", "dogs", "bark", "."};
  const auto tagged = tag_pos(s);
  REQUIRE(tagged.size() == 4);
  CHECK(tagged[0].tag == "NNP");
  CHECK(tagged[1].tag == "NNS");
  CHECK((tagged[2].tag == "VB" || tagged[2].tag == "VBP"));
  CHECK(tagged[3].tag == ".");
  CHECK(tagged[1].token_index == 1);

  CHECK(tags_of(tag_pos(Sentence{"happiness"})) == std::vector<std::string>{"NN"});
  CHECK(tag_pos(std::vector<Sentence>{}).empty());
}

TEST_CASE("tag_pos suffix rules") {
  // Sentence-initial position is avoided so capitalization rules stay out.
  auto tag = [](const std::string& w) { return tag_pos(Sentence{"the", w}).at(1).tag; };
  CHECK(tag("registration") == "NN");
  CHECK(tag("payments") == "NNS");
  CHECK(tag("puppies") == "NNS");
  CHECK(tag("Hachiko") == "NNP");
  CHECK(tag("Akitas") == "NNPS");
  CHECK(tag("needs") == "VBZ");
  CHECK(tag("courageous") == "JJ");
  CHECK(tag("quickly") == "RB");
  CHECK(tag("42") == "CD");
  CHECK(tag("dysplasia") == "NN");
  // Sentence-initial capitals fall back to the lowercase lexicon entry.
  CHECK(tag_pos(Sentence{"Owners", "walk"}).at(0).tag == "NNS");
  CHECK(tag_pos(Sentence{"Common", "dogs"}).at(0).tag == "JJ");
}

TEST_CASE("bundled lexicon contents are pinned") {
  const auto& lex = Lexicon::bundled();
  CHECK(lex.size() == 310);
  CHECK(lex.lookup("Akita") == "NNP");
  CHECK(lex.lookup("Japan") == "NNP");
  CHECK(lex.lookup("dog") == "NN");
  CHECK(lex.lookup("guard") == "NN");
  CHECK(lex.lookup("bark") == "VBP");
  CHECK(lex.lookup("people") == "NNS");
  CHECK_FALSE(lex.lookup("dogs").has_value());
  CHECK_FALSE(lex.lookup("Hachiko").has_value());
  CHECK(Lexicon::load(oracle::source_dir() / "data" / "lexicon.tsv").size() == lex.size());
}

TEST_CASE("lexicon parse errors carry line numbers") {
  CHECK(Lexicon::parse("# c\ndog\tNN\n\ncat\tNN\n").size() == 2);
  try {
    Lexicon::parse("dog\tNN\nbroken\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("parse_tagged reads the tab format") {
  const auto one = parse_tagged("Akita\tNNP\ndog\tNN");
  REQUIRE(one.size() == 2);
  CHECK(one[1] == Token{"dog", "NN", 0, 1});

  const auto two = parse_tagged("Akita\tNNP\n\ndog\tNN");
  REQUIRE(two.size() == 2);
  CHECK(two[1] == Token{"dog", "NN", 1, 0});

  CHECK(parse_tagged("# header\n\n\nA\tDT\r\n\n\n\nb\tNN\n\n").back().sentence_index == 1);

  for (const char* bad : {"Akita", "\tNN", "Akita\t", "a\tb\tc"}) {
    CAPTURE(bad);
    try {
      parse_tagged(bad);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 1);
    }
  }
  try {
    parse_tagged("a\tDT\n# ok\nbroken\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("parse_tagged round-trips normalized streams") {
  std::mt19937_64 rng(7);
  const std::vector<std::string> words = {"dog", "Akita", "bark", ".", "coat", "well-known"};
  const std::vector<std::string> tags = {"NN", "NNP", "VBP", ".", "NN", "JJ"};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Token> tokens;
    const int sentences = static_cast<int>(rng() % 4);
    for (int s = 0; s < sentences; ++s) {
      const int n = 1 + static_cast<int>(rng() % 5);
      for (int t = 0; t < n; ++t) {
        const auto k = rng() % words.size();
        tokens.push_back({words[k], tags[k], static_cast<std::size_t>(s), static_cast<std::size_t>(t)});
      }
    }
    const auto text = serialize_tagged(tokens);
    CHECK(parse_tagged(text) == tokens);
    CHECK(serialize_tagged(parse_tagged(text)) == text);
  }
  for (const char* name : kFixtures) {
    const auto stream = oracle::slurp(oracle::corpus_dir() / (std::string(name) + ".tsv"));
    const auto normalized = serialize_tagged(parse_tagged(stream));
    CHECK(serialize_tagged(parse_tagged(normalized)) == normalized);
  }
}

TEST_CASE("extract_nouns keeps noun tags in order") {
  const std::vector<Token> toks = {{"Akita", "NNP", 0, 0}, {"dogs", "NNS", 0, 1}, {"bark", "VBP", 0, 2}};
  CHECK(extract_nouns(toks) == std::vector<std::string>{"Akita", "dogs"});
  const std::vector<Token> verbs = {{"run", "VB", 0, 0}, {"ran", "VBD", 0, 1}};
  CHECK(extract_nouns(verbs).empty());
  const std::vector<Token> dup = {{"dog", "NN", 0, 0}, {"dog", "NN", 0, 1}};
  CHECK(extract_nouns(dup) == std::vector<std::string>{"dog", "dog"});
  const std::vector<Token> all = {{"A", "NNPS", 0, 0}, {"b", "NN", 0, 1}, {"c", "JJ", 0, 2}, {"d", "NNP", 0, 3}};
  CHECK(extract_nouns(all).size() == 3);
}

TEST_CASE("lemmatize") {
  CHECK(lemmatize("dogs").str() == "dog");
  CHECK(lemmatize("mice").str() == "mouse");
  CHECK(lemmatize("akita").str() == "akita");
  CHECK(lemmatize("Akitas").str() == "akita");
  CHECK(lemmatize("puppies").str() == "puppy");
  CHECK(lemmatize("wolves").str() == "wolf");
  CHECK(lemmatize("boxes").str() == "box");
  CHECK(lemmatize("churches").str() == "church");
  CHECK(lemmatize("classes").str() == "class");
  CHECK(lemmatize("glass").str() == "glass");
  CHECK(lemmatize("bus").str() == "bus");
  CHECK(lemmatize("children").str() == "child");
  CHECK(lemmatize("exercises").str() == "exercise");
  CHECK(lemmatize("status").str() == "status");
  CHECK_THROWS_AS(lemmatize(""), std::invalid_argument);
}

TEST_CASE("lemmatize is idempotent") {
  std::vector<std::string> words = {"analyses", "atlases", "lives", "mices", "childrens", "series", "ties", "eyes",
                                    "bosses",   "quizzes", "halves", "news", "thesis",   "people", "data", "xes"};
  std::mt19937_64 rng(11);
  const std::string alphabet = "aeioucshxzyvfSI";
  for (int i = 0; i < 5000; ++i) {
    std::string w;
    const auto len = 1 + rng() % 9;
    for (std::size_t k = 0; k < len; ++k) w += alphabet[rng() % alphabet.size()];
    words.push_back(w);
  }
  for (const auto& w : words) {
    CAPTURE(w);
    const Lemma once = lemmatize(w);
    CHECK(lemmatize(once.str()) == once);
  }
}

TEST_CASE("Lemma enforces its invariants") {
  CHECK_THROWS_AS(Lemma(""), std::invalid_argument);
  CHECK_THROWS_AS(Lemma("Dog"), std::invalid_argument);
  CHECK_THROWS_AS(Lemma("hot dog"), std::invalid_argument);
  CHECK(Lemma("dog").str() == "dog");
}

TEST_CASE("build_noun_set composes the pipeline") {
  const std::string text[] = {"Akita dogs. Akita coats."};
  const auto set = build_noun_set("c", text);
  CHECK(lemma_strings(set) == std::vector<std::string>{"akita", "coat", "dog"});
  CHECK(set.provenance.at(Lemma("akita")) == 2);

  const std::string none[] = {"Run quickly!"};
  CHECK(build_noun_set("c", none).empty());

  const std::string docs[] = {"The dog sleeps.", "A dog and a cat."};
  const auto summed = build_noun_set("c", docs);
  CHECK(summed.provenance.at(Lemma("dog")) == 2);
  CHECK(summed.provenance.at(Lemma("cat")) == 1);

  const std::string reversed[] = {docs[1], docs[0]};
  CHECK(build_noun_set("c", reversed) == summed);

  const std::string broken[] = {"dog\tNN\nbroken"};
  CHECK_THROWS_AS(build_noun_set("c", broken, TaggerMode::pretagged), ParseError);
}

TEST_CASE("fixture corpus: both ingestion paths match the hand oracle") {
  const auto oracle_sets = oracle::oracle_lemmas();
  for (const char* name : kFixtures) {
    CAPTURE(name);
    const std::filesystem::path text[] = {oracle::corpus_dir() / (std::string(name) + ".txt")};
    const std::filesystem::path tagged[] = {oracle::corpus_dir() / (std::string(name) + ".tsv")};
    const auto builtin = build_noun_set_from_files(name, text, TaggerMode::builtin);
    const auto pretagged = build_noun_set_from_files(name, tagged, TaggerMode::pretagged);
    CHECK(lemma_strings(builtin) == oracle_sets.at(name).get<std::vector<std::string>>());
    CHECK(builtin == pretagged);
  }
}

TEST_CASE("fixture corpus: builtin tagger reproduces every hand tag") {
  for (const char* name : kFixtures) {
    CAPTURE(name);
    const auto hand = parse_tagged(oracle::slurp(oracle::corpus_dir() / (std::string(name) + ".tsv")));
    const auto auto_tagged = tag_pos(tokenize(oracle::slurp(oracle::corpus_dir() / (std::string(name) + ".txt"))));
    REQUIRE(hand.size() == auto_tagged.size());
    for (std::size_t i = 0; i < hand.size(); ++i) {
      CAPTURE(hand[i].surface);
      CHECK(auto_tagged[i] == hand[i]);
    }
  }
}

TEST_CASE("file errors name the file") {
  const std::filesystem::path missing[] = {"/nonexistent/file.txt"};
  CHECK_THROWS_AS(build_noun_set_from_files("x", missing), IoError);
}

TEST_CASE("noun set JSON") {
  const std::string text[] = {"Akita dogs. Akita coats."};
  const auto set = build_noun_set("customer_1", text);
  const auto j = to_json(set);
  CHECK(j.dump() == R"({"lemmas":["akita","coat","dog"],"owner":"customer_1","provenance":{"akita":2,"coat":1,"dog":1}})");
  CHECK(noun_set_from_json(j) == set);
  auto bad = j;
  bad["lemmas"].push_back("zebra");
  CHECK_THROWS_AS(noun_set_from_json(bad), ConfigError);
}

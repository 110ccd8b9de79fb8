// Runs every primary acceptance criterion once and prints one PASS/FAIL line
// per criterion. Exit status is nonzero if any line fails.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "reqdialog/cli.hpp"
#include "reqdialog/experiment.hpp"
#include "reqdialog/nlp.hpp"
#include "reqdialog/protocol.hpp"

using namespace reqdialog;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  std::string name;
  double budget_seconds;  // 0 means no runtime bound
  std::function<Outcome()> run;
};

const char* const kCustomers[] = {"customer_1", "customer_2", "customer_3"};

LemmaSet to_lemmas(const oracle::StringSet& s) {
  LemmaSet out;
  for (const auto& w : s) out.insert(Lemma(w));
  return out;
}

oracle::StringSet to_strings(const LemmaSet& s) {
  oracle::StringSet out;
  for (const auto& l : s) out.insert(l.str());
  return out;
}

oracle::StringSet oracle_set(const std::string& name) {
  const auto v = oracle::oracle_lemmas().at(name).get<std::vector<std::string>>();
  return {v.begin(), v.end()};
}

bool subset(const oracle::StringSet& a, const oracle::StringSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

oracle::StringSet intersect(const oracle::StringSet& a, const oracle::StringSet& b) {
  oracle::StringSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

ExperimentConfig fixture_config() { return load_config(oracle::source_dir() / "data" / "experiment.json"); }

struct Fixture {
  std::array<NounSet, kCustomerCount> customers;
  NounSet engineer;
};

Fixture load_fixture() {
  const auto dir = oracle::corpus_dir();
  Fixture f;
  for (std::size_t i = 0; i < kCustomerCount; ++i) {
    const std::filesystem::path p[] = {dir / (std::string(kCustomers[i]) + ".txt")};
    f.customers[i] = build_noun_set_from_files(kCustomers[i], p, TaggerMode::builtin);
  }
  const std::filesystem::path e[] = {dir / "engineer.txt"};
  f.engineer = build_noun_set_from_files("engineer", e, TaggerMode::builtin);
  return f;
}

Outcome endpoint_one() {
  const auto fx = load_fixture();
  const auto engineer = fx.engineer.lemmas();
  Outcome o;
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    for (const auto& c : fx.customers) {
      KnowledgeBase kb = KnowledgeBase::from_noun_set(fx.engineer);
      const auto t = run_interaction({c.owner, c, 1.0}, kb, seed);
      if (t.result != engineer) {
        o.pass = false;
        o.detail = c.owner + " seed " + std::to_string(seed) + ": result differs from the engineer set";
        return o;
      }
      ++checked;
    }
  }
  const auto report = run_sweep(fx.customers, fx.engineer, {1.0}, seed_range(100));
  std::size_t ones = 0;
  for (const auto& p : report.pairs) {
    if (p.cosine == 1.0) ++ones;
  }
  o.pass = ones == report.pairs.size() && report.pairs.size() == 300;
  o.detail = std::to_string(checked) + " results equal E; " + std::to_string(ones) + "/" +
             std::to_string(report.pairs.size()) + " pairwise cosines == 1.0";
  return o;
}

Outcome endpoint_zero() {
  const auto fx = load_fixture();
  const auto engineer = oracle_set("engineer");
  std::map<std::string, oracle::StringSet> mutual;
  Outcome o;
  for (const auto& c : fx.customers) {
    mutual[c.owner] = intersect(oracle_set(c.owner), engineer);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      KnowledgeBase kb = KnowledgeBase::from_noun_set(fx.engineer);
      if (to_strings(run_interaction({c.owner, c, 0.0}, kb, seed).result) != mutual[c.owner]) {
        o.pass = false;
        o.detail = c.owner + " seed " + std::to_string(seed) + ": result is not the mutual set";
        return o;
      }
    }
  }
  const auto report = run_sweep(fx.customers, fx.engineer, {0.0}, seed_range(100));
  double worst = 0.0;
  for (const auto& p : report.pairs) {
    worst = std::max(worst, std::abs(p.cosine - oracle::brute_force_cosine(mutual[p.customer_a], mutual[p.customer_b])));
  }
  o.pass = worst <= 1e-12;
  o.detail = "results equal mutual sets; max |cos - oracle| = " + format_number(worst);
  return o;
}

Outcome hypothesis_one() {
  auto cfg = fixture_config();
  cfg.factor_grid = default_factor_grid();
  cfg.seeds = seed_range(100);
  const auto report = run_experiment(cfg);
  const auto v = check_hypothesis_1(report, 0.02);
  Outcome o;
  o.pass = v.pass && v.spearman >= 0.95;
  std::ostringstream d;
  d << "worst drop " << format_number(v.worst_violation) << ", spearman " << format_number(v.spearman) << ", means";
  for (const auto& a : report.aggregates) d << ' ' << std::fixed << std::setprecision(3) << a.mean;
  o.detail = d.str();
  return o;
}

// cos(∅, E) = 0 by convention, so an instance with no mutual nouns and k = 0
// has before = after = 0 even when the customer is not a subset of E. Those
// instances are checked for equality and counted rather than for strictness.
Outcome hypothesis_two() {
  std::mt19937_64 rng(20240501);
  std::uniform_real_distribution<double> factor(0.0, 1.0);
  Outcome o;
  std::size_t strict = 0;
  std::size_t equal_corner = 0;
  double worst_oracle = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto customer = oracle::random_subset(rng, 30, 0.1 + 0.5 * factor(rng));
    auto engineer = oracle::random_subset(rng, 30, 0.1 + 0.5 * factor(rng));
    if (engineer.empty()) engineer.insert("w00");
    const double c = i % 10 == 0 ? 0.0 : factor(rng);
    const std::uint64_t seed = rng();

    const auto mutual = intersect(customer, engineer);
    const std::size_t k = static_cast<std::size_t>(std::floor(c * static_cast<double>(engineer.size() - mutual.size()) + 0.5));
    const auto result = compose_interaction_result(to_lemmas(customer), to_lemmas(engineer), c, seed);
    const auto cos = learning_cosines(to_lemmas(customer), to_lemmas(engineer), result, to_lemmas(engineer));

    auto after_set = engineer;
    for (const auto& l : result) after_set.insert(l.str());
    worst_oracle = std::max({worst_oracle, std::abs(cos.before - oracle::brute_force_cosine(customer, engineer)),
                             std::abs(cos.after - oracle::brute_force_cosine(to_strings(result), after_set))});

    const bool not_subset = !subset(customer, engineer);
    if (cos.after < cos.before) {
      o.pass = false;
      o.detail = "instance " + std::to_string(i) + ": after < before";
      return o;
    }
    if ((not_subset && !mutual.empty()) || k > 0) {
      if (!(cos.after > cos.before)) {
        o.pass = false;
        o.detail = "instance " + std::to_string(i) + ": equality where strict increase is required";
        return o;
      }
      ++strict;
    } else if (not_subset) {
      if (cos.before != 0.0 || cos.after != 0.0) {
        o.pass = false;
        o.detail = "instance " + std::to_string(i) + ": empty-mutual corner is not 0 = 0";
        return o;
      }
      ++equal_corner;
    }
  }
  o.pass = worst_oracle <= 1e-12;
  o.detail = "1000 instances, " + std::to_string(strict) + " strict, " + std::to_string(equal_corner) +
             " with M=∅,k=0 at 0=0; max |cos - oracle| = " + format_number(worst_oracle);
  return o;
}

Outcome formula_identities() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> factor(0.0, 1.0);
  Outcome o;
  for (int i = 0; i < 1000; ++i) {
    const auto customer = oracle::random_subset(rng, 40, factor(rng));
    const auto engineer = oracle::random_subset(rng, 40, factor(rng));
    double c1 = factor(rng);
    double c2 = factor(rng);
    if (c1 > c2) std::swap(c1, c2);
    const std::uint64_t seed = rng();
    const auto mutual = intersect(customer, engineer);
    const auto additional = engineer.size() - mutual.size();

    const auto r1 = to_strings(compose_interaction_result(to_lemmas(customer), to_lemmas(engineer), c1, seed));
    const auto r2 = to_strings(compose_interaction_result(to_lemmas(customer), to_lemmas(engineer), c2, seed));
    const auto expected = mutual.size() + static_cast<std::size_t>(std::floor(c1 * static_cast<double>(additional) + 0.5));
    std::string failed;
    if (r1.size() != expected) failed = "cardinality";
    else if (!subset(mutual, r1) || !subset(r1, engineer)) failed = "mutual ⊆ result ⊆ engineer";
    else if (!subset(r1, r2)) failed = "nestedness";
    if (!failed.empty()) {
      o.pass = false;
      o.detail = "instance " + std::to_string(i) + ": " + failed;
      return o;
    }
  }
  o.detail = "1000 instances: cardinality, containment and nestedness hold";
  return o;
}

Outcome nlp_fixtures() {
  const auto dir = oracle::corpus_dir();
  const auto oracle = oracle::oracle_lemmas();
  Outcome o;
  oracle::StringSet vocabulary;
  std::size_t surfaces = 0;
  for (const auto& [name, expected] : oracle.items()) {
    const std::filesystem::path txt[] = {dir / (name + ".txt")};
    const std::filesystem::path tsv[] = {dir / (name + ".tsv")};
    const auto built = build_noun_set_from_files(name, txt, TaggerMode::builtin);
    const auto tagged = build_noun_set_from_files(name, tsv, TaggerMode::pretagged);
    const auto want = expected.get<std::vector<std::string>>();
    const oracle::StringSet want_set(want.begin(), want.end());
    if (to_strings(built.lemmas()) != want_set || to_strings(tagged.lemmas()) != want_set) {
      o.pass = false;
      o.detail = name + ": extracted lemmas differ from the oracle set";
      return o;
    }
    vocabulary.insert(want.begin(), want.end());
    for (const auto& t : parse_tagged(read_text_file(tsv[0]))) {
      const auto once = lemmatize(t.surface);
      if (lemmatize(once.str()) != once) {
        o.pass = false;
        o.detail = "lemmatize is not idempotent on '" + t.surface + "'";
        return o;
      }
      ++surfaces;
    }
  }
  for (const auto& w : vocabulary) {
    if (lemmatize(w).str() != w) {
      o.pass = false;
      o.detail = "oracle lemma '" + w + "' is not a fixed point";
      return o;
    }
  }
  o.detail = std::to_string(oracle.size()) + " texts match via both tagger modes; idempotent on " +
             std::to_string(surfaces) + " surfaces and " + std::to_string(vocabulary.size()) + " lemmas";
  return o;
}

Outcome determinism() {
  const auto base = std::filesystem::temp_directory_path() / "reqdialog_acceptance_determinism";
  std::filesystem::remove_all(base);
  const auto config = (oracle::source_dir() / "data" / "experiment.json").string();
  for (const char* run : {"a", "b"}) {
    const std::string out_dir = (base / run).string();
    const char* argv[] = {"reqdialog", "run", "--config", config.c_str(), "--out-dir", out_dir.c_str()};
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(6, argv, out, err);
    if (code != kExitOk) return {false, std::string("run exited ") + std::to_string(code) + ": " + err.str()};
  }
  Outcome o;
  std::size_t bytes = 0;
  for (const char* f : {"pairs.csv", "h2.csv", "aggregate.json", "curve.tsv", "report.json"}) {
    const auto a = oracle::slurp(base / "a" / f);
    const auto b = oracle::slurp(base / "b" / f);
    if (a.empty() || a != b) {
      o.pass = false;
      o.detail = std::string(f) + " differs between runs";
      return o;
    }
    bytes += a.size();
  }
  std::filesystem::remove_all(base);
  o.detail = "5 files, " + std::to_string(bytes) + " bytes identical";
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"endpoint c=1: every pairwise cosine is exactly 1", 1.0, endpoint_one},
      {"endpoint c=0: results are the mutual sets, cosines match oracle", 1.0, endpoint_zero},
      {"hypothesis 1: rising curve within slack 0.02, spearman >= 0.95", 60.0, hypothesis_one},
      {"hypothesis 2: similarity never drops, strict where it must rise", 5.0, hypothesis_two},
      {"formula identities: size, containment, nestedness", 5.0, formula_identities},
      {"nlp fixtures: oracle lemma sets and lemmatizer idempotence", 1.0, nlp_fixtures},
      {"determinism: two runs give byte-identical reports", 0.0, determinism},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.budget_seconds == 0.0 || seconds < c.budget_seconds;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;

    char timing[64];
    if (c.budget_seconds > 0.0) {
      std::snprintf(timing, sizeof timing, "%.3fs / %.0fs", seconds, c.budget_seconds);
    } else {
      std::snprintf(timing, sizeof timing, "%.3fs", seconds);
    }
    std::cout << (pass ? "PASS" : "FAIL") << "  " << c.name << "  [" << timing << "]  " << o.detail
              << (in_time ? "" : "  (over time budget)") << '\n';
  }
  std::cout << (criteria.size() - failures) << '/' << criteria.size() << " criteria passed\n";
  return failures == 0 ? 0 : 1;
}

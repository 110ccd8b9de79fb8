#include "reqdialog/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <numeric>
#include <sstream>

#include "reqdialog/concept_space.hpp"
#include "reqdialog/errors.hpp"

namespace reqdialog {

namespace {

constexpr std::array<std::pair<std::size_t, std::size_t>, 3> kPairs = {{{0, 1}, {0, 2}, {1, 2}}};

std::string customer_name(std::size_t i) { return "customer_" + std::to_string(i + 1); }

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[v & 0xf];
    v >>= 4;
  }
  return out;
}

std::vector<std::filesystem::path> resolve(const std::vector<std::string>& sources,
                                           const std::filesystem::path& base) {
  std::vector<std::filesystem::path> out;
  for (const auto& s : sources) {
    std::filesystem::path p(s);
    out.push_back(p.is_absolute() ? p : base / p);
  }
  return out;
}

struct Cell {
  std::vector<PairRecord> pairs;
  std::vector<H2Record> h2;
};

Cell run_cell(const std::array<LemmaSet, kCustomerCount>& customers, const KnowledgeBase& engineer_template,
              double factor, std::uint64_t seed) {
  Cell cell;
  std::array<LemmaSet, kCustomerCount> results;
  for (std::size_t i = 0; i < kCustomerCount; ++i) {
    KnowledgeBase kb = engineer_template;
    kb.reset();
    const LemmaSet before = kb.lemmas();
    Customer customer{customer_name(i), {}, factor};
    for (const auto& l : customers[i]) customer.nouns.provenance.emplace(l, 1);
    auto transcript = run_interaction(customer, kb, seed);
    results[i] = std::move(transcript.result);
    const auto cos = learning_cosines(customers[i], before, results[i], kb.lemmas());
    cell.h2.push_back({factor, seed, customer.id, cos.before, cos.after});
  }
  for (auto [a, b] : kPairs) {
    cell.pairs.push_back({factor, seed, customer_name(a), customer_name(b), set_cosine(results[a], results[b])});
  }
  return cell;
}

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  out.flush();
  if (!out) throw IoError("error writing " + path.string());
}

}  // namespace

std::vector<double> default_factor_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(i / 10.0);
  return grid;
}

std::vector<std::uint64_t> seed_range(std::uint64_t count) {
  std::vector<std::uint64_t> seeds(count);
  std::iota(seeds.begin(), seeds.end(), std::uint64_t{0});
  return seeds;
}

void ExperimentConfig::validate() const {
  for (std::size_t i = 0; i < kCustomerCount; ++i) {
    if (customer_sources[i].empty()) throw ConfigError(customer_name(i) + " has no source documents");
  }
  if (engineer_source.empty()) throw ConfigError("engineer has no source documents");
  if (factor_grid.empty()) throw ConfigError("factor_grid is empty");
  for (std::size_t i = 0; i < factor_grid.size(); ++i) {
    const double c = factor_grid[i];
    if (!(c >= 0.0 && c <= 1.0)) throw ConfigError("factor_grid value outside [0, 1]: " + format_number(c));
    if (i > 0 && !(factor_grid[i - 1] < c)) throw ConfigError("factor_grid must be strictly ascending");
  }
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (!(reaction_threshold > 0.0 && reaction_threshold < 1.0)) {
    throw ConfigError("reaction_threshold must lie in (0, 1)");
  }
}

nlohmann::json ExperimentConfig::to_json() const {
  auto customers = nlohmann::json::array();
  for (const auto& c : customer_sources) customers.push_back(c);
  return {{"customer_sources", customers},     {"engineer_source", engineer_source},
          {"factor_grid", factor_grid},        {"seeds", seeds},
          {"tagger_mode", std::string(reqdialog::to_string(tagger_mode))},
          {"reaction_threshold", reaction_threshold}};
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a(to_json().dump()); }

ExperimentConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  ExperimentConfig cfg;
  cfg.base_dir = base_dir;
  try {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    const auto& customers = j.at("customer_sources");
    if (!customers.is_array() || customers.size() != kCustomerCount) {
      throw ConfigError("customer_sources must list exactly three document sets");
    }
    for (std::size_t i = 0; i < kCustomerCount; ++i) {
      cfg.customer_sources[i] = customers[i].get<std::vector<std::string>>();
    }
    cfg.engineer_source = j.at("engineer_source").get<std::vector<std::string>>();
    if (j.contains("factor_grid")) cfg.factor_grid = j["factor_grid"].get<std::vector<double>>();
    const auto& seeds = j.at("seeds");
    if (seeds.is_number_unsigned()) {
      cfg.seeds = seed_range(seeds.get<std::uint64_t>());
    } else {
      cfg.seeds = seeds.get<std::vector<std::uint64_t>>();
    }
    if (j.contains("tagger_mode")) cfg.tagger_mode = parse_tagger_mode(j["tagger_mode"].get<std::string>());
    if (j.contains("reaction_threshold")) cfg.reaction_threshold = j["reaction_threshold"].get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  try {
    return config_from_json(j, path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

ExperimentReport run_sweep(const std::array<NounSet, kCustomerCount>& customers, const NounSet& engineer,
                           const std::vector<double>& factor_grid, const std::vector<std::uint64_t>& seeds) {
  for (double c : factor_grid) require_cooperation_factor(c);
  const KnowledgeBase engineer_kb = KnowledgeBase::from_noun_set(engineer);
  if (engineer_kb.empty()) throw DomainError("engineer noun set is empty");
  std::array<LemmaSet, kCustomerCount> customer_lemmas;
  for (std::size_t i = 0; i < kCustomerCount; ++i) customer_lemmas[i] = customers[i].lemmas();

  // One task per factor; results are merged in grid order.
  std::vector<std::future<std::vector<Cell>>> tasks;
  for (double factor : factor_grid) {
    tasks.push_back(std::async(std::launch::async, [&, factor] {
      std::vector<Cell> cells;
      for (auto seed : seeds) cells.push_back(run_cell(customer_lemmas, engineer_kb, factor, seed));
      return cells;
    }));
  }

  ExperimentReport report;
  for (std::size_t f = 0; f < factor_grid.size(); ++f) {
    std::vector<double> values;
    for (auto& cell : tasks[f].get()) {
      for (auto& p : cell.pairs) {
        values.push_back(p.cosine);
        report.pairs.push_back(std::move(p));
      }
      for (auto& h : cell.h2) report.h2_records.push_back(std::move(h));
    }
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    report.aggregates.push_back({factor_grid[f], mean, std::sqrt(var / n), values.size()});
  }

  std::vector<NounSet> all(customers.begin(), customers.end());
  all.push_back(engineer);
  report.metadata.vocabulary_size = Vocabulary::build(all).size();
  for (std::size_t i = 0; i < kCustomerCount; ++i) report.metadata.noun_set_sizes[customer_name(i)] = customers[i].size();
  report.metadata.noun_set_sizes[std::string(kEngineerId)] = engineer.size();
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  std::array<NounSet, kCustomerCount> customers;
  for (std::size_t i = 0; i < kCustomerCount; ++i) {
    const auto paths = resolve(config.customer_sources[i], config.base_dir);
    customers[i] = build_noun_set_from_files(customer_name(i), paths, config.tagger_mode);
  }
  const auto engineer_paths = resolve(config.engineer_source, config.base_dir);
  const NounSet engineer = build_noun_set_from_files(std::string(kEngineerId), engineer_paths, config.tagger_mode);
  auto report = run_sweep(customers, engineer, config.factor_grid, config.seeds);
  report.metadata.config_hash = hex64(config.hash());
  return report;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) return 0.0;
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

Hypothesis1Verdict check_hypothesis_1(const std::vector<FactorAggregate>& aggregates, double slack) {
  Hypothesis1Verdict v;
  std::vector<double> factors;
  std::vector<double> means;
  for (const auto& a : aggregates) {
    factors.push_back(a.factor);
    means.push_back(a.mean);
  }
  bool trend_ok = true;
  for (std::size_t i = 1; i < means.size(); ++i) {
    const double drop = means[i - 1] - means[i];
    v.worst_violation = std::max(v.worst_violation, drop);
    if (drop > slack) trend_ok = false;
  }
  for (const auto& a : aggregates) {
    if (a.factor == 1.0 && std::abs(a.mean - 1.0) > 1e-12) v.endpoint_ok = false;
  }
  v.spearman = spearman(factors, means);
  v.pass = trend_ok && v.endpoint_ok;
  return v;
}

Hypothesis1Verdict check_hypothesis_1(const ExperimentReport& report, double slack) {
  return check_hypothesis_1(report.aggregates, slack);
}

Hypothesis2Verdict check_hypothesis_2(const ExperimentReport& report) {
  Hypothesis2Verdict v;
  v.vacuous = report.h2_records.empty();
  for (const auto& r : report.h2_records) {
    if (r.cos_after < r.cos_before) v.counterexamples.push_back(r);
  }
  v.pass = v.counterexamples.empty();
  return v;
}

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string pairs_csv(const ExperimentReport& report) {
  std::string out = "factor,seed,customer_a,customer_b,cosine\n";
  for (const auto& p : report.pairs) {
    out += format_number(p.factor) + ',' + std::to_string(p.seed) + ',' + p.customer_a + ',' + p.customer_b + ',' +
           format_number(p.cosine) + '\n';
  }
  return out;
}

std::string h2_csv(const ExperimentReport& report) {
  std::string out = "factor,seed,customer,cos_before,cos_after\n";
  for (const auto& h : report.h2_records) {
    out += format_number(h.factor) + ',' + std::to_string(h.seed) + ',' + h.customer + ',' +
           format_number(h.cos_before) + ',' + format_number(h.cos_after) + '\n';
  }
  return out;
}

nlohmann::json aggregate_json(const ExperimentReport& report) {
  auto arr = nlohmann::json::array();
  for (const auto& a : report.aggregates) {
    arr.push_back({{"factor", a.factor}, {"mean", a.mean}, {"stddev", a.stddev}, {"n", a.n}});
  }
  return arr;
}

std::string curve_tsv(const ExperimentReport& report) {
  std::string out = "# factor\tmean\tstddev\tn\n";
  for (const auto& a : report.aggregates) {
    out += format_number(a.factor) + '\t' + format_number(a.mean) + '\t' + format_number(a.stddev) + '\t' +
           std::to_string(a.n) + '\n';
  }
  return out;
}

nlohmann::json to_json(const ExperimentReport& report) {
  auto pairs = nlohmann::json::array();
  for (const auto& p : report.pairs) {
    pairs.push_back({{"factor", p.factor}, {"seed", p.seed}, {"customer_a", p.customer_a},
                     {"customer_b", p.customer_b}, {"cosine", p.cosine}});
  }
  auto h2 = nlohmann::json::array();
  for (const auto& h : report.h2_records) {
    h2.push_back({{"factor", h.factor}, {"seed", h.seed}, {"customer", h.customer},
                  {"cos_before", h.cos_before}, {"cos_after", h.cos_after}});
  }
  return {{"pairs", pairs},
          {"aggregates", aggregate_json(report)},
          {"h2_records", h2},
          {"metadata",
           {{"vocabulary_size", report.metadata.vocabulary_size},
            {"noun_set_sizes", report.metadata.noun_set_sizes},
            {"config_hash", report.metadata.config_hash}}}};
}

ExperimentReport report_from_json(const nlohmann::json& j) {
  ExperimentReport r;
  try {
    for (const auto& p : j.at("pairs")) {
      r.pairs.push_back({p.at("factor").get<double>(), p.at("seed").get<std::uint64_t>(),
                         p.at("customer_a").get<std::string>(), p.at("customer_b").get<std::string>(),
                         p.at("cosine").get<double>()});
    }
    for (const auto& a : j.at("aggregates")) {
      r.aggregates.push_back({a.at("factor").get<double>(), a.at("mean").get<double>(),
                              a.at("stddev").get<double>(), a.at("n").get<std::size_t>()});
    }
    for (const auto& h : j.at("h2_records")) {
      r.h2_records.push_back({h.at("factor").get<double>(), h.at("seed").get<std::uint64_t>(),
                              h.at("customer").get<std::string>(), h.at("cos_before").get<double>(),
                              h.at("cos_after").get<double>()});
    }
    const auto& m = j.at("metadata");
    r.metadata.vocabulary_size = m.at("vocabulary_size").get<std::size_t>();
    r.metadata.noun_set_sizes = m.at("noun_set_sizes").get<std::map<std::string, std::size_t>>();
    r.metadata.config_hash = m.at("config_hash").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid report: ") + e.what());
  }
  return r;
}

std::vector<std::filesystem::path> emit_report(const ExperimentReport& report, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  const std::vector<std::pair<std::string, std::string>> files = {
      {"pairs.csv", pairs_csv(report)},
      {"h2.csv", h2_csv(report)},
      {"aggregate.json", aggregate_json(report).dump(2) + "\n"},
      {"curve.tsv", curve_tsv(report)},
      {"report.json", to_json(report).dump() + "\n"},
  };
  std::vector<std::filesystem::path> written;
  for (const auto& [name, content] : files) {
    written.push_back(out_dir / name);
    write_file(written.back(), content);
  }
  return written;
}

}  // namespace reqdialog

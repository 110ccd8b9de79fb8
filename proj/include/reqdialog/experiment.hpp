#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "reqdialog/nlp.hpp"
#include "reqdialog/protocol.hpp"

namespace reqdialog {

inline constexpr std::size_t kCustomerCount = 3;
inline constexpr double kDefaultTrendSlack = 0.02;

/// 0.0, 0.1, ..., 1.0 computed as i/10 so every point prints exactly.
std::vector<double> default_factor_grid();

struct ExperimentConfig {
  /// Source paths as written in the config; resolved against `base_dir`.
  std::array<std::vector<std::string>, kCustomerCount> customer_sources;
  std::vector<std::string> engineer_source;
  std::vector<double> factor_grid = default_factor_grid();
  std::vector<std::uint64_t> seeds;
  TaggerMode tagger_mode = TaggerMode::builtin;
  double reaction_threshold = kDefaultReactionThreshold;
  std::filesystem::path base_dir;

  /// Throws ConfigError.
  void validate() const;
  /// Canonical JSON without base_dir; the config hash is taken over this.
  nlohmann::json to_json() const;
  std::uint64_t hash() const;
};

std::vector<std::uint64_t> seed_range(std::uint64_t count);

/// "seeds" may be a count N (seeds 0..N-1) or an explicit array.
ExperimentConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

struct PairRecord {
  double factor;
  std::uint64_t seed;
  std::string customer_a;
  std::string customer_b;
  double cosine;

  bool operator==(const PairRecord&) const = default;
};

struct FactorAggregate {
  double factor;
  double mean;
  double stddev;  // population
  std::size_t n;

  bool operator==(const FactorAggregate&) const = default;
};

struct H2Record {
  double factor;
  std::uint64_t seed;
  std::string customer;
  double cos_before;
  double cos_after;

  bool operator==(const H2Record&) const = default;
};

struct ReportMetadata {
  std::size_t vocabulary_size = 0;
  std::map<std::string, std::size_t> noun_set_sizes;
  std::string config_hash;

  bool operator==(const ReportMetadata&) const = default;
};

struct ExperimentReport {
  std::vector<PairRecord> pairs;
  std::vector<FactorAggregate> aggregates;
  std::vector<H2Record> h2_records;
  ReportMetadata metadata;

  bool operator==(const ExperimentReport&) const = default;
};

/// Reads and extracts every source, then runs the sweep.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// The sweep over already-built noun sets. Each (factor, seed, customer)
/// interaction runs against a fresh copy of the engineer's initial state.
ExperimentReport run_sweep(const std::array<NounSet, kCustomerCount>& customers, const NounSet& engineer,
                           const std::vector<double>& factor_grid, const std::vector<std::uint64_t>& seeds);

struct Hypothesis1Verdict {
  bool pass = false;
  double worst_violation = 0.0;  // largest drop between adjacent grid points
  double spearman = 0.0;
  bool endpoint_ok = true;  // mean at factor 1 equals 1, when 1 is on the grid
};

Hypothesis1Verdict check_hypothesis_1(const std::vector<FactorAggregate>& aggregates,
                                      double slack = kDefaultTrendSlack);
Hypothesis1Verdict check_hypothesis_1(const ExperimentReport& report, double slack = kDefaultTrendSlack);

struct Hypothesis2Verdict {
  bool pass = false;
  bool vacuous = false;
  std::vector<H2Record> counterexamples;
};

Hypothesis2Verdict check_hypothesis_2(const ExperimentReport& report);

/// Spearman rank correlation with average ranks for ties. 0 when either
/// side is constant.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

/// Shortest round-trip decimal form of a double.
std::string format_number(double v);

std::string pairs_csv(const ExperimentReport& report);
std::string h2_csv(const ExperimentReport& report);
nlohmann::json aggregate_json(const ExperimentReport& report);
/// Tab-separated "factor mean stddev n" rows for plotting the trend curve.
std::string curve_tsv(const ExperimentReport& report);

nlohmann::json to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const nlohmann::json& j);

/// Writes pairs.csv, h2.csv, aggregate.json, curve.tsv and report.json into
/// `out_dir`, creating it if needed. Throws IoError with the failing path.
std::vector<std::filesystem::path> emit_report(const ExperimentReport& report, const std::filesystem::path& out_dir);

}  // namespace reqdialog

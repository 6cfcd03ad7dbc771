#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "cfmcast/oracle.hpp"

namespace cfmcast {

struct BenchConfig {
  GeometryConfig geometry;
  LargeScaleParams large_scale;
  Objective variant = Objective::kMmf;
  double p_max_w = 1.0;     // per-AP budget
  double gamma_c = 255.0;   // common SNR target (QoS / sum-power)
  SolverConfig solver = SolverConfig::defaults_for(Objective::kMmf);
  SeaConfig sea;
  int samples = 200;
  std::uint64_t base_seed = 1;
  std::string out_prefix = "results";

  void validate() const;
  [[nodiscard]] Vec per_ap_budgets() const {
    return Vec::Constant(geometry.num_aps, p_max_w);
  }

  static BenchConfig from_json(const std::string& text);
  [[nodiscard]] std::string to_json() const;
  [[nodiscard]] std::string digest() const;  // FNV-1a of the canonical JSON
};

struct SampleRecord {
  int sample_id = 0;
  std::uint64_t seed = 0;
  Objective variant = Objective::kMmf;
  int num_ues = 0;
  int num_aps = 0;
  int num_antennas = 0;
  double objective = 0.0;
  double sdr_bound = 0.0;
  double gap_rel = 0.0;
  int sea_rounds = 0;
  int outer_iters_total = 0;
  double min_se = 0.0;
  double total_power_w = 0.0;
  double max_per_ap_power_w = 0.0;
  std::string certificate;   // verdict name
  double wall_time_s = 0.0;
};

struct BatchSummary {
  int n_samples = 0;
  double certified_rate = 0.0;
  int failed_solves = 0;
  // metric -> {p5, p25, p50, p75, p95}
  std::map<std::string, std::map<std::string, double>> quantiles;
};

/// SE_k = log2(1 + |h_k^H w|^2 / sigma_k^2) per UE.
Vec compute_se(const VecC& beamformer, const NetworkRealization& net);

SampleRecord run_sample(const BenchConfig& cfg, int sample_id);

std::vector<SampleRecord> run_batch(const BenchConfig& cfg);

BatchSummary summarize(const std::vector<SampleRecord>& records);

std::string csv_header();
void write_csv(std::ostream& os, const std::vector<SampleRecord>& records);
std::vector<SampleRecord> read_csv(std::istream& is);
std::string summary_json(const BenchConfig& cfg,
                         const std::vector<SampleRecord>& records);

/// Writes <prefix>.csv and <prefix>_summary.json.
void emit_results(const BenchConfig& cfg,
                  const std::vector<SampleRecord>& records);

int cli_main(int argc, const char* const* argv);

/// Quantile with linear interpolation, q in [0, 1].
double quantile(std::vector<double> values, double q);

/// Worker count: CFMCAST_THREADS env var, else hardware concurrency.
int worker_count();

}  // namespace cfmcast

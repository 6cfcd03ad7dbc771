#include "cfmcast/bench.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>

#include "cfmcast/io.hpp"
#include "cfmcast/rng.hpp"

namespace cfmcast {

using nlohmann::json;

namespace {

Objective parse_variant(const std::string& name) {
  if (name == "mmf") return Objective::kMmf;
  if (name == "qos") return Objective::kQos;
  if (name == "sumpower") return Objective::kSumPower;
  throw std::invalid_argument("unknown variant: " + name);
}

}  // namespace

void BenchConfig::validate() const {
  geometry.validate();
  large_scale.validate();
  solver.validate();
  sea.validate();
  if (samples < 1) throw std::invalid_argument("samples >= 1");
  if (p_max_w <= 0.0) throw std::invalid_argument("p_max_w > 0");
  if (variant != Objective::kMmf && gamma_c <= 0.0) {
    throw std::invalid_argument("gamma_c > 0");
  }
}

BenchConfig BenchConfig::from_json(const std::string& text) {
  const json doc = json::parse(text);
  BenchConfig cfg;
  if (doc.contains("geometry")) {
    const json& g = doc["geometry"];
    cfg.geometry.side_length = g.value("side_length_m", cfg.geometry.side_length);
    cfg.geometry.num_aps = g.value("num_aps", cfg.geometry.num_aps);
    cfg.geometry.antennas_per_ap =
        g.value("antennas_per_ap", cfg.geometry.antennas_per_ap);
    cfg.geometry.num_ues = g.value("num_ues", cfg.geometry.num_ues);
    cfg.geometry.wavelength_spacing =
        g.value("wavelength_spacing", cfg.geometry.wavelength_spacing);
    cfg.geometry.angular_spread_deg =
        g.value("angular_spread_deg", cfg.geometry.angular_spread_deg);
    cfg.geometry.min_access_distance_m =
        g.value("min_access_distance_m", cfg.geometry.min_access_distance_m);
  }
  if (doc.contains("large_scale")) {
    const json& p = doc["large_scale"];
    LargeScaleParams& ls = cfg.large_scale;
    ls.pathloss_intercept_db =
        p.value("pathloss_intercept_db", ls.pathloss_intercept_db);
    ls.pathloss_slope_db = p.value("pathloss_slope_db", ls.pathloss_slope_db);
    ls.shadow_std_db = p.value("shadow_std_db", ls.shadow_std_db);
    ls.shadow_decorrelation_m =
        p.value("shadow_decorrelation_m", ls.shadow_decorrelation_m);
    ls.noise_power_dbm = p.value("noise_power_dbm", ls.noise_power_dbm);
  }
  cfg.variant = parse_variant(doc.value("variant", "mmf"));
  cfg.p_max_w = doc.value("p_max_w", cfg.p_max_w);
  cfg.gamma_c = doc.value("gamma_c", cfg.gamma_c);
  cfg.solver = SolverConfig::defaults_for(cfg.variant);
  if (doc.contains("solver")) {
    const json& s = doc["solver"];
    cfg.solver.rho = s.value("rho", cfg.solver.rho);
    cfg.solver.mu_snr = s.value("mu_s", cfg.solver.mu_snr);
    cfg.solver.mu_power = s.value("mu_p", cfg.solver.mu_power);
    cfg.solver.eps_dual = s.value("eps_dual", cfg.solver.eps_dual);
    cfg.solver.eps_prim = s.value("eps_prim", cfg.solver.eps_prim);
    cfg.solver.inner_iters = s.value("inner_iters", cfg.solver.inner_iters);
    cfg.solver.max_outer = s.value("max_outer", cfg.solver.max_outer);
  }
  if (doc.contains("sea")) {
    const json& s = doc["sea"];
    if (s.contains("zeta") && s["zeta"].is_number()) {
      cfg.sea.zeta = s["zeta"].get<double>();
    }
    cfg.sea.rank_tol = s.value("rank_tol", cfg.sea.rank_tol);
    cfg.sea.max_rounds = s.value("max_rounds", cfg.sea.max_rounds);
  }
  cfg.samples = doc.value("samples", cfg.samples);
  cfg.base_seed = doc.value("base_seed", cfg.base_seed);
  cfg.out_prefix = doc.value("out", cfg.out_prefix);
  cfg.validate();
  return cfg;
}

std::string BenchConfig::to_json() const {
  json doc;
  doc["geometry"] = {{"side_length_m", geometry.side_length},
                     {"num_aps", geometry.num_aps},
                     {"antennas_per_ap", geometry.antennas_per_ap},
                     {"num_ues", geometry.num_ues},
                     {"wavelength_spacing", geometry.wavelength_spacing},
                     {"angular_spread_deg", geometry.angular_spread_deg},
                     {"min_access_distance_m", geometry.min_access_distance_m}};
  doc["large_scale"] = {
      {"pathloss_intercept_db", large_scale.pathloss_intercept_db},
      {"pathloss_slope_db", large_scale.pathloss_slope_db},
      {"shadow_std_db", large_scale.shadow_std_db},
      {"shadow_decorrelation_m", large_scale.shadow_decorrelation_m},
      {"noise_power_dbm", large_scale.noise_power_dbm}};
  doc["variant"] = objective_name(variant);
  doc["p_max_w"] = p_max_w;
  doc["gamma_c"] = gamma_c;
  doc["solver"] = {{"rho", solver.rho},         {"mu_s", solver.mu_snr},
                   {"mu_p", solver.mu_power},   {"eps_dual", solver.eps_dual},
                   {"eps_prim", solver.eps_prim},
                   {"inner_iters", solver.inner_iters},
                   {"max_outer", solver.max_outer}};
  json sea_json = {{"rank_tol", sea.rank_tol}, {"max_rounds", sea.max_rounds}};
  if (sea.zeta) {
    sea_json["zeta"] = *sea.zeta;
  } else {
    sea_json["zeta"] = "auto";
  }
  doc["sea"] = sea_json;
  doc["samples"] = samples;
  doc["base_seed"] = base_seed;
  doc["out"] = out_prefix;
  return doc.dump(2);
}

std::string BenchConfig::digest() const {
  const std::string text = to_json();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char ch : text) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Vec compute_se(const VecC& beamformer, const NetworkRealization& net) {
  Vec se(net.num_ues);
  for (int k = 0; k < net.num_ues; ++k) {
    const std::complex<double> gain =
        net.stacked_channel(k).adjoint() * beamformer;
    se(k) = std::log2(1.0 + std::norm(gain) / net.noise_var(k));
  }
  return se;
}

SampleRecord run_sample(const BenchConfig& cfg, int sample_id) {
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t seed = cfg.base_seed + sample_id;
  const NetworkRealization net =
      generate_network(cfg.geometry, cfg.large_scale, seed);

  SdpProblem prob;
  const Vec budgets = cfg.per_ap_budgets();
  switch (cfg.variant) {
    case Objective::kMmf:
      prob = SdpProblem::mmf(net, budgets);
      break;
    case Objective::kQos:
      prob = SdpProblem::qos(net, budgets,
                             Vec::Constant(net.num_ues, cfg.gamma_c));
      break;
    case Objective::kSumPower:
      prob = SdpProblem::qos(net, budgets,
                             Vec::Constant(net.num_ues, cfg.gamma_c))
                 .sum_power_variant();
      break;
  }

  const SolveReport report = run_sea(prob, cfg.solver, cfg.sea);
  const Certificate cert =
      certify(report.final_problem, report.final_state, cfg.solver.rho);

  SampleRecord rec;
  rec.sample_id = sample_id;
  rec.seed = seed;
  rec.variant = cfg.variant;
  rec.num_ues = net.num_ues;
  rec.num_aps = net.num_aps;
  rec.num_antennas = net.num_antennas;
  rec.objective = report.objective;
  rec.sdr_bound = report.sdr_bound;
  rec.gap_rel = cert.gap_rel;
  rec.sea_rounds = report.sea_rounds;
  rec.outer_iters_total = report.total_outer_iters;
  rec.min_se = report.min_se;
  rec.total_power_w = report.per_ap_power.sum();
  rec.max_per_ap_power_w = report.per_ap_power.maxCoeff();
  rec.certificate = report.converged && report.rank_one
                        ? verdict_name(cert.verdict)
                        : (report.converged ? "not_rank_one" : "not_converged");
  rec.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return rec;
}

int worker_count() {
  if (const char* env = std::getenv("CFMCAST_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

std::vector<SampleRecord> run_batch(const BenchConfig& cfg) {
  cfg.validate();
  std::vector<SampleRecord> records(cfg.samples);
  std::vector<char> failed(cfg.samples, 0);
  std::atomic<int> next{0};
  const int workers = std::min(worker_count(), cfg.samples);

  const auto work = [&]() {
    for (int idx = next.fetch_add(1); idx < cfg.samples;
         idx = next.fetch_add(1)) {
      try {
        records[idx] = run_sample(cfg, idx);
      } catch (const std::exception& e) {
        SampleRecord rec;
        rec.sample_id = idx;
        rec.seed = cfg.base_seed + idx;
        rec.variant = cfg.variant;
        rec.certificate = "solver_error";
        records[idx] = rec;
        failed[idx] = 1;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  std::sort(records.begin(), records.end(),
            [](const SampleRecord& a, const SampleRecord& b) {
              return a.sample_id < b.sample_id;
            });
  return records;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double pos = q * (values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - lo;
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

BatchSummary summarize(const std::vector<SampleRecord>& records) {
  BatchSummary summary;
  summary.n_samples = static_cast<int>(records.size());
  int certified = 0;
  std::map<std::string, std::vector<double>> metrics;
  for (const SampleRecord& rec : records) {
    if (rec.certificate == "certified") ++certified;
    if (rec.certificate == "solver_error") ++summary.failed_solves;
    metrics["objective"].push_back(rec.objective);
    metrics["min_se"].push_back(rec.min_se);
    metrics["total_power_w"].push_back(rec.total_power_w);
    metrics["sea_rounds"].push_back(rec.sea_rounds);
    metrics["outer_iters_total"].push_back(rec.outer_iters_total);
    metrics["gap_rel"].push_back(rec.gap_rel);
    metrics["wall_time_s"].push_back(rec.wall_time_s);
  }
  summary.certified_rate =
      records.empty() ? 0.0 : static_cast<double>(certified) / records.size();
  for (const auto& [name, values] : metrics) {
    summary.quantiles[name] = {{"p5", quantile(values, 0.05)},
                               {"p25", quantile(values, 0.25)},
                               {"p50", quantile(values, 0.50)},
                               {"p75", quantile(values, 0.75)},
                               {"p95", quantile(values, 0.95)}};
  }
  return summary;
}

std::string csv_header() {
  return "sample_id,seed,variant,K,L,N,objective,sdr_bound,gap_rel,sea_rounds,"
         "outer_iters_total,min_se,total_power_w,max_per_ap_power_w,"
         "certificate,wall_time_s";
}

void write_csv(std::ostream& os, const std::vector<SampleRecord>& records) {
  os << csv_header() << "\n";
  os.precision(17);
  for (const SampleRecord& r : records) {
    os << r.sample_id << ',' << r.seed << ',' << objective_name(r.variant)
       << ',' << r.num_ues << ',' << r.num_aps << ',' << r.num_antennas << ','
       << r.objective << ',' << r.sdr_bound << ',' << r.gap_rel << ','
       << r.sea_rounds << ',' << r.outer_iters_total << ',' << r.min_se << ','
       << r.total_power_w << ',' << r.max_per_ap_power_w << ','
       << r.certificate << ',' << r.wall_time_s << "\n";
  }
}

std::vector<SampleRecord> read_csv(std::istream& is) {
  std::vector<SampleRecord> records;
  std::string line;
  if (!std::getline(is, line)) return records;
  if (line != csv_header()) throw std::runtime_error("unexpected CSV header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 16) throw std::runtime_error("bad CSV row");
    SampleRecord r;
    r.sample_id = std::stoi(fields[0]);
    r.seed = std::stoull(fields[1]);
    r.variant = parse_variant(fields[2]);
    r.num_ues = std::stoi(fields[3]);
    r.num_aps = std::stoi(fields[4]);
    r.num_antennas = std::stoi(fields[5]);
    r.objective = std::stod(fields[6]);
    r.sdr_bound = std::stod(fields[7]);
    r.gap_rel = std::stod(fields[8]);
    r.sea_rounds = std::stoi(fields[9]);
    r.outer_iters_total = std::stoi(fields[10]);
    r.min_se = std::stod(fields[11]);
    r.total_power_w = std::stod(fields[12]);
    r.max_per_ap_power_w = std::stod(fields[13]);
    r.certificate = fields[14];
    r.wall_time_s = std::stod(fields[15]);
    records.push_back(r);
  }
  return records;
}

std::string summary_json(const BenchConfig& cfg,
                         const std::vector<SampleRecord>& records) {
  const BatchSummary s = summarize(records);
  json doc;
  doc["config_digest"] = cfg.digest();
  doc["n_samples"] = s.n_samples;
  doc["certified_rate"] = s.certified_rate;
  json q;
  for (const auto& [metric, qs] : s.quantiles) q[metric] = qs;
  doc["quantiles"] = q;
  return doc.dump(2);
}

void emit_results(const BenchConfig& cfg,
                  const std::vector<SampleRecord>& records) {
  {
    std::ofstream os(cfg.out_prefix + ".csv");
    if (!os) throw std::runtime_error("cannot write " + cfg.out_prefix + ".csv");
    write_csv(os, records);
  }
  std::ofstream os(cfg.out_prefix + "_summary.json");
  if (!os) {
    throw std::runtime_error("cannot write " + cfg.out_prefix + "_summary.json");
  }
  os << summary_json(cfg, records) << "\n";
}

namespace {

int run_variant_command(BenchConfig cfg, Objective variant, bool solver_given) {
  cfg.variant = variant;
  if (!solver_given) cfg.solver = SolverConfig::defaults_for(variant);
  cfg.validate();
  const std::vector<SampleRecord> records = run_batch(cfg);
  emit_results(cfg, records);
  const BatchSummary summary = summarize(records);
  std::cout << "samples: " << summary.n_samples
            << "  certified: " << summary.certified_rate * 100.0 << "%"
            << "  median objective: "
            << summary.quantiles.at("objective").at("p50") << "\n";
  const double failure_rate =
      1.0 - summary.certified_rate;
  return failure_rate > 0.01 ? 1 : 0;
}

int run_trace(const BenchConfig& cfg) {
  const NetworkRealization net =
      generate_network(cfg.geometry, cfg.large_scale, cfg.base_seed);
  SdpProblem prob;
  const Vec budgets = cfg.per_ap_budgets();
  if (cfg.variant == Objective::kMmf) {
    prob = SdpProblem::mmf(net, budgets);
  } else {
    prob = SdpProblem::qos(net, budgets,
                           Vec::Constant(net.num_ues, cfg.gamma_c));
    if (cfg.variant == Objective::kSumPower) prob = prob.sum_power_variant();
  }
  std::ofstream os(cfg.out_prefix + "_trace.csv");
  if (!os) throw std::runtime_error("cannot write trace CSV");
  os << "iteration,transmit_power_w,dual_residual,prim_residual\n";
  os.precision(17);
  const IterationSink sink = [&os](int iter, double power, double dual_res,
                                   double prim_res) {
    os << iter << ',' << power << ',' << dual_res << ',' << prim_res << "\n";
  };
  const SolveReport report = run_sea(prob, cfg.solver, cfg.sea, sink);
  std::cout << "objective: " << report.objective
            << "  rounds: " << report.sea_rounds
            << "  outer iterations: " << report.total_outer_iters << "\n";
  return 0;
}

int run_verify(std::uint64_t base_seed);

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"SEA-ADMM multicast beamforming bench"};
  app.require_subcommand(1);

  std::string config_path;
  int samples_override = -1;
  std::int64_t seed_override = -1;
  std::string out_override;
  int ues_override = -1;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--samples", samples_override, "override sample count");
  app.add_option("--seed", seed_override, "override base seed");
  app.add_option("--out", out_override, "override output prefix");
  app.add_option("-K,--ues", ues_override, "override number of UEs");

  auto* mmf = app.add_subcommand("mmf", "max-min fairness batch");
  auto* qos = app.add_subcommand("qos", "QoS power minimization batch");
  auto* sum = app.add_subcommand("sumpower", "sum-power special case batch");
  auto* trace = app.add_subcommand(
      "trace", "single sample with per-iteration power trace");
  std::string trace_variant = "qos";
  trace->add_option("--variant", trace_variant, "mmf|qos|sumpower");
  auto* verify = app.add_subcommand("verify", "run the oracle suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    BenchConfig cfg;
    bool solver_given = false;
    if (!config_path.empty()) {
      std::ifstream is(config_path);
      if (!is) throw std::invalid_argument("cannot read " + config_path);
      std::stringstream buf;
      buf << is.rdbuf();
      const std::string text = buf.str();
      cfg = BenchConfig::from_json(text);
      solver_given = nlohmann::json::parse(text).contains("solver");
    }
    if (samples_override > 0) cfg.samples = samples_override;
    if (seed_override >= 0) cfg.base_seed = static_cast<std::uint64_t>(seed_override);
    if (!out_override.empty()) cfg.out_prefix = out_override;
    if (ues_override > 0) cfg.geometry.num_ues = ues_override;

    if (mmf->parsed()) return run_variant_command(cfg, Objective::kMmf, solver_given);
    if (qos->parsed()) return run_variant_command(cfg, Objective::kQos, solver_given);
    if (sum->parsed()) {
      return run_variant_command(cfg, Objective::kSumPower, solver_given);
    }
    if (trace->parsed()) {
      cfg.variant = parse_variant(trace_variant);
      if (!solver_given) cfg.solver = SolverConfig::defaults_for(cfg.variant);
      cfg.validate();
      return run_trace(cfg);
    }
    if (verify->parsed()) return run_verify(cfg.base_seed);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

namespace {

// Oracle suite for the `verify` subcommand: closed-form micro-instances,
// brute-force sandwich on tiny problems, MMF<->QoS consistency.
int run_verify(std::uint64_t base_seed) {
  RandomStream rng(base_seed ^ 0x5eaadd11u);
  int failures = 0;
  const auto check = [&failures](bool ok, const std::string& what) {
    std::cout << (ok ? "[ok]   " : "[FAIL] ") << what << "\n";
    if (!ok) ++failures;
  };

  // single-UE closed forms, L in {1,2}, N=1
  SolverConfig cfg = SolverConfig::defaults_for(Objective::kMmf);
  cfg.mu_snr = 50.0;
  cfg.mu_power = 5.0;
  int cf_pass = 0;
  const int cf_total = 20;
  for (int trial = 0; trial < cf_total; ++trial) {
    const int l_count = 1 + (trial % 2);
    NetworkRealization net;
    net.num_aps = l_count;
    net.num_antennas = 1;
    net.num_ues = 1;
    net.side_length = 1.0;
    net.channels.assign(1, std::vector<VecC>(l_count));
    std::vector<VecC> per_ap;
    RandomStream s = rng.split(100, trial);
    for (int l = 0; l < l_count; ++l) {
      VecC h(1);
      h(0) = s.next_cnormal();
      net.channels[0][l] = h;
      per_ap.push_back(h);
    }
    net.noise_var = Vec::Constant(1, 1.0);
    const Vec budgets = Vec::Constant(l_count, 1.0);
    const double expected = closed_form_single_ue(
        per_ap, 1.0, budgets, Objective::kMmf);
    const SdpProblem prob = SdpProblem::mmf(net, budgets);
    AdmmState state;
    solve_dual(prob, cfg, state);
    const double got = state.z.dot(budgets);
    if (std::abs(got - expected) <= 1e-3 * expected) ++cf_pass;
  }
  check(cf_pass == cf_total, "closed-form single-UE instances (" +
                                 std::to_string(cf_pass) + "/" +
                                 std::to_string(cf_total) + ")");

  // brute-force sandwich on n = 2
  SeaConfig sea_cfg;
  int bf_pass = 0;
  const int bf_total = 10;
  for (int trial = 0; trial < bf_total; ++trial) {
    NetworkRealization net;
    net.num_aps = 2;
    net.num_antennas = 1;
    net.num_ues = 3;
    net.side_length = 1.0;
    net.channels.assign(3, std::vector<VecC>(2));
    RandomStream s = rng.split(200, trial);
    for (int k = 0; k < 3; ++k) {
      for (int l = 0; l < 2; ++l) {
        VecC h(1);
        h(0) = s.next_cnormal();
        net.channels[k][l] = h;
      }
    }
    net.noise_var = Vec::Constant(3, 1.0);
    const Vec budgets = Vec::Constant(2, 1.0);
    const SdpProblem prob = SdpProblem::mmf(net, budgets);
    const SolveReport report = run_sea(prob, cfg, sea_cfg);
    const double brute = brute_force_rank1(prob, 200);
    const bool sandwich = brute <= report.objective * 1.02 + 1e-9 &&
                          report.objective <= report.sdr_bound * 1.001 + 1e-6;
    if (sandwich) ++bf_pass;
  }
  check(bf_pass == bf_total, "brute-force rank-1 sandwich (" +
                                 std::to_string(bf_pass) + "/" +
                                 std::to_string(bf_total) + ")");

  // MMF <-> QoS consistency on small random instances
  GeometryConfig geo;
  geo.num_aps = 4;
  geo.antennas_per_ap = 2;
  geo.num_ues = 4;
  LargeScaleParams ls;
  int cons_pass = 0;
  const int cons_total = 5;
  for (int trial = 0; trial < cons_total; ++trial) {
    const NetworkRealization net =
        generate_network(geo, ls, base_seed + 300 + trial);
    const double x_star = mmf_qos_consistency(
        net, Vec::Constant(geo.num_aps, 1.0),
        SolverConfig::defaults_for(Objective::kMmf));
    if (std::abs(x_star - 1.0) <= 5e-3) ++cons_pass;
  }
  check(cons_pass == cons_total, "MMF<->QoS consistency (" +
                                     std::to_string(cons_pass) + "/" +
                                     std::to_string(cons_total) + ")");

  return failures == 0 ? 0 : 1;
}

}  // namespace

}  // namespace cfmcast

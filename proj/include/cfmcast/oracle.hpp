#pragma once

#include "cfmcast/sea.hpp"

namespace cfmcast {

enum class Verdict { kCertified, kMarginal, kFailed };

const char* verdict_name(Verdict v);

/// Strong-duality certificate assembled from problem data and raw iterates
/// only; independent of the solver's own bookkeeping.
struct Certificate {
  double primal_obj = 0.0;
  double dual_obj = 0.0;
  double gap_rel = 0.0;
  double stationarity_residual = 0.0;  // ||H^H(y)+S-D^H(z)||_F normalized
  double complementarity = 0.0;        // max |multiplier * slack| normalized
  double primal_infeas = 0.0;          // worst relative constraint violation
  double dual_infeas = 0.0;            // sign/simplex/PSD violations
  Verdict verdict = Verdict::kFailed;
};

/// Thrown when an instance shape is outside an oracle's supported domain.
struct OracleUnsupported : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Analytic optimum for K = 1. MMF supports N = 1 (any L): coherent
/// combining at full per-AP power. QoS supports L = 1: matched filter.
double closed_form_single_ue(const std::vector<VecC>& per_ap_channels,
                             double noise_var, const Vec& budgets,
                             Objective obj, double target = 0.0);

/// Exhaustive search over rank-1 beamformers for n <= 3 (MMF): grid on
/// hyperspherical angles, power scaled to the tightest per-AP budget.
/// grid_density = points per angle.
double brute_force_rank1(const SdpProblem& prob, int grid_density);

/// KKT / duality-gap check of a converged solve.
Certificate certify(const SdpProblem& prob, const AdmmState& state,
                    double rho);

/// Solve QoS with gamma = t*(MMF) on the same instance; the returned
/// normalized power x* must be 1 at a certified MMF optimum.
double mmf_qos_consistency(const NetworkRealization& net, const Vec& p_max,
                           const SolverConfig& mmf_cfg);

}  // namespace cfmcast

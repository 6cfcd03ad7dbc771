#pragma once

#include <optional>
#include <vector>

#include "cfmcast/solver.hpp"

namespace cfmcast {

struct SeaConfig {
  /// Penalty factor; unset means automatic scaling from the first-round
  /// solution (total budget / tr(W_bar)).
  std::optional<double> zeta;
  double rank_tol = 1e-2;   // eigenvalue ratio threshold for "rank 1"
  int max_rounds = 20;

  void validate() const;
};

struct SolveReport {
  MatC w_mat;               // final W = rho * w_bar
  VecC beamformer;          // extracted w (empty if not rank-1)
  double objective = 0.0;   // MMF: min SNR; QoS/sum-power: max normalized power
  double min_se = 0.0;      // MMF metric, log2(1 + min SNR)
  double sdr_bound = 0.0;   // round-1 relaxation objective
  int sea_rounds = 0;
  std::vector<int> outer_iters_per_round;
  int total_outer_iters = 0;
  double duality_gap = 0.0;     // relative primal/dual objective gap
  double zeta_used = 0.0;
  bool rank_one = false;
  bool converged = false;       // every round's ADMM converged
  bool degenerate = false;      // zero channel flagged by the problem
  std::vector<std::pair<double, double>> rank_history;  // (lambda1, lambda2)
  Vec per_ap_power;             // with ORIGINAL selectors
  Vec snr;                      // tr(H_k W) per UE
  AdmmState final_state;        // dual iterates for certification
  SdpProblem final_problem;     // penalized problem actually solved last
};

/// Number of eigenvalues above rank_tol * lambda_max; 0 for the zero matrix.
int numerical_rank(const MatC& w, double rank_tol);

/// Unit eigenvector of the second-largest eigenvalue (descending order).
VecC second_eigvec(const MatC& w);

/// Principal-eigenpair factor sqrt(lambda1) * q1, phase-normalized so the
/// largest-magnitude entry is real positive.
VecC extract_beamformer(const MatC& w, double rank_tol);

/// Algorithm steps 6-14: solve, penalize the second eigendirection while
/// the solution stays above rank 1, then extract the beamformer.
SolveReport run_sea(const SdpProblem& prob, const SolverConfig& solver_cfg,
                    const SeaConfig& sea_cfg,
                    const IterationSink& sink = nullptr);

}  // namespace cfmcast

#include "cfmcast/sea.hpp"

#include <cmath>
#include <stdexcept>

namespace cfmcast {

namespace {

Eigen::SelfAdjointEigenSolver<MatC> eig_or_throw(const MatC& w) {
  Eigen::SelfAdjointEigenSolver<MatC> eig(w);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("eigendecomposition failed");
  }
  return eig;
}

double primal_objective(const SdpProblem& prob, const MatC& w_mat,
                        bool penalized) {
  if (prob.objective() == Objective::kMmf) {
    return prob.apply_snr_maps(w_mat).minCoeff();
  }
  const Vec power = penalized ? prob.apply_power_maps(w_mat)
                              : prob.apply_power_selectors(w_mat);
  return (power.array() / prob.budgets().array()).maxCoeff();
}

double dual_objective(const SdpProblem& prob, const AdmmState& state) {
  if (prob.objective() == Objective::kMmf) {
    return state.z.dot(prob.budgets());
  }
  return state.y.dot(prob.targets());
}

}  // namespace

void SeaConfig::validate() const {
  if (rank_tol <= 0.0 || rank_tol >= 1.0) {
    throw std::invalid_argument("rank_tol must be in (0, 1)");
  }
  if (max_rounds < 1) throw std::invalid_argument("max_rounds >= 1");
  if (zeta && *zeta < 0.0) throw std::invalid_argument("zeta >= 0");
}

int numerical_rank(const MatC& w, double rank_tol) {
  const auto eig = eig_or_throw(w);
  const double lam_max = eig.eigenvalues().maxCoeff();
  if (lam_max <= 0.0) return 0;
  return static_cast<int>(
      (eig.eigenvalues().array() > rank_tol * lam_max).count());
}

VecC second_eigvec(const MatC& w) {
  const auto eig = eig_or_throw(w);
  const int n = static_cast<int>(w.rows());
  if (n < 2) throw std::logic_error("second_eigvec: matrix too small");
  // Eigen sorts ascending; second largest is column n-2.
  VecC u = eig.eigenvectors().col(n - 2);
  return u / u.norm();
}

VecC extract_beamformer(const MatC& w, double rank_tol) {
  if (numerical_rank(w, rank_tol) != 1) {
    throw std::logic_error("extract_beamformer: solution is not rank 1");
  }
  const auto eig = eig_or_throw(w);
  const int n = static_cast<int>(w.rows());
  VecC vec = std::sqrt(eig.eigenvalues()(n - 1)) * eig.eigenvectors().col(n - 1);
  int peak = 0;
  vec.cwiseAbs().maxCoeff(&peak);
  const std::complex<double> phase = vec(peak) / std::abs(vec(peak));
  return vec / phase;
}

SolveReport run_sea(const SdpProblem& prob, const SolverConfig& solver_cfg,
                    const SeaConfig& sea_cfg, const IterationSink& sink) {
  sea_cfg.validate();
  SolveReport report;
  report.degenerate = prob.has_zero_channel();
  report.converged = true;

  SdpProblem current = prob;
  AdmmState state;
  double zeta = sea_cfg.zeta.value_or(0.0);

  for (int round = 1; round <= sea_cfg.max_rounds; ++round) {
    // each round restarts the ADMM from the documented initialization;
    // continuing from the previous round's duals destabilizes the solve
    // once the power maps change
    state = AdmmState{};
    const ConvergenceReport conv =
        solve_dual(current, solver_cfg, state, false, round == 1 ? sink : nullptr);
    report.converged = report.converged && conv.converged;
    report.outer_iters_per_round.push_back(conv.outer_iters);
    report.total_outer_iters += conv.outer_iters;
    report.sea_rounds = round;

    const MatC w_mat = solver_cfg.rho * state.w_bar;
    const auto eig = eig_or_throw(w_mat);
    const int n = static_cast<int>(w_mat.rows());
    const double lam1 = eig.eigenvalues()(n - 1);
    const double lam2 = n > 1 ? eig.eigenvalues()(n - 2) : 0.0;
    report.rank_history.emplace_back(lam1, lam2);

    if (round == 1) {
      report.sdr_bound = primal_objective(current, w_mat, false);
      if (!sea_cfg.zeta) {
        // scaled to perturb, not dominate, the power constraints: larger
        // factors destabilize the re-solve
        const double trace = std::max(state.w_bar.real().trace(), 1e-12);
        zeta = prob.total_budget() / trace;
      }
    }

    const int rank = numerical_rank(w_mat, sea_cfg.rank_tol);
    if (rank <= 1 || round == sea_cfg.max_rounds) {
      report.rank_one = rank <= 1 && rank > 0;
      report.w_mat = w_mat;
      break;
    }
    current = current.with_penalty(second_eigvec(w_mat), zeta);
  }

  report.zeta_used = zeta;
  report.final_problem = current;
  report.final_state = state;

  // metrics from the rank-1 factor when available, else the raw W
  MatC w_eff = report.w_mat;
  if (report.rank_one) {
    report.beamformer = extract_beamformer(report.w_mat, sea_cfg.rank_tol);
    w_eff = report.beamformer * report.beamformer.adjoint();
  }
  report.per_ap_power = prob.apply_power_selectors(w_eff);
  report.snr = prob.apply_snr_maps(w_eff);
  report.objective = primal_objective(prob, w_eff, false);
  report.min_se = std::log2(1.0 + report.snr.minCoeff());

  const double primal = primal_objective(current, report.w_mat, true);
  const double dual = dual_objective(current, state);
  report.duality_gap =
      std::abs(primal - dual) / std::max(std::abs(dual), 1e-12);
  return report;
}

}  // namespace cfmcast

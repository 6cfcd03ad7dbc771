#pragma once

#include <Eigen/Cholesky>
#include <functional>
#include <vector>

#include "cfmcast/problem.hpp"

namespace cfmcast {

struct SolverConfig {
  double rho = 0.2;
  double mu_snr = 5e6;     // inner penalty on the y block (per entry)
  double mu_power = 5.0;   // inner penalty on the z block (per entry)
  double eps_dual = 2e-5;
  double eps_prim = 7e-5;
  int inner_iters = 50;    // T, fixed; no inner stopping test
  int max_outer = 1000;

  void validate() const;

  /// Benchmark defaults for the given objective.
  static SolverConfig defaults_for(Objective obj);
};

struct AdmmState {
  Vec y;        // K, SNR-constraint duals
  Vec z;        // Lc, power-constraint duals
  MatC s;       // n x n Hermitian PSD
  MatC w_bar;   // n x n, scaled dual; rho * w_bar recovers the primal W
  Vec v;        // K + Lc, inner consensus variable
  Vec t_bar;    // K + Lc, inner scaled dual
  int outer_iters = 0;
};

struct ConvergenceReport {
  int outer_iters = 0;
  double dual_residual = 0.0;  // relative trace change of w_bar
  double prim_residual = 0.0;  // relative Frobenius change of s
  bool converged = false;
  bool degenerate = false;     // tr(w_bar) <= 0 or ||s|| == 0 at exit
};

/// Per-outer-iteration observer: (iteration, transmit power rho*tr(w_bar),
/// dual residual, primal residual). Residuals are +inf on iteration 1.
using IterationSink =
    std::function<void(int, double, double, double)>;

/// Closed-form inner x-update: x = (Q+R)^{-1} (-c + R(v - t_bar)).
/// The factorization is computed once and reused across inner iterations.
class XUpdate {
 public:
  XUpdate(const QpData& qp, const Vec& r_diag);
  [[nodiscard]] Vec solve(const Vec& c, const Vec& v, const Vec& t_bar) const;

 private:
  Eigen::LDLT<Mat> factor_;
  Vec r_diag_;
};

/// Euclidean projection onto {q >= 0, sum q = tau}: sort, cumulative sums,
/// threshold, clip.
Vec project_simplex(const Vec& v, double tau);

/// Euclidean projection onto {q >= 0, p^T q = 1} for positive weights p.
/// Reduces to project_simplex(v, 1/p) when all weights are equal.
Vec project_weighted_simplex(const Vec& v, const Vec& p);

Vec project_nonneg(const Vec& v);

/// Runs exactly T inner iterations on the QP; warm-started from (v, t_bar)
/// in state. Updates y, z, v, t_bar in place.
void inner_admm(const QpData& qp, const XUpdate& x_update, const Vec& c,
                const SdpProblem& prob, int iters, AdmmState& state);

/// Projection of D^H(z) - H^H(y) - w_bar onto the PSD cone.
MatC s_update(const SdpProblem& prob, const Vec& y, const Vec& z,
              const MatC& w_bar);

MatC w_bar_update(const SdpProblem& prob, const Vec& y, const Vec& z,
                  const MatC& s, const MatC& w_bar);

ConvergenceReport check_convergence(const MatC& s, const MatC& prev_s,
                                    const MatC& w_bar, const MatC& prev_w_bar,
                                    const SolverConfig& cfg, int iter);

/// Outer ADMM loop (Algorithm steps 1-5): cold start unless `warm` is given.
ConvergenceReport solve_dual(const SdpProblem& prob, const SolverConfig& cfg,
                             AdmmState& state, bool warm = false,
                             const IterationSink& sink = nullptr);

}  // namespace cfmcast

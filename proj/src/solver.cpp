#include "cfmcast/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace cfmcast {

void SolverConfig::validate() const {
  if (rho <= 0.0 || mu_snr <= 0.0 || mu_power <= 0.0) {
    throw std::invalid_argument("penalty parameters must be positive");
  }
  if (eps_dual <= 0.0 || eps_prim <= 0.0) {
    throw std::invalid_argument("tolerances must be positive");
  }
  if (inner_iters < 1 || max_outer < 1) {
    throw std::invalid_argument("iteration counts must be >= 1");
  }
}

SolverConfig SolverConfig::defaults_for(Objective obj) {
  SolverConfig cfg;
  switch (obj) {
    case Objective::kMmf:
      cfg.rho = 0.2;
      cfg.mu_snr = 5e6;
      break;
    case Objective::kQos:
      cfg.rho = 0.2;
      cfg.mu_snr = 3e6;
      break;
    case Objective::kSumPower:
      cfg.rho = 1.0;
      cfg.mu_snr = 2e6;
      break;
  }
  return cfg;
}

XUpdate::XUpdate(const QpData& qp, const Vec& r_diag) : r_diag_(r_diag) {
  if (r_diag.size() != qp.size()) {
    throw std::invalid_argument("x_update: R dimension mismatch");
  }
  Mat m = qp.q;
  m.diagonal() += r_diag;
  factor_.compute(m);
  if (factor_.info() != Eigen::Success || !m.allFinite()) {
    throw std::runtime_error("x_update: factorization of Q + R failed");
  }
}

Vec XUpdate::solve(const Vec& c, const Vec& v, const Vec& t_bar) const {
  return factor_.solve(-c + r_diag_.cwiseProduct(v - t_bar));
}

Vec project_simplex(const Vec& v, double tau) {
  const int m = static_cast<int>(v.size());
  if (m == 0) throw std::domain_error("project_simplex: empty vector");
  if (tau <= 0.0) throw std::domain_error("project_simplex: tau must be > 0");
  std::vector<double> u(v.data(), v.data() + m);
  std::stable_sort(u.begin(), u.end(), std::greater<double>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (int j = 0; j < m; ++j) {
    cumsum += u[j];
    const double candidate = (cumsum - tau) / (j + 1);
    if (u[j] - candidate > 0.0) theta = candidate;
  }
  return (v.array() - theta).cwiseMax(0.0);
}

Vec project_weighted_simplex(const Vec& v, const Vec& p) {
  const int m = static_cast<int>(v.size());
  if (m == 0) throw std::domain_error("project_weighted_simplex: empty vector");
  if ((p.array() <= 0.0).any()) {
    throw std::domain_error("project_weighted_simplex: weights must be > 0");
  }
  if ((p.array() == p(0)).all()) {
    return project_simplex(v, 1.0 / p(0));
  }
  // q = max(v - theta p, 0) with theta solving sum p_l max(v_l - theta p_l, 0) = 1.
  // The active set is { l : v_l / p_l > theta }; sweep the sorted breakpoints.
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return v(a) / p(a) > v(b) / p(b);
  });
  double pv = 0.0;
  double pp = 0.0;
  double theta = 0.0;
  for (int j = 0; j < m; ++j) {
    const int idx = order[j];
    pv += p(idx) * v(idx);
    pp += p(idx) * p(idx);
    const double candidate = (pv - 1.0) / pp;
    if (v(idx) / p(idx) - candidate > 0.0) theta = candidate;
  }
  return (v - theta * p).cwiseMax(0.0);
}

Vec project_nonneg(const Vec& v) { return v.cwiseMax(0.0); }

void inner_admm(const QpData& qp, const XUpdate& x_update, const Vec& c,
                const SdpProblem& prob, int iters, AdmmState& state) {
  const int k_count = prob.num_ues();
  const int l_count = prob.num_power_constraints();
  const bool mmf = prob.objective() == Objective::kMmf;
  for (int j = 0; j < iters; ++j) {
    const Vec x = x_update.solve(c, state.v, state.t_bar);
    const Vec split = x + state.t_bar;
    if (mmf) {
      state.y = project_simplex(split.head(k_count), 1.0);
      state.z = project_nonneg(split.tail(l_count));
    } else {
      state.y = project_nonneg(split.head(k_count));
      state.z = project_weighted_simplex(split.tail(l_count), prob.budgets());
    }
    state.v.head(k_count) = state.y;
    state.v.tail(l_count) = state.z;
    state.t_bar += x - state.v;
  }
}

MatC s_update(const SdpProblem& prob, const Vec& y, const Vec& z,
              const MatC& w_bar) {
  const MatC x = prob.adjoint_power(z) - prob.adjoint_snr(y) - w_bar;
  Eigen::SelfAdjointEigenSolver<MatC> eig(x);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("s_update: eigendecomposition failed");
  }
  const Vec lam = eig.eigenvalues().cwiseMax(0.0);
  return eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().adjoint();
}

MatC w_bar_update(const SdpProblem& prob, const Vec& y, const Vec& z,
                  const MatC& s, const MatC& w_bar) {
  return w_bar + prob.adjoint_snr(y) + s - prob.adjoint_power(z);
}

ConvergenceReport check_convergence(const MatC& s, const MatC& prev_s,
                                    const MatC& w_bar, const MatC& prev_w_bar,
                                    const SolverConfig& cfg, int iter) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  ConvergenceReport rep;
  rep.outer_iters = iter;
  const double tr = w_bar.real().trace();
  const double s_norm = s.norm();
  if (tr <= 0.0 || s_norm == 0.0) {
    rep.dual_residual = inf;
    rep.prim_residual = inf;
    rep.degenerate = true;
    return rep;
  }
  rep.dual_residual = std::abs((w_bar - prev_w_bar).real().trace()) / tr;
  rep.prim_residual = (s - prev_s).norm() / s_norm;
  rep.converged =
      rep.dual_residual < cfg.eps_dual && rep.prim_residual < cfg.eps_prim;
  return rep;
}

ConvergenceReport solve_dual(const SdpProblem& prob, const SolverConfig& cfg,
                             AdmmState& state, bool warm,
                             const IterationSink& sink) {
  cfg.validate();
  const int n = prob.dim();
  const int m = prob.num_ues() + prob.num_power_constraints();
  if (!warm) {
    state.y = Vec::Zero(prob.num_ues());
    state.z = Vec::Zero(prob.num_power_constraints());
    state.s = MatC::Zero(n, n);
    state.w_bar = prob.total_budget() / (cfg.rho * n) *
                  MatC::Identity(n, n);
    state.v = Vec::Zero(m);
    state.t_bar = Vec::Zero(m);
    state.outer_iters = 0;
  }

  const QpData qp = build_qp(prob, cfg.rho);
  Vec r_diag(m);
  r_diag.head(prob.num_ues()).setConstant(cfg.mu_snr);
  r_diag.tail(prob.num_power_constraints()).setConstant(cfg.mu_power);
  const XUpdate x_update(qp, r_diag);

  ConvergenceReport rep;
  for (int i = 1; i <= cfg.max_outer; ++i) {
    const MatC prev_s = state.s;
    const MatC prev_w_bar = state.w_bar;

    const Vec c = qp.linear_term(prob, state.s, state.w_bar);
    inner_admm(qp, x_update, c, prob, cfg.inner_iters, state);
    state.s = s_update(prob, state.y, state.z, state.w_bar);
    state.w_bar = w_bar_update(prob, state.y, state.z, state.s, state.w_bar);
    ++state.outer_iters;

    if (i == 1) {
      rep.outer_iters = i;
      rep.dual_residual = std::numeric_limits<double>::infinity();
      rep.prim_residual = std::numeric_limits<double>::infinity();
    } else {
      rep = check_convergence(state.s, prev_s, state.w_bar, prev_w_bar, cfg, i);
    }
    if (sink) {
      sink(i, cfg.rho * state.w_bar.real().trace(), rep.dual_residual,
           rep.prim_residual);
    }
    if (rep.converged) break;
  }
  return rep;
}

}  // namespace cfmcast

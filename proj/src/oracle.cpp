#include "cfmcast/oracle.hpp"

#include <cmath>
#include <numbers>

namespace cfmcast {

namespace {
constexpr double kEps = 1e-12;

double relpos(double violation, double scale) {
  return std::max(violation, 0.0) / std::max(scale, kEps);
}
}  // namespace

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kCertified: return "certified";
    case Verdict::kMarginal: return "marginal";
    case Verdict::kFailed: return "failed";
  }
  return "?";
}

double closed_form_single_ue(const std::vector<VecC>& per_ap_channels,
                             double noise_var, const Vec& budgets,
                             Objective obj, double target) {
  const int l_count = static_cast<int>(per_ap_channels.size());
  if (l_count == 0 || budgets.size() != l_count) {
    throw std::invalid_argument("closed_form_single_ue: bad shapes");
  }
  if (obj == Objective::kMmf) {
    // per-AP budgets: closed form only for single-antenna APs, where the
    // optimum transmits full power per AP, phase-aligned to the channel
    double amp = 0.0;
    for (int l = 0; l < l_count; ++l) {
      if (per_ap_channels[l].size() != 1) {
        throw OracleUnsupported("MMF closed form needs N = 1");
      }
      amp += std::sqrt(budgets(l)) * std::abs(per_ap_channels[l](0));
    }
    return amp * amp / noise_var;
  }
  if (l_count != 1) {
    throw OracleUnsupported("QoS closed form needs L = 1");
  }
  const double gain = per_ap_channels[0].squaredNorm();
  if (gain <= 0.0) throw OracleUnsupported("zero channel");
  return target * noise_var / gain;
}

double brute_force_rank1(const SdpProblem& prob, int grid_density) {
  const int n = prob.dim();
  if (n > 3) throw OracleUnsupported("brute force limited to n <= 3");
  if (prob.objective() != Objective::kMmf) {
    throw OracleUnsupported("brute force implemented for MMF");
  }
  const int g = std::max(grid_density, 2);

  const auto evaluate = [&](const VecC& direction) {
    // scale the unit direction to the tightest per-AP budget
    const MatC outer = direction * direction.adjoint();
    const Vec block_power = prob.apply_power_selectors(outer);
    double scale = std::numeric_limits<double>::infinity();
    for (int l = 0; l < block_power.size(); ++l) {
      if (block_power(l) > kEps) {
        scale = std::min(scale, prob.budgets()(l) / block_power(l));
      }
    }
    if (!std::isfinite(scale)) return 0.0;
    return scale * prob.apply_snr_maps(outer).minCoeff();
  };

  double best = 0.0;
  const double half_pi = std::numbers::pi / 2.0;
  const double two_pi = 2.0 * std::numbers::pi;
  VecC u(n);
  if (n == 1) {
    u(0) = 1.0;
    return evaluate(u);
  }
  if (n == 2) {
    for (int ia = 0; ia <= g; ++ia) {
      const double a = half_pi * ia / g;
      for (int ip = 0; ip < g; ++ip) {
        const double phi = two_pi * ip / g;
        u(0) = std::cos(a);
        u(1) = std::polar(std::sin(a), phi);
        best = std::max(best, evaluate(u));
      }
    }
    return best;
  }
  for (int ia = 0; ia <= g; ++ia) {
    const double a = half_pi * ia / g;
    for (int ib = 0; ib <= g; ++ib) {
      const double b = half_pi * ib / g;
      for (int ip1 = 0; ip1 < g; ++ip1) {
        for (int ip2 = 0; ip2 < g; ++ip2) {
          u(0) = std::cos(a);
          u(1) = std::polar(std::sin(a) * std::cos(b), two_pi * ip1 / g);
          u(2) = std::polar(std::sin(a) * std::sin(b), two_pi * ip2 / g);
          best = std::max(best, evaluate(u));
        }
      }
    }
  }
  return best;
}

Certificate certify(const SdpProblem& prob, const AdmmState& state,
                    double rho) {
  Certificate cert;
  const MatC w_mat = rho * state.w_bar;
  const bool mmf = prob.objective() == Objective::kMmf;
  const Vec snr = prob.apply_snr_maps(w_mat);
  const Vec power = prob.apply_power_maps(w_mat);
  const Vec& p = prob.budgets();

  // primal feasibility
  double primal_infeas = 0.0;
  Eigen::SelfAdjointEigenSolver<MatC> w_eig(w_mat);
  const double w_scale = std::max(w_mat.real().trace(), kEps);
  primal_infeas = relpos(-w_eig.eigenvalues().minCoeff(), w_scale);
  if (mmf) {
    cert.primal_obj = snr.minCoeff();
    for (int l = 0; l < p.size(); ++l) {
      primal_infeas = std::max(primal_infeas, relpos(power(l) - p(l), p(l)));
    }
  } else {
    cert.primal_obj = (power.array() / p.array()).maxCoeff();
    const Vec& targets = prob.targets();
    for (int k = 0; k < snr.size(); ++k) {
      primal_infeas =
          std::max(primal_infeas, relpos(targets(k) - snr(k), targets(k)));
    }
  }
  cert.primal_infeas = primal_infeas;

  // dual feasibility: signs, the simplex constraint, S in the PSD cone
  double dual_infeas = relpos(-state.y.minCoeff(), 1.0) +
                       relpos(-state.z.minCoeff(), 1.0);
  if (mmf) {
    dual_infeas = std::max(dual_infeas, std::abs(state.y.lpNorm<1>() - 1.0));
  } else {
    dual_infeas = std::max(dual_infeas, std::abs(state.z.dot(p) - 1.0));
  }
  Eigen::SelfAdjointEigenSolver<MatC> s_eig(state.s);
  dual_infeas = std::max(
      dual_infeas, relpos(-s_eig.eigenvalues().minCoeff(),
                          std::max(state.s.real().trace(), kEps)));
  cert.dual_infeas = dual_infeas;

  cert.dual_obj = mmf ? state.z.dot(p) : state.y.dot(prob.targets());
  cert.gap_rel = std::abs(cert.primal_obj - cert.dual_obj) /
                 std::max(std::abs(cert.dual_obj), kEps);

  const MatC resid = prob.adjoint_snr(state.y) + state.s -
                     prob.adjoint_power(state.z);
  cert.stationarity_residual =
      resid.norm() / std::max(prob.adjoint_power(state.z).norm(), kEps);

  // complementary slackness, normalized by the dual objective scale
  const double obj_scale = std::max(std::abs(cert.dual_obj), kEps);
  double comp = 0.0;
  if (mmf) {
    for (int k = 0; k < snr.size(); ++k) {
      comp = std::max(comp,
                      std::abs(state.y(k) * (snr(k) - cert.primal_obj)) / obj_scale);
    }
    for (int l = 0; l < p.size(); ++l) {
      comp = std::max(comp, std::abs(state.z(l) * (p(l) - power(l))) / obj_scale);
    }
  } else {
    const Vec& targets = prob.targets();
    for (int k = 0; k < snr.size(); ++k) {
      comp = std::max(comp, std::abs(state.y(k) * (snr(k) - targets(k))) / obj_scale);
    }
    for (int l = 0; l < p.size(); ++l) {
      comp = std::max(comp, std::abs(state.z(l) * (cert.primal_obj * p(l) - power(l))) /
                                obj_scale);
    }
  }
  comp = std::max(comp, std::abs(state.s.cwiseProduct(w_mat.conjugate()).sum().real()) /
                            (std::max(state.s.norm(), kEps) * w_scale));
  cert.complementarity = comp;

  const double worst =
      std::max({cert.gap_rel, cert.stationarity_residual, cert.primal_infeas,
                cert.dual_infeas, cert.complementarity});
  if (worst <= 1e-3) {
    cert.verdict = Verdict::kCertified;
  } else if (worst <= 1e-2) {
    cert.verdict = Verdict::kMarginal;
  } else {
    cert.verdict = Verdict::kFailed;
  }
  return cert;
}

double mmf_qos_consistency(const NetworkRealization& net, const Vec& p_max,
                           const SolverConfig& mmf_cfg) {
  const SdpProblem mmf_prob = SdpProblem::mmf(net, p_max);
  AdmmState mmf_state;
  solve_dual(mmf_prob, mmf_cfg, mmf_state);
  const Certificate mmf_cert = certify(mmf_prob, mmf_state, mmf_cfg.rho);
  if (mmf_cert.verdict == Verdict::kFailed) {
    throw OracleUnsupported("MMF solve did not certify");
  }
  const double t_star = mmf_cert.dual_obj;

  // reuse the caller's penalties so both solves share the problem scale
  const SolverConfig& qos_cfg = mmf_cfg;
  const SdpProblem qos_prob =
      SdpProblem::qos(net, p_max, Vec::Constant(net.num_ues, t_star));
  AdmmState qos_state;
  solve_dual(qos_prob, qos_cfg, qos_state);
  return qos_state.y.dot(qos_prob.targets());
}

}  // namespace cfmcast

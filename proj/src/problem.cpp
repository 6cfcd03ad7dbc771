#include "cfmcast/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace cfmcast {

const char* objective_name(Objective obj) {
  switch (obj) {
    case Objective::kMmf: return "mmf";
    case Objective::kQos: return "qos";
    case Objective::kSumPower: return "sumpower";
  }
  return "?";
}

SdpProblem SdpProblem::build(const NetworkRealization& net, const Vec& p_max,
                             Objective obj, const Vec& targets) {
  if (p_max.size() != net.num_aps) {
    throw std::invalid_argument("budget vector length must equal num_aps");
  }
  if ((p_max.array() <= 0.0).any()) {
    throw std::invalid_argument("power budgets must be positive");
  }
  SdpProblem prob;
  prob.objective_ = obj;
  prob.dim_ = net.dim();
  prob.num_aps_ = net.num_aps;
  prob.block_size_ = net.num_antennas;
  prob.budgets_ = p_max;
  prob.targets_ = targets;
  prob.penalty_ = MatC::Zero(prob.dim_, prob.dim_);
  prob.snr_mats_.reserve(net.num_ues);
  for (int k = 0; k < net.num_ues; ++k) {
    const VecC h = net.stacked_channel(k);
    if (h.norm() == 0.0) prob.has_zero_channel_ = true;
    prob.snr_mats_.push_back((h * h.adjoint()) / net.noise_var(k));
  }
  return prob;
}

SdpProblem SdpProblem::mmf(const NetworkRealization& net, const Vec& p_max) {
  return build(net, p_max, Objective::kMmf, Vec());
}

SdpProblem SdpProblem::qos(const NetworkRealization& net, const Vec& p_max,
                           const Vec& targets) {
  if (targets.size() != net.num_ues) {
    throw std::invalid_argument("targets length must equal num_ues");
  }
  if ((targets.array() <= 0.0).any()) {
    throw std::invalid_argument("SNR targets must be positive");
  }
  return build(net, p_max, Objective::kQos, targets);
}

SdpProblem SdpProblem::sum_power_variant() const {
  if (objective_ != Objective::kQos) {
    throw std::logic_error("sum_power_variant requires a QoS problem");
  }
  SdpProblem prob = *this;
  prob.objective_ = Objective::kSumPower;
  prob.sum_power_ = true;
  prob.budgets_ = Vec::Constant(1, budgets_.sum());
  return prob;
}

SdpProblem SdpProblem::with_penalty(const VecC& direction, double zeta) const {
  if (zeta < 0.0) throw std::invalid_argument("penalty factor must be >= 0");
  if (std::abs(direction.norm() - 1.0) > 1e-8) {
    throw std::invalid_argument("penalty direction must be a unit vector");
  }
  SdpProblem prob = *this;
  prob.penalty_ += zeta * (direction * direction.adjoint());
  prob.penalty_dirs_.push_back(direction);
  return prob;
}

MatC SdpProblem::power_mat(int l) const {
  MatC d = penalty_;
  if (sum_power_) {
    d += MatC::Identity(dim_, dim_);
  } else {
    d.block(l * block_size_, l * block_size_, block_size_, block_size_) +=
        MatC::Identity(block_size_, block_size_);
  }
  return d;
}

Vec SdpProblem::apply_snr_maps(const MatC& w) const {
  Vec out(num_ues());
  for (int k = 0; k < num_ues(); ++k) {
    out(k) = snr_mats_[k].cwiseProduct(w.conjugate()).sum().real();
  }
  return out;
}

Vec SdpProblem::apply_power_selectors(const MatC& w) const {
  if (sum_power_) return Vec::Constant(1, w.real().trace());
  Vec out(num_aps_);
  for (int l = 0; l < num_aps_; ++l) {
    out(l) = w.block(l * block_size_, l * block_size_, block_size_, block_size_)
                 .real().trace();
  }
  return out;
}

Vec SdpProblem::apply_power_maps(const MatC& w) const {
  Vec out = apply_power_selectors(w);
  if (!penalty_dirs_.empty()) {
    const double corr = penalty_.cwiseProduct(w.conjugate()).sum().real();
    out.array() += corr;
  }
  return out;
}

MatC SdpProblem::adjoint_snr(const Vec& y) const {
  MatC out = MatC::Zero(dim_, dim_);
  for (int k = 0; k < num_ues(); ++k) out += y(k) * snr_mats_[k];
  return out;
}

MatC SdpProblem::adjoint_power(const Vec& z) const {
  MatC out = MatC::Zero(dim_, dim_);
  if (sum_power_) {
    out.diagonal().array() += z(0);
    out += z(0) * penalty_;
    return out;
  }
  for (int l = 0; l < num_aps_; ++l) {
    out.block(l * block_size_, l * block_size_, block_size_, block_size_)
        .diagonal().array() += z(l);
  }
  out += z.sum() * penalty_;
  return out;
}

Vec QpData::linear_term(const SdpProblem& prob, const MatC& s,
                        const MatC& w_bar) const {
  const int k_count = prob.num_ues();
  const int l_count = prob.num_power_constraints();
  const MatC sum = s + w_bar;
  const VecC r = Eigen::Map<const VecC>(sum.data(), sum.size());
  Vec c(k_count + l_count);
  c.head(k_count) = rho * (snr_map * r).real();
  c.tail(l_count) = -rho * (power_map * r).real();
  if (prob.objective() == Objective::kMmf) {
    c.tail(l_count) += prob.budgets();
  } else {
    c.head(k_count) -= prob.targets();
  }
  return c;
}

QpData build_qp(const SdpProblem& prob, double rho) {
  if (rho <= 0.0) throw std::invalid_argument("rho must be positive");
  const int n = prob.dim();
  const int k_count = prob.num_ues();
  const int l_count = prob.num_power_constraints();

  QpData qp;
  qp.rho = rho;
  qp.snr_map.resize(k_count, n * n);
  for (int k = 0; k < k_count; ++k) {
    const MatC& h = prob.snr_mat(k);
    qp.snr_map.row(k) =
        Eigen::Map<const VecC>(h.data(), h.size()).adjoint();
  }
  qp.power_map.resize(l_count, n * n);
  for (int l = 0; l < l_count; ++l) {
    const MatC d = prob.power_mat(l);
    qp.power_map.row(l) =
        Eigen::Map<const VecC>(d.data(), d.size()).adjoint();
  }

  const int m = k_count + l_count;
  MatC stacked(m, n * n);
  stacked.topRows(k_count) = qp.snr_map;
  stacked.bottomRows(l_count) = -qp.power_map;
  qp.q = rho * (stacked * stacked.adjoint()).real();
  qp.q = 0.5 * (qp.q + qp.q.transpose()).eval();
  return qp;
}

QpData build_qp(const SdpProblem& prob, double rho, const MatC& s,
                const MatC& w_bar, Vec* c_out) {
  QpData qp = build_qp(prob, rho);
  if (c_out != nullptr) *c_out = qp.linear_term(prob, s, w_bar);
  return qp;
}

}  // namespace cfmcast

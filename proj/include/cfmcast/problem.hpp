#pragma once

#include <optional>
#include <vector>

#include "cfmcast/netsim.hpp"

namespace cfmcast {

enum class Objective { kMmf, kQos, kSumPower };

const char* objective_name(Objective obj);

/// Data of one relaxed SDP instance. The power maps are kept implicitly:
/// block selectors (per-AP) or the identity (sum-power), plus one shared
/// penalty matrix accumulated by the elimination rounds. Immutable after
/// build; penalty application returns a new instance.
class SdpProblem {
 public:
  SdpProblem() = default;  // empty shell; use the factories below

  static SdpProblem mmf(const NetworkRealization& net, const Vec& p_max);
  static SdpProblem qos(const NetworkRealization& net, const Vec& p_max,
                        const Vec& targets);
  /// Collapse the L per-AP constraints of a QoS instance into a single
  /// total-power map D = I with budget sum(p).
  [[nodiscard]] SdpProblem sum_power_variant() const;

  /// New instance with every power map incremented by zeta * u u^H.
  [[nodiscard]] SdpProblem with_penalty(const VecC& direction, double zeta) const;

  [[nodiscard]] Objective objective() const { return objective_; }
  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] int num_ues() const { return static_cast<int>(snr_mats_.size()); }
  /// Number of power maps: L per-AP, or 1 for sum-power.
  [[nodiscard]] int num_power_constraints() const {
    return sum_power_ ? 1 : num_aps_;
  }
  [[nodiscard]] int num_aps() const { return num_aps_; }
  [[nodiscard]] int block_size() const { return block_size_; }
  [[nodiscard]] const Vec& budgets() const { return budgets_; }
  [[nodiscard]] double total_budget() const { return budgets_.sum(); }
  [[nodiscard]] const Vec& targets() const { return targets_; }
  [[nodiscard]] const MatC& snr_mat(int k) const { return snr_mats_[k]; }
  [[nodiscard]] const std::vector<VecC>& penalty_dirs() const { return penalty_dirs_; }
  [[nodiscard]] const MatC& penalty_mat() const { return penalty_; }
  [[nodiscard]] bool has_zero_channel() const { return has_zero_channel_; }

  /// Dense power map D_l including accumulated penalties.
  [[nodiscard]] MatC power_mat(int l) const;

  /// H(W): K-vector of tr(H_k W). W must be Hermitian.
  [[nodiscard]] Vec apply_snr_maps(const MatC& w) const;
  /// D(W) with penalties included.
  [[nodiscard]] Vec apply_power_maps(const MatC& w) const;
  /// D(W) with the ORIGINAL (pre-penalty) selectors; used for reporting.
  [[nodiscard]] Vec apply_power_selectors(const MatC& w) const;
  /// Adjoint H^H(y) = sum_k y_k H_k.
  [[nodiscard]] MatC adjoint_snr(const Vec& y) const;
  /// Adjoint D^H(z) = sum_l z_l D_l, penalties included.
  [[nodiscard]] MatC adjoint_power(const Vec& z) const;

 private:
  static SdpProblem build(const NetworkRealization& net, const Vec& p_max,
                          Objective obj, const Vec& targets);

  Objective objective_ = Objective::kMmf;
  int dim_ = 0;
  int num_aps_ = 0;
  int block_size_ = 0;
  bool sum_power_ = false;
  bool has_zero_channel_ = false;
  std::vector<MatC> snr_mats_;   // H_k = h_k h_k^H / sigma_k^2
  Vec budgets_;                  // length num_power_constraints()
  Vec targets_;                  // empty for MMF
  MatC penalty_;                 // zeta * sum_r u_r u_r^H (zero before SEA)
  std::vector<VecC> penalty_dirs_;
};

/// Vectorized inner-QP data: Q is fixed per SEA round, c changes per outer
/// ADMM iteration.
struct QpData {
  Mat q;          // (K + Lc) x (K + Lc), symmetric PSD
  double rho = 0.0;
  MatC snr_map;   // K x n^2, rows vec(H_k)^H
  MatC power_map; // Lc x n^2, rows vec(D_l)^H

  [[nodiscard]] int size() const { return static_cast<int>(q.rows()); }

  /// Linear term for the current (S, W_bar) pair.
  [[nodiscard]] Vec linear_term(const SdpProblem& prob, const MatC& s,
                                const MatC& w_bar) const;
};

QpData build_qp(const SdpProblem& prob, double rho);
QpData build_qp(const SdpProblem& prob, double rho, const MatC& s,
                const MatC& w_bar, Vec* c_out);

}  // namespace cfmcast

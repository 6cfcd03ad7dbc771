#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

namespace cfmcast {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using VecC = Eigen::VectorXcd;
using MatC = Eigen::MatrixXcd;

struct GeometryConfig {
  double side_length = 750.0;   // meters, square area edge
  int num_aps = 9;              // L, must be a perfect square
  int antennas_per_ap = 4;      // N
  int num_ues = 10;             // K
  double wavelength_spacing = 0.5;
  double angular_spread_deg = 15.0;  // Gaussian local scattering ASD
  // UEs closer than this to any AP are redrawn; keeps the access SNR within
  // the operating range the pathloss model is meant for
  double min_access_distance_m = 10.0;

  void validate() const;  // throws std::invalid_argument
  [[nodiscard]] int dim() const { return num_aps * antennas_per_ap; }
};

struct LargeScaleParams {
  double pathloss_intercept_db = -30.5;
  double pathloss_slope_db = 36.7;   // dB per decade
  double shadow_std_db = 4.0;
  double shadow_decorrelation_m = 9.0;
  double noise_power_dbm = -94.0;

  void validate() const;
  [[nodiscard]] double noise_power_w() const {
    return std::pow(10.0, noise_power_dbm / 10.0) * 1e-3;
  }
};

/// One Monte Carlo drop: geometry, large-scale fading and sampled channels.
/// Immutable after construction; safe to share across threads.
struct NetworkRealization {
  int num_aps = 0;
  int num_antennas = 0;
  int num_ues = 0;
  double side_length = 0.0;

  Mat ap_positions;   // L x 2, meters
  Mat ue_positions;   // K x 2, meters
  Mat distances;      // K x L, wrap-around meters
  Mat shadow_db;      // K x L (F_kl)
  Mat gains;          // K x L, linear
  std::vector<std::vector<MatC>> correlation;  // [k][l], N x N Hermitian PSD
  std::vector<std::vector<VecC>> channels;     // [k][l], N-vectors
  Vec noise_var;      // K, linear watts

  [[nodiscard]] int dim() const { return num_aps * num_antennas; }

  /// Concatenated channel of UE k across all APs, length L*N.
  [[nodiscard]] VecC stacked_channel(int k) const;
};

/// AP grid + uniform UE placement; deterministic given seed.
std::pair<Mat, Mat> place_network(const GeometryConfig& cfg, std::uint64_t seed);

/// Torus distance: min over the nine shifted copies of b.
double wrap_distance(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                     double side);

/// Distance-dependent pathloss in dB, before shadowing.
double pathloss_db(double distance_m, const LargeScaleParams& params);

/// K x K shadow-fading covariance shared by every AP (cross-AP draws are
/// independent). Entry (k,i) = std^2 * 2^(-delta_ki / decorrelation).
Mat shadow_covariance(const Mat& ue_positions, double side,
                      const LargeScaleParams& params);

/// Gaussian local scattering correlation matrix for a ULA: nominal azimuth
/// angle, angular standard deviation in radians, antenna spacing in
/// wavelengths. Scaled so trace(R) = N * gain.
MatC local_scattering_correlation(int num_antennas, double gain,
                                  double azimuth_rad, double asd_rad,
                                  double spacing);

/// Full drop: placement, pathloss + correlated shadowing, correlation
/// matrices and correlated Rayleigh channel samples.
NetworkRealization generate_network(const GeometryConfig& cfg,
                                    const LargeScaleParams& params,
                                    std::uint64_t seed);

/// h = R^{1/2} g with g standard complex Gaussian. Throws on an
/// indefinite correlation matrix.
VecC sample_channel(const MatC& correlation, class RandomStream& stream);

}  // namespace cfmcast

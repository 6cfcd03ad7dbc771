#include "cfmcast/netsim.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cfmcast/rng.hpp"

namespace cfmcast {

namespace {

// sub-stream purpose tags
constexpr std::uint64_t kTagUePos = 1;
constexpr std::uint64_t kTagShadow = 2;
constexpr std::uint64_t kTagChannel = 3;

int integer_sqrt(int v) {
  const int r = static_cast<int>(std::llround(std::sqrt(static_cast<double>(v))));
  return r * r == v ? r : -1;
}

}  // namespace

void GeometryConfig::validate() const {
  if (num_aps < 1 || integer_sqrt(num_aps) < 0) {
    throw std::invalid_argument("num_aps must be a positive perfect square");
  }
  if (antennas_per_ap < 1) throw std::invalid_argument("antennas_per_ap >= 1");
  if (num_ues < 1) throw std::invalid_argument("num_ues >= 1");
  if (side_length <= 0.0) throw std::invalid_argument("side_length > 0");
  if (min_access_distance_m < 0.0) {
    throw std::invalid_argument("min_access_distance_m >= 0");
  }
  // rejection sampling must leave room between AP exclusion disks
  const double spacing = side_length / integer_sqrt(num_aps);
  if (min_access_distance_m >= 0.5 * spacing) {
    throw std::invalid_argument(
        "min_access_distance_m must be below half the AP grid spacing");
  }
}

void LargeScaleParams::validate() const {
  if (shadow_std_db < 0.0) throw std::invalid_argument("shadow_std_db >= 0");
  if (shadow_decorrelation_m <= 0.0) {
    throw std::invalid_argument("shadow_decorrelation_m > 0");
  }
}

VecC NetworkRealization::stacked_channel(int k) const {
  VecC h(dim());
  for (int l = 0; l < num_aps; ++l) {
    h.segment(l * num_antennas, num_antennas) = channels[k][l];
  }
  return h;
}

std::pair<Mat, Mat> place_network(const GeometryConfig& cfg,
                                  std::uint64_t seed) {
  cfg.validate();
  const int grid = integer_sqrt(cfg.num_aps);
  const double spacing = cfg.side_length / grid;

  Mat aps(cfg.num_aps, 2);
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      aps(i * grid + j, 0) = spacing * (j + 0.5);
      aps(i * grid + j, 1) = spacing * (i + 0.5);
    }
  }

  Mat ues(cfg.num_ues, 2);
  RandomStream root(seed);
  for (int k = 0; k < cfg.num_ues; ++k) {
    RandomStream s = root.split(kTagUePos, static_cast<std::uint64_t>(k));
    // Redraw positions closer than the access limit to any AP; each UE uses
    // its own sub-stream, so rejections never shift the other UEs' draws.
    while (true) {
      // next_uniform is in (0,1]; wrap the endpoint so positions lie in [0, side)
      ues(k, 0) = std::fmod(s.next_uniform() * cfg.side_length, cfg.side_length);
      ues(k, 1) = std::fmod(s.next_uniform() * cfg.side_length, cfg.side_length);
      double nearest = std::numeric_limits<double>::infinity();
      for (int l = 0; l < cfg.num_aps; ++l) {
        nearest = std::min(nearest, wrap_distance(ues.row(k), aps.row(l),
                                                  cfg.side_length));
      }
      if (nearest >= cfg.min_access_distance_m) break;
    }
  }
  return {aps, ues};
}

double wrap_distance(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                     double side) {
  double best = std::numeric_limits<double>::infinity();
  for (int dx = -1; dx <= 1; ++dx) {
    for (int dy = -1; dy <= 1; ++dy) {
      const double ddx = b(0) + dx * side - a(0);
      const double ddy = b(1) + dy * side - a(1);
      best = std::min(best, std::hypot(ddx, ddy));
    }
  }
  return best;
}

double pathloss_db(double distance_m, const LargeScaleParams& params) {
  if (distance_m <= 0.0) throw std::domain_error("pathloss: distance must be > 0");
  return params.pathloss_intercept_db -
         params.pathloss_slope_db * std::log10(distance_m);
}

Mat shadow_covariance(const Mat& ue_positions, double side,
                      const LargeScaleParams& params) {
  const int k_count = static_cast<int>(ue_positions.rows());
  if (k_count < 1) throw std::invalid_argument("shadow_covariance: no UEs");
  const double var = params.shadow_std_db * params.shadow_std_db;
  Mat cov(k_count, k_count);
  for (int k = 0; k < k_count; ++k) {
    for (int i = k; i < k_count; ++i) {
      const double delta = wrap_distance(ue_positions.row(k), ue_positions.row(i), side);
      cov(k, i) = cov(i, k) =
          var * std::exp2(-delta / params.shadow_decorrelation_m);
    }
  }
  return cov;
}

MatC local_scattering_correlation(int num_antennas, double gain,
                                  double azimuth_rad, double asd_rad,
                                  double spacing) {
  MatC corr(num_antennas, num_antennas);
  const double sin_phi = std::sin(azimuth_rad);
  const double cos_phi = std::cos(azimuth_rad);
  for (int m = 0; m < num_antennas; ++m) {
    for (int nn = 0; nn < num_antennas; ++nn) {
      const double arg = 2.0 * std::numbers::pi * spacing * (m - nn);
      const double damp = asd_rad * arg * cos_phi;
      corr(m, nn) = gain * std::polar(std::exp(-0.5 * damp * damp), arg * sin_phi);
    }
  }
  return corr;
}

VecC sample_channel(const MatC& correlation, RandomStream& stream) {
  const int n = static_cast<int>(correlation.rows());
  Eigen::SelfAdjointEigenSolver<MatC> eig(correlation);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("sample_channel: eigendecomposition failed");
  }
  const double trace = correlation.real().trace();
  if (eig.eigenvalues().minCoeff() < -1e-10 * std::max(trace, 1e-300)) {
    throw std::runtime_error("sample_channel: correlation matrix not PSD");
  }
  VecC g(n);
  for (int i = 0; i < n; ++i) g(i) = stream.next_cnormal();
  const Vec clipped = eig.eigenvalues().cwiseMax(0.0);
  return eig.eigenvectors() * (clipped.cwiseSqrt().asDiagonal() *
                               (eig.eigenvectors().adjoint() * g));
}

NetworkRealization generate_network(const GeometryConfig& cfg,
                                    const LargeScaleParams& params,
                                    std::uint64_t seed) {
  cfg.validate();
  params.validate();

  NetworkRealization net;
  net.num_aps = cfg.num_aps;
  net.num_antennas = cfg.antennas_per_ap;
  net.num_ues = cfg.num_ues;
  net.side_length = cfg.side_length;

  std::tie(net.ap_positions, net.ue_positions) = place_network(cfg, seed);
  const int L = cfg.num_aps;
  const int K = cfg.num_ues;

  net.distances.resize(K, L);
  for (int k = 0; k < K; ++k) {
    for (int l = 0; l < L; ++l) {
      net.distances(k, l) = wrap_distance(net.ue_positions.row(k),
                                          net.ap_positions.row(l),
                                          cfg.side_length);
    }
  }

  // Correlated shadowing: one K x K covariance, factored once, with an
  // independent K-vector draw per AP.
  RandomStream root(seed);
  const Mat cov = shadow_covariance(net.ue_positions, cfg.side_length, params);
  Eigen::SelfAdjointEigenSolver<Mat> cov_eig(cov);
  const Mat cov_sqrt = cov_eig.eigenvectors() *
                       cov_eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                       cov_eig.eigenvectors().transpose();
  net.shadow_db.resize(K, L);
  for (int l = 0; l < L; ++l) {
    RandomStream s = root.split(kTagShadow, static_cast<std::uint64_t>(l));
    Vec g(K);
    for (int k = 0; k < K; ++k) g(k) = s.next_normal();
    net.shadow_db.col(l) = cov_sqrt * g;
  }

  net.gains.resize(K, L);
  const double asd = cfg.angular_spread_deg * std::numbers::pi / 180.0;
  net.correlation.assign(K, std::vector<MatC>(L));
  net.channels.assign(K, std::vector<VecC>(L));
  for (int k = 0; k < K; ++k) {
    for (int l = 0; l < L; ++l) {
      const double beta_db =
          pathloss_db(net.distances(k, l), params) + net.shadow_db(k, l);
      net.gains(k, l) = std::pow(10.0, beta_db / 10.0);

      // azimuth from AP to the nearest wrapped copy of the UE
      double best = std::numeric_limits<double>::infinity();
      double azimuth = 0.0;
      for (int dx = -1; dx <= 1; ++dx) {
        for (int dy = -1; dy <= 1; ++dy) {
          const double ddx =
              net.ue_positions(k, 0) + dx * cfg.side_length - net.ap_positions(l, 0);
          const double ddy =
              net.ue_positions(k, 1) + dy * cfg.side_length - net.ap_positions(l, 1);
          const double d = std::hypot(ddx, ddy);
          if (d < best) {
            best = d;
            azimuth = std::atan2(ddy, ddx);
          }
        }
      }
      net.correlation[k][l] = local_scattering_correlation(
          cfg.antennas_per_ap, net.gains(k, l), azimuth, asd,
          cfg.wavelength_spacing);

      RandomStream s = root.split(kTagChannel).split(
          static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(l));
      net.channels[k][l] = sample_channel(net.correlation[k][l], s);
    }
  }

  net.noise_var = Vec::Constant(K, params.noise_power_w());
  return net;
}

}  // namespace cfmcast

#include <doctest.h>

#include "cfmcast/problem.hpp"
#include "cfmcast/rng.hpp"

using namespace cfmcast;

namespace {

NetworkRealization random_net(int num_aps, int num_antennas, int num_ues,
                              std::uint64_t seed, double noise = 1.0) {
  NetworkRealization net;
  net.num_aps = num_aps;
  net.num_antennas = num_antennas;
  net.num_ues = num_ues;
  net.side_length = 1.0;
  net.channels.assign(num_ues, std::vector<VecC>(num_aps));
  RandomStream rng(seed);
  for (int k = 0; k < num_ues; ++k) {
    for (int l = 0; l < num_aps; ++l) {
      VecC h(num_antennas);
      for (int a = 0; a < num_antennas; ++a) h(a) = rng.next_cnormal();
      net.channels[k][l] = h;
    }
  }
  net.noise_var = Vec::Constant(num_ues, noise);
  return net;
}

MatC random_hermitian(int n, RandomStream& rng) {
  MatC m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = rng.next_cnormal();
  }
  return 0.5 * (m + m.adjoint()).eval();
}

}  // namespace

TEST_CASE("H_k traces match channel norms") {
  const NetworkRealization net = random_net(3, 2, 4, 1, 0.5);
  const SdpProblem prob = SdpProblem::mmf(net, Vec::Constant(3, 1.0));
  for (int k = 0; k < 4; ++k) {
    CHECK(prob.snr_mat(k).real().trace() ==
          doctest::Approx(net.stacked_channel(k).squaredNorm() / 0.5));
  }
}

TEST_CASE("selector property: tr(D_l w w^H) is the block power") {
  const NetworkRealization net = random_net(3, 2, 1, 2);
  const SdpProblem prob = SdpProblem::mmf(net, Vec::Constant(3, 1.0));
  RandomStream rng(7);
  VecC w(prob.dim());
  for (int i = 0; i < w.size(); ++i) w(i) = rng.next_cnormal();
  const Vec powers = prob.apply_power_selectors(w * w.adjoint());
  for (int l = 0; l < 3; ++l) {
    CHECK(powers(l) == doctest::Approx(w.segment(2 * l, 2).squaredNorm()));
  }
}

TEST_CASE("scalar instance") {
  NetworkRealization net = random_net(1, 1, 1, 3);
  net.channels[0][0](0) = 1.0;
  const SdpProblem prob = SdpProblem::mmf(net, Vec::Constant(1, 1.0));
  CHECK(prob.snr_mat(0)(0, 0).real() == doctest::Approx(1.0));
  CHECK(prob.power_mat(0)(0, 0).real() == doctest::Approx(1.0));
}

TEST_CASE("QoS build validates targets") {
  const NetworkRealization net = random_net(2, 2, 3, 4);
  const Vec p = Vec::Constant(2, 1.0);
  CHECK_NOTHROW(SdpProblem::qos(net, p, Vec::Constant(3, 255.0)));
  // heterogeneous targets are accepted
  Vec gamma(3);
  gamma << 1.0, 2.0, 3.0;
  const SdpProblem prob = SdpProblem::qos(net, p, gamma);
  CHECK(prob.targets() == gamma);
  CHECK_THROWS_AS(SdpProblem::qos(net, p, Vec::Zero(3)),
                  std::invalid_argument);
}

TEST_CASE("SEA penalty fold-in") {
  const NetworkRealization net = random_net(2, 2, 2, 5);
  const SdpProblem prob = SdpProblem::mmf(net, Vec::Constant(2, 1.0));
  RandomStream rng(8);
  VecC u(prob.dim());
  for (int i = 0; i < u.size(); ++i) u(i) = rng.next_cnormal();
  u /= u.norm();

  SUBCASE("zeta = 0 leaves D unchanged") {
    const SdpProblem p0 = prob.with_penalty(u, 0.0);
    CHECK(p0.power_mat(0).isApprox(prob.power_mat(0)));
  }
  SUBCASE("u^H D u grows by exactly zeta") {
    const double zeta = 3.5;
    const SdpProblem p1 = prob.with_penalty(u, zeta);
    const auto quad = [&u](const MatC& d) {
      return (u.adjoint() * d * u)(0).real();
    };
    CHECK(quad(p1.power_mat(1)) - quad(prob.power_mat(1)) ==
          doctest::Approx(zeta));
  }
  SUBCASE("orthogonal penalties commute") {
    VecC u2(prob.dim());
    for (int i = 0; i < u2.size(); ++i) u2(i) = rng.next_cnormal();
    u2 -= u * (u.adjoint() * u2)(0);
    u2 /= u2.norm();
    const MatC a = prob.with_penalty(u, 1.0).with_penalty(u2, 2.0).power_mat(0);
    const MatC b = prob.with_penalty(u2, 2.0).with_penalty(u, 1.0).power_mat(0);
    CHECK(a.isApprox(b, 1e-12));
  }
  SUBCASE("fold-in identity on random Hermitian W") {
    const double zeta = 2.0;
    const SdpProblem p1 = prob.with_penalty(u, zeta);
    const MatC w = random_hermitian(prob.dim(), rng);
    for (int l = 0; l < 2; ++l) {
      const double lhs = prob.apply_power_selectors(w)(l) +
                         zeta * (u.adjoint() * w * u)(0).real();
      const double rhs =
          p1.power_mat(l).cwiseProduct(w.conjugate()).sum().real();
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
  }
  SUBCASE("negative zeta rejected") {
    CHECK_THROWS_AS(prob.with_penalty(u, -1.0), std::invalid_argument);
  }
  SUBCASE("non-unit direction rejected") {
    CHECK_THROWS_AS(prob.with_penalty(2.0 * u, 1.0), std::invalid_argument);
  }
}

TEST_CASE("Q structure") {
  const NetworkRealization net = random_net(2, 2, 3, 6);
  const SdpProblem prob = SdpProblem::mmf(net, Vec::Constant(2, 1.0));
  const QpData qp = build_qp(prob, 0.7);
  CHECK((qp.q - qp.q.transpose()).norm() <= 1e-10 * qp.q.norm());
  Eigen::SelfAdjointEigenSolver<Mat> eig(qp.q);
  CHECK(eig.eigenvalues().minCoeff() >= -1e-8 * qp.q.norm());
}

TEST_CASE("linear term with zero S and W_bar") {
  const NetworkRealization net = random_net(2, 1, 2, 7);
  const Vec p = Vec::Constant(2, 1.5);
  const MatC zero = MatC::Zero(2, 2);

  const SdpProblem mmf = SdpProblem::mmf(net, p);
  const QpData qp_mmf = build_qp(mmf, 1.0);
  const Vec c_mmf = qp_mmf.linear_term(mmf, zero, zero);
  CHECK(c_mmf.head(2).norm() == doctest::Approx(0.0));
  CHECK(c_mmf.tail(2) == p);

  const Vec gamma = Vec::Constant(2, 4.0);
  const SdpProblem qos = SdpProblem::qos(net, p, gamma);
  const QpData qp_qos = build_qp(qos, 1.0);
  const Vec c_qos = qp_qos.linear_term(qos, zero, zero);
  CHECK(c_qos.head(2) == -gamma);
  CHECK(c_qos.tail(2).norm() == doctest::Approx(0.0));
}

TEST_CASE("unit instance gives the 2x2 block Q") {
  NetworkRealization net = random_net(1, 1, 1, 8);
  net.channels[0][0](0) = 1.0;
  const SdpProblem prob = SdpProblem::mmf(net, Vec::Constant(1, 1.0));
  const QpData qp = build_qp(prob, 1.0);
  Mat expected(2, 2);
  expected << 1, -1, -1, 1;
  CHECK(qp.q.isApprox(expected, 1e-12));
}

TEST_CASE("QP objective equals the lifted augmented-Lagrangian objective") {
  const NetworkRealization net = random_net(2, 2, 3, 9);
  const Vec p = Vec::Constant(2, 1.0);
  const double rho = 0.3;
  RandomStream rng(10);
  for (int variant = 0; variant < 2; ++variant) {
    const SdpProblem prob =
        variant == 0 ? SdpProblem::mmf(net, p)
                     : SdpProblem::qos(net, p, Vec::Constant(3, 2.0));
    const QpData qp = build_qp(prob, rho);
    for (int trial = 0; trial < 20; ++trial) {
      Vec y(3), z(2);
      for (int i = 0; i < 3; ++i) y(i) = rng.next_uniform();
      for (int i = 0; i < 2; ++i) z(i) = rng.next_uniform();
      const MatC s = random_hermitian(prob.dim(), rng);
      const MatC w_bar = random_hermitian(prob.dim(), rng);
      const Vec c = qp.linear_term(prob, s, w_bar);
      Vec x(5);
      x << y, z;
      const double r_sq = (s + w_bar).squaredNorm();
      const double qp_obj =
          0.5 * x.dot(qp.q * x) + c.dot(x) + 0.5 * rho * r_sq;
      const double direct =
          (variant == 0 ? z.dot(p) : -y.dot(prob.targets())) +
          0.5 * rho *
              (prob.adjoint_snr(y) + s - prob.adjoint_power(z) + w_bar)
                  .squaredNorm();
      CHECK(qp_obj == doctest::Approx(direct).epsilon(1e-8));
    }
  }
}

TEST_CASE("sum-power variant") {
  const NetworkRealization net = random_net(2, 2, 2, 11);
  const Vec p = Vec::Constant(2, 1.0);
  const SdpProblem qos = SdpProblem::qos(net, p, Vec::Constant(2, 2.0));
  const SdpProblem sum = qos.sum_power_variant();
  CHECK(sum.num_power_constraints() == 1);
  CHECK(sum.budgets()(0) == doctest::Approx(2.0));
  CHECK(sum.power_mat(0).isApprox(MatC::Identity(4, 4)));
  RandomStream rng(12);
  const MatC w = random_hermitian(4, rng);
  CHECK(sum.apply_power_selectors(w)(0) == doctest::Approx(w.real().trace()));
  CHECK_THROWS_AS(SdpProblem::mmf(net, p).sum_power_variant(),
                  std::logic_error);
}

TEST_CASE("zero channel is flagged, not fatal") {
  NetworkRealization net = random_net(1, 2, 2, 13);
  net.channels[1][0].setZero();
  const SdpProblem prob = SdpProblem::mmf(net, Vec::Constant(1, 1.0));
  CHECK(prob.has_zero_channel());
  CHECK(prob.snr_mat(1).norm() == doctest::Approx(0.0));
}

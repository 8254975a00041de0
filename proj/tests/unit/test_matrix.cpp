#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "flockswitch/matrix.hpp"
#include "support.hpp"

using namespace flockswitch;

TEST_CASE("stochasticity") {
  for (int n = 1; n <= 5; ++n) {
    CHECK(is_stochastic(Eigen::MatrixXd::Identity(n, n), 1e-12));
    CHECK(is_stochastic(Eigen::MatrixXd::Constant(n, n, 1.0 / n), 1e-12));
  }
  Eigen::Matrix2d a;
  a << 1.1, -0.1, 0.5, 0.5;
  CHECK_FALSE(is_stochastic(a, 1e-12));
  a << 0.5, 0.5 + 1e-9, 0.5, 0.5;
  CHECK_FALSE(is_stochastic(a, 1e-12));
  CHECK(is_stochastic(a, 1e-8));
}

TEST_CASE("ergodicity coefficient and scrambling") {
  for (int n = 2; n <= 6; ++n) {
    CHECK(ergodicity_coefficient(Eigen::MatrixXd::Identity(n, n)) == 0.0);
    CHECK_FALSE(is_scrambling(Eigen::MatrixXd::Identity(n, n)));
    CHECK(ergodicity_coefficient(Eigen::MatrixXd::Constant(n, n, 1.0 / n)) == doctest::Approx(1.0).epsilon(1e-14));
  }
  Eigen::Matrix2d neg;
  neg << 1.0, 0.0, -0.1, 1.1;
  CHECK_THROWS_WITH_AS(ergodicity_coefficient(neg), "not nonnegative", std::invalid_argument);
  CHECK_THROWS_AS(is_scrambling(neg), std::invalid_argument);

  // hand value: rows (.5,.5,0), (0,.5,.5), (.25,.25,.5)
  Eigen::Matrix3d m;
  m << 0.5, 0.5, 0.0,
       0.0, 0.5, 0.5,
       0.25, 0.25, 0.5;
  CHECK(ergodicity_coefficient(m) == doctest::Approx(0.5));

  fst::Rng rng(3);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = fst::uniform_int(rng, 2, 7);
    const Eigen::MatrixXd a = fst::random_stochastic(n, rng, 0.6);
    const double mu = ergodicity_coefficient(a);
    CHECK(mu >= 0.0);
    CHECK(mu <= 1.0 + 1e-12);
    CHECK(is_scrambling(a) == (mu > 0.0));
    const Eigen::MatrixXd pos = fst::random_matrix(n, n, rng, 0.01, 1.0);
    CHECK(is_scrambling(pos));
  }
}

TEST_CASE("1 - mu is submultiplicative") {
  fst::Rng rng(17);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = fst::uniform_int(rng, 2, 6);
    const Eigen::MatrixXd a = fst::random_stochastic(n, rng, 0.5);
    const Eigen::MatrixXd b = fst::random_stochastic(n, rng, 0.5);
    const double lhs = 1.0 - ergodicity_coefficient(Eigen::MatrixXd(a * b));
    const double rhs = (1.0 - ergodicity_coefficient(a)) * (1.0 - ergodicity_coefficient(b));
    CHECK(lhs <= rhs + 1e-12);
  }
}

TEST_CASE("update matrix") {
  Eigen::MatrixXd x(3, 1);
  x << 0.0, 1.0, 3.0;
  const std::vector<Edge> e{{1, 0}, {2, 0}, {0, 2}};
  const Digraph g(3, e);
  const auto w = CommunicationWeight::power_law(2.0, 0.5);
  const Eigen::MatrixXd m = update_matrix(x, g, 0.3, w);
  const double s = 0.3 / 3.0;
  CHECK(m(0, 1) == doctest::Approx(s * 2.0 / std::sqrt(2.0)));
  CHECK(m(0, 2) == doctest::Approx(s * 2.0 / std::sqrt(10.0)));
  CHECK(m(1, 0) == 0.0);
  CHECK(m(2, 0) == doctest::Approx(s * 2.0 / std::sqrt(10.0)));
  CHECK(m(1, 1) == 1.0);
  CHECK(is_stochastic(m, kFreshStochasticTol));
  CHECK(is_nonnegative(m));

  CHECK_THROWS_WITH_AS(update_matrix(x, g, 0.5, w), "stability condition violated: need 0 < h*kappa < 1",
                       std::domain_error);
  CHECK_THROWS_AS(update_matrix(x, g, 0.0, w), std::domain_error);

  fst::Rng rng(23);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = fst::uniform_int(rng, 1, 15);
    const Digraph gr = fst::random_digraph(n, rng, 0.4);
    const Eigen::MatrixXd pos = fst::random_matrix(n, 3, rng, -5, 5);
    const double kappa = 0.1 + 3.0 * rng.uniform();
    const double h = 0.999 * rng.uniform_open() / kappa;
    const Eigen::MatrixXd u = update_matrix(pos, gr, h, CommunicationWeight::power_law(kappa, rng.uniform()));
    CHECK(is_nonnegative(u));
    CHECK(is_stochastic(u, kFreshStochasticTol));
  }
}

TEST_CASE("flow product order") {
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(3, 3);
  const std::vector<Eigen::MatrixXd> ids{id, id};
  CHECK(flow_product<double>(ids) == id);
  fst::Rng rng(1);
  const Eigen::MatrixXd a = fst::random_stochastic(3, rng), b = fst::random_stochastic(3, rng);
  const std::vector<Eigen::MatrixXd> one{a};
  CHECK(flow_product<double>(one) == a);
  const std::vector<Eigen::MatrixXd> ab{a, b};
  CHECK(flow_product<double>(ab).isApprox(b * a, 1e-15));
  CHECK_THROWS_AS(flow_product<double>(std::span<const Eigen::MatrixXd>{}), std::invalid_argument);
  const std::vector<Eigen::MatrixXd> bad{a, Eigen::MatrixXd::Identity(2, 2)};
  CHECK_THROWS_AS(flow_product<double>(bad), std::invalid_argument);

  FlowAccumulator<double> acc(3);
  CHECK(acc.value() == id);
  acc.push(a);
  acc.push(b);
  CHECK(acc.value().isApprox(b * a, 1e-15));
  CHECK(acc.steps() == 2);
  acc.reset();
  CHECK(acc.value() == id);

  std::vector<Eigen::MatrixXd> many;
  for (int k = 0; k < 50; ++k) many.push_back(fst::random_stochastic(4, rng, 0.5));
  CHECK(is_stochastic(flow_product<double>(many), kProductStochasticTol));
}

TEST_CASE("rooted positive-diagonal products of length N-1 scramble") {
  fst::Rng rng(99);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = fst::uniform_int(rng, 3, 6);
    FlowAccumulator<double> acc(n);
    for (int k = 0; k < n - 1; ++k) acc.push(fst::random_stochastic_on(fst::planted_rooted(n, rng, 0.05), rng));
    CHECK(is_scrambling(acc.value()));
  }
}

TEST_CASE("diameter") {
  Eigen::MatrixXd x(3, 2);
  x << 0, 0, 3, 4, 1, 1;
  CHECK(diameter(x) == doctest::Approx(5.0));
  CHECK(diameter(Eigen::MatrixXd::Ones(1, 3)) == 0.0);
}

TEST_CASE("contraction inequality") {
  for (int n = 2; n <= 5; ++n) {
    const Eigen::MatrixXd avg = Eigen::MatrixXd::Constant(n, n, 1.0 / n);
    fst::Rng rng(static_cast<std::uint64_t>(n));
    const auto c = contraction_check(avg, fst::random_matrix(n, 2, rng), Eigen::MatrixXd::Zero(n, 2));
    CHECK(c.lhs == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(c.holds(1e-12));
  }
  fst::Rng rng(7);
  for (int trial = 0; trial < 3000; ++trial) {
    const int n = fst::uniform_int(rng, 2, 8);
    const int d = fst::uniform_int(rng, 1, 3);
    const Eigen::MatrixXd a = fst::random_stochastic(n, rng, 0.5);
    const Eigen::MatrixXd z = fst::random_matrix(n, d, rng, -3, 3);
    const Eigen::MatrixXd b = fst::random_matrix(n, d, rng, -0.5, 0.5) * rng.uniform();
    CHECK(contraction_check(a, z, b).holds(1e-10));
    // B = 0: the pure diameter contraction
    const auto c0 = contraction_check(a, z, Eigen::MatrixXd::Zero(n, d));
    CHECK(c0.lhs <= (1.0 - ergodicity_coefficient(a)) * diameter(z) + 1e-12);
  }
  Eigen::Matrix2d not_stochastic;
  not_stochastic << 1, 1, 0, 1;
  CHECK_THROWS_AS(contraction_check(not_stochastic, Eigen::MatrixXd::Zero(2, 1), Eigen::MatrixXd::Zero(2, 1)),
                  std::invalid_argument);
}

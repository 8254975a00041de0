#include "doctest.h"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "flockswitch/analysis.hpp"

using namespace flockswitch;

// Reference values from tests/oracles/series_oracle.py (mpmath, 50 digits).
namespace oracle {
constexpr double envelope_r5 = 0.86608581065125118676;
constexpr double p1_c = 2.3491382267654612242;
constexpr double p1_n10 = 0.94264077365937528632;
constexpr double p2_poisson_n20 = 4.7963188837259881732e-17;
constexpr double p2_geometric_n20 = 1.8344411350866601685e-14;
constexpr double xinf_lhs_constant = 632.63741842154591715;
}  // namespace oracle

namespace {

FrameworkParams small_params() {
  FrameworkParams p;
  p.n_agents = 2;
  p.probs = {1.0};
  p.h = 0.1;
  p.weight = CommunicationWeight::constant(1.0);
  p.M = 1;
  p.n = 2;
  p.c = 1;
  p.epsilon = 0;
  return p;
}

}  // namespace

TEST_CASE("velocity decay envelope against the oracle") {
  const FrameworkParams p = small_params();
  CHECK(velocity_decay_envelope(5, p) == doctest::Approx(oracle::envelope_r5).epsilon(1e-13));
  CHECK(velocity_decay_envelope(0, p) == 1.0);
  double prev = 1.0;
  for (std::int64_t r = 1; r < 2000; r += 7) {
    const double e = velocity_decay_envelope(r, p);
    CHECK(e < prev);
    prev = e;
  }
  FrameworkParams wide = p;
  wide.c = 10;
  wide.M = 20;
  CHECK(envelope_exponent(wide) < 0);
  CHECK_THROWS_WITH_AS(velocity_decay_envelope(3, wide), "divergent envelope exponent", std::domain_error);
}

TEST_CASE("ergodicity lower bound by hand") {
  FrameworkParams p = small_params();
  // (1 - h kappa)^L (h phi / (N (1 - h kappa)))^(N-1) with N = 2, L = 3
  CHECK(ergodicity_lower_bound(3, p) == doctest::Approx(std::pow(0.9, 3) * 0.1 / (2 * 0.9)).epsilon(1e-14));
  p.n_agents = 4;
  p.weight = CommunicationWeight::power_law(2.0, 1.0);
  p.h = 0.2;
  p.x_inf = 3.0;
  const double phi = 2.0 / 10.0, hk = 0.4;
  CHECK(ergodicity_lower_bound(7, p) == doctest::Approx(std::pow(1 - hk, 7) * std::pow(0.2 * phi / (4 * (1 - hk)), 3)));
  p.x_inf.reset();
  CHECK_THROWS_AS(ergodicity_lower_bound(7, p), std::invalid_argument);
  p.h = 0.5;
  CHECK_THROWS_AS(ergodicity_lower_bound(7, p, 1.0), std::domain_error);
}

TEST_CASE("exp inequality") {
  for (double delta = 0.05; delta < 12; delta *= 1.37)
    for (double x = 1e-3; x < 1e3; x *= 1.21) {
      const auto [lhs, rhs] = exp_inequality_check(x, delta);
      CHECK(lhs <= rhs * (1 + 1e-14));
    }
  // equality at x = delta
  const auto [l, r] = exp_inequality_check(2.5, 2.5);
  CHECK(l == doctest::Approx(r).epsilon(1e-14));
}

TEST_CASE("spatial bound for constant phi against the oracle") {
  FrameworkParams p = small_params();
  p.delta = 2.0;
  const double lhs = xinf_lhs(p, 1.0, 1.0, 10.0);
  CHECK(lhs >= oracle::xinf_lhs_constant * (1 - 1e-13));
  CHECK(lhs == doctest::Approx(oracle::xinf_lhs_constant).epsilon(1e-9));
  CHECK(xinf_lhs(p, 1.0, 1.0, 1e6) == lhs);
  const XinfResult x = xinf_exists(p, 1.0, 1.0);
  REQUIRE(x.x_inf);
  CHECK(*x.x_inf == doctest::Approx(lhs).epsilon(1e-10));
  CHECK(*x.x_inf > lhs);

  p.delta = 0.5;  // below 1/A
  CHECK_THROWS_AS(xinf_exists(p, 1.0, 1.0), std::domain_error);
}

TEST_CASE("delta and epsilon windows") {
  FrameworkParams p = small_params();
  const auto [lo, hi] = delta_window(p);
  CHECK(lo == doctest::Approx(1.0 / (1.0 + 2.0 * std::log(0.9))));
  CHECK(std::isinf(hi));
  CHECK(default_delta(p) == doctest::Approx(lo + 1.0));
  p.epsilon = 0.1;
  CHECK(delta_window(p).second == doctest::Approx(10.0));
  CHECK(default_delta(p) == doctest::Approx(0.5 * (lo + 10.0)));
  const BoundReport rep = check_delta_window(p);
  CHECK(rep.find("delta inside its window")->pass == true);
}

TEST_CASE("flocking conditions") {
  FrameworkParams p;
  p.n_agents = 5;
  p.probs = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  p.h = 0.1;
  p.weight = CommunicationWeight::constant(1.0);
  p.M = 1;
  p.epsilon = 0;
  // (M+N-1) log(1/0.9) / log(1.5)
  const double ratio = 5 * std::log(1 / 0.9) / std::log(1.5);
  CHECK(theorem_3_1_ratio(p) == doctest::Approx(ratio));
  BoundReport rep = check_theorem_3_1(p);
  CHECK_FALSE(rep.passed());
  CHECK(rep.entries.front().pass == true);

  p.h = 0.01;
  rep = check_theorem_3_1(p);
  CHECK(rep.passed());

  p.h = 1.0;
  rep = check_theorem_3_1(p);
  CHECK_FALSE(rep.passed());
  CHECK(rep.entries.front().pass == false);
  CHECK(rep.entries.front().label.find("stability") != std::string::npos);

  // tail exponent of phi must not exceed epsilon
  p.h = 0.01;
  p.weight = CommunicationWeight::power_law(1.0, 0.05);
  p.epsilon = 0.05;
  CHECK_FALSE(check_theorem_3_1(p).passed());
  p.epsilon = 0.1;
  CHECK(check_theorem_3_1(p).passed());
}

TEST_CASE("p1 against the oracle") {
  const std::vector<double> probs{0.6, 0.4};
  const double p1 = p1_lower_bound(10, oracle::p1_c, probs);
  CHECK(p1 <= oracle::p1_n10 * (1 + 1e-13));
  CHECK(p1 == doctest::Approx(oracle::p1_n10).epsilon(1e-10));
  CHECK(p1_lower_bound(20, oracle::p1_c, probs) > p1);

  // q = 0 counts the j >= 1 with floor(c log j) = 0, i.e. j < e^(1/c)
  CHECK(p1_inner_series(0.0, 1.0).value == 2.0);
  CHECK(p1_inner_series(0.0, 0.5).value == 7.0);
  // c < 1/log(1/q) diverges; hypothesis violation names k
  const std::vector<double> bad{0.9, 0.1};
  CHECK_THROWS_WITH_AS(p1_lower_bound(10, 2.0, bad), doctest::Contains("k = 2"), std::domain_error);
  const std::vector<double> many{0.1, 0.1, 0.1, 0.7};
  CHECK_THROWS_AS(p1_lower_bound(1, 100.0, many), std::domain_error);
}

TEST_CASE("zeta upper bound") {
  const SeriesValue z2 = zeta_upper(2.0);
  CHECK(z2.value >= std::numbers::pi * std::numbers::pi / 6);
  CHECK(z2.value == doctest::Approx(std::numbers::pi * std::numbers::pi / 6).epsilon(1e-13));
  CHECK(zeta_upper(4.0).value == doctest::Approx(std::pow(std::numbers::pi, 4) / 90).epsilon(1e-13));
  CHECK(zeta_upper(1.0001).value > 9999.0);
  CHECK_THROWS_AS(zeta_upper(1.0), std::domain_error);
}

TEST_CASE("p2 bounds against the oracle") {
  const auto mp = smallest_valid_M_poisson(1.0, 3, 1.0);
  REQUIRE(mp);
  CHECK(*mp == 7);
  const double pp = p2_poisson(20, 1.0, 7, 3, 1.0);
  CHECK(pp >= oracle::p2_poisson_n20 * (1 - 1e-13));
  CHECK(pp == doctest::Approx(oracle::p2_poisson_n20).epsilon(1e-9));

  const auto mg = smallest_valid_M_geometric(1.0, 3, 0.9);
  REQUIRE(mg);
  CHECK(*mg == 2);
  const double pg = p2_geometric(20, 1.0, 2, 3, 0.9);
  CHECK(pg >= oracle::p2_geometric_n20 * (1 - 1e-13));
  CHECK(pg == doctest::Approx(oracle::p2_geometric_n20).epsilon(1e-9));

  double prev_p = 1e300, prev_g = 1e300;
  for (std::int64_t n = 1; n <= 60; ++n) {
    const double a = p2_poisson(n, 1.0, 7, 3, 1.0), b = p2_geometric(n, 1.0, 2, 3, 0.9);
    CHECK(a < prev_p);
    CHECK(b < prev_g);
    prev_p = a;
    prev_g = b;
  }
  CHECK_THROWS_AS(p2_poisson(20, 1.0, 6, 3, 1.0), std::domain_error);
  CHECK_THROWS_AS(p2_geometric(20, 1.0, 1, 3, 0.9), std::domain_error);
  CHECK(p2_geometric(20, 1.0, 1, 3, 1.0) == 0.0);

  // searched M is minimal
  for (double c : {0.5, 1.0, 2.0})
    for (int N : {2, 3, 6})
      for (double lam : {0.2, 1.0, 3.0}) {
        const auto m = smallest_valid_M_poisson(c, N, lam);
        REQUIRE(m);
        CHECK(poisson_report(10, c, double(*m), N, lam).passed());
        CHECK_FALSE(poisson_report(10, c, double(*m - 1), N, lam).passed());
      }
  const BoundReport low = poisson_report(10, 1.0, 3, 3, 1.0);
  CHECK_FALSE(low.passed());
  CHECK(low.entries.back().note.find("smallest valid M is 7") != std::string::npos);
}

TEST_CASE("continuous-time conditions") {
  const std::vector<double> probs{0.5, 0.5};
  CHECK(check_theorem_5_1(3, 0.05, 1.0, 7.0, probs, 0.02).passed());
  CHECK_FALSE(check_theorem_5_1(3, 1.0, 1.0, 7.0, probs, 0.02).passed());
  CHECK_FALSE(check_theorem_5_1(3, 0.05, 1.0, 7.0, probs, 0.5).passed());
}

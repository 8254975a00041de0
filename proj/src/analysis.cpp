#include "flockswitch/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

namespace flockswitch {

namespace {

std::string num(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSeriesRelTol = 1e-16;

void require_agents(int n_agents) {
  if (n_agents < 2) throw std::invalid_argument("bound needs N >= 2 agents");
}

// log(1/(1-x)) for x in (0,1), +inf at x >= 1.
double log_inv_complement(double x) { return x >= 1.0 ? kInf : -std::log1p(-x); }

BoundEntry condition(std::string label, double value, double margin, std::string note = {}) {
  return {std::move(label), value, margin > 0.0, margin, std::move(note)};
}

BoundEntry info(std::string label, double value, std::string note = {}) {
  return {std::move(label), value, std::nullopt, std::nullopt, std::move(note)};
}

// log of (1-hk)^{(M+N-1)(n + c log(N-1))} (h phi / (N (1-hk)))^{N-1}
double log_envelope_rate(const FrameworkParams& p, double phi) {
  const double hk = p.h_kappa();
  const int N = p.n_agents;
  const double window = (p.M + N - 1) * (static_cast<double>(p.n) + p.c * std::log(N - 1.0));
  return window * std::log1p(-hk) + (N - 1) * (std::log(p.h * phi) - std::log(static_cast<double>(N)) - std::log1p(-hk));
}

double phi_at_xinf(const FrameworkParams& p) {
  if (p.weight.kind() == CommunicationWeight::Kind::Constant) return p.kappa();
  if (!p.x_inf) throw std::invalid_argument("bound needs x_inf");
  return p.weight(*p.x_inf);
}

void require_stable(const FrameworkParams& p) {
  const double hk = p.h_kappa();
  if (!(hk > 0.0 && hk < 1.0)) throw std::domain_error("stability condition violated: need 0 < h*kappa < 1");
}

}  // namespace

bool BoundReport::passed() const {
  return std::none_of(entries.begin(), entries.end(), [](const BoundEntry& e) { return e.pass && !*e.pass; });
}

const BoundEntry* BoundReport::find(const std::string& label) const {
  for (const auto& e : entries)
    if (e.label == label) return &e;
  return nullptr;
}

// ---------------------------------------------------------------------------

double min_log_inverse_complement(std::span<const double> probs) {
  if (probs.empty()) throw std::invalid_argument("no choice probabilities");
  double best = kInf;
  for (double p : probs) best = std::min(best, log_inv_complement(p));
  return best;
}

double theorem_3_1_ratio(const FrameworkParams& p) {
  const double hk = p.h_kappa();
  if (!(hk < 1.0)) return kInf;
  return (p.M + p.n_agents - 1) * log_inv_complement(hk) / min_log_inverse_complement(p.probs);
}

BoundReport check_theorem_3_1(const FrameworkParams& p) {
  BoundReport rep;
  rep.name = "discrete flocking conditions";
  rep.inputs = {{"N", p.n_agents}, {"N_G", static_cast<double>(p.probs.size())}, {"h", p.h},
                {"kappa", p.kappa()}, {"M", p.M}, {"epsilon", p.epsilon}};
  const double hk = p.h_kappa();
  rep.entries.push_back(condition("0 < h*kappa < 1 (stability condition)", hk, std::min(hk, 1.0 - hk)));
  const double ratio = theorem_3_1_ratio(p);
  rep.entries.push_back(condition("(M+N-1) log(1/(1-h kappa)) / min_k log(1/(1-p_k)) < 1", ratio, 1.0 - ratio));
  const int N = p.n_agents;
  const double eps_bound = N > 1 ? (1.0 - ratio) / (N - 1) : kInf;
  rep.entries.push_back(condition("0 <= epsilon < 1/(N-1) - ratio/(N-1)", p.epsilon,
                                  p.epsilon >= 0.0 ? eps_bound - p.epsilon : p.epsilon,
                                  "upper end " + num(eps_bound)));
  const double tail = p.weight.tail_exponent();
  rep.entries.push_back({"1/phi(r) = O(r^epsilon)", tail, p.epsilon >= tail, p.epsilon - tail,
                         "tail exponent of phi is " + num(tail)});
  if (std::isfinite(ratio) && ratio < 1.0 && N > 1) rep.entries.push_back(info("log coefficient c from the proof", theorem_3_1_c(p)));
  return rep;
}

double theorem_3_1_c(const FrameworkParams& p) {
  const int N = p.n_agents;
  const double lo = 1.0 / min_log_inverse_complement(p.probs);
  const double hi = (1.0 - p.epsilon * (N - 1)) / ((p.M + N - 1) * log_inv_complement(p.h_kappa()));
  return 0.5 * (lo + hi);
}

double envelope_exponent(const FrameworkParams& p) {
  return 1.0 + p.c * (p.M + p.n_agents - 1) * std::log1p(-p.h_kappa());
}

std::pair<double, double> delta_window(const FrameworkParams& p) {
  const double a = envelope_exponent(p);
  const double lo = a > 0.0 ? 1.0 / a : kInf;
  const double hi = p.epsilon > 0.0 ? 1.0 / ((p.n_agents - 1) * p.epsilon) : kInf;
  return {lo, hi};
}

double default_delta(const FrameworkParams& p) {
  const auto [lo, hi] = delta_window(p);
  if (!std::isfinite(lo)) throw std::domain_error("divergent envelope exponent");
  return std::isfinite(hi) ? 0.5 * (lo + hi) : lo + 1.0;
}

BoundReport check_delta_window(const FrameworkParams& p) {
  require_agents(p.n_agents);
  BoundReport rep;
  rep.name = "delta window for the spatial-bound series";
  rep.inputs = {{"N", p.n_agents}, {"M", p.M}, {"n", static_cast<double>(p.n)}, {"c", p.c},
                {"epsilon", p.epsilon}};
  const double a = envelope_exponent(p);
  rep.entries.push_back(condition("1 + c (M+N-1) log(1-h kappa) > 0", a, a));
  const auto [lo, hi] = delta_window(p);
  rep.entries.push_back(info("delta lower end 1/(1 + c(M+N-1)log(1-h kappa))", lo));
  rep.entries.push_back(info("delta upper end 1/((N-1) epsilon)", hi));
  const double delta = p.delta.value_or(std::isfinite(lo) ? default_delta(p) : kInf);
  rep.entries.push_back(condition("delta inside its window", delta, std::min(delta - lo, hi - delta)));
  // Epsilon admissible for this c, next to the epsilon window of the theorem.
  const double eps_here = a / (p.n_agents - 1);
  const bool ok_here = p.epsilon < eps_here;
  const double ratio = theorem_3_1_ratio(p);
  const double eps_thm = (1.0 - ratio) / (p.n_agents - 1);
  const bool ok_thm = p.epsilon < eps_thm;
  rep.entries.push_back(info("epsilon upper end for this c", eps_here));
  rep.entries.push_back(info("epsilon upper end of the flocking conditions", eps_thm));
  rep.entries.push_back(
      {"epsilon windows agree", ok_here == ok_thm ? 1.0 : 0.0, std::nullopt, std::nullopt,
       ok_here == ok_thm ? "" : std::string("windows disagree: this c ") + (ok_here ? "admits" : "rejects") +
                                    " epsilon, the flocking conditions " + (ok_thm ? "admit it" : "reject it")});
  return rep;
}

// ---------------------------------------------------------------------------

double ergodicity_lower_bound(std::int64_t window_length, const FrameworkParams& p, double phi) {
  require_stable(p);
  if (window_length < 0) throw std::invalid_argument("negative window length");
  const double hk = p.h_kappa();
  const int N = p.n_agents;
  const double log_b = static_cast<double>(window_length) * std::log1p(-hk) +
                       (N - 1) * (std::log(p.h * phi) - std::log(static_cast<double>(N)) - std::log1p(-hk));
  return std::exp(log_b);
}

double ergodicity_lower_bound(std::int64_t window_length, const FrameworkParams& p) {
  return ergodicity_lower_bound(window_length, p, phi_at_xinf(p));
}

double velocity_decay_envelope(std::int64_t r, const FrameworkParams& p, double phi) {
  require_stable(p);
  require_agents(p.n_agents);
  if (r < 0) throw std::invalid_argument("negative window count");
  const double a = envelope_exponent(p);
  if (!(a > 0.0)) throw std::domain_error("divergent envelope exponent");
  const double k = std::exp(log_envelope_rate(p, phi));
  // ((r+1)^a - 1) / a, computed without cancellation for small a log(r+1)
  const double growth = std::expm1(a * std::log1p(static_cast<double>(r))) / a;
  return std::exp(-k * growth);
}

double velocity_decay_envelope(std::int64_t r, const FrameworkParams& p) {
  return velocity_decay_envelope(r, p, phi_at_xinf(p));
}

std::pair<double, double> exp_inequality_check(double x, double delta) {
  if (!(x > 0.0) || !(delta > 0.0)) throw std::invalid_argument("exp inequality needs x > 0 and delta > 0");
  return {std::exp(-x), std::exp(delta * (std::log(delta) - 1.0) - delta * std::log(x))};
}

// ---------------------------------------------------------------------------

SeriesValue xinf_series(const FrameworkParams& p, double delta) {
  require_agents(p.n_agents);
  const double a = envelope_exponent(p);
  if (!(a > 0.0)) throw std::domain_error("divergent envelope exponent");
  const double s = a * delta;
  if (!(s > 1.0)) throw std::domain_error("series divergent: delta must exceed 1/(1 + c(M+N-1)log(1-h kappa))");
  const double alpha = static_cast<double>(p.n) + p.c * std::log(p.n_agents - 1.0);
  const double c = p.c;
  auto term = [&](std::int64_t r) {
    const double x = static_cast<double>(r + 1);
    return (alpha + c * std::log(x)) * std::pow(std::expm1(a * std::log(x)), -delta);
  };
  // Tail sum_{r>=R} term(r) with x = r+1 >= X = R+1 and u = x^{-a} <= U = X^{-a}:
  //   (x^a - 1)^{-delta} = x^{-s} (1-u)^{-delta} <= x^{-s} (1 + C u),  C = ((1-U)^{-delta} - 1)/U  (convexity)
  //   sum_{x>=X} g_s(x) <= g_s(X) + I(s),  g_s(x) = (alpha + c log x) x^{-s} decreasing
  //   I(s) = int_X^inf g_s = (alpha + c log X) X^{1-s}/(s-1) + c X^{1-s}/(s-1)^2
  auto tail = [&](std::int64_t R) {
    const double X = static_cast<double>(R + 1);
    const double lx = std::log(X);
    if (s * (alpha + c * lx) < c) return kInf;  // g not yet decreasing
    auto bound = [&](double sigma) {
      const double w = alpha + c * lx;
      return w * std::exp(-sigma * lx) + w * std::exp((1.0 - sigma) * lx) / (sigma - 1.0) +
             c * std::exp((1.0 - sigma) * lx) / ((sigma - 1.0) * (sigma - 1.0));
    };
    const double U = std::exp(-a * lx);
    const double C = std::expm1(-delta * std::log1p(-U)) / U;
    return bound(s) + C * bound(s + a);
  };
  SeriesValue out;
  double sum = 0.0;
  std::int64_t r = 1;
  std::int64_t checkpoint = 64;
  constexpr std::int64_t kMaxTerms = std::int64_t{1} << 22;
  for (;;) {
    for (; r < checkpoint; ++r) sum += term(r);
    const double t = tail(r);
    if (t <= 1e-14 * sum || r >= kMaxTerms) {
      out.partial = sum;
      out.tail_bound = t;
      out.terms = r;
      out.value = sum + t;
      return out;
    }
    checkpoint *= 2;
  }
}

namespace {

struct XinfPieces {
  double base;     // DX0 + h DV0 (M+N-1)(n + c log(N-1))
  double log_coef; // log of h DV0 (M+N-1) (delta/e)^delta a^delta S, without the phi factor
  double delta;
};

XinfPieces xinf_pieces(const FrameworkParams& p, double init_dx, double init_dv, double delta, const SeriesValue& s) {
  const int N = p.n_agents;
  const double alpha = static_cast<double>(p.n) + p.c * std::log(N - 1.0);
  const double a = envelope_exponent(p);
  XinfPieces out{init_dx + p.h * init_dv * (p.M + N - 1) * alpha, -kInf, delta};
  if (init_dv > 0.0) {
    // (K/a)^{-delta} with K = rate(phi); rate's phi dependence is handled by the caller
    out.log_coef = std::log(p.h * init_dv * (p.M + N - 1)) + delta * (std::log(delta) - 1.0) +
                   delta * std::log(a) + std::log(s.value);
  }
  return out;
}

double lhs_from_pieces(const FrameworkParams& p, const XinfPieces& q, double x) {
  if (!std::isfinite(q.log_coef)) return q.base;
  const double log_k = log_envelope_rate(p, p.weight(x));
  return q.base + std::exp(q.log_coef - q.delta * log_k);
}

double resolve_delta(const FrameworkParams& p) {
  const auto [lo, hi] = delta_window(p);
  if (!std::isfinite(lo)) throw std::domain_error("divergent envelope exponent");
  const double delta = p.delta.value_or(default_delta(p));
  if (!(delta > lo)) throw std::domain_error("series divergent: delta at or below its window");
  if (!(delta < hi)) throw std::domain_error("delta above 1/((N-1) epsilon)");
  return delta;
}

}  // namespace

double xinf_lhs(const FrameworkParams& p, double init_dx, double init_dv, double x) {
  require_stable(p);
  const double delta = resolve_delta(p);
  const SeriesValue s = xinf_series(p, delta);
  return lhs_from_pieces(p, xinf_pieces(p, init_dx, init_dv, delta, s), x);
}

XinfResult xinf_exists(const FrameworkParams& p, double init_dx, double init_dv, double ceiling) {
  require_stable(p);
  require_agents(p.n_agents);
  XinfResult out;
  out.delta = resolve_delta(p);
  out.series = xinf_series(p, out.delta);
  const XinfPieces pieces = xinf_pieces(p, init_dx, init_dv, out.delta, out.series);
  auto lhs = [&](double x) { return lhs_from_pieces(p, pieces, x); };
  auto ok = [&](double x) { return lhs(x) < x; };

  const double floor_lhs = lhs(0.0);
  if (!std::isfinite(floor_lhs)) return out;
  double hi = floor_lhs > 0.0 ? floor_lhs * (1.0 + 1e-12) : std::numeric_limits<double>::min();
  if (!ok(hi)) {
    double lo = hi;
    hi = 2.0 * hi;
    while (!ok(hi)) {
      lo = hi;
      hi *= 2.0;
      if (hi > ceiling || !std::isfinite(hi)) return out;
    }
    for (int it = 0; it < 200 && hi / lo - 1.0 > 1e-12; ++it) {
      const double mid = 0.5 * (lo + hi);
      (ok(mid) ? hi : lo) = mid;
    }
  }
  out.x_inf = hi;
  out.lhs_at_x = lhs(hi);
  return out;
}

// ---------------------------------------------------------------------------

SeriesValue p1_inner_series(double q, double c) {
  if (!(q >= 0.0 && q < 1.0)) throw std::invalid_argument("p1 series needs 0 <= q < 1");
  if (!(c > 0.0)) throw std::invalid_argument("p1 series needs c > 0");
  // first(m): smallest integer j >= 1 with floor(c log j) >= m, exact while j < 2^52
  auto first = [c](std::int64_t m) -> double {
    const double guess = std::ceil(std::exp(static_cast<double>(m) / c));
    if (guess > 0x1.0p52) return guess;
    auto j = static_cast<std::int64_t>(guess);
    while (j > 1 && std::floor(c * std::log(static_cast<double>(j - 1))) >= static_cast<double>(m)) --j;
    while (std::floor(c * std::log(static_cast<double>(j))) < static_cast<double>(m)) ++j;
    return static_cast<double>(j);
  };
  SeriesValue out;
  if (q == 0.0) {
    out.value = out.partial = first(1) - 1.0;  // only the exponent-0 block survives
    out.terms = 1;
    return out;
  }
  const double ratio_log = std::log(q) + 1.0 / c;  // log(q e^{1/c})
  if (!(ratio_log < 0.0)) throw std::domain_error("p1 series diverges: need c > -1/log(1-p_k)");
  const double log_q = std::log(q);
  double sum = 0.0;
  double lo = 1.0;
  for (std::int64_t m = 0;; ++m) {
    double log_count;
    if (static_cast<double>(m) / c < 36.0) {
      const double hi = first(m + 1);
      log_count = std::log(hi - lo);
      lo = hi;
    } else {
      // e^{m/c} beyond 2^52: count = e^{m/c}(e^{1/c} - 1) to relative 1e-15
      log_count = static_cast<double>(m) / c + std::log(std::expm1(1.0 / c));
    }
    sum += std::exp(static_cast<double>(m) * log_q + log_count);
    // sum_{m' > m} q^{m'} e^{(m'+1)/c} = e^{1/c} (q e^{1/c})^{m+1} / (1 - q e^{1/c})
    const double tail = std::exp(1.0 / c + static_cast<double>(m + 1) * ratio_log) / -std::expm1(ratio_log);
    if (tail <= kSeriesRelTol * sum) {
      out.partial = sum;
      out.tail_bound = tail;
      out.terms = m + 1;
      out.value = sum + tail;
      return out;
    }
  }
}

namespace {

void check_p1_hypotheses(std::int64_t n, double c, std::span<const double> probs) {
  if (n < 1) throw std::invalid_argument("p1 needs n >= 1");
  double total = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    const double q = 1.0 - probs[k];
    total += std::pow(q, static_cast<double>(n));
    if (q > 0.0 && !(c > -1.0 / std::log(q)))
      throw std::domain_error("p1 hypothesis violated for k = " + std::to_string(k + 1) +
                              ": need c > -1/log(1-p_k) = " + num(-1.0 / std::log(q)));
  }
  if (total > 0.5)
    throw std::domain_error("p1 hypothesis violated: sum_k (1-p_k)^n = " + num(total) + " > 1/2");
}

}  // namespace

double p1_lower_bound(std::int64_t n, double c, std::span<const double> probs) {
  check_p1_hypotheses(n, c, probs);
  double exponent = 0.0;
  for (double p : probs) {
    const double q = 1.0 - p;
    if (q <= 0.0) continue;
    exponent += std::pow(q, static_cast<double>(n)) * p1_inner_series(q, c).value;
  }
  return std::exp(-2.0 * std::numbers::ln2 * exponent);
}

double p1_lower_bound(std::int64_t n, double c, const TopologyEnsemble& ens) {
  return p1_lower_bound(n, c, std::span<const double>(ens.probs()));
}

BoundReport p1_report(std::int64_t n, double c, std::span<const double> probs) {
  BoundReport rep;
  rep.name = "rooted window unions (p1)";
  rep.inputs = {{"n", static_cast<double>(n)}, {"c", c}};
  double total = 0.0;
  double worst_c = 0.0;
  for (double p : probs) {
    const double q = 1.0 - p;
    total += std::pow(q, static_cast<double>(n));
    if (q > 0.0) worst_c = std::max(worst_c, -1.0 / std::log(q));
  }
  rep.entries.push_back({"sum_k (1-p_k)^n <= 1/2", total, total <= 0.5, 0.5 - total, ""});
  rep.entries.push_back(condition("c > max_k -1/log(1-p_k)", c, c - worst_c, "threshold " + num(worst_c)));
  if (rep.passed()) {
    for (std::size_t k = 0; k < probs.size(); ++k)
      if (probs[k] < 1.0)
        rep.series.push_back({"inner series k=" + std::to_string(k + 1), p1_inner_series(1.0 - probs[k], c)});
    rep.entries.push_back(info("p1(n)", p1_lower_bound(n, c, probs)));
  }
  return rep;
}

// ---------------------------------------------------------------------------

SeriesValue zeta_upper(double s) {
  if (!(s > 1.0)) throw std::domain_error("zeta series needs s > 1");
  // sum_{i>=I} i^-s <= I^{1-s}/(s-1) + I^-s/2 + s I^{-s-1}/12, with slack
  // at most s(s+1)(s+2) I^{-s-3}/720 (remainders alternate for x^-s).
  SeriesValue out;
  double partial = 0.0;
  std::int64_t i = 1;
  for (std::int64_t I = 16;; I *= 2) {
    for (; i < I; ++i) partial += std::pow(static_cast<double>(i), -s);
    const double X = static_cast<double>(I);
    const double tail = std::pow(X, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(X, -s) + s * std::pow(X, -s - 1.0) / 12.0;
    const double slack = s * (s + 1.0) * (s + 2.0) * std::pow(X, -s - 3.0) / 720.0;
    if (slack <= kSeriesRelTol * (partial + tail) || I >= (std::int64_t{1} << 24)) {
      out.partial = partial;
      out.tail_bound = tail;
      out.terms = I;
      out.value = partial + tail;
      return out;
    }
  }
}

namespace {

double poisson_rho(double M, int n_agents, double lambda_max) {
  return (n_agents - 1) * std::numbers::e * lambda_max / M;
}

bool poisson_valid(double c, double M, int n_agents, double lambda_max) {
  const double rho = poisson_rho(M, n_agents, lambda_max);
  return rho < 1.0 && M * c * std::log(rho) < -1.0;
}

bool geometric_valid(double c, double M, int n_agents, double p_min) {
  const double C = geometric_C(M, n_agents, p_min);
  return C < 1.0 && M * c * std::log(C) < -1.0;
}

}  // namespace

double p2_poisson(std::int64_t n, double c, double M, int n_agents, double lambda_max) {
  require_agents(n_agents);
  if (n < 1 || !(c > 0.0) || !(M > 0.0) || !(lambda_max > 0.0))
    throw std::invalid_argument("p2 (Poisson) needs n >= 1, c > 0, M > 0, lambda_max > 0");
  if (!poisson_valid(c, M, n_agents, lambda_max)) throw std::domain_error("series divergent, increase M");
  const double log_rho = std::log(poisson_rho(M, n_agents, lambda_max));
  const double power = M * (static_cast<double>(n) + c * std::log(n_agents - 1.0) - 1.0);
  const SeriesValue z = zeta_upper(-M * c * log_rho);
  return std::exp(power * log_rho - 0.5 * std::log(2.0 * std::numbers::pi * M * static_cast<double>(n))) * z.value;
}

std::optional<std::int64_t> smallest_valid_M_poisson(double c, int n_agents, double lambda_max) {
  require_agents(n_agents);
  const auto start = static_cast<std::int64_t>(std::floor((n_agents - 1) * std::numbers::e * lambda_max)) + 1;
  for (std::int64_t M = std::max<std::int64_t>(start, 1); M <= 1'000'000; ++M)
    if (poisson_valid(c, static_cast<double>(M), n_agents, lambda_max)) return M;
  return std::nullopt;
}

BoundReport poisson_report(std::int64_t n, double c, double M, int n_agents, double lambda_max) {
  require_agents(n_agents);
  BoundReport rep;
  rep.name = "Poisson dwelling tail (p2)";
  rep.inputs = {{"n", static_cast<double>(n)}, {"c", c}, {"M", M}, {"N", n_agents}, {"lambda_max", lambda_max}};
  const double rho = poisson_rho(M, n_agents, lambda_max);
  rep.entries.push_back(condition("M > (N-1) e lambda_max", M, M - (n_agents - 1) * std::numbers::e * lambda_max));
  const double expo = M * c * std::log(rho);
  rep.entries.push_back(condition("M c log((N-1) e lambda_max / M) < -1", expo, -1.0 - expo));
  if (!rep.passed()) {
    if (const auto m = smallest_valid_M_poisson(c, n_agents, lambda_max))
      rep.entries.back().note = "smallest valid M is " + std::to_string(*m);
    return rep;
  }
  rep.series.push_back({"zeta(-M c log rho)", zeta_upper(-expo)});
  rep.entries.push_back(info("p2(n)", p2_poisson(n, c, M, n_agents, lambda_max)));
  return rep;
}

double geometric_C(double M, int n_agents, double p_min) {
  require_agents(n_agents);
  const double x = (n_agents - 1) / M;
  return std::exp((1.0 + x) * std::log1p(x) + x * std::log(M / (n_agents - 1))) * (1.0 - p_min) / p_min;
}

double p2_geometric(std::int64_t n, double c, double M, int n_agents, double p_min) {
  require_agents(n_agents);
  if (n < 1 || !(c > 0.0) || !(M > 0.0)) throw std::invalid_argument("p2 (geometric) needs n >= 1, c > 0, M > 0");
  if (!(p_min > 0.5) || p_min > 1.0) throw std::domain_error("p2 (geometric) needs p_min in (1/2, 1]");
  if (p_min == 1.0) return 0.0;
  if (!geometric_valid(c, M, n_agents, p_min)) throw std::domain_error("series divergent, increase M");
  const double log_C = std::log(geometric_C(M, n_agents, p_min));
  const double power = M * (static_cast<double>(n) + c * std::log(n_agents - 1.0) - 1.0);
  const SeriesValue z = zeta_upper(-M * c * log_C);
  return std::numbers::e / (std::numbers::sqrt2 * std::numbers::pi) * std::exp(power * log_C) * z.value;
}

std::optional<std::int64_t> smallest_valid_M_geometric(double c, int n_agents, double p_min) {
  require_agents(n_agents);
  if (!(p_min > 0.5)) return std::nullopt;
  for (std::int64_t M = 1; M <= 1'000'000; ++M)
    if (geometric_valid(c, static_cast<double>(M), n_agents, p_min)) return M;
  return std::nullopt;
}

BoundReport geometric_report(std::int64_t n, double c, double M, int n_agents, double p_min) {
  require_agents(n_agents);
  BoundReport rep;
  rep.name = "geometric dwelling tail (p2)";
  rep.inputs = {{"n", static_cast<double>(n)}, {"c", c}, {"M", M}, {"N", n_agents}, {"p_min", p_min}};
  rep.entries.push_back(condition("p_min > 1/2", p_min, p_min - 0.5));
  if (!rep.passed()) return rep;
  if (p_min == 1.0) {
    rep.entries.push_back(info("p2(n)", 0.0, "dwell times vanish"));
    return rep;
  }
  const double C = geometric_C(M, n_agents, p_min);
  rep.entries.push_back(condition("C(M) < 1", C, 1.0 - C));
  const double expo = C < 1.0 ? M * c * std::log(C) : kInf;
  rep.entries.push_back(condition("M c log C(M) < -1", expo, -1.0 - expo));
  if (!rep.passed()) {
    if (const auto m = smallest_valid_M_geometric(c, n_agents, p_min))
      rep.entries.back().note = "smallest valid M is " + std::to_string(*m);
    return rep;
  }
  rep.series.push_back({"zeta(-M c log C(M))", zeta_upper(-expo)});
  rep.entries.push_back(info("p2(n)", p2_geometric(n, c, M, n_agents, p_min)));
  return rep;
}

BoundReport check_theorem_5_1(int n_agents, double kappa, double a, double M, std::span<const double> probs,
                              double epsilon) {
  require_agents(n_agents);
  BoundReport rep;
  rep.name = "continuous-time flocking conditions";
  rep.inputs = {{"N", n_agents}, {"kappa", kappa}, {"a", a}, {"M", M}, {"epsilon", epsilon}};
  const double ratio = (a * (n_agents - 1) + M) * kappa / min_log_inverse_complement(probs);
  rep.entries.push_back(condition("(a(N-1)+M) kappa / min_k log(1/(1-p_k)) < 1", ratio, 1.0 - ratio));
  const double eps_bound = (1.0 - ratio) / (n_agents - 1);
  rep.entries.push_back(condition("0 <= epsilon < 1/(N-1) - ratio/(N-1)", epsilon,
                                  epsilon >= 0.0 ? eps_bound - epsilon : epsilon,
                                  "upper end " + num(eps_bound)));
  return rep;
}

}  // namespace flockswitch

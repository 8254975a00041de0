#include "flockswitch/switching.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace flockswitch {

namespace {

std::int64_t log_increment(double c, std::int64_t ell) {
  return static_cast<std::int64_t>(std::floor(c * std::log(static_cast<double>(ell + 1))));
}

void require_window_args(std::int64_t n, double c) {
  if (n < 1) throw std::invalid_argument("window length n must be >= 1");
  if (!(c > 0.0)) throw std::invalid_argument("log coefficient c must be > 0");
}

}  // namespace

std::int64_t a_sequence(std::int64_t n, double c, std::int64_t ell) {
  require_window_args(n, c);
  std::int64_t a = 0;
  for (std::int64_t l = 0; l < ell; ++l) a += n + log_increment(c, l);
  return a;
}

std::vector<std::int64_t> a_prefix(std::int64_t n, double c, std::size_t count) {
  require_window_args(n, c);
  std::vector<std::int64_t> out;
  out.reserve(count);
  std::int64_t a = 0;
  for (std::size_t l = 0; l < count; ++l) {
    out.push_back(a);
    a += n + log_increment(c, static_cast<std::int64_t>(l));
  }
  return out;
}

// ---------------------------------------------------------------------------

DwellingProcess::DwellingProcess(Kind kind, std::vector<double> values, Sequence seq, double bound,
                                 std::int64_t value)
    : kind_(kind), values_(std::move(values)), seq_(std::move(seq)), bound_(bound), value_(value) {
  switch (kind_) {
    case Kind::Poisson:
      if (!(bound_ > 0.0) || !std::isfinite(bound_))
        throw std::invalid_argument("Poisson dwelling: lambda_max must be positive and finite");
      for (double v : values_)
        if (!(v > 0.0) || v > bound_) throw std::invalid_argument("Poisson dwelling: rates must be positive");
      break;
    case Kind::Geometric:
      if (!(bound_ > 0.5) || bound_ > 1.0)
        throw std::invalid_argument("geometric dwelling: p_min must lie in (1/2, 1]");
      for (double v : values_)
        if (v < bound_ || v > 1.0) throw std::invalid_argument("geometric dwelling: p_l must lie in [p_min, 1]");
      break;
    case Kind::Deterministic:
      if (value_ < 0) throw std::invalid_argument("deterministic dwelling value must be >= 0");
      break;
  }
}

DwellingProcess DwellingProcess::poisson(double rate) { return poisson(std::vector<double>{rate}); }

DwellingProcess DwellingProcess::poisson(std::vector<double> rates) {
  if (rates.empty()) throw std::invalid_argument("Poisson dwelling: empty rate list");
  const double mx = *std::max_element(rates.begin(), rates.end());
  return {Kind::Poisson, std::move(rates), {}, mx, 0};
}

DwellingProcess DwellingProcess::poisson(Sequence rates, double lambda_max) {
  return {Kind::Poisson, {}, std::move(rates), lambda_max, 0};
}

DwellingProcess DwellingProcess::geometric(double p) { return geometric(std::vector<double>{p}); }

DwellingProcess DwellingProcess::geometric(std::vector<double> ps) {
  if (ps.empty()) throw std::invalid_argument("geometric dwelling: empty probability list");
  const double mn = *std::min_element(ps.begin(), ps.end());
  return {Kind::Geometric, std::move(ps), {}, mn, 0};
}

DwellingProcess DwellingProcess::geometric(Sequence ps, double p_min) {
  return {Kind::Geometric, {}, std::move(ps), p_min, 0};
}

DwellingProcess DwellingProcess::deterministic(std::int64_t value) {
  return {Kind::Deterministic, {}, {}, static_cast<double>(value), value};
}

double DwellingProcess::parameter(std::uint64_t ell) const {
  if (kind_ == Kind::Deterministic) return static_cast<double>(value_);
  const double v = values_.empty() ? seq_(ell) : values_[ell % values_.size()];
  if (kind_ == Kind::Poisson && (!(v > 0.0) || v > bound_))
    throw std::domain_error("Poisson rate lambda_" + std::to_string(ell) + " outside (0, lambda_max]");
  if (kind_ == Kind::Geometric && (v < bound_ || v > 1.0))
    throw std::domain_error("geometric p_" + std::to_string(ell) + " outside [p_min, 1]");
  return v;
}

std::int64_t sample_poisson(double lambda, Rng& rng) {
  if (lambda <= 30.0) {
    // sequential inversion
    const double u = rng.uniform();
    double p = std::exp(-lambda);
    double cdf = p;
    std::int64_t k = 0;
    while (u >= cdf) {
      ++k;
      p *= lambda / static_cast<double>(k);
      cdf += p;
      if (p == 0.0 && static_cast<double>(k) > lambda) break;  // cdf saturated below 1 by rounding
    }
    return k;
  }
  // Transformed rejection with squeeze (PTRS); exact for every lambda.
  const double slam = std::sqrt(lambda);
  const double loglam = std::log(lambda);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::int64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -lambda + k * loglam - std::lgamma(k + 1.0))
      return static_cast<std::int64_t>(k);
  }
}

std::int64_t sample_geometric(double p, Rng& rng) {
  if (p >= 1.0) return 0;
  return static_cast<std::int64_t>(std::floor(std::log(rng.uniform_open()) / std::log1p(-p)));
}

std::int64_t sample_dwelling(const DwellingProcess& p, std::uint64_t ell, Rng& rng) {
  switch (p.kind()) {
    case DwellingProcess::Kind::Poisson:
      return sample_poisson(p.parameter(ell), rng);
    case DwellingProcess::Kind::Geometric:
      return sample_geometric(p.parameter(ell), rng);
    case DwellingProcess::Kind::Deterministic:
      return p.deterministic_value();
  }
  return 0;
}

// ---------------------------------------------------------------------------

ScheduleSampler::ScheduleSampler(const TopologyEnsemble& ens, DwellingProcess process, std::uint64_t seed)
    : ens_(&ens),
      process_(std::move(process)),
      dwell_rng_(derive_seed(seed, Stream::Dwell)),
      choice_rng_(derive_seed(seed, Stream::Choice)) {
  double acc = 0.0;
  for (double p : ens.probs()) cumulative_.push_back(acc += p);
  sched_.instants.push_back(0);
  sched_.choices.push_back(draw_choice());
}

int ScheduleSampler::draw_choice() {
  const double u = choice_rng_.uniform() * cumulative_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto k = static_cast<int>(it - cumulative_.begin());
  return std::min(k, static_cast<int>(cumulative_.size()) - 1);
}

void ScheduleSampler::extend_draws(std::size_t count) {
  while (sched_.dwell_draws.size() < count)
    sched_.dwell_draws.push_back(sample_dwelling(process_, sched_.dwell_draws.size(), dwell_rng_));
}

void ScheduleSampler::push_instant() {
  const std::size_t ell = sched_.instants.size() - 1;
  extend_draws(ell + 1);
  sched_.instants.push_back(sched_.instants.back() + 1 + sched_.dwell_draws[ell]);
  sched_.choices.push_back(draw_choice());
}

void ScheduleSampler::extend_to_time(std::int64_t horizon) {
  while (sched_.instants.back() < horizon) push_instant();
}

void ScheduleSampler::extend_to_instants(std::size_t count) {
  while (sched_.instants.size() < count) push_instant();
}

SwitchingSchedule generate_schedule(const TopologyEnsemble& ens, const DwellingProcess& p,
                                    std::int64_t horizon, std::uint64_t seed) {
  if (horizon < 1) throw std::invalid_argument("schedule horizon must be >= 1");
  ScheduleSampler sampler(ens, p, seed);
  sampler.extend_to_time(horizon);
  return std::move(sampler).take();
}

std::vector<std::int64_t> generate_dwell_draws(const DwellingProcess& p, std::size_t count,
                                               std::uint64_t seed) {
  Rng rng(derive_seed(seed, Stream::Dwell));
  std::vector<std::int64_t> out;
  out.reserve(count);
  for (std::size_t l = 0; l < count; ++l) out.push_back(sample_dwelling(p, l, rng));
  return out;
}

int topology_at(const SwitchingSchedule& s, std::int64_t t) {
  if (t < 0 || t >= s.last_instant())
    throw std::out_of_range("time " + std::to_string(t) + " outside schedule [0, " +
                            std::to_string(s.last_instant()) + ")");
  const auto it = std::upper_bound(s.instants.begin(), s.instants.end(), t);
  return s.choices[static_cast<std::size_t>(it - s.instants.begin() - 1)];
}

// ---------------------------------------------------------------------------

std::int64_t window_dwell_sum(std::span<const std::int64_t> draws, std::int64_t i, std::int64_t n,
                              double c, int n_agents) {
  if (i < 1) throw std::invalid_argument("window index i must be >= 1");
  if (n_agents < 1) throw std::invalid_argument("need at least one agent");
  const std::int64_t stride = n_agents - 1;
  const std::int64_t lo = a_sequence(n, c, (i - 1) * stride);
  const std::int64_t hi = a_sequence(n, c, i * stride);
  if (static_cast<std::int64_t>(draws.size()) < hi) throw std::out_of_range("insufficient schedule");
  std::int64_t sum = 0;
  for (std::int64_t l = lo; l < hi; ++l) sum += draws[static_cast<std::size_t>(l)];
  return sum;
}

std::int64_t window_dwell_sum(const SwitchingSchedule& s, std::int64_t i, std::int64_t n, double c,
                              int n_agents) {
  return window_dwell_sum(std::span<const std::int64_t>(s.dwell_draws), i, n, c, n_agents);
}

double dwell_threshold(std::int64_t i, std::int64_t n, double c, double M, int n_agents) {
  if (n_agents < 2) throw std::invalid_argument("dwell threshold needs N >= 2");
  const double inner = static_cast<double>(i) * static_cast<double>(n_agents - 1);
  return M * (static_cast<double>(n) + std::floor(c * std::log(inner)));
}

DwellBoundCheck check_dwell_bound(std::span<const std::int64_t> draws, std::int64_t n, double c,
                                  double M, int n_agents, std::optional<std::int64_t> i_max) {
  require_window_args(n, c);
  if (n_agents < 2) throw std::invalid_argument("dwell bound needs N >= 2");
  DwellBoundCheck out;
  const std::int64_t stride = n_agents - 1;
  std::int64_t lo = 0;   // a_{(i-1)(N-1)}
  std::int64_t ell = 0;  // index into the a-sequence
  std::vector<std::int64_t> prefix(draws.size() + 1, 0);
  for (std::size_t l = 0; l < draws.size(); ++l) prefix[l + 1] = prefix[l] + draws[l];
  for (std::int64_t i = 1; !i_max || i <= *i_max; ++i) {
    std::int64_t hi = lo;
    for (std::int64_t k = 0; k < stride; ++k, ++ell) hi += n + log_increment(c, ell);
    if (hi > static_cast<std::int64_t>(draws.size())) {
      if (i_max) throw std::out_of_range("insufficient schedule");
      break;
    }
    const std::int64_t sum = prefix[static_cast<std::size_t>(hi)] - prefix[static_cast<std::size_t>(lo)];
    out.windows_checked = i;
    if (static_cast<double>(sum) >= dwell_threshold(i, n, c, M, n_agents)) {
      out.holds = false;
      out.first_violation = i;
      break;
    }
    lo = hi;
  }
  return out;
}

Digraph window_union(const TopologyEnsemble& ens, std::span<const int> choices, std::int64_t ell,
                     std::int64_t n, double c) {
  const std::int64_t lo = a_sequence(n, c, ell);
  const std::int64_t hi = lo + n + log_increment(c, ell);
  if (static_cast<std::int64_t>(choices.size()) < hi) throw std::out_of_range("insufficient schedule");
  std::vector<const Digraph*> active;
  for (std::int64_t j = lo; j < hi; ++j) active.push_back(&ens.graph(choices[static_cast<std::size_t>(j)]));
  return union_graph(std::span<const Digraph* const>(active));
}

bool windows_rooted(const TopologyEnsemble& ens, std::span<const int> choices, std::int64_t n_windows,
                    std::int64_t n, double c) {
  const auto a = a_prefix(n, c, static_cast<std::size_t>(n_windows + 1));
  if (static_cast<std::int64_t>(choices.size()) < a.back()) throw std::out_of_range("insufficient schedule");
  std::vector<const Digraph*> active;
  for (std::int64_t ell = 0; ell < n_windows; ++ell) {
    active.clear();
    for (std::int64_t j = a[static_cast<std::size_t>(ell)]; j < a[static_cast<std::size_t>(ell + 1)]; ++j)
      active.push_back(&ens.graph(choices[static_cast<std::size_t>(j)]));
    if (!has_spanning_tree(union_graph(std::span<const Digraph* const>(active)))) return false;
  }
  return true;
}

}  // namespace flockswitch

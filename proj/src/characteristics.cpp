#include "causal_lab/characteristics.hpp"

#include <algorithm>
#include <cmath>

#include "causal_lab/errors.hpp"
#include "causal_lab/parallel.hpp"

namespace clab {

namespace {

constexpr double kOverflow = 1e100;

bool bad(double x) { return !std::isfinite(x) || std::abs(x) > kOverflow; }

std::size_t grid_end(const PathBundle& bundle, std::size_t n, double horizon) {
  if (n < 1) throw DomainError("grid needs n >= 1");
  if (!(horizon > 0.0)) throw DomainError("horizon must be positive");
  const std::size_t K = grid_floor(n, horizon);
  if (K > bundle.length())
    throw DomainError("bundle of length " + std::to_string(bundle.length()) + " is shorter than [nN] = " +
                      std::to_string(K));
  return K;
}

// E eps^j for the symmetric innovation laws shipped here.
double raw_moment(const InnovationDistribution& dist, std::size_t j) {
  if (j == 0) return 1.0;
  if (j % 2 == 1) return 0.0;
  return dist.abs_moment(static_cast<double>(j));
}

}  // namespace

// ---------------------------------------------------------------------------

ConditionalMomentOracle ConditionalMomentOracle::iid(double location, double scale,
                                                     InnovationDistribution innovation) {
  if (!(scale >= 0.0)) throw ConfigError("iid oracle needs scale >= 0");
  ConditionalMomentOracle o(Kind::Constant, Source::Iid, innovation);
  o.location_ = location;
  o.scale_ = scale;
  return o;
}

ConditionalMomentOracle ConditionalMomentOracle::for_model(const ProcessModel& model) {
  if (model.is_linear()) {
    ConditionalMomentOracle o(Kind::Constant, Source::Linear, model.innovation());
    o.a0_ = model.coefficients().coeffs.front();
    o.total_ = model.analytic()->total;
    return o;
  }
  if (const auto* arch = std::get_if<Arch1Spec>(&model.variant())) {
    ConditionalMomentOracle o(Kind::StateFormula, Source::Arch, model.innovation());
    o.omega_ = arch->omega;
    o.beta_ = arch->beta;
    return o;
  }
  return ConditionalMomentOracle(Kind::None, Source::Iid, model.innovation());
}

ConditionalMomentOracle::Series ConditionalMomentOracle::series(const PathBundle& bundle) const {
  if (kind_ == Kind::None)
    throw UnsupportedModelError("no closed-form conditional moments for this model");
  const std::size_t n = bundle.length();
  const auto x = bundle.values();
  const double var = innovation_.variance();
  Series s;
  s.location.resize(n);
  s.scale.resize(n);
  s.D.resize(n);
  s.v.resize(n);
  switch (source_) {
    case Source::Iid:
      for (std::size_t t = 0; t < n; ++t) {
        s.location[t] = location_;
        s.scale[t] = scale_;
        s.D[t] = x[t] - location_;
        s.v[t] = scale_ * scale_ * var;
      }
      break;
    case Source::Linear:
      for (std::size_t t = 0; t < n; ++t) {
        const double eps = bundle.innovation(static_cast<std::int64_t>(t + 1));
        s.location[t] = x[t] - a0_ * eps;
        s.scale[t] = std::abs(a0_);
        s.D[t] = total_ * eps;
        s.v[t] = total_ * total_ * var;
      }
      break;
    case Source::Arch: {
      // X_0 from the stored pre-sample, replaying the recursion from rest.
      double prev = 0.0;
      for (std::int64_t k = 1 - static_cast<std::int64_t>(bundle.burn_in()); k <= 0; ++k)
        prev = bundle.innovation(k) * std::sqrt(omega_ + beta_ * prev * prev);
      for (std::size_t t = 0; t < n; ++t) {
        const double h2 = omega_ + beta_ * prev * prev;
        s.location[t] = 0.0;
        s.scale[t] = std::sqrt(h2);
        s.D[t] = x[t];
        s.v[t] = h2 * var;
        prev = x[t];
      }
      break;
    }
  }
  return s;
}

// ---------------------------------------------------------------------------

DiscreteCharacteristics discrete_characteristics(const PathBundle& bundle, const ConditionalMomentOracle& oracle) {
  const auto s = oracle.series(bundle);
  const double var = oracle.innovation().variance();
  const std::size_t n = bundle.length();
  DiscreteCharacteristics out;
  out.B.assign(n + 1, 0.0);
  out.C.assign(n + 1, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    out.B[t + 1] = out.B[t] + s.location[t];
    out.C[t + 1] = out.C[t] + s.scale[t] * s.scale[t] * var;
  }
  return out;
}

std::vector<double> third_characteristic_polynomial(const PathBundle& bundle, std::span<const double> g,
                                                    const ConditionalMomentOracle& oracle) {
  const auto s = oracle.series(bundle);
  const std::size_t n = bundle.length();
  std::vector<double> mu(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) mu[j] = raw_moment(oracle.innovation(), j);
  std::vector<double> out(n + 1, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    // E (loc + sc eps)^k = sum_j C(k,j) loc^{k-j} sc^j mu_j
    double e = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (g[k] == 0.0) continue;
      double term = 0.0, binom = 1.0;
      for (std::size_t j = 0; j <= k; ++j) {
        if (mu[j] != 0.0)
          term += binom * std::pow(s.location[t], static_cast<double>(k - j)) *
                  std::pow(s.scale[t], static_cast<double>(j)) * mu[j];
        binom = binom * static_cast<double>(k - j) / static_cast<double>(j + 1);
      }
      e += g[k] * term;
    }
    out[t + 1] = out[t] + e;
  }
  return out;
}

std::vector<double> third_characteristic_integral(const PathBundle& bundle, const std::function<double(double)>& g,
                                                  const ConditionalMomentOracle& oracle, std::size_t inner,
                                                  const SeedLineage& stream) {
  if (inner < 1) throw ConfigError("third characteristic needs at least one inner draw");
  const auto s = oracle.series(bundle);
  const std::size_t n = bundle.length();
  const CounterStream draws(stream.with(Purpose::Conditional));
  std::vector<double> out(n + 1, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    CompensatedSum acc;
    for (std::size_t j = 0; j < inner; ++j) {
      const double eps = oracle.innovation().sample(draws, static_cast<std::int64_t>(t * inner + j));
      acc.add(g(s.location[t] + s.scale[t] * eps));
    }
    out[t + 1] = out[t] + acc.value() / static_cast<double>(inner);
  }
  return out;
}

// ---------------------------------------------------------------------------

double GridPath::value(double s) const {
  if (s < 0.0) throw DomainError("GridPath::value needs s >= 0");
  const std::size_t k = std::min(grid_floor(n, s), last());
  return level[k] + slope[k] * (s - static_cast<double>(k) / static_cast<double>(n));
}

double GridPath::left_limit(std::size_t k) const { return level[k] + slope[k] / static_cast<double>(n); }

GridPath step_path(std::size_t n, std::vector<double> level) {
  GridPath p;
  p.n = n;
  p.slope.assign(level.size(), 0.0);
  p.level = std::move(level);
  return p;
}

double sup_distance(std::span<const GridPath* const> a, std::span<const GridPath* const> b, std::size_t stop) {
  if (a.size() != b.size()) throw ConfigError("sup_distance needs matching component counts");
  double sup = 0.0;
  for (std::size_t k = 0; k <= stop; ++k) {
    double at = 0.0, before = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = a[i]->level[k] - b[i]->level[k];
      at += d * d;
      if (k > 0) {
        const double dl = a[i]->left_limit(k - 1) - b[i]->left_limit(k - 1);
        before += dl * dl;
      }
    }
    sup = std::max({sup, std::sqrt(at), std::sqrt(before)});
  }
  return sup;
}

// ---------------------------------------------------------------------------

PairPaths pair_process(const PathBundle& bundle, const FunctionalSpec& f, std::size_t n, double horizon) {
  const std::size_t K = grid_end(bundle, n, horizon);
  const double rn = std::sqrt(static_cast<double>(n));
  const auto S = bundle.partial_sums();
  const auto x = bundle.values();
  std::vector<double> x1(K + 1, 0.0), x2(K + 1, 0.0);
  bool flagged = false;
  for (std::size_t t = 1; t <= K; ++t) {
    const double inc = t >= 2 ? f.f(S[t - 1] / rn) * x[t - 1] / rn : 0.0;
    x1[t] = x1[t - 1] + inc;
    x2[t] = S[t] / rn;
    if (bad(x1[t])) flagged = true;
  }
  PairPaths out;
  out.n = n;
  out.horizon = horizon;
  out.x1 = step_path(n, std::move(x1));
  out.x2 = step_path(n, std::move(x2));
  out.flagged = flagged;
  return out;
}

CharacteristicPaths empirical_characteristics(const PathBundle& bundle, const FunctionalSpec& f, std::size_t n,
                                              const ConditionalMomentOracle& oracle, double horizon) {
  const std::size_t K = grid_end(bundle, n, horizon);
  const auto s = oracle.series(bundle);
  const double nn = static_cast<double>(n);
  const double rn = std::sqrt(nn);
  const auto S = bundle.partial_sums();
  const auto x = bundle.values();
  std::vector<double> b1(K + 1, 0.0), b2(K + 1, 0.0), c11(K + 1, 0.0), c12(K + 1, 0.0), c22(K + 1, 0.0);
  for (std::size_t t = 1; t <= K; ++t) {
    const double drift = x[t - 1] - s.D[t - 1];
    const double v = s.v[t - 1];
    const double fv = t >= 2 ? f.f(S[t - 1] / rn) : 0.0;
    b1[t] = b1[t - 1] + fv * drift / rn;
    b2[t] = b2[t - 1] + drift / rn;
    c11[t] = c11[t - 1] + fv * fv * v / nn;
    c12[t] = c12[t - 1] + fv * v / nn;
    c22[t] = c22[t - 1] + v / nn;
  }
  CharacteristicPaths out;
  out.n = n;
  out.horizon = horizon;
  out.B1 = step_path(n, std::move(b1));
  out.B2 = step_path(n, std::move(b2));
  out.C11 = step_path(n, std::move(c11));
  out.C12 = step_path(n, std::move(c12));
  out.C22 = step_path(n, std::move(c22));
  return out;
}

CharacteristicPaths composed_characteristics(const PathBundle& bundle, const FunctionalSpec& f, double lambda,
                                             double sigma, std::size_t n, double horizon) {
  const std::size_t K = grid_end(bundle, n, horizon);
  const double nn = static_cast<double>(n);
  const double rn = std::sqrt(nn);
  const double s2 = sigma * sigma;
  const auto S = bundle.partial_sums();

  CharacteristicPaths out;
  out.n = n;
  out.horizon = horizon;
  auto init = [&](GridPath& p) {
    p.n = n;
    p.level.assign(K + 1, 0.0);
    p.slope.assign(K + 1, 0.0);
  };
  init(out.B1);
  init(out.B2);
  init(out.C11);
  init(out.C12);
  init(out.C22);
  // Level at k carries sum_{t=2}^{k}; the fractional term (ns-[ns])/n * g(S_k/sqrt n) is the slope.
  double sb = 0.0, sc11 = 0.0, sc12 = 0.0;
  for (std::size_t k = 0; k <= K; ++k) {
    if (k >= 2) {
      const double u = S[k - 1] / rn;
      const double fu = f.f(u);
      sb += f.df(u);
      sc11 += fu * fu;
      sc12 += fu;
    }
    const double uk = S[k] / rn;
    const double fk = f.f(uk);
    out.B1.level[k] = lambda * sb / nn;
    out.B1.slope[k] = lambda * f.df(uk);
    out.C11.level[k] = s2 * sc11 / nn;
    out.C11.slope[k] = s2 * fk * fk;
    out.C12.level[k] = s2 * sc12 / nn;
    out.C12.slope[k] = s2 * fk;
    out.C22.level[k] = s2 * static_cast<double>(k) / nn;
    out.C22.slope[k] = s2;
  }
  return out;
}

// ---------------------------------------------------------------------------

double big_jump_mass(const PathBundle& bundle, const FunctionalSpec& f, std::size_t n, double horizon, double b,
                     std::size_t stop) {
  if (!(b > 0.0)) throw DomainError("big_jump_mass needs b > 0");
  const std::size_t K = std::min(grid_end(bundle, n, horizon), stop);
  const double nn = static_cast<double>(n);
  const double rn = std::sqrt(nn);
  const auto S = bundle.partial_sums();
  const auto x = bundle.values();
  CompensatedSum first, second;
  for (std::size_t t = 2; t <= K; ++t) {
    const double fv = f.f(S[t - 1] / rn);
    const double x4 = x[t - 1] * x[t - 1] * x[t - 1] * x[t - 1];
    first.add(fv * fv * fv * fv * x4);
    second.add(x4);
  }
  return 2.0 / (b * b * nn * nn) * (first.value() + second.value());
}

GapReport gap_diagnostics(const PathBundle& bundle, const FunctionalSpec& f, double lambda, double sigma,
                          std::size_t n, double horizon, std::span<const double> b_grid,
                          const ConditionalMomentOracle& oracle, std::optional<double> threshold) {
  const auto pair = pair_process(bundle, f, n, horizon);
  const auto emp = empirical_characteristics(bundle, f, n, oracle, horizon);
  const auto comp = composed_characteristics(bundle, f, lambda, sigma, n, horizon);
  const std::size_t K = pair.x1.last();

  GapReport rep;
  rep.n = n;
  rep.stop_index = K;
  if (threshold) {
    for (std::size_t k = 0; k <= K; ++k) {
      if (std::hypot(pair.x1.level[k], pair.x2.level[k]) >= *threshold) {
        rep.stop_index = k;
        rep.stopped = true;
        break;
      }
    }
  }
  const std::size_t stop = rep.stop_index;

  for (std::size_t t = 1; t <= stop; ++t)
    rep.sup_jump = std::max(rep.sup_jump, std::hypot(pair.x1.level[t] - pair.x1.level[t - 1],
                                                     pair.x2.level[t] - pair.x2.level[t - 1]));

  const GridPath* e11[] = {&emp.C11};
  const GridPath* c11[] = {&comp.C11};
  const GridPath* e12[] = {&emp.C12};
  const GridPath* c12[] = {&comp.C12};
  const GridPath* e22[] = {&emp.C22};
  const GridPath* c22[] = {&comp.C22};
  rep.sup_C_gap[0] = sup_distance(e11, c11, stop);
  rep.sup_C_gap[1] = sup_distance(e12, c12, stop);
  rep.sup_C_gap[2] = sup_distance(e22, c22, stop);
  const GridPath* eb[] = {&emp.B1, &emp.B2};
  const GridPath* cb[] = {&comp.B1, &comp.B2};
  rep.sup_B_gap = sup_distance(eb, cb, stop);

  rep.b_grid.assign(b_grid.begin(), b_grid.end());
  for (double b : b_grid) rep.big_jump_mass.push_back(big_jump_mass(bundle, f, n, horizon, b, stop));
  return rep;
}

}  // namespace clab

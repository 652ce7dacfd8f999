#include "causal_lab/dependence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

#include "causal_lab/errors.hpp"
#include "causal_lab/parallel.hpp"

namespace clab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

// Mean and standard error of the mean, in index order.
std::pair<double, double> mean_stderr(const std::vector<double>& v) {
  const auto n = static_cast<double>(v.size());
  CompensatedSum s;
  for (double x : v) s.add(x);
  const double mean = s.value() / n;
  if (v.size() < 2) return {mean, 0.0};
  CompensatedSum ss;
  for (double x : v) ss.add((x - mean) * (x - mean));
  return {mean, std::sqrt(ss.value() / (n - 1.0) / n)};
}

// ||Y||_p from samples of |Y|^p with a delta-method standard error.
std::pair<double, double> norm_from_powers(const std::vector<double>& powers, double p) {
  const auto [m, se] = mean_stderr(powers);
  if (m <= 0.0) return {0.0, 0.0};
  const double norm = std::pow(m, 1.0 / p);
  return {norm, norm / (p * m) * se};
}

}  // namespace

BNDecomposition bn_decompose(std::span<const double> coeffs) {
  if (coeffs.empty()) throw ConfigError("bn_decompose needs a nonempty coefficient sequence");
  BNDecomposition bn;
  bn.tilde.assign(coeffs.size(), 0.0);
  CompensatedSum tail;
  for (std::size_t i = coeffs.size() - 1; i-- > 0;) {
    tail.add(coeffs[i + 1]);
    bn.tilde[i] = tail.value();
  }
  tail.add(coeffs[0]);
  bn.total = tail.value();
  return bn;
}

double tilde_innovation(const BNDecomposition& bn, const PathBundle& bundle, std::int64_t k) {
  const std::int64_t earliest = 1 - static_cast<std::int64_t>(bundle.burn_in());
  double out = 0.0;
  for (std::size_t i = 0; i < bn.tilde.size(); ++i) {
    const std::int64_t t = k - static_cast<std::int64_t>(i);
    if (t < earliest) break;
    out += bn.tilde[i] * bundle.innovation(t);
  }
  return out;
}

// ---------------------------------------------------------------------------

DependenceProfile DependenceProfile::from_theta(std::vector<double> theta, double p, double tail) {
  DependenceProfile prof;
  prof.p = p;
  prof.tail = tail;
  const std::size_t len = theta.size();
  prof.Theta.assign(len, 0.0);
  prof.Lambda.assign(len, 0.0);
  CompensatedSum back;
  back.add(tail);
  for (std::size_t i = len; i-- > 0;) {
    back.add(theta[i]);
    prof.Theta[i] = std::isfinite(tail) ? back.value() : kInf;
  }
  CompensatedSum fwd;
  for (std::size_t i = 0; i < len; ++i) {
    fwd.add(theta[i]);
    prof.Lambda[i] = fwd.value();
  }
  prof.theta = std::move(theta);
  return prof;
}

double DependenceProfile::Theta_at(std::size_t m) const {
  return m < Theta.size() ? Theta[m] : tail;
}

std::vector<double> projection_norm_linear(std::span<const double> coeffs, double p,
                                           const InnovationDistribution& innovation,
                                           const SeedLineage& stream) {
  const double c0 = coupling_constant(innovation, p, stream);
  std::vector<double> theta(coeffs.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) theta[i] = c0 * std::abs(coeffs[i]);
  return theta;
}

DependenceProfile linear_profile(const ProcessModel& model, double p, const SeedLineage& stream) {
  const auto& seq = model.coefficients();
  const double c0 = coupling_constant(model.innovation(), p, stream);
  auto theta = projection_norm_linear(seq.coeffs, p, model.innovation(), stream);
  return DependenceProfile::from_theta(std::move(theta), p, c0 * seq.tail_bound);
}

// ---------------------------------------------------------------------------

ProjectionEstimate projection_norm_mc(const ProcessModel& model, std::size_t n, double p,
                                      std::size_t outer, std::size_t inner,
                                      const SeedLineage& stream, unsigned workers) {
  if (inner < 2) throw ConfigError("projection_norm_mc needs at least 2 inner draws");
  if (outer < 2) throw ConfigError("projection_norm_mc needs at least 2 outer draws");
  if (p < 1.0) throw DomainError("projection_norm_mc needs p >= 1");
  const std::size_t burn = model.burn_in();
  const auto& dist = model.innovation();

  std::vector<double> powers(outer), inner_var(outer);
  parallel_for(outer, workers, [&](std::size_t r) {
    const auto idx = static_cast<std::uint32_t>(r);
    const CounterStream hist(stream.with(Purpose::ProjectionOuter, idx));
    const CounterStream fut(stream.with(Purpose::ProjectionInner, idx));
    // history eps_{-burn} .. eps_{-1}, then eps_0 and its independent copy
    ProcessState base = model.initial_state();
    for (std::int64_t t = -static_cast<std::int64_t>(burn); t < 0; ++t) model.step(base, dist.sample(hist, t));
    ProcessState with_eps = base, with_copy = base;
    const double x0 = model.step(with_eps, dist.sample(hist, 0));
    const double x0c = model.step(with_copy, dist.sample(hist, 1));

    // Common inner draws for both branches; each mean is still unbiased.
    CompensatedSum diff_sum;
    std::vector<double> diffs(inner);
    for (std::size_t j = 0; j < inner; ++j) {
      ProcessState a = with_eps, b = with_copy;
      double xa = x0, xb = x0c;
      for (std::size_t t = 1; t <= n; ++t) {
        const double e = dist.sample(fut, static_cast<std::int64_t>(j * n + t - 1));
        xa = model.step(a, e);
        xb = model.step(b, e);
      }
      diffs[j] = xa - xb;
      diff_sum.add(diffs[j]);
    }
    const double mean = diff_sum.value() / static_cast<double>(inner);
    CompensatedSum ss;
    for (double d : diffs) ss.add((d - mean) * (d - mean));
    inner_var[r] = ss.value() / static_cast<double>(inner - 1);
    powers[r] = std::pow(std::abs(mean), p);
  });

  ProjectionEstimate est;
  est.outer = outer;
  est.inner = inner;
  std::tie(est.theta, est.stderr_) = norm_from_powers(powers, p);
  CompensatedSum pooled;
  for (double v : inner_var) pooled.add(v);
  est.inner_bias = std::sqrt(pooled.value() / static_cast<double>(outer) / static_cast<double>(inner));
  est.bias_flagged = est.inner_bias > est.theta / 3.0;
  return est;
}

// ---------------------------------------------------------------------------

MartingaleApproximant martingale_approximant_linear(const PathBundle& bundle, const ProcessModel& model,
                                                    const BNDecomposition& bn) {
  if (!model.is_linear()) throw ConfigError("martingale approximant needs a linear model");
  const auto& a = model.coefficients().coeffs;
  if (bn.tilde.size() != a.size()) throw ConfigError("BN decomposition does not match the model coefficients");
  const std::size_t n = bundle.length();
  const auto x = bundle.values();
  const std::int64_t earliest = 1 - static_cast<std::int64_t>(bundle.burn_in());

  // The bundle must be the convolution of this model's coefficients with its innovations.
  for (std::size_t k = 1; k <= n; ++k) {
    double conv = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::int64_t t = static_cast<std::int64_t>(k) - static_cast<std::int64_t>(i);
      if (t < earliest) break;
      const double term = a[i] * bundle.innovation(t);
      conv += term;
      scale += std::abs(term);
    }
    if (std::abs(conv - x[k - 1]) > 1e-9 * std::max(1.0, scale))
      throw ConfigError("bundle does not match the linear model at index " + std::to_string(k));
  }

  MartingaleApproximant out;
  out.D.resize(n);
  out.M.assign(n + 1, 0.0);
  out.R.assign(n + 1, 0.0);
  const double tilde0 = tilde_innovation(bn, bundle, 0);
  for (std::size_t k = 1; k <= n; ++k) {
    out.D[k - 1] = bn.total * bundle.innovation(static_cast<std::int64_t>(k));
    out.M[k] = out.M[k - 1] + out.D[k - 1];
    out.R[k] = tilde0 - tilde_innovation(bn, bundle, static_cast<std::int64_t>(k));
  }
  return out;
}

// ---------------------------------------------------------------------------

LongRunParams long_run_params(const ProcessModel& model, std::size_t reps, std::size_t horizon,
                              const SeedLineage& stream, unsigned workers) {
  LongRunParams out;
  if (const auto& meta = model.analytic()) {
    out.provenance = Provenance::Analytic;
    out.lambda = meta->lambda;
    out.sigma = meta->sigma;
    out.gamma0 = meta->autocovariance.front();
    out.summable = std::isfinite(model.coefficients().tail_bound);
    if (!out.summable) out.note = "coefficient tail is not summable; lambda and sigma cover stored terms only";
    return out;
  }
  if (const auto* arch = std::get_if<Arch1Spec>(&model.variant())) {
    // X_t = eps_t sigma_t with centred eps: a martingale difference, so gamma(j) = 0 for j >= 1
    const double v = model.innovation().variance();
    out.provenance = Provenance::Analytic;
    out.lambda = 0.0;
    out.gamma0 = arch->omega * v / (1.0 - arch->beta * v);
    out.sigma = std::sqrt(out.gamma0);
    return out;
  }

  if (reps < 2) throw ConfigError("long_run_params needs at least 2 replications");
  if (horizon < 8) throw ConfigError("long_run_params needs horizon >= 8");
  const std::size_t lags = std::min<std::size_t>(100, horizon / 4);
  // gamma-hat(j) per replication, known zero mean
  std::vector<std::vector<double>> gam(reps, std::vector<double>(lags + 1));
  parallel_for(reps, workers, [&](std::size_t r) {
    const auto bundle = simulate_path(model, horizon, stream.with_replication(static_cast<std::uint32_t>(r))
                                                          .with(Purpose::LongRun));
    const auto x = bundle.values();
    for (std::size_t j = 0; j <= lags; ++j) {
      CompensatedSum s;
      for (std::size_t t = 0; t + j < horizon; ++t) s.add(x[t] * x[t + j]);
      gam[r][j] = s.value() / static_cast<double>(horizon - j);
    }
  });

  std::vector<double> lam(reps), sig2(reps), g0(reps), late(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    CompensatedSum l, tail;
    for (std::size_t j = 1; j <= lags; ++j) {
      l.add(gam[r][j]);
      if (2 * j > lags) tail.add(gam[r][j]);
    }
    lam[r] = l.value();
    g0[r] = gam[r][0];
    sig2[r] = g0[r] + 2.0 * lam[r];
    late[r] = tail.value();
  }
  const auto [lm, lse] = mean_stderr(lam);
  const auto [s2, s2se] = mean_stderr(sig2);
  const auto [g0m, g0se] = mean_stderr(g0);
  const auto [tm, tse] = mean_stderr(late);
  out.provenance = Provenance::MonteCarlo;
  out.lambda = lm;
  out.lambda_stderr = lse;
  out.gamma0 = g0m;
  out.sigma = std::sqrt(std::max(0.0, s2));
  out.sigma_stderr = s2 > 0.0 ? s2se / (2.0 * out.sigma) : 0.0;
  // Covariances at the far half of the lag window should be indistinguishable from zero.
  out.summable = std::abs(tm) <= 3.0 * tse + 1e-3 * std::abs(g0m);
  if (!out.summable)
    out.note = "autocovariance sum over lags " + std::to_string(lags / 2 + 1) + ".." + std::to_string(lags) +
               " is " + fmt(tm) + " (stderr " + fmt(tse) + "); summability not supported";
  (void)g0se;
  return out;
}

// ---------------------------------------------------------------------------

Assumption1Report assumption1_check(const DependenceProfile& profile, double q) {
  Assumption1Report rep;
  rep.q = q;
  rep.q_star = std::min(q, 4.0);
  const double expo = 0.5 - 1.0 / rep.q_star;
  if (std::abs(profile.p - rep.q_star) > 1e-12)
    rep.reason = "profile order p=" + fmt(profile.p) + " differs from q*=" + fmt(rep.q_star) + "; ";

  if (!std::isfinite(profile.Theta_at(0))) {
    rep.pass = false;
    rep.reason += "Theta_{0,q*} diverges (coefficients not absolutely summable)";
    return rep;
  }
  const std::size_t stored = profile.theta.size();
  for (std::size_t n = 2; n < stored || rep.n_grid.empty(); n *= 2) rep.n_grid.push_back(n);
  for (std::size_t n : rep.n_grid) {
    const double th = profile.Theta_at(n);
    const double nn = static_cast<double>(n);
    rep.Theta.push_back(th);
    rep.normalized.push_back(th * std::pow(nn, expo) * std::log(nn));
  }
  rep.sup = *std::max_element(rep.normalized.begin(), rep.normalized.end());

  if (profile.Theta_at(1) == 0.0) {
    rep.pass = true;
    rep.reason += "finite dependence window: Theta_{n,q*} = 0 for n >= 1";
    return rep;
  }
  if (rep.n_grid.size() < 2) {
    rep.pass = true;
    rep.reason += "too few stored lags for a trend; Theta finite";
    return rep;
  }
  const std::size_t half = rep.n_grid.size() / 2;
  const double early = *std::max_element(rep.normalized.begin(), rep.normalized.begin() + half);
  const double late = *std::max_element(rep.normalized.begin() + half, rep.normalized.end());
  rep.pass = late <= early * (1.0 + 1e-9);
  rep.reason += rep.pass ? "normalized tail plateaus or decays (late max " + fmt(late) + " <= early max " +
                               fmt(early) + ")"
                         : "normalized tail grows (late max " + fmt(late) + " > early max " + fmt(early) + ")";
  return rep;
}

Assumption2Report assumption2_check(const ProcessModel& model, double q, const SeedLineage& stream) {
  Assumption2Report rep;
  const double q_star = std::min(q, 4.0);
  if (model.is_linear()) {
    rep.checked = true;
    rep.ratio = 0.0;
    rep.sum = 0.0;
    rep.pass = true;
    rep.reason = "linear: E(D_k^2|F_0) = A^2 var(eps) for k >= 1";
    return rep;
  }
  const auto* arch = std::get_if<Arch1Spec>(&model.variant());
  if (!arch) {
    rep.checked = false;
    rep.pass = true;
    rep.reason = "no closed-form conditional variance for " + model.kind_name() + "; not checked";
    return rep;
  }
  // D_k = X_k and E(X_k^2|F_0) - sigma^2 = rho^k (X_0^2 - sigma^2), rho = beta var(eps).
  const double var = model.innovation().variance();
  const double rho = arch->beta * var;
  const double sigma2 = arch->omega * var / (1.0 - rho);
  rep.checked = true;
  rep.ratio = rho;
  // X_0 needs q* finite moments: E X^4 < inf iff beta^2 E eps^4 < 1.
  if (q_star > 2.0 && arch->beta * arch->beta * model.innovation().fourth_moment() >= 1.0) {
    rep.pass = false;
    rep.sum = kInf;
    rep.reason = "X_0 lacks finite fourth moment (beta^2 E eps^4 >= 1)";
    return rep;
  }
  const std::size_t len = 200'000;
  const auto bundle = simulate_path(model, len, stream.with(Purpose::Conditional));
  const double r = q_star / 2.0;
  CompensatedSum acc;
  for (double x : bundle.values()) acc.add(std::pow(std::abs(x * x - sigma2), r));
  const double norm = std::pow(acc.value() / static_cast<double>(len), 1.0 / r);
  rep.sum = rho / (1.0 - rho) * norm;
  rep.pass = std::isfinite(rep.sum);
  rep.reason = "arch1: geometric decay rate " + fmt(rho) + ", ||X_0^2 - sigma^2|| ~ " + fmt(norm);
  return rep;
}

Assumption3Report assumption3_bound_linear(const CoefficientSequence& seq) {
  Assumption3Report rep;
  const auto bn = bn_decompose(seq.coeffs);
  const std::size_t len = seq.coeffs.size();
  // U_j = sum_{i>=j} |tilde_i|
  std::vector<double> U(len + 1, 0.0);
  for (std::size_t i = len; i-- > 0;) U[i] = U[i + 1] + std::abs(bn.tilde[i]);
  CompensatedSum v;
  for (std::size_t j = 1; j < len; ++j) v.add(static_cast<double>(j) * std::abs(seq.coeffs[j]) * U[j]);
  rep.value = v.value();

  const double T = seq.tail_bound;
  const double m = static_cast<double>(len - 1);
  double tail_tilde = 0.0, beyond = 0.0;  // sum_{i>m}|tilde_i| and the j > m part of the sum
  switch (seq.family) {
    case CoefficientSequence::Family::Explicit: break;
    case CoefficientSequence::Family::Geometric: {
      const double rho = std::abs(seq.family_parameter);
      tail_tilde = std::pow(rho, m + 2.0) / ((1.0 - rho) * (1.0 - rho));
      for (double j = m + 1.0;; j += 1.0) {
        const double term = j * std::pow(rho, 2.0 * j + 1.0) / ((1.0 - rho) * (1.0 - rho));
        beyond += term;
        if (term < 1e-300 || term < 1e-18 * beyond) break;
      }
      break;
    }
    case CoefficientSequence::Family::Power: {
      const double d = seq.family_parameter;
      if (d <= 2.0) {
        tail_tilde = kInf;
        beyond = kInf;
      } else {
        tail_tilde = std::pow(m + 1.0, 2.0 - d) / ((d - 1.0) * (d - 2.0));
        beyond = std::pow(m + 1.0, 4.0 - 2.0 * d) / ((2.0 * d - 4.0) * (d - 1.0) * (d - 2.0));
      }
      break;
    }
  }
  CompensatedSum stored_err;
  for (std::size_t j = 1; j < len; ++j)
    stored_err.add(static_cast<double>(j) * std::abs(seq.coeffs[j]) *
                   (static_cast<double>(len - j) * T + tail_tilde));
  rep.tail_bound = std::isfinite(tail_tilde) ? stored_err.value() + beyond : kInf;
  rep.pass = std::isfinite(rep.value) && std::isfinite(rep.tail_bound);
  rep.reason = rep.pass ? "triple sum finite" : "triple sum diverges for this coefficient family";
  return rep;
}

// ---------------------------------------------------------------------------

double burkholder_constant(double q) {
  if (!(q > 1.0)) throw DomainError("Burkholder constant needs q > 1");
  if (q == 2.0) return 1.0;
  return 18.0 * std::pow(q, 1.5) / std::sqrt(q - 1.0);
}

Lemma1Report lemma1_from_maxima(std::span<const double> maxima, double q, std::size_t n, double Theta0) {
  if (maxima.empty()) throw ConfigError("lemma1 check needs at least one replication");
  if (!std::isfinite(Theta0)) throw ConfigError("Theta_{0,q} is not finite");
  Lemma1Report rep;
  rep.q = q;
  rep.n = n;
  rep.Theta0 = Theta0;
  std::vector<double> powers(maxima.size());
  for (std::size_t i = 0; i < maxima.size(); ++i) powers[i] = std::pow(std::abs(maxima[i]), q);
  std::tie(rep.lhs, rep.lhs_stderr) = norm_from_powers(powers, q);
  const double q_prime = std::min(2.0, q);
  rep.rhs = q * burkholder_constant(q) / (q - 1.0) * std::pow(static_cast<double>(n), 1.0 / q_prime) * Theta0;
  rep.holds = rep.lhs <= rep.rhs + 3.0 * rep.lhs_stderr;
  return rep;
}

std::vector<double> max_partial_sums(const ProcessModel& model, std::size_t n, std::size_t reps,
                                     const SeedLineage& stream, unsigned workers) {
  std::vector<double> out(reps);
  parallel_for(reps, workers, [&](std::size_t r) {
    const auto bundle = simulate_path(model, n, stream.with_replication(static_cast<std::uint32_t>(r)));
    double mx = 0.0;
    for (double s : bundle.partial_sums()) mx = std::max(mx, std::abs(s));
    out[r] = mx;
  });
  return out;
}

Lemma1Report lemma1_inequality_check(const ProcessModel& model, double q, std::size_t n, std::size_t reps,
                                     const SeedLineage& stream, const std::optional<DependenceProfile>& profile,
                                     unsigned workers) {
  double Theta0 = kInf;
  if (profile) {
    Theta0 = profile->Theta_at(0);
  } else if (model.is_linear()) {
    Theta0 = linear_profile(model, q, stream).Theta_at(0);
  } else {
    throw ConfigError("Theta_{0,q} unavailable for " + model.kind_name() + "; supply a dependence profile");
  }
  const auto maxima = max_partial_sums(model, n, reps, stream.with(Purpose::Innovations), workers);
  return lemma1_from_maxima(maxima, q, n, Theta0);
}

}  // namespace clab

#include "causal_lab/functional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "causal_lab/errors.hpp"

namespace clab {

namespace {

std::vector<double> parse_numbers(const std::string& body, const std::string& whole) {
  std::vector<double> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ConfigError("functional '" + whole + "': '" + item + "' is not a number");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos)
      throw ConfigError("functional '" + whole + "': '" + item + "' is not a number");
    if (!std::isfinite(v)) throw ConfigError("functional '" + whole + "': parameters must be finite");
    out.push_back(v);
  }
  return out;
}

}  // namespace

FunctionalSpec::FunctionalSpec(Kind kind, std::vector<double> params)
    : kind_(kind), params_(std::move(params)) {}

FunctionalSpec FunctionalSpec::constant(double c) {
  FunctionalSpec s(Kind::Constant, {c});
  s.K_ = 0.0;
  s.alpha_ = 1.0;
  return s;
}

FunctionalSpec FunctionalSpec::identity() {
  FunctionalSpec s(Kind::Identity, {});
  s.K_ = 1.0;
  s.alpha_ = 1.0;
  return s;
}

FunctionalSpec FunctionalSpec::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) throw ConfigError("polynomial functional needs at least one coefficient");
  FunctionalSpec s(Kind::Polynomial, std::move(coeffs));
  // |f'(x)| <= sum k|c_k| |x|^{k-1} <= (sum k|c_k|)(1 + |x|^{max(d-1,1)})
  double K = 0.0;
  for (std::size_t k = 1; k < s.params_.size(); ++k) K += static_cast<double>(k) * std::abs(s.params_[k]);
  s.K_ = K;
  s.alpha_ = std::max(1.0, static_cast<double>(s.params_.size()) - 2.0);
  return s;
}

FunctionalSpec FunctionalSpec::scaled_sine(double amp, double freq) {
  FunctionalSpec s(Kind::ScaledSine, {amp, freq});
  s.K_ = std::abs(amp * freq);
  s.alpha_ = 1.0;
  return s;
}

FunctionalSpec FunctionalSpec::logistic(double scale) {
  if (!(scale > 0.0)) throw ConfigError("logistic functional needs scale > 0");
  FunctionalSpec s(Kind::Logistic, {scale});
  s.K_ = scale / 4.0;
  s.alpha_ = 1.0;
  return s;
}

FunctionalSpec FunctionalSpec::exponential(double rate, bool allow_exp_growth) {
  if (!allow_exp_growth)
    throw ConfigError("exponential f grows faster than any polynomial; pass --allow-exp-growth to run it "
                      "outside Theorem 1 hypotheses");
  FunctionalSpec s(Kind::Exponential, {rate});
  s.K_ = std::abs(rate);
  s.alpha_ = std::numeric_limits<double>::infinity();
  return s;
}

FunctionalSpec FunctionalSpec::parse(const std::string& text, bool allow_exp_growth) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  const std::vector<double> p =
      colon == std::string::npos ? std::vector<double>{} : parse_numbers(text.substr(colon + 1), text);
  auto need = [&](std::size_t count) {
    if (p.size() != count)
      throw ConfigError("functional '" + text + "' expects " + std::to_string(count) + " parameter(s)");
  };
  if (name == "identity") {
    need(0);
    return identity();
  }
  if (name == "constant") {
    need(1);
    return constant(p[0]);
  }
  if (name == "polynomial") return polynomial(p);
  if (name == "sine") {
    need(2);
    return scaled_sine(p[0], p[1]);
  }
  if (name == "logistic") {
    need(1);
    return logistic(p[0]);
  }
  if (name == "exp") {
    need(1);
    return exponential(p[0], allow_exp_growth);
  }
  throw ConfigError("unknown functional '" + text + "'");
}

std::string FunctionalSpec::describe() const {
  std::ostringstream os;
  os.precision(10);
  auto list = [&] {
    for (std::size_t i = 0; i < params_.size(); ++i) os << (i ? "," : "") << params_[i];
  };
  switch (kind_) {
    case Kind::Constant: os << "constant:"; break;
    case Kind::Identity: return "identity";
    case Kind::Polynomial: os << "polynomial:"; break;
    case Kind::ScaledSine: os << "sine:"; break;
    case Kind::Logistic: os << "logistic:"; break;
    case Kind::Exponential: os << "exp:"; break;
  }
  list();
  return os.str();
}

double FunctionalSpec::f(double x) const {
  switch (kind_) {
    case Kind::Constant: return params_[0];
    case Kind::Identity: return x;
    case Kind::Polynomial: {
      double v = 0.0;
      for (std::size_t k = params_.size(); k-- > 0;) v = v * x + params_[k];
      return v;
    }
    case Kind::ScaledSine: return params_[0] * std::sin(params_[1] * x);
    case Kind::Logistic: return 1.0 / (1.0 + std::exp(-params_[0] * x));
    case Kind::Exponential: return std::exp(params_[0] * x);
  }
  return 0.0;
}

double FunctionalSpec::df(double x) const {
  switch (kind_) {
    case Kind::Constant: return 0.0;
    case Kind::Identity: return 1.0;
    case Kind::Polynomial: {
      double v = 0.0;
      for (std::size_t k = params_.size(); k-- > 1;) v = v * x + static_cast<double>(k) * params_[k];
      return v;
    }
    case Kind::ScaledSine: return params_[0] * params_[1] * std::cos(params_[1] * x);
    case Kind::Logistic: {
      const double s = f(x);
      return params_[0] * s * (1.0 - s);
    }
    case Kind::Exponential: return params_[0] * std::exp(params_[0] * x);
  }
  return 0.0;
}

double FunctionalSpec::d2f(double x) const {
  switch (kind_) {
    case Kind::Constant:
    case Kind::Identity: return 0.0;
    case Kind::Polynomial: {
      double v = 0.0;
      for (std::size_t k = params_.size(); k-- > 2;)
        v = v * x + static_cast<double>(k) * static_cast<double>(k - 1) * params_[k];
      return v;
    }
    case Kind::ScaledSine: return -params_[0] * params_[1] * params_[1] * std::sin(params_[1] * x);
    case Kind::Logistic: {
      const double s = f(x);
      return params_[0] * params_[0] * s * (1.0 - s) * (1.0 - 2.0 * s);
    }
    case Kind::Exponential: return params_[0] * params_[0] * std::exp(params_[0] * x);
  }
  return 0.0;
}

FunctionalSpec::Validation FunctionalSpec::validate(double tol, double h) const {
  Validation v;
  for (int i = -500; i <= 500; ++i) {
    const double x = i / 100.0;
    const double fd1 = (f(x + h) - f(x - h)) / (2.0 * h);
    const double allow1 = tol * (1.0 + std::abs(d2f(x))) * h;
    const double r1 = std::abs(fd1 - df(x)) / allow1;
    v.worst_first = std::max(v.worst_first, r1);
    if (r1 > 1.0) v.derivative_ok = false;

    const double fd2 = (df(x + h) - df(x - h)) / (2.0 * h);
    const double r2 = std::abs(fd2 - d2f(x)) / allow1;
    v.worst_second = std::max(v.worst_second, r2);
    if (r2 > 1.0) v.second_derivative_ok = false;

    if (kind_ != Kind::Exponential && std::abs(df(x)) > K_ * (1.0 + std::pow(std::abs(x), alpha_)) * (1.0 + 1e-12))
      v.growth_ok = false;
  }
  return v;
}

}  // namespace clab

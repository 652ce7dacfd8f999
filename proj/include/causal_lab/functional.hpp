#pragma once

#include <string>
#include <vector>

namespace clab {

/// A C^2 integrand f with f', f'' and certified growth |f'(x)| <= K (1 + |x|^alpha).
class FunctionalSpec {
 public:
  enum class Kind { Constant, Identity, Polynomial, ScaledSine, Logistic, Exponential };

  static FunctionalSpec constant(double c);
  static FunctionalSpec identity();
  /// f(x) = sum_k c_k x^k
  static FunctionalSpec polynomial(std::vector<double> coeffs);
  /// f(x) = amp * sin(freq * x)
  static FunctionalSpec scaled_sine(double amp, double freq);
  /// f(x) = 1 / (1 + exp(-scale * x))
  static FunctionalSpec logistic(double scale);
  /// f(x) = exp(rate * x). Outside the polynomial-growth hypothesis; needs allow_exp_growth.
  static FunctionalSpec exponential(double rate, bool allow_exp_growth);

  /// "identity", "constant:c", "polynomial:c0,c1,...", "sine:amp,freq", "logistic:scale", "exp:rate".
  static FunctionalSpec parse(const std::string& text, bool allow_exp_growth = false);

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] const std::vector<double>& params() const noexcept { return params_; }
  [[nodiscard]] std::string describe() const;

  [[nodiscard]] double f(double x) const;
  [[nodiscard]] double df(double x) const;
  [[nodiscard]] double d2f(double x) const;

  [[nodiscard]] double growth_K() const noexcept { return K_; }
  [[nodiscard]] double growth_alpha() const noexcept { return alpha_; }
  /// True for exponential growth admitted by override.
  [[nodiscard]] bool outside_hypotheses() const noexcept { return kind_ == Kind::Exponential; }

  struct Validation {
    bool derivative_ok = true;
    bool second_derivative_ok = true;
    bool growth_ok = true;
    double worst_first = 0.0;   // max residual / allowance for f'
    double worst_second = 0.0;  // same for f''
    [[nodiscard]] bool ok() const noexcept { return derivative_ok && second_derivative_ok && growth_ok; }
  };

  /// Central differences with step h on the grid x in [-5, 5]; allowance tol * (1 + |f''(x)|) * h.
  [[nodiscard]] Validation validate(double tol = 1e-2, double h = 1e-5) const;

 private:
  FunctionalSpec(Kind kind, std::vector<double> params);

  Kind kind_;
  std::vector<double> params_;
  double K_ = 0.0;
  double alpha_ = 1.0;
};

}  // namespace clab

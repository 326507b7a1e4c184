#pragma once

/// @file damping_law.hpp
/// @brief Damping functions f for the term f(|u|)u, their derivatives, and
/// sampled certification of the pointwise inequalities the analysis uses.

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace nsdamp {

/// Relative slack applied to every sampled pointwise inequality.
inline constexpr double kPointwiseTolerance = 1e-12;

enum class DampingFamily { Polynomial, Exponential, Custom };

std::string to_string(DampingFamily family);
DampingFamily parse_family(const std::string& name);

/// A damping function f : R+ -> R+.
///
/// Polynomial:  f(x) = alpha * x^(beta - 1),        alpha > 0, beta >= 2
/// Exponential: f(x) = alpha * (exp(beta * x^r) - 1), alpha, beta > 0, r >= 1
/// Custom:      caller-supplied f and f' (named, so it can be serialized)
class DampingLaw {
public:
  using ScalarFn = std::function<double(double)>;

  static DampingLaw polynomial(double alpha, double beta);
  static DampingLaw exponential(double alpha, double beta, double r);
  static DampingLaw custom(std::string name, ScalarFn eval, ScalarFn derivative);
  /// f == 0; the plain Navier-Stokes limit.
  static DampingLaw zero();
  /// Looks up the built-in custom laws ("zero", "sin", "identity").
  static DampingLaw named_custom(const std::string& name);

  DampingFamily family() const { return family_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double r() const { return r_; }
  const std::string& custom_name() const { return name_; }
  bool is_zero() const { return is_zero_; }

  /// f(x); throws DomainError for x < 0.
  double eval(double x) const;
  /// f'(x); throws DomainError for x < 0.
  double derivative(double x) const;

  /// f(sqrt(s)) given s = |u|^2 >= 0, without the domain check. Used by the
  /// pointwise kernels, where the square norm is what is at hand.
  double eval_from_square(double s) const noexcept;

  std::string describe() const;

private:
  DampingLaw() = default;
  double eval_unchecked(double x) const noexcept;

  DampingFamily family_ = DampingFamily::Custom;
  double alpha_ = 0.0;
  double beta_ = 0.0;
  double r_ = 1.0;
  std::string name_;
  ScalarFn custom_eval_;
  ScalarFn custom_deriv_;
  bool is_zero_ = false;
  // Integer exponent (beta - 1 for Polynomial, r for Exponential), or -1.
  int integer_power_ = -1;
};

/// Plain-text key/value block: family, alpha, beta, r (and custom for
/// Custom laws). `prefix` is prepended to every key, e.g. "law.".
std::string serialize_law(const DampingLaw& law, const std::string& prefix = "");
DampingLaw parse_law(const std::map<std::string, std::string>& kv,
                     const std::string& prefix = "");

// ---------------------------------------------------------------------------
// Certification

/// Sorted sample points on [0, x_max] (or (0, x_max] when include_zero is
/// false): half logarithmically spaced from x_max*1e-8, half uniform.
std::vector<double> certification_grid(double x_max, int n_samples, bool include_zero);

enum class AdmissibilityIssue { NonzeroAtZero, NegativeValue, Decreasing, NegativeDerivative, DerivativeDecreasing };
std::string to_string(AdmissibilityIssue issue);

struct AdmissibilityViolation {
  AdmissibilityIssue issue;
  double x;
  double value;
};

struct AdmissibilityReport {
  double x_max = 0.0;
  int n_samples = 0;
  std::vector<AdmissibilityViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks f(0) = 0, f >= 0, f nondecreasing, f' >= 0 and f' nondecreasing on
/// a mixed geometric/uniform sample of [0, x_max]. Violations are data.
AdmissibilityReport verify_admissible(const DampingLaw& law, double x_max, int n_samples);

struct BoundSample {
  double x;
  double f_x;
  double bound;  // c x^p
  bool violated;
};

struct LowerBoundCert {
  double c = 0.0;
  double p = 0.0;
  double verified_up_to = 0.0;
  std::size_t samples_checked = 0;
  std::vector<BoundSample> violations;
  /// p > 2: the hypothesis under which the uniqueness argument applies.
  bool uniqueness_applicable = false;
  bool verified() const { return samples_checked > 0 && violations.empty(); }
};

/// The closed-form (c, p) for Polynomial (c = alpha, p = beta - 1) and
/// Exponential (p = r + 1, c = alpha beta^(r/(r+1)) / (r+1)) laws. The
/// constants are not checked here; samples_checked stays 0.
/// Throws UnsupportedError for Custom laws.
LowerBoundCert lower_bound_constants(const DampingLaw& law);

/// Every sample of f(x) against c x^p on (0, x_max].
std::vector<BoundSample> sample_lower_bound(const DampingLaw& law, double c, double p,
                                            double x_max, int n_samples);

/// f(x) >= c x^p on the sample, with violations recorded.
LowerBoundCert verify_lower_bound(const DampingLaw& law, double c, double p, double x_max,
                                  int n_samples);

void write_bound_csv(std::ostream& os, const std::vector<BoundSample>& rows);

using Vec3 = std::array<double, 3>;

struct InequalitySides {
  double lhs;
  double rhs;
};

/// lhs = (f(|u|)u - f(|v|)v).(u - v), rhs = (c/4)(|u|^p + |v|^p)|u - v|^2.
InequalitySides monotonicity_gap(const DampingLaw& law, const Vec3& u, const Vec3& v, double c,
                                 double p);
bool monotonicity_holds(const InequalitySides& s, double tol = kPointwiseTolerance);

/// lhs = |f(x) - f(y)|, rhs = f'(R)|x - y|. Requires 0 <= x, y <= R.
InequalitySides lipschitz_gap(const DampingLaw& law, double x, double y, double R);
bool lipschitz_holds(const InequalitySides& s, double tol = kPointwiseTolerance);

struct BatteryResult {
  std::size_t trials = 0;
  std::size_t violations = 0;
  /// Smallest (slack side - strict side) / (1 + |reference side|) seen.
  double worst_margin = 0.0;
  bool ok() const { return trials > 0 && violations == 0; }
};

/// monotonicity_gap on `pairs` uniform (u, v) in [-box, box]^3 x [-box, box]^3.
BatteryResult monotonicity_battery(const DampingLaw& law, double c, double p, int pairs,
                                   double box, std::uint64_t seed,
                                   double tol = kPointwiseTolerance);

/// lipschitz_gap on `pairs` uniform (x, y) in [0, R]^2.
BatteryResult lipschitz_battery(const DampingLaw& law, double R, int pairs, std::uint64_t seed,
                                double tol = kPointwiseTolerance);

/// sup_{a >= 0} [a^2/(4 nu) - (c/2) a^p], attained at a* = (1/(nu c p))^(1/(p-2)).
/// Throws DomainError unless nu > 0, c > 0, p > 2.
double young_constant(double nu, double c, double p);

}  // namespace nsdamp

#include "nsdamp/damping_law.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include "nsdamp/errors.hpp"
#include "nsdamp/random.hpp"
#include "nsdamp/text.hpp"

namespace nsdamp {

namespace {

double ipow(double base, int exponent) {
  double result = 1.0;
  while (exponent > 0) {
    if (exponent & 1) result *= base;
    base *= base;
    exponent >>= 1;
  }
  return result;
}

void require_nonnegative(double x, const char* op) {
  if (!(x >= 0.0)) {
    throw DomainError(std::string(op) + ": argument must be >= 0, got " + text::format_double(x));
  }
}

bool is_small_integer(double v) { return v >= 0.0 && v <= 64.0 && v == std::floor(v); }

// x^p, by repeated squaring for small integer p. Shared by eval and the
// lower-bound check so that f(x) = c x^p is reproduced bit for bit.
double power(double x, double p) {
  return is_small_integer(p) ? ipow(x, static_cast<int>(p)) : std::pow(x, p);
}

}  // namespace

std::string to_string(DampingFamily family) {
  switch (family) {
    case DampingFamily::Polynomial: return "polynomial";
    case DampingFamily::Exponential: return "exponential";
    case DampingFamily::Custom: return "custom";
  }
  return "custom";
}

DampingFamily parse_family(const std::string& name) {
  const auto v = text::lower(name);
  if (v == "polynomial") return DampingFamily::Polynomial;
  if (v == "exponential") return DampingFamily::Exponential;
  if (v == "custom") return DampingFamily::Custom;
  throw ParseError("unknown damping family '" + name + "'");
}

DampingLaw DampingLaw::polynomial(double alpha, double beta) {
  if (!(alpha > 0.0)) throw DomainError("polynomial damping requires alpha > 0");
  if (!(beta >= 2.0)) throw DomainError("polynomial damping requires beta >= 2");
  DampingLaw law;
  law.family_ = DampingFamily::Polynomial;
  law.alpha_ = alpha;
  law.beta_ = beta;
  if (is_small_integer(beta - 1.0)) law.integer_power_ = static_cast<int>(beta - 1.0);
  return law;
}

DampingLaw DampingLaw::exponential(double alpha, double beta, double r) {
  if (!(alpha > 0.0)) throw DomainError("exponential damping requires alpha > 0");
  if (!(beta > 0.0)) throw DomainError("exponential damping requires beta > 0");
  if (!(r >= 1.0)) throw DomainError("exponential damping requires r >= 1");
  DampingLaw law;
  law.family_ = DampingFamily::Exponential;
  law.alpha_ = alpha;
  law.beta_ = beta;
  law.r_ = r;
  if (is_small_integer(r)) law.integer_power_ = static_cast<int>(r);
  return law;
}

DampingLaw DampingLaw::custom(std::string name, ScalarFn eval, ScalarFn derivative) {
  if (!eval || !derivative) throw std::invalid_argument("custom damping needs f and f'");
  DampingLaw law;
  law.family_ = DampingFamily::Custom;
  law.name_ = std::move(name);
  law.custom_eval_ = std::move(eval);
  law.custom_deriv_ = std::move(derivative);
  return law;
}

DampingLaw DampingLaw::zero() {
  auto law = custom("zero", [](double) { return 0.0; }, [](double) { return 0.0; });
  law.is_zero_ = true;
  return law;
}

DampingLaw DampingLaw::named_custom(const std::string& name) {
  const auto v = text::lower(name);
  if (v == "zero" || v == "none") return zero();
  if (v == "sin") {
    return custom("sin", [](double x) { return std::sin(x); }, [](double x) { return std::cos(x); });
  }
  if (v == "identity") {
    return custom("identity", [](double x) { return x; }, [](double) { return 1.0; });
  }
  throw ParseError("unknown custom damping law '" + name + "'");
}

double DampingLaw::eval_unchecked(double x) const noexcept {
  switch (family_) {
    case DampingFamily::Polynomial: {
      return alpha_ * power(x, beta_ - 1.0);
    }
    case DampingFamily::Exponential: {
      const double xr = integer_power_ >= 0 ? ipow(x, integer_power_) : std::pow(x, r_);
      // expm1 keeps f(0) = 0 exact and avoids cancellation for small beta x^r.
      return alpha_ * std::expm1(beta_ * xr);
    }
    case DampingFamily::Custom:
      return is_zero_ ? 0.0 : custom_eval_(x);
  }
  return 0.0;
}

double DampingLaw::eval(double x) const {
  require_nonnegative(x, "eval");
  return eval_unchecked(x);
}

double DampingLaw::derivative(double x) const {
  require_nonnegative(x, "eval_derivative");
  switch (family_) {
    case DampingFamily::Polynomial: {
      const double m = beta_ - 1.0;
      const double power = integer_power_ >= 1 ? ipow(x, integer_power_ - 1)
                                                    : std::pow(x, m - 1.0);
      return alpha_ * m * power;
    }
    case DampingFamily::Exponential: {
      const double xr = std::pow(x, r_);
      const double xr1 = std::pow(x, r_ - 1.0);
      return alpha_ * beta_ * r_ * xr1 * std::exp(beta_ * xr);
    }
    case DampingFamily::Custom:
      return is_zero_ ? 0.0 : custom_deriv_(x);
  }
  return 0.0;
}

double DampingLaw::eval_from_square(double s) const noexcept {
  if (is_zero_) return 0.0;
  if (integer_power_ >= 0) {
    const int m = integer_power_;
    // x^m from s = x^2 without a pow call for the common integer exponents.
    const double xm = (m % 2 == 0) ? ipow(s, m / 2) : ipow(s, m / 2) * std::sqrt(s);
    if (family_ == DampingFamily::Polynomial) return alpha_ * xm;
    return alpha_ * std::expm1(beta_ * xm);
  }
  return eval_unchecked(std::sqrt(s));
}

std::string DampingLaw::describe() const {
  std::ostringstream os;
  switch (family_) {
    case DampingFamily::Polynomial:
      os << "Polynomial(alpha=" << text::format_double(alpha_)
         << ", beta=" << text::format_double(beta_) << ")";
      break;
    case DampingFamily::Exponential:
      os << "Exponential(alpha=" << text::format_double(alpha_)
         << ", beta=" << text::format_double(beta_) << ", r=" << text::format_double(r_) << ")";
      break;
    case DampingFamily::Custom:
      os << "Custom(" << name_ << ")";
      break;
  }
  return os.str();
}

std::string serialize_law(const DampingLaw& law, const std::string& prefix) {
  std::ostringstream os;
  os << prefix << "family = " << to_string(law.family()) << "\n";
  if (law.family() == DampingFamily::Custom) {
    os << prefix << "custom = " << law.custom_name() << "\n";
    return os.str();
  }
  os << prefix << "alpha = " << text::format_double(law.alpha()) << "\n";
  os << prefix << "beta = " << text::format_double(law.beta()) << "\n";
  os << prefix << "r = " << text::format_double(law.r()) << "\n";
  return os.str();
}

DampingLaw parse_law(const std::map<std::string, std::string>& kv, const std::string& prefix) {
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(prefix + key);
    if (it == kv.end()) return std::nullopt;
    return it->second;
  };
  const auto family_text = get("family");
  if (!family_text) throw ParseError("missing key " + prefix + "family");
  const auto family_name = text::lower(*family_text);
  if (family_name == "none" || family_name == "zero") return DampingLaw::zero();
  const auto family = parse_family(family_name);
  if (family == DampingFamily::Custom) {
    const auto name = get("custom");
    if (!name) throw ParseError("custom damping needs key " + prefix + "custom");
    return DampingLaw::named_custom(*name);
  }
  auto number = [&](const std::string& key, std::optional<double> fallback) {
    const auto v = get(key);
    if (!v) {
      if (fallback) return *fallback;
      throw ParseError("missing key " + prefix + key);
    }
    return text::parse_double(*v, prefix + key);
  };
  try {
    if (family == DampingFamily::Polynomial) {
      return DampingLaw::polynomial(number("alpha", std::nullopt), number("beta", std::nullopt));
    }
    return DampingLaw::exponential(number("alpha", std::nullopt), number("beta", std::nullopt),
                                   number("r", 1.0));
  } catch (const DomainError& e) {
    throw ParseError(std::string("invalid damping law: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

std::vector<double> certification_grid(double x_max, int n_samples, bool include_zero) {
  if (!(x_max > 0.0)) throw DomainError("certification grid needs x_max > 0");
  if (n_samples < 3) throw DomainError("certification grid needs at least 3 samples");
  const int n_geo = n_samples / 2;
  const int n_uni = n_samples - n_geo;
  std::vector<double> xs;
  xs.reserve(static_cast<std::size_t>(n_samples) + 1);
  if (include_zero) xs.push_back(0.0);
  const double lo = x_max * 1e-8;
  const double ratio = n_geo > 1 ? std::pow(x_max / lo, 1.0 / (n_geo - 1)) : 1.0;
  double x = lo;
  for (int i = 0; i < n_geo; ++i, x *= ratio) xs.push_back(std::min(x, x_max));
  for (int i = 1; i <= n_uni; ++i) xs.push_back(x_max * i / n_uni);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

std::string to_string(AdmissibilityIssue issue) {
  switch (issue) {
    case AdmissibilityIssue::NonzeroAtZero: return "f(0) != 0";
    case AdmissibilityIssue::NegativeValue: return "f < 0";
    case AdmissibilityIssue::Decreasing: return "f decreasing";
    case AdmissibilityIssue::NegativeDerivative: return "f' < 0";
    case AdmissibilityIssue::DerivativeDecreasing: return "f' decreasing";
  }
  return "?";
}

AdmissibilityReport verify_admissible(const DampingLaw& law, double x_max, int n_samples) {
  AdmissibilityReport report;
  report.x_max = x_max;
  report.n_samples = n_samples;
  const auto xs = certification_grid(x_max, n_samples, true);
  const double f0 = law.eval(0.0);
  if (f0 != 0.0) report.violations.push_back({AdmissibilityIssue::NonzeroAtZero, 0.0, f0});

  double prev_f = f0;
  double prev_df = law.derivative(0.0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    const double f = law.eval(x);
    const double df = law.derivative(x);
    if (f < -kPointwiseTolerance) report.violations.push_back({AdmissibilityIssue::NegativeValue, x, f});
    if (df < -kPointwiseTolerance) {
      report.violations.push_back({AdmissibilityIssue::NegativeDerivative, x, df});
    }
    if (i > 0) {
      if (f < prev_f - kPointwiseTolerance * (1.0 + std::abs(prev_f))) {
        report.violations.push_back({AdmissibilityIssue::Decreasing, x, f - prev_f});
      }
      if (df < prev_df - kPointwiseTolerance * (1.0 + std::abs(prev_df))) {
        report.violations.push_back({AdmissibilityIssue::DerivativeDecreasing, x, df - prev_df});
      }
    }
    prev_f = f;
    prev_df = df;
  }
  return report;
}

LowerBoundCert lower_bound_constants(const DampingLaw& law) {
  LowerBoundCert cert;
  switch (law.family()) {
    case DampingFamily::Polynomial:
      cert.c = law.alpha();
      cert.p = law.beta() - 1.0;
      break;
    case DampingFamily::Exponential: {
      const double r = law.r();
      cert.p = r + 1.0;
      cert.c = law.alpha() * std::pow(law.beta(), r / (r + 1.0)) / (r + 1.0);
      break;
    }
    case DampingFamily::Custom:
      throw UnsupportedError("lower_bound_constants: custom laws need caller-supplied (c, p)");
  }
  cert.uniqueness_applicable = cert.p > 2.0;
  return cert;
}

std::vector<BoundSample> sample_lower_bound(const DampingLaw& law, double c, double p,
                                            double x_max, int n_samples) {
  if (!(c > 0.0) || !(p > 0.0)) throw DomainError("lower bound needs c > 0 and p > 0");
  const auto xs = certification_grid(x_max, n_samples, false);
  std::vector<BoundSample> rows;
  rows.reserve(xs.size());
  for (double x : xs) {
    const double f = law.eval(x);
    const double bound = c * power(x, p);
    const bool violated = f < bound - kPointwiseTolerance * (1.0 + bound);
    rows.push_back({x, f, bound, violated});
  }
  return rows;
}

LowerBoundCert verify_lower_bound(const DampingLaw& law, double c, double p, double x_max,
                                  int n_samples) {
  LowerBoundCert cert;
  cert.c = c;
  cert.p = p;
  cert.uniqueness_applicable = p > 2.0;
  const auto rows = sample_lower_bound(law, c, p, x_max, n_samples);
  cert.samples_checked = rows.size();
  cert.verified_up_to = rows.empty() ? 0.0 : rows.back().x;
  for (const auto& row : rows) {
    if (row.violated) cert.violations.push_back(row);
  }
  return cert;
}

void write_bound_csv(std::ostream& os, const std::vector<BoundSample>& rows) {
  os << "x,f_x,bound,violation_flag\n";
  os << std::setprecision(17);
  for (const auto& row : rows) {
    os << row.x << ',' << row.f_x << ',' << row.bound << ',' << (row.violated ? 1 : 0) << '\n';
  }
}

namespace {
double norm(const Vec3& a) { return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]); }
}  // namespace

InequalitySides monotonicity_gap(const DampingLaw& law, const Vec3& u, const Vec3& v, double c,
                                 double p) {
  const double nu = norm(u);
  const double nv = norm(v);
  const double fu = law.eval(nu);
  const double fv = law.eval(nv);
  double lhs = 0.0;
  double diff_sq = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double d = u[i] - v[i];
    lhs += (fu * u[i] - fv * v[i]) * d;
    diff_sq += d * d;
  }
  const double rhs = 0.25 * c * (std::pow(nu, p) + std::pow(nv, p)) * diff_sq;
  return {lhs, rhs};
}

bool monotonicity_holds(const InequalitySides& s, double tol) {
  return s.lhs >= s.rhs - tol * (1.0 + std::abs(s.rhs));
}

InequalitySides lipschitz_gap(const DampingLaw& law, double x, double y, double R) {
  if (!(x >= 0.0 && x <= R) || !(y >= 0.0 && y <= R)) {
    throw DomainError("lipschitz_gap: x and y must lie in [0, R]");
  }
  const double lhs = std::abs(law.eval(x) - law.eval(y));
  const double rhs = law.derivative(R) * std::abs(x - y);
  return {lhs, rhs};
}

bool lipschitz_holds(const InequalitySides& s, double tol) {
  return s.lhs <= s.rhs + tol * (1.0 + s.rhs);
}

BatteryResult monotonicity_battery(const DampingLaw& law, double c, double p, int pairs,
                                   double box, std::uint64_t seed, double tol) {
  std::mt19937_64 rng(seed);
  BatteryResult r;
  r.worst_margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < pairs; ++k) {
    Vec3 u, v;
    for (auto& x : u) x = uniform(rng, -box, box);
    for (auto& x : v) x = uniform(rng, -box, box);
    const auto s = monotonicity_gap(law, u, v, c, p);
    ++r.trials;
    if (!monotonicity_holds(s, tol)) ++r.violations;
    r.worst_margin = std::min(r.worst_margin, (s.lhs - s.rhs) / (1.0 + std::abs(s.rhs)));
  }
  return r;
}

BatteryResult lipschitz_battery(const DampingLaw& law, double R, int pairs, std::uint64_t seed,
                                double tol) {
  std::mt19937_64 rng(seed);
  BatteryResult r;
  r.worst_margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < pairs; ++k) {
    const double x = uniform(rng, 0.0, R);
    const double y = uniform(rng, 0.0, R);
    const auto s = lipschitz_gap(law, x, y, R);
    ++r.trials;
    if (!lipschitz_holds(s, tol)) ++r.violations;
    r.worst_margin = std::min(r.worst_margin, (s.rhs - s.lhs) / (1.0 + s.rhs));
  }
  return r;
}

double young_constant(double nu, double c, double p) {
  if (!(nu > 0.0) || !(c > 0.0)) throw DomainError("young_constant needs nu > 0 and c > 0");
  if (!(p > 2.0)) throw DomainError("young_constant needs p > 2 (the supremum is infinite)");
  const double a_star = std::pow(1.0 / (nu * c * p), 1.0 / (p - 2.0));
  return a_star * a_star / (4.0 * nu) - 0.5 * c * std::pow(a_star, p);
}

}  // namespace nsdamp

#include "nsdamp/config.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "nsdamp/errors.hpp"
#include "nsdamp/text.hpp"

namespace nsdamp {

using text::format_double;

std::string to_string(Integrator i) { return i == Integrator::RK4_IF ? "RK4_IF" : "RK2_IF"; }

std::string to_string(InitialKind k) {
  switch (k) {
    case InitialKind::TaylorGreen: return "TaylorGreen";
    case InitialKind::RandomSpectrum: return "RandomSpectrum";
    case InitialKind::FromFile: return "FromFile";
  }
  return "?";
}

long SolverConfig::step_count() const { return std::lround(t_end / dt); }

void SolverConfig::validate() const {
  if (!(nu > 0.0)) throw DomainError("nu must be positive");
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  if (!(t_end >= 0.0)) throw DomainError("t_end must be nonnegative");
  if (std::abs(step_count() * dt - t_end) > 1e-9 * std::max(1.0, t_end)) {
    throw DomainError("t_end must be an integer multiple of dt");
  }
  if (sample_every < 1) throw DomainError("sample_every must be >= 1");
  const double R = cutoff();
  if (!(R >= 0.0)) throw DomainError("cutoff_r must be nonnegative");
  if (R > grid.resolved_radius() * (1.0 + 1e-12)) {
    throw DomainError("cutoff_r exceeds the resolved wavenumber radius");
  }
  if (initial.kind == InitialKind::FromFile && initial.file_path.empty()) {
    throw DomainError("initial.kind = FromFile needs initial.file");
  }
}

Tolerances Tolerances::scaled(double factor) const {
  Tolerances t = *this;
  t.budget_rel *= factor;
  t.pointwise *= factor;
  t.divergence *= factor;
  t.contraction_rel *= factor;
  t.shift_rel *= factor;
  t.gronwall_rel *= factor;
  t.linear_response *= factor;
  return t;
}

std::map<std::string, std::string> parse_key_values(const std::string& content) {
  std::map<std::string, std::string> kv;
  std::istringstream is(content);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto body = text::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key(text::trim(body.substr(0, eq)));
    const std::string value(text::trim(body.substr(eq + 1)));
    if (key.empty()) throw ParseError("line " + std::to_string(lineno) + ": empty key");
    if (!kv.emplace(key, value).second) {
      throw ParseError("line " + std::to_string(lineno) + ": duplicate key " + key);
    }
  }
  return kv;
}

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "nu", "dt", "t_end", "integrator", "sample_every", "cutoff_r",
      "enable_nonlinear", "enable_damping", "write_snapshots",
      "law.family", "law.alpha", "law.beta", "law.r", "law.custom", "law.c", "law.p",
      "grid.n", "grid.pad", "grid.period",
      "initial.kind", "initial.amplitude", "initial.seed", "initial.slope", "initial.file",
      "tol.budget_rel", "tol.pointwise", "tol.divergence", "tol.contraction_rel",
      "tol.shift_rel", "tol.gronwall_rel", "tol.gamma_min", "tol.gamma_max",
      "tol.order_min", "tol.order_max", "tol.linear_response",
      "cert.x_max", "cert.samples",
      "battery.pairs", "battery.box", "battery.radii", "battery.seed",
      "twin.deltas", "twin.seed", "continuity.epsilons", "equicontinuity.fit_fraction"};
  return keys;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v[i]);
  }
  return out;
}

Integrator parse_integrator(const std::string& s) {
  const auto l = text::lower(s);
  if (l == "rk4_if" || l == "rk4") return Integrator::RK4_IF;
  if (l == "rk2_if" || l == "rk2") return Integrator::RK2_IF;
  throw ParseError("unknown integrator '" + s + "'");
}

InitialKind parse_initial_kind(const std::string& s) {
  const auto l = text::lower(s);
  if (l == "taylorgreen" || l == "taylor_green") return InitialKind::TaylorGreen;
  if (l == "randomspectrum" || l == "random_spectrum") return InitialKind::RandomSpectrum;
  if (l == "fromfile" || l == "from_file" || l == "file") return InitialKind::FromFile;
  throw ParseError("unknown initial.kind '" + s + "'");
}

}  // namespace

RunConfig parse_config(const std::string& content) {
  const auto kv = parse_key_values(content);
  for (const auto& [key, value] : kv) {
    if (!known_keys().count(key)) throw ParseError("unknown key " + key);
  }
  auto has = [&](const char* k) { return kv.count(k) != 0; };
  auto str = [&](const char* k) { return kv.at(k); };
  auto num = [&](const char* k, double& dst) {
    if (has(k)) dst = text::parse_double(str(k), k);
  };
  auto integer = [&](const char* k, auto& dst) {
    if (has(k)) dst = static_cast<std::remove_reference_t<decltype(dst)>>(text::parse_int(str(k), k));
  };
  auto flag = [&](const char* k, bool& dst) {
    if (has(k)) dst = text::parse_bool(str(k), k);
  };
  auto list = [&](const char* k, std::vector<double>& dst) {
    if (has(k)) dst = text::parse_double_list(str(k), k);
  };

  RunConfig cfg;
  auto& s = cfg.solver;
  num("nu", s.nu);
  num("dt", s.dt);
  num("t_end", s.t_end);
  if (has("integrator")) s.integrator = parse_integrator(str("integrator"));
  integer("sample_every", s.sample_every);
  if (has("cutoff_r")) s.cutoff_R = text::parse_double(str("cutoff_r"), "cutoff_r");
  flag("enable_nonlinear", s.enable_nonlinear);
  flag("enable_damping", s.enable_damping);
  flag("write_snapshots", cfg.write_snapshots);

  if (has("law.family")) s.law = parse_law(kv, "law.");
  if (has("law.c")) cfg.cert.c = text::parse_double(str("law.c"), "law.c");
  if (has("law.p")) cfg.cert.p = text::parse_double(str("law.p"), "law.p");

  int n = 32;
  double pad = 2.0;
  double period = s.grid.period();
  integer("grid.n", n);
  num("grid.pad", pad);
  num("grid.period", period);
  try {
    s.grid = TorusGrid(n, period, pad);
  } catch (const std::exception& e) {
    throw ParseError(std::string("grid: ") + e.what());
  }

  if (has("initial.kind")) s.initial.kind = parse_initial_kind(str("initial.kind"));
  num("initial.amplitude", s.initial.amplitude);
  num("initial.slope", s.initial.spectrum_slope);
  if (has("initial.seed")) {
    const auto v = text::parse_int(str("initial.seed"), "initial.seed");
    s.initial.seed = static_cast<std::uint64_t>(v);
  }
  if (has("initial.file")) s.initial.file_path = str("initial.file");

  auto& t = cfg.tol;
  num("tol.budget_rel", t.budget_rel);
  num("tol.pointwise", t.pointwise);
  num("tol.divergence", t.divergence);
  num("tol.contraction_rel", t.contraction_rel);
  num("tol.shift_rel", t.shift_rel);
  num("tol.gronwall_rel", t.gronwall_rel);
  num("tol.gamma_min", t.gamma_min);
  num("tol.gamma_max", t.gamma_max);
  num("tol.order_min", t.order_min);
  num("tol.order_max", t.order_max);
  num("tol.linear_response", t.linear_response);

  num("cert.x_max", cfg.cert.x_max);
  integer("cert.samples", cfg.cert.samples);
  integer("battery.pairs", cfg.battery.pairs);
  num("battery.box", cfg.battery.box);
  list("battery.radii", cfg.battery.radii);
  integer("battery.seed", cfg.battery.seed);
  list("twin.deltas", cfg.twin.deltas);
  integer("twin.seed", cfg.twin.seed);
  list("continuity.epsilons", cfg.continuity.epsilons);
  num("equicontinuity.fit_fraction", cfg.equicontinuity.fit_fraction);

  try {
    s.validate();
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  }
  if (cfg.cert.samples < 3) throw ParseError("cert.samples must be >= 3");
  if (!(cfg.cert.x_max > 0.0)) throw ParseError("cert.x_max must be positive");
  if (cfg.battery.pairs < 0) throw ParseError("battery.pairs must be >= 0");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open config " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string canonical_text(const RunConfig& cfg) {
  const auto& s = cfg.solver;
  const auto& t = cfg.tol;
  std::ostringstream os;
  os << "nu = " << format_double(s.nu) << "\n"
     << "dt = " << format_double(s.dt) << "\n"
     << "t_end = " << format_double(s.t_end) << "\n"
     << "integrator = " << to_string(s.integrator) << "\n"
     << "sample_every = " << s.sample_every << "\n"
     << "cutoff_r = " << format_double(s.cutoff()) << "\n"
     << "enable_nonlinear = " << (s.enable_nonlinear ? "true" : "false") << "\n"
     << "enable_damping = " << (s.enable_damping ? "true" : "false") << "\n"
     << "write_snapshots = " << (cfg.write_snapshots ? "true" : "false") << "\n"
     << serialize_law(s.law, "law.");
  if (cfg.cert.c) os << "law.c = " << format_double(*cfg.cert.c) << "\n";
  if (cfg.cert.p) os << "law.p = " << format_double(*cfg.cert.p) << "\n";
  os << "grid.n = " << s.grid.n() << "\n"
     << "grid.pad = " << format_double(s.grid.pad_factor()) << "\n"
     << "grid.period = " << format_double(s.grid.period()) << "\n"
     << "initial.kind = " << to_string(s.initial.kind) << "\n"
     << "initial.amplitude = " << format_double(s.initial.amplitude) << "\n"
     << "initial.seed = " << s.initial.seed << "\n"
     << "initial.slope = " << format_double(s.initial.spectrum_slope) << "\n";
  if (s.initial.kind == InitialKind::FromFile) os << "initial.file = " << s.initial.file_path << "\n";
  os << "tol.budget_rel = " << format_double(t.budget_rel) << "\n"
     << "tol.pointwise = " << format_double(t.pointwise) << "\n"
     << "tol.divergence = " << format_double(t.divergence) << "\n"
     << "tol.contraction_rel = " << format_double(t.contraction_rel) << "\n"
     << "tol.shift_rel = " << format_double(t.shift_rel) << "\n"
     << "tol.gronwall_rel = " << format_double(t.gronwall_rel) << "\n"
     << "tol.gamma_min = " << format_double(t.gamma_min) << "\n"
     << "tol.gamma_max = " << format_double(t.gamma_max) << "\n"
     << "tol.order_min = " << format_double(t.order_min) << "\n"
     << "tol.order_max = " << format_double(t.order_max) << "\n"
     << "tol.linear_response = " << format_double(t.linear_response) << "\n"
     << "cert.x_max = " << format_double(cfg.cert.x_max) << "\n"
     << "cert.samples = " << cfg.cert.samples << "\n"
     << "battery.pairs = " << cfg.battery.pairs << "\n"
     << "battery.box = " << format_double(cfg.battery.box) << "\n"
     << "battery.radii = " << join(cfg.battery.radii) << "\n"
     << "battery.seed = " << cfg.battery.seed << "\n"
     << "twin.deltas = " << join(cfg.twin.deltas) << "\n"
     << "twin.seed = " << cfg.twin.seed << "\n"
     << "continuity.epsilons = " << join(cfg.continuity.epsilons) << "\n"
     << "equicontinuity.fit_fraction = " << format_double(cfg.equicontinuity.fit_fraction) << "\n";
  return os.str();
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

std::string config_hash(const RunConfig& cfg) { return sha256_hex(canonical_text(cfg)); }

}  // namespace nsdamp

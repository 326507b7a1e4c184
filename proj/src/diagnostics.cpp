#include "nsdamp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <map>

#include "nsdamp/errors.hpp"
#include "nsdamp/kernels.hpp"
#include "nsdamp/text.hpp"

namespace nsdamp {

using text::format_double;

double sobolev_distance(const VectorFieldK& a, const VectorFieldK& b, double s) {
  if (!(a.grid() == b.grid())) throw ShapeError("distance between fields on different grids");
  const auto w = sobolev_weights(a.grid(), s, false);
  double total = 0.0;
  for (int k = 0; k < 3; ++k) {
    total += kernels::omp::weighted_sq_diff_sum(a.component(k).data(), b.component(k).data(),
                                                w.data(), w.size());
  }
  return std::sqrt(total);
}

double l2_distance(const VectorFieldK& a, const VectorFieldK& b) { return sobolev_distance(a, b, 0.0); }

// ---------------------------------------------------------------------------

EnergyLedger energy_budget(const Trajectory& traj, double nu) {
  EnergyLedger L;
  if (traj.samples.empty()) return L;
  const double e0 = traj.samples.front().energy;
  L.initial_energy = e0;
  const double scale = e0 > 0.0 ? e0 : 1.0;
  double trap_visc = 0.0, trap_damp = 0.0;
  double prev_visc = 0.0, prev_damp = 0.0;
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const auto& s = traj.samples[i];
    if (i > 0) {
      const auto& p = traj.samples[i - 1];
      const double h = s.t - p.t;
      trap_visc += 2.0 * nu * 0.5 * h * (p.enstrophy + s.enstrophy);
      trap_damp += 2.0 * 0.5 * h * (p.damping_rate + s.damping_rate);
    }
    LedgerRow r{};
    r.t = s.t;
    r.l2_sq = s.energy;
    r.visc_int = 2.0 * nu * s.visc_accum;
    r.damp_int = 2.0 * s.damp_accum;
    r.budget = r.l2_sq + r.visc_int + r.damp_int;
    r.residual = i == 0 ? 0.0 : r.budget - e0;
    r.visc_int_trap = trap_visc;
    r.damp_int_trap = trap_damp;
    if (r.visc_int < prev_visc || r.damp_int < prev_damp) L.integrals_nondecreasing = false;
    prev_visc = r.visc_int;
    prev_damp = r.damp_int;
    L.max_abs_residual = std::max(L.max_abs_residual, std::abs(r.residual));
    L.max_positive_residual = std::max(L.max_positive_residual, r.residual);
    L.quadrature_disagreement =
        std::max({L.quadrature_disagreement, std::abs(r.visc_int_trap - r.visc_int) / scale,
                  std::abs(r.damp_int_trap - r.damp_int) / scale});
    L.rows.push_back(r);
  }
  L.max_rel_residual = L.max_abs_residual / scale;
  return L;
}

void write_ledger_csv(std::ostream& os, const EnergyLedger& ledger) {
  os << "t,l2_sq,visc_int,damp_int,budget,residual,visc_int_trap,damp_int_trap\n";
  for (const auto& r : ledger.rows) {
    os << format_double(r.t) << ',' << format_double(r.l2_sq) << ',' << format_double(r.visc_int)
       << ',' << format_double(r.damp_int) << ',' << format_double(r.budget) << ','
       << format_double(r.residual) << ',' << format_double(r.visc_int_trap) << ','
       << format_double(r.damp_int_trap) << '\n';
  }
}

void write_index_csv(std::ostream& os, const Trajectory& traj, const std::vector<std::string>& snapshots) {
  os << "t,energy,enstrophy,damping_rate,snapshot\n";
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const auto& s = traj.samples[i];
    os << format_double(s.t) << ',' << format_double(s.energy) << ',' << format_double(s.enstrophy)
       << ',' << format_double(s.damping_rate) << ',' << (i < snapshots.size() ? snapshots[i] : "")
       << '\n';
  }
}

// ---------------------------------------------------------------------------

PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ShapeError("fit_power_law: size mismatch");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (m < 2) return {nan, nan};
  const double denom = m * sxx - sx * sx;
  if (denom == 0.0) return {nan, nan};
  const double slope = (m * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / m;
  return {slope, std::exp(intercept)};
}

EquicontinuityResult equicontinuity_modulus(const Trajectory& traj, double fit_fraction) {
  if (traj.samples.size() < 3) throw DomainError("equicontinuity_modulus needs at least 3 samples");
  std::vector<const Sample*> used;
  const std::size_t stride = (traj.samples.size() + kMaxModulusSamples - 1) / kMaxModulusSamples;
  for (std::size_t i = 0; i < traj.samples.size(); i += stride) used.push_back(&traj.samples[i]);
  for (const auto* s : used) {
    if (s->u_hat.components()[0].empty()) throw DomainError("equicontinuity_modulus needs stored fields");
  }
  EquicontinuityResult r;
  r.samples_used = used.size();
  const auto w = sobolev_weights(used.front()->u_hat.grid(), -2.0, false);
  // Lags are keyed by step difference, which is exact.
  std::map<long, double> by_lag;
  for (std::size_t i = 0; i < used.size(); ++i) {
    for (std::size_t j = i + 1; j < used.size(); ++j) {
      double sq = 0.0;
      for (int k = 0; k < 3; ++k) {
        sq += kernels::omp::weighted_sq_diff_sum(used[i]->u_hat.component(k).data(),
                                                 used[j]->u_hat.component(k).data(), w.data(), w.size());
      }
      auto& slot = by_lag[used[j]->step - used[i]->step];
      slot = std::max(slot, std::sqrt(sq));
    }
  }
  const double dt = traj.dt > 0.0 ? traj.dt : 1.0;
  double running = 0.0;
  for (const auto& [steps, d] : by_lag) {
    running = std::max(running, d);
    r.rows.push_back({static_cast<double>(steps) * dt, running});
  }
  const double span = used.back()->t - used.front()->t;
  std::vector<double> xs, ys;
  for (const auto& row : r.rows) {
    if (row.lag <= fit_fraction * span * (1.0 + 1e-12) && row.modulus > 0.0) {
      xs.push_back(row.lag);
      ys.push_back(row.modulus);
    }
  }
  const auto fit = fit_power_law(xs, ys);
  r.gamma = fit.exponent;
  r.amplitude = fit.amplitude;
  r.fit_points = static_cast<int>(xs.size());
  return r;
}

void write_modulus_csv(std::ostream& os, const EquicontinuityResult& r) {
  os << "lag,modulus\n";
  for (const auto& row : r.rows) os << format_double(row.lag) << ',' << format_double(row.modulus) << '\n';
}

// ---------------------------------------------------------------------------

namespace {

struct GronwallPass {
  bool hypothesis = true;
  bool conclusion = true;
  std::vector<double> hyp_margin;
  std::vector<double> concl_margin;
};

GronwallPass gronwall_pass(const std::vector<double>& t, const std::vector<double>& g,
                           const std::vector<double>& h, double C, double tol) {
  GronwallPass p;
  double int_hg = 0.0, int_h = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i > 0) {
      const double dt = t[i] - t[i - 1];
      int_hg += 0.5 * dt * (h[i - 1] * g[i - 1] + h[i] * g[i]);
      int_h += 0.5 * dt * (h[i - 1] + h[i]);
    }
    const double hyp_rhs = C + int_hg;
    const double concl_rhs = C * std::exp(int_h);
    const double hm = hyp_rhs - g[i];
    const double cm = concl_rhs - g[i];
    p.hyp_margin.push_back(hm);
    p.concl_margin.push_back(cm);
    if (hm < -tol * std::max(std::abs(hyp_rhs), 1e-300)) p.hypothesis = false;
    if (cm < -tol * std::max(std::abs(concl_rhs), 1e-300)) p.conclusion = false;
  }
  return p;
}

}  // namespace

GronwallResult gronwall_check(const std::vector<double>& t, const std::vector<double>& g,
                              const std::vector<double>& h, double C, double rel_tol) {
  if (t.size() != g.size() || t.size() != h.size()) throw ShapeError("gronwall_check: size mismatch");
  if (t.empty()) throw DomainError("gronwall_check: empty time grid");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (h[i] < 0.0) throw DomainError("gronwall_check: h must be nonnegative");
    if (i > 0 && t[i] < t[i - 1]) throw DomainError("gronwall_check: time grid must be nondecreasing");
  }
  if (C < 0.0) throw DomainError("gronwall_check: C must be nonnegative");

  GronwallResult r;
  const auto main = gronwall_pass(t, g, h, C, rel_tol);
  r.hypothesis = main.hypothesis;
  r.conclusion = main.conclusion;
  r.hypothesis_margin = main.hyp_margin;
  r.conclusion_margin = main.concl_margin;

  // Calibration on the same grid: g = e^{lambda (t - t0)}, h = lambda, C = 1.
  const double span = t.back() - t.front();
  const double lambda = span > 0.0 ? 1.0 / span : 1.0;
  std::vector<double> gc(t.size()), hc(t.size(), lambda);
  for (std::size_t i = 0; i < t.size(); ++i) gc[i] = std::exp(lambda * (t[i] - t.front()));
  const auto cal = gronwall_pass(t, gc, hc, 1.0, rel_tol);
  r.calibration = cal.hypothesis && cal.conclusion;
  return r;
}

// ---------------------------------------------------------------------------

LowerBoundCert stability_certificate(const RunConfig& cfg) {
  const auto& law = cfg.solver.law;
  double c = 0.0, p = 0.0;
  if (cfg.cert.c && cfg.cert.p) {
    c = *cfg.cert.c;
    p = *cfg.cert.p;
  } else {
    const auto k = lower_bound_constants(law);
    c = k.c;
    p = k.p;
  }
  return verify_lower_bound(law, c, p, cfg.cert.x_max, cfg.cert.samples);
}

namespace {

LowerBoundCert required_certificate(const RunConfig& cfg) {
  LowerBoundCert cert;
  try {
    cert = stability_certificate(cfg);
  } catch (const UnsupportedError& e) {
    throw RefusalError(std::string("no lower-bound constants: ") + e.what());
  }
  if (!cert.verified()) throw RefusalError("lower-bound certificate has sampled violations");
  if (!cert.uniqueness_applicable) throw RefusalError("lower-bound exponent p <= 2; contraction bound unavailable");
  return cert;
}

void throw_if_blown(const RunResult& r) {
  if (r.trajectory.blow_up) {
    const auto& b = *r.trajectory.blow_up;
    throw BlowUpError(b.t, b.last_l2_sq, b.max_coeff);
  }
}

}  // namespace

std::vector<ContractionReport> twin_run_contraction(const RunConfig& cfg,
                                                    const std::vector<double>& deltas,
                                                    std::uint64_t seed2) {
  const auto cert = required_certificate(cfg);
  const double cnp = young_constant(cfg.solver.nu, cert.c, cert.p);
  const auto& sc = cfg.solver;
  for (double d : deltas) {
    if (!(d >= 0.0)) throw DomainError("twin_run_contraction: delta must be nonnegative");
  }
  const VectorFieldK u0 = make_initial(sc.initial, sc.grid, sc.cutoff());

  std::vector<std::future<RunResult>> perturbed;
  for (double d : deltas) {
    VectorFieldK v0 = u0 + random_perturbation(sc.grid, sc.cutoff(), sc.initial.spectrum_slope, seed2, d);
    perturbed.push_back(std::async(std::launch::async, [&sc, v0 = std::move(v0)]() mutable {
      RunOptions o;
      o.initial = std::move(v0);
      return run(sc, o);
    }));
  }
  RunOptions base_opts;
  base_opts.initial = u0;
  const RunResult base = run(sc, base_opts);
  std::vector<RunResult> results;
  for (auto& f : perturbed) results.push_back(f.get());
  throw_if_blown(base);
  for (const auto& r : results) throw_if_blown(r);

  std::vector<ContractionReport> reports;
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    ContractionReport rep;
    rep.delta = deltas[k];
    rep.c_nu_p = cnp;
    rep.holds = true;
    rep.min_rel_margin = std::numeric_limits<double>::infinity();
    const auto& us = base.trajectory.samples;
    const auto& vs = results[k].trajectory.samples;
    const std::size_t m = std::min(us.size(), vs.size());
    for (std::size_t i = 0; i < m; ++i) {
      const double w = l2_distance(us[i].u_hat, vs[i].u_hat);
      const double w_sq = w * w;
      if (i == 0) rep.w0_sq = w_sq;
      const double bound = rep.w0_sq * std::exp(2.0 * cnp * us[i].t);
      const double margin = bound - w_sq;
      rep.rows.push_back({us[i].t, w_sq, bound, margin});
      rep.sup_w = std::max(rep.sup_w, w);
      if (bound > 0.0) rep.min_rel_margin = std::min(rep.min_rel_margin, margin / bound);
      if (margin < -cfg.tol.contraction_rel * bound) rep.holds = false;
    }
    if (!std::isfinite(rep.min_rel_margin)) rep.min_rel_margin = 0.0;
    reports.push_back(std::move(rep));
  }
  return reports;
}

void write_contraction_csv(std::ostream& os, const std::vector<ContractionReport>& reports) {
  os << "delta,t,w_sq,bound,margin\n";
  for (const auto& rep : reports) {
    for (const auto& r : rep.rows) {
      os << format_double(rep.delta) << ',' << format_double(r.t) << ',' << format_double(r.w_sq)
         << ',' << format_double(r.bound) << ',' << format_double(r.margin) << '\n';
    }
  }
}

double linear_response_deviation(const std::vector<ContractionReport>& reports) {
  double worst = 0.0;
  const ContractionReport* prev = nullptr;
  for (const auto& rep : reports) {
    if (!(rep.delta > 0.0)) continue;
    if (prev) {
      const double expected = prev->delta / rep.delta;
      const double observed = prev->sup_w / rep.sup_w;
      worst = std::max(worst, std::abs(observed / expected - 1.0));
    }
    prev = &rep;
  }
  return worst;
}

// ---------------------------------------------------------------------------

ContinuityResult continuity_probe(const RunConfig& cfg, const std::vector<double>& epsilons) {
  const auto& sc = cfg.solver;
  std::vector<long> eps_steps;
  for (double e : epsilons) {
    if (!(e > 0.0)) throw DomainError("continuity_probe: epsilons must be positive");
    const long k = std::lround(e / sc.dt);
    if (k < 1 || std::abs(k * sc.dt - e) > 1e-9 * e) {
      throw DomainError("continuity_probe: epsilon " + format_double(e) + " is not a multiple of dt");
    }
    if (k > sc.step_count()) throw DomainError("continuity_probe: epsilon exceeds t_end");
    eps_steps.push_back(k);
  }

  std::map<long, double> distance_at;
  for (long k : eps_steps) distance_at[k] = 0.0;
  VectorFieldK u0;
  RunOptions opts;
  opts.observer = [&](const SolverState& s) {
    if (s.step == 0) {
      u0 = s.u_hat;
      return;
    }
    auto it = distance_at.find(s.step);
    if (it != distance_at.end()) it->second = l2_distance(s.u_hat, u0);
  };
  const RunResult res = run(sc, opts);
  throw_if_blown(res);

  ContinuityResult r;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    r.rows.push_back({epsilons[i], distance_at[eps_steps[i]]});
    xs.push_back(epsilons[i]);
    ys.push_back(r.rows.back().distance);
  }
  auto sorted = r.rows;
  std::sort(sorted.begin(), sorted.end(), [](auto& a, auto& b) { return a.eps < b.eps; });
  r.monotone = true;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (!(sorted[i].distance > sorted[i - 1].distance)) r.monotone = false;
  }
  r.order = fit_power_law(xs, ys).exponent;

  LowerBoundCert cert;
  bool have_cert = false;
  try {
    cert = stability_certificate(cfg);
    have_cert = cert.verified() && cert.uniqueness_applicable;
  } catch (const UnsupportedError&) {
    have_cert = false;
  }
  if (!have_cert) return r;
  r.c_nu_p = young_constant(sc.nu, cert.c, cert.p);
  const auto& samples = res.trajectory.samples;
  std::map<long, std::size_t> index_of_step;
  for (std::size_t i = 0; i < samples.size(); ++i) index_of_step[samples[i].step] = i;
  const double growth = std::exp(r.c_nu_p * sc.t_end) * (1.0 + cfg.tol.shift_rel);
  r.shift_holds = true;
  for (std::size_t e = 0; e < epsilons.size(); ++e) {
    const long k = eps_steps[e];
    double sup = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      auto it = index_of_step.find(samples[i].step + k);
      if (it == index_of_step.end()) continue;
      sup = std::max(sup, l2_distance(samples[it->second].u_hat, samples[i].u_hat));
      any = true;
    }
    if (!any) continue;
    const double bound = r.rows[e].distance * growth;
    r.shift_rows.push_back({epsilons[e], sup, bound});
    if (sup > bound) r.shift_holds = false;
  }
  r.shift_checked = !r.shift_rows.empty();
  if (!r.shift_checked) r.shift_holds = false;
  return r;
}

void write_continuity_csv(std::ostream& os, const ContinuityResult& r) {
  os << "eps,distance,sup_shift,shift_bound\n";
  for (const auto& row : r.rows) {
    os << format_double(row.eps) << ',' << format_double(row.distance) << ',';
    auto it = std::find_if(r.shift_rows.begin(), r.shift_rows.end(),
                           [&](const ShiftRow& s) { return s.eps == row.eps; });
    if (it != r.shift_rows.end()) os << format_double(it->sup_shift) << ',' << format_double(it->bound);
    else os << ',';
    os << '\n';
  }
}

}  // namespace nsdamp

#pragma once

// Desk-scale 2D acoustic propagator (collocated grid, centered differences,
// leapfrog in time, exponential sponge boundaries), the discrete adjoint of
// the same time-stepping loop, transport-misfit adjoint sources through the
// lift, and a gradient-descent inversion loop.

#include <functional>

#include "uvot/solver.hpp"

namespace uvot {

enum class Lift { Pauli, Tensor };
enum class Misfit { L2, KR, T11, T12, T22 };

struct RickerSource {
  int i = 0, j = 0;
  double f0 = 10.0;       // peak frequency, Hz
  double amplitude = 1.0;
  double delay = -1.0;    // seconds; < 0 means 1.2/f0
};

inline double ricker(double t, double f0, double delay) {
  const double t0 = (delay < 0.0) ? 1.2 / f0 : delay;
  const double arg = M_PI * f0 * (t - t0);
  const double a2 = arg * arg;
  return (1.0 - 2.0 * a2) * std::exp(-a2);
}

struct AcousticModel {
  Grid2 grid;                 // simulation grid, mesh sizes in meters
  std::vector<double> c;      // velocity per site, m/s
  double rho = 1000.0;        // kg/m^3
  double dt = 1e-3;           // s
  int nt = 100;
  RickerSource source;
  std::vector<std::pair<int, int>> receivers;
  int sponge_width = 20;
  double sponge_decay = 0.015;

  static constexpr double kCflFactor = 0.5;

  void validate() const {
    if (int(c.size()) != grid.sites()) throw std::invalid_argument("AcousticModel: velocity size");
    double cmax = 0.0;
    for (double v : c) {
      if (!(v > 0.0)) throw std::invalid_argument("AcousticModel: velocities must be positive");
      cmax = std::max(cmax, v);
    }
    const double hmin = std::min(grid.hx, grid.hy);
    if (dt > kCflFactor * hmin / cmax)
      throw std::invalid_argument("AcousticModel: CFL violated, need dt <= 0.5 min(h)/max(c)");
    auto inside = [this](int i, int j) { return i >= 0 && i < grid.nx && j >= 0 && j < grid.ny; };
    if (!inside(source.i, source.j)) throw std::invalid_argument("AcousticModel: source off grid");
    for (auto [i, j] : receivers)
      if (!inside(i, j)) throw std::invalid_argument("AcousticModel: receiver off grid");
    if (receivers.empty()) throw std::invalid_argument("AcousticModel: no receivers");
  }

  std::vector<double> sponge_mask() const {
    std::vector<double> m(std::size_t(grid.sites()), 1.0);
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) {
        const int d = std::min(std::min(i, grid.nx - 1 - i), std::min(j, grid.ny - 1 - j));
        if (d < sponge_width) {
          const double a = sponge_decay * (sponge_width - d);
          m[std::size_t(grid.site(i, j))] = std::exp(-a * a);
        }
      }
    return m;
  }
};

struct WavefieldRecord {
  SignedSignal2 traces;                      // (n_receivers x n_samples)
  std::vector<std::vector<double>> div_v;    // div(v) at every step, for the adjoint
  int stride = 1;
};

namespace detail {

// Centered differences with zero outside the grid; antisymmetric, so the
// adjoint propagator is again a wave equation.
inline void dx_centered(const Grid2& g, const std::vector<double>& u, std::vector<double>& out) {
  const double s = 0.5 / g.hx;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int k = g.site(i, j);
      const double up = (i + 1 < g.nx) ? u[k + 1] : 0.0;
      const double um = (i > 0) ? u[k - 1] : 0.0;
      out[k] = (up - um) * s;
    }
}

inline void dz_centered(const Grid2& g, const std::vector<double>& u, std::vector<double>& out) {
  const double s = 0.5 / g.hy;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int k = g.site(i, j);
      const double up = (j + 1 < g.ny) ? u[k + g.nx] : 0.0;
      const double um = (j > 0) ? u[k - g.nx] : 0.0;
      out[k] = (up - um) * s;
    }
}

}  // namespace detail

// Transport grid used for the misfit between trace panels: receiver axis
// with unit spacing, time axis rescaled so the domain is [0,l]^2, l = Nr-1.
inline Grid2 trace_grid(int n_receivers, int n_samples) {
  if (n_receivers < 2 || n_samples < 2)
    throw std::invalid_argument("trace_grid: need at least 2 receivers and 2 samples");
  const double len = double(n_receivers - 1);
  return Grid2(n_receivers, n_samples, 1.0, len / (n_samples - 1));
}

// Leapfrog forward propagation. Records receiver traces every `stride`
// steps; stores div(v) snapshots when `keep_snapshots` is set (needed for
// the velocity gradient).
inline WavefieldRecord forward(const AcousticModel& model, const RickerSource& src,
                               int stride = 1, bool keep_snapshots = false) {
  model.validate();
  const Grid2& g = model.grid;
  const int ng = g.sites();
  const std::vector<double> mask = model.sponge_mask();
  const int n_samples = model.nt / stride;
  if (n_samples < 2) throw std::invalid_argument("forward: too few recorded samples");

  std::vector<double> vx(ng, 0.0), vz(ng, 0.0), p(ng, 0.0);
  std::vector<double> tx(ng), tz(ng), dv(ng);

  WavefieldRecord rec;
  rec.stride = stride;
  rec.traces = SignedSignal2(trace_grid(int(model.receivers.size()), n_samples));
  if (keep_snapshots) rec.div_v.reserve(std::size_t(model.nt));

  const double idt_rho = model.dt / model.rho;
  int sample = 0;
  for (int n = 0; n < model.nt; ++n) {
    detail::dx_centered(g, p, tx);
    detail::dz_centered(g, p, tz);
    for (int k = 0; k < ng; ++k) {
      vx[k] = mask[k] * (vx[k] + idt_rho * tx[k]);
      vz[k] = mask[k] * (vz[k] + idt_rho * tz[k]);
    }
    detail::dx_centered(g, vx, tx);
    detail::dz_centered(g, vz, tz);
    for (int k = 0; k < ng; ++k) {
      dv[k] = tx[k] + tz[k];
      p[k] = mask[k] * (p[k] + model.dt * model.rho * model.c[k] * model.c[k] * dv[k]);
    }
    p[g.site(src.i, src.j)] += model.dt * src.amplitude * ricker(n * model.dt, src.f0, src.delay);
    if (keep_snapshots) rec.div_v.push_back(dv);

    if (n % stride == 0 && sample < n_samples) {
      for (std::size_t r = 0; r < model.receivers.size(); ++r) {
        const int k = g.site(model.receivers[r].first, model.receivers[r].second);
        const int site = rec.traces.grid.site(int(r), sample);
        rec.traces.vx[site] = vx[k];
        rec.traces.vz[site] = vz[k];
      }
      ++sample;
    }
  }
  for (int k = 0; k < ng; ++k)
    if (!std::isfinite(p[k]) || !std::isfinite(vx[k]) || !std::isfinite(vz[k]))
      throw std::runtime_error("forward: wavefield blew up (NaN/Inf)");
  return rec;
}

inline WavefieldRecord forward(const AcousticModel& model, int stride = 1,
                               bool keep_snapshots = false) {
  return forward(model, model.source, stride, keep_snapshots);
}

struct MisfitResult {
  double cost = 0.0;
  SignedSignal2 trace_gradient;  // dJ/d(vx,vz) per recorded sample
  SolverResult transport;        // populated for transport misfits
};

inline FieldV apply_lift(const SignedSignal2& s, Lift lift) {
  return lift == Lift::Pauli ? lift_pauli(s) : lift_tensor(s);
}

// Evaluates the misfit between a recorded panel and the observed panel and
// returns the per-sample derivative with respect to the synthetic traces.
// Transport misfits use the optimal dual potential: d/dmu T(mu,nu) = -phi,
// pulled through the lift Jacobian (for Pauli d alpha/dv = v/alpha, guarded
// at alpha = 0).
inline MisfitResult misfit_and_adjoint_source(const SignedSignal2& synth,
                                              const SignedSignal2& observed, Misfit misfit,
                                              Lift lift, double lambda,
                                              const SolverConfig& config = {}) {
  if (!synth.grid.same_shape(observed.grid))
    throw std::invalid_argument("misfit_and_adjoint_source: trace shapes differ");
  MisfitResult out;
  out.trace_gradient = SignedSignal2(synth.grid);
  const int ns = synth.grid.sites();
  const double w = synth.grid.weight();

  if (misfit == Misfit::L2) {
    double acc = 0.0;
    for (int k = 0; k < ns; ++k) {
      const double ex = synth.vx[k] - observed.vx[k];
      const double ez = synth.vz[k] - observed.vz[k];
      acc += ex * ex + ez * ez;
      out.trace_gradient.vx[k] = w * ex;
      out.trace_gradient.vz[k] = w * ez;
    }
    out.cost = 0.5 * w * acc;
    return out;
  }

  if (misfit == Misfit::KR) {
    // Componentwise scalar T_{1,1}, summed over the two components.
    double total = 0.0;
    for (int comp = 0; comp < 2; ++comp) {
      TransportProblem pb;
      pb.mu = FieldV(synth.grid, 1);
      pb.nu = FieldV(synth.grid, 1);
      const auto& sv = comp == 0 ? synth.vx : synth.vz;
      const auto& ov = comp == 0 ? observed.vx : observed.vz;
      for (int k = 0; k < ns; ++k) {
        pb.mu.data[k] = sv[k];
        pb.nu.data[k] = ov[k];
      }
      pb.lambda = lambda;
      pb.p = pb.q = 1;
      SolverResult res = solve(pb, config);
      total += res.cost;
      auto& gcomp = comp == 0 ? out.trace_gradient.vx : out.trace_gradient.vz;
      for (int k = 0; k < ns; ++k) gcomp[k] = -w * res.phi.data[k];
      if (comp == 1) out.transport = std::move(res);
    }
    out.cost = total;
    return out;
  }

  TransportProblem pb;
  pb.mu = apply_lift(synth, lift);
  pb.nu = apply_lift(observed, lift);
  pb.lambda = lambda;
  switch (misfit) {
    case Misfit::T11: pb.p = 1; pb.q = 1; break;
    case Misfit::T12: pb.p = 1; pb.q = 2; break;
    case Misfit::T22: pb.p = 2; pb.q = 2; break;
    default: break;
  }
  SolverResult res = solve(pb, config);
  out.cost = res.cost;
  for (int k = 0; k < ns; ++k) {
    const double* phi = res.phi.site(k);
    if (lift == Lift::Pauli) {
      const double a = std::max(std::hypot(synth.vx[k], synth.vz[k]), 1e-12);
      out.trace_gradient.vx[k] = -w * (phi[0] + synth.vx[k] / a * phi[2]);
      out.trace_gradient.vz[k] = -w * (phi[1] + synth.vz[k] / a * phi[2]);
    } else {
      out.trace_gradient.vx[k] = -w * (2.0 * synth.vx[k] * phi[0] + synth.vz[k] * phi[1]);
      out.trace_gradient.vz[k] = -w * (synth.vx[k] * phi[1] + 2.0 * synth.vz[k] * phi[2]);
    }
  }
  out.transport = std::move(res);
  return out;
}

// Discrete adjoint of `forward`: injects the per-sample trace gradient at
// the receivers, steps the transposed scheme backward in time, and
// accumulates dJ/dc = sum_n 2 rho c div(v)^n (masked adjoint pressure) dt.
inline std::vector<double> adjoint(const AcousticModel& model, const WavefieldRecord& rec,
                                   const SignedSignal2& trace_gradient) {
  model.validate();
  if (!rec.traces.grid.same_shape(trace_gradient.grid))
    throw std::invalid_argument("adjoint: trace gradient shape mismatch");
  if (rec.div_v.size() != std::size_t(model.nt))
    throw std::invalid_argument("adjoint: forward record lacks per-step snapshots");

  const Grid2& g = model.grid;
  const int ng = g.sites();
  const std::vector<double> mask = model.sponge_mask();
  std::vector<double> avx(ng, 0.0), avz(ng, 0.0), ap(ng, 0.0);
  std::vector<double> grad_c(ng, 0.0), tmp(ng), tx(ng), tz(ng);

  const int n_samples = rec.traces.grid.ny;
  for (int n = model.nt - 1; n >= 0; --n) {
    // Record transpose: the traces read (vx, vz) after this step's updates.
    if (n % rec.stride == 0 && n / rec.stride < n_samples) {
      const int sample = n / rec.stride;
      for (std::size_t r = 0; r < model.receivers.size(); ++r) {
        const int k = g.site(model.receivers[r].first, model.receivers[r].second);
        const int site = trace_gradient.grid.site(int(r), sample);
        avx[k] += trace_gradient.vx[site];
        avz[k] += trace_gradient.vz[site];
      }
    }
    // Pressure update transpose: p' = mask (p + dt rho c^2 div v').
    const std::vector<double>& dv = rec.div_v[std::size_t(n)];
    for (int k = 0; k < ng; ++k) {
      tmp[k] = mask[k] * ap[k];
      grad_c[k] += model.dt * 2.0 * model.rho * model.c[k] * dv[k] * tmp[k];
    }
    std::swap(ap, tmp);  // ap now holds the adjoint of the pre-update pressure
    for (int k = 0; k < ng; ++k) tmp[k] = model.dt * model.rho * model.c[k] * model.c[k] * ap[k];
    detail::dx_centered(g, tmp, tx);
    detail::dz_centered(g, tmp, tz);
    for (int k = 0; k < ng; ++k) {
      avx[k] -= tx[k];  // Div^T q = (-Dx q, -Dz q)
      avz[k] -= tz[k];
    }
    // Velocity update transpose: v' = mask (v + dt/rho D p).
    for (int k = 0; k < ng; ++k) {
      tx[k] = mask[k] * avx[k];
      tz[k] = mask[k] * avz[k];
    }
    detail::dx_centered(g, tx, tmp);
    for (int k = 0; k < ng; ++k) ap[k] -= model.dt / model.rho * tmp[k];
    detail::dz_centered(g, tz, tmp);
    for (int k = 0; k < ng; ++k) ap[k] -= model.dt / model.rho * tmp[k];
    std::swap(avx, tx);
    std::swap(avz, tz);
  }
  return grad_c;
}

struct FwiOptions {
  Misfit misfit = Misfit::T12;
  Lift lift = Lift::Pauli;
  double lambda = 1.0;
  SolverConfig transport;  // eps defaults tightened/loosened by callers
  int stride = 1;
  int iterations = 20;
  double c_min = 300.0, c_max = 8000.0;
  double initial_step = 50.0;  // m/s move per unit-normalized gradient
  int max_backtracks = 12;

  FwiOptions() { transport.eps = 1e-2; }
};

struct FwiEvaluation {
  double cost = 0.0;
  std::vector<double> grad_c;
};

// Total misfit and velocity gradient over all sources.
inline FwiEvaluation evaluate_fwi(const AcousticModel& model,
                                  const std::vector<RickerSource>& sources,
                                  const std::vector<SignedSignal2>& observed,
                                  const FwiOptions& opt, bool with_gradient = true) {
  if (sources.size() != observed.size())
    throw std::invalid_argument("evaluate_fwi: one observed panel per source required");
  FwiEvaluation ev;
  ev.grad_c.assign(std::size_t(model.grid.sites()), 0.0);
  for (std::size_t s = 0; s < sources.size(); ++s) {
    WavefieldRecord rec = forward(model, sources[s], opt.stride, with_gradient);
    MisfitResult mis = misfit_and_adjoint_source(rec.traces, observed[s], opt.misfit, opt.lift,
                                                 opt.lambda, opt.transport);
    ev.cost += mis.cost;
    if (with_gradient) {
      std::vector<double> gc = adjoint(model, rec, mis.trace_gradient);
      for (int k = 0; k < model.grid.sites(); ++k) ev.grad_c[std::size_t(k)] += gc[std::size_t(k)];
    }
  }
  return ev;
}

struct InversionResult {
  std::vector<double> misfit_history;  // misfit_history[0] = initial misfit
  std::vector<double> c_final;
  int iterations = 0;
  bool line_search_failed = false;
};

// Gradient descent with backtracking; accepted steps never increase the
// total misfit. Velocities are clamped to [c_min, c_max].
inline InversionResult invert(const AcousticModel& initial,
                              const std::vector<RickerSource>& sources,
                              const std::vector<SignedSignal2>& observed, const FwiOptions& opt) {
  AcousticModel model = initial;
  InversionResult out;
  FwiEvaluation ev = evaluate_fwi(model, sources, observed, opt);
  out.misfit_history.push_back(ev.cost);
  if (ev.cost == 0.0) {
    out.c_final = model.c;
    return out;
  }

  double step = opt.initial_step;
  for (int it = 0; it < opt.iterations; ++it) {
    double gmax = 0.0;
    for (double gv : ev.grad_c) gmax = std::max(gmax, std::abs(gv));
    if (gmax == 0.0) break;

    bool accepted = false;
    AcousticModel trial = model;
    for (int bt = 0; bt < opt.max_backtracks; ++bt) {
      const double scale = step / gmax;
      for (int k = 0; k < model.grid.sites(); ++k)
        trial.c[std::size_t(k)] = std::clamp(model.c[std::size_t(k)] - scale * ev.grad_c[std::size_t(k)],
                                             opt.c_min, opt.c_max);
      FwiEvaluation trial_ev = evaluate_fwi(trial, sources, observed, opt, false);
      if (trial_ev.cost <= out.misfit_history.back()) {
        model.c = trial.c;
        out.misfit_history.push_back(trial_ev.cost);
        accepted = true;
        step *= 1.5;
        break;
      }
      step *= 0.5;
    }
    out.iterations = it + 1;
    if (!accepted) {
      out.line_search_failed = true;
      break;
    }
    if (out.misfit_history.back() == 0.0) break;
    ev = evaluate_fwi(model, sources, observed, opt);
    // keep the freshly evaluated cost consistent with the accepted iterate
    out.misfit_history.back() = ev.cost;
  }
  out.c_final = model.c;
  return out;
}

}  // namespace uvot

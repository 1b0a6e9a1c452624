#pragma once

// Desk-scale experiment drivers: shift-sensitivity scans of the misfit
// functions and transport between (synthetic) two-component seismograms.
// 1D signals are carried as N x 1 grids.

#include "uvot/fwi.hpp"
#include "uvot/io.hpp"

namespace uvot {

enum class ScanMisfit { L2, KR, Transport };
enum class ScanSignal { GaussianDerivatives, ZeroMeanSine };

struct ShiftScanSpec {
  ScanSignal signal = ScanSignal::GaussianDerivatives;
  double alpha = 4.0 / 3.0;  // Gaussian width
  double t_min = -10.0, t_max = 10.0;
  int samples = 2048;
  double t0_min = 0.0, t0_max = 8.0;
  int t0_steps = 33;
  ScanMisfit misfit = ScanMisfit::Transport;
  int p = 1, q = 1;
  Lift lift = Lift::Pauli;
  std::vector<double> lambdas = {10.0};
  SolverConfig config{0.9, 1e-4, 20000, 10};
};

struct ScanCurve {
  double lambda = 0.0;  // unused for the L2 curve
  std::vector<std::pair<double, double>> points;  // (t0, misfit)
};

namespace detail {

// v(t) = (f'(t), f''(t)) for the Gaussian f = exp(-t^2/alpha^2)/(sqrt(2 pi) alpha).
inline void gaussian_pair(double t, double alpha, double& vx, double& vz) {
  const double f = std::exp(-t * t / (alpha * alpha)) / (std::sqrt(2.0 * M_PI) * alpha);
  const double a2 = alpha * alpha;
  vx = -2.0 * t / a2 * f;
  vz = (4.0 * t * t / (a2 * a2) - 2.0 / a2) * f;
}

// Zero-mean bumped sine supported on [0, 2 pi], normalized so each
// half-wave carries unit mass: vx = sin(t)/2, vz = 0.
inline void sine_pair(double t, double& vx, double& vz) {
  vx = (t >= 0.0 && t <= 2.0 * M_PI) ? 0.5 * std::sin(t) : 0.0;
  vz = 0.0;
}

inline SignedSignal2 sample_scan_signal(const ShiftScanSpec& spec, const Grid2& grid, double t0) {
  SignedSignal2 s(grid);
  for (int i = 0; i < grid.nx; ++i) {
    const double t = grid.x(i) - t0;
    double vx, vz;
    if (spec.signal == ScanSignal::GaussianDerivatives)
      gaussian_pair(t, spec.alpha, vx, vz);
    else
      sine_pair(t, vx, vz);
    s.vx[std::size_t(grid.site(i, 0))] = vx;
    s.vz[std::size_t(grid.site(i, 0))] = vz;
  }
  return s;
}

}  // namespace detail

// 1D grid whose window covers the signal support for every sampled shift.
inline Grid2 scan_grid(const ShiftScanSpec& spec) {
  const double dt = (spec.t_max - spec.t_min) / (spec.samples - 1);
  const double lo = spec.t_min + std::min(0.0, spec.t0_min);
  const double hi = spec.t_max + std::max(0.0, spec.t0_max);
  const int n = int(std::lround((hi - lo) / dt)) + 1;
  return Grid2(n, 1, dt, 1.0, lo, 0.0);
}

// Evaluates the requested misfit between v(.) and v(. - t0) over the sampled
// shifts. The KR curve is the scalar T_{1,1} applied componentwise and
// summed; transport curves lift the signal pair first.
inline std::vector<ScanCurve> shift_scan(const ShiftScanSpec& spec) {
  if (spec.t0_steps < 1 || spec.samples < 2)
    throw std::invalid_argument("shift_scan: bad sampling parameters");
  const Grid2 grid = scan_grid(spec);
  const SignedSignal2 base = detail::sample_scan_signal(spec, grid, 0.0);

  std::vector<double> lambdas = spec.lambdas;
  if (spec.misfit == ScanMisfit::L2) lambdas = {0.0};
  std::vector<ScanCurve> curves(lambdas.size());
  for (std::size_t li = 0; li < lambdas.size(); ++li) curves[li].lambda = lambdas[li];

  for (int step = 0; step < spec.t0_steps; ++step) {
    const double t0 = (spec.t0_steps == 1)
                          ? spec.t0_min
                          : spec.t0_min + (spec.t0_max - spec.t0_min) * step / (spec.t0_steps - 1);
    const SignedSignal2 shifted = detail::sample_scan_signal(spec, grid, t0);
    for (std::size_t li = 0; li < lambdas.size(); ++li) {
      double value = 0.0;
      switch (spec.misfit) {
        case ScanMisfit::L2: {
          double acc = 0.0;
          for (int k = 0; k < grid.sites(); ++k) {
            const double ex = base.vx[k] - shifted.vx[k];
            const double ez = base.vz[k] - shifted.vz[k];
            acc += ex * ex + ez * ez;
          }
          value = 0.5 * grid.weight() * acc;
          break;
        }
        case ScanMisfit::KR: {
          MisfitResult m = misfit_and_adjoint_source(base, shifted, Misfit::KR, spec.lift,
                                                     lambdas[li], spec.config);
          value = m.cost;
          break;
        }
        case ScanMisfit::Transport: {
          TransportProblem pb;
          pb.mu = apply_lift(base, spec.lift);
          pb.nu = apply_lift(shifted, spec.lift);
          pb.lambda = lambdas[li];
          pb.p = spec.p;
          pb.q = spec.q;
          value = solve(pb, spec.config).cost;
          break;
        }
      }
      curves[li].points.emplace_back(t0, value);
    }
  }
  return curves;
}

inline void write_scan_csv(const std::filesystem::path& path,
                           const std::vector<ScanCurve>& curves) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_scan_csv: cannot open " + path.string());
  out << "t0";
  for (const auto& c : curves) out << ",misfit_lambda_" << format_double(c.lambda);
  out << "\n";
  if (curves.empty()) return;
  for (std::size_t r = 0; r < curves.front().points.size(); ++r) {
    out << format_double(curves.front().points[r].first);
    for (const auto& c : curves) out << "," << format_double(c.points[r].second);
    out << "\n";
  }
}

// ---------------------------------------------------------------------------
// Seismogram transport.

// Lifts the two panels and restates them on the rescaled domain [0,l]^2,
// l = Nr - 1 (receiver axis spacing 1, time axis rescaled accordingly).
inline TransportProblem seismo_problem(const SignedSignal2& mu_sig, const SignedSignal2& nu_sig,
                                       Lift lift, double lambda, int p, int q) {
  if (!mu_sig.grid.same_shape(nu_sig.grid))
    throw std::invalid_argument("seismo_problem: seismogram shapes differ");
  const Grid2 g = trace_grid(mu_sig.grid.nx, mu_sig.grid.ny);
  SignedSignal2 a(g), b(g);
  a.vx = mu_sig.vx;
  a.vz = mu_sig.vz;
  b.vx = nu_sig.vx;
  b.vz = nu_sig.vz;
  TransportProblem pb;
  pb.mu = apply_lift(a, lift);
  pb.nu = apply_lift(b, lift);
  pb.lambda = lambda;
  pb.p = p;
  pb.q = q;
  return pb;
}

// Two-layer velocity model: c_top above the interface row, c_bottom below.
inline std::vector<double> two_layer_model(const Grid2& grid, double c_top, double c_bottom,
                                           int interface_j) {
  std::vector<double> c(std::size_t(grid.sites()));
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i)
      c[std::size_t(grid.site(i, j))] = (j < interface_j) ? c_top : c_bottom;
  return c;
}

struct SyntheticSeismoSpec {
  int n_receivers = 64;
  int n_samples = 512;
  double h = 10.0;          // m
  int depth_cells = 72;
  int margin = 16;          // inactive columns on each side
  int receiver_depth = 4;   // grid row of the receiver line
  double f0 = 8.0;          // Hz
  double c_top = 1800.0, c_bottom = 2200.0;
  int interface_row = 36;
  double c_top_alt = 1950.0, c_bottom_alt = 2100.0;
  int interface_row_alt = 28;
};

// Baseline acoustic setup shared by the two synthetic shots.
inline AcousticModel synthetic_seismo_model(const SyntheticSeismoSpec& spec) {
  AcousticModel m;
  m.grid = Grid2(spec.n_receivers + 2 * spec.margin, spec.depth_cells, spec.h, spec.h);
  m.rho = 1000.0;
  const double cmax = std::max(std::max(spec.c_bottom, spec.c_top),
                               std::max(spec.c_bottom_alt, spec.c_top_alt));
  m.dt = AcousticModel::kCflFactor * spec.h / cmax;
  m.nt = spec.n_samples;
  m.source = RickerSource{m.grid.nx / 2, spec.receiver_depth, spec.f0, 1.0, -1.0};
  for (int r = 0; r < spec.n_receivers; ++r)
    m.receivers.emplace_back(spec.margin + r, spec.receiver_depth);
  m.sponge_width = 12;
  m.sponge_decay = 0.02;
  return m;
}

// Generates the (mu, nu) seismogram pair from the two layered models.
inline std::pair<SignedSignal2, SignedSignal2> make_synthetic_seismograms(
    const SyntheticSeismoSpec& spec) {
  AcousticModel m = synthetic_seismo_model(spec);
  m.c = two_layer_model(m.grid, spec.c_top, spec.c_bottom, spec.interface_row);
  SignedSignal2 mu = forward(m).traces;
  m.c = two_layer_model(m.grid, spec.c_top_alt, spec.c_bottom_alt, spec.interface_row_alt);
  SignedSignal2 nu = forward(m).traces;
  return {std::move(mu), std::move(nu)};
}

}  // namespace uvot

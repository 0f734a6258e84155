// SPDX-License-Identifier: Apache-2.0
#include "wdmopt/fiber.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wdmopt/errors.hpp"

namespace wdmopt {

namespace {

constexpr double kLn10Over10 = 0.23025850929940457;

// Raman coupling y = C v with c_nm = C_r * clip(f_m - f_n, +/- shift).
// When the band fits inside the linear part of the slope the matrix is
// c_nm = C_r (f_m - f_n) and the product collapses to two running sums.
struct Coupling {
  const ChannelGrid* grid;
  double cr;
  double shift_thz;
  bool linear_band;

  Coupling(const ChannelGrid& g, const FiberParams& p)
      : grid(&g), cr(p.raman_slope_w_km_thz), shift_thz(p.raman_peak_shift_thz) {
    double band = g.frequency_thz(g.count() - 1) - g.frequency_thz(0);
    linear_band = band <= shift_thz + 1e-12;
  }

  void apply(const double* v, double* out) const {
    int n = grid->count();
    if (cr == 0.0) {
      std::fill(out, out + n, 0.0);
      return;
    }
    if (linear_band) {
      double s0 = 0.0, s1 = 0.0;
      for (int m = 0; m < n; ++m) {
        s0 += v[m];
        s1 += grid->frequency_thz(m) * v[m];
      }
      for (int i = 0; i < n; ++i) out[i] = cr * (s1 - grid->frequency_thz(i) * s0);
      return;
    }
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      double fi = grid->frequency_thz(i);
      for (int m = 0; m < n; ++m) {
        double d = grid->frequency_thz(m) - fi;
        d = std::clamp(d, -shift_thz, shift_thz);
        acc += d * v[m];
      }
      out[i] = cr * acc;
    }
  }

  // The kernel is antisymmetric, so the transpose product is the negation.
  void apply_transpose(const double* v, double* out) const {
    int n = grid->count();
    apply(v, out);
    for (int i = 0; i < n; ++i) out[i] = -out[i];
  }
};

// dP/dz at state p; `cp` receives the coupling term for reuse.
void srs_rhs(const Coupling& c, double alpha_np_km, const double* p, double* cp, double* dp,
             int n) {
  c.apply(p, cp);
  for (int i = 0; i < n; ++i) dp[i] = p[i] * (cp[i] - alpha_np_km);
}

}  // namespace

void FiberParams::validate() const {
  if (!(length_km >= 0.0)) fail(ErrorCode::kInvalidArgument, "fiber length must be >= 0");
  if (attenuation_db_km < 0.0) fail(ErrorCode::kInvalidArgument, "attenuation must be >= 0");
  if (raman_slope_w_km_thz < 0.0) fail(ErrorCode::kInvalidArgument, "Raman slope must be >= 0");
  if (!(raman_peak_shift_thz > 0.0))
    fail(ErrorCode::kInvalidArgument, "Raman peak shift must be positive");
}

SpanResult srs_propagate_raw(const std::vector<double>& launch_w, const FiberParams& params,
                             const ChannelGrid& grid, SrsTrajectory* trajectory,
                             double max_step_km) {
  params.validate();
  if (!(max_step_km > 0.0)) fail(ErrorCode::kInvalidArgument, "integrator step must be positive");
  const int n = grid.count();
  if (static_cast<int>(launch_w.size()) != n)
    fail(ErrorCode::kInvalidArgument, "launch length does not match grid");

  const double alpha = params.attenuation_db_km * kLn10Over10;  // nepers/km (power)
  const bool coupled = params.raman_slope_w_km_thz > 0.0 && n > 1 && params.length_km > 0.0;

  if (!coupled) {
    // No power exchange: exact exponential loss, no integration error.
    const double flat = std::exp(-alpha * params.length_km);
    const double conn = linear_from_db(-params.connector_loss_db);
    if (trajectory) {
      trajectory->n_steps = 0;
      trajectory->step_km = 0.0;
      trajectory->flat_transfer = flat;
      trajectory->states.assign(launch_w.begin(), launch_w.end());
    }
    SpanResult out;
    out.output_w.resize(static_cast<size_t>(n));
    out.transfer.assign(static_cast<size_t>(n), flat * conn);
    for (int i = 0; i < n; ++i)
      out.output_w[static_cast<size_t>(i)] = launch_w[static_cast<size_t>(i)] * flat * conn;
    return out;
  }

  const int n_steps = static_cast<int>(std::ceil(params.length_km / max_step_km));
  const double h = params.length_km / n_steps;

  Coupling coupling(grid, params);
  std::vector<double> p = launch_w;
  std::vector<double> cp(static_cast<size_t>(n)), k1(static_cast<size_t>(n)), k2(static_cast<size_t>(n)),
      k3(static_cast<size_t>(n)), k4(static_cast<size_t>(n)), tmp(static_cast<size_t>(n));

  if (trajectory) {
    trajectory->n_steps = n_steps;
    trajectory->step_km = h;
    trajectory->states.resize(static_cast<size_t>(n_steps + 1) * static_cast<size_t>(n));
    std::copy(p.begin(), p.end(), trajectory->states.begin());
  }

  for (int s = 0; s < n_steps; ++s) {
    srs_rhs(coupling, alpha, p.data(), cp.data(), k1.data(), n);
    for (int i = 0; i < n; ++i) tmp[static_cast<size_t>(i)] = p[static_cast<size_t>(i)] + 0.5 * h * k1[static_cast<size_t>(i)];
    srs_rhs(coupling, alpha, tmp.data(), cp.data(), k2.data(), n);
    for (int i = 0; i < n; ++i) tmp[static_cast<size_t>(i)] = p[static_cast<size_t>(i)] + 0.5 * h * k2[static_cast<size_t>(i)];
    srs_rhs(coupling, alpha, tmp.data(), cp.data(), k3.data(), n);
    for (int i = 0; i < n; ++i) tmp[static_cast<size_t>(i)] = p[static_cast<size_t>(i)] + h * k3[static_cast<size_t>(i)];
    srs_rhs(coupling, alpha, tmp.data(), cp.data(), k4.data(), n);
    for (int i = 0; i < n; ++i)
      p[static_cast<size_t>(i)] += h / 6.0 * (k1[static_cast<size_t>(i)] + 2.0 * k2[static_cast<size_t>(i)] +
                                              2.0 * k3[static_cast<size_t>(i)] + k4[static_cast<size_t>(i)]);
    for (int i = 0; i < n; ++i)
      if (!(p[static_cast<size_t>(i)] > 0.0))
        fail(ErrorCode::kDiverged, "SRS integrator produced a non-positive power; reduce step");
    if (trajectory)
      std::copy(p.begin(), p.end(),
                trajectory->states.begin() + static_cast<size_t>(s + 1) * static_cast<size_t>(n));
  }

  const double conn = linear_from_db(-params.connector_loss_db);
  SpanResult out;
  out.output_w.resize(static_cast<size_t>(n));
  out.transfer.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    out.output_w[static_cast<size_t>(i)] = p[static_cast<size_t>(i)] * conn;
    out.transfer[static_cast<size_t>(i)] = out.output_w[static_cast<size_t>(i)] / launch_w[static_cast<size_t>(i)];
  }
  return out;
}

std::vector<double> srs_backward(const SrsTrajectory& traj, const FiberParams& params,
                                 const ChannelGrid& grid, const std::vector<double>& grad_output) {
  const int n = grid.count();
  const double alpha = params.attenuation_db_km * kLn10Over10;
  const double conn = linear_from_db(-params.connector_loss_db);
  const double h = traj.step_km;
  Coupling coupling(grid, params);

  std::vector<double> cp(static_cast<size_t>(n)), up(static_cast<size_t>(n)), ct(static_cast<size_t>(n));

  // J^T u where J = df/dp at `point`: (J^T u)_m = u_m (cp_m - alpha) + [C^T (u .* p)]_m
  auto jt = [&](const double* point, const double* u, double* out) {
    coupling.apply(point, cp.data());
    for (int i = 0; i < n; ++i) up[static_cast<size_t>(i)] = u[i] * point[i];
    coupling.apply_transpose(up.data(), ct.data());
    for (int i = 0; i < n; ++i)
      out[i] = u[i] * (cp[static_cast<size_t>(i)] - alpha) + ct[static_cast<size_t>(i)];
  };

  std::vector<double> grad(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    grad[static_cast<size_t>(i)] = grad_output[static_cast<size_t>(i)] * conn * traj.flat_transfer;
  if (traj.n_steps == 0) return grad;

  std::vector<double> k1(static_cast<size_t>(n)), k2(static_cast<size_t>(n)), k3(static_cast<size_t>(n)),
      y1(static_cast<size_t>(n)), y2(static_cast<size_t>(n)), y3(static_cast<size_t>(n)),
      k1b(static_cast<size_t>(n)), k2b(static_cast<size_t>(n)), k3b(static_cast<size_t>(n)),
      k4b(static_cast<size_t>(n)), y1b(static_cast<size_t>(n)), y2b(static_cast<size_t>(n)),
      y3b(static_cast<size_t>(n)), pb(static_cast<size_t>(n));

  // Adjoint of one RK4 step: recompute the stage values from the stored step
  // start, then pull the gradient back through the tableau.
  for (int s = traj.n_steps - 1; s >= 0; --s) {
    const double* p = &traj.states[static_cast<size_t>(s) * static_cast<size_t>(n)];
    srs_rhs(coupling, alpha, p, cp.data(), k1.data(), n);
    for (int i = 0; i < n; ++i) y1[static_cast<size_t>(i)] = p[i] + 0.5 * h * k1[static_cast<size_t>(i)];
    srs_rhs(coupling, alpha, y1.data(), cp.data(), k2.data(), n);
    for (int i = 0; i < n; ++i) y2[static_cast<size_t>(i)] = p[i] + 0.5 * h * k2[static_cast<size_t>(i)];
    srs_rhs(coupling, alpha, y2.data(), cp.data(), k3.data(), n);
    for (int i = 0; i < n; ++i) y3[static_cast<size_t>(i)] = p[i] + h * k3[static_cast<size_t>(i)];

    const std::vector<double>& u = grad;  // dL/dP_{s+1}
    for (int i = 0; i < n; ++i) k4b[static_cast<size_t>(i)] = h / 6.0 * u[static_cast<size_t>(i)];
    jt(y3.data(), k4b.data(), y3b.data());
    for (int i = 0; i < n; ++i)
      k3b[static_cast<size_t>(i)] = 2.0 * h / 6.0 * u[static_cast<size_t>(i)] + h * y3b[static_cast<size_t>(i)];
    jt(y2.data(), k3b.data(), y2b.data());
    for (int i = 0; i < n; ++i)
      k2b[static_cast<size_t>(i)] = 2.0 * h / 6.0 * u[static_cast<size_t>(i)] + 0.5 * h * y2b[static_cast<size_t>(i)];
    jt(y1.data(), k2b.data(), y1b.data());
    for (int i = 0; i < n; ++i)
      k1b[static_cast<size_t>(i)] = h / 6.0 * u[static_cast<size_t>(i)] + 0.5 * h * y1b[static_cast<size_t>(i)];
    jt(p, k1b.data(), pb.data());
    // dL/dP_s = u + y1b + y2b + y3b + J^T(p) k1b
    for (int i = 0; i < n; ++i)
      grad[static_cast<size_t>(i)] = u[static_cast<size_t>(i)] + y1b[static_cast<size_t>(i)] + y2b[static_cast<size_t>(i)] +
                                     y3b[static_cast<size_t>(i)] + pb[static_cast<size_t>(i)];
  }
  return grad;
}

PowerSpectrum srs_propagate(const PowerSpectrum& launch, const FiberParams& params) {
  if (launch.domain() != Domain::kLinear)
    fail(ErrorCode::kInvalidArgument, "srs_propagate expects a linear-domain spectrum");
  SpanResult r = srs_propagate_raw(launch.values(), params, *launch.grid());
  return PowerSpectrum(launch.grid(), Domain::kLinear, std::move(r.output_w));
}

NliKernel make_nli_kernel(const ChannelGrid& grid, const FiberParams& params) {
  params.validate();
  NliKernel k;
  k.channels = grid.count();
  k.symbol_rate_hz = grid.symbol_rate_hz();
  if (params.gamma_w_km == 0.0 || params.length_km == 0.0) {
    k.prefactor = 0.0;
    k.psi.assign(static_cast<size_t>(k.channels) * static_cast<size_t>(k.channels), 0.0);
    k.end_transfer = linear_from_db(-(params.attenuation_db_km * params.length_km +
                                      params.connector_loss_db));
    return k;
  }

  const double alpha_p = params.attenuation_db_km * kLn10Over10;  // power, 1/km
  // Asymptotic (1/2alpha_field) and actual effective lengths; for a nearly
  // transparent span fall back to the physical length.
  const double l_asym = alpha_p > 1e-6 ? 1.0 / alpha_p : params.length_km;
  const double l_eff =
      alpha_p > 1e-12 ? (1.0 - std::exp(-alpha_p * params.length_km)) / alpha_p : params.length_km;
  const double beta2_abs = std::abs(params.beta2_ps2_km) * 1e-24;  // s^2/km
  const double r_hz = grid.symbol_rate_hz();
  const double pi = std::numbers::pi;

  k.prefactor = (16.0 / 27.0) * params.gamma_w_km * params.gamma_w_km * l_eff * l_eff /
                (2.0 * pi * beta2_abs * l_asym);
  k.end_transfer =
      linear_from_db(-(params.attenuation_db_km * params.length_km + params.connector_loss_db));
  k.psi.assign(static_cast<size_t>(k.channels) * static_cast<size_t>(k.channels), 0.0);
  for (int n = 0; n < k.channels; ++n) {
    for (int i = 0; i < k.channels; ++i) {
      double psi;
      if (i == n) {
        psi = std::asinh(0.5 * pi * pi * beta2_abs * l_asym * r_hz * r_hz);
      } else {
        double df = std::abs(grid.frequency_hz(i) - grid.frequency_hz(n));
        psi = std::asinh(pi * pi * beta2_abs * l_asym * r_hz * (df + 0.5 * r_hz)) -
              std::asinh(pi * pi * beta2_abs * l_asym * r_hz * (df - 0.5 * r_hz));
      }
      k.psi[static_cast<size_t>(n) * static_cast<size_t>(k.channels) + static_cast<size_t>(i)] = psi;
    }
  }
  return k;
}

std::vector<double> nli_power_raw(const std::vector<double>& launch_w, const NliKernel& kernel) {
  const int n = kernel.channels;
  if (static_cast<int>(launch_w.size()) != n)
    fail(ErrorCode::kInvalidArgument, "launch length does not match NLI kernel");
  std::vector<double> out(static_cast<size_t>(n), 0.0);
  if (kernel.prefactor == 0.0) return out;
  const double r = kernel.symbol_rate_hz;
  std::vector<double> g(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<size_t>(i)] = launch_w[static_cast<size_t>(i)] / r;
  const double scale = kernel.prefactor * kernel.end_transfer * r;
  for (int c = 0; c < n; ++c) {
    const double* psi_row = &kernel.psi[static_cast<size_t>(c) * static_cast<size_t>(n)];
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += psi_row[i] * g[static_cast<size_t>(i)] * g[static_cast<size_t>(i)];
    out[static_cast<size_t>(c)] = scale * g[static_cast<size_t>(c)] * acc;
  }
  return out;
}

void nli_backward(const std::vector<double>& launch_w, const NliKernel& kernel,
                  const std::vector<double>& grad_nli, std::vector<double>& grad_launch) {
  const int n = kernel.channels;
  if (kernel.prefactor == 0.0) return;
  const double r = kernel.symbol_rate_hz;
  std::vector<double> g(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<size_t>(i)] = launch_w[static_cast<size_t>(i)] / r;
  const double scale = kernel.prefactor * kernel.end_transfer * r;
  // out_c = scale * g_c * sum_i psi_ci g_i^2; d/dg_c and d/dg_i terms.
  for (int c = 0; c < n; ++c) {
    const double u = grad_nli[static_cast<size_t>(c)];
    if (u == 0.0) continue;
    const double* psi_row = &kernel.psi[static_cast<size_t>(c) * static_cast<size_t>(n)];
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += psi_row[i] * g[static_cast<size_t>(i)] * g[static_cast<size_t>(i)];
    grad_launch[static_cast<size_t>(c)] += u * scale * acc / r;
    const double gc = g[static_cast<size_t>(c)];
    for (int i = 0; i < n; ++i)
      grad_launch[static_cast<size_t>(i)] += u * scale * gc * 2.0 * psi_row[i] * g[static_cast<size_t>(i)] / r;
  }
}

std::vector<double> nli_power(const PowerSpectrum& launch, const FiberParams& params) {
  if (launch.domain() != Domain::kLinear)
    fail(ErrorCode::kInvalidArgument, "nli_power expects a linear-domain spectrum");
  NliKernel kernel = make_nli_kernel(*launch.grid(), params);
  return nli_power_raw(launch.values(), kernel);
}

NoiseSpectrum propagate_noise(const NoiseSpectrum& noise, const std::vector<double>& transfer) {
  if (noise.ase_w.size() != transfer.size())
    fail(ErrorCode::kInvalidArgument, "noise/transfer length mismatch");
  NoiseSpectrum out = noise;
  for (size_t i = 0; i < transfer.size(); ++i) {
    out.ase_w[i] *= transfer[i];
    out.nli_w[i] *= transfer[i];
  }
  return out;
}

}  // namespace wdmopt

#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "alemo/core.hpp"
#include "alemo/rng.hpp"

namespace alemo {

// ---------------------------------------------------------------------------
// Discrete fracture network
// ---------------------------------------------------------------------------

struct DfnSegment {
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0;
};

struct DfnGenParams {
  std::size_t count = 60;
  double length_min = 150.0;  // m
  double length_max = 600.0;  // m
  double angle1_deg = 45.0;   // first orientation set
  double angle2_deg = 135.0;  // second orientation set
  double jitter_deg = 10.0;   // uniform angular jitter around each set
};

struct DfnSpec {
  std::vector<DfnSegment> segments;
  double aperture = 1.0954e-3;  // m; cubic law b^2/12 ~ 1e-7 m^2
};

namespace geodetail {

/// Liang–Barsky clip of a segment to [0,Lx]x[0,Ly]; returns false if the
/// segment lies fully outside.
inline bool clip_segment(DfnSegment& s, double Lx, double Ly) {
  const double dx = s.x2 - s.x1;
  const double dy = s.y2 - s.y1;
  double t0 = 0.0, t1 = 1.0;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {s.x1 - 0.0, Lx - s.x1, s.y1 - 0.0, Ly - s.y1};
  for (int k = 0; k < 4; ++k) {
    if (p[k] == 0.0) {
      if (q[k] < 0.0) return false;
      continue;
    }
    const double r = q[k] / p[k];
    if (p[k] < 0.0) {
      if (r > t1) return false;
      t0 = std::max(t0, r);
    } else {
      if (r < t0) return false;
      t1 = std::min(t1, r);
    }
  }
  const DfnSegment orig = s;
  s.x1 = orig.x1 + t0 * dx;
  s.y1 = orig.y1 + t0 * dy;
  s.x2 = orig.x1 + t1 * dx;
  s.y2 = orig.y1 + t1 * dy;
  return t1 > t0;
}

}  // namespace geodetail

/// Seeded statistical fracture set: centers uniform in the domain, two
/// orientation sets used alternately with angular jitter, lengths uniform in
/// range, segments clipped to the domain rectangle.
inline DfnSpec generate_dfn(const DfnGenParams& params, double domain_x, double domain_y,
                            std::uint64_t seed) {
  if (domain_x <= 0 || domain_y <= 0) throw std::invalid_argument("generate_dfn: invalid domain");
  constexpr double deg = std::numbers::pi / 180.0;
  RandomStream rng(seed);
  DfnSpec dfn;
  dfn.segments.reserve(params.count);
  for (std::size_t n = 0; n < params.count; ++n) {
    const double cx = rng.uniform(0.0, domain_x);
    const double cy = rng.uniform(0.0, domain_y);
    const double base = (n % 2 == 0) ? params.angle1_deg : params.angle2_deg;
    const double ang = (base + params.jitter_deg * (2.0 * rng.uniform() - 1.0)) * deg;
    const double len = rng.uniform(params.length_min, params.length_max);
    DfnSegment s;
    s.x1 = cx - 0.5 * len * std::cos(ang);
    s.y1 = cy - 0.5 * len * std::sin(ang);
    s.x2 = cx + 0.5 * len * std::cos(ang);
    s.y2 = cy + 0.5 * len * std::sin(ang);
    if (geodetail::clip_segment(s, domain_x, domain_y)) dfn.segments.push_back(s);
  }
  return dfn;
}

// ---------------------------------------------------------------------------
// Reservoir configuration
// ---------------------------------------------------------------------------

struct ReservoirConfig {
  double domain_x = 2000.0;  // m
  double domain_y = 2000.0;  // m
  std::size_t nx = 16;
  std::size_t ny = 16;
  double thickness = 40.0;  // m

  double phi_matrix = 0.01;
  double phi_fracture = 0.1;
  double k_matrix = 5e-15;    // m^2
  double k_fracture = 1e-7;   // m^2 (ignored when use_cubic_law)
  bool use_cubic_law = false; // k_fracture = aperture^2 / 12

  double T_init = 473.15;   // K
  double p_init = 30e6;     // Pa
  double T_inj = 293.15;    // K
  double producer_bhp = 30e6;  // Pa

  double rho_w = 1000.0;   // kg/m^3
  double rho_s = 2650.0;   // kg/m^3
  double C_w = 4200.0;     // J/(kg K)
  double C_s = 850.0;      // J/(kg K)
  double lambda_w = 0.698; // W/(m K)
  double lambda_s = 2.0;   // W/(m K)
  double mu = 3e-4;        // Pa s

  double h_mf = -1.0;      // W/(m^2 K); must be set explicitly
  double well_radius = 0.1;  // m
  double rate_max = 0.4;     // m^3/s per injector

  // Producers: four corners plus center; injectors: edge midpoints.
  std::vector<std::array<double, 2>> producers;
  std::vector<std::array<double, 2>> injectors;

  void apply_default_wells() {
    producers = {{0.0, 0.0},
                 {domain_x, 0.0},
                 {0.0, domain_y},
                 {domain_x, domain_y},
                 {0.5 * domain_x, 0.5 * domain_y}};
    injectors = {{0.5 * domain_x, 0.0},
                 {0.0, 0.5 * domain_y},
                 {domain_x, 0.5 * domain_y},
                 {0.5 * domain_x, domain_y}};
  }

  void validate() const {
    if (nx < 10 || ny < 10) throw std::invalid_argument("ReservoirConfig: grid must be at least 10x10");
    auto pos = [](double v, const char* what) {
      if (!(v > 0)) throw std::invalid_argument(std::string("ReservoirConfig: ") + what + " must be positive");
    };
    pos(domain_x, "domain_x");
    pos(domain_y, "domain_y");
    pos(thickness, "thickness");
    pos(phi_matrix, "phi_matrix");
    pos(phi_fracture, "phi_fracture");
    pos(k_matrix, "k_matrix");
    pos(k_fracture, "k_fracture");
    pos(T_init, "T_init");
    pos(p_init, "p_init");
    pos(T_inj, "T_inj");
    pos(producer_bhp, "producer_bhp");
    pos(rho_w, "rho_w");
    pos(rho_s, "rho_s");
    pos(C_w, "C_w");
    pos(C_s, "C_s");
    pos(lambda_w, "lambda_w");
    pos(lambda_s, "lambda_s");
    pos(mu, "mu");
    pos(well_radius, "well_radius");
    pos(rate_max, "rate_max");
    if (!(h_mf > 0))
      throw std::invalid_argument("ReservoirConfig: h_mf (matrix-fracture heat transfer) must be set > 0");
    if (T_inj >= T_init) throw std::invalid_argument("ReservoirConfig: T_inj must be below T_init");
  }
};

// ---------------------------------------------------------------------------
// Rasterized cell properties
// ---------------------------------------------------------------------------

struct PropertyField {
  std::size_t nx = 0, ny = 0;
  double dx = 0, dy = 0;
  std::vector<double> k;            // m^2 per cell
  std::vector<double> phi;          // porosity per cell
  std::vector<char> fracture;       // tag
  std::vector<double> frac_length;  // total fracture length in cell, m

  std::size_t cell(std::size_t i, std::size_t j) const { return j * nx + i; }
  std::size_t size() const { return nx * ny; }
};

/// Equivalent-continuum rasterization: walk each segment across the grid
/// lines and accumulate the in-cell fracture length; any touched cell gets
/// fracture permeability and porosity.
inline PropertyField rasterize_dfn(const DfnSpec& dfn, const ReservoirConfig& cfg) {
  PropertyField f;
  f.nx = cfg.nx;
  f.ny = cfg.ny;
  f.dx = cfg.domain_x / static_cast<double>(cfg.nx);
  f.dy = cfg.domain_y / static_cast<double>(cfg.ny);
  f.k.assign(f.size(), cfg.k_matrix);
  f.phi.assign(f.size(), cfg.phi_matrix);
  f.fracture.assign(f.size(), 0);
  f.frac_length.assign(f.size(), 0.0);

  auto cell_of = [&](double x, double y) {
    auto ci = static_cast<long>(std::floor(x / f.dx));
    auto cj = static_cast<long>(std::floor(y / f.dy));
    ci = std::clamp<long>(ci, 0, static_cast<long>(f.nx) - 1);
    cj = std::clamp<long>(cj, 0, static_cast<long>(f.ny) - 1);
    return f.cell(static_cast<std::size_t>(ci), static_cast<std::size_t>(cj));
  };

  for (const DfnSegment& s : dfn.segments) {
    const double sx = s.x2 - s.x1;
    const double sy = s.y2 - s.y1;
    const double len = std::hypot(sx, sy);
    if (len <= 0) continue;
    std::vector<double> ts{0.0, 1.0};
    if (sx != 0.0) {
      for (std::size_t i = 1; i < f.nx; ++i) {
        const double t = (static_cast<double>(i) * f.dx - s.x1) / sx;
        if (t > 0.0 && t < 1.0) ts.push_back(t);
      }
    }
    if (sy != 0.0) {
      for (std::size_t j = 1; j < f.ny; ++j) {
        const double t = (static_cast<double>(j) * f.dy - s.y1) / sy;
        if (t > 0.0 && t < 1.0) ts.push_back(t);
      }
    }
    std::sort(ts.begin(), ts.end());
    for (std::size_t q = 0; q + 1 < ts.size(); ++q) {
      const double t0 = ts[q], t1 = ts[q + 1];
      if (t1 - t0 <= 1e-15) continue;
      const double tm = 0.5 * (t0 + t1);
      const std::size_t c = cell_of(s.x1 + tm * sx, s.y1 + tm * sy);
      f.frac_length[c] += (t1 - t0) * len;
    }
  }

  const double kf = cfg.use_cubic_law ? dfn.aperture * dfn.aperture / 12.0 : cfg.k_fracture;
  for (std::size_t c = 0; c < f.size(); ++c) {
    if (f.frac_length[c] > 0.0) {
      f.fracture[c] = 1;
      f.k[c] = kf;
      f.phi[c] = cfg.phi_fracture;
    }
  }
  return f;
}

// ---------------------------------------------------------------------------
// Schedules, state, series
// ---------------------------------------------------------------------------

struct WellSchedule {
  std::size_t n_injectors = 4;
  std::size_t n_steps = 20;
  double step_days = 600.0;
  std::vector<double> rates;  // injector-major: rates[i * n_steps + s], m^3/s

  double rate(std::size_t injector, std::size_t step) const {
    return rates.at(injector * n_steps + step);
  }

  static WellSchedule from_vector(const DecisionVector& x, std::size_t n_injectors,
                                  std::size_t n_steps, double step_days = 600.0) {
    if (x.size() != n_injectors * n_steps)
      throw std::invalid_argument("WellSchedule: decision vector length mismatch");
    WellSchedule s;
    s.n_injectors = n_injectors;
    s.n_steps = n_steps;
    s.step_days = step_days;
    s.rates = x;
    return s;
  }

  void validate(double rate_max) const {
    if (rates.size() != n_injectors * n_steps)
      throw std::invalid_argument("WellSchedule: rate matrix shape mismatch");
    for (double q : rates)
      if (!(q >= 0.0) || q > rate_max + 1e-12)
        throw std::invalid_argument("WellSchedule: rate outside [0, rate_max]");
  }
};

struct ReservoirState {
  std::vector<double> T_m;  // K, all cells
  std::vector<double> T_f;  // K, meaningful on fracture-tagged cells
  double elapsed_days = 0.0;
};

struct PressureSolution {
  std::vector<double> p;       // Pa per cell
  std::vector<double> flux_x;  // m^3/s, face (i,j)->(i+1,j), size (nx-1)*ny
  std::vector<double> flux_y;  // m^3/s, face (i,j)->(i,j+1), size nx*(ny-1)
  std::vector<double> producer_rates;  // m^3/s, >= 0 means production
  std::vector<double> injector_rates;  // m^3/s
};

struct StepRecord {
  std::size_t step = 0;
  double t_start_days = 0;
  double t_end_days = 0;
  std::vector<double> producer_temps;  // K, end-of-step flowing temperature
  std::vector<double> producer_rates;  // m^3/s
  std::vector<double> injector_rates;  // m^3/s
  double producer_temp = 0;   // K, flow-weighted over the step
  double wir = 0;             // total injection, m^3/s
  double wpr = 0;             // total production, m^3/s
  double tepr_watts = 0;      // thermal power relative to T_inj
  double energy_residual = 0; // relative closure error of the step audit
  std::size_t substeps = 0;
};

struct SimulationSeries {
  std::vector<StepRecord> steps;
  double step_days = 600.0;
};

// ---------------------------------------------------------------------------
// The reservoir model: pressure solve + heat transport
// ---------------------------------------------------------------------------

/// Finite-volume model of one reservoir realization. The pressure system and
/// the implicit-conduction operator depend only on static properties, so both
/// are assembled and factorized once at construction.
class ReservoirModel {
 public:
  ReservoirModel(const ReservoirConfig& cfg, const DfnSpec& dfn, double conduction_dt_days = 600.0)
      : cfg_(cfg) {
    if (cfg_.producers.empty() && cfg_.injectors.empty()) cfg_.apply_default_wells();
    cfg_.validate();
    if (cfg_.producers.empty())
      throw std::runtime_error(
          "ReservoirModel: no producers; the incompressible pressure system needs at least one "
          "pressure-controlled well");
    props_ = rasterize_dfn(dfn, cfg_);
    locate_wells();
    assemble_pressure();
    conduction_dt_seconds_ = conduction_dt_days * 86400.0;
    assemble_conduction(conduction_dt_seconds_, conduction_);
    cell_volume_ = props_.dx * props_.dy * cfg_.thickness;
    cap_matrix_ = cell_volume_ * ((cfg_.phi_matrix * cfg_.rho_w * cfg_.C_w) +
                                  (1.0 - cfg_.phi_matrix) * cfg_.rho_s * cfg_.C_s);
    cap_fracture_ = cell_volume_ * cfg_.phi_fracture * cfg_.rho_w * cfg_.C_w;
  }

  const ReservoirConfig& config() const { return cfg_; }
  const PropertyField& props() const { return props_; }
  const std::vector<std::size_t>& producer_cells() const { return producer_cells_; }
  const std::vector<std::size_t>& injector_cells() const { return injector_cells_; }

  ReservoirState initial_state() const {
    ReservoirState s;
    s.T_m.assign(props_.size(), cfg_.T_init);
    s.T_f.assign(props_.size(), cfg_.T_init);
    return s;
  }

  /// Quasi-steady incompressible pressure for the given injector rates.
  PressureSolution solve_pressure(const std::vector<double>& injector_rates) const {
    if (injector_rates.size() != injector_cells_.size())
      throw std::invalid_argument("solve_pressure: one rate per injector required");
    for (double q : injector_rates)
      if (!(q >= 0.0) || q > cfg_.rate_max + 1e-12)
        throw std::invalid_argument("solve_pressure: injector rate outside [0, rate_max]");

    // With no injection the incompressible system has the exact solution
    // p == BHP everywhere; return it directly so an idle schedule produces
    // exactly zero rates (and exactly zero revenue/cost downstream).
    if (std::all_of(injector_rates.begin(), injector_rates.end(),
                    [](double q) { return q == 0.0; })) {
      PressureSolution rest;
      rest.p.assign(props_.size(), cfg_.producer_bhp);
      rest.injector_rates = injector_rates;
      rest.flux_x.assign((props_.nx - 1) * props_.ny, 0.0);
      rest.flux_y.assign(props_.nx * (props_.ny - 1), 0.0);
      rest.producer_rates.assign(producer_cells_.size(), 0.0);
      return rest;
    }

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(props_.size()));
    for (std::size_t w = 0; w < producer_cells_.size(); ++w)
      rhs(static_cast<Eigen::Index>(producer_cells_[w])) += producer_wi_[w] / cfg_.mu * cfg_.producer_bhp;
    for (std::size_t w = 0; w < injector_cells_.size(); ++w)
      rhs(static_cast<Eigen::Index>(injector_cells_[w])) += injector_rates[w];

    const Eigen::VectorXd p = pressure_.solve(rhs);
    if (pressure_.info() != Eigen::Success || !p.allFinite())
      throw std::runtime_error("solve_pressure: linear solve failed");

    PressureSolution sol;
    sol.p.assign(p.data(), p.data() + p.size());
    sol.injector_rates = injector_rates;
    sol.flux_x.assign((props_.nx - 1) * props_.ny, 0.0);
    sol.flux_y.assign(props_.nx * (props_.ny - 1), 0.0);
    for (std::size_t j = 0; j < props_.ny; ++j)
      for (std::size_t i = 0; i + 1 < props_.nx; ++i) {
        const std::size_t a = props_.cell(i, j), b = props_.cell(i + 1, j);
        sol.flux_x[j * (props_.nx - 1) + i] = trans_x_[j * (props_.nx - 1) + i] * (sol.p[a] - sol.p[b]);
      }
    for (std::size_t j = 0; j + 1 < props_.ny; ++j)
      for (std::size_t i = 0; i < props_.nx; ++i) {
        const std::size_t a = props_.cell(i, j), b = props_.cell(i, j + 1);
        sol.flux_y[j * props_.nx + i] = trans_y_[j * props_.nx + i] * (sol.p[a] - sol.p[b]);
      }
    sol.producer_rates.resize(producer_cells_.size());
    for (std::size_t w = 0; w < producer_cells_.size(); ++w)
      sol.producer_rates[w] =
          producer_wi_[w] / cfg_.mu * (sol.p[producer_cells_[w]] - cfg_.producer_bhp);
    return sol;
  }

  struct StepAudit {
    double injected_J = 0;        // absolute enthalpy in (reference 0 K)
    double produced_J = 0;        // absolute enthalpy out
    double stored_delta_J = 0;    // E(end) - E(start)
    double residual = 0;          // relative closure error
    double produced_volume_m3 = 0;
    double produced_excess_J = 0; // enthalpy out above T_inj
    double flow_weighted_T = 0;   // K; falls back to cell average when no flow
    std::size_t substeps = 0;
  };

  /// Advance the thermal state over dt_seconds under the given (frozen)
  /// pressure solution: explicit upwind advection plus point-implicit
  /// matrix-fracture exchange in CFL substeps, then one implicit conduction
  /// solve on the matrix field.
  StepAudit advance_heat(ReservoirState& state, const PressureSolution& sol,
                         double dt_seconds) const {
    const std::size_t n = props_.size();
    const double rcw = cfg_.rho_w * cfg_.C_w;

    // Flowing-field capacity per cell: fracture water in tagged cells, the
    // full effective capacity elsewhere (local thermal equilibrium).
    std::vector<double> cap_flow(n);
    for (std::size_t c = 0; c < n; ++c)
      cap_flow[c] = props_.fracture[c] ? cap_fracture_ : cap_matrix_;

    // Face list in upwind form plus per-cell inflow for the CFL bound. The
    // advection substeps below use the temperature (advective) form
    //   T_c += beta_c * sum_in q * (T_up - T_c),
    // which is algebraically identical to the conservative flux form whenever
    // the discrete flux field is exactly divergence-free, but stays monotone
    // even though the pressure solve leaves O(eps*||A||*||p||) per-cell
    // divergence residuals. In the conservative form those residuals act as
    // phantom volumetric sources; divided by the small fracture water capacity
    // they drift stagnant hot cells above the initial temperature. In the
    // temperature form a cell surrounded by equal temperatures is a fixed
    // point regardless of the residual, so temperatures remain convex
    // combinations of old values and the injection temperature.
    struct Face {
      std::size_t up, down;
      double q;
    };
    std::vector<Face> faces;
    faces.reserve(sol.flux_x.size() + sol.flux_y.size());
    std::vector<double> inflow(n, 0.0);
    auto add_face = [&](std::size_t a, std::size_t b, double q) {
      if (q == 0.0) return;
      if (q > 0.0)
        faces.push_back(Face{a, b, q});
      else
        faces.push_back(Face{b, a, -q});
      inflow[faces.back().down] += faces.back().q;
    };
    for (std::size_t j = 0; j < props_.ny; ++j)
      for (std::size_t i = 0; i + 1 < props_.nx; ++i)
        add_face(props_.cell(i, j), props_.cell(i + 1, j), sol.flux_x[j * (props_.nx - 1) + i]);
    for (std::size_t j = 0; j + 1 < props_.ny; ++j)
      for (std::size_t i = 0; i < props_.nx; ++i)
        add_face(props_.cell(i, j), props_.cell(i, j + 1), sol.flux_y[j * props_.nx + i]);
    for (std::size_t w = 0; w < injector_cells_.size(); ++w)
      if (sol.injector_rates[w] > 0.0) inflow[injector_cells_[w]] += sol.injector_rates[w];

    double dt_cfl = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < n; ++c)
      if (inflow[c] > 0.0) dt_cfl = std::min(dt_cfl, cap_flow[c] / (rcw * inflow[c]));
    std::size_t n_sub = 1;
    if (std::isfinite(dt_cfl))
      n_sub = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(dt_seconds / (0.5 * dt_cfl))));
    const double dt = dt_seconds / static_cast<double>(n_sub);

    auto flow_T = [&](std::size_t c) { return props_.fracture[c] ? state.T_f[c] : state.T_m[c]; };
    auto total_energy = [&]() {
      double e = 0.0;
      for (std::size_t c = 0; c < n; ++c) {
        e += cap_matrix_ * state.T_m[c];
        if (props_.fracture[c]) e += cap_fracture_ * state.T_f[c];
      }
      return e;
    };

    StepAudit audit;
    audit.substeps = n_sub;
    const double e_start = total_energy();
    double produced_T_volume = 0.0;  // integral of q_p * T dt

    std::vector<double> delta(n);
    for (std::size_t s = 0; s < n_sub; ++s) {
      std::fill(delta.begin(), delta.end(), 0.0);
      for (const Face& f : faces)
        delta[f.down] += rcw * f.q * (flow_T(f.up) - flow_T(f.down)) * dt;
      for (std::size_t w = 0; w < injector_cells_.size(); ++w) {
        const double q = sol.injector_rates[w];
        const std::size_t c = injector_cells_[w];
        delta[c] += rcw * q * (cfg_.T_inj - flow_T(c)) * dt;
        audit.injected_J += rcw * q * cfg_.T_inj * dt;
      }
      // Withdrawal removes water at the cell's own temperature, so it leaves
      // that temperature unchanged; only the ledger records the energy.
      for (std::size_t w = 0; w < producer_cells_.size(); ++w) {
        const double q = sol.producer_rates[w];
        if (q <= 0.0) continue;
        const std::size_t c = producer_cells_[w];
        const double T = flow_T(c);
        audit.produced_J += rcw * q * T * dt;
        audit.produced_excess_J += rcw * q * (T - cfg_.T_inj) * dt;
        audit.produced_volume_m3 += q * dt;
        produced_T_volume += q * T * dt;
      }
      for (std::size_t c = 0; c < n; ++c) {
        if (delta[c] == 0.0) continue;
        if (props_.fracture[c])
          state.T_f[c] += delta[c] / cap_fracture_;
        else
          state.T_m[c] += delta[c] / cap_matrix_;
      }
      // Matrix-fracture exchange, backward Euler on each tagged pair
      // (unconditionally stable, exactly conservative).
      for (std::size_t c = 0; c < n; ++c) {
        if (!props_.fracture[c]) continue;
        const double area = 2.0 * props_.frac_length[c] * cfg_.thickness;
        const double alpha = dt * cfg_.h_mf * area;
        if (alpha <= 0.0) continue;
        const double gap = (state.T_f[c] - state.T_m[c]) /
                           (1.0 + alpha * (1.0 / cap_fracture_ + 1.0 / cap_matrix_));
        const double e = alpha * gap;
        state.T_f[c] -= e / cap_fracture_;
        state.T_m[c] += e / cap_matrix_;
      }
    }

    // Implicit conduction on the matrix field (insulated boundary).
    {
      const bool cached = std::abs(dt_seconds - conduction_dt_seconds_) <=
                          1e-9 * std::max(dt_seconds, conduction_dt_seconds_);
      Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
      for (std::size_t c = 0; c < n; ++c)
        rhs(static_cast<Eigen::Index>(c)) = cap_matrix_ / dt_seconds * state.T_m[c];
      Eigen::VectorXd Tn;
      if (cached) {
        Tn = conduction_.solve(rhs);
      } else {
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
        assemble_conduction(dt_seconds, solver);
        Tn = solver.solve(rhs);
      }
      if (!Tn.allFinite()) throw std::runtime_error("advance_heat: conduction solve failed");
      for (std::size_t c = 0; c < n; ++c) state.T_m[c] = Tn(static_cast<Eigen::Index>(c));
    }

    for (std::size_t c = 0; c < n; ++c) {
      if (!std::isfinite(state.T_m[c]) || !std::isfinite(state.T_f[c])) {
        std::ostringstream msg;
        msg << "advance_heat: non-finite temperature at cell " << c << " (T_m=" << state.T_m[c]
            << ", T_f=" << state.T_f[c] << ", t=" << state.elapsed_days << " d)";
        throw std::runtime_error(msg.str());
      }
    }

    audit.stored_delta_J = total_energy() - e_start;
    const double net_in = audit.injected_J - audit.produced_J;
    const double scale =
        std::max({std::abs(audit.injected_J), std::abs(audit.produced_J),
                  std::abs(audit.stored_delta_J), 1.0});
    audit.residual = std::abs(audit.stored_delta_J - net_in) / scale;
    if (audit.produced_volume_m3 > 0.0) {
      audit.flow_weighted_T = produced_T_volume / audit.produced_volume_m3;
    } else {
      double sum = 0.0;
      for (std::size_t c : producer_cells_) sum += flow_T(c);
      audit.flow_weighted_T = sum / static_cast<double>(producer_cells_.size());
    }
    state.elapsed_days += dt_seconds / 86400.0;
    return audit;
  }

  using StepCallback = std::function<void(std::size_t, const ReservoirState&, const PressureSolution&)>;

  /// Run the full control schedule: one pressure solve and one heat advance
  /// per step, recording producer temperatures, rates, and thermal power.
  SimulationSeries simulate(const WellSchedule& schedule, const StepCallback& on_step = {}) const {
    schedule.validate(cfg_.rate_max);
    if (schedule.n_injectors != injector_cells_.size())
      throw std::invalid_argument("simulate: schedule injector count mismatch");
    SimulationSeries series;
    series.step_days = schedule.step_days;
    ReservoirState state = initial_state();
    const double dt_seconds = schedule.step_days * 86400.0;

    for (std::size_t s = 0; s < schedule.n_steps; ++s) {
      std::vector<double> rates(schedule.n_injectors);
      for (std::size_t w = 0; w < schedule.n_injectors; ++w) rates[w] = schedule.rate(w, s);
      const PressureSolution sol = solve_pressure(rates);
      const double t0 = state.elapsed_days;
      const StepAudit audit = advance_heat(state, sol, dt_seconds);

      StepRecord rec;
      rec.step = s;
      rec.t_start_days = t0;
      rec.t_end_days = state.elapsed_days;
      rec.injector_rates = rates;
      rec.producer_rates = sol.producer_rates;
      for (std::size_t c : producer_cells_)
        rec.producer_temps.push_back(props_.fracture[c] ? state.T_f[c] : state.T_m[c]);
      rec.producer_temp = audit.flow_weighted_T;
      for (double q : rates) rec.wir += q;
      for (double q : sol.producer_rates) rec.wpr += std::max(0.0, q);
      rec.tepr_watts = audit.produced_excess_J / dt_seconds;
      rec.energy_residual = audit.residual;
      rec.substeps = audit.substeps;
      series.steps.push_back(std::move(rec));
      if (on_step) on_step(s, state, sol);
    }
    return series;
  }

  /// Legacy-VTK structured-points snapshot of cell-centered fields.
  void write_snapshot(const std::string& path, const ReservoirState& state,
                      const PressureSolution* sol = nullptr) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_snapshot: cannot open " + path);
    out << "# vtk DataFile Version 3.0\n";
    out << "reservoir snapshot t=" << state.elapsed_days << " days\n";
    out << "ASCII\nDATASET STRUCTURED_POINTS\n";
    out << "DIMENSIONS " << props_.nx << " " << props_.ny << " 1\n";
    out << "ORIGIN " << 0.5 * props_.dx << " " << 0.5 * props_.dy << " 0\n";
    out << "SPACING " << props_.dx << " " << props_.dy << " 1\n";
    out << "POINT_DATA " << props_.size() << "\n";
    auto field = [&](const char* name, auto&& value) {
      out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
      for (std::size_t c = 0; c < props_.size(); ++c) out << value(c) << "\n";
    };
    field("T_matrix", [&](std::size_t c) { return state.T_m[c]; });
    field("T_fracture", [&](std::size_t c) { return props_.fracture[c] ? state.T_f[c] : state.T_m[c]; });
    field("fracture_tag", [&](std::size_t c) { return static_cast<double>(props_.fracture[c]); });
    field("permeability", [&](std::size_t c) { return props_.k[c]; });
    if (sol != nullptr) field("pressure", [&](std::size_t c) { return sol->p[c]; });
  }

 private:
  void locate_wells() {
    auto cell_of = [&](const std::array<double, 2>& xy) {
      auto ci = static_cast<long>(std::floor(xy[0] / props_.dx));
      auto cj = static_cast<long>(std::floor(xy[1] / props_.dy));
      ci = std::clamp<long>(ci, 0, static_cast<long>(props_.nx) - 1);
      cj = std::clamp<long>(cj, 0, static_cast<long>(props_.ny) - 1);
      return props_.cell(static_cast<std::size_t>(ci), static_cast<std::size_t>(cj));
    };
    for (const auto& xy : cfg_.producers) producer_cells_.push_back(cell_of(xy));
    for (const auto& xy : cfg_.injectors) injector_cells_.push_back(cell_of(xy));
    const double r_eq = 0.14 * std::hypot(props_.dx, props_.dy);  // Peaceman radius
    for (std::size_t c : producer_cells_)
      producer_wi_.push_back(2.0 * std::numbers::pi * props_.k[c] * cfg_.thickness /
                             std::log(r_eq / cfg_.well_radius));
  }

  void assemble_pressure() {
    const std::size_t n = props_.size();
    trans_x_.assign((props_.nx - 1) * props_.ny, 0.0);
    trans_y_.assign(props_.nx * (props_.ny - 1), 0.0);
    const double H = cfg_.thickness;
    std::vector<Eigen::Triplet<double>> trip;
    std::vector<double> diag(n, 0.0);
    auto couple = [&](std::size_t a, std::size_t b, double T) {
      trip.emplace_back(static_cast<int>(a), static_cast<int>(b), -T);
      trip.emplace_back(static_cast<int>(b), static_cast<int>(a), -T);
      diag[a] += T;
      diag[b] += T;
    };
    for (std::size_t j = 0; j < props_.ny; ++j)
      for (std::size_t i = 0; i + 1 < props_.nx; ++i) {
        const std::size_t a = props_.cell(i, j), b = props_.cell(i + 1, j);
        const double T = 2.0 * (props_.dy * H) * props_.k[a] * props_.k[b] /
                         (cfg_.mu * props_.dx * (props_.k[a] + props_.k[b]));
        trans_x_[j * (props_.nx - 1) + i] = T;
        couple(a, b, T);
      }
    for (std::size_t j = 0; j + 1 < props_.ny; ++j)
      for (std::size_t i = 0; i < props_.nx; ++i) {
        const std::size_t a = props_.cell(i, j), b = props_.cell(i, j + 1);
        const double T = 2.0 * (props_.dx * H) * props_.k[a] * props_.k[b] /
                         (cfg_.mu * props_.dy * (props_.k[a] + props_.k[b]));
        trans_y_[j * props_.nx + i] = T;
        couple(a, b, T);
      }
    for (std::size_t w = 0; w < producer_cells_.size(); ++w)
      diag[producer_cells_[w]] += producer_wi_[w] / cfg_.mu;
    for (std::size_t c = 0; c < n; ++c)
      trip.emplace_back(static_cast<int>(c), static_cast<int>(c), diag[c]);
    Eigen::SparseMatrix<double> A(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    A.setFromTriplets(trip.begin(), trip.end());
    pressure_.compute(A);
    if (pressure_.info() != Eigen::Success)
      throw std::runtime_error("ReservoirModel: pressure system factorization failed");
  }

  void assemble_conduction(double dt_seconds,
                           Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>& solver) const {
    const std::size_t n = props_.size();
    const double H = cfg_.thickness;
    auto lambda_eff = [&](std::size_t) {
      // Matrix-continuum conductivity; the fracture field exchanges via h_mf.
      return cfg_.phi_matrix * cfg_.lambda_w + (1.0 - cfg_.phi_matrix) * cfg_.lambda_s;
    };
    std::vector<Eigen::Triplet<double>> trip;
    std::vector<double> diag(n, cap_matrix_for_assembly() / dt_seconds);
    auto couple = [&](std::size_t a, std::size_t b, double G) {
      trip.emplace_back(static_cast<int>(a), static_cast<int>(b), -G);
      trip.emplace_back(static_cast<int>(b), static_cast<int>(a), -G);
      diag[a] += G;
      diag[b] += G;
    };
    for (std::size_t j = 0; j < props_.ny; ++j)
      for (std::size_t i = 0; i + 1 < props_.nx; ++i) {
        const std::size_t a = props_.cell(i, j), b = props_.cell(i + 1, j);
        const double la = lambda_eff(a), lb = lambda_eff(b);
        couple(a, b, 2.0 * (props_.dy * H) * la * lb / (props_.dx * (la + lb)));
      }
    for (std::size_t j = 0; j + 1 < props_.ny; ++j)
      for (std::size_t i = 0; i < props_.nx; ++i) {
        const std::size_t a = props_.cell(i, j), b = props_.cell(i, j + 1);
        const double la = lambda_eff(a), lb = lambda_eff(b);
        couple(a, b, 2.0 * (props_.dx * H) * la * lb / (props_.dy * (la + lb)));
      }
    for (std::size_t c = 0; c < n; ++c)
      trip.emplace_back(static_cast<int>(c), static_cast<int>(c), diag[c]);
    Eigen::SparseMatrix<double> M(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    M.setFromTriplets(trip.begin(), trip.end());
    solver.compute(M);
    if (solver.info() != Eigen::Success)
      throw std::runtime_error("ReservoirModel: conduction factorization failed");
  }

  double cap_matrix_for_assembly() const {
    const double V = (cfg_.domain_x / static_cast<double>(cfg_.nx)) *
                     (cfg_.domain_y / static_cast<double>(cfg_.ny)) * cfg_.thickness;
    return V * (cfg_.phi_matrix * cfg_.rho_w * cfg_.C_w +
                (1.0 - cfg_.phi_matrix) * cfg_.rho_s * cfg_.C_s);
  }

  ReservoirConfig cfg_;
  PropertyField props_;
  std::vector<std::size_t> producer_cells_;
  std::vector<std::size_t> injector_cells_;
  std::vector<double> producer_wi_;
  std::vector<double> trans_x_, trans_y_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> pressure_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> conduction_;
  double conduction_dt_seconds_ = 0;
  double cell_volume_ = 0;
  double cap_matrix_ = 0;
  double cap_fracture_ = 0;
};

// ---------------------------------------------------------------------------
// Economics
// ---------------------------------------------------------------------------

struct EconomicParams {
  double r_e = -1;                 // currency per thermal watt-hour
  double r_i = -1;                 // currency per m^3 injected
  double r_p = -1;                 // currency per m^3 produced
  double gamma = -1;               // discount rate per year
  double short_horizon_days = -1;  // short-term NPV window
  bool per_step_discount = false;  // discount by step length instead of elapsed time

  void validate() const {
    if (!(r_e >= 0) || !(r_i >= 0) || !(r_p >= 0))
      throw std::invalid_argument("EconomicParams: prices r_e, r_i, r_p must be set >= 0");
    if (!(gamma >= 0)) throw std::invalid_argument("EconomicParams: gamma must be set >= 0");
    if (!(short_horizon_days > 0))
      throw std::invalid_argument("EconomicParams: short_horizon_days must be set > 0");
  }
};

/// Discounted net present value of the steps fully inside [start_day,
/// end_day]. Revenue: thermal power (W) x hours x r_e; costs: injected and
/// produced volumes x unit prices. Discounting uses cumulative elapsed time by
/// default, or the per-step exponent when per_step_discount is set.
inline double npv(const SimulationSeries& series, const EconomicParams& econ, double start_day,
                  double end_day) {
  econ.validate();
  double total = 0.0;
  for (const StepRecord& rec : series.steps) {
    if (rec.t_start_days < start_day - 1e-9 || rec.t_end_days > end_day + 1e-9) continue;
    const double days = rec.t_end_days - rec.t_start_days;
    const double revenue = rec.tepr_watts * 24.0 * days * econ.r_e;
    const double cost = 86400.0 * days * (rec.wir * econ.r_i + rec.wpr * econ.r_p);
    const double years = (econ.per_step_discount ? days : rec.t_end_days) / 365.0;
    total += (revenue - cost) / std::pow(1.0 + econ.gamma, years);
  }
  return total;
}

// ---------------------------------------------------------------------------
// The two-objective NPV problem
// ---------------------------------------------------------------------------

/// Decision vector: injector-major schedule x[i * n_steps + s] in m^3/s.
/// Objectives: (-NPV over the full horizon, -NPV over the short window), both
/// minimized.
class GeothermalProblem final : public Problem {
 public:
  GeothermalProblem(const ReservoirConfig& cfg, const DfnSpec& dfn, const EconomicParams& econ,
                    std::size_t n_steps = 20, double step_days = 600.0)
      : model_(cfg, dfn, step_days), econ_(econ), n_steps_(n_steps), step_days_(step_days) {
    econ_.validate();
    if (econ_.short_horizon_days > static_cast<double>(n_steps_) * step_days_ + 1e-9)
      throw std::invalid_argument("GeothermalProblem: short horizon exceeds project length");
    n_injectors_ = model_.injector_cells().size();
    if (n_injectors_ == 0) throw std::invalid_argument("GeothermalProblem: no injectors configured");
    const std::size_t d = n_injectors_ * n_steps_;
    bounds_ = BoxBounds(DecisionVector(d, 0.0), DecisionVector(d, model_.config().rate_max));
  }

  std::size_t dimension() const override { return n_injectors_ * n_steps_; }
  std::size_t objective_count() const override { return 2; }
  BoxBounds bounds() const override { return bounds_; }
  std::string name() const override { return "geothermal"; }

  ObjectiveVector evaluate(const DecisionVector& x) const override {
    const WellSchedule schedule = WellSchedule::from_vector(x, n_injectors_, n_steps_, step_days_);
    const SimulationSeries series = model_.simulate(schedule);
    const double horizon = static_cast<double>(n_steps_) * step_days_;
    const double npv_long = npv(series, econ_, 0.0, horizon);
    const double npv_short = npv(series, econ_, 0.0, econ_.short_horizon_days);
    return ObjectiveVector{-npv_long, -npv_short};
  }

  const ReservoirModel& model() const { return model_; }
  const EconomicParams& economics() const { return econ_; }
  std::size_t n_steps() const { return n_steps_; }
  double step_days() const { return step_days_; }

 private:
  ReservoirModel model_;
  EconomicParams econ_;
  std::size_t n_steps_;
  double step_days_;
  std::size_t n_injectors_ = 0;
  BoxBounds bounds_ = BoxBounds::unit(1);
};

// Convenience wrappers matching the operation-level API.

inline PressureSolution solve_pressure(const ReservoirConfig& cfg, const DfnSpec& dfn,
                                       const std::vector<double>& injector_rates) {
  return ReservoirModel(cfg, dfn).solve_pressure(injector_rates);
}

inline SimulationSeries simulate_schedule(const WellSchedule& schedule, const ReservoirConfig& cfg,
                                          const DfnSpec& dfn) {
  return ReservoirModel(cfg, dfn, schedule.step_days).simulate(schedule);
}

}  // namespace alemo

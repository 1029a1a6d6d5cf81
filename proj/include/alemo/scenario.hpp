#pragma once

#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "alemo/geosim.hpp"

namespace alemo {

struct GeothermalScenario {
  ReservoirConfig reservoir;
  DfnSpec dfn;
  EconomicParams economics;
  std::size_t n_steps = 20;
  double step_days = 600.0;
  std::uint64_t dfn_seed = 7;
};

/// Load a scenario from JSON. Physical constants default to the shipped
/// reservoir description; the heat-transfer coefficient and all economic
/// parameters must be present (they have no defensible defaults).
inline GeothermalScenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("load_scenario: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("load_scenario: invalid JSON in " + path + ": " + e.what());
  }

  GeothermalScenario sc;
  ReservoirConfig& r = sc.reservoir;
  auto get = [](const nlohmann::json& obj, const char* key, auto fallback) {
    using T = decltype(fallback);
    if (obj.contains(key)) return obj.at(key).template get<T>();
    return fallback;
  };

  if (j.contains("grid")) {
    r.nx = get(j["grid"], "nx", r.nx);
    r.ny = get(j["grid"], "ny", r.ny);
  }
  if (j.contains("domain")) {
    r.domain_x = get(j["domain"], "x", r.domain_x);
    r.domain_y = get(j["domain"], "y", r.domain_y);
    r.thickness = get(j["domain"], "thickness", r.thickness);
  }
  if (j.contains("rock")) {
    const auto& o = j["rock"];
    r.phi_matrix = get(o, "phi_matrix", r.phi_matrix);
    r.phi_fracture = get(o, "phi_fracture", r.phi_fracture);
    r.k_matrix = get(o, "k_matrix", r.k_matrix);
    r.k_fracture = get(o, "k_fracture", r.k_fracture);
    r.use_cubic_law = get(o, "use_cubic_law", r.use_cubic_law);
    r.rho_s = get(o, "rho_s", r.rho_s);
    r.C_s = get(o, "C_s", r.C_s);
    r.lambda_s = get(o, "lambda_s", r.lambda_s);
  }
  if (j.contains("fluid")) {
    const auto& o = j["fluid"];
    r.rho_w = get(o, "rho_w", r.rho_w);
    r.C_w = get(o, "C_w", r.C_w);
    r.lambda_w = get(o, "lambda_w", r.lambda_w);
    r.mu = get(o, "mu", r.mu);
  }
  if (j.contains("thermal")) {
    const auto& o = j["thermal"];
    r.T_init = get(o, "T_init", r.T_init);
    r.T_inj = get(o, "T_inj", r.T_inj);
    r.h_mf = get(o, "h_mf", r.h_mf);
  }
  if (j.contains("pressure")) {
    const auto& o = j["pressure"];
    r.p_init = get(o, "p_init", r.p_init);
    r.producer_bhp = get(o, "producer_bhp", r.producer_bhp);
  }
  if (j.contains("wells")) {
    const auto& o = j["wells"];
    r.well_radius = get(o, "radius", r.well_radius);
    r.rate_max = get(o, "rate_max", r.rate_max);
    if (o.contains("producers"))
      for (const auto& xy : o["producers"])
        r.producers.push_back({xy.at(0).get<double>(), xy.at(1).get<double>()});
    if (o.contains("injectors"))
      for (const auto& xy : o["injectors"])
        r.injectors.push_back({xy.at(0).get<double>(), xy.at(1).get<double>()});
  }
  if (r.producers.empty() && r.injectors.empty()) r.apply_default_wells();

  if (j.contains("dfn")) {
    const auto& o = j["dfn"];
    sc.dfn.aperture = get(o, "aperture", sc.dfn.aperture);
    if (o.contains("segments")) {
      for (const auto& seg : o["segments"])
        sc.dfn.segments.push_back(DfnSegment{seg.at(0).get<double>(), seg.at(1).get<double>(),
                                             seg.at(2).get<double>(), seg.at(3).get<double>()});
    } else {
      DfnGenParams params;
      params.count = get(o, "count", params.count);
      params.length_min = get(o, "length_min", params.length_min);
      params.length_max = get(o, "length_max", params.length_max);
      params.angle1_deg = get(o, "angle1_deg", params.angle1_deg);
      params.angle2_deg = get(o, "angle2_deg", params.angle2_deg);
      params.jitter_deg = get(o, "jitter_deg", params.jitter_deg);
      sc.dfn_seed = get(o, "seed", sc.dfn_seed);
      const double aperture = sc.dfn.aperture;
      sc.dfn = generate_dfn(params, r.domain_x, r.domain_y, sc.dfn_seed);
      sc.dfn.aperture = aperture;
    }
  }

  if (j.contains("schedule")) {
    sc.n_steps = get(j["schedule"], "n_steps", sc.n_steps);
    sc.step_days = get(j["schedule"], "step_days", sc.step_days);
  }

  if (!j.contains("economics"))
    throw std::invalid_argument("load_scenario: economics section is required");
  {
    const auto& o = j["economics"];
    EconomicParams& e = sc.economics;
    auto require = [&](const char* key) {
      if (!o.contains(key))
        throw std::invalid_argument(std::string("load_scenario: economics.") + key + " is required");
      return o.at(key).get<double>();
    };
    e.r_e = require("r_e");
    e.r_i = require("r_i");
    e.r_p = require("r_p");
    e.gamma = require("gamma");
    e.short_horizon_days = require("short_horizon_days");
    e.per_step_discount = get(o, "per_step_discount", e.per_step_discount);
  }
  return sc;
}

inline std::unique_ptr<GeothermalProblem> make_problem(const GeothermalScenario& sc) {
  return std::make_unique<GeothermalProblem>(sc.reservoir, sc.dfn, sc.economics, sc.n_steps,
                                             sc.step_days);
}

}  // namespace alemo

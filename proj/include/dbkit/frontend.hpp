#pragma once

// Model DSL:
//   params a e;
//   fields phi A0 A1;
//   L = 1/2*dt(phi)^2 - 1/2*dx(phi)^2 + e*(dt(phi)+dx(phi))*(A0-A1);
//
// Gauge files and phase-density expressions use the same expression syntax
// over phase coordinates (field names and p_<field>), with dx() but no dt().

#include <string>
#include <vector>

#include "dbkit/model.hpp"

namespace dbkit {

struct GaugeSpec {
  std::vector<std::string> sources;  // one density expression per entry
};

ModelIR parse_model(const std::string& text, const std::string& name = "model");
std::string print_model(const ModelIR& m);

PhaseDensity parse_phase_density(const std::string& text, const CoordSystem& cs);
GaugeSpec parse_gauge_file(const std::string& text);

struct Preset {
  ModelIR model;
  GaugeSpec gauge;  // empty for ungauged presets
};

std::vector<std::string> preset_names();
Preset preset_model(const std::string& name);

}  // namespace dbkit

#pragma once

// One JSON document describing every run the CLI can perform, plus the
// serializers for the files the CLI writes.
//
// Complex numbers are written as {"re": x, "im": y}. Unknown keys anywhere in
// the document are rejected with ConfigError.

#include <filesystem>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pmjc/dynamics.hpp"
#include "pmjc/equivalence.hpp"
#include "pmjc/pseudo_jc.hpp"

namespace pmjc {

inline constexpr const char* kGeneratedBy = "pmjc 0.1.0";

/// Malformed or inconsistent configuration (CLI exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class EvolveMode { Driven, Static };

const char* to_string(EvolveMode mode);
EvolveMode parse_evolve_mode(const std::string& text);

struct EvolveConfig {
  EvolveMode mode = EvolveMode::Driven;
  std::vector<Frame> frames{Frame::Lab, Frame::Interaction, Frame::Gauged};
  int n = 1;
  cplx c0{0.0, 0.0};
  cplx d0{1.0, 0.0};
  double t_end = 0.0;  // 0: two Rabi periods
  double step = 0.0;   // 0: default_step

  bool operator==(const EvolveConfig&) const = default;
};

struct SpectrumConfig {
  int n_max = 5;

  bool operator==(const SpectrumConfig&) const = default;
};

enum class Emit { Trajectories, Report, Spectrum, PseudoDiagnostics };

const char* to_string(Emit emit);
Emit parse_emit(const std::string& text);

struct RunConfig {
  JcParams params{1.0, 1.0, {0.01, 0.0}};
  ModulationSpec modulation{ModulationTarget::AtomFrequency, {0.0, 0.0}, 1.0};
  ExperimentConfig experiment;  // experiment.params mirrors params
  std::vector<double> sweep;    // empty: single experiment
  EvolveConfig evolve;
  SpectrumConfig spectrum;
  PseudoConfig pseudo;
  std::filesystem::path output_dir = ".";
  std::set<Emit> emit{Emit::Trajectories, Emit::Report, Emit::Spectrum, Emit::PseudoDiagnostics};

  void validate() const;
};

bool operator==(const RunConfig& a, const RunConfig& b);

nlohmann::json to_json(const RunConfig& cfg);
/// Missing keys keep their defaults; unknown keys and bad values throw ConfigError.
RunConfig run_config_from_json(const nlohmann::json& doc);
/// Parses text; parse errors become ConfigError carrying the parser's location.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);

/// Integrates the evolve section once per requested frame. Driven runs use the
/// frame's own equations from the same initial amplitudes (all frame maps are
/// the identity at t = 0); static runs integrate rhs_static.
std::vector<Trajectory> run_evolve(const RunConfig& cfg);

nlohmann::json complex_to_json(cplx z);

nlohmann::json report_to_json(const ExperimentConfig& cfg, const ComparisonReport& report,
                              const std::vector<SweepPoint>& sweep);
/// t, window-averaged driven (c, d), static reference (c, d); 17 significant digits.
std::string comparison_csv(const ComparisonReport& report);
std::string sweep_csv(const std::vector<SweepPoint>& sweep);

nlohmann::json spectrum_to_json(const JcParams& params, const SpectrumConfig& cfg);
nlohmann::json pseudo_to_json(const PseudoConfig& cfg, const PseudoDiagnostics& diag);

/// Writes `text` to `path`, throwing std::runtime_error with the path on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace pmjc

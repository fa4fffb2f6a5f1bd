#include "pmjc/run_config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "pmjc/errors.hpp"

namespace pmjc {

using nlohmann::json;

namespace {

// Strict view of one JSON object: every key must be claimed by a getter.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  const json* find(const std::string& key) {
    known_.push_back(key);
    const auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(where(key) + ": expected a number");
      out = v->get<double>();
    }
  }

  void integer(const std::string& key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) throw ConfigError(where(key) + ": expected an integer");
      out = v->get<int>();
    }
  }

  void unsigned_integer(const std::string& key, unsigned long long& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) throw ConfigError(where(key) + ": expected a non-negative integer");
      out = v->get<unsigned long long>();
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(where(key) + ": expected true or false");
      out = v->get<bool>();
    }
  }

  void text(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(where(key) + ": expected a string");
      out = v->get<std::string>();
    }
  }

  void complex(const std::string& key, cplx& out) {
    if (const json* v = find(key)) out = read_complex(*v, where(key));
  }

  template <class T, class Parse>
  void enumerated(const std::string& key, T& out, Parse parse) {
    const json* v = find(key);
    if (v == nullptr) return;
    if (!v->is_string()) throw ConfigError(where(key) + ": expected a string");
    try {
      out = parse(v->get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where(key) + ": " + e.what());
    }
  }

  std::string where(const std::string& key) const { return path_ + "." + key; }

  void finish() const {
    for (const auto& item : node_.items()) {
      if (std::find(known_.begin(), known_.end(), item.key()) == known_.end()) {
        throw ConfigError(path_ + ": unknown key '" + item.key() + "'");
      }
    }
  }

  static cplx read_complex(const json& v, const std::string& where) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (!v.is_object()) throw ConfigError(where + ": expected {\"re\": x, \"im\": y}");
    Section s(v, where);
    double re = 0.0;
    double im = 0.0;
    s.number("re", re);
    s.number("im", im);
    s.finish();
    return {re, im};
  }

 private:
  const json& node_;
  std::string path_;
  std::vector<std::string> known_;
};

template <class Fn>
void with_section(Section& parent, const std::string& key, Fn fn) {
  if (const json* v = parent.find(key)) {
    Section child(*v, parent.where(key));
    fn(child);
    child.finish();
  }
}

json frames_to_json(const std::vector<Frame>& frames) {
  json out = json::array();
  for (Frame f : frames) out.push_back(to_string(f));
  return out;
}

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

const char* to_string(EvolveMode mode) { return mode == EvolveMode::Driven ? "driven" : "static"; }

EvolveMode parse_evolve_mode(const std::string& text) {
  if (text == "driven") return EvolveMode::Driven;
  if (text == "static") return EvolveMode::Static;
  throw std::invalid_argument("unknown evolve mode '" + text + "' (expected driven|static)");
}

const char* to_string(Emit emit) {
  switch (emit) {
    case Emit::Trajectories:
      return "trajectories";
    case Emit::Report:
      return "report";
    case Emit::Spectrum:
      return "spectrum";
    case Emit::PseudoDiagnostics:
      return "pseudo_diagnostics";
  }
  return "?";
}

Emit parse_emit(const std::string& text) {
  for (Emit e : {Emit::Trajectories, Emit::Report, Emit::Spectrum, Emit::PseudoDiagnostics}) {
    if (text == to_string(e)) return e;
  }
  throw std::invalid_argument("unknown emit entry '" + text +
                              "' (expected trajectories|report|spectrum|pseudo_diagnostics)");
}

void RunConfig::validate() const {
  try {
    params.validate();
    modulation.validate();
    if (evolve.frames.empty()) throw std::invalid_argument("evolve.frames must not be empty");
    if (evolve.n < 1) throw std::invalid_argument("evolve.n must be >= 1");
    if (evolve.t_end < 0.0 || evolve.step < 0.0) {
      throw std::invalid_argument("evolve.t_end and evolve.step must be >= 0");
    }
    if (evolve.mode == EvolveMode::Static) {
      for (Frame f : evolve.frames) {
        if (f == Frame::Lab) throw std::invalid_argument("static evolution has no lab frame");
      }
    }
    if (spectrum.n_max < 1) throw std::invalid_argument("spectrum.n_max must be >= 1");
    if (pseudo.boson_levels < 4) throw std::invalid_argument("pseudo.boson_levels must be >= 4");
    if (std::abs(pseudo.alpha) > kMaxAlpha) throw std::invalid_argument("pseudo.alpha must satisfy |alpha| <= 2");
    if (pseudo.count < 1) throw std::invalid_argument("pseudo.count must be >= 1");
    if (pseudo.quasi_basis_trials < 0) throw std::invalid_argument("pseudo.quasi_basis_trials must be >= 0");
    for (std::size_t i = 0; i < sweep.size(); ++i) {
      if (!(sweep[i] > 1.0) || (i > 0 && !(sweep[i] > sweep[i - 1]))) {
        throw std::invalid_argument("experiment.sweep must be strictly increasing and > 1");
      }
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::logic_error& e) {
    throw ConfigError(e.what());
  }
}

bool operator==(const RunConfig& a, const RunConfig& b) { return to_json(a) == to_json(b); }

json complex_to_json(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

json to_json(const RunConfig& cfg) {
  json emit = json::array();
  for (Emit e : cfg.emit) emit.push_back(to_string(e));
  const ExperimentConfig& ex = cfg.experiment;
  json sweep = json::array();
  for (double r : cfg.sweep) sweep.push_back(r);
  return json{
      {"params",
       {{"omega0", cfg.params.omega0},
        {"omega", cfg.params.omega},
        {"coupling", complex_to_json(cfg.params.coupling)}}},
      {"modulation",
       {{"target", to_string(cfg.modulation.target)},
        {"beta", complex_to_json(cfg.modulation.beta)},
        {"big_omega", cfg.modulation.big_omega}}},
      {"experiment",
       {{"target", to_string(ex.target)},
        {"n", ex.n},
        {"omega_ratio", ex.omega_ratio},
        {"duration_rabi_units", ex.duration_rabi_units},
        {"window_periods", ex.window_periods},
        {"step_per_period", ex.step_per_period},
        {"condition", to_string(ex.condition)},
        {"beta_override", ex.beta_override ? complex_to_json(*ex.beta_override) : json(nullptr)},
        {"root_guess", complex_to_json(ex.root_guess)},
        {"allow_off_resonance", ex.allow_off_resonance},
        {"sweep", sweep}}},
      {"evolve",
       {{"mode", to_string(cfg.evolve.mode)},
        {"frames", frames_to_json(cfg.evolve.frames)},
        {"n", cfg.evolve.n},
        {"c0", complex_to_json(cfg.evolve.c0)},
        {"d0", complex_to_json(cfg.evolve.d0)},
        {"t_end", cfg.evolve.t_end},
        {"step", cfg.evolve.step}}},
      {"spectrum", {{"n_max", cfg.spectrum.n_max}}},
      {"pseudo",
       {{"boson_levels", cfg.pseudo.boson_levels},
        {"alpha", cfg.pseudo.alpha},
        {"epsilon", complex_to_json(cfg.pseudo.params.coupling)},
        {"count", cfg.pseudo.count},
        {"quasi_basis_trials", cfg.pseudo.quasi_basis_trials},
        {"seed", cfg.pseudo.seed}}},
      {"output_dir", cfg.output_dir.string()},
      {"emit", emit},
  };
}

RunConfig run_config_from_json(const json& doc) {
  RunConfig cfg;
  Section root(doc, "config");

  with_section(root, "params", [&](Section& s) {
    s.number("omega0", cfg.params.omega0);
    s.number("omega", cfg.params.omega);
    s.complex("coupling", cfg.params.coupling);
  });
  with_section(root, "modulation", [&](Section& s) {
    s.enumerated("target", cfg.modulation.target, parse_modulation_target);
    s.complex("beta", cfg.modulation.beta);
    s.number("big_omega", cfg.modulation.big_omega);
  });
  ExperimentConfig& ex = cfg.experiment;
  with_section(root, "experiment", [&](Section& s) {
    s.enumerated("target", ex.target, parse_modulation_target);
    s.integer("n", ex.n);
    s.number("omega_ratio", ex.omega_ratio);
    s.number("duration_rabi_units", ex.duration_rabi_units);
    s.integer("window_periods", ex.window_periods);
    s.integer("step_per_period", ex.step_per_period);
    s.enumerated("condition", ex.condition, parse_bessel_condition);
    if (const json* v = s.find("beta_override")) {
      if (v->is_null()) {
        ex.beta_override.reset();
      } else {
        ex.beta_override = Section::read_complex(*v, s.where("beta_override"));
      }
    }
    s.complex("root_guess", ex.root_guess);
    s.boolean("allow_off_resonance", ex.allow_off_resonance);
    if (const json* v = s.find("sweep")) {
      if (!v->is_array()) throw ConfigError(s.where("sweep") + ": expected an array of ratios");
      cfg.sweep.clear();
      for (const json& r : *v) {
        if (!r.is_number()) throw ConfigError(s.where("sweep") + ": expected numbers");
        cfg.sweep.push_back(r.get<double>());
      }
    }
  });
  with_section(root, "evolve", [&](Section& s) {
    s.enumerated("mode", cfg.evolve.mode, parse_evolve_mode);
    if (const json* v = s.find("frames")) {
      if (!v->is_array()) throw ConfigError(s.where("frames") + ": expected an array");
      cfg.evolve.frames.clear();
      for (const json& f : *v) {
        if (!f.is_string()) throw ConfigError(s.where("frames") + ": expected frame names");
        try {
          cfg.evolve.frames.push_back(parse_frame(f.get<std::string>()));
        } catch (const std::invalid_argument& e) {
          throw ConfigError(s.where("frames") + ": " + e.what());
        }
      }
    }
    s.integer("n", cfg.evolve.n);
    s.complex("c0", cfg.evolve.c0);
    s.complex("d0", cfg.evolve.d0);
    s.number("t_end", cfg.evolve.t_end);
    s.number("step", cfg.evolve.step);
  });
  with_section(root, "spectrum", [&](Section& s) { s.integer("n_max", cfg.spectrum.n_max); });
  with_section(root, "pseudo", [&](Section& s) {
    s.integer("boson_levels", cfg.pseudo.boson_levels);
    s.number("alpha", cfg.pseudo.alpha);
    s.complex("epsilon", cfg.pseudo.params.coupling);
    s.integer("count", cfg.pseudo.count);
    s.integer("quasi_basis_trials", cfg.pseudo.quasi_basis_trials);
    s.unsigned_integer("seed", cfg.pseudo.seed);
  });
  if (const json* v = root.find("output_dir")) {
    if (!v->is_string()) throw ConfigError("config.output_dir: expected a string");
    cfg.output_dir = v->get<std::string>();
  }
  if (const json* v = root.find("emit")) {
    if (!v->is_array()) throw ConfigError("config.emit: expected an array");
    cfg.emit.clear();
    for (const json& e : *v) {
      if (!e.is_string()) throw ConfigError("config.emit: expected strings");
      try {
        cfg.emit.insert(parse_emit(e.get<std::string>()));
      } catch (const std::invalid_argument& err) {
        throw ConfigError(std::string("config.emit: ") + err.what());
      }
    }
  }
  root.finish();

  // The experiment and pseudo sections share the static frequencies.
  ex.params = cfg.params;
  cfg.pseudo.params.omega0 = cfg.params.omega0;
  cfg.pseudo.params.omega = cfg.params.omega;
  cfg.validate();
  return cfg;
}

RunConfig parse_run_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return run_config_from_json(doc);
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_run_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::vector<Trajectory> run_evolve(const RunConfig& cfg) {
  cfg.validate();
  const EvolveConfig& ev = cfg.evolve;
  const JcParams& params = cfg.params;
  const ModulationSpec& mod = cfg.modulation;
  const double kappa = std::abs(params.coupling) * std::sqrt(static_cast<double>(ev.n));
  if (ev.t_end == 0.0 && kappa == 0.0) {
    throw ConfigError("evolve.t_end must be set when the coupling is zero");
  }
  const double t_end = ev.t_end > 0.0 ? ev.t_end : 2.0 * (2.0 * std::numbers::pi / kappa);
  double step = ev.step;
  if (step == 0.0) {
    step = kappa > 0.0 ? default_step(params, mod, ev.n) : 2.0 * std::numbers::pi / mod.big_omega / 400.0;
  }

  std::vector<Trajectory> out;
  for (Frame frame : ev.frames) {
    const AmplitudeState start{ev.n, ev.c0, ev.d0, frame};
    RhsFn rhs;
    if (ev.mode == EvolveMode::Static) {
      rhs = [&](const AmplitudeState& s, double) { return rhs_static(params, s); };
    } else if (frame == Frame::Lab) {
      rhs = [&](const AmplitudeState& s, double t) { return rhs_lab(params, mod, s, t); };
    } else if (frame == Frame::Interaction) {
      rhs = [&](const AmplitudeState& s, double t) { return rhs_interaction(params, mod, s, t); };
    } else {
      rhs = [&](const AmplitudeState& s, double t) { return rhs_gauged(params, mod, s, t); };
    }
    out.push_back(integrate(rhs, start, 0.0, t_end, step));
  }
  return out;
}

json report_to_json(const ExperimentConfig& cfg, const ComparisonReport& report,
                    const std::vector<SweepPoint>& sweep) {
  json sweep_json = json::array();
  for (const SweepPoint& p : sweep) sweep_json.push_back({{"omega_ratio", p.ratio}, {"max_rel_err", p.max_rel_err}});
  return json{
      {"generated_by", kGeneratedBy},
      {"target", to_string(cfg.target)},
      {"condition", to_string(cfg.condition)},
      {"n", cfg.n},
      {"omega_ratio", cfg.omega_ratio},
      {"big_omega", cfg.big_omega()},
      {"beta", complex_to_json(report.beta_used)},
      {"reference_coupling", complex_to_json(report.reference_coupling)},
      {"max_rel_err", report.max_rel_err},
      {"rms_err", report.rms_err},
      {"samples", report.times.size()},
      {"warnings", report.warnings},
      {"sweep", sweep_json},
  };
}

std::string comparison_csv(const ComparisonReport& report) {
  std::string out = "t,re_c_avg,im_c_avg,re_d_avg,im_d_avg,re_c_ref,im_c_ref,re_d_ref,im_d_ref\n";
  for (std::size_t i = 0; i < report.times.size(); ++i) {
    const auto& [c, d] = report.driven_envelope[i];
    const auto& [cr, dr] = report.static_reference[i];
    for (double x : {report.times[i], c.real(), c.imag(), d.real(), d.imag(), cr.real(), cr.imag(),
                     dr.real(), dr.imag()}) {
      out += format_g17(x);
      out += ',';
    }
    out.back() = '\n';
  }
  return out;
}

std::string sweep_csv(const std::vector<SweepPoint>& sweep) {
  std::string out = "omega_ratio,max_rel_err\n";
  for (const SweepPoint& p : sweep) out += format_g17(p.ratio) + "," + format_g17(p.max_rel_err) + "\n";
  return out;
}

json spectrum_to_json(const JcParams& params, const SpectrumConfig& cfg) {
  params.validate();
  const bool imaginary = params.coupling.real() == 0.0 && params.coupling.imag() != 0.0;
  json blocks = json::array();
  for (int n = 1; n <= cfg.n_max; ++n) {
    json block{{"n", n}};
    try {
      const DressedSpectrum sp = dressed_spectrum(params, n);
      block["delta"] = sp.delta;
      block["big_delta"] = complex_to_json(sp.big_delta);
      block["e_plus"] = complex_to_json(sp.e_plus);
      block["e_minus"] = complex_to_json(sp.e_minus);
    } catch (const DegenerateBlockError& e) {
      block["degenerate"] = e.what();
    }
    if (imaginary) {
      const PtClassification pt = classify_pt_phase(params, n);
      block["pt_phase"] = to_string(pt.phase);
      block["discriminant"] = pt.discriminant;
    }
    blocks.push_back(block);
  }
  return json{{"generated_by", kGeneratedBy},
              {"omega0", params.omega0},
              {"omega", params.omega},
              {"coupling", complex_to_json(params.coupling)},
              {"ground_state_energy", ground_state_energy(params)},
              {"blocks", blocks}};
}

json pseudo_to_json(const PseudoConfig& cfg, const PseudoDiagnostics& diag) {
  json labels = json::array();
  for (const auto& [n, k] : diag.labels) labels.push_back({n, k});
  return json{
      {"generated_by", kGeneratedBy},
      {"alpha", diag.alpha},
      {"boson_levels", diag.boson_levels},
      {"epsilon", complex_to_json(cfg.params.coupling)},
      {"count", cfg.count},
      {"energies", diag.energies},
      {"labels", labels},
      {"gram_max_offdiag", diag.gram_max_offdiag},
      {"phi_overlap_max", diag.phi_overlap_max},
      {"eigen_residual_max", diag.eigen_residual_max},
      {"adjoint_eigen_residual_max", diag.adjoint_eigen_residual_max},
      {"metric_residuals",
       {{"phi_vs_s2_psi", diag.metric.phi_vs_s2_psi},
        {"psi_vs_sinv2_phi", diag.metric.psi_vs_sinv2_phi},
        {"resolution", diag.metric.resolution_residual},
        {"dual_resolution", diag.metric.dual_resolution_residual}}},
      {"quasi_basis_max", diag.quasi_basis_max},
      {"t_alpha_residual", diag.t_alpha_residual ? json(*diag.t_alpha_residual) : json(nullptr)},
      {"algebra",
       {{"ccr", diag.algebra.ccr},
        {"car", diag.algebra.car},
        {"ccr_preservation", diag.algebra.ccr_preservation},
        {"car_preservation", diag.algebra.car_preservation}}},
      {"convention_match",
       diag.convention.match ? json(to_string(*diag.convention.match)) : json(nullptr)},
      {"convention_residuals",
       {{"n+k+1", diag.convention.shifted_residual}, {"n+k", diag.convention.consistent_residual}}},
      {"condition_estimate", diag.condition_estimate},
      {"similarity_inverse_residual", diag.similarity_inverse_residual},
      {"non_hermiticity", diag.non_hermiticity},
      {"degenerate", diag.degenerate},
      {"warnings", diag.warnings},
  };
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

}  // namespace pmjc

#include "vortexemf/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "vortexemf/errors.hpp"
#include "vortexemf/field.hpp"
#include "vortexemf/manybody.hpp"
#include "vortexemf/manybody_cases.hpp"
#include "vortexemf/topology.hpp"

namespace vemf::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

int exit_code_for(const std::exception& e) noexcept {
  if (dynamic_cast<const ParseError*>(&e) != nullptr) return kParseError;
  if (dynamic_cast<const ValidationError*>(&e) != nullptr) return kValidationError;
  return kComputationError;
}

// ---------------------------------------------------------------------------
// Artifacts

namespace {

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

void finish_output(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string short_fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

void write_columns(const fs::path& path, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& rows) {
  std::ofstream out = open_output(path);
  out << '#';
  for (const auto& h : header) out << ' ' << h;
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? " " : "") << fmt(row[k]);
    out << '\n';
  }
  finish_output(out, path);
}

void emit_plot_data(const NernstResult& result, const fs::path& path) {
  std::vector<std::vector<double>> rows;
  if (!result.realizations.empty()) {
    const NernstRealization& r = result.realizations.front();
    for (std::size_t k = 0; k < r.emf.size(); ++k) rows.push_back({static_cast<double>(k) * r.dt, r.emf[k]});
  }
  write_columns(path, {"t", "emf"}, rows);
}

void emit_plot_data(const std::vector<SweepPoint>& sweep, const fs::path& path) {
  std::vector<std::vector<double>> rows;
  for (const auto& p : sweep) rows.push_back({p.delta_n, p.e_y_mean, p.e_y_stderr, p.e_y_predicted});
  write_columns(path, {"delta_n", "e_y_mean", "e_y_stderr", "e_y_predicted"}, rows);
}

void emit_plot_data(const std::vector<FaradayTerms>& samples, const fs::path& path) {
  std::vector<std::vector<double>> rows;
  for (const auto& s : samples) rows.push_back({s.induction, s.lorentz});
  write_columns(path, {"induction", "lorentz"}, rows);
}

// ---------------------------------------------------------------------------
// Scenario assembly

namespace {

struct Common {
  std::string command;
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  fs::path out;
  UnitMode units = UnitMode::natural;
  fs::path base;  // directory of the config file, for relative input paths
};

fs::path resolve(const Common& c, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : c.base / path;
}

template <class T>
T read_file(const fs::path& path, T (*reader)(std::istream&)) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return reader(in);
}

int to_winding(double w) {
  if (w != std::round(w) || std::abs(w) > 1e6) {
    throw ValidationError("winding " + short_fmt(w) + " is not an integer");
  }
  return static_cast<int>(w);
}

const std::set<std::string, std::less<>> kGeometryKeys{"lx", "ly", "cores", "config_file", "loop", "loop_file"};

VortexConfig config_from(const ConfigSection& s, const Common& c) {
  if (const auto file = s.text("config_file")) {
    for (const char* k : {"lx", "ly", "cores"}) {
      if (s.has(k)) throw ValidationError(std::string("'") + k + "' conflicts with 'config_file'");
    }
    return read_file(resolve(c, *file), &read_vortex_config);
  }
  const Domain domain{s.require_real("lx"), s.require_real("ly")};
  std::vector<Core> cores;
  for (const auto& t : s.tuples("cores", 3).value_or(std::vector<std::vector<double>>{})) {
    cores.push_back({{t[0], t[1]}, to_winding(t[2])});
  }
  return VortexConfig(domain, std::move(cores));
}

PolyLoop loop_from(const ConfigSection& s, const Common& c) {
  if (const auto file = s.text("loop_file")) {
    if (s.has("loop")) throw ValidationError("'loop' conflicts with 'loop_file'");
    return read_file(resolve(c, *file), &read_loop);
  }
  const auto pts = s.tuples("loop", 2);
  if (!pts) throw ParseError(s.name() + ": one of 'loop' or 'loop_file' is required");
  std::vector<Vec2> v;
  for (const auto& p : *pts) v.push_back({p[0], p[1]});
  return PolyLoop(std::move(v));
}

Vec2 vec_or(const ConfigSection& s, std::string_view key, Vec2 fallback) {
  const auto v = s.reals(key);
  if (!v) return fallback;
  if (v->size() != 2) throw ParseError(s.name() + ": '" + std::string(key) + "' needs two numbers");
  return {(*v)[0], (*v)[1]};
}

double positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) throw ValidationError(std::string(what) + " must be positive");
  return x;
}

Json vec_json(Vec2 v) { return Json::array({v.x, v.y}); }

Json header(const Common& c) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = c.command;
  j["units"] = std::string(to_string(c.units));
  return j;
}

using Task = std::function<RunOutcome()>;

// --- winding / quantize -----------------------------------------------------

Task plan_winding(const ConfigSection& s, const Common& c, bool quantize) {
  auto keys = kGeometryKeys;
  keys.insert("tol");
  s.allow_only(keys);
  const VortexConfig config = config_from(s, c);
  const PolyLoop loop = loop_from(s, c);
  const double tol = positive(s.real_or("tol", 1e-10), "tol");
  return [=] {
    RunOutcome o;
    Json j = header(c);
    if (!quantize) {
      const QuantizationReport r = verify_winding(config, loop, tol);
      j["winding"] = r.census_quantum;
      j["quadrature_winding"] = r.numeric_integral / (2.0 * std::numbers::pi);
      j["deviation"] = r.deviation / (2.0 * std::numbers::pi);
      j["consistent"] = r.consistent();
      o.summary_line = "winding: W = " + std::to_string(r.census_quantum) + " (quadrature " +
                       short_fmt(r.numeric_integral / (2.0 * std::numbers::pi)) + ")";
    } else {
      const QuantizationReport r = verify_quantization(config, loop, tol);
      j["enclosed_winding"] = -r.census_quantum;
      j["flux"] = r.numeric_integral;
      j["flux_quanta"] = r.nearest_quantum;
      j["census_quanta"] = r.census_quantum;
      j["deviation"] = r.deviation;
      j["consistent"] = r.consistent();
      o.summary_line = "quantize: closed integral of A = " + short_fmt(r.numeric_integral) + " = " +
                       std::to_string(r.nearest_quantum) + " pi (census " + std::to_string(r.census_quantum) + ")";
    }
    j["cores"] = config.size();
    o.summary = std::move(j);
    return o;
  };
}

// --- manybody-check ---------------------------------------------------------

Task plan_manybody(const ConfigSection& s, const ConfigSection* mixture, const Common& c) {
  s.allow_only({"case", "sizes", "exclusion"});
  const std::string which = s.text_or("case", "both");
  if (which != "both" && which != "plane-wave" && which != "vortex-phase") {
    throw ValidationError("case must be plane-wave, vortex-phase or both (got '" + which + "')");
  }
  std::vector<std::size_t> sizes;
  for (double n : s.reals("sizes").value_or(std::vector<double>{16, 31, 61})) {
    if (n != std::round(n) || n < 3) throw ValidationError("grid sizes must be integers >= 3");
    if (n > static_cast<double>(kMaxGridOneElectron)) {
      throw ScenarioTooLarge("grid size " + short_fmt(n) + " exceeds the one-electron cap " +
                             std::to_string(kMaxGridOneElectron));
    }
    sizes.push_back(static_cast<std::size_t>(n));
  }
  if (sizes.size() < 2) throw ValidationError("a convergence study needs at least two grid sizes");
  const double exclusion = s.real_or("exclusion", 0.25);
  if (!(exclusion >= 0.0 && exclusion < 0.5)) throw ValidationError("exclusion must lie in [0, 0.5)");

  struct MixturePlan {
    std::vector<Vec2> k;
    std::vector<double> p;
    Vec2 probe;
    std::size_t n;
  };
  std::optional<MixturePlan> mix;
  if (mixture != nullptr) {
    mixture->allow_only({"probabilities", "wave_vectors", "probe", "grid"});
    MixturePlan m;
    const auto p = mixture->reals("probabilities");
    const auto k = mixture->tuples("wave_vectors", 2);
    if (!p || !k) throw ParseError("[mixture] needs 'probabilities' and 'wave_vectors'");
    if (p->size() != k->size()) throw ValidationError("[mixture] needs one probability per wave vector");
    m.p = *p;
    for (const auto& v : *k) m.k.push_back({v[0], v[1]});
    m.probe = vec_or(*mixture, "probe", {0.5, 0.5});
    const long long n = mixture->integer_or("grid", 31);
    if (n < 3 || n > static_cast<long long>(kMaxGridOneElectron)) {
      throw ScenarioTooLarge("[mixture] grid must lie in [3, " + std::to_string(kMaxGridOneElectron) + "]");
    }
    m.n = static_cast<std::size_t>(n);
    if (!(m.probe.x > 0.0 && m.probe.x < 1.0 && m.probe.y > 0.0 && m.probe.y < 1.0)) {
      throw ValidationError("[mixture] probe must lie inside the unit square");
    }
    // The analytic ensemble carries the probability invariants.
    std::vector<MixtureMember> analytic;
    for (std::size_t j = 0; j < m.k.size(); ++j) analytic.push_back({VectorField2D::constant(m.k[j]), m.p[j], {}});
    MixtureEnsemble check(std::move(analytic));
    mix = std::move(m);
  }

  return [=] {
    RunOutcome o;
    Json j = header(c);
    Json cases = Json::object();
    std::optional<double> vortex_c;
    bool second_order = true;
    auto study = [&](ReferenceCase rc, const char* name) {
      const ConvergenceStudy st = connection_convergence(rc, sizes, exclusion);
      Json levels = Json::array();
      for (const auto& l : st.levels) levels.push_back({{"n", l.n}, {"h", l.h}, {"max_error", l.max_error}});
      const auto ratios = st.ratios();
      bool ok = true;
      for (double r : ratios) ok = ok && r >= 3.5 && r <= 4.5;
      second_order = second_order && ok;
      cases[name] = {{"levels", levels}, {"ratios", ratios}, {"error_constant", st.error_constant()},
                     {"second_order", ok}};
      if (rc == ReferenceCase::vortex_phase) vortex_c = st.error_constant();
    };
    if (which != "vortex-phase") study(ReferenceCase::plane_wave, "plane_wave");
    if (which != "plane-wave") study(ReferenceCase::vortex_phase, "vortex_phase");
    j["cases"] = cases;

    // Removing the exact vortex phase must leave a currentless state.
    const std::size_t n = sizes.back();
    const Grid grid{n, n, 1.0 / static_cast<double>(n - 1), {0.0, 0.0}};
    const GridWaveFunction psi = vortex_phase_state(grid, kReferenceCore, kReferenceVortexSigma);
    const auto phase = phase_samples(grid, [](Vec2 p) {
      return 2.0 * std::atan2(p.y - kReferenceCore.y, p.x - kReferenceCore.x);
    });
    const FactorizationReport f = factorization_check(psi, phase);
    Json fj{{"n", n}, {"h", grid.h}, {"residual", f.residual}, {"evaluated_points", f.evaluated_points},
            {"masked_points", f.masked_points}};
    if (vortex_c) {
      fj["bound"] = *vortex_c * grid.h * grid.h;
      fj["within_bound"] = f.residual < *vortex_c * grid.h * grid.h;
    }
    j["factorization"] = fj;

    if (mix) {
      const Grid g{mix->n, mix->n, 1.0 / static_cast<double>(mix->n - 1), {0.0, 0.0}};
      std::vector<MixtureMember> members;
      Vec2 expected{};
      for (std::size_t m = 0; m < mix->k.size(); ++m) {
        const auto state = plane_wave_state(g, mix->k[m], kReferencePlaneWaveSigma, {0.5, 0.5});
        members.push_back(MixtureMember::from_state(state, mix->p[m]));
        expected = expected + mix->p[m] * mix->k[m];
      }
      const Vec2 got = mixture_connection(MixtureEnsemble(std::move(members)))(mix->probe);
      j["mixture"] = {{"probe", vec_json(mix->probe)}, {"connection", vec_json(got)},
                      {"analytic", vec_json(expected)}, {"deviation", norm(got - expected)}};
    }
    j["second_order"] = second_order;
    o.summary_line = std::string("manybody-check: ") + (second_order ? "second-order convergence" : "CONVERGENCE OFF") +
                     ", factorization residual " + short_fmt(f.residual);
    o.summary = std::move(j);
    return o;
  };
}

// --- faraday ----------------------------------------------------------------

Task plan_faraday(const ConfigSection& s, const Common& c) {
  const auto family = parse_b_family(s.require_text("family"));
  std::set<std::string, std::less<>> keys{"family", "loop", "loop_file", "drift", "t", "dt", "levels",
                                          "tol", "samples", "t_end"};
  using F = TimeDependentB::Family;
  switch (family) {
    case F::uniform: keys.insert({"b0"}); break;
    case F::linear_x: keys.insert({"b0", "gamma"}); break;
    case F::linear_t: keys.insert({"b0", "beta"}); break;
    case F::sinusoidal: keys.insert({"amplitude", "kx", "ky", "omega", "phase"}); break;
  }
  s.allow_only(keys);
  const TimeDependentB b = [&] {
    switch (family) {
      case F::uniform: return TimeDependentB::uniform(s.real_or("b0", 1.0));
      case F::linear_x: return TimeDependentB::linear_x(s.real_or("gamma", 1.0), s.real_or("b0", 0.0));
      case F::linear_t: return TimeDependentB::linear_t(s.real_or("beta", 1.0), s.real_or("b0", 0.0));
      case F::sinusoidal:
        break;
    }
    return TimeDependentB::sinusoidal(s.real_or("amplitude", 1.0), s.real_or("kx", 1.0), s.real_or("ky", 0.0),
                                      s.real_or("omega", 1.0), s.real_or("phase", 0.0));
  }();
  const MovingLoop loop{loop_from(s, c), vec_or(s, "drift", {0.0, 0.0})};
  const double t = s.real_or("t", 0.0);
  const double dt = positive(s.real_or("dt", 0.05), "dt");
  const long long levels = s.integer_or("levels", 5);
  if (levels < 2 || levels > 20) throw ValidationError("levels must lie in [2, 20]");
  const double tol = positive(s.real_or("tol", 1e-13), "tol");
  const long long samples = s.integer_or("samples", 11);
  if (samples < 0 || samples > 100000) throw ValidationError("samples must lie in [0, 100000]");
  const double t_end = s.real_or("t_end", t + 1.0);
  if (!std::isfinite(t) || !std::isfinite(t_end) || !std::isfinite(loop.drift.x) || !std::isfinite(loop.drift.y)) {
    throw ValidationError("times and drift must be finite");
  }

  return [=] {
    RunOutcome o;
    Json j = header(c);
    const ExtrapolatedEmf lim = faraday_emf_limit(b, loop, t, dt, static_cast<int>(levels), tol);
    const FaradayTerms terms = faraday_emf_decomposed(b, loop, t);
    const double diff = std::abs(lim.value - terms.total());
    const double allowed = std::max(1e-8, lim.error_estimate);
    j["family"] = std::string(to_string(b.family()));
    j["t"] = t;
    j["flux_rule_emf"] = lim.value;
    j["extrapolation_error"] = lim.error_estimate;
    j["induction"] = terms.induction;
    j["lorentz"] = terms.lorentz;
    j["decomposed_emf"] = terms.total();
    j["difference"] = diff;
    j["agree"] = diff <= allowed;

    std::vector<FaradayTerms> trace;
    for (long long i = 0; i < samples; ++i) {
      const double ti = samples == 1 ? t : t + (t_end - t) * static_cast<double>(i) / static_cast<double>(samples - 1);
      trace.push_back(faraday_emf_decomposed(b, loop, ti));
    }
    const fs::path plot = c.out / "faraday_terms.dat";
    emit_plot_data(trace, plot);
    o.artifacts.push_back(plot);
    j["samples"] = {{"t_start", t}, {"t_end", t_end}, {"count", samples}};
    o.summary_line = "faraday: flux rule " + short_fmt(lim.value) + ", induction + Lorentz " +
                     short_fmt(terms.total()) + (diff <= allowed ? " (agree)" : " (DISAGREE)");
    o.summary = std::move(j);
    return o;
  };
}

// --- berry-emf --------------------------------------------------------------

Task plan_berry(const ConfigSection& s, const Common& c) {
  auto keys = kGeometryKeys;
  keys.insert({"drift", "t", "dt", "tol", "verify"});
  s.allow_only(keys);
  const VortexConfig config = config_from(s, c);
  const MovingLoop loop{loop_from(s, c), vec_or(s, "drift", {1.0, 0.0})};
  const double t = s.real_or("t", 0.0);
  const double dt = positive(s.real_or("dt", 0.1), "dt");
  const double tol = positive(s.real_or("tol", 1e-8), "tol");
  const bool verify = s.boolean_or("verify", true);
  const UnitSystem units = UnitSystem::from_mode(c.units);
  if (!std::isfinite(t) || !std::isfinite(loop.drift.x) || !std::isfinite(loop.drift.y)) {
    throw ValidationError("t and drift must be finite");
  }

  return [=] {
    RunOutcome o;
    Json j = header(c);
    const BerryEmf r = berry_emf_flux_rule(config, loop, t, dt, units, tol, verify);
    const double line = berry_emf_line_form(config, loop, t, dt, units, tol);
    j["emf"] = r.emf;
    j["quadrature_emf"] = r.quadrature_emf;
    j["line_form_emf"] = line;
    j["winding_change"] = r.winding_change;
    j["emf_quantum"] = std::numbers::pi * units.hbar / (units.e * dt);
    j["crossings"] = {{"merons_in", r.merons_in}, {"merons_out", r.merons_out},
                      {"antimerons_in", r.antimerons_in}, {"antimerons_out", r.antimerons_out}};
    o.summary_line = "berry-emf: E = " + short_fmt(r.emf) + " (" + std::to_string(r.winding_change) +
                     " quanta), line form " + short_fmt(line);
    o.summary = std::move(j);
    return o;
  };
}

// --- nernst -----------------------------------------------------------------

Task plan_nernst(const ConfigSection& s, const Common& c) {
  s.allow_only({"lx", "ly", "n_m", "n_a", "v0", "dt", "n_steps", "temperature_gradient", "loop_width",
                "realizations", "verify_quadrature", "quadrature_tol", "trace", "sweep", "sweep_center",
                "sweep_realizations"});
  if (!c.seed) throw ValidationError("nernst needs a seed (config 'seed' or --seed); there is no default");
  NernstScenario sc;
  sc.lx = s.real_or("lx", sc.lx);
  sc.ly = s.real_or("ly", sc.ly);
  sc.n_m = s.real_or("n_m", sc.n_m);
  sc.n_a = s.real_or("n_a", sc.n_a);
  sc.v0 = s.real_or("v0", sc.v0);
  sc.dt = s.real_or("dt", 0.0);
  const long long steps = s.integer_or("n_steps", 0);
  if (steps < 0 || steps > 100000000) throw ValidationError("n_steps must lie in [0, 1e8]");
  sc.n_steps = static_cast<int>(steps);
  sc.temperature_gradient = s.real_or("temperature_gradient", 1.0);
  sc.loop_width = s.real_or("loop_width", 0.0);
  const long long reals = s.integer_or("realizations", 200);
  if (reals < 1 || reals > 10000000) throw ValidationError("realizations must lie in [1, 1e7]");
  sc.realizations = static_cast<int>(reals);
  sc.verify_quadrature = s.boolean_or("verify_quadrature", true);
  sc.quadrature_tol = s.real_or("quadrature_tol", 1e-8);
  sc.seed = *c.seed;
  sc.units = c.units;
  sc.workers = c.workers;
  const bool trace = s.boolean_or("trace", true);
  sc.validate();
  if (!(std::abs(sc.temperature_gradient) > 0.0)) {
    throw InvalidGradient("temperature_gradient must be nonzero to form the Nernst signal");
  }

  std::vector<NernstScenario> sweep;
  std::vector<double> deltas;
  if (const auto d = s.reals("sweep")) {
    const double center = s.real_or("sweep_center", 0.5 * (sc.n_m + sc.n_a));
    const long long sweep_reals = s.integer_or("sweep_realizations", reals);
    if (sweep_reals < 1 || sweep_reals > 10000000) throw ValidationError("sweep_realizations must lie in [1, 1e7]");
    for (double delta : *d) {
      NernstScenario p = sc;
      p.n_m = center - 0.5 * delta;
      p.n_a = center + 0.5 * delta;
      p.realizations = static_cast<int>(sweep_reals);
      if (p.n_m < 0.0 || p.n_a < 0.0) {
        throw ValidationError("sweep point n_a - n_m = " + short_fmt(delta) + " needs sweep_center >= " +
                              short_fmt(0.5 * std::abs(delta)));
      }
      p.validate();
      sweep.push_back(p);
      deltas.push_back(delta);
    }
  } else if (s.has("sweep_center") || s.has("sweep_realizations")) {
    throw ValidationError("sweep_center and sweep_realizations need 'sweep'");
  }

  return [=] {
    RunOutcome o;
    const NernstResult r = run_nernst(sc);
    const NernstSignal sig = nernst_signal(r, sc);
    Json j = header(c);
    j["seed"] = sc.seed;
    j["scenario"] = {{"lx", sc.lx}, {"ly", sc.ly}, {"n_m", sc.n_m}, {"n_a", sc.n_a}, {"v0", sc.v0},
                     {"dt", sc.step()}, {"n_steps", sc.steps()}, {"loop_width", sc.width()},
                     {"temperature_gradient", sc.temperature_gradient}, {"realizations", sc.realizations},
                     {"verify_quadrature", sc.verify_quadrature}};
    j["e_y_mean"] = r.e_y_mean;
    j["e_y_stderr"] = r.e_y_stderr;
    j["e_y_predicted"] = sig.predicted_e_y;
    j["relative_stderr"] = sig.predicted_e_y != 0.0 ? r.e_y_stderr / std::abs(sig.predicted_e_y)
                                                    : std::numeric_limits<double>::quiet_NaN();
    j["deviation_in_stderr"] = (r.e_y_mean - sig.predicted_e_y) / r.e_y_stderr;
    j["e_n"] = sig.measured;
    j["e_n_predicted"] = sig.predicted;
    int m_in = 0, m_out = 0, a_in = 0, a_out = 0;
    for (const auto& x : r.realizations) {
      m_in += x.merons_in;
      m_out += x.merons_out;
      a_in += x.antimerons_in;
      a_out += x.antimerons_out;
    }
    j["crossings"] = {{"merons_in", m_in}, {"merons_out", m_out}, {"antimerons_in", a_in}, {"antimerons_out", a_out}};
    j["retries"] = r.retries;

    Json artifacts = Json::array();
    if (trace) {
      const fs::path csv = c.out / "nernst_trace.csv";
      std::ofstream out = open_output(csv);
      write_nernst_trace_csv(out, r);
      finish_output(out, csv);
      o.artifacts.push_back(csv);
    }
    const fs::path plot = c.out / "nernst_emf_trace.dat";
    emit_plot_data(r, plot);
    o.artifacts.push_back(plot);

    if (!sweep.empty()) {
      std::vector<SweepPoint> points;
      Json sj = Json::array();
      for (std::size_t k = 0; k < sweep.size(); ++k) {
        const NernstResult q = run_nernst(sweep[k]);
        const NernstSignal qs = nernst_signal(q, sweep[k]);
        points.push_back({deltas[k], q.e_y_mean, q.e_y_stderr, qs.predicted_e_y});
        sj.push_back({{"delta_n", deltas[k]}, {"n_m", sweep[k].n_m}, {"n_a", sweep[k].n_a},
                      {"e_y_mean", q.e_y_mean}, {"e_y_stderr", q.e_y_stderr}, {"e_y_predicted", qs.predicted_e_y}});
      }
      const fs::path sp = c.out / "nernst_sweep.dat";
      emit_plot_data(points, sp);
      o.artifacts.push_back(sp);
      j["sweep"] = sj;
    }
    for (const auto& a : o.artifacts) artifacts.push_back(a.filename().string());
    j["artifacts"] = artifacts;
    o.summary_line = "nernst: E_y = " + short_fmt(r.e_y_mean) + " +- " + short_fmt(r.e_y_stderr) + " (predicted " +
                     short_fmt(sig.predicted_e_y) + ", " + std::to_string(sc.realizations) + " realizations)";
    o.summary = std::move(j);
    return o;
  };
}

}  // namespace

RunOutcome run_scenario(const ConfigFile& config, std::string_view command, const Overrides& overrides) {
  const ConfigSection& g = config.global();
  g.allow_only({"command", "seed", "units", "out", "workers"});
  Common c;
  const auto file_command = g.text("command");
  if (!command.empty() && file_command && *file_command != command) {
    throw ValidationError("config is for command '" + *file_command + "' but '" + std::string(command) +
                          "' was requested");
  }
  c.command = !command.empty() ? std::string(command) : file_command.value_or("");
  if (c.command.empty()) throw ParseError(config.source() + ": missing 'command'");
  if (std::find(std::begin(kCommands), std::end(kCommands), c.command) == std::end(kCommands)) {
    throw ValidationError("unknown command '" + c.command + "'");
  }
  c.seed = overrides.seed ? overrides.seed : g.unsigned_integer("seed");
  c.units = overrides.units ? *overrides.units : parse_unit_mode(g.text_or("units", "natural"));
  const long long workers = overrides.workers ? static_cast<long long>(*overrides.workers) : g.integer_or("workers", 1);
  if (workers < 1 || workers > 1024) throw ValidationError("workers must lie in [1, 1024]");
  c.workers = static_cast<unsigned>(workers);
  c.base = fs::path(config.source()).parent_path();
  c.out = overrides.out ? fs::path(*overrides.out) : fs::path(g.text_or("out", "."));

  if (c.command == "manybody-check") {
    config.allow_sections({"manybody-check", "mixture"});
  } else {
    config.allow_sections({std::string_view(c.command)});
  }
  static const ConfigSection empty;
  const ConfigSection* sec = config.section(c.command);
  const ConfigSection& s = sec != nullptr ? *sec : empty;

  Task task;
  if (c.command == "winding") task = plan_winding(s, c, false);
  else if (c.command == "quantize") task = plan_winding(s, c, true);
  else if (c.command == "manybody-check") task = plan_manybody(s, config.section("mixture"), c);
  else if (c.command == "faraday") task = plan_faraday(s, c);
  else if (c.command == "berry-emf") task = plan_berry(s, c);
  else task = plan_nernst(s, c);

  std::error_code ec;
  fs::create_directories(c.out, ec);
  if (ec || !fs::is_directory(c.out)) throw IoError("cannot create output directory '" + c.out.string() + "'");

  RunOutcome o = task();
  o.command = c.command;
  const fs::path summary = c.out / (c.command + "_summary.json");
  std::ofstream out = open_output(summary);
  out << o.summary.dump(2) << '\n';
  finish_output(out, summary);
  o.artifacts.insert(o.artifacts.begin(), summary);
  return o;
}

// ---------------------------------------------------------------------------
// Command line

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Berry-connection EMF simulations from spin-vortex configurations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "vortexemf 1.0");

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> out_dir;
  std::string units;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "master seed (overrides the config)");
    sub->add_option("--workers", workers, "worker threads for realizations (default 1)");
    sub->add_option("--out", out_dir, "output directory (overrides the config)");
    sub->add_option("--units", units, "unit system")->check(CLI::IsMember({"natural", "si"}));
  };
  for (std::string_view name : kCommands) {
    CLI::App* sub = app.add_subcommand(std::string(name), "run a " + std::string(name) + " scenario");
    sub->add_option("--config", config_path, "scenario file")->required();
    add_common(sub);
  }
  CLI::App* run = app.add_subcommand("run", "run the command named inside the config");
  run->add_option("config,--config", config_path, "scenario file")->required();
  add_common(run);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kParseError;
  }

  try {
    Overrides o;
    o.seed = seed;
    o.workers = workers;
    o.out = out_dir;
    if (!units.empty()) o.units = parse_unit_mode(units);
    const std::string command = run->parsed() ? "" : app.get_subcommands().front()->get_name();
    const ConfigFile config = ConfigFile::load(config_path);
    const RunOutcome result = run_scenario(config, command, o);
    out << result.summary_line << '\n';
    return kOk;
  } catch (const std::exception& e) {
    const int code = exit_code_for(e);
    const char* kind = code == kParseError ? "parse error" : code == kValidationError ? "validation error" : "error";
    err << "vortexemf: " << kind << ": " << e.what() << '\n';
    return code;
  }
}

}  // namespace vemf::cli

#include "runner.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "glauber/csv.hpp"
#include "glauber/path_process.hpp"
#include "glauber/random.hpp"
#include "glauber/transition_kernel.hpp"

namespace glauber::cli {

using nlohmann::ordered_json;

namespace {

enum class Fault { none, survival, intensity };

Fault parse_fault(const std::optional<std::string>& name) {
  if (!name) return Fault::none;
  if (*name == "survival") return Fault::survival;
  if (*name == "intensity") return Fault::intensity;
  throw ConfigError("--fault-inject", "unknown fault '" + *name + "' (survival, intensity)");
}

/// Everything a single run needs after overrides are applied.
struct Context {
  const ExperimentConfig& config;
  RngStream master;
  std::size_t n;
  bool replicas_overridden;
  Fault fault;
  std::filesystem::path out;

  RngStream stream(const std::string& label) const { return master.substream(label); }

  CheckOptions options(Fault target) const {
    CheckOptions o;
    o.n = n;
    if (fault == target) o.tamper = kFaultFactor;
    return o;
  }

  Configuration initial(const InitialSpec& spec, const std::string& label) const {
    if (spec.points) return Configuration::from_points(*spec.points);
    RngStream rng = stream("initial/" + label);
    return sample_poisson(config.measure, rng);
  }

  const NamedFunction& function(const std::string& name, const std::string& where) const {
    for (const auto& f : config.functions) {
      if (f.name == name) return f;
    }
    throw ConfigError(where, name.empty() ? "no suitable function in the battery"
                                          : "unknown function '" + name + "'");
  }
};

using Reports = std::vector<TestReport>;

void append(Reports& out, Reports more) {
  for (auto& r : more) out.push_back(std::move(r));
}

// --- test subcommands -------------------------------------------------------

Reports run_mecke(const Context& cx) {
  if (cx.config.mecke.cases.empty()) throw ConfigError("/tests/mecke/cases", "no Mecke cases");
  const RngStream rng = cx.stream("test/mecke");
  Reports out;
  const auto& cases = cx.config.mecke.cases;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    auto rs = mecke_check(cx.config.measure, cases[i], rng.substream(i), cx.options(Fault::intensity));
    for (auto& r : rs) r.name += "/" + std::to_string(i);
    append(out, std::move(rs));
  }
  return out;
}

Reports run_laplace(const Context& cx) {
  auto out = laplace_check(cx.config.measure, cx.config.functions, cx.stream("test/laplace"),
                           cx.options(Fault::intensity));
  if (out.empty()) throw ConfigError("/functions", "no nonpositive step function for laplace");
  return out;
}

Reports run_chapman(const Context& cx) {
  const auto& s = cx.config.chapman;
  return chapman_check(cx.initial(s.initial, "chapman"), s.t, s.s, cx.config.measure,
                       cx.config.functions, cx.stream("test/chapman"), cx.options(Fault::survival));
}

Reports run_count_law(const Context& cx) {
  const auto& s = cx.config.count_law;
  return kernel_law_check(cx.initial(s.initial, "count-law"), KernelParams(s.t, cx.config.measure),
                          cx.config.functions, cx.stream("test/count-law"),
                          cx.options(Fault::survival));
}

std::vector<Configuration> poisson_samples(const Context& cx, const std::string& label) {
  return sample_poisson_batch(cx.config.measure, cx.stream(label), cx.n);
}

void require_cylinders(const Context& cx) {
  if (cx.config.cylinders.empty()) throw ConfigError("/cylinders", "no cylinder functions");
}

Reports run_dirichlet(const Context& cx) {
  require_cylinders(cx);
  const auto samples = poisson_samples(cx, "test/dirichlet/samples");
  return dirichlet_check(cx.config.cylinders, samples, cx.config.measure,
                         cx.options(Fault::intensity));
}

Reports run_generator(const Context& cx) {
  require_cylinders(cx);
  const Configuration gamma = cx.initial(cx.config.generator.initial, "generator");
  Reports out;
  for (const auto& F : cx.config.cylinders) {
    if (!F.F.is_affine()) continue;
    append(out, generator_fd_check(F, gamma, cx.config.measure, cx.config.generator.h,
                                   cx.options(Fault::intensity)));
  }
  if (out.empty()) throw ConfigError("/cylinders", "no affine cylinder function for generator");
  return out;
}

Reports run_gap(const Context& cx) {
  require_cylinders(cx);
  const auto samples = poisson_samples(cx, "test/gap/samples");
  Reports out;
  for (const auto& F : cx.config.cylinders) {
    out.push_back(spectral_gap_check(F, samples, cx.config.measure, cx.options(Fault::intensity)));
  }
  return out;
}

Reports run_marginal(const Context& cx) {
  const auto& s = cx.config.marginal;
  CheckOptions o = cx.options(Fault::survival);
  if (s.replicas && !cx.replicas_overridden) o.n = *s.replicas;
  Reports out = marginal_check(cx.initial(s.initial, "marginal"), s.t, cx.config.measure,
                               cx.config.functions, cx.stream("test/marginal"), o);
  out.push_back(survival_check(s.survival_horizon, cx.config.measure,
                               cx.stream("test/marginal/survival"), cx.options(Fault::survival)));
  return out;
}

Reports run_feller(const Context& cx) {
  const auto& s = cx.config.feller;
  const auto& f = cx.function(s.function, "/tests/feller/function");
  return feller_check(cx.initial(s.initial, "feller"), s.delta, f.phi, s.t, cx.config.measure,
                      cx.stream("test/feller"), cx.options(Fault::survival));
}

Reports run_ergodic(const Context& cx) {
  const auto& s = cx.config.ergodic;
  const auto& f = cx.function(s.function, "/tests/ergodic/function");
  return ergodic_check(cx.initial(s.initial, "ergodic"), cx.config.measure, f.phi, s.slope_times,
                       s.t_mc, cx.stream("test/ergodic"), cx.options(Fault::survival));
}

/// Settings checks that need no sampling, run before any test starts.
void preflight(const Context& cx, const std::string& test) {
  const auto& c = cx.config;
  if (test == "mecke" && c.mecke.cases.empty()) {
    throw ConfigError("/tests/mecke/cases", "no Mecke cases");
  }
  if ((test == "dirichlet" || test == "generator" || test == "gap") && c.cylinders.empty()) {
    throw ConfigError("/cylinders", "no cylinder functions");
  }
  if (test == "feller") cx.function(c.feller.function, "/tests/feller/function");
  if (test == "ergodic") cx.function(c.ergodic.function, "/tests/ergodic/function");
}

struct TestEntry {
  const char* name;
  Fault fault;
  Reports (*run)(const Context&);
};

const std::vector<TestEntry>& test_table() {
  static const std::vector<TestEntry> table = {
      {"mecke", Fault::intensity, run_mecke},
      {"laplace", Fault::intensity, run_laplace},
      {"chapman", Fault::survival, run_chapman},
      {"count-law", Fault::survival, run_count_law},
      {"dirichlet", Fault::intensity, run_dirichlet},
      {"generator", Fault::intensity, run_generator},
      {"gap", Fault::intensity, run_gap},
      {"marginal", Fault::survival, run_marginal},
      {"feller", Fault::survival, run_feller},
      {"ergodic", Fault::survival, run_ergodic},
  };
  return table;
}

// --- artifact subcommands ---------------------------------------------------

std::ofstream open_artifact(const Context& cx, const std::string& file) {
  std::ofstream out(cx.out / file, std::ios::binary);
  if (!out) throw ConfigError("/output", "cannot write '" + (cx.out / file).string() + "'");
  return out;
}

Reports run_sample_poisson(const Context& cx) {
  const auto samples = poisson_samples(cx, "sample-poisson");
  auto csv = open_artifact(cx, "samples.csv");
  write_samples_csv(csv, samples, cx.config.measure.window().dim());

  const double m = cx.config.measure.total_mass();
  std::vector<double> counts, sq;
  for (const auto& g : samples) {
    const double k = static_cast<double>(g.size());
    counts.push_back(k);
    sq.push_back((k - m) * (k - m));
  }
  TestReport mean = z_gate(estimate_mean(counts), m, 4.0);
  mean.name = "sample-poisson/mean-count";
  mean.identity = "E|gamma| = m(window)";
  TestReport var = z_gate(estimate_mean(sq), m, 4.0);
  var.name = "sample-poisson/variance-count";
  var.identity = "E(|gamma| - m(window))^2 = m(window)";
  for (auto* r : {&mean, &var}) r->seed = cx.stream("sample-poisson").seed();
  return {mean, var};
}

Reports run_kernel_step(const Context& cx) {
  if (cx.config.times.empty()) throw ConfigError("/times", "kernel-step needs at least one time");
  const Configuration gamma = cx.initial(cx.config.initial, "kernel-step");
  const Window& w = cx.config.measure.window();
  Reports out;
  for (std::size_t k = 0; k < cx.config.times.size(); ++k) {
    const KernelParams params(cx.config.times[k], cx.config.measure);
    const RngStream rng = cx.stream("kernel-step/" + std::to_string(k));
    std::vector<Configuration> draws(cx.n);
    for (std::size_t i = 0; i < cx.n; ++i) {
      RngStream sub = rng.substream(i);
      draws[i] = kernel_sample(gamma, params, sub);
    }
    auto csv = open_artifact(cx, "kernel_step_" + std::to_string(k) + ".csv");
    write_samples_csv(csv, draws, w.dim());

    std::vector<double> counts;
    for (const auto& d : draws) counts.push_back(static_cast<double>(count_in(d, w)));
    const double expected = params.survival() * static_cast<double>(count_in(gamma, w)) +
                            params.birth_fraction() * params.measure.total_mass();
    TestReport r = z_gate(estimate_mean(counts), expected, 4.0);
    r.name = "kernel-step/mean-count/" + std::to_string(k);
    r.identity = "E|eta| = e^{-t}|gamma| + (1-e^{-t}) m(window)";
    r.note = "t = " + format_double(params.t);
    r.seed = rng.seed();
    out.push_back(std::move(r));
  }
  return out;
}

Reports run_simulate_path(const Context& cx) {
  const Configuration gamma = cx.initial(cx.config.initial, "simulate-path");
  const double T = cx.config.horizon;
  const RngStream rng = cx.stream("simulate-path");
  const std::size_t dim = cx.config.measure.window().dim();
  std::vector<double> births(cx.n), deaths(cx.n), final_count(cx.n);
  for (std::size_t i = 0; i < cx.n; ++i) {
    RngStream sub = rng.substream(i);
    const EventLog log = simulate_path(gamma, T, cx.config.measure, sub);
    for (const auto& e : log.events()) (e.kind == EventKind::birth ? births : deaths)[i] += 1.0;
    final_count[i] = static_cast<double>(configuration_at(log, T).size());
    if (i < cx.config.simulate_path.logs) {
      auto csv = open_artifact(cx, "events_" + std::to_string(i) + ".csv");
      write_event_log_csv(csv, log, dim);
    }
  }
  const McEstimate b = estimate_mean(births), d = estimate_mean(deaths), f = estimate_mean(final_count);
  ordered_json summary;
  summary["horizon"] = T;
  summary["replicas"] = cx.n;
  summary["initial_count"] = gamma.size();
  summary["births_per_unit_time"] = b.mean / T;
  summary["deaths_per_unit_time"] = d.mean / T;
  summary["mean_final_count"] = f.mean;
  summary["logs_written"] = std::min(cx.n, cx.config.simulate_path.logs);
  auto js = open_artifact(cx, "summary.json");
  js << summary.dump(2) << '\n';

  TestReport r = z_gate(b, cx.config.measure.total_mass() * T, 4.0);
  r.name = "simulate-path/birth-count";
  r.identity = "E #births on (0,T] = m(window) T";
  r.seed = rng.seed();
  return {r};
}

std::string slug(const std::string& command) {
  std::string s = command;
  for (char& c : s) {
    if (c == ' ') c = '-';
  }
  return s;
}

ordered_json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

const char* gate_name(GateKind k) {
  switch (k) {
    case GateKind::sigma:
      return "sigma";
    case GateKind::p_value:
      return "p_value";
    case GateKind::bound:
      return "bound";
  }
  return "?";
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v = {"sample-poisson", "kernel-step", "simulate-path", "laplace"};
    for (const auto& t : test_table()) {
      if (std::string(t.name) != "laplace") v.push_back(std::string("test ") + t.name);
    }
    v.push_back("test all");
    return v;
  }();
  return names;
}

std::string config_hash(const ExperimentConfig& config, const RunOptions& options) {
  std::string key = config.canonical;
  key += "|seed=" + (options.seed ? std::to_string(*options.seed) : std::string("-"));
  key += "|replicas=" + (options.replicas ? std::to_string(*options.replicas) : std::string("-"));
  key += "|fault=" + options.fault.value_or("-");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(key)));
  return buf;
}

std::string render_report(const std::vector<TestReport>& reports, const ReportHeader& header) {
  std::size_t passed = 0;
  for (const auto& r : reports) passed += r.pass ? 1 : 0;
  ordered_json doc;
  doc["command"] = header.command;
  doc["config_hash"] = header.config_hash;
  doc["seed"] = header.seed;
  doc["fault"] = header.fault ? ordered_json(*header.fault) : ordered_json(nullptr);
  doc["summary"] = {{"verdict", passed == reports.size() ? "pass" : "fail"},
                    {"total", reports.size()},
                    {"passed", passed},
                    {"failed", reports.size() - passed}};
  doc["tests"] = ordered_json::array();
  for (const auto& r : reports) {
    ordered_json t;
    t["name"] = r.name;
    t["identity"] = r.identity;
    t["gate"] = gate_name(r.kind);
    t["statistic"] = number(r.statistic);
    t["reference"] = number(r.reference);
    t["std_error"] = number(r.std_error);
    t["p_or_sigma"] = number(r.p_or_sigma);
    t["threshold"] = number(r.threshold);
    t["verdict"] = r.pass ? "pass" : "fail";
    t["seed"] = r.seed;
    t["n"] = r.n_samples;
    if (!r.note.empty()) t["note"] = r.note;
    doc["tests"].push_back(std::move(t));
  }
  return doc.dump(2) + "\n";
}

void emit_report(const std::vector<TestReport>& reports, const ReportHeader& header,
                 const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("/output", "cannot write report '" + path.string() + "'");
  out << render_report(reports, header);
  if (!out) throw ConfigError("/output", "failed writing report '" + path.string() + "'");
}

int run_experiment(const ExperimentConfig& config, const std::string& subcommand,
                   const RunOptions& options) {
  const Fault fault = parse_fault(options.fault);
  const std::uint64_t seed = options.seed.value_or(config.seed);
  Context cx{config,
             RngStream(seed),
             options.replicas.value_or(config.replicas),
             options.replicas.has_value(),
             fault,
             options.out.value_or(config.output)};

  std::function<Reports()> job;
  if (subcommand == "sample-poisson" || subcommand == "kernel-step" ||
      subcommand == "simulate-path") {
    if (fault != Fault::none) {
      throw ConfigError("--fault-inject", "no fault applies to '" + subcommand + "'");
    }
    if (subcommand == "sample-poisson") job = [&] { return run_sample_poisson(cx); };
    if (subcommand == "kernel-step") job = [&] { return run_kernel_step(cx); };
    if (subcommand == "simulate-path") job = [&] { return run_simulate_path(cx); };
  } else if (subcommand == "test all") {
    for (const auto& t : test_table()) preflight(cx, t.name);
    job = [&] {
      Reports out;
      for (const auto& t : test_table()) append(out, t.run(cx));
      return out;
    };
  } else {
    std::string name = subcommand;
    if (name.rfind("test ", 0) == 0) name = name.substr(5);
    else if (name != "laplace") throw ConfigError("", "unknown subcommand '" + subcommand + "'");
    const TestEntry* entry = nullptr;
    for (const auto& t : test_table()) {
      if (name == t.name) entry = &t;
    }
    if (!entry) throw ConfigError("", "unknown subcommand '" + subcommand + "'");
    if (fault != Fault::none && fault != entry->fault) {
      throw ConfigError("--fault-inject",
                        "fault '" + *options.fault + "' does not apply to '" + subcommand + "'");
    }
    preflight(cx, entry->name);
    job = [&cx, entry] { return entry->run(cx); };
  }

  std::error_code ec;
  std::filesystem::create_directories(cx.out, ec);
  if (ec) throw ConfigError("/output", "cannot create '" + cx.out.string() + "': " + ec.message());

  Reports reports;
  try {
    reports = job();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError("", e.what());
  } catch (const std::domain_error& e) {
    throw ConfigError("", e.what());
  }

  const ReportHeader header{subcommand, config_hash(config, options), seed, options.fault};
  emit_report(reports, header, cx.out / ("report_" + slug(subcommand) + ".json"));

  bool all_pass = true;
  for (const auto& r : reports) {
    all_pass = all_pass && r.pass;
    std::printf("%s  %-44s stat=%-14.8g ref=%-14.8g %s=%-12.6g thr=%g%s%s\n",
                r.pass ? "PASS" : "FAIL", r.name.c_str(), r.statistic, r.reference,
                r.kind == GateKind::p_value ? "p" : (r.kind == GateKind::sigma ? "z" : "v"),
                r.p_or_sigma, r.threshold, r.note.empty() ? "" : "  # ", r.note.c_str());
  }
  std::printf("%s: %zu gates, verdict %s\n", subcommand.c_str(), reports.size(),
              all_pass ? "pass" : "fail");
  std::fflush(stdout);
  return all_pass ? kExitPass : kExitGateFailure;
}

}  // namespace glauber::cli

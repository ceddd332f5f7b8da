#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "glauber/generator_form.hpp"
#include "glauber/point_process.hpp"
#include "glauber/stat_tests.hpp"

namespace glauber::cli {

/// Exit codes of run_experiment and the CLI.
inline constexpr int kExitPass = 0;
inline constexpr int kExitGateFailure = 1;
inline constexpr int kExitConfigError = 2;

/// Invalid configuration or arguments; `where` is a JSON pointer when known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string where, const std::string& what);
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

/// Explicit points, or a draw from the Poisson law of the measure.
struct InitialSpec {
  std::optional<std::vector<Point>> points;  // empty optional: "poisson"
};

struct ExperimentConfig {
  IntensityMeasure measure = IntensityMeasure::uniform(Window::unit(1));
  std::vector<NamedFunction> functions;
  std::vector<NamedCylinder> cylinders;
  InitialSpec initial;
  std::vector<double> times;
  double horizon = 1.0;
  std::size_t replicas = 100000;
  std::uint64_t seed = 0;
  std::string output = "out";

  struct {
    std::vector<MeckeTestCase> cases;
  } mecke;
  struct {
    double t = 0.0, s = 0.0;
    InitialSpec initial;
  } chapman;
  struct {
    double t = 0.0;
    InitialSpec initial;
  } count_law;
  struct {
    double h = 1e-3;
    InitialSpec initial;
  } generator;
  struct {
    double t = 0.0;
    std::optional<std::size_t> replicas;
    double survival_horizon = 1.0;
    InitialSpec initial;
  } marginal;
  struct {
    double t = 0.0, delta = 0.0;
    std::string function;
    InitialSpec initial;
  } feller;
  struct {
    std::string function;
    std::vector<double> slope_times;
    double t_mc = 10.0;
    InitialSpec initial;
  } ergodic;
  struct {
    std::size_t logs = 1;
  } simulate_path;

  /// Canonical (sorted-key) dump of the source document, for hashing.
  std::string canonical;
};

/// Validates everything before any sampling. Throws ConfigError.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Overrides from the command line.
struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replicas;
  std::optional<std::string> out;
  std::optional<std::string> fault;
};

/// Multiplier applied by --fault-inject.
inline constexpr double kFaultFactor = 1.05;

/// "sample-poisson", "kernel-step", "simulate-path", "laplace", "test <name>".
const std::vector<std::string>& subcommands();

/// Runs one subcommand and writes its artifacts. Returns an exit code;
/// config errors surface as ConfigError.
int run_experiment(const ExperimentConfig& config, const std::string& subcommand,
                   const RunOptions& options);

struct ReportHeader {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::optional<std::string> fault;
};

/// Byte-stable JSON rendering of a report list.
std::string render_report(const std::vector<TestReport>& reports, const ReportHeader& header);

/// Writes render_report to path; throws ConfigError if it cannot.
void emit_report(const std::vector<TestReport>& reports, const ReportHeader& header,
                 const std::filesystem::path& path);

/// Hex FNV-1a of the canonical config and the effective overrides.
std::string config_hash(const ExperimentConfig& config, const RunOptions& options);

/// Full CLI: parses arguments, loads the config, runs, maps errors to exit codes.
int main_entry(int argc, char** argv);

}  // namespace glauber::cli

// Batch front end: JSON run configs in, CSV / JSON reports out.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "phikit/diagnostics.hpp"
#include "phikit/systems.hpp"

namespace phikit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;  // verify: some residual over threshold
inline constexpr int kExitSolver = 2;
inline constexpr int kExitBlowUp = 3;
inline constexpr int kExitConfig = 4;

enum class Command { simulate, compare, convergence };
enum class Verbosity { quiet, normal, verbose };

using Matrix = std::vector<std::vector<double>>;

struct SystemConfig {
  std::string name;
  std::optional<std::vector<double>> J_diag;
  std::optional<Matrix> J;
  std::optional<Matrix> A;
  std::optional<std::vector<double>> x0;

  bool operator==(const SystemConfig&) const = default;
};

struct RunConfig {
  SystemConfig system;
  std::vector<std::string> methods;  // exactly one for simulate / convergence
  double dt = 0.0;
  long steps = 0;
  double T = 0.0;
  std::vector<double> h_list;
  double fp_tol = 1e-14;
  int fp_max_iter = 100;
  bool newton_fallback = true;
  double reference_tol = 1e-12;
  std::vector<std::string> outputs{"trajectory", "energy", "casimir", "diagnostics"};
  std::uint64_t seed = 0;

  bool operator==(const RunConfig&) const = default;
  SolverOptions solver() const { return {fp_tol, fp_max_iter, newton_fallback}; }
};

// Strict parsing: unknown keys, wrong types and out-of-range values raise
// ConfigError.
RunConfig parse_config(const nlohmann::json& j, Command cmd);
RunConfig load_config(const std::string& path, Command cmd);
// Inverse of parse_config: every field that command reads, defaults included.
nlohmann::json to_json(const RunConfig& c, Command cmd);

SystemSpec build_system(const SystemConfig& c);

// Locale-independent rendering with 17 significant digits.
std::string format_double(double v);

int cmd_simulate(const std::string& config_path, const std::string& out_path, Verbosity v);
int cmd_compare(const std::string& config_path, const std::string& out_path, Verbosity v);
int cmd_convergence(const std::string& config_path, const std::string& out_path, Verbosity v);
int cmd_verify(const std::string& system, const std::string& out_path, std::uint64_t seed,
               Verbosity v);

int run(int argc, char** argv);

}  // namespace phikit::cli

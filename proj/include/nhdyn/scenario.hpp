#pragma once

// Declarative run description and the batch orchestrator behind `nhdyn run`.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nhdyn/fermion.hpp"
#include "nhdyn/io.hpp"
#include "nhdyn/linalg.hpp"

namespace nhdyn {

inline constexpr std::size_t kDefaultMaxDim = 64;
inline constexpr std::uint64_t kDefaultSeed = 42;

struct Tolerances {
  double tol_class = 1e-8;
  double tol_trunc = 1e-12;
  double rank_tol_rel = 1e-10;
  double tol_distinct = 1e-8;
};

struct TimeSpec {
  double t_start = 0.0;
  double t_end = 10.0;
  std::size_t points = 201;
};

struct NamedObservable {
  std::string name;
  ComplexMatrix matrix;
  std::optional<std::string> builtin;  // set when resolved from a builtin name
};

enum class HamiltonianKind { kInline, kFermionDm, kSimilar };

struct ScenarioConfig {
  HamiltonianKind kind = HamiltonianKind::kInline;
  ComplexMatrix h;
  double lambda = 0.0, mu = 0.0;   // kFermionDm
  ComplexMatrix h0, r;             // kSimilar
  ComplexVector psi0;              // normalized
  std::optional<Occupation> initial_label;
  TimeSpec time;
  std::vector<NamedObservable> observables;
  Tolerances tolerances;
  std::vector<std::string> tasks;
  std::uint64_t seed = kDefaultSeed;
  Eigen::Index eigen_index = 0;
  std::size_t ensemble_states = 0;
  bool integrator_enabled = false;
  std::size_t integrator_substeps = 4;
  bool exploratory = false;

  // Fully materialized config: every default spelled out.
  Json echo() const;
};

inline const std::vector<std::string>& known_tasks() {
  static const std::vector<std::string> tasks{"trajectory", "symmetries",   "classify",
                                              "eigenstate_case", "fermion_demo", "biortho"};
  return tasks;
}

// Throws ValidationError with a field-qualified message.
ScenarioConfig parse_config(const Json& doc, std::size_t max_dim = kDefaultMaxDim);
ScenarioConfig load_config(const std::filesystem::path& path, std::size_t max_dim = kDefaultMaxDim);

// NHDYN_MAX_DIM, default 64.
std::size_t max_dim_from_env();

struct RunReport {
  Json json;
  std::vector<std::string> artifacts;  // file names relative to the output directory
  int exit_status = 0;
};

// Runs the requested tasks, writes CSVs and report.json into out_dir.
// exit_status: 0 success, 3 numerical failure in some task.
RunReport run(const ScenarioConfig& config, const std::filesystem::path& out_dir);

}  // namespace nhdyn

#include "nhdyn/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "nhdyn/biortho.hpp"
#include "nhdyn/eigenstate.hpp"
#include "nhdyn/ensemble.hpp"
#include "nhdyn/errors.hpp"
#include "nhdyn/gamma.hpp"
#include "nhdyn/nonlinear_flow.hpp"

namespace nhdyn {
namespace {

const std::set<std::string> kTopLevelKeys{
    "hamiltonian", "initial_state", "time",    "observables",     "tolerances",  "tasks",
    "seed",        "eigen_index",   "ensemble_states", "integrator", "exploratory"};

double positive_number(const Json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const Json& v = obj.at(key);
  if (!v.is_number()) throw ValidationError(where + "." + key + " must be a number");
  const double d = v.get<double>();
  if (!(d > 0.0) || !std::isfinite(d)) {
    throw ValidationError(where + "." + key + " must be strictly positive");
  }
  return d;
}

void reject_unknown(const Json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      throw ValidationError(where + ": unknown field '" + item.key() + "'");
    }
  }
}

ComplexMatrix builtin_observable(const std::string& name, const ScenarioConfig& cfg,
                                 const std::optional<DmModel>& model) {
  const Eigen::Index n = cfg.h.rows();
  if (name == "identity") return identity(n);
  if (name == "H") return cfg.h;
  if (name == "N" || name == "N1" || name == "N2" || name == "N3") {
    if (!model) {
      throw ValidationError("observables: builtin '" + name + "' needs a fermion_dm Hamiltonian");
    }
    if (name == "N") return model->algebra().total_number();
    return model->algebra().n(name[1] - '0');
  }
  throw ValidationError("observables: unknown builtin '" + name + "'");
}

std::uint64_t task_seed(std::uint64_t seed, std::uint64_t salt) {
  return seed * 0x9E3779B97F4A7C15ull + salt;
}

}  // namespace

ScenarioConfig parse_config(const Json& doc, std::size_t max_dim) {
  if (!doc.is_object()) throw ValidationError("config: top level must be a JSON object");
  reject_unknown(doc, kTopLevelKeys, "config");
  ScenarioConfig cfg;

  // hamiltonian
  if (!doc.contains("hamiltonian")) throw ValidationError("hamiltonian: required field is missing");
  const Json& hj = doc.at("hamiltonian");
  std::optional<DmModel> model;
  if (hj.is_array()) {
    cfg.kind = HamiltonianKind::kInline;
    cfg.h = matrix_from_json(hj, "hamiltonian");
  } else if (hj.is_object() && hj.size() == 1 && hj.contains("matrix")) {
    cfg.kind = HamiltonianKind::kInline;
    cfg.h = matrix_from_json(hj.at("matrix"), "hamiltonian.matrix");
  } else if (hj.is_object() && hj.size() == 1 && hj.contains("fermion_dm")) {
    const Json& p = hj.at("fermion_dm");
    if (!p.is_object()) throw ValidationError("hamiltonian.fermion_dm must be an object");
    reject_unknown(p, {"lambda", "mu"}, "hamiltonian.fermion_dm");
    if (!p.contains("lambda") || !p.contains("mu")) {
      throw ValidationError("hamiltonian.fermion_dm needs both lambda and mu");
    }
    cfg.kind = HamiltonianKind::kFermionDm;
    cfg.lambda = positive_number(p, "lambda", 0.0, "hamiltonian.fermion_dm");
    cfg.mu = positive_number(p, "mu", 0.0, "hamiltonian.fermion_dm");
    model.emplace(cfg.lambda, cfg.mu);
    cfg.h = model->h();
  } else if (hj.is_object() && hj.size() == 1 && hj.contains("similar")) {
    const Json& p = hj.at("similar");
    if (!p.is_object() || !p.contains("h0") || !p.contains("r")) {
      throw ValidationError("hamiltonian.similar needs h0 and r");
    }
    reject_unknown(p, {"h0", "r"}, "hamiltonian.similar");
    cfg.kind = HamiltonianKind::kSimilar;
    cfg.h0 = matrix_from_json(p.at("h0"), "hamiltonian.similar.h0");
    cfg.r = matrix_from_json(p.at("r"), "hamiltonian.similar.r");
    try {
      cfg.h = similar_norm_preserving(cfg.h0, cfg.r).h;
    } catch (const Error& e) {
      throw ValidationError(std::string("hamiltonian.similar: ") + e.what());
    }
  } else {
    throw ValidationError(
        "hamiltonian: expected a matrix, {\"fermion_dm\": {...}} or {\"similar\": {...}}");
  }
  if (cfg.h.rows() != cfg.h.cols()) throw ValidationError("hamiltonian: matrix must be square");
  if (static_cast<std::size_t>(cfg.h.rows()) > max_dim) {
    throw ValidationError("hamiltonian: dimension " + std::to_string(cfg.h.rows()) +
                          " exceeds NHDYN_MAX_DIM = " + std::to_string(max_dim));
  }
  const Eigen::Index n = cfg.h.rows();

  // initial_state
  if (!doc.contains("initial_state")) {
    if (model) {
      cfg.initial_label = Occupation{0, 1, 1};
      cfg.psi0 = model->algebra().basis_state(*cfg.initial_label);
    } else {
      cfg.psi0 = ComplexVector::Unit(n, 0);
    }
  } else if (doc.at("initial_state").is_string()) {
    if (!model) throw ValidationError("initial_state: occupation labels need a fermion_dm Hamiltonian");
    cfg.initial_label = parse_occupation(doc.at("initial_state").get<std::string>(), 3);
    cfg.psi0 = model->algebra().basis_state(*cfg.initial_label);
  } else {
    ComplexVector v = vector_from_json(doc.at("initial_state"), "initial_state");
    if (v.size() != n) {
      throw ValidationError("initial_state: dimension " + std::to_string(v.size()) +
                            " does not match hamiltonian dimension " + std::to_string(n));
    }
    if (!(v.norm() > 0.0) || !std::isfinite(v.norm())) {
      throw ValidationError("initial_state: must be a nonzero finite vector");
    }
    const double norm = v.norm();
    cfg.psi0 = std::abs(norm - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon() ? v : ComplexVector(v / norm);
  }

  // time
  if (doc.contains("time")) {
    const Json& tj = doc.at("time");
    if (!tj.is_object()) throw ValidationError("time must be an object");
    reject_unknown(tj, {"t_start", "t_end", "points"}, "time");
    for (const char* key : {"t_start", "t_end"}) {
      if (tj.contains(key) && !tj.at(key).is_number()) {
        throw ValidationError(std::string("time.") + key + " must be a number");
      }
    }
    if (tj.contains("t_start")) cfg.time.t_start = tj.at("t_start").get<double>();
    if (tj.contains("t_end")) cfg.time.t_end = tj.at("t_end").get<double>();
    if (tj.contains("points")) {
      const Json& p = tj.at("points");
      if (!p.is_number_integer()) throw ValidationError("time.points must be an integer");
      if (p.get<long long>() < 2) throw ValidationError("time.points must be ≥ 2");
      cfg.time.points = static_cast<std::size_t>(p.get<long long>());
    }
  }
  if (!(cfg.time.t_end > cfg.time.t_start)) {
    throw ValidationError("time.t_end must be greater than time.t_start");
  }

  // tolerances
  if (doc.contains("tolerances")) {
    const Json& tj = doc.at("tolerances");
    if (!tj.is_object()) throw ValidationError("tolerances must be an object");
    reject_unknown(tj, {"tol_class", "tol_trunc", "rank_tol_rel", "tol_distinct"}, "tolerances");
    cfg.tolerances.tol_class = positive_number(tj, "tol_class", cfg.tolerances.tol_class, "tolerances");
    cfg.tolerances.tol_trunc = positive_number(tj, "tol_trunc", cfg.tolerances.tol_trunc, "tolerances");
    cfg.tolerances.rank_tol_rel =
        positive_number(tj, "rank_tol_rel", cfg.tolerances.rank_tol_rel, "tolerances");
    cfg.tolerances.tol_distinct =
        positive_number(tj, "tol_distinct", cfg.tolerances.tol_distinct, "tolerances");
    if (cfg.tolerances.rank_tol_rel >= 1.0) {
      throw ValidationError("tolerances.rank_tol_rel must be below 1");
    }
  }

  // tasks
  if (doc.contains("tasks")) {
    const Json& tj = doc.at("tasks");
    if (!tj.is_array() || tj.empty()) throw ValidationError("tasks must be a non-empty array");
    for (std::size_t i = 0; i < tj.size(); ++i) {
      if (!tj[i].is_string()) throw ValidationError("tasks[" + std::to_string(i) + "] must be a string");
      const std::string t = tj[i].get<std::string>();
      if (std::find(known_tasks().begin(), known_tasks().end(), t) == known_tasks().end()) {
        throw ValidationError("tasks[" + std::to_string(i) + "]: unknown task '" + t + "'");
      }
      if (std::find(cfg.tasks.begin(), cfg.tasks.end(), t) == cfg.tasks.end()) cfg.tasks.push_back(t);
    }
  } else {
    cfg.tasks = {"trajectory"};
  }
  if (std::find(cfg.tasks.begin(), cfg.tasks.end(), "fermion_demo") != cfg.tasks.end() && !model) {
    throw ValidationError("tasks: fermion_demo needs a fermion_dm Hamiltonian");
  }

  // observables
  if (doc.contains("observables")) {
    const Json& oj = doc.at("observables");
    if (!oj.is_array()) throw ValidationError("observables must be an array");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < oj.size(); ++i) {
      const std::string where = "observables[" + std::to_string(i) + "]";
      NamedObservable obs;
      if (oj[i].is_string()) {
        obs.name = oj[i].get<std::string>();
        obs.builtin = obs.name;
        obs.matrix = builtin_observable(obs.name, cfg, model);
      } else if (oj[i].is_object() && oj[i].contains("name") && oj[i].contains("matrix")) {
        reject_unknown(oj[i], {"name", "matrix"}, where);
        if (!oj[i].at("name").is_string()) throw ValidationError(where + ".name must be a string");
        obs.name = oj[i].at("name").get<std::string>();
        obs.matrix = matrix_from_json(oj[i].at("matrix"), where + ".matrix");
        if (obs.matrix.rows() != n || obs.matrix.cols() != n) {
          throw ValidationError(where + ".matrix: must be " + std::to_string(n) + "x" + std::to_string(n));
        }
      } else {
        throw ValidationError(where + ": expected a builtin name or {\"name\", \"matrix\"}");
      }
      if (obs.name.empty() || obs.name.find(',') != std::string::npos) {
        throw ValidationError(where + ": name must be non-empty and contain no commas");
      }
      if (!seen.insert(obs.name).second) throw ValidationError(where + ": duplicate name '" + obs.name + "'");
      cfg.observables.push_back(std::move(obs));
    }
  }

  // scalars
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned()) throw ValidationError("seed must be a non-negative integer");
    cfg.seed = doc.at("seed").get<std::uint64_t>();
  }
  if (doc.contains("eigen_index")) {
    const Json& e = doc.at("eigen_index");
    if (!e.is_number_integer() || e.get<long long>() < 0 || e.get<long long>() >= n) {
      throw ValidationError("eigen_index must be an integer in [0, " + std::to_string(n) + ")");
    }
    cfg.eigen_index = static_cast<Eigen::Index>(e.get<long long>());
  }
  if (doc.contains("ensemble_states")) {
    const Json& e = doc.at("ensemble_states");
    if (!e.is_number_unsigned()) throw ValidationError("ensemble_states must be a non-negative integer");
    cfg.ensemble_states = e.get<std::size_t>();
  }
  if (doc.contains("integrator")) {
    const Json& ij = doc.at("integrator");
    if (!ij.is_object()) throw ValidationError("integrator must be an object");
    reject_unknown(ij, {"enabled", "substeps"}, "integrator");
    if (ij.contains("enabled")) {
      if (!ij.at("enabled").is_boolean()) throw ValidationError("integrator.enabled must be a boolean");
      cfg.integrator_enabled = ij.at("enabled").get<bool>();
    } else {
      cfg.integrator_enabled = true;
    }
    if (ij.contains("substeps")) {
      const Json& s = ij.at("substeps");
      if (!s.is_number_integer() || s.get<long long>() < 1) {
        throw ValidationError("integrator.substeps must be an integer ≥ 1");
      }
      cfg.integrator_substeps = static_cast<std::size_t>(s.get<long long>());
    }
  }
  if (doc.contains("exploratory")) {
    if (!doc.at("exploratory").is_boolean()) throw ValidationError("exploratory must be a boolean");
    cfg.exploratory = doc.at("exploratory").get<bool>();
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path, std::size_t max_dim) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open '" + path.string() + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("config '" + path.string() + "': " + e.what());
  }
  return parse_config(doc, max_dim);
}

std::size_t max_dim_from_env() {
  const char* raw = std::getenv("NHDYN_MAX_DIM");
  if (raw == nullptr || *raw == '\0') return kDefaultMaxDim;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(raw, &end, 10);
  if (end == raw || *end != '\0' || v == 0) {
    throw ValidationError("NHDYN_MAX_DIM must be a positive integer");
  }
  return static_cast<std::size_t>(v);
}

Json ScenarioConfig::echo() const {
  Json out;
  switch (kind) {
    case HamiltonianKind::kInline:
      out["hamiltonian"] = to_json(h);
      break;
    case HamiltonianKind::kFermionDm:
      out["hamiltonian"] = {{"fermion_dm", {{"lambda", lambda}, {"mu", mu}}}};
      break;
    case HamiltonianKind::kSimilar:
      out["hamiltonian"] = {{"similar", {{"h0", to_json(h0)}, {"r", to_json(r)}}}};
      break;
  }
  if (initial_label) {
    std::string digits;
    for (int v : *initial_label) digits.push_back(static_cast<char>('0' + v));
    out["initial_state"] = digits;
  } else {
    out["initial_state"] = to_json(psi0);
  }
  out["time"] = {{"t_start", time.t_start}, {"t_end", time.t_end}, {"points", time.points}};
  Json obs = Json::array();
  for (const auto& o : observables) {
    if (o.builtin) {
      obs.push_back(*o.builtin);
    } else {
      obs.push_back({{"name", o.name}, {"matrix", to_json(o.matrix)}});
    }
  }
  out["observables"] = obs;
  out["tolerances"] = {{"tol_class", tolerances.tol_class},
                       {"tol_trunc", tolerances.tol_trunc},
                       {"rank_tol_rel", tolerances.rank_tol_rel},
                       {"tol_distinct", tolerances.tol_distinct}};
  out["tasks"] = tasks;
  out["seed"] = seed;
  out["eigen_index"] = eigen_index;
  out["ensemble_states"] = ensemble_states;
  out["integrator"] = {{"enabled", integrator_enabled}, {"substeps", integrator_substeps}};
  out["exploratory"] = exploratory;
  return out;
}

namespace {

Json classification_json(const ClassificationReport& r) {
  return {{"name", r.observable_name},
          {"in_c_gamma", r.in_c_gamma},
          {"in_c_psi_hat", r.in_c_psi_hat},
          {"in_c_psi_hat_weak", r.in_c_psi_hat_weak},
          {"verdicts",
           {{"c_gamma", r.c_gamma}, {"c_psi_hat", r.c_psi_hat}, {"c_psi_hat_weak", r.c_psi_hat_weak}}}};
}

class Runner {
 public:
  Runner(const ScenarioConfig& cfg, std::filesystem::path out_dir)
      : cfg_(cfg), out_dir_(std::move(out_dir)), grid_(uniform_grid(cfg.time.t_start, cfg.time.t_end, cfg.time.points)) {
    if (cfg_.kind == HamiltonianKind::kFermionDm) model_.emplace(cfg_.lambda, cfg_.mu);
  }

  RunReport execute() {
    RunReport report;
    report.json["config"] = cfg_.echo();
    Json tasks = Json::object();
    for (const std::string& task : known_tasks()) {
      if (std::find(cfg_.tasks.begin(), cfg_.tasks.end(), task) == cfg_.tasks.end()) continue;
      try {
        tasks[task] = dispatch(task, report);
      } catch (const ValidationError&) {
        throw;
      } catch (const Error& e) {
        tasks[task] = {{"error", e.what()}};
        report.exit_status = 3;
      }
    }
    report.json["tasks"] = tasks;
    report.json["artifacts"] = report.artifacts;
    report.json["exit_status"] = report.exit_status;
    return report;
  }

 private:
  Json dispatch(const std::string& task, RunReport& report) {
    if (task == "biortho") return biortho();
    if (task == "symmetries") return symmetries();
    if (task == "trajectory") return trajectory_task(report);
    if (task == "classify") return classify_task();
    if (task == "eigenstate_case") return eigenstate_task();
    if (task == "fermion_demo") return fermion_task(report);
    throw ValidationError("unknown task " + task);
  }

  const StateTrajectory& trajectory() {
    if (!traj_) traj_ = exact_trajectory(cfg_.h, cfg_.psi0, grid_);
    return *traj_;
  }

  Json biortho() {
    const BiorthogonalSystem sys = build_biorthogonal(cfg_.h, cfg_.tolerances.tol_distinct);
    const IntertwiningResidual inter = verify_intertwining(sys, cfg_.h);
    const BiorthoDiagnostics d = diagnose(sys);
    Rng rng(task_seed(cfg_.seed, 1));
    double completeness = 0.0;
    for (int i = 0; i < 100; ++i) {
      const ExpansionResidual r = expansion_residual(sys, random_unit_vector(rng, sys.dim));
      completeness = std::max({completeness, r.via_phi_coefficients, r.via_psi_coefficients});
    }
    return {{"eigenvalues", to_json(sys.eigenvalues)},
            {"condition", sys.condition},
            {"non_real_spectrum", sys.non_real_spectrum},
            {"intertwining", {{"s_psi", inter.s_psi}, {"s_phi", inter.s_phi}}},
            {"biorthogonality", d.biorthogonality},
            {"resolution_of_identity", d.resolution},
            {"metric_inverse", d.metric_inverse},
            {"metric_maps", d.metric_maps},
            {"min_eig_s_phi", d.min_eig_s_phi},
            {"min_eig_s_psi", d.min_eig_s_psi},
            {"completeness", completeness}};
  }

  Json symmetries() {
    const GammaContext ctx(cfg_.h);
    const SymmetryBasis basis = gamma_symmetry_basis(ctx, cfg_.tolerances.rank_tol_rel);
    Json gens = Json::array();
    double fixed = 0.0;
    for (const auto& x : basis.generators) {
      gens.push_back(to_json(x));
      for (double t : {0.5, 1.0, 2.0}) fixed = std::max(fixed, op_norm(gamma_t(ctx, x, t) - x));
    }
    return {{"dimension", basis.generators.size()},
            {"generators", gens},
            {"residuals", basis.residuals},
            {"chain_closure_dim", basis.chain_closure_dim},
            {"max_gamma_fixed_residual", fixed}};
  }

  Json trajectory_task(RunReport& report) {
    const StateTrajectory& traj = trajectory();
    CsvTable table;
    table.header = {"t", "norm_sq"};
    for (const auto& o : cfg_.observables) {
      table.header.push_back(o.name + "_re");
      table.header.push_back(o.name + "_im");
    }
    const ComplexMatrix herm_sum = cfg_.h + cfg_.h.adjoint();
    double sum_rule = 0.0;
    for (std::size_t j = 0; j < traj.size(); ++j) {
      std::vector<double> row{traj.t_grid[j], traj.norm_sq[j]};
      for (const auto& o : cfg_.observables) {
        const Complex m = mean_value(o.matrix, traj.psi_hat[j]);
        row.push_back(m.real());
        row.push_back(m.imag());
      }
      table.rows.push_back(std::move(row));
      const ComplexMatrix hnl = h_nl(cfg_.h, traj.psi_hat[j]);
      sum_rule = std::max(sum_rule, (hnl + hnl.adjoint() - herm_sum).norm());
    }
    emit_csv(table, out_dir_ / "trajectory.csv");
    report.artifacts.push_back("trajectory.csv");

    const GammaContext ctx(cfg_.h);
    double fd_residual = 0.0;
    for (const NormSample& s : identity_norm_evolution(ctx, cfg_.psi0, grid_)) {
      fd_residual = std::max(fd_residual, s.derivative_residual);
    }
    const auto [mn, mx] = std::minmax_element(traj.norm_sq.begin(), traj.norm_sq.end());
    Json out = {{"csv", "trajectory.csv"},
                {"columns", table.header},
                {"norm_sq_final", traj.norm_sq.back()},
                {"norm_sq_min", *mn},
                {"norm_sq_max", *mx},
                {"norm_derivative_fd_residual", fd_residual},
                {"sum_rule_max_residual", sum_rule}};
    if (cfg_.integrator_enabled) {
      const NonlinearRun run = integrate_nonlinear(cfg_.h, cfg_.psi0, grid_, cfg_.integrator_substeps);
      out["integrator"] = {{"substeps", cfg_.integrator_substeps},
                           {"max_deviation", run.max_deviation},
                           {"max_norm_drift", run.max_norm_drift}};
    }
    if (cfg_.kind == HamiltonianKind::kSimilar) {
      const SimilarityResult sim = similar_norm_preserving(cfg_.h0, cfg_.r);
      out["similarity"] = {{"commutator_residual", sim.commutator_residual},
                           {"r_condition", sim.r_condition},
                           {"identity_drift", identity_drift(ctx, grid_)}};
    }
    return out;
  }

  Json classify_task() {
    const StateTrajectory& traj = trajectory();
    const double tol = cfg_.tolerances.tol_class;
    const GammaContext ctx(cfg_.h);
    Json list = Json::array();
    for (const auto& o : cfg_.observables) {
      const ClassificationReport r = classify(cfg_.h, o.matrix, traj, tol, o.name);
      Json entry = classification_json(r);
      if (is_gamma_symmetry(ctx, o.matrix)) {
        entry["decay_law_residual"] = gamma_symmetry_decay_check(cfg_.h, o.matrix, traj);
      }
      const NecessaryConditionResult nc = necessary_condition_residual(
          cfg_.h, o.matrix, traj, mean_value(o.matrix, traj.psi_hat.front()), tol);
      entry["necessary_condition"] = {{"residual", nc.max_residual},
                                      {"premise_residual", nc.premise_residual},
                                      {"premise_holds", nc.premise_holds}};
      list.push_back(std::move(entry));
    }
    Json out = {{"tol_class", tol}, {"observables", list}};
    if (cfg_.ensemble_states > 0) {
      Rng rng(task_seed(cfg_.seed, 2));
      std::vector<ComplexVector> states;
      for (std::size_t i = 0; i < cfg_.ensemble_states; ++i) {
        states.push_back(random_unit_vector(rng, cfg_.h.rows()));
      }
      Json ens = Json::array();
      for (const auto& o : cfg_.observables) {
        ens.push_back(classification_json(classify_ensemble(cfg_.h, o.matrix, states, grid_, tol, o.name)));
      }
      out["ensemble"] = {{"states", cfg_.ensemble_states}, {"observables", ens}};
    }
    if (cfg_.exploratory) {
      Json probes = Json::array();
      for (const auto& o : cfg_.observables) {
        const FrozenGeneratorProbe p =
            probe_time_independent_generator(cfg_.h, o.matrix, traj, cfg_.tolerances.tol_trunc);
        probes.push_back({{"name", o.name},
                          {"scalar_variation", p.scalar_variation},
                          {"frozen_series_vs_conjugation", p.series_vs_conjugation}});
      }
      out["exploratory_time_independent_generator"] = {
          {"note", "exploratory diagnostic; no correctness claim"}, {"observables", probes}};
    }
    return out;
  }

  Json eigenstate_task() {
    const EigenstateContext ctx(cfg_.h, cfg_.eigen_index);
    Rng rng(task_seed(cfg_.seed, 3));
    const Eigen::Index n = cfg_.h.rows();
    const ComplexMatrix x = random_matrix(rng, n, n);
    const ComplexMatrix y = random_matrix(rng, n, n);
    std::vector<ComplexMatrix> probes{x, y};
    for (const auto& o : cfg_.observables) probes.push_back(o.matrix);
    const WeakIdentityReport w = weak_identity_report(ctx, grid_, x, y, probes);

    // Series against conjugation on at most 11 grid points.
    const std::size_t stride = std::max<std::size_t>(1, (grid_.size() - 1) / 10);
    Json samples = Json::array();
    double worst = 0.0;
    for (std::size_t j = 0; j < grid_.size(); j += stride) {
      const double t = grid_[j];
      const SeriesResult s = beta_series(ctx, x, t, cfg_.tolerances.tol_trunc);
      const double d = op_norm(s.value - gamma_hat(ctx, x, t));
      worst = std::max(worst, d);
      samples.push_back({{"t", t}, {"mismatch", d}, {"terms", s.terms_used}});
    }
    return {{"eigen_index", cfg_.eigen_index},
            {"energy", to_json(ctx.energy())},
            {"identity_mean_residual", w.identity_mean},
            {"derivation_mean_residual", w.derivation_mean},
            {"identity_operator_deviation", w.identity_operator},
            {"automorphism_witness", w.automorphism_witness},
            {"max_mean_derivative", w.max_mean_derivative},
            {"series_vs_conjugation", worst},
            {"series_samples", samples}};
  }

  Json fermion_task(RunReport& report) {
    const DmModel& model = *model_;
    const Occupation label = cfg_.initial_label.value_or(Occupation{0, 1, 1});
    const OccupationTrajectory occ = simulate_occupations(model, label, grid_);
    CsvTable table;
    table.header = {"t", "n1", "n2", "n3", "sum", "scalar_re", "scalar_im"};
    double sum_min = occ.rows.front().sum, sum_max = sum_min;
    for (const auto& r : occ.rows) {
      table.rows.push_back({r.t, r.n.n1, r.n.n2, r.n.n3, r.sum, r.scalar.real(), r.scalar.imag()});
      sum_min = std::min(sum_min, r.sum);
      sum_max = std::max(sum_max, r.sum);
    }
    emit_csv(table, out_dir_ / "fermion.csv");
    report.artifacts.push_back("fermion.csv");

    const ComplexVector phi = model.algebra().basis_state(label);
    const ComplexVector hphi = model.h() * phi;
    const double non_eigen = (hphi - inner(phi, hphi) * phi).norm();
    const StateTrajectory traj = exact_trajectory(model.h(), phi, grid_);
    const ClassificationReport cls =
        classify(model.h(), model.algebra().total_number(), traj, cfg_.tolerances.tol_class, "N");

    Json out = {{"csv", "fermion.csv"},
                {"columns", table.header},
                {"initial", occupation_label(label)},
                {"sum_min", sum_min},
                {"sum_max", sum_max},
                {"nilpotent_oracle_deviation", occ.nilpotent_oracle_deviation},
                {"nilpotent_propagator_residual", nilpotent_propagator_residual(model, grid_)},
                {"delta_gamma_N_residual", delta_gamma_n_check(model)},
                {"non_eigenstate_residual", non_eigen},
                {"classification_N", classification_json(cls)}};
    if (occ.closed_form_deviation >= 0.0) {
      out["closed_form_deviation"] = occ.closed_form_deviation;
      out["scalar_term_residual"] = scalar_term_check(model, label, grid_);
    } else {
      out["closed_form_deviation"] = nullptr;
      out["scalar_term_residual"] = nullptr;
    }
    return out;
  }

  const ScenarioConfig& cfg_;
  std::filesystem::path out_dir_;
  std::vector<double> grid_;
  std::optional<DmModel> model_;
  std::optional<StateTrajectory> traj_;
};

}  // namespace

RunReport run(const ScenarioConfig& config, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + out_dir.string() + "': " + ec.message());
  Runner runner(config, out_dir);
  RunReport report = runner.execute();
  report.artifacts.push_back("report.json");
  report.json["artifacts"] = report.artifacts;
  std::ofstream out(out_dir / "report.json", std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + (out_dir / "report.json").string() + "'");
  out << report.json.dump(2) << '\n';
  return report;
}

}  // namespace nhdyn

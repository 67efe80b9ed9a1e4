#include "cli.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "budgetid/bounds.hpp"
#include "budgetid/difficulty.hpp"
#include "budgetid/simulator.hpp"

#ifndef BUDGETID_VERSION
#define BUDGETID_VERSION "unknown"
#endif

namespace budgetid::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Bad flags, bad config or unsupported combinations: exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string cell_text(const Cell& c) {
  struct Visitor {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(double v) const { return format_number(v); }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(const std::string& v) const { return v; }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
    std::string operator()(const std::vector<double>& v) const {
      std::string s;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ';';
        s += format_number(v[i]);
      }
      return s;
    }
  };
  return std::visit(Visitor{}, c);
}

nlohmann::ordered_json cell_json(const Cell& c) {
  struct Visitor {
    nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
    nlohmann::ordered_json operator()(double v) const {
      if (!std::isfinite(v)) return format_number(v);
      return v;
    }
    nlohmann::ordered_json operator()(std::int64_t v) const { return v; }
    nlohmann::ordered_json operator()(const std::string& v) const { return v; }
    nlohmann::ordered_json operator()(bool v) const { return v; }
    nlohmann::ordered_json operator()(const std::vector<double>& v) const { return v; }
  };
  return std::visit(Visitor{}, c);
}

std::vector<double> to_vec(std::span<const double> s) { return {s.begin(), s.end()}; }

Cell opt(const std::optional<double>& v) {
  if (v) return *v;
  return std::monostate{};
}

// ---------------------------------------------------------------------------
// Config parsing. Every accessor throws UsageError with the offending key.

template <class T>
T get(const json& j, const char* key) {
  if (!j.contains(key)) throw UsageError(std::string("config is missing '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw UsageError(std::string("config key '") + key + "' has the wrong type");
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? get<T>(j, key) : fallback;
}

Family parse_family(const json& j) {
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (name == "bernoulli") return Family::bernoulli();
    if (name == "gaussian") return Family::gaussian();
    throw UsageError("unknown family '" + name + "'");
  }
  if (!j.is_object()) throw UsageError("family must be a name or an object");
  const auto kind = get<std::string>(j, "kind");
  if (kind == "bernoulli") return Family::bernoulli();
  if (kind == "gaussian") return Family::gaussian(get_or<double>(j, "variance", 1.0));
  throw UsageError("unknown family '" + kind + "'");
}

std::vector<Family> parse_families(const json& config, std::size_t K) {
  if (config.contains("families")) {
    const auto& arr = config.at("families");
    if (!arr.is_array() || arr.size() != K) throw UsageError("'families' needs one entry per arm");
    std::vector<Family> out;
    for (const auto& f : arr) out.push_back(parse_family(f));
    return out;
  }
  if (!config.contains("family")) throw UsageError("config is missing 'family'");
  return std::vector<Family>(K, parse_family(config.at("family")));
}

TaskSpec parse_task(const json& config) {
  if (!config.contains("task")) throw UsageError("config is missing 'task'");
  const json& t = config.at("task");
  const auto kind = t.is_string() ? t.get<std::string>() : get<std::string>(t, "kind");
  if (kind == "bai") return TaskSpec::best_arm();
  if (kind == "thresholding") return TaskSpec::thresholding(get<double>(t, "threshold"));
  if (kind == "positivity") return TaskSpec::positivity(get<double>(t, "threshold"));
  if (kind == "half_space") {
    return TaskSpec::half_space(get<std::vector<double>>(t, "normal"), get_or<double>(t, "offset", 0.0));
  }
  throw UsageError("unknown task '" + kind + "'");
}

std::vector<std::vector<double>> parse_instances(const json& config) {
  std::vector<std::vector<double>> out;
  if (config.contains("instance")) out.push_back(get<std::vector<double>>(config, "instance"));
  if (config.contains("instances")) {
    for (auto& v : get<std::vector<std::vector<double>>>(config, "instances")) out.push_back(v);
  }
  if (config.contains("instance_grid")) {
    // All ordered pairs (a, b), a != b, from an n-point grid on [lo, hi].
    const json& g = config.at("instance_grid");
    const double lo = get<double>(g, "lo");
    const double hi = get<double>(g, "hi");
    const auto n = get<std::size_t>(g, "n");
    if (n < 2 || !(lo < hi)) throw UsageError("instance_grid needs n >= 2 and lo < hi");
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const double a = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        const double b = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(n - 1);
        out.push_back({a, b});
      }
    }
  }
  if (out.empty()) throw UsageError("config has no 'instance', 'instances' or 'instance_grid'");
  return out;
}

BanditInstance make_instance(const json& config, const TaskSpec& task, std::vector<double> means) {
  auto families = parse_families(config, means.size());
  BanditInstance instance(std::move(families), std::move(means));
  const auto report = validate_instance(task, instance);
  if (!report.ok) throw UsageError("degenerate instance: " + report.issues.front());
  return instance;
}

TaskSpec normalized(const TaskSpec& task, const BanditInstance& instance) {
  return task.normalized_for(instance);
}

struct HSelector {
  std::string method = "auto";
  std::size_t resolution = 400;
  double min_weight = 0.0;
};

HSelector parse_selector(const json& config, const char* key) {
  HSelector s;
  if (!config.contains(key)) return s;
  const json& d = config.at(key);
  if (d.is_string()) {
    s.method = d.get<std::string>();
  } else {
    s.method = get_or<std::string>(d, "method", "auto");
    s.resolution = get_or<std::size_t>(d, "resolution", 400);
    s.min_weight = get_or<double>(d, "min_weight", 0.0);
  }
  static const char* known[] = {"auto", "closed_form", "optimizer", "grid", "h_delta"};
  if (std::find(std::begin(known), std::end(known), s.method) == std::end(known)) {
    throw UsageError("unknown difficulty method '" + s.method + "'");
  }
  return s;
}

DifficultyResult compute_difficulty(const TaskSpec& task, const BanditInstance& instance,
                                    const HSelector& s) {
  if (s.method == "grid") return grid_oracle(task, instance, s.resolution);
  if (s.method == "h_delta") {
    if (task.kind() != TaskKind::BestArm) throw UsageError("h_delta applies to best-arm tasks only");
    DifficultyResult r;
    r.H = h_delta(instance);
    r.inverse_rate = 1.0 / r.H;
    r.omega_star = Weights::uniform(instance.size());
    return r;
  }
  OracleOptions o;
  o.min_weight = s.min_weight;
  o.force_optimizer = s.method == "optimizer";
  auto r = oracle_difficulty_sp(task, instance, o);
  if (s.method == "closed_form" && r.method != Method::ClosedForm) {
    throw UsageError("no closed form exists for this task and instance");
  }
  return r;
}

// ---------------------------------------------------------------------------
// Commands. Each returns its table; nothing is written until all succeed.

struct Emission {
  std::string stem;
  Table table;
};

Emission cmd_difficulty(const json& config) {
  const TaskSpec raw_task = parse_task(config);
  const HSelector selector = parse_selector(config, "difficulty");
  const bool compare = config.contains("compare") && get<bool>(config, "compare");
  const auto means = parse_instances(config);

  std::vector<BanditInstance> instances;
  for (const auto& m : means) instances.push_back(make_instance(config, raw_task, m));

  Table t;
  t.columns = {"instance", "task", "means", "H", "inverse_rate", "omega_star", "lambda_star", "method", "x_star"};
  if (compare) {
    t.columns.insert(t.columns.end(), {"optimizer_H", "closed_vs_optimizer_gap"});
  }
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const TaskSpec task = normalized(raw_task, instances[i]);
    const auto r = compute_difficulty(task, instances[i], selector);
    const bool has_weights = selector.method != "h_delta";
    std::vector<Cell> row = {static_cast<std::int64_t>(i + 1),
                             std::string(to_string(task.kind())),
                             to_vec(instances[i].means()),
                             r.H,
                             r.inverse_rate,
                             has_weights ? Cell(to_vec(r.omega_star.values())) : Cell(std::monostate{}),
                             has_weights ? Cell(r.lambda_star) : Cell(std::monostate{}),
                             std::string(selector.method == "h_delta" ? "h_delta" : to_string(r.method)),
                             opt(r.x_star)};
    if (compare) {
      OracleOptions o;
      o.force_optimizer = true;
      o.min_weight = selector.min_weight;
      const auto other = oracle_difficulty_sp(task, instances[i], o);
      row.push_back(other.H);
      row.push_back(std::abs(r.H - other.H) / r.H);
    }
    t.rows.push_back(std::move(row));
  }
  return {"difficulty", std::move(t)};
}

AlgorithmFamily parse_algorithm(const json& config, std::size_t K) {
  if (!config.contains("algorithm")) throw UsageError("config is missing 'algorithm'");
  const json& a = config.at("algorithm");
  const auto kind = a.is_string() ? a.get<std::string>() : get<std::string>(a, "kind");
  if (kind == "uniform") return AlgorithmFamily::uniform();
  if (kind == "successive_rejects") return AlgorithmFamily::successive_rejects();
  if (kind == "successive_halving") return AlgorithmFamily::successive_halving();
  if (kind == "static_proportions") {
    if (!a.is_object()) throw UsageError("static_proportions needs 'weights'");
    auto w = get<std::vector<double>>(a, "weights");
    if (w.size() != K) throw UsageError("static_proportions weights need one entry per arm");
    return AlgorithmFamily::static_proportions(Weights(std::move(w)));
  }
  throw UsageError("unknown algorithm '" + kind + "'");
}

std::vector<std::size_t> parse_budgets(const json& config) {
  std::vector<std::size_t> budgets;
  if (config.contains("T_list")) budgets = get<std::vector<std::size_t>>(config, "T_list");
  else if (config.contains("T")) budgets.push_back(get<std::size_t>(config, "T"));
  else throw UsageError("config needs 'T' or 'T_list'");
  if (budgets.empty()) throw UsageError("'T_list' is empty");
  for (std::size_t i = 1; i < budgets.size(); ++i) {
    if (budgets[i] <= budgets[i - 1]) throw UsageError("'T_list' must be increasing");
  }
  return budgets;
}

Emission cmd_simulate(const json& config, std::uint64_t seed, unsigned workers, std::ostream& err) {
  const TaskSpec raw_task = parse_task(config);
  const auto means = parse_instances(config);
  if (means.size() != 1) throw UsageError("simulate takes exactly one instance");
  const BanditInstance instance = make_instance(config, raw_task, means.front());
  const TaskSpec task = normalized(raw_task, instance);
  const AlgorithmFamily alg = parse_algorithm(config, instance.size());
  const auto budgets = parse_budgets(config);
  const auto n_reps = get<std::uint64_t>(config, "n_reps");
  if (n_reps == 0) throw UsageError("'n_reps' must be positive");
  for (std::size_t T : budgets) {
    if (T < instance.size()) throw UsageError("every budget must be at least K");
  }
  const HSelector selector = parse_selector(config, "H");
  const double H = compute_difficulty(task, instance, selector).H;

  std::optional<double> limit;
  if (alg.kind() == AlgorithmKind::Uniform) {
    limit = sp_rate(task, instance, Weights::uniform(instance.size()));
  } else if (alg.kind() == AlgorithmKind::StaticProportions) {
    limit = sp_rate(task, instance, *alg.weights());
  }

  Table t;
  t.columns = {"T", "algorithm", "replications", "errors", "p_hat", "ci_low", "ci_high", "h_hat",
               "pre_asymptotic", "H", "ratio_hat", "sp_rate_limit", "mean_pull_fractions"};
  SimOptions so;
  so.workers = workers;
  so.H = H;
  for (std::size_t T : budgets) {
    const SimResult r = estimate_error(alg, task, instance, T, n_reps, seed, so);
    err << "simulate: T=" << T << " errors=" << r.errors << "/" << r.replications << "\n";
    t.rows.push_back({static_cast<std::int64_t>(T), std::string(to_string(alg.kind())),
                      static_cast<std::int64_t>(r.replications), static_cast<std::int64_t>(r.errors),
                      r.p_hat, r.ci_low, r.ci_high, opt(r.h_hat), r.pre_asymptotic, H, opt(r.ratio_hat),
                      opt(limit), r.mean_pull_fractions});
  }
  return {"simulate", std::move(t)};
}

std::pair<int, int> parse_decades(const std::string& spec) {
  const auto colon = spec.find(':');
  try {
    if (colon == std::string::npos) {
      const int d = std::stoi(spec);
      return {d, d};
    }
    return {std::stoi(spec.substr(0, colon)), std::stoi(spec.substr(colon + 1))};
  } catch (const std::exception&) {
    throw UsageError("--x-decades expects a:b, got '" + spec + "'");
  }
}

Emission bound_bernoulli(int first, int last) {
  if (first < 1 || last < first || last > 300) {
    throw UsageError("--x-decades needs 1 <= a <= b <= 300");
  }
  const auto [limit1, limit2] = bernoulli_two_arm_limits();
  Table t;
  t.columns = {"decade", "x", "bound", "term_lambda1", "term_lambda2", "limit_lambda1", "limit_bound"};
  for (int d = first; d <= last; ++d) {
    const double x = std::pow(10.0, -d);
    const auto r = bernoulli_two_arm_bound(x);
    t.rows.push_back({static_cast<std::int64_t>(d), x, r.lower_bound, r.contributions[0],
                      r.contributions[1], limit1, limit1 + limit2});
  }
  return {"bound_bernoulli_two_arm", std::move(t)};
}

Emission bound_gaussian(const std::vector<std::size_t>& Ks, double delta) {
  if (Ks.empty()) throw UsageError("--K needs at least one value");
  for (std::size_t K : Ks) {
    if (K < 2 || K > 10'000'000) throw UsageError("--K values must lie in [2, 1e7]");
  }
  if (!(delta > 0.0)) throw UsageError("--delta must be positive");
  Table t;
  t.columns = {"K", "delta", "bound_h_delta", "floor", "bound_csp", "csp_floor", "bound_over_logK"};
  for (std::size_t K : Ks) {
    const auto r = gaussian_bai_bound(K, delta);
    t.rows.push_back({static_cast<std::int64_t>(K), delta, r.ratio.lower_bound, r.floor, r.csp_bound,
                      r.csp_floor, r.ratio.lower_bound / std::log(static_cast<double>(K))});
  }
  return {"bound_gaussian_logk", std::move(t)};
}

std::vector<double> default_ell_sweep(const Family& f, double theta) {
  std::vector<double> ells;
  if (f.is_bernoulli()) {
    for (int d = 1; d <= 12; ++d) {
      const double ell = std::pow(10.0, -d);
      if (ell < theta) ells.push_back(ell);
    }
  } else {
    for (int d = 0; d <= 6; ++d) ells.push_back(theta - std::pow(10.0, d));
  }
  return ells;
}

Emission bound_positivity(const Family& f, const std::vector<std::size_t>& Ks, double m, double theta,
                          std::optional<double> ell, bool sweep) {
  if (Ks.empty()) throw UsageError("--K needs at least one value");
  if (!(theta < m) || !f.in_mean_domain(m) || !f.in_mean_domain(theta)) {
    throw UsageError("positivity needs theta < m inside the mean domain");
  }
  std::vector<double> ells;
  if (sweep) ells = default_ell_sweep(f, theta);
  if (ell) ells.push_back(*ell);
  if (ells.empty()) throw UsageError("give --ell or --sweep-ell");
  for (double l : ells) {
    if (!(l < theta) || !f.in_mean_domain(l)) throw UsageError("ell must lie below theta in the mean domain");
  }
  Table t;
  t.columns = {"family", "K", "m", "theta", "ell", "bound", "bound_over_K"};
  for (std::size_t K : Ks) {
    if (K < 1 || K > 10000) throw UsageError("--K values must lie in [1, 10000]");
    for (double l : ells) {
      const auto r = positivity_bound(f, K, m, l, theta);
      t.rows.push_back({std::string(to_string(f.kind())), static_cast<std::int64_t>(K), m, theta, l,
                        r.lower_bound, r.lower_bound / static_cast<double>(K)});
    }
  }
  return {"bound_positivity", std::move(t)};
}

Emission bound_halfspace(std::vector<double> u, double margin, double delta, std::size_t levels) {
  if (u.size() < 2) throw UsageError("--normal needs at least two entries");
  if (!(margin > 0.0) || !(delta > 0.0)) throw UsageError("--margin and --delta must be positive");
  if (levels < 1 || levels > 12) throw UsageError("--levels must lie in [1, 12]");
  const std::size_t K = u.size();
  const Family g = Family::gaussian();
  const TaskSpec task = TaskSpec::half_space(std::move(u), 0.0)
                            .normalized_for(BanditInstance(g, std::vector<double>(K, 0.0)));
  // mu sits at offset -margin from the hyperplane through the origin.
  std::vector<double> mu(K, 0.0);
  double unorm = 0.0;
  for (double v : task.normal()) unorm += v * v;
  for (std::size_t k = 0; k < K; ++k) mu[k] = -margin * task.normal()[k] / unorm;
  const auto sweep = half_space_boundary_sweep(task, BanditInstance(g, mu), delta, levels);
  Table t;
  t.columns = {"level", "alternatives", "bound", "omega"};
  for (const auto& p : sweep) {
    t.rows.push_back({static_cast<std::int64_t>(p.level), static_cast<std::int64_t>(p.alternatives),
                      p.ratio.lower_bound, to_vec(p.ratio.omega->values())});
  }
  return {"bound_halfspace", std::move(t)};
}

Emission cmd_bound(const json& config) {
  const auto kind = get<std::string>(config, "kind");
  if (kind == "bernoulli-two-arm") {
    const auto [a, b] = parse_decades(get_or<std::string>(config, "x_decades", "3:12"));
    return bound_bernoulli(a, b);
  }
  if (kind == "gaussian-logk") {
    return bound_gaussian(get_or<std::vector<std::size_t>>(config, "K", {10, 100, 1000}),
                          get_or<double>(config, "delta", 1.0));
  }
  if (kind == "positivity") {
    const Family f = config.contains("family") ? parse_family(config.at("family")) : Family::bernoulli();
    const double theta = get_or<double>(config, "theta", f.is_bernoulli() ? 0.5 : 0.0);
    const double m = get_or<double>(config, "m", f.is_bernoulli() ? 0.6 : 1.0);
    std::optional<double> ell;
    if (config.contains("ell")) ell = get<double>(config, "ell");
    return bound_positivity(f, get_or<std::vector<std::size_t>>(config, "K", {5}), m, theta, ell,
                            get_or<bool>(config, "sweep_ell", false));
  }
  if (kind == "halfspace") {
    return bound_halfspace(get_or<std::vector<double>>(config, "normal", {1.0, -2.0}),
                           get_or<double>(config, "margin", 1e-3), get_or<double>(config, "delta", 1.0),
                           get_or<std::size_t>(config, "levels", 7));
  }
  throw UsageError("unknown bound '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Reproduce bundles: fixed configs, only seed and replications can change.

json bundle_config(const std::string& name) {
  if (name == "bernoulli-limit") return {{"command", "bound"}, {"kind", "bernoulli-two-arm"}, {"x_decades", "1:40"}};
  if (name == "gaussian-logk") {
    return {{"command", "bound"}, {"kind", "gaussian-logk"}, {"K", {10, 100, 1000, 10000, 100000}}, {"delta", 1.0}};
  }
  if (name == "positivity-k") {
    return {{"command", "bound"}, {"kind", "positivity"}, {"family", "bernoulli"}, {"K", {2, 5, 10}},
            {"theta", 0.5}, {"m", 0.6}, {"sweep_ell", true}};
  }
  if (name == "halfspace-one") {
    return {{"command", "bound"}, {"kind", "halfspace"}, {"normal", {1.0, -2.0}}, {"margin", 1e-3},
            {"delta", 1.0}, {"levels", 8}};
  }
  if (name == "sp-rate-ldp") {
    return {{"command", "simulate"}, {"task", "bai"}, {"family", "bernoulli"}, {"instance", {0.6, 0.4}},
            {"algorithm", "uniform"}, {"T_list", {100, 200, 400}}, {"n_reps", 100000}};
  }
  return nullptr;
}

Emission run_reproduce(const std::string& name, json& config, std::uint64_t seed, unsigned workers,
                       std::ostream& err) {
  Emission e = config.at("command") == "simulate" ? cmd_simulate(config, seed, workers, err) : cmd_bound(config);
  if (name == "sp-rate-ldp") {
    // Relative distance of the empirical rate to its limit.
    Table& t = e.table;
    const auto col = [&](const char* c) {
      return static_cast<std::size_t>(std::find(t.columns.begin(), t.columns.end(), c) - t.columns.begin());
    };
    const std::size_t h = col("h_hat");
    const std::size_t lim = col("sp_rate_limit");
    t.columns.push_back("relative_gap");
    for (auto& row : t.rows) {
      if (std::holds_alternative<double>(row[h])) {
        const double limit = std::get<double>(row[lim]);
        row.push_back(std::abs(std::get<double>(row[h]) - limit) / limit);
      } else {
        row.push_back(std::monostate{});
      }
    }
  }
  e.stem = name;
  return e;
}

// ---------------------------------------------------------------------------
// Output

void stamp(Table& t, const std::string& hash, std::uint64_t seed) {
  t.columns.push_back("config_hash");
  t.columns.push_back("seed");
  for (auto& row : t.rows) {
    row.push_back(hash);
    row.push_back(static_cast<std::int64_t>(seed));
  }
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + path.string());
  f << text;
  if (!f) throw UsageError("cannot write " + path.string());
}

void emit(const Emission& e, const json& config, std::uint64_t seed, const std::optional<std::string>& out_dir,
          std::ostream& out) {
  const std::string csv = to_csv(e.table);
  if (!out_dir) {
    out << csv;
    return;
  }
  nlohmann::ordered_json doc;
  doc["config_hash"] = config_hash(config);
  doc["seed"] = seed;
  doc["rows"] = to_json(e.table);
  nlohmann::ordered_json manifest;
  manifest["name"] = e.stem;
  manifest["version"] = version();
  manifest["seed"] = seed;
  manifest["config_hash"] = config_hash(config);
  manifest["config"] = config;
  manifest["files"] = {e.stem + ".csv", e.stem + ".json"};

  const fs::path dir(*out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw UsageError("cannot create output directory " + dir.string());
  write_file(dir / (e.stem + ".csv"), csv);
  write_file(dir / (e.stem + ".json"), doc.dump(2) + "\n");
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

json load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read config " + path);
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw UsageError("malformed config " + path + ": " + e.what());
  }
}

std::vector<std::size_t> parse_size_list(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      const long long v = std::stoll(item, &pos);
      if (pos != item.size() || v < 0) throw std::invalid_argument(item);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw UsageError("expected a comma-separated list of integers, got '" + s + "'");
    }
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("expected a comma-separated list of numbers, got '" + s + "'");
    }
  }
  return out;
}

}  // namespace

std::string to_csv(const Table& table) {
  std::string s;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) s += ',';
    s += table.columns[i];
  }
  s += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) s += ',';
      s += cell_text(row[i]);
    }
    s += '\n';
  }
  return s;
}

nlohmann::ordered_json to_json(const Table& table) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) obj[table.columns[i]] = cell_json(row[i]);
    rows.push_back(std::move(obj));
  }
  return rows;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string config_hash(const nlohmann::json& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a64(config.dump()));
  return buf;
}

std::vector<std::string> reproduce_names() {
  return {"bernoulli-limit", "gaussian-logk", "positivity-k", "halfspace-one", "sp-rate-ldp"};
}

const char* version() { return BUDGETID_VERSION; }

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Oracle difficulties, lower bounds and fixed-budget simulations", "budgetid"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version()));

  std::string config_path;
  std::optional<std::uint64_t> seed;
  unsigned workers = 0;
  std::optional<std::string> out_dir;
  app.add_option("--config", config_path, "JSON experiment config");
  app.add_option("--seed", seed, "master seed (overrides the config)");
  app.add_option("--workers", workers, "simulation threads, 0 = all cores");
  app.add_option("--out", out_dir, "output directory; CSV goes to stdout when absent");

  auto* difficulty = app.add_subcommand("difficulty", "oracle difficulty of each configured instance");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo error estimate of an algorithm");

  auto* bound = app.add_subcommand("bound", "lower-bound constructions");
  bound->require_subcommand(1);
  std::string decades = "3:12";
  auto* b_bern = bound->add_subcommand("bernoulli-two-arm", "two-arm Bernoulli construction");
  b_bern->add_option("--x-decades", decades, "range a:b of d with x = 10^-d");
  std::string gauss_K = "10,100,1000";
  double gauss_delta = 1.0;
  auto* b_gauss = bound->add_subcommand("gaussian-logk", "Gaussian best-arm log K construction");
  b_gauss->add_option("--K", gauss_K, "comma-separated arm counts");
  b_gauss->add_option("--delta", gauss_delta, "gap scale");
  std::string pos_K = "5";
  std::string pos_family = "bernoulli";
  double pos_m = std::nan("");
  double pos_theta = std::nan("");
  std::optional<double> pos_ell;
  bool pos_sweep = false;
  auto* b_pos = bound->add_subcommand("positivity", "positivity factor-K construction");
  b_pos->add_option("--K", pos_K, "comma-separated arm counts");
  b_pos->add_option("--family", pos_family, "bernoulli or gaussian");
  b_pos->add_option("--m", pos_m, "common mean above the threshold");
  b_pos->add_option("--theta", pos_theta, "threshold");
  b_pos->add_option("--ell", pos_ell, "perturbed mean below the threshold");
  b_pos->add_flag("--sweep-ell", pos_sweep, "sweep ell toward the lower end of the domain");
  std::string hs_normal = "1,-2";
  double hs_margin = 1e-3;
  double hs_delta = 1.0;
  std::size_t hs_levels = 7;
  auto* b_hs = bound->add_subcommand("halfspace", "Gaussian half-space boundary sweep");
  b_hs->add_option("--normal", hs_normal, "comma-separated normal vector");
  b_hs->add_option("--margin", hs_margin, "distance of mu to the hyperplane");
  b_hs->add_option("--delta", hs_delta, "distance of the alternatives across the hyperplane");
  b_hs->add_option("--levels", hs_levels, "dyadic refinement levels");

  std::string bundle;
  auto* reproduce = app.add_subcommand("reproduce", "run a named experiment bundle");
  reproduce->add_option("name", bundle, "bundle name")->required();

  std::vector<std::string> argv_tail(args.rbegin(), args.rend());
  if (!argv_tail.empty()) argv_tail.pop_back();
  try {
    app.parse(argv_tail);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << version() << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "budgetid: " << e.what() << "\n";
    return kUsage;
  }

  try {
    json config = json::object();
    if (!config_path.empty()) config = load_config(config_path);
    if (!config.is_object()) throw UsageError("config must be a JSON object");
    Emission emission;
    std::uint64_t effective_seed = 0;

    if (difficulty->parsed()) {
      config["command"] = "difficulty";
      if (seed) config["seed"] = *seed;
      effective_seed = get_or<std::uint64_t>(config, "seed", 0);
      emission = cmd_difficulty(config);
    } else if (simulate->parsed()) {
      config["command"] = "simulate";
      if (seed) config["seed"] = *seed;
      if (!config.contains("seed")) throw UsageError("simulate needs a seed (--seed or 'seed' in the config)");
      effective_seed = get<std::uint64_t>(config, "seed");
      emission = cmd_simulate(config, effective_seed, workers, err);
    } else if (bound->parsed()) {
      config = json::object();
      config["command"] = "bound";
      if (b_bern->parsed()) {
        config["kind"] = "bernoulli-two-arm";
        config["x_decades"] = decades;
      } else if (b_gauss->parsed()) {
        config["kind"] = "gaussian-logk";
        config["K"] = parse_size_list(gauss_K);
        config["delta"] = gauss_delta;
      } else if (b_pos->parsed()) {
        config["kind"] = "positivity";
        config["family"] = pos_family;
        config["K"] = parse_size_list(pos_K);
        if (!std::isnan(pos_m)) config["m"] = pos_m;
        if (!std::isnan(pos_theta)) config["theta"] = pos_theta;
        if (pos_ell) config["ell"] = *pos_ell;
        config["sweep_ell"] = pos_sweep;
      } else {
        config["kind"] = "halfspace";
        config["normal"] = parse_double_list(hs_normal);
        config["margin"] = hs_margin;
        config["delta"] = hs_delta;
        config["levels"] = hs_levels;
      }
      effective_seed = seed.value_or(0);
      config["seed"] = effective_seed;
      emission = cmd_bound(config);
    } else if (reproduce->parsed()) {
      const auto names = reproduce_names();
      if (std::find(names.begin(), names.end(), bundle) == names.end()) {
        std::string list;
        for (const auto& n : names) list += "\n  " + n;
        throw UsageError("unknown bundle '" + bundle + "'; valid names:" + list);
      }
      const bool override_reps = config.contains("n_reps");
      const json overrides = config;
      config = bundle_config(bundle);
      if (override_reps && config.at("command") == "simulate") config["n_reps"] = overrides.at("n_reps");
      effective_seed = seed.value_or(1);
      config["seed"] = effective_seed;
      config["bundle"] = bundle;
      emission = run_reproduce(bundle, config, effective_seed, workers, err);
      if (!out_dir) out_dir = "reproduce/" + bundle;
    }

    stamp(emission.table, config_hash(config), effective_seed);
    emit(emission, config, effective_seed, out_dir, out);
    return kOk;
  } catch (const UsageError& e) {
    err << "budgetid: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "budgetid: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return e.kind() == ErrorKind::OptimizerFailure ? kNumerical : kUsage;
  } catch (const json::exception& e) {
    err << "budgetid: config error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "budgetid: " << e.what() << "\n";
    return kNumerical;
  }
}

}  // namespace budgetid::cli

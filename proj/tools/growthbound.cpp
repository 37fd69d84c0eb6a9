// growthbound: batch front end for scenario runs, bounds and probes.

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <nlohmann/json.hpp>
#include <thread>

#include "growthbound/config.hpp"
#include "growthbound/harness.hpp"

using namespace growthbound;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

enum Exit { kPass = 0, kViolations = 1, kConfig = 2, kRuntime = 3 };

struct Options {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::optional<int> grid;
  std::optional<double> tol;
};

json num(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

json point_json(const Point& x, int k) {
  json a = json::array();
  for (int i = 0; i < k; ++i) a.push_back(x[i]);
  return a;
}

std::string stamp_line(const std::string& command) {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return std::string("# growthbound ") + command + " " + buf;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw ArgumentError("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

json envelope(const std::string& command, const Config& cfg) {
  json j;
  j["command"] = command;
  j["scenario"] = cfg.scenario.name;
  j["seed"] = cfg.scenario.seed;
  j["config_path"] = cfg.path;
  j["config"] = json::parse(cfg.resolved_json);
  return j;
}

fs::path scenario_dir(const Options& o, const Config& cfg) {
  const fs::path dir = fs::path(o.out) / cfg.scenario.name;
  fs::create_directories(dir);
  return dir;
}

Overrides overrides(const Options& o) { return Overrides{o.seed, o.grid, o.tol}; }

std::vector<Config> load_all(const Options& o) {
  std::vector<Config> out;
  for (const auto& p : expand_config_paths(o.config)) out.push_back(load_config(p, overrides(o)));
  return out;
}

// ---------------------------------------------------------------- commands

int cmd_verify(const Options& o, const std::vector<Config>& cfgs) {
  const std::string stamp = stamp_line("verify");
  std::vector<Report> reports(cfgs.size());
  std::vector<std::string> errors(cfgs.size());
  std::atomic<std::size_t> next{0};
  RunOptions ro;
  ro.out_dir = o.out;
  ro.stamp = stamp;
  auto worker = [&] {
    for (std::size_t i = next++; i < cfgs.size(); i = next++) {
      const auto t0 = std::chrono::steady_clock::now();
      spdlog::info("scenario {} started", cfgs[i].scenario.name);
      try {
        reports[i] = run_scenario(cfgs[i].scenario, ro);
      } catch (const Error& e) {
        errors[i] = e.kind() + ": " + e.what();
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
      spdlog::info("scenario {} finished in {:.1f} s", cfgs[i].scenario.name,
                   std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
  };
  std::vector<std::thread> pool;
  for (int j = 0; j < std::max(1, std::min<int>(o.jobs, static_cast<int>(cfgs.size()))); ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  json summary;
  summary["command"] = "verify";
  summary["config_path"] = o.config;
  json rows = json::array();
  std::ostringstream text;
  bool all_pass = true, any_error = false;
  long violations = 0;
  for (std::size_t i = 0; i < cfgs.size(); ++i) {
    json row;
    row["scenario"] = cfgs[i].scenario.name;
    row["seed"] = cfgs[i].scenario.seed;
    if (!errors[i].empty()) {
      row["error"] = errors[i];
      any_error = true;
      text << "ERROR " << cfgs[i].scenario.name << ": " << errors[i] << '\n';
      rows.push_back(row);
      continue;
    }
    const Report& r = reports[i];
    row["pass"] = r.pass();
    row["assertions"] = r.assertions.size();
    row["failed"] = r.violations();
    row["planted"] = r.planted;
    row["unexpected"] = r.unexpected;
    row["missing"] = r.missing;
    row["seconds"] = r.seconds;
    row["u_type"] = r.u_type;
    row["hypothesis_margin"] = num(r.hypothesis_margin);
    rows.push_back(row);
    all_pass &= r.pass();
    long unplanned = 0;
    for (const auto& a : r.assertions)
      if (!a.passed && std::find(r.planted.begin(), r.planted.end(), a.name) == r.planted.end())
        unplanned += std::max<long>(1, a.violations);
    violations += unplanned;
    text << (r.pass() ? "PASS  " : "FAIL  ") << r.scenario << "  (" << r.assertions.size() << " assertions, "
         << r.planted.size() << " planted, " << r.unexpected.size() << " unexpected, " << r.missing.size()
         << " missing, " << format_double(std::round(r.seconds * 10) / 10) << " s)\n";
    for (const auto& n : r.unexpected) text << "      unexpected failure: " << n << '\n';
    for (const auto& n : r.missing) text << "      planted fault not detected: " << n << '\n';
  }
  summary["scenarios"] = rows;
  summary["unplanned_violations"] = violations;
  summary["pass"] = all_pass && !any_error;
  fs::create_directories(o.out);
  write_json(fs::path(o.out) / "summary.json", summary);
  std::ofstream(fs::path(o.out) / "summary.txt") << text.str();
  std::cout << text.str();
  if (any_error) return kRuntime;
  return all_pass ? kPass : kViolations;
}

int cmd_improve(const Options& o, const Config& cfg) {
  const Scenario& s = cfg.scenario;
  if (!s.lipschitz && !s.admissible) throw ConfigFieldError("/", "improve needs a lipschitz or admissible block");
  const std::string stamp = stamp_line("improve");
  std::vector<std::string> notes;
  const auto bounds = scenario_bounds(s, notes);
  json j = envelope("improve", cfg);
  json arr = json::array();
  const fs::path dir = scenario_dir(o, cfg) / "improve";
  fs::create_directories(dir);
  for (const auto& b : bounds) {
    const std::string name = method_name(b.method);
    const auto grid = log_grid(1e-6 * b.tau, b.tau, cfg.improve.points);
    const fs::path csv = dir / (name + ".csv");
    {
      std::ofstream os(csv);
      if (!os) throw ArgumentError("cannot write " + csv.string());
      os << stamp << '\n' << "d,h\n";
      for (double d : grid) os << format_double(d) << ',' << format_double(b(d)) << '\n';
    }
    json e = json::parse(improved_bound_json(b));
    e["csv"] = csv.filename().string();
    arr.push_back(e);
  }
  j["bounds"] = arr;
  if (s.admissible) {
    if (const auto* ep = s.g.as<DecreasingFn::ExpPower>(); ep && ep->alpha < 1.0) {
      const double x = asymptotic_exponent(s.g, scenario_admissibility(s), s.admissible->a, cfg.improve.exponent_t_lo,
                                           cfg.improve.exponent_t_hi);
      j["asymptotic_exponent"] = {{"value", num(x)},
                                  {"expected", ep->alpha / (1.0 - ep->alpha)},
                                  {"t_lo", cfg.improve.exponent_t_lo},
                                  {"t_hi", cfg.improve.exponent_t_hi}};
    }
  }
  j["notes"] = notes;
  write_json(dir / "improve.json", j);
  std::cout << "improve: " << bounds.size() << " bound(s) written to " << dir.string() << '\n';
  return kPass;
}

int cmd_domar(const Options& o, const Config& cfg) {
  const Scenario& s = cfg.scenario;
  if (!s.domar) throw ConfigFieldError("/domar", "required field missing");
  const std::string stamp = stamp_line("domar-bound");
  const double spacing = Grid::over(s.omega, s.grid.nodes).spacing();
  const DomarPair maj = domar_majorants(s, spacing);
  const fs::path dir = scenario_dir(o, cfg) / "domar";
  fs::create_directories(dir);
  const int n = cfg.improve.points;
  const double lam = s.domar->lambda;
  std::vector<double> t_grid, nu_grid;
  for (double v : log_grid(1e-3, 64.0, n)) {
    t_grid.push_back(lam + 1.0 + v);
    nu_grid.push_back(lam + v);
  }
  write_theorem_a_csv(maj.A, t_grid, (dir / "theorem_a.csv").string(), stamp);
  write_theorem_b_csv(maj.B, nu_grid, (dir / "theorem_b.csv").string(), stamp);
  {
    std::ofstream os(dir / "bounds.csv");
    os << stamp << '\n' << "dist,bound_A,bound_B\n";
    for (double d : log_grid(1e-4 * s.omega.inradius(), s.omega.inradius(), n))
      os << format_double(d) << ',' << format_double(bound_A_at(d, maj.A)) << ',' << format_double(bound_B_at(d, maj.B))
         << '\n';
  }
  auto constants = [](const DomarConstants& c) {
    return json{{"a", c.a}, {"exponent", c.exponent}, {"lambda", c.lambda}, {"D", c.D}, {"S1", c.S1}, {"k", c.k}};
  };
  json j = envelope("domar-bound", cfg);
  j["grid_spacing"] = spacing;
  j["obstacle_cap"] = num(maj.sup_F);
  j["theorem_a"] = {{"eps", maj.A.eps}, {"constants", constants(maj.A.constants)}};
  j["theorem_b"] = {{"p_star", maj.B.p_star}, {"q_star", maj.B.q_star}, {"constants", constants(maj.B.constants)},
                    {"mu_source", maj.B.mu.source}, {"admissibility_constant", maj.C_S}};
  j["largest_sampled_obstacle"] = num(maj.resolved_level);
  write_json(dir / "domar.json", j);
  std::cout << "domar-bound: majorants written to " << dir.string() << '\n';
  return kPass;
}

int cmd_perron(const Options& o, const Config& cfg) {
  const Scenario& s = cfg.scenario;
  Grid grid = Grid::over(s.omega, s.grid.nodes);
  if (cfg.perron.free_near_B) grid.free_near(s.B, grid.spacing());
  std::vector<double> F;
  if (!cfg.perron.obstacle_csv.empty()) {
    F = read_obstacle_csv(grid, cfg.perron.obstacle_csv);
    for (std::size_t i = 0; i < F.size(); ++i)
      if (std::isnan(F[i])) throw ConfigFieldError("/perron/obstacle_csv", "no value for node " + std::to_string(i));
  } else {
    const auto obstacle = scenario_obstacle(s, scenario_cap(s, grid.spacing()));
    F.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) F[i] = obstacle(grid.node(i));
  }
  const std::string stamp = stamp_line("perron");
  PerronOptions po;
  po.tol = s.grid.tol;
  po.relaxation = s.grid.over_relax ? optimal_relaxation(grid) : 1.0;
  const auto t0 = std::chrono::steady_clock::now();
  const PerronResult r = largest_subharmonic_minorant(F, grid, po);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const fs::path dir = scenario_dir(o, cfg) / "perron";
  fs::create_directories(dir);
  write_field_csv(r, grid, (dir / "field.csv").string(), stamp);
  json j = envelope("perron", cfg);
  j["grid"] = {{"nodes", s.grid.nodes}, {"spacing", grid.spacing()}, {"size", grid.size()}};
  j["solver"] = {{"schedule", "red_black"}, {"relaxation", po.relaxation}, {"iterations", r.iterations},
                 {"residual", num(r.residual)}, {"tol", r.tol}, {"converged", r.converged},
                 {"active_fraction", r.active_fraction}, {"seconds", secs}};
  bool pass = r.converged;
  if (cfg.perron.oracle) {
    PerronOptions jo;
    jo.tol = po.tol;
    jo.schedule = Schedule::Jacobi;
    const PerronResult q = largest_subharmonic_minorant(F, grid, jo);
    double diff = 0.0, scale = 1.0;
    for (std::size_t i = 0; i < F.size(); ++i) {
      diff = std::max(diff, std::abs(r.M[i] - q.M[i]));
      if (std::isfinite(F[i])) scale = std::max(scale, std::abs(F[i]));
    }
    const double threshold = cfg.perron.oracle_tol * scale;
    j["oracle"] = {{"schedule", "jacobi"}, {"iterations", q.iterations}, {"converged", q.converged},
                   {"max_abs_difference", diff}, {"threshold", threshold}, {"pass", q.converged && diff <= threshold}};
    pass &= q.converged && diff <= threshold;
  }
  j["pass"] = pass;
  write_json(dir / "perron.json", j);
  std::cout << "perron: " << r.iterations << " sweeps, residual " << format_double(r.residual)
            << (pass ? ", pass" : ", FAIL") << '\n';
  return pass ? kPass : kViolations;
}

int cmd_admissibility(const Options& o, const Config& cfg) {
  const Scenario& s = cfg.scenario;
  const auto& ad = cfg.admissibility;
  const SetDescr set = ad.set == "A" ? s.A : ad.set == "B" ? s.B : SetDescr::union_of({s.A, s.B});
  const auto est = admissibility_constant(set, ad.p_star, ad.schedule, derive_seed(s.seed, 31));
  json j = envelope("admissibility", cfg);
  j["set"] = {{"name", ad.set}, {"description", set.describe()}};
  j["estimate"] = {{"p_star", est.p_star},
                   {"q_star", est.q_star},
                   {"C_hat", num(est.C_hat)},
                   {"C1", num(est.C1())},
                   {"probes", est.probes},
                   {"samples_per_probe", est.samples_per_probe},
                   {"worst_sigma", est.worst_sigma},
                   {"worst_radius", est.worst_radius},
                   {"worst_center", point_json(est.worst_center, s.k)},
                   {"worst_ratio_std_error", num(est.worst_ratio_std_error)}};
  if (!ad.scale_pairs.empty()) {
    const double dim = assouad_estimate(set, ad.scale_pairs, ad.assouad_centers, derive_seed(s.seed, 37));
    j["assouad_estimate"] = num(dim);
  }
  const fs::path dir = scenario_dir(o, cfg);
  write_json(dir / "admissibility.json", j);
  std::cout << "admissibility: C_hat " << format_double(est.C_hat);
  if (j.contains("assouad_estimate")) std::cout << ", Assouad estimate " << j["assouad_estimate"].dump();
  std::cout << '\n';
  return kPass;
}

int cmd_compare(const Options& o, const Config& cfg) {
  if (!cfg.scenario.domar) throw ConfigFieldError("/domar", "required field missing");
  const std::string stamp = stamp_line("compare");
  const Comparison c = compare_bounds(cfg.scenario, cfg.compare_points);
  const fs::path dir = scenario_dir(o, cfg);
  write_comparison_csv(c, (dir / "compare.csv").string(), stamp);
  json j = envelope("compare", cfg);
  j["rows"] = c.rows.size();
  j["ratio_increasing"] = c.ratio_increasing;
  j["stop_distance"] = c.stop_distance;
  j["largest_sampled_obstacle"] = num(c.resolved_level);
  write_json(dir / "compare.json", j);
  std::cout << "compare: " << c.rows.size() << " rows, ratio " << (c.ratio_increasing ? "increasing" : "not increasing")
            << " toward the boundary\n";
  return kPass;
}

json margin_stats(std::vector<double> m) {
  m.erase(std::remove_if(m.begin(), m.end(), [](double v) { return std::isnan(v); }), m.end());
  if (m.empty()) return json{{"count", 0}};
  std::sort(m.begin(), m.end());
  return json{{"count", m.size()}, {"min", num(m.front())}, {"median", num(m[m.size() / 2])},
              {"p10", num(m[m.size() / 10])}, {"max", num(m.back())}};
}

int cmd_probe(const Options& o, const Config& cfg) {
  const Scenario& s = cfg.scenario;
  const std::string stamp = stamp_line("probe");
  const Grid whole = Grid::over(s.omega, s.grid.nodes);
  const double h = whole.spacing();
  const auto obstacle = scenario_obstacle(s, scenario_cap(s, h));
  std::vector<double> F(whole.size());
  for (std::size_t i = 0; i < whole.size(); ++i) F[i] = obstacle(whole.node(i));
  PerronOptions po;
  po.tol = s.grid.tol;
  po.relaxation = s.grid.over_relax ? optimal_relaxation(whole) : 1.0;
  Grid free = whole;
  free.free_near(s.B, h);
  const PerronResult M = largest_subharmonic_minorant(F, free, po);
  std::vector<std::string> notes;
  std::vector<ImprovedBound> bounds;
  if (s.lipschitz || s.admissible) bounds = scenario_bounds(s, notes);
  double tau = s.omega.inradius();
  for (const auto& b : bounds) tau = std::min(tau, b.tau);

  const fs::path dir = scenario_dir(o, cfg) / "probe";
  fs::create_directories(dir);
  json j = envelope("probe", cfg);
  j["grid"] = {{"nodes", s.grid.nodes}, {"spacing", h}};
  j["notes"] = notes;

  // Questions 1 and 4: the largest v with M(x) <= g(v dist(x, B)) at each node near B.
  {
    const DecreasingFn ginv = gen_inverse(s.g);
    std::ofstream os(dir / "q1_v_needed.csv");
    os << stamp << '\n' << "dist_B,M,g_dist_B,v_needed\n";
    double v_min = kInfinity;
    long used = 0;
    for (std::size_t i = 0; i < whole.size(); ++i) {
      if (free.kind(i) != Grid::Node::Interior) continue;
      const double d = s.B.dist(whole.node(i));
      if (!(d > 0.0 && d < tau)) continue;
      const double lo = ginv.domain().lo;
      const double v = M.M[i] > lo ? ginv(M.M[i]) / d : kInfinity;
      os << format_double(d) << ',' << format_double(M.M[i]) << ',' << format_double(eval_extended(s.g, d)) << ','
         << format_double(v) << '\n';
      v_min = std::min(v_min, v);
      ++used;
    }
    j["q1_q4"] = {{"g_family", s.g.family_name()}, {"radius", tau}, {"nodes", used}, {"v_min", num(v_min)},
                  {"csv", "q1_v_needed.csv"}};
  }
  // Questions 2 and 3: minorant over the whole region against both Domar majorants.
  if (s.domar) {
    const DomarPair maj = domar_majorants(s, h);
    const PerronResult Mw = largest_subharmonic_minorant(F, whole, po);
    double dmin = kInfinity, dmax = 0.0;
    std::vector<double> bd(whole.size(), -1.0);
    for (std::size_t i = 0; i < whole.size(); ++i) {
      if (whole.kind(i) != Grid::Node::Interior) continue;
      bd[i] = s.omega.boundary_dist(whole.node(i));
      dmin = std::min(dmin, bd[i]);
      dmax = std::max(dmax, bd[i]);
    }
    const int bins = 24;
    const auto edges = log_grid(dmin, dmax * (1 + 1e-12), bins + 1);
    std::vector<double> best(bins, -kInfinity);
    for (std::size_t i = 0; i < whole.size(); ++i) {
      if (bd[i] < 0.0) continue;
      const auto it = std::upper_bound(edges.begin(), edges.end(), bd[i]);
      const int b = std::clamp(static_cast<int>(it - edges.begin()) - 1, 0, bins - 1);
      best[b] = std::max(best[b], Mw.M[i]);
    }
    std::ofstream os(dir / "q23_domar_vs_minorant.csv");
    os << stamp << '\n' << "dist_lo,dist_hi,max_M,bound_A,bound_B\n";
    for (int b = 0; b < bins; ++b) {
      if (!std::isfinite(best[b])) continue;
      os << format_double(edges[b]) << ',' << format_double(edges[b + 1]) << ',' << format_double(best[b]) << ','
         << format_double(bound_A_at(edges[b], maj.A)) << ',' << format_double(bound_B_at(edges[b], maj.B)) << '\n';
    }
    j["q2_q3"] = {{"csv", "q23_domar_vs_minorant.csv"}, {"perron_iterations", Mw.iterations}};
  }
  // Question 5: margin statistics of the configured test function.
  if (s.u.kind != TestFunctionSpec::Kind::None) {
    RunOptions ro;
    const Report r = run_scenario(s, ro);
    json q5;
    q5["u_type"] = r.u_type;
    q5["hypothesis_margin"] = num(r.hypothesis_margin);
    json per = json::object();
    for (const auto& a : r.assertions)
      if (a.name.rfind("conclusion:", 0) == 0) per[a.name.substr(11)] = {{"min_margin", num(a.min_margin)}, {"nodes", a.compared}};
    q5["conclusion"] = per;
    j["q5"] = q5;
  }
  write_json(dir / "probe.json", j);
  std::cout << "probe: data written to " << dir.string() << '\n';
  return kPass;
}

void report_error(const std::string& kind, const std::string& message, const std::string& pointer, int code) {
  json e{{"kind", kind}, {"message", message}};
  if (!pointer.empty()) e["pointer"] = pointer;
  std::cout << json{{"error", e}, {"exit_code", code}}.dump() << std::endl;
  spdlog::error("{}: {}", kind, message);
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("growthbound");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%H:%M:%S] [%^%l%$] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("GROWTHBOUND_LOG")) {
    const auto lvl = spdlog::level::from_str(env);
    if (lvl == spdlog::level::off && std::string(env) != "off")
      spdlog::warn("GROWTHBOUND_LOG={} is not a level (trace, debug, info, warn, error, critical, off)", env);
    else
      spdlog::set_level(lvl);
  }
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"growthbound: growth bounds for subharmonic functions near singular sets"};
  app.require_subcommand(1);
  Options o;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"verify", "run scenarios (file, index or directory) and check every assertion"},
      {"improve", "self-improved bounds h(d) near B"},
      {"domar-bound", "Theorem A and B majorants"},
      {"perron", "largest subharmonic minorant on the grid"},
      {"admissibility", "admissibility constant and Assouad estimate of a set"},
      {"compare", "Theorem A against Theorem B along a ray toward the boundary"},
      {"probe", "exploratory data for the open questions (no assertions)"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", o.config, "scenario JSON (verify also takes an index or a directory)")->required();
    sub->add_option("--out", o.out, "output directory")->capture_default_str();
    sub->add_option("--seed", o.seed, "override the scenario seed");
    sub->add_option("--jobs", o.jobs, "parallel scenarios (verify)")->check(CLI::Range(1, 256))->capture_default_str();
    sub->add_option("--grid", o.grid, "override grid nodes along the longest axis")->check(CLI::Range(5, 2049));
    sub->add_option("--tol", o.tol, "override the minorant tolerance")->check(CLI::NonNegativeNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("UsageError", e.what(), "", kConfig);
    return kConfig;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    const std::vector<Config> cfgs = load_all(o);
    if (cmd == "verify") return cmd_verify(o, cfgs);
    if (cfgs.size() != 1) throw ConfigFieldError("/", cmd + " takes a single scenario file");
    const Config& cfg = cfgs.front();
    if (cmd == "improve") return cmd_improve(o, cfg);
    if (cmd == "domar-bound") return cmd_domar(o, cfg);
    if (cmd == "perron") return cmd_perron(o, cfg);
    if (cmd == "admissibility") return cmd_admissibility(o, cfg);
    if (cmd == "compare") return cmd_compare(o, cfg);
    return cmd_probe(o, cfg);
  } catch (const ConfigFieldError& e) {
    report_error("ConfigError", e.what(), e.pointer(), kConfig);
    return kConfig;
  } catch (const ConfigError& e) {
    report_error("ConfigError", e.what(), "", kConfig);
    return kConfig;
  } catch (const Error& e) {
    report_error(e.kind(), e.what(), "", kRuntime);
    return kRuntime;
  } catch (const std::exception& e) {
    report_error("RuntimeError", e.what(), "", kRuntime);
    return kRuntime;
  }
}

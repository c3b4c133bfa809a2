#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "hfuv/config.hpp"
#include "hfuv/error.hpp"
#include "hfuv/harness.hpp"
#include "hfuv/limits.hpp"
#include "hfuv/path_io.hpp"
#include "hfuv/stats.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace hfuv;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kRuntime = 2;

struct Args {
  std::string command;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::size_t threads = 1;
  std::string input;
  std::optional<std::size_t> n;
  std::optional<double> t;
  std::string beta;
  std::string output;
  bool binary = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

std::vector<double> parse_beta(const std::string& text) {
  double v[3];
  std::size_t start = 0;
  for (int k = 0; k < 3; ++k) {
    const std::size_t end = k < 2 ? text.find(':', start) : text.size();
    if (end == std::string::npos) throw ConfigError("--beta: expected a:b:step");
    const std::string part = text.substr(start, end - start);
    std::size_t used = 0;
    try {
      v[k] = std::stod(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != part.size()) throw ConfigError("--beta: '" + part + "' is not a number");
    start = end + 1;
  }
  return beta_range(v[0], v[1], v[2]);
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::optional<SamplePath> load_path(const std::string& input) {
  if (ends_with(input, ".json")) return path_from_json(read_file(input));
  if (ends_with(input, ".bin")) {
    std::ifstream in(input, std::ios::binary);
    if (!in) throw ConfigError("cannot read '" + input + "'");
    return read_path_binary(in);
  }
  return std::nullopt;
}

std::vector<double> load_increments(const std::string& input) {
  std::ifstream in(input);
  if (!in) throw ConfigError("cannot read '" + input + "'");
  return read_increments_csv(in);
}

json stat_json(const StatValue& s) {
  return {{"kind", std::string(to_string(s.kind))},
          {"value", s.value},
          {"increments", s.window.count},
          {"kernel", s.kernel_id},
          {"strategy", std::string(to_string(s.strategy))}};
}

json limit_json(const LimitValue& v) {
  json rows = json::array();
  for (const auto& c : v.contributions)
    rows.push_back({{"jump", c.jump < 0 ? json(nullptr) : json(c.jump)}, {"value", c.value}});
  return {{"value", v.value}, {"regime", std::string(to_string(v.regime))}, {"contributions", rows}};
}

json cond_var_json(const CondVariance& c) {
  return {{"total", c.total}, {"jump_term", c.jump_term}, {"field_term", c.field_term}, {"per_jump", c.per_jump}};
}

SamplePath path_for(const RunConfig& rc, const Args& a) {
  if (!a.input.empty()) {
    if (auto p = load_path(a.input)) return *p;
    throw ConfigError("--input: a sample path (.json or .bin) is required for this command");
  }
  return simulate_path(rc.plan.model, rc.plan.n_list.front(), rc.plan.T, rc.plan.base_seed);
}

const KernelSpec& need_kernel(const RunConfig& rc) {
  if (!rc.plan.kernel) throw ConfigError("kernel: required for " + rc.command);
  return *rc.plan.kernel;
}

ExperimentReport cmd_simulate(const RunConfig& rc, const Args& a, const fs::path& out, std::vector<std::string>& files) {
  const auto path = simulate_path(rc.plan.model, rc.plan.n_list.front(), rc.plan.T, rc.plan.base_seed);
  if (a.binary) {
    std::ostringstream os(std::ios::binary);
    write_path_binary(path, os);
    write_file(out / "path.bin", os.str());
    files.push_back((out / "path.bin").string());
  } else {
    write_file(out / "path.json", path_to_json(path));
    files.push_back((out / "path.json").string());
  }
  std::ostringstream csv;
  csv << "increment\n";
  char buf[64];
  for (double d : increments(path, false, path.T)) {
    std::snprintf(buf, sizeof buf, "%.17g", d);
    csv << buf << '\n';
  }
  write_file(out / "increments.csv", csv.str());
  files.push_back((out / "increments.csv").string());
  json t;
  t["n"] = path.n;
  t["T"] = path.T;
  t["seed"] = path.seed;
  t["jumps"] = path.jumps.size();
  t["volatility_clamps"] = path.clamp_count;
  return {t, {}, {}};
}

ExperimentReport cmd_stat(const RunConfig& rc, const Args& a) {
  const KernelSpec& k = need_kernel(rc);
  const double t = rc.plan.t;
  json out;
  out["kernel"] = k.to_text();
  out["t"] = t;
  auto fill = [&](IncrementData data) {
    out["n"] = data.n;
    out["V"] = stat_json(v_stat(data, k, t));
    out["Y"] = stat_json(y_stat(data, k, t));
    try {
      out["U"] = stat_json(u_stat(data, k, t));
    } catch (const BudgetError& e) {
      out["U"] = {{"skipped", e.what()}};
    }
    out["realized_qv"] = realized_qv(data, t).value;
  };
  std::optional<SamplePath> path;
  std::vector<double> dx;
  if (!a.input.empty() && !(path = load_path(a.input))) {
    dx = load_increments(a.input);
    fill(IncrementData{dx, a.n.value_or(dx.size())});
    out["source"] = a.input;
    return {out, {}, {}};
  }
  if (!path) path = path_for(rc, a);
  dx = increments(*path, false, path->T);
  fill(IncrementData{dx, path->n});
  out["source"] = a.input.empty() ? json("simulated") : json(a.input);
  out["seed"] = path->seed;
  return {out, {}, {}};
}

ExperimentReport cmd_limits(const RunConfig& rc, const Args& a) {
  const KernelSpec& k = need_kernel(rc);
  const auto path = path_for(rc, a);
  const double t = rc.plan.t;
  json out;
  out["kernel"] = k.to_text();
  out["t"] = t;
  out["seed"] = path.seed;
  out["jumps"] = jumps_up_to(path, t).size();
  switch (k.regime) {
    case Regime::JumpLLN:
      out["limit"] = limit_json(jump_limit(path, k, t));
      break;
    case Regime::JumpCLT:
    case Regime::GridTest:
      out["limit"] = limit_json(jump_limit(path, k, t));
      out["cond_var"] = cond_var_json(cond_var_jump(path, k, t));
      break;
    case Regime::MixedLLN:
      out["limit"] = limit_json(mixed_limit(path, k, t));
      break;
    case Regime::MixedCLT: {
      const MixedModel m(path, k, t);
      out["limit"] = limit_json(m.limit());
      out["cond_var"] = cond_var_json(m.cond_var());
      break;
    }
  }
  return {out, {}, {}};
}

ExperimentReport cmd_grid(RunConfig& rc, const Args& a, RunOptions opts) {
  if (!a.beta.empty()) rc.plan.beta_grid = parse_beta(a.beta);
  if (rc.plan.beta_grid.empty()) throw ConfigError("beta: pass --beta a:b:step or experiment.beta_grid");
  if (!a.input.empty()) {
    if (auto p = load_path(a.input)) return grid_scan(*p, rc.plan.beta_grid, rc.plan.t, opts);
    const auto dx = load_increments(a.input);
    return grid_scan(dx, a.n.value_or(dx.size()), rc.plan.beta_grid, rc.plan.t, opts);
  }
  rc.plan.kind = ExperimentKind::GRID;
  return run_grid(rc.plan, opts);
}

int run(Args& a) {
  const auto started = std::chrono::steady_clock::now();
  RunConfig rc;
  if (!a.config.empty()) {
    rc = parse_config(read_file(a.config), a.command);
  } else if (a.command == "grid-test" && !a.input.empty()) {
    rc.plan.kind = ExperimentKind::GRID;
  } else {
    throw ConfigError("--config is required for " + a.command);
  }
  rc.command = a.command;
  if (a.seed) rc.plan.base_seed = *a.seed;
  if (a.t) rc.plan.t = *a.t;
  if (a.n) {
    rc.plan.n_list = {*a.n};
  }
  if (!a.output.empty()) rc.io.output_dir = a.output;
  if (!a.input.empty()) rc.io.input = a.input;
  else a.input = rc.io.input;

  if (a.command != "grid-test") rc.plan.validate();

  const RunOptions opts{std::max<std::size_t>(1, a.threads)};
  const fs::path out = rc.io.output_dir;
  fs::create_directories(out);
  std::vector<std::string> files;

  ExperimentReport rep;
  if (a.command == "simulate") rep = cmd_simulate(rc, a, out, files);
  else if (a.command == "stat") rep = cmd_stat(rc, a);
  else if (a.command == "limits") rep = cmd_limits(rc, a);
  else if (a.command == "grid-test") rep = cmd_grid(rc, a, opts);
  else rep = run_experiment(rc.plan, opts);

  write_file(out / "report.json", rep.tables.dump(2) + "\n");
  files.push_back((out / "report.json").string());
  if (!rep.errors_csv.empty()) {
    write_file(out / "errors.csv", rep.errors_csv);
    files.push_back((out / "errors.csv").string());
  }
  if (rc.io.samples && !rep.samples_csv.empty()) {
    write_file(out / "samples.csv", rep.samples_csv);
    files.push_back((out / "samples.csv").string());
  }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  json manifest;
  manifest["tool"] = "hfuv";
  manifest["version"] = "0.1.0";
  manifest["command"] = a.command;
  manifest["config"] = json::parse(rc.to_text());
  manifest["input"] = a.input;
  manifest["beta"] = a.beta;
  manifest["n_override"] = a.n ? json(*a.n) : json(nullptr);
  manifest["threads"] = opts.threads;
  manifest["wall_time_seconds"] = wall;
  manifest["outputs"] = files;
  write_file(out / "manifest.json", manifest.dump(2) + "\n");
  files.push_back((out / "manifest.json").string());
  for (const auto& f : files) std::cout << f << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hfuv: U- and V-statistics of high-frequency semimartingale increments"};
  app.require_subcommand(1);
  Args a;
  const std::pair<const char*, const char*> commands[] = {
      {"simulate", "Simulate one path and write path.json and increments.csv"},
      {"stat", "Compute V, Y and U statistics for the configured kernel"},
      {"limits", "Evaluate limit functionals and conditional variances on one path"},
      {"verify-lln", "Monte Carlo check of the laws of large numbers"},
      {"verify-clt", "Monte Carlo check of the central limit theorems"},
      {"rnp-check", "Compare jump-neighbourhood draws with their limit law"},
      {"grid-test", "Scan the jump-size grid statistic over beta"},
      {"ztrunc", "Truncation study of the jump-case limit variable"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config,-c", a.config, "Run configuration (JSON)");
    sub->add_option("--seed", a.seed, "Override the base seed");
    sub->add_option("--threads,-j", a.threads, "Worker threads (results do not depend on this)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--input,-i", a.input, "Increment CSV, or a sample path (.json/.bin)");
    sub->add_option("--n", a.n, "Sampling frequency n (grid size)")->check(CLI::PositiveNumber);
    sub->add_option("--t", a.t, "Time horizon t of the statistics");
    sub->add_option("--output,-o", a.output, "Output directory");
    if (std::string(name) == "grid-test") sub->add_option("--beta", a.beta, "Beta grid a:b:step");
    if (std::string(name) == "simulate") sub->add_flag("--binary", a.binary, "Write path.bin instead of path.json");
    sub->callback([&a, sub] { a.command = sub->get_name(); });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kValidation;
  }
  try {
    return run(a);
  } catch (const ConfigError& e) {
    std::cerr << "validation error: " << e.what() << "\n\n" << app.help();
    return kValidation;
  } catch (const DomainError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return kRuntime;
  }
}

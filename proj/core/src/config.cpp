#include "hfuv/config.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>

#include "json.hpp"

#include "hfuv/admissibility.hpp"
#include "hfuv/error.hpp"

namespace hfuv {
namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& key, const std::string& what) { throw ConfigError(key + ": " + what); }

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(where, "must be an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) fail(where.empty() ? key : where + "." + key, "unknown key");
  }
}

std::string join_key(const std::string& where, const char* key) { return where.empty() ? key : where + "." + key; }

double get_num(const json& obj, const std::string& where, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) fail(join_key(where, key), "must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(join_key(where, key), "must be finite");
  return x;
}

std::uint64_t get_uint(const json& obj, const std::string& where, const char* key, std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_unsigned()) fail(join_key(where, key), "must be a non-negative integer");
  return v.get<std::uint64_t>();
}

bool get_bool(const json& obj, const std::string& where, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_boolean()) fail(join_key(where, key), "must be true or false");
  return v.get<bool>();
}

std::string get_str(const json& obj, const std::string& where, const char* key, std::string fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_string()) fail(join_key(where, key), "must be a string");
  return v.get<std::string>();
}

template <class T>
std::vector<T> get_list(const json& obj, const std::string& where, const char* key, std::vector<T> fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  const std::string k = join_key(where, key);
  if (!v.is_array()) fail(k, "must be an array");
  std::vector<T> out;
  for (const auto& e : v) {
    if constexpr (std::is_integral_v<T>) {
      if (!e.is_number_unsigned()) fail(k, "entries must be non-negative integers");
    } else {
      if (!e.is_number()) fail(k, "entries must be numbers");
    }
    out.push_back(e.get<T>());
  }
  return out;
}

std::string default_kind(const std::string& command, const std::optional<KernelSpec>& kernel) {
  if (command == "verify-lln") return "LLN";
  if (command == "verify-clt") return kernel && kernel->regime == Regime::MixedCLT ? "CLT_mixed" : "CLT_jump";
  if (command == "rnp-check") return "RNP";
  if (command == "grid-test") return "GRID";
  if (command == "ztrunc") return "ZTRUNC";
  return "QV";
}

SizeDistribution parse_size(const json& s) {
  const std::string where = "model.jumps.size";
  if (!s.is_object()) fail(where, "must be an object");
  const std::string kind = get_str(s, where, "kind", "atoms");
  if (kind == "atoms") {
    only_keys(s, where, {"kind", "atoms"});
    AtomList a;
    if (!s.contains("atoms")) fail(where + ".atoms", "required for kind atoms");
    const auto& arr = s.at("atoms");
    if (!arr.is_array()) fail(where + ".atoms", "must be an array of [value, probability] pairs");
    for (const auto& e : arr) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        fail(where + ".atoms", "entries must be [value, probability] pairs");
      a.atoms.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
    return a;
  }
  if (kind == "uniform") {
    only_keys(s, where, {"kind", "a", "b"});
    return UniformSize{get_num(s, where, "a", 0.0), get_num(s, where, "b", 1.0)};
  }
  if (kind == "truncnormal") {
    only_keys(s, where, {"kind", "mu", "s", "min_abs"});
    return TruncNormalSize{get_num(s, where, "mu", 0.0), get_num(s, where, "s", 1.0), get_num(s, where, "min_abs", 0.0)};
  }
  fail(where + ".kind", "must be atoms, uniform or truncnormal");
}

ModelConfig parse_model(const json& m) {
  ModelConfig cfg;
  only_keys(m, "model", {"drift", "volatility", "jumps", "bound_A", "enforce_bound"});
  cfg.drift = get_num(m, "model", "drift", cfg.drift);
  cfg.bound_A = get_num(m, "model", "bound_A", cfg.bound_A);
  cfg.enforce_bound = get_bool(m, "model", "enforce_bound", cfg.enforce_bound);
  if (m.contains("volatility")) {
    const auto& v = m.at("volatility");
    const std::string w = "model.volatility";
    only_keys(v, w, {"kind", "sigma0", "tilde_b", "tilde_sigma", "tilde_v", "floor_eps", "clamp_budget"});
    const std::string kind = get_str(v, w, "kind", "constant");
    if (kind == "constant") cfg.vol.kind = VolKind::Constant;
    else if (kind == "ito") cfg.vol.kind = VolKind::ItoSM;
    else fail(w + ".kind", "must be constant or ito");
    cfg.vol.sigma0 = get_num(v, w, "sigma0", cfg.vol.sigma0);
    cfg.vol.tilde_b = get_num(v, w, "tilde_b", cfg.vol.tilde_b);
    cfg.vol.tilde_sigma = get_num(v, w, "tilde_sigma", cfg.vol.tilde_sigma);
    cfg.vol.tilde_v = get_num(v, w, "tilde_v", cfg.vol.tilde_v);
    cfg.vol.floor_eps = get_num(v, w, "floor_eps", cfg.vol.floor_eps);
    cfg.vol.clamp_budget = get_uint(v, w, "clamp_budget", cfg.vol.clamp_budget);
  }
  if (m.contains("jumps")) {
    const auto& j = m.at("jumps");
    const std::string w = "model.jumps";
    only_keys(j, w, {"intensity", "max_abs", "fixed_count", "size"});
    cfg.jumps.intensity = get_num(j, w, "intensity", cfg.jumps.intensity);
    cfg.jumps.max_abs = get_num(j, w, "max_abs", cfg.jumps.max_abs);
    if (j.contains("fixed_count") && !j.at("fixed_count").is_null())
      cfg.jumps.fixed_count = get_uint(j, w, "fixed_count", 0);
    if (j.contains("size")) cfg.jumps.size = parse_size(j.at("size"));
  }
  return cfg;
}

json size_json(const SizeDistribution& s) {
  if (const auto* a = std::get_if<AtomList>(&s)) {
    json atoms = json::array();
    for (const auto& [v, p] : a->atoms) atoms.push_back(json::array({v, p}));
    return {{"kind", "atoms"}, {"atoms", atoms}};
  }
  if (const auto* u = std::get_if<UniformSize>(&s)) return {{"kind", "uniform"}, {"a", u->a}, {"b", u->b}};
  const auto& t = std::get<TruncNormalSize>(s);
  return {{"kind", "truncnormal"}, {"mu", t.mu}, {"s", t.s}, {"min_abs", t.min_abs}};
}

}  // namespace

std::vector<ExperimentKind> kinds_for_command(std::string_view command) {
  using K = ExperimentKind;
  if (command == "verify-lln") return {K::LLN, K::QV};
  if (command == "verify-clt") return {K::CLT_jump, K::CLT_mixed};
  if (command == "rnp-check") return {K::RNP};
  if (command == "grid-test") return {K::GRID};
  if (command == "ztrunc") return {K::ZTRUNC};
  return {};
}

RunConfig parse_config(std::string_view text, std::string_view command) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end(), nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: not a valid JSON document (") + e.what() + ")");
  }
  only_keys(doc, "", {"command", "seed", "model", "kernel", "experiment", "io"});
  RunConfig rc;
  rc.command = command.empty() ? get_str(doc, "", "command", "") : std::string(command);
  ExperimentPlan& plan = rc.plan;
  plan.base_seed = get_uint(doc, "", "seed", plan.base_seed);
  if (doc.contains("model")) plan.model = parse_model(doc.at("model"));
  if (doc.contains("kernel") && !doc.at("kernel").is_null()) {
    const std::string text_k = get_str(doc, "", "kernel", "");
    plan.kernel = KernelSpec::parse(text_k);
  }
  json ex = doc.contains("experiment") ? doc.at("experiment") : json::object();
  only_keys(ex, "experiment",
            {"kind", "n_list", "reps", "t", "T", "beta_grid", "truncation_m", "aug_seeds", "two_sample"});
  plan.kind = parse_experiment_kind(get_str(ex, "experiment", "kind", default_kind(rc.command, plan.kernel)));
  plan.n_list = get_list<std::size_t>(ex, "experiment", "n_list", plan.n_list);
  plan.reps = get_uint(ex, "experiment", "reps", plan.reps);
  plan.t = get_num(ex, "experiment", "t", plan.t);
  plan.T = get_num(ex, "experiment", "T", plan.T);
  plan.beta_grid = get_list<double>(ex, "experiment", "beta_grid", plan.beta_grid);
  plan.truncation_m = get_list<std::size_t>(ex, "experiment", "truncation_m", plan.truncation_m);
  plan.aug_seeds = get_uint(ex, "experiment", "aug_seeds", plan.aug_seeds);
  plan.two_sample = get_bool(ex, "experiment", "two_sample", plan.two_sample);
  if (doc.contains("io")) {
    const auto& io = doc.at("io");
    only_keys(io, "io", {"input", "output_dir", "samples"});
    rc.io.input = get_str(io, "io", "input", rc.io.input);
    rc.io.output_dir = get_str(io, "io", "output_dir", rc.io.output_dir);
    rc.io.samples = get_bool(io, "io", "samples", rc.io.samples);
  }

  if (plan.kernel) {
    const auto rep = check_admissibility(*plan.kernel);
    if (!rep.passed()) throw ConfigError("kernel: admissibility failed: " + rep.first_failure());
  }
  const auto allowed = kinds_for_command(rc.command);
  if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), plan.kind) == allowed.end())
    fail("experiment.kind", std::string(to_string(plan.kind)) + " cannot run under command '" + rc.command + "'");
  plan.validate();
  return rc;
}

std::string RunConfig::to_text() const {
  const auto& m = plan.model;
  json doc;
  doc["command"] = command;
  doc["seed"] = plan.base_seed;
  json vol;
  vol["kind"] = m.vol.kind == VolKind::Constant ? "constant" : "ito";
  vol["sigma0"] = m.vol.sigma0;
  vol["tilde_b"] = m.vol.tilde_b;
  vol["tilde_sigma"] = m.vol.tilde_sigma;
  vol["tilde_v"] = m.vol.tilde_v;
  vol["floor_eps"] = m.vol.floor_eps;
  vol["clamp_budget"] = m.vol.clamp_budget;
  json jumps;
  jumps["intensity"] = m.jumps.intensity;
  jumps["max_abs"] = m.jumps.max_abs;
  jumps["fixed_count"] = m.jumps.fixed_count ? json(*m.jumps.fixed_count) : json(nullptr);
  jumps["size"] = size_json(m.jumps.size);
  doc["model"] = {{"drift", m.drift}, {"volatility", vol}, {"jumps", jumps}, {"bound_A", m.bound_A},
                  {"enforce_bound", m.enforce_bound}};
  doc["kernel"] = plan.kernel ? json(plan.kernel->to_text()) : json(nullptr);
  doc["experiment"] = {{"kind", std::string(to_string(plan.kind))},
                       {"n_list", plan.n_list},
                       {"reps", plan.reps},
                       {"t", plan.t},
                       {"T", plan.T},
                       {"beta_grid", plan.beta_grid},
                       {"truncation_m", plan.truncation_m},
                       {"aug_seeds", plan.aug_seeds},
                       {"two_sample", plan.two_sample}};
  doc["io"] = {{"input", io.input}, {"output_dir", io.output_dir}, {"samples", io.samples}};
  return doc.dump(2) + "\n";
}

}  // namespace hfuv

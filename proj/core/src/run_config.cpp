#include "everlast/run_config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "everlast/errors.hpp"

namespace everlast {

namespace {

using nlohmann::json;

void only_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

void read_optional_name(const json& j, const char* key, std::optional<std::string>& out) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null()) {
    out.reset();
  } else if (j.at(key).is_string()) {
    const auto name = j.at(key).get<std::string>();
    if (name.empty() || name == "." || name == ".." || name.find('/') != std::string::npos) {
      throw ConfigError(std::string("output.") + key + " must be a plain file name inside output.dir");
    }
    out = name;
  } else {
    throw ConfigError(std::string("output.") + key + " must be a file name or null");
  }
}

}  // namespace

std::string to_string(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::kEV: return "EV";
    case MechanismKind::kTO: return "TO";
    case MechanismKind::kThresholdoutOnly: return "ThresholdoutOnly";
    case MechanismKind::kNaiveBaseline: return "NaiveBaseline";
  }
  return "unknown";
}

std::string to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::kSequential: return "sequential";
    case ScheduleKind::kRoundRobin: return "round_robin";
    case ScheduleKind::kRandom: return "random";
  }
  return "unknown";
}

std::string to_string(StrategyType type) {
  switch (type) {
    case StrategyType::kPreregistered: return "preregistered";
    case StrategyType::kSignAggregation: return "sign_aggregation";
    case StrategyType::kCollusion: return "collusion";
  }
  return "unknown";
}

MechanismKind parse_mechanism(const std::string& s) {
  if (s == "EV" || s == "ev") return MechanismKind::kEV;
  if (s == "TO" || s == "to") return MechanismKind::kTO;
  if (s == "ThresholdoutOnly" || s == "thresholdout") return MechanismKind::kThresholdoutOnly;
  if (s == "NaiveBaseline" || s == "naive") return MechanismKind::kNaiveBaseline;
  throw ConfigError("unknown mechanism '" + s + "'");
}

ScheduleKind parse_schedule(const std::string& s) {
  if (s == "sequential") return ScheduleKind::kSequential;
  if (s == "round_robin") return ScheduleKind::kRoundRobin;
  if (s == "random") return ScheduleKind::kRandom;
  throw ConfigError("unknown schedule '" + s + "'");
}

StrategyType parse_strategy_type(const std::string& s) {
  if (s == "preregistered") return StrategyType::kPreregistered;
  if (s == "sign_aggregation") return StrategyType::kSignAggregation;
  if (s == "collusion") return StrategyType::kCollusion;
  throw ConfigError("unknown strategy type '" + s + "'");
}

void RunConfig::validate() const {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (strategies.empty()) throw ConfigError("at least one strategy is required");
  if (distribution.domain_size < 1 && !distribution.file) throw ConfigError("distribution.domain_size must be >= 1");
  std::set<std::string> tags;
  for (const auto& s : strategies) {
    if (s.tag.empty()) throw ConfigError("every strategy needs a tag");
    if (!tags.insert(s.tag).second) throw ConfigError("duplicate strategy tag '" + s.tag + "'");
    if (s.type == StrategyType::kPreregistered) {
      if (s.queries == 0 && s.query_files.empty()) throw ConfigError("strategy '" + s.tag + "' plans no queries");
      if (s.queries != 0 && !s.query_files.empty()) {
        throw ConfigError("strategy '" + s.tag + "': give either queries or query_files, not both");
      }
    } else if (s.probes < 1) {
      throw ConfigError("strategy '" + s.tag + "' needs probes >= 1");
    }
  }
}

RunConfig parse_run_config(const json& j, const std::filesystem::path& base_dir) {
  only_keys(j, {"mechanism", "params", "distribution", "strategies", "schedule", "trials", "seed", "threads", "output"},
            "config");
  RunConfig c;
  if (!j.contains("mechanism")) throw ConfigError("config.mechanism is required");
  c.mechanism = parse_mechanism(j.at("mechanism").get<std::string>());

  if (j.contains("params")) {
    const auto& p = j.at("params");
    only_keys(p, {"tau", "beta", "sample_unit_cost", "charge_low_price_on_resubmit", "n", "p", "analysis_constant", "m",
                  "budget"},
              "params");
    read(p, "tau", c.params.tau, "params");
    read(p, "beta", c.params.beta, "params");
    read(p, "sample_unit_cost", c.params.sample_unit_cost, "params");
    read(p, "charge_low_price_on_resubmit", c.params.charge_low_price_on_resubmit, "params");
    read(p, "n", c.params.n, "params");
    read(p, "p", c.params.p, "params");
    read(p, "analysis_constant", c.params.analysis_constant, "params");
    read(p, "m", c.params.m, "params");
    read(p, "budget", c.params.budget, "params");
  }

  if (j.contains("distribution")) {
    const auto& d = j.at("distribution");
    only_keys(d, {"domain_size", "file"}, "distribution");
    read(d, "domain_size", c.distribution.domain_size, "distribution");
    if (d.contains("file")) c.distribution.file = resolve(base_dir, d.at("file").get<std::string>());
  }

  if (!j.contains("strategies") || !j.at("strategies").is_array()) {
    throw ConfigError("config.strategies must be an array");
  }
  for (const auto& s : j.at("strategies")) {
    only_keys(s, {"type", "tag", "queries", "law", "query_files", "probes"}, "strategy");
    StrategySpec spec;
    if (!s.contains("type")) throw ConfigError("strategy.type is required");
    spec.type = parse_strategy_type(s.at("type").get<std::string>());
    read(s, "tag", spec.tag, "strategy");
    read(s, "queries", spec.queries, "strategy");
    read(s, "probes", spec.probes, "strategy");
    if (s.contains("law")) {
      const auto law = s.at("law").get<std::string>();
      if (law == "uniform") {
        spec.law = ValueLaw::kUniform;
      } else if (law == "bernoulli") {
        spec.law = ValueLaw::kBernoulli;
      } else {
        throw ConfigError("unknown value law '" + law + "'");
      }
    }
    if (s.contains("query_files")) {
      for (const auto& f : s.at("query_files")) spec.query_files.push_back(resolve(base_dir, f.get<std::string>()));
    }
    c.strategies.push_back(std::move(spec));
  }

  if (j.contains("schedule")) c.schedule = parse_schedule(j.at("schedule").get<std::string>());
  read(j, "trials", c.trials, "config");
  read(j, "seed", c.seed, "config");
  read(j, "threads", c.threads, "config");

  if (j.contains("output")) {
    const auto& o = j.at("output");
    only_keys(o, {"dir", "csv", "report", "events"}, "output");
    if (o.contains("dir")) c.output.dir = resolve(base_dir, o.at("dir").get<std::string>());
    read_optional_name(o, "csv", c.output.csv);
    read_optional_name(o, "report", c.output.report);
    read_optional_name(o, "events", c.output.events);
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path.string() + "': " + e.what());
  }
  try {
    return parse_run_config(j, path.parent_path());
  } catch (const json::exception& e) {
    throw ConfigError("config file '" + path.string() + "': " + e.what());
  }
}

namespace {

json optional_name(const std::optional<std::string>& name) { return name ? json(*name) : json(nullptr); }

}  // namespace

json to_json(const RunConfig& c) {
  json strategies = json::array();
  for (const auto& s : c.strategies) {
    json js{{"type", to_string(s.type)}, {"tag", s.tag}};
    if (s.type == StrategyType::kPreregistered) {
      if (s.query_files.empty()) {
        js["queries"] = s.queries;
        js["law"] = s.law == ValueLaw::kUniform ? "uniform" : "bernoulli";
      } else {
        json files = json::array();
        for (const auto& f : s.query_files) files.push_back(f.string());
        js["query_files"] = files;
      }
    } else {
      js["probes"] = s.probes;
    }
    strategies.push_back(js);
  }
  json dist{{"domain_size", c.distribution.domain_size}};
  if (c.distribution.file) dist["file"] = c.distribution.file->string();
  const auto& p = c.params;
  return {
      {"mechanism", to_string(c.mechanism)},
      {"params",
       {{"tau", p.tau},
        {"beta", p.beta},
        {"sample_unit_cost", p.sample_unit_cost},
        {"charge_low_price_on_resubmit", p.charge_low_price_on_resubmit},
        {"n", p.n},
        {"p", p.p},
        {"analysis_constant", p.analysis_constant},
        {"m", p.m},
        {"budget", p.budget}}},
      {"distribution", dist},
      {"strategies", strategies},
      {"schedule", to_string(c.schedule)},
      {"trials", c.trials},
      {"seed", c.seed},
      {"threads", c.threads},
      {"output",
       {{"dir", c.output.dir.string()},
        {"csv", optional_name(c.output.csv)},
        {"report", optional_name(c.output.report)},
        {"events", optional_name(c.output.events)}}},
  };
}

std::filesystem::path resolve_output_dir(const OutputSpec& out) {
  if (const char* env = std::getenv("EVERLAST_OUTPUT_DIR"); env != nullptr && *env != '\0') return env;
  return out.dir;
}

}  // namespace everlast

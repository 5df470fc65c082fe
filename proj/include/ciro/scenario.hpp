#pragma once

// JSON scenario files.
//
//   {
//     "network":   {"compartments": [{"id": 1, "source": 1, "sink": 1, "kind": "node",
//                                     "role": "reservoir", "label": "..."}, ...]},
//     "materials": [{"name": "beta_1", "criticality": 0.1, "mass": 1.0}, ...],
//     "timing":    {"t_1out4": 0, "t_2in4": 2592000, "T_t": 3600, "T_r": 2592000, "T_i": 86400,
//                   "continuous_flow": [{"t": 0, "rate": 0}]},
//     "outcome":   {"s": 100, "T_d": 0.4}
//              or  {"policy": "oracle" | "<file>", "task": "TwoPartsOneTarget", "episodes": 100},
//     "options":   {"delta": 1, "l": 1, "rounding": 1, "mu_mode": "global"}
//   }
//
// Times in seconds, masses in kg. `options`, `t_1out4`, `continuous_flow` and
// `label` are optional; every other key listed above is required and unknown
// keys are rejected. Validation reports every problem it finds, each with a
// JSON pointer to the offending value.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "ciro/circularity.hpp"
#include "ciro/disassembler/env.hpp"
#include "ciro/disassembler/evaluate.hpp"
#include "ciro/error.hpp"
#include "ciro/flows.hpp"
#include "ciro/network.hpp"

namespace ciro {

struct PolicyReference {
  std::string policy;  // "oracle", "random" or a policy file path
  disassembly::TaskKind task = disassembly::TaskKind::TwoPartsOneTarget;
  int episodes = disassembly::kEvalEpisodes;
  friend bool operator==(const PolicyReference&, const PolicyReference&) = default;
};

using OutcomeSource = std::variant<DisassemblyOutcome, PolicyReference>;

struct ScenarioFile {
  std::vector<Compartment> compartments;
  std::vector<MaterialSpec> materials;
  ScenarioParams params;  // timing plus delta, l and the continuous flow
  OutcomeSource outcome;
  int rounding = 1;
  MuMode mu_mode = MuMode::Global;

  TMNetwork network() const { return build_network(compartments); }
  double initial_mass() const { return weighted_initial_mass(materials); }

  friend bool operator==(const ScenarioFile&, const ScenarioFile&) = default;
};

struct Issue {
  std::string path;
  std::string message;
};

class ScenarioError : public Error {
 public:
  ScenarioError(ErrorCode code, std::vector<Issue> issues)
      : Error(code, summarize(issues)), issues_(std::move(issues)) {}
  const std::vector<Issue>& issues() const noexcept { return issues_; }

 private:
  static std::string summarize(const std::vector<Issue>& issues) {
    std::string s = std::to_string(issues.size()) + " problem(s)";
    for (const auto& i : issues) s += "\n  " + (i.path.empty() ? std::string("/") : i.path) + ": " + i.message;
    return s;
  }
  std::vector<Issue> issues_;
};

namespace detail {

using nlohmann::json;

class ScenarioReader {
 public:
  std::vector<Issue> issues;

  void fail(const std::string& path, const std::string& message) { issues.push_back({path, message}); }

  void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool known = false;
      for (const char* k : allowed) known = known || it.key() == k;
      if (!known) fail(path + "/" + it.key(), "unknown key");
    }
  }

  const json* field(const json& obj, const std::string& path, const char* key, bool required = true) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) fail(path + "/" + key, "missing");
      return nullptr;
    }
    return &*it;
  }

  std::optional<double> number(const json& obj, const std::string& path, const char* key, bool required = true) {
    const json* v = field(obj, path, key, required);
    if (!v) return std::nullopt;
    if (!v->is_number()) {
      fail(path + "/" + key, "expected a number");
      return std::nullopt;
    }
    const double d = v->get<double>();
    if (!std::isfinite(d)) {
      fail(path + "/" + key, "must be finite");
      return std::nullopt;
    }
    return d;
  }

  std::optional<long long> integer(const json& obj, const std::string& path, const char* key, bool required = true) {
    const json* v = field(obj, path, key, required);
    if (!v) return std::nullopt;
    if (!v->is_number_integer()) {
      fail(path + "/" + key, "expected an integer");
      return std::nullopt;
    }
    return v->get<long long>();
  }

  std::optional<std::string> string(const json& obj, const std::string& path, const char* key, bool required = true) {
    const json* v = field(obj, path, key, required);
    if (!v) return std::nullopt;
    if (!v->is_string()) {
      fail(path + "/" + key, "expected a string");
      return std::nullopt;
    }
    return v->get<std::string>();
  }

  const json* object(const json& obj, const std::string& path, const char* key, bool required = true) {
    const json* v = field(obj, path, key, required);
    if (v && !v->is_object()) {
      fail(path + "/" + key, "expected an object");
      return nullptr;
    }
    return v;
  }

  const json* array(const json& obj, const std::string& path, const char* key, bool required = true) {
    const json* v = field(obj, path, key, required);
    if (v && !v->is_array()) {
      fail(path + "/" + key, "expected an array");
      return nullptr;
    }
    return v;
  }

  void read_network(const json& root, ScenarioFile& sc) {
    const json* net = object(root, "", "network");
    if (!net) return;
    reject_unknown(*net, "/network", {"compartments"});
    const json* list = array(*net, "/network", "compartments");
    if (!list) return;
    if (list->empty()) fail("/network/compartments", "must not be empty");
    bool elements_ok = true;
    for (std::size_t n = 0; n < list->size(); ++n) {
      const std::string path = "/network/compartments/" + std::to_string(n);
      const json& c = (*list)[n];
      if (!c.is_object()) {
        fail(path, "expected an object");
        elements_ok = false;
        continue;
      }
      const std::size_t before = issues.size();
      reject_unknown(c, path, {"id", "source", "sink", "kind", "role", "label"});
      Compartment comp;
      auto positive = [&](const char* key, CompartmentId& out) {
        if (auto v = integer(c, path, key)) {
          if (*v < 1 || *v > std::numeric_limits<CompartmentId>::max()) {
            fail(path + "/" + key, "must be a positive integer");
          } else {
            out = static_cast<CompartmentId>(*v);
          }
        }
      };
      positive("id", comp.id);
      positive("source", comp.source);
      positive("sink", comp.sink);
      if (auto kind = string(c, path, "kind")) {
        if (auto k = parse_kind(*kind)) {
          comp.kind = *k;
        } else {
          fail(path + "/kind", "expected \"node\" or \"arc\"");
        }
      }
      if (auto role = string(c, path, "role")) {
        if (auto r = parse_role(*role)) {
          comp.role = *r;
        } else {
          fail(path + "/role", "unknown role '" + *role + "'");
        }
      }
      if (auto label = string(c, path, "label", false)) comp.label = *label;
      if (issues.size() != before) elements_ok = false;
      sc.compartments.push_back(std::move(comp));
    }
    if (elements_ok && !sc.compartments.empty()) {
      try {
        build_network(sc.compartments);
      } catch (const Error& e) {
        fail("/network/compartments", e.what());
      }
    }
  }

  void read_materials(const json& root, ScenarioFile& sc) {
    const json* list = array(root, "", "materials");
    if (!list) return;
    if (list->empty()) fail("/materials", "must not be empty");
    for (std::size_t n = 0; n < list->size(); ++n) {
      const std::string path = "/materials/" + std::to_string(n);
      const json& m = (*list)[n];
      if (!m.is_object()) {
        fail(path, "expected an object");
        continue;
      }
      reject_unknown(m, path, {"name", "criticality", "mass"});
      MaterialSpec spec;
      if (auto name = string(m, path, "name")) spec.name = *name;
      if (auto c = number(m, path, "criticality")) {
        if (!(*c > 0.0 && *c <= 1.0)) fail(path + "/criticality", "must lie in (0, 1]");
        spec.criticality = *c;
      }
      if (auto mass = number(m, path, "mass")) {
        if (*mass < 0.0) fail(path + "/mass", "must be >= 0");
        spec.mass = *mass;
      }
      sc.materials.push_back(std::move(spec));
    }
  }

  void read_timing(const json& root, ScenarioFile& sc) {
    const json* t = object(root, "", "timing");
    if (!t) return;
    reject_unknown(*t, "/timing", {"t_1out4", "t_2in4", "T_t", "T_r", "T_i", "continuous_flow"});
    ScenarioParams& p = sc.params;
    if (auto v = number(*t, "/timing", "t_1out4", false); v && *v != 0.0) {
      fail("/timing/t_1out4", "the batch leaves the reservoir at t = 0");
    }
    if (auto v = number(*t, "/timing", "t_2in4")) {
      if (*v < 0.0) fail("/timing/t_2in4", "must be >= 0");
      p.t_supply = *v;
    }
    auto positive = [&](const char* key, double& out) {
      if (auto v = number(*t, "/timing", key)) {
        if (*v <= 0.0) fail(std::string("/timing/") + key, "must be > 0");
        out = *v;
      }
    };
    positive("T_t", p.t_transport);
    positive("T_r", p.t_reuse);
    positive("T_i", p.t_incineration);
    if (t->contains("T_t") && t->contains("T_r") && p.t_transport > 0.0 && p.t_transport >= p.t_reuse) {
      fail("/timing/T_t", "must be smaller than T_r");
    }
    if (const json* flow = array(*t, "/timing", "continuous_flow", false)) {
      for (std::size_t n = 0; n < flow->size(); ++n) {
        const std::string path = "/timing/continuous_flow/" + std::to_string(n);
        const json& b = (*flow)[n];
        if (!b.is_object()) {
          fail(path, "expected an object");
          continue;
        }
        reject_unknown(b, path, {"t", "rate"});
        Breakpoint bp;
        if (auto v = number(b, path, "t")) bp.time = *v;
        if (auto v = number(b, path, "rate")) bp.value = *v;
        if (n == 0 && bp.time != 0.0) fail(path + "/t", "the first breakpoint must be at t = 0");
        if (n > 0 && !p.continuous_rate.breakpoints.empty() && bp.time <= p.continuous_rate.breakpoints.back().time) {
          fail(path + "/t", "times must increase strictly");
        }
        p.continuous_rate.breakpoints.push_back(bp);
      }
    }
  }

  void read_outcome(const json& root, ScenarioFile& sc) {
    const json* o = object(root, "", "outcome");
    if (!o) return;
    if (o->contains("policy")) {
      reject_unknown(*o, "/outcome", {"policy", "task", "episodes"});
      PolicyReference ref;
      if (auto p = string(*o, "/outcome", "policy")) {
        if (p->empty()) fail("/outcome/policy", "must not be empty");
        ref.policy = *p;
      }
      if (auto task = string(*o, "/outcome", "task")) {
        if (auto k = disassembly::parse_task(*task)) {
          ref.task = *k;
        } else {
          fail("/outcome/task", "unknown task '" + *task + "'");
        }
      }
      if (auto e = integer(*o, "/outcome", "episodes", false)) {
        if (*e < 1 || *e > 1'000'000) fail("/outcome/episodes", "must be in [1, 1000000]");
        ref.episodes = static_cast<int>(*e);
      }
      sc.outcome = ref;
      return;
    }
    reject_unknown(*o, "/outcome", {"s", "T_d"});
    DisassemblyOutcome out;
    if (auto s = number(*o, "/outcome", "s")) {
      if (*s < 0.0 || *s > 100.0) fail("/outcome/s", "must lie in [0, 100]");
      out.success = *s;
    }
    if (auto td = number(*o, "/outcome", "T_d")) {
      if (*td <= 0.0) fail("/outcome/T_d", "must be > 0");
      out.disassembly_time = *td;
    }
    sc.outcome = out;
  }

  void read_options(const json& root, ScenarioFile& sc) {
    const json* o = object(root, "", "options", false);
    if (!o) return;
    reject_unknown(*o, "/options", {"delta", "l", "rounding", "mu_mode"});
    if (auto d = number(*o, "/options", "delta", false)) {
      if (*d <= 0.0) fail("/options/delta", "must be > 0");
      sc.params.delta = *d;
    }
    if (auto l = integer(*o, "/options", "l", false)) {
      if (*l < 0 || *l > 1'000'000) {
        fail("/options/l", "must be a non-negative integer");
      } else {
        sc.params.discarded_functional = static_cast<unsigned>(*l);
      }
    }
    if (auto r = integer(*o, "/options", "rounding", false)) {
      if (*r < 0 || *r > 12) fail("/options/rounding", "must be in [0, 12]");
      sc.rounding = static_cast<int>(*r);
    }
    if (auto m = string(*o, "/options", "mu_mode", false)) {
      if (*m == to_string(MuMode::Global)) {
        sc.mu_mode = MuMode::Global;
      } else if (*m == to_string(MuMode::FunctionalBatch)) {
        sc.mu_mode = MuMode::FunctionalBatch;
      } else {
        fail("/options/mu_mode", "expected \"global\" or \"functional_batch\"");
      }
    }
  }
};

}  // namespace detail

/// Parses and validates scenario text. Malformed JSON raises ParseError;
/// otherwise all validation problems are collected into one ValidationError.
inline ScenarioFile parse_scenario_text(const std::string& text) {
  using nlohmann::json;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(ErrorCode::ParseError, {{"", e.what()}});
  }
  if (!root.is_object()) throw ScenarioError(ErrorCode::ValidationError, {{"", "top level must be an object"}});

  detail::ScenarioReader reader;
  ScenarioFile sc;
  reader.reject_unknown(root, "", {"network", "materials", "timing", "outcome", "options"});
  reader.read_network(root, sc);
  reader.read_materials(root, sc);
  reader.read_timing(root, sc);
  reader.read_outcome(root, sc);
  reader.read_options(root, sc);
  if (!reader.issues.empty()) throw ScenarioError(ErrorCode::ValidationError, std::move(reader.issues));
  return sc;
}

inline ScenarioFile parse_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(ErrorCode::ParseError, {{"", "cannot read " + path.string()}});
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

inline nlohmann::ordered_json to_json(const ScenarioFile& sc) {
  using nlohmann::ordered_json;
  ordered_json root;
  ordered_json comps = ordered_json::array();
  for (const auto& c : sc.compartments) {
    ordered_json j{{"id", c.id}, {"source", c.source}, {"sink", c.sink},
                   {"kind", std::string(to_string(c.kind))}, {"role", std::string(to_string(c.role))}};
    if (!c.label.empty()) j["label"] = c.label;
    comps.push_back(j);
  }
  root["network"] = {{"compartments", comps}};
  ordered_json mats = ordered_json::array();
  for (const auto& m : sc.materials) mats.push_back({{"name", m.name}, {"criticality", m.criticality}, {"mass", m.mass}});
  root["materials"] = mats;
  const ScenarioParams& p = sc.params;
  ordered_json timing{{"t_1out4", 0.0}, {"t_2in4", p.t_supply}, {"T_t", p.t_transport}, {"T_r", p.t_reuse},
                      {"T_i", p.t_incineration}};
  if (!p.continuous_rate.breakpoints.empty()) {
    ordered_json flow = ordered_json::array();
    for (const auto& b : p.continuous_rate.breakpoints) flow.push_back({{"t", b.time}, {"rate", b.value}});
    timing["continuous_flow"] = flow;
  }
  root["timing"] = timing;
  if (const auto* lit = std::get_if<DisassemblyOutcome>(&sc.outcome)) {
    root["outcome"] = {{"s", lit->success}, {"T_d", lit->disassembly_time}};
  } else {
    const auto& ref = std::get<PolicyReference>(sc.outcome);
    root["outcome"] = {{"policy", ref.policy},
                       {"task", std::string(disassembly::to_string(ref.task))},
                       {"episodes", ref.episodes}};
  }
  root["options"] = {{"delta", p.delta},
                     {"l", p.discarded_functional},
                     {"rounding", sc.rounding},
                     {"mu_mode", std::string(to_string(sc.mu_mode))}};
  return root;
}

inline std::string emit_scenario(const ScenarioFile& sc) { return to_json(sc).dump(2) + "\n"; }

}  // namespace ciro

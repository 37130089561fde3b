#pragma once

#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "aqt/adversary.hpp"
#include "aqt/errors.hpp"
#include "aqt/network.hpp"
#include "aqt/strategies.hpp"

// Scenario files are JSON documents:
//
//   {
//     "network":   { "nodes": ["v1", ...],
//                    "edges": [ {"id": "e1", "from": "v1", "to": "v2"}, ... ] },
//     "adversary": { "kind": "saturating", "r": "1/2", "b": 4, "path": ["e1", ...] }
//                | { "kind": "burst", "b": 4, "paths": [["e1", ...], ...] }
//                | { "kind": "scripted", "r": 0.5, "b": 1,
//                    "events": [ {"step": 1, "path": ["e1", ...]}, ... ] },
//     "strategy":  { "kind": "greedy", "discipline": "FIFO" }
//                | { "kind": "interval", "inner": "FIFO", "improvement": false },
//     "run":       { "max_steps": 200, "out": "out" }
//   }
//
// "r" is a JSON number or a string ("0.35", "7/20"). "run" and its fields
// are optional (defaults: max_steps 1000, out "out").

namespace aqt {

enum class AdversaryKind { Scripted, Burst, Saturating };

struct AdversaryDecl {
  AdversaryKind kind = AdversaryKind::Burst;
  std::optional<Rate> rate;
  std::int64_t burst = 1;
  std::vector<PacketPath> paths;  // burst: all packets; saturating: one path
  std::vector<InjectionEvent> events;
};

struct StrategyDecl {
  bool interval = false;
  Discipline discipline = Discipline::FIFO;  // inner discipline when interval
  bool improvement = false;

  std::string describe() const {
    if (!interval) return std::string(to_string(discipline));
    return "interval(" + std::string(to_string(discipline)) + (improvement ? ",improvement" : "") + ")";
  }
};

struct RunDecl {
  Step max_steps = 1000;
  std::string out_dir = "out";
};

struct Scenario {
  Network network;
  AdversaryDecl adversary;
  StrategyDecl strategy;
  RunDecl run;

  // Fresh adversary in its initial state.
  std::unique_ptr<Adversary> make_adversary() const {
    switch (adversary.kind) {
      case AdversaryKind::Scripted:
        return std::make_unique<ScriptedAdversary>(adversary.events, *adversary.rate, adversary.burst);
      case AdversaryKind::Burst:
        return std::make_unique<BurstAdversary>(network, adversary.paths, adversary.burst);
      case AdversaryKind::Saturating:
        return std::make_unique<SaturatingAdversary>(network, adversary.paths.front(), *adversary.rate,
                                                     adversary.burst);
    }
    return nullptr;
  }
};

// Every field error found, one per line, each prefixed by its location.
class ScenarioError : public ValidationError {
 public:
  explicit ScenarioError(std::vector<std::string> errors)
      : ValidationError(join(errors)), errors_(std::move(errors)) {}
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  static std::string join(const std::vector<std::string>& errors) {
    std::string out;
    for (const auto& e : errors) out += (out.empty() ? "" : "\n") + e;
    return out;
  }
  std::vector<std::string> errors_;
};

namespace detail {

using nlohmann::json;

class ScenarioReader {
 public:
  Scenario read(const json& doc) {
    if (!doc.is_object()) fail("", "scenario must be a JSON object");
    std::optional<Network> net;
    if (const json* n = member(doc, "", "network", json::value_t::object)) net = read_network(*n);
    if (const json* a = member(doc, "", "adversary", json::value_t::object)) read_adversary(*a, net);
    if (const json* s = member(doc, "", "strategy", json::value_t::object)) read_strategy(*s);
    if (doc.contains("run")) {
      const json& run = doc["run"];
      if (!run.is_object()) {
        fail("run", "must be an object");
      } else {
        if (run.contains("max_steps")) {
          const auto& m = run["max_steps"];
          if (!m.is_number_integer() || m.get<std::int64_t>() < 1)
            fail("run.max_steps", "must be an integer >= 1");
          else
            out_.run.max_steps = m.get<std::int64_t>();
        }
        if (run.contains("out")) {
          if (!run["out"].is_string())
            fail("run.out", "must be a string");
          else
            out_.run.out_dir = run["out"].get<std::string>();
        }
      }
    }
    if (!errors_.empty()) throw ScenarioError(errors_);
    out_.network = std::move(*net);
    return std::move(out_);
  }

 private:
  void fail(const std::string& where, const std::string& what) {
    errors_.push_back((where.empty() ? std::string("scenario") : where) + ": " + what);
  }

  const json* member(const json& obj, const std::string& where, const char* key, json::value_t type) {
    const auto path = where.empty() ? std::string(key) : where + "." + key;
    if (!obj.contains(key)) {
      fail(path, "missing");
      return nullptr;
    }
    const json& v = obj[key];
    const bool ok = type == json::value_t::number_integer ? v.is_number_integer() : v.type() == type;
    if (!ok) {
      fail(path, std::string("must be of type ") + json(type).type_name());
      return nullptr;
    }
    return &v;
  }

  std::optional<Network> read_network(const json& n) {
    std::vector<std::string> nodes;
    std::vector<EdgeSpec> edges;
    bool ok = true;
    if (const json* list = member(n, "network", "nodes", json::value_t::array)) {
      for (std::size_t k = 0; k < list->size(); ++k) {
        if (!(*list)[k].is_string()) {
          fail("network.nodes[" + std::to_string(k) + "]", "must be a string");
          ok = false;
        } else {
          nodes.push_back((*list)[k].get<std::string>());
        }
      }
    } else {
      ok = false;
    }
    if (const json* list = member(n, "network", "edges", json::value_t::array)) {
      for (std::size_t k = 0; k < list->size(); ++k) {
        const auto where = "network.edges[" + std::to_string(k) + "]";
        const json& e = (*list)[k];
        if (!e.is_object()) {
          fail(where, "must be an object");
          ok = false;
          continue;
        }
        EdgeSpec spec;
        const json* id = member(e, where, "id", json::value_t::string);
        const json* from = member(e, where, "from", json::value_t::string);
        const json* to = member(e, where, "to", json::value_t::string);
        if (!id || !from || !to) {
          ok = false;
          continue;
        }
        edges.push_back({id->get<std::string>(), from->get<std::string>(), to->get<std::string>()});
      }
    } else {
      ok = false;
    }
    if (!ok) return std::nullopt;
    try {
      return Network::build(std::move(nodes), edges);
    } catch (const ValidationError& e) {
      fail("network", e.what());
      return std::nullopt;
    }
  }

  std::optional<PacketPath> read_path(const json& v, const std::string& where,
                                      const std::optional<Network>& net) {
    if (!v.is_array() || v.empty()) {
      fail(where, "must be a non-empty array of edge ids");
      return std::nullopt;
    }
    std::vector<std::string> ids;
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (!v[k].is_string()) {
        fail(where + "[" + std::to_string(k) + "]", "must be a string");
        return std::nullopt;
      }
      ids.push_back(v[k].get<std::string>());
    }
    if (!net) return std::nullopt;
    try {
      return net->resolve_path(ids);
    } catch (const ValidationError& e) {
      fail(where, e.what());
      return std::nullopt;
    }
  }

  std::optional<Rate> read_rate(const json& a) {
    if (!a.contains("r")) {
      fail("adversary.r", "missing");
      return std::nullopt;
    }
    const json& r = a["r"];
    try {
      if (r.is_string()) return Rate::parse(r.get<std::string>());
      if (r.is_number()) return Rate::from_double(r.get<double>());
      fail("adversary.r", "must be a number or a string");
    } catch (const ValidationError& e) {
      fail("adversary.r", std::string(e.what()) + " (violates 0 < r < 1)");
    }
    return std::nullopt;
  }

  void read_adversary(const json& a, const std::optional<Network>& net) {
    auto& decl = out_.adversary;
    const json* kind = member(a, "adversary", "kind", json::value_t::string);
    if (const json* b = member(a, "adversary", "b", json::value_t::number_integer)) {
      decl.burst = b->get<std::int64_t>();
      if (decl.burst < 1) fail("adversary.b", "must be >= 1 (got " + std::to_string(decl.burst) + ")");
    }
    if (!kind) return;
    const auto k = kind->get<std::string>();
    if (k == "burst") {
      decl.kind = AdversaryKind::Burst;
      if (const json* list = member(a, "adversary", "paths", json::value_t::array)) {
        for (std::size_t i = 0; i < list->size(); ++i)
          if (auto p = read_path((*list)[i], "adversary.paths[" + std::to_string(i) + "]", net))
            decl.paths.push_back(std::move(*p));
      }
    } else if (k == "saturating") {
      decl.kind = AdversaryKind::Saturating;
      decl.rate = read_rate(a);
      if (a.contains("path")) {
        if (auto p = read_path(a["path"], "adversary.path", net)) decl.paths.push_back(std::move(*p));
      } else {
        fail("adversary.path", "missing");
      }
    } else if (k == "scripted") {
      decl.kind = AdversaryKind::Scripted;
      decl.rate = read_rate(a);
      if (const json* list = member(a, "adversary", "events", json::value_t::array)) {
        for (std::size_t i = 0; i < list->size(); ++i) {
          const auto where = "adversary.events[" + std::to_string(i) + "]";
          const json& ev = (*list)[i];
          if (!ev.is_object()) {
            fail(where, "must be an object");
            continue;
          }
          const json* step = member(ev, where, "step", json::value_t::number_integer);
          if (step && step->get<std::int64_t>() < 1) fail(where + ".step", "must be >= 1");
          std::optional<PacketPath> p;
          if (ev.contains("path"))
            p = read_path(ev["path"], where + ".path", net);
          else
            fail(where + ".path", "missing");
          if (step && p) decl.events.push_back({step->get<std::int64_t>(), std::move(*p)});
        }
      }
    } else {
      fail("adversary.kind", "must be one of scripted, burst, saturating (got '" + k + "')");
      return;
    }
    // Construct once so budget violations surface as validation errors.
    if (errors_.empty() && net) {
      out_.network = *net;
      try {
        out_.make_adversary();
      } catch (const InadmissibleScript& e) {
        fail("adversary.events", e.what());
      } catch (const ValidationError& e) {
        fail("adversary", e.what());
      }
    }
  }

  void read_strategy(const json& s) {
    auto& decl = out_.strategy;
    const json* kind = member(s, "strategy", "kind", json::value_t::string);
    if (!kind) return;
    const auto k = kind->get<std::string>();
    const char* key = nullptr;
    if (k == "greedy") {
      decl.interval = false;
      key = "discipline";
    } else if (k == "interval") {
      decl.interval = true;
      key = "inner";
      if (s.contains("improvement")) {
        if (!s["improvement"].is_boolean())
          fail("strategy.improvement", "must be a boolean");
        else
          decl.improvement = s["improvement"].get<bool>();
      }
    } else {
      fail("strategy.kind", "must be greedy or interval (got '" + k + "')");
      return;
    }
    if (const json* d = member(s, "strategy", key, json::value_t::string)) {
      try {
        decl.discipline = parse_discipline(d->get<std::string>());
      } catch (const ValidationError& e) {
        fail(std::string("strategy.") + key, e.what());
      }
    }
  }

  Scenario out_;
  std::vector<std::string> errors_;
};

}  // namespace detail

inline Scenario parse_scenario(const nlohmann::json& doc) { return detail::ScenarioReader{}.read(doc); }

inline Scenario parse_scenario(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError({std::string("scenario: not valid JSON: ") + e.what()});
  }
  return parse_scenario(doc);
}

inline Scenario load_scenario(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ScenarioError({"scenario: cannot read file '" + file + "'"});
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

}  // namespace aqt

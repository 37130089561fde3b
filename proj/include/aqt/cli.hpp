#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "aqt/analysis.hpp"
#include "aqt/csv.hpp"
#include "aqt/interval_strategy.hpp"
#include "aqt/scenario.hpp"
#include "aqt/sim_engine.hpp"
#include "aqt/sweep.hpp"

// Subcommands of the aqt tool. Each returns the process exit code:
// 0 success, 2 invalid input, 3 engine invariant violated.
namespace aqt::cli {

inline constexpr int kOk = 0;
inline constexpr int kInvalid = 2;
inline constexpr int kInvariant = 3;

struct RunOptions {
  std::string scenario_file;
  std::optional<Step> max_steps;
  std::optional<std::string> strategy;  // discipline name, "interval" or "interval:NAME"
  std::optional<bool> improvement;
  std::optional<std::string> out_dir;
};

struct RunSummary {
  Step steps = 0;
  bool truncated = false;
  std::size_t injected = 0;
  std::size_t delivered = 0;
  std::int64_t max_queue_len = 0;
  std::optional<Step> max_system_time;
  std::size_t phases_completed = 0;  // excluding the startup phase
  std::optional<GrowthLabel> growth;
};

namespace detail {

inline void apply_overrides(Scenario& sc, const RunOptions& opt) {
  if (opt.max_steps) {
    if (*opt.max_steps < 1) throw ValidationError("--max-steps must be >= 1");
    sc.run.max_steps = *opt.max_steps;
  }
  if (opt.strategy) {
    const std::string& s = *opt.strategy;
    if (s == "interval") {
      sc.strategy.interval = true;
    } else if (s.rfind("interval:", 0) == 0) {
      sc.strategy.interval = true;
      sc.strategy.discipline = parse_discipline(s.substr(9));
    } else {
      sc.strategy.interval = false;
      sc.strategy.discipline = parse_discipline(s);
    }
  }
  if (opt.improvement) sc.strategy.improvement = *opt.improvement;
  if (opt.out_dir) sc.run.out_dir = *opt.out_dir;
}

// Heuristic label over a series; window grows with the series.
inline std::optional<GrowthLabel> label_of(const std::vector<double>& series) {
  const std::size_t window = std::max<std::size_t>(3, series.size() / 4);
  if (series.size() < 2 * window) return std::nullopt;
  return classify_growth(series, window);
}

inline std::ofstream open_csv(const std::filesystem::path& file, const std::string& meta) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + file.string() + "'");
  out << "# " << meta << '\n';
  return out;
}

}  // namespace detail

// Runs the scenario and writes trace.csv, packets.csv and, for the interval
// strategy, phases.csv into the output directory.
inline RunSummary run_scenario(const Scenario& sc, const std::string& meta) {
  auto adversary = sc.make_adversary();
  Trace trace;
  std::vector<PhaseRecord> phases;
  if (sc.strategy.interval) {
    auto it = run_interval(sc.network, sc.strategy.discipline, *adversary, sc.run.max_steps,
                           sc.strategy.improvement);
    trace = std::move(it.trace);
    phases = std::move(it.phases);
  } else {
    trace = run(sc.network, sc.strategy.discipline, *adversary, sc.run.max_steps);
  }

  const std::filesystem::path dir(sc.run.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ValidationError("cannot create output directory '" + dir.string() + "': " + ec.message());
  {
    auto out = detail::open_csv(dir / "trace.csv", meta);
    csv::write_trace(out, trace);
  }
  {
    auto out = detail::open_csv(dir / "packets.csv", meta);
    csv::write_packets(out, trace);
  }
  if (sc.strategy.interval) {
    auto out = detail::open_csv(dir / "phases.csv", meta);
    csv::write_phases(out, phases);
  }

  RunSummary sum;
  sum.steps = trace.steps.empty() ? 0 : trace.steps.back().step;
  sum.truncated = trace.truncated;
  sum.injected = trace.packets.size();
  for (const auto& p : trace.packets) sum.delivered += p.delivered_at.has_value();
  sum.max_queue_len = trace.max_queue_len();
  sum.max_system_time = trace.max_system_time();
  if (sc.strategy.interval) {
    std::vector<double> durations;
    for (const auto& ph : phases)
      if (ph.completed && ph.phase_index > 0) durations.push_back(static_cast<double>(ph.duration));
    sum.phases_completed = durations.size();
    sum.growth = detail::label_of(durations);
  } else {
    // Maxima of the in-system count over twelve equal blocks of the run.
    const std::size_t blocks = 12;
    if (trace.steps.size() >= blocks) {
      std::vector<double> peaks(blocks, 0.0);
      for (std::size_t k = 0; k < trace.steps.size(); ++k) {
        auto& peak = peaks[k * blocks / trace.steps.size()];
        peak = std::max(peak, static_cast<double>(trace.steps[k].total_in_system));
      }
      sum.growth = detail::label_of(peaks);
    }
  }
  return sum;
}

inline int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    Scenario sc = load_scenario(opt.scenario_file);
    detail::apply_overrides(sc, opt);
    const std::string meta = "aqt run scenario=" + opt.scenario_file + " strategy=" + sc.strategy.describe() +
                             " max_steps=" + std::to_string(sc.run.max_steps);
    const RunSummary s = run_scenario(sc, meta);
    out << "strategy:         " << sc.strategy.describe() << '\n'
        << "steps:            " << s.steps << (s.truncated ? " (cut at max_steps)" : "") << '\n'
        << "packets:          " << s.injected << " injected, " << s.delivered << " delivered\n"
        << "max queue length: " << s.max_queue_len << '\n'
        << "max system time:  ";
    if (s.max_system_time)
      out << *s.max_system_time << '\n';
    else
      out << "n/a\n";
    if (sc.strategy.interval) out << "phases completed: " << s.phases_completed << '\n';
    out << (sc.strategy.interval ? "phase durations:  " : "packets in system: ");
    if (s.growth)
      out << to_string(s.growth->label) << " (heuristic, mean ratio " << csv::number(s.growth->mean_ratio)
          << ")\n";
    else
      out << "n/a (series too short)\n";
    out << "output:           " << sc.run.out_dir << '\n';
    return kOk;
  } catch (const InvariantViolation& e) {
    err << "invariant violated: " << e.what() << '\n';
    return kInvariant;
  } catch (const ValidationError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kInvalid;
  } catch (const DomainError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kInvalid;
  }
}

struct BoundsOptions {
  std::string formula;  // line, tree, nonforward, theorem-time, theorem-packets
  std::map<std::string, double> params;  // r, b, d, c1, c2, c3
  std::int64_t i_max = 20;
  double log_base = 2.0;
};

inline int cmd_bounds(const BoundsOptions& opt, std::ostream& out, std::ostream& err) {
  auto need = [&](const char* key) {
    const auto it = opt.params.find(key);
    if (it == opt.params.end())
      throw DomainError(std::string("bounds ") + opt.formula + " requires --" + key);
    return it->second;
  };
  try {
    if (opt.i_max < 1) throw DomainError("--i-max must be >= 1");
    std::function<double(std::int64_t)> term;
    std::optional<std::string> limit;
    std::string meta = "aqt bounds formula=" + opt.formula;
    for (const auto& [k, v] : opt.params) meta += " " + k + "=" + csv::number(v);

    if (opt.formula == "line") {
      const double r = need("r"), b = need("b"), d = need("d");
      term = [=](std::int64_t i) { return line_phase_time_bound(i, r, b, d); };
      limit = csv::number(line_phase_time_limit(r, d));
    } else if (opt.formula == "tree") {
      const double r = need("r"), b = need("b"), d = need("d");
      term = [=](std::int64_t i) { return tree_phase_time_bound(i, r, b, d); };
      switch (tree_phase_time_limit(r, d)) {
        case TreeLimit::Zero: limit = "0"; break;
        case TreeLimit::BurstTimesDilation: limit = csv::number(d * b); break;
        case TreeLimit::Unbounded: limit = "inf"; break;
      }
    } else if (opt.formula == "nonforward") {
      const double r = need("r"), b = need("b"), d = need("d"), base = opt.log_base;
      meta += " log_base=" + csv::number(base);
      term = [=](std::int64_t i) { return nonforward_k(i, r, b, d, base); };
    } else if (opt.formula == "theorem-time" || opt.formula == "theorem-packets") {
      const double r = need("r"), b = need("b"), d = need("d");
      const double c1 = need("c1"), c2 = need("c2"), c3 = need("c3");
      if (opt.formula == "theorem-time") {
        term = [=](std::int64_t i) { return theorem_phase_time_bound(i, r, b, d, c1, c2, c3); };
        limit = csv::number(theorem_phase_time_limit(r, d, c1, c2, c3));
      } else {
        term = [=](std::int64_t i) { return theorem_phase_packet_bound(i, r, b, d, c1, c2, c3); };
        limit = csv::number(theorem_phase_time_limit(r, d, c1, c2, c3) * r);
      }
    } else {
      throw DomainError("unknown formula '" + opt.formula +
                        "' (expected line, tree, nonforward, theorem-time, theorem-packets)");
    }

    // Validate the parameters before emitting anything.
    std::vector<double> values{term(1)};
    std::optional<std::string> stopped;
    for (std::int64_t i = 2; i <= opt.i_max; ++i) {
      try {
        values.push_back(term(i));
      } catch (const DomainError& e) {
        if (opt.formula != "nonforward") throw;
        stopped = e.what();
        break;
      }
    }

    out << "# " << meta << '\n' << "i,value\n";
    for (std::size_t k = 0; k < values.size(); ++k) out << (k + 1) << ',' << csv::number(values[k]) << '\n';
    if (limit) out << "limit," << *limit << '\n';
    if (stopped) out << "# stopped: " << *stopped << '\n';
    if (auto g = detail::label_of(values))
      out << "# growth: " << to_string(g->label) << " (heuristic, mean ratio " << csv::number(g->mean_ratio)
          << ")\n";
    else
      out << "# growth: n/a (series too short)\n";
    return kOk;
  } catch (const DomainError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kInvalid;
  }
}

struct SweepOptions {
  std::size_t max_packets = 4;
  std::size_t max_edges = 4;
  std::vector<std::string> shapes{"line", "tree"};
  std::optional<std::string> out_file;
  unsigned threads = 0;  // 0: hardware concurrency
};

inline constexpr std::size_t kSweepMaxPackets = 6;
inline constexpr std::size_t kSweepMaxEdges = 6;

inline int cmd_sweep(const SweepOptions& opt, std::ostream& out, std::ostream& err) {
  bool lines = false, trees = false;
  for (const auto& s : opt.shapes) {
    if (s == "line") {
      lines = true;
    } else if (s == "tree") {
      trees = true;
    } else {
      err << "invalid input: unknown shape '" << s << "' (expected line or tree)\n";
      return kInvalid;
    }
  }
  if (opt.max_packets > kSweepMaxPackets || opt.max_edges > kSweepMaxEdges) {
    err << "invalid input: sweep is limited to " << kSweepMaxPackets << " packets and " << kSweepMaxEdges
        << " edges\n";
    return kInvalid;
  }
  try {
    const auto tops = sweep::topologies(opt.max_edges, lines, trees);
    const auto insts = opt.max_packets == 0 ? std::vector<sweep::Instance>{} : sweep::instances(tops, opt.max_packets);
    const unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
    const auto rows = sweep::run(tops, insts, threads);

    std::size_t above = 0;
    std::optional<std::size_t> first;
    for (const auto& r : rows) {
      if (r.exceeds_n_plus_d()) {
        ++above;
        if (!first) first = r.instance_id;
      }
    }
    std::string summary = "instances=" + std::to_string(rows.size()) + " topologies=" +
                          std::to_string(tops.size()) + " above_n_plus_d=" + std::to_string(above);
    summary += above ? " first_counterexample=" + std::to_string(*first) : " (no instance needs more than n+d)";

    std::ostringstream table;
    table << "# aqt sweep max_packets=" << opt.max_packets << " max_edges=" << opt.max_edges
          << " shapes=" << (lines ? "line" : "") << (lines && trees ? "," : "") << (trees ? "tree" : "") << '\n';
    sweep::write_csv(table, rows);
    if (opt.out_file) {
      std::ofstream file(*opt.out_file, std::ios::binary);
      if (!file) {
        err << "invalid input: cannot write '" << *opt.out_file << "'\n";
        return kInvalid;
      }
      file << table.str() << "# " << summary << '\n';
      out << summary << '\n';
    } else {
      out << table.str() << "# " << summary << '\n';
    }
    return kOk;
  } catch (const InvariantViolation& e) {
    err << "invariant violated: " << e.what() << '\n';
    return kInvariant;
  }
}

}  // namespace aqt::cli

// aqt: adversarial queueing simulator and bound calculator.
//
//   aqt run <scenario.json> [--max-steps N] [--strategy NAME] [--improvement on|off] [--out DIR]
//   aqt bounds <formula> [--r R --b B --d D --c1 --c2 --c3 --i-max N --log-base X] [key=value ...]
//   aqt sweep [--max-packets N] [--max-edges N] [--shapes line,tree] [--out FILE]

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "aqt/cli.hpp"

namespace {

// Folds "r=0.5"-style positional tokens into the bounds options.
bool apply_key_values(const std::vector<std::string>& tokens, aqt::cli::BoundsOptions& opt) {
  for (const auto& tok : tokens) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) {
      std::cerr << "invalid input: expected key=value, got '" << tok << "'\n";
      return false;
    }
    const auto key = tok.substr(0, eq);
    const auto value = tok.substr(eq + 1);
    try {
      std::size_t used = 0;
      const double v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      if (key == "i_max" || key == "i-max")
        opt.i_max = static_cast<std::int64_t>(v);
      else if (key == "log_base" || key == "log-base")
        opt.log_base = v;
      else if (key == "r" || key == "b" || key == "d" || key == "c1" || key == "c2" || key == "c3")
        opt.params[key] = v;
      else
        throw std::invalid_argument(key);
    } catch (const std::exception&) {
      std::cerr << "invalid input: cannot use '" << tok << "'\n";
      return false;
    }
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adversarial queueing simulator: interval strategy, greedy disciplines, bounds"};
  app.require_subcommand(1);

  aqt::cli::RunOptions run_opt;
  std::optional<std::string> improvement;
  auto* run = app.add_subcommand("run", "Simulate a scenario file and write CSV traces");
  run->add_option("scenario", run_opt.scenario_file, "Scenario JSON file")->required();
  run->add_option("--max-steps", run_opt.max_steps, "Override run.max_steps");
  run->add_option("--strategy", run_opt.strategy, "Discipline name, 'interval' or 'interval:NAME'");
  run->add_option("--improvement", improvement, "Pass-through improvement for the interval strategy")
      ->check(CLI::IsMember({"on", "off"}));
  run->add_option("--out", run_opt.out_dir, "Output directory");

  aqt::cli::BoundsOptions bounds_opt;
  std::vector<std::string> key_values;
  auto* bounds = app.add_subcommand("bounds", "Tabulate an analytical phase bound");
  bounds->add_option("formula", bounds_opt.formula, "line, tree, nonforward, theorem-time, theorem-packets")
      ->required();
  bounds->add_option("params", key_values, "Optional key=value parameters");
  std::optional<double> r, b, d, c1, c2, c3;
  bounds->add_option("--r", r, "Injection rate");
  bounds->add_option("--b", b, "Burst");
  bounds->add_option("--d", d, "Dilation");
  bounds->add_option("--c1", c1, "Static-routing coefficient of n");
  bounds->add_option("--c2", c2, "Static-routing coefficient of d");
  bounds->add_option("--c3", c3, "Static-routing constant");
  bounds->add_option("--i-max", bounds_opt.i_max, "Number of phases");
  bounds->add_option("--log-base", bounds_opt.log_base, "Logarithm base for nonforward");

  aqt::cli::SweepOptions sweep_opt;
  std::string shapes = "line,tree";
  auto* sweep = app.add_subcommand("sweep", "Optimal vs greedy makespan over small static instances");
  sweep->add_option("--max-packets", sweep_opt.max_packets, "Largest packet set");
  sweep->add_option("--max-edges", sweep_opt.max_edges, "Largest topology");
  sweep->add_option("--shapes", shapes, "Comma-separated: line, tree");
  sweep->add_option("--out", sweep_opt.out_file, "Write the table to a file");
  sweep->add_option("--threads", sweep_opt.threads, "Worker threads (0: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : aqt::cli::kInvalid;
  }

  if (*run) {
    if (improvement) run_opt.improvement = *improvement == "on";
    return aqt::cli::cmd_run(run_opt, std::cout, std::cerr);
  }
  if (*bounds) {
    const std::pair<const char*, std::optional<double>*> named[] = {
        {"r", &r}, {"b", &b}, {"d", &d}, {"c1", &c1}, {"c2", &c2}, {"c3", &c3}};
    for (const auto& [key, value] : named)
      if (*value) bounds_opt.params[key] = **value;
    if (!apply_key_values(key_values, bounds_opt)) return aqt::cli::kInvalid;
    return aqt::cli::cmd_bounds(bounds_opt, std::cout, std::cerr);
  }
  sweep_opt.shapes.clear();
  std::string token;
  for (const char c : shapes + ",") {
    if (c == ',') {
      if (!token.empty()) sweep_opt.shapes.push_back(token);
      token.clear();
    } else {
      token += c;
    }
  }
  return aqt::cli::cmd_sweep(sweep_opt, std::cout, std::cerr);
}

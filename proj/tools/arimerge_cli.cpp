// Command-line front end: fit, merge, tree, simulate, count.

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "arimerge/csv_io.hpp"
#include "arimerge/grouping.hpp"
#include "arimerge/simulator.hpp"

namespace {

using namespace arimerge;

constexpr int kExitInput = 1;
constexpr int kExitNumeric = 2;

ModelSpec parse_spec(const std::string& text) {
  ModelSpec spec;
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  if (!(in >> spec.p >> c1 >> spec.d >> c2 >> spec.q) || c1 != ',' || c2 != ',' ||
      !(in >> std::ws).eof()) {
    throw Error(ErrorKind::InvalidInput, "--spec expects p,d,q, got '" + text + "'");
  }
  spec.validate();
  return spec;
}

double parse_beta(const std::string& text) {
  if (text == "inf" || text == "infinity") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double beta = 0;
  try {
    beta = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !(beta >= 0)) {
    throw Error(ErrorKind::InvalidInput, "--beta expects a non-negative number or 'inf'");
  }
  return beta;
}

/// Writes to `path`, or stdout when empty.
template <typename Fn>
void emit(const std::string& path, Fn&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidInput, "cannot write '" + path + "'");
  write(out);
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fit, merge and simulate ARIMA models over a sensor aggregation tree"};
  app.require_subcommand(1);

  std::string input, models_path, out_path, spec_text = "3,0,0", strategy_text = "adjacent",
                                             beta_text = "inf";
  bool weighted = false, as_json = false;
  long pairings = 0, trees = 0;

  auto* fit = app.add_subcommand("fit", "Fit AR models to every column of a readings CSV");
  fit->add_option("csv", input, "Readings CSV")->required();
  fit->add_option("--spec", spec_text, "Model order p,d,q");
  fit->add_option("--out", out_path, "Output model CSV (default stdout)");

  auto* merge = app.add_subcommand("merge", "Merge consecutive pairs of models");
  merge->add_option("models", input, "Model CSV")->required();
  merge->add_flag("--weighted", weighted, "Weight coefficients by leaf count");
  merge->add_option("--out", out_path, "Output merged-model CSV (default stdout)");

  auto* tree = app.add_subcommand("tree", "Build the merge tree over a model table");
  tree->add_option("models", input, "Model CSV")->required();
  tree->add_option("--strategy", strategy_text, "adjacent | similarity");
  tree->add_flag("--weighted", weighted, "Weight coefficients by leaf count");
  tree->add_flag("--json", as_json, "Structured output");

  auto* simulate = app.add_subcommand("simulate", "Run the aggregation pipeline");
  simulate->add_option("csv", input, "Readings CSV")->required();
  simulate->add_option("--models", models_path, "Leaf models to use instead of fitting");
  simulate->add_option("--spec", spec_text, "Model order p,d,q");
  simulate->add_option("--beta", beta_text, "Suppression half-width, or inf");
  simulate->add_option("--strategy", strategy_text, "adjacent | similarity");
  simulate->add_flag("--weighted", weighted, "Weight coefficients by leaf count");
  simulate->add_option("--out", out_path, "report.csv or report.json (default CSV on stdout)");

  auto* count = app.add_subcommand("count", "Pairing and tree counts");
  auto* pairings_opt = count->add_option("--pairings", pairings, "T(2n) for this even 2n");
  auto* trees_opt = count->add_option("--trees", trees, "G(n) for this even n");
  pairings_opt->excludes(trees_opt);
  trees_opt->excludes(pairings_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    const MergeRule rule = weighted ? MergeRule::weighted : MergeRule::average;

    if (*fit) {
      const ModelSpec spec = parse_spec(spec_text);
      std::vector<LeafModel> models;
      for (const auto& s : read_readings_file(input)) models.push_back({s.node_id(), fit_ar(s, spec)});
      emit(out_path, [&](std::ostream& os) { write_models(os, models); });
    } else if (*merge) {
      const auto models = read_models_file(input);
      if (models.empty() || models.size() % 2 != 0) {
        throw Error(ErrorKind::InvalidInput, "merge needs an even, non-zero number of models");
      }
      std::vector<MergedModel> merged;
      for (std::size_t k = 0; k < models.size(); k += 2) {
        const auto& a = models[k];
        const auto& b = models[k + 1];
        merged.push_back(rule == MergeRule::weighted
                             ? weighted_merge(a.model, b.model, a.id, b.id)
                             : average_merge(a.model, b.model, a.id, b.id));
      }
      emit(out_path, [&](std::ostream& os) { write_merged_models(os, merged); });
    } else if (*tree) {
      const auto models = read_models_file(input);
      const auto t = build_merge_tree(models, parse_strategy(strategy_text), rule);
      std::cout << (as_json ? tree_to_json(t) + "\n" : tree_to_text(t));
    } else if (*simulate) {
      PipelineOptions options;
      options.spec = parse_spec(spec_text);
      options.strategy = parse_strategy(strategy_text);
      options.rule = rule;
      options.policy.beta = parse_beta(beta_text);
      if (!models_path.empty()) options.leaf_models = read_models_file(models_path);
      const auto readings = read_readings_file(input);
      const auto report = run_pipeline(readings, options);
      emit(out_path, [&](std::ostream& os) {
        if (ends_with(out_path, ".json")) {
          os << report_to_json(report) << '\n';
        } else {
          write_report_csv(os, report);
        }
      });
    } else if (*count) {
      if (pairings_opt->count() > 0) {
        std::cout << count_pairings(pairings).value << '\n';
      } else if (trees_opt->count() > 0) {
        std::cout << count_trees(trees).value << '\n';
      } else {
        throw Error(ErrorKind::InvalidInput, "count needs --pairings or --trees");
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return is_numeric_failure(e.kind()) ? kExitNumeric : kExitInput;
  }
  return 0;
}

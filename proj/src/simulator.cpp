#include "arimerge/simulator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <ostream>

#include <json.hpp>

#include "arimerge/merge.hpp"

namespace arimerge {

namespace {

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

/// Per-node data the merge-error evaluation needs: the node's (aggregate) readings
/// on the original scale and its model's residual trace over them.
struct NodeData {
  Eigen::VectorXd readings;
  ResidualTrace trace;
};

/// RMS over time steps of the merge-error bound for merging a and b.
double merged_error_value(const MergeNode& a, const NodeData& da, const MergeNode& b,
                          const NodeData& db) {
  const ModelSpec& spec = a.model.spec;
  const auto wa = difference(Series(da.readings), spec.d).first.values();
  const auto wb = difference(Series(db.readings), spec.d).first.values();
  const Eigen::Index p = spec.p;
  const Eigen::Index q = spec.q;
  if (wa.size() <= p) {
    throw Error(ErrorKind::SeriesTooShort, "not enough readings to evaluate merge error");
  }

  Eigen::VectorXd hist_a(p), hist_b(p), res_a(q), res_b(q);
  double sum_sq = 0;
  Eigen::Index steps = 0;
  for (Eigen::Index t = p; t < wa.size(); ++t) {
    for (Eigen::Index i = 1; i <= p; ++i) {
      hist_a(i - 1) = wa(t - i);
      hist_b(i - 1) = wb(t - i);
    }
    for (Eigen::Index j = 1; j <= q; ++j) {
      res_a(j - 1) = da.trace.at(t - j);
      res_b(j - 1) = db.trace.at(t - j);
    }
    const double e = merge_error_bound(a.model, b.model, a.model.error_value, b.model.error_value,
                                       hist_a, hist_b, res_a, res_b);
    sum_sq += e * e;
    ++steps;
  }
  return std::sqrt(sum_sq / double(steps));
}

std::vector<LeafModel> leaf_models_for(std::span<const Series> readings,
                                       const PipelineOptions& options) {
  std::vector<LeafModel> leaves;
  if (!options.leaf_models) {
    for (const auto& s : readings) leaves.push_back({s.node_id(), fit_ar(s, options.spec)});
    return leaves;
  }
  std::map<std::string, const ArimaModel*> by_id;
  for (const auto& lm : *options.leaf_models) by_id[lm.id] = &lm.model;
  if (by_id.size() != readings.size()) {
    throw Error(ErrorKind::InvalidInput, std::to_string(options.leaf_models->size()) +
                                             " leaf models for " +
                                             std::to_string(readings.size()) + " columns");
  }
  for (const auto& s : readings) {
    auto it = by_id.find(s.node_id());
    if (it == by_id.end()) {
      throw Error(ErrorKind::InvalidInput, "no leaf model for column '" + s.node_id() + "'");
    }
    leaves.push_back({s.node_id(), *it->second});
  }
  return leaves;
}

}  // namespace

bool should_transmit(double last_sent, double current, const SuppressionPolicy& policy) {
  return std::abs(current - last_sent) > policy.beta;
}

long message_cost(const ArimaModel& m) {
  const long sigmas = m.weight > 1 ? 2 : 0;
  return 1 + m.spec.p + m.spec.q + 1 + 1 + sigmas + 1;
}

double percentage_error(double error_value, const MergeNode& subtree, const MergeTree& tree) {
  if (subtree.leaf_ids.empty()) throw Error(ErrorKind::EmptySubtree, "subtree has no leaves");
  if (error_value == 0) return 0;
  double reference = std::numeric_limits<double>::infinity();
  for (const auto& id : subtree.leaf_ids) {
    reference = std::min(reference, tree.nodes[tree.leaf_index(id)].model.constant);
  }
  return 100.0 * error_value / reference;
}

SimulationReport run_pipeline(std::span<const Series> readings, const PipelineOptions& options) {
  if (readings.empty()) throw Error(ErrorKind::EmptyInput, "no readings");
  const Eigen::Index steps = readings.front().length();
  for (const auto& s : readings) {
    if (s.length() != steps) {
      throw Error(ErrorKind::InconsistentColumns, "column '" + s.node_id() + "' has " +
                                                      std::to_string(s.length()) + " rows");
    }
  }

  const auto leaves = leaf_models_for(readings, options);
  SimulationReport report;
  report.tree = build_merge_tree(leaves, options.strategy, options.rule);
  MergeTree& tree = report.tree;

  // Nodes are stored children-first, so one forward pass sees children before parents.
  std::vector<NodeData> data(tree.nodes.size());
  for (std::size_t idx = 0; idx < tree.nodes.size(); ++idx) {
    MergeNode& node = tree.nodes[idx];
    if (node.is_leaf()) {
      data[idx].readings = readings[idx].values();
    } else {
      const auto [ia, ib] = *node.children;
      const MergeNode& a = tree.nodes[ia];
      const MergeNode& b = tree.nodes[ib];
      const double share_b = options.rule == MergeRule::weighted
                                 ? double(b.model.weight) / double(a.model.weight + b.model.weight)
                                 : 0.5;
      data[idx].readings = (1.0 - share_b) * data[ia].readings + share_b * data[ib].readings;
      node.model.error_value = merged_error_value(a, data[ia], b, data[ib]);
    }
    data[idx].trace = residuals(node.model, Series(data[idx].readings));
  }

  for (std::size_t level = 0; level < tree.levels.size(); ++level) {
    LevelReport lr{static_cast<int>(level), {}};
    for (std::size_t idx : tree.levels[level]) {
      const MergeNode& node = tree.nodes[idx];
      ReportRow row;
      row.node_ids = node.id();
      row.weight = node.model.weight;
      row.promoted = tree.promoted(level, idx);
      row.constant = node.model.constant;
      row.ar = node.model.ar;
      row.ma = node.model.ma;
      row.error_value = node.model.error_value;
      row.reference_used = std::numeric_limits<double>::infinity();
      for (const auto& id : node.leaf_ids) {
        row.reference_used =
            std::min(row.reference_used, tree.nodes[tree.leaf_index(id)].model.constant);
      }
      row.error_percent = percentage_error(row.error_value, node, tree);
      lr.rows.push_back(std::move(row));
    }
    report.levels.push_back(std::move(lr));
  }

  report.messages_raw = static_cast<long>(readings.size()) * static_cast<long>(steps);
  for (const auto& node : tree.nodes) report.messages_model += message_cost(node.model);
  for (const auto& s : readings) {
    double last_sent = s[0];
    for (Eigen::Index t = 1; t < s.length(); ++t) {
      if (should_transmit(last_sent, s[t], options.policy)) {
        last_sent = s[t];
        ++report.suppression_events;
      }
    }
  }
  report.messages_model += report.suppression_events;
  return report;
}

void write_report_csv(std::ostream& out, const SimulationReport& report) {
  for (const auto& level : report.levels) {
    if (level.rows.empty()) continue;
    out << "level,node_ids,weight,promoted,constant";
    for (Eigen::Index i = 1; i <= level.rows.front().ar.size(); ++i) out << ",ar_" << i;
    for (Eigen::Index i = 1; i <= level.rows.front().ma.size(); ++i) out << ",ma_" << i;
    out << ",error_value,error_percent,reference_used\n";
    for (const auto& row : level.rows) {
      out << level.level << ',' << row.node_ids << ',' << row.weight << ','
          << (row.promoted ? 1 : 0) << ',' << fmt(row.constant);
      for (double v : row.ar) out << ',' << fmt(v);
      for (double v : row.ma) out << ',' << fmt(v);
      out << ',' << fmt(row.error_value) << ',' << fmt(row.error_percent) << ','
          << fmt(row.reference_used) << '\n';
    }
    out << '\n';
  }
  out << "messages_raw,messages_model,suppression_events\n"
      << report.messages_raw << ',' << report.messages_model << ',' << report.suppression_events
      << '\n';
}

std::string report_to_json(const SimulationReport& report) {
  using nlohmann::json;
  json levels = json::array();
  for (const auto& level : report.levels) {
    json rows = json::array();
    for (const auto& row : level.rows) {
      rows.push_back({{"node_ids", row.node_ids},
                      {"weight", row.weight},
                      {"promoted", row.promoted},
                      {"constant", row.constant},
                      {"ar", std::vector<double>(row.ar.begin(), row.ar.end())},
                      {"ma", std::vector<double>(row.ma.begin(), row.ma.end())},
                      {"error_value", row.error_value},
                      {"error_percent", row.error_percent},
                      {"reference_used", row.reference_used}});
    }
    levels.push_back({{"level", level.level}, {"rows", std::move(rows)}});
  }
  return json{{"levels", std::move(levels)},
              {"messages_raw", report.messages_raw},
              {"messages_model", report.messages_model},
              {"suppression_events", report.suppression_events}}
      .dump(2);
}

}  // namespace arimerge

#pragma once

#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "arimerge/arima.hpp"
#include "arimerge/grouping.hpp"
#include "arimerge/series.hpp"

namespace arimerge {

/// A leaf stays silent while its reading is within beta of the last state it sent.
struct SuppressionPolicy {
  double beta = std::numeric_limits<double>::infinity();
};

bool should_transmit(double last_sent, double current, const SuppressionPolicy& policy);

/// Scalars sent upstream to establish one model: constant, p AR and q MA
/// coefficients, error, weight, one initial state value, plus two family sigmas
/// for merged models (weight > 1).
long message_cost(const ArimaModel& m);

/// 100 * error_value / (smallest leaf constant under `subtree`).
double percentage_error(double error_value, const MergeNode& subtree, const MergeTree& tree);

struct ReportRow {
  std::string node_ids;
  long weight = 1;
  bool promoted = false;
  double constant = 0;
  Eigen::VectorXd ar;
  Eigen::VectorXd ma;
  double error_value = 0;
  double error_percent = 0;
  /// Denominator of error_percent; per row since every subtree has its own.
  double reference_used = 0;
};

struct LevelReport {
  int level = 0;
  std::vector<ReportRow> rows;
};

struct SimulationReport {
  std::vector<LevelReport> levels;
  long messages_raw = 0;
  long messages_model = 0;
  long suppression_events = 0;
  MergeTree tree;
};

struct PipelineOptions {
  ModelSpec spec{3, 0, 0};
  Strategy strategy = Strategy::adjacent;
  MergeRule rule = MergeRule::average;
  SuppressionPolicy policy;
  /// Used instead of fitting when set; matched to readings columns by id.
  std::optional<std::vector<LeafModel>> leaf_models;
};

SimulationReport run_pipeline(std::span<const Series> readings, const PipelineOptions& options);

void write_report_csv(std::ostream& out, const SimulationReport& report);
std::string report_to_json(const SimulationReport& report);

}  // namespace arimerge

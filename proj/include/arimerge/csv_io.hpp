#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "arimerge/grouping.hpp"
#include "arimerge/merge.hpp"
#include "arimerge/series.hpp"

namespace arimerge {

/// Readings table: a header row of node ids, then one row of readings per time step.
std::vector<Series> read_readings(std::istream& in);
std::vector<Series> read_readings_file(const std::string& path);
void write_readings(std::ostream& out, std::span<const Series> columns);

/// Model table: node_ids,p,d,q,constant,ar_1..ar_p,ma_1..ma_q,error_value,weight.
/// node_ids joins several ids with ';'.
std::vector<LeafModel> read_models(std::istream& in);
std::vector<LeafModel> read_models_file(const std::string& path);
void write_models(std::ostream& out, std::span<const LeafModel> models);

/// Model row followed by child_1,child_2, per-child sigma columns and merge_error.
void write_merged_models(std::ostream& out, std::span<const MergedModel> merged);

/// Indented text dump, one line per node, children below their parent.
std::string tree_to_text(const MergeTree& tree);
/// Levels with node ids, leaf ids and model rows.
std::string tree_to_json(const MergeTree& tree);

}  // namespace arimerge

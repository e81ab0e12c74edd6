#include "arimerge/csv_io.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace arimerge {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string_view rest(line);
  while (true) {
    const auto comma = rest.find(',');
    cells.push_back(trim(rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return cells;
}

bool blank(const std::string& line) { return trim(line).empty(); }

double parse_double(const std::string& cell, std::size_t line_no) {
  double value = 0;
  const char* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(cell.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    // from_chars rejects "inf"/"+x" spellings the CLI may see; fall back to strtod.
    char* stop = nullptr;
    value = std::strtod(cell.c_str(), &stop);
    if (cell.empty() || stop != cell.c_str() + cell.size()) {
      throw Error(ErrorKind::InvalidInput,
                  "line " + std::to_string(line_no) + ": '" + cell + "' is not a number");
    }
  }
  return value;
}

long parse_long(const std::string& cell, std::size_t line_no) {
  long value = 0;
  const char* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(cell.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw Error(ErrorKind::InvalidInput,
                "line " + std::to_string(line_no) + ": '" + cell + "' is not an integer");
  }
  return value;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidInput, "cannot open '" + path + "'");
  return in;
}

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_model_cells(std::ostream& out, const std::string& ids, const ArimaModel& m) {
  out << ids << ',' << m.spec.p << ',' << m.spec.d << ',' << m.spec.q << ',' << fmt(m.constant);
  for (double v : m.ar) out << ',' << fmt(v);
  for (double v : m.ma) out << ',' << fmt(v);
  out << ',' << fmt(m.error_value) << ',' << m.weight;
}

void write_model_header(std::ostream& out, const ModelSpec& spec) {
  out << "node_ids,p,d,q,constant";
  for (int i = 1; i <= spec.p; ++i) out << ",ar_" << i;
  for (int i = 1; i <= spec.q; ++i) out << ",ma_" << i;
  out << ",error_value,weight";
}

}  // namespace

std::vector<Series> read_readings(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    header = split_row(line);
    break;
  }
  if (header.empty()) throw Error(ErrorKind::EmptyInput, "readings table has no header");

  std::vector<std::vector<double>> columns(header.size());
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto cells = split_row(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorKind::InconsistentColumns,
                  "line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                      " cells, header has " + std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      columns[c].push_back(parse_double(cells[c], line_no));
    }
  }
  if (columns.front().empty()) throw Error(ErrorKind::EmptyInput, "readings table has no rows");

  std::vector<Series> out;
  out.reserve(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    out.emplace_back(header[c], Eigen::Map<const Eigen::VectorXd>(
                                    columns[c].data(), static_cast<Eigen::Index>(columns[c].size())));
  }
  return out;
}

std::vector<Series> read_readings_file(const std::string& path) {
  auto in = open_input(path);
  return read_readings(in);
}

void write_readings(std::ostream& out, std::span<const Series> columns) {
  if (columns.empty()) return;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    out << (c ? "," : "") << columns[c].node_id();
  }
  out << '\n';
  for (Eigen::Index t = 0; t < columns.front().length(); ++t) {
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << fmt(columns[c][t]);
    out << '\n';
  }
}

std::vector<LeafModel> read_models(std::istream& in) {
  std::vector<LeafModel> models;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto cells = split_row(line);
    if (cells.front() == "node_ids") continue;
    if (cells.size() < 7) {
      throw Error(ErrorKind::InvalidInput, "line " + std::to_string(line_no) + ": too few cells");
    }
    ArimaModel m;
    m.spec = {static_cast<int>(parse_long(cells[1], line_no)),
              static_cast<int>(parse_long(cells[2], line_no)),
              static_cast<int>(parse_long(cells[3], line_no))};
    m.spec.validate();
    const std::size_t expected = 7 + static_cast<std::size_t>(m.spec.p + m.spec.q);
    if (cells.size() < expected) {
      throw Error(ErrorKind::InconsistentColumns,
                  "line " + std::to_string(line_no) + ": spec " + m.spec.to_string() + " needs " +
                      std::to_string(expected) + " cells");
    }
    std::size_t k = 4;
    m.constant = parse_double(cells[k++], line_no);
    m.ar.resize(m.spec.p);
    for (int i = 0; i < m.spec.p; ++i) m.ar(i) = parse_double(cells[k++], line_no);
    m.ma.resize(m.spec.q);
    for (int i = 0; i < m.spec.q; ++i) m.ma(i) = parse_double(cells[k++], line_no);
    m.error_value = parse_double(cells[k++], line_no);
    m.weight = parse_long(cells[k++], line_no);
    m.validate();
    models.push_back({cells[0], std::move(m)});
  }
  return models;
}

std::vector<LeafModel> read_models_file(const std::string& path) {
  auto in = open_input(path);
  return read_models(in);
}

void write_models(std::ostream& out, std::span<const LeafModel> models) {
  if (models.empty()) return;
  write_model_header(out, models.front().model.spec);
  out << '\n';
  for (const auto& lm : models) {
    write_model_cells(out, lm.id, lm.model);
    out << '\n';
  }
}

void write_merged_models(std::ostream& out, std::span<const MergedModel> merged) {
  if (merged.empty()) return;
  write_model_header(out, merged.front().model.spec);
  out << ",child_1,sigma_constant_1,sigma_phi_1,sigma_psi_1"
         ",child_2,sigma_constant_2,sigma_phi_2,sigma_psi_2,merge_error\n";
  for (const auto& mm : merged) {
    write_model_cells(out, mm.deviations[0].child_id + ";" + mm.deviations[1].child_id, mm.model);
    for (const auto& dev : mm.deviations) {
      out << ',' << dev.child_id << ',' << fmt(dev.sigma_constant) << ',' << fmt(dev.sigma_phi)
          << ',' << fmt(dev.sigma_psi);
    }
    out << ',' << fmt(mm.merge_error) << '\n';
  }
}

std::string tree_to_text(const MergeTree& tree) {
  std::ostringstream out;
  std::function<void(std::size_t, int)> visit = [&](std::size_t idx, int depth) {
    const auto& node = tree.nodes[idx];
    out << std::string(static_cast<std::size_t>(depth) * 2, ' ') << '[' << node.id() << "] ";
    write_model_cells(out, node.is_leaf() ? "leaf" : "merged", node.model);
    out << '\n';
    if (node.children) {
      for (std::size_t child : *node.children) visit(child, depth + 1);
    }
  };
  visit(tree.root(), 0);
  return out.str();
}

std::string tree_to_json(const MergeTree& tree) {
  using nlohmann::json;
  json levels = json::array();
  for (std::size_t level = 0; level < tree.levels.size(); ++level) {
    json nodes = json::array();
    for (std::size_t idx : tree.levels[level]) {
      const auto& n = tree.nodes[idx];
      json row{{"id", n.id()},
               {"leaf_ids", n.leaf_ids},
               {"promoted", tree.promoted(level, idx)},
               {"spec", {n.model.spec.p, n.model.spec.d, n.model.spec.q}},
               {"constant", n.model.constant},
               {"ar", std::vector<double>(n.model.ar.begin(), n.model.ar.end())},
               {"ma", std::vector<double>(n.model.ma.begin(), n.model.ma.end())},
               {"error_value", n.model.error_value},
               {"weight", n.model.weight}};
      if (n.children) {
        json devs = json::array();
        for (const auto& d : n.deviations) {
          devs.push_back({{"child_id", d.child_id},
                          {"sigma_constant", d.sigma_constant},
                          {"sigma_phi", d.sigma_phi},
                          {"sigma_psi", d.sigma_psi}});
        }
        row["deviations"] = std::move(devs);
      }
      nodes.push_back(std::move(row));
    }
    levels.push_back({{"level", level}, {"nodes", std::move(nodes)}});
  }
  return json{{"levels", std::move(levels)}}.dump(2);
}

}  // namespace arimerge

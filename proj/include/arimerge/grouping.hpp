#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "arimerge/arima.hpp"
#include "arimerge/error.hpp"
#include "arimerge/merge.hpp"

namespace arimerge {

/// Exact pairing/tree count. Arithmetic is overflow-checked; overflow throws.
struct PairingCount {
  std::uint64_t value = 0;

  friend bool operator==(const PairingCount&, const PairingCount&) = default;
};

/// Ways to split two_n items into unordered pairs: (two_n - 1)!!.
PairingCount count_pairings(long two_n);

/// Pairing-tree count G(n) = T(n) * G(n/2), with an odd n/2 rounded up to the next even number.
PairingCount count_trees(long n);

inline constexpr std::size_t kMaxEnumeratedIds = 12;

template <typename Id>
using Pairing = std::vector<std::pair<Id, Id>>;

namespace detail {

template <typename Id>
void enumerate_pairings_into(std::vector<Id>& rest, Pairing<Id>& current,
                             std::vector<Pairing<Id>>& out) {
  if (rest.empty()) {
    out.push_back(current);
    return;
  }
  const Id first = rest.front();
  for (std::size_t k = 1; k < rest.size(); ++k) {
    std::vector<Id> remaining;
    remaining.reserve(rest.size() - 2);
    for (std::size_t j = 1; j < rest.size(); ++j) {
      if (j != k) remaining.push_back(rest[j]);
    }
    current.emplace_back(first, rest[k]);
    enumerate_pairings_into(remaining, current, out);
    current.pop_back();
  }
}

}  // namespace detail

/// All partitions of ids into unordered pairs. The first id is paired with each
/// later id in turn, so {1,2,3,4} yields (1,2)(3,4), (1,3)(2,4), (1,4)(2,3).
template <typename Id>
std::vector<Pairing<Id>> enumerate_pairings(std::span<const Id> ids) {
  if (ids.size() % 2 != 0) throw Error(ErrorKind::OddInput, "pairing needs an even id count");
  if (ids.size() > kMaxEnumeratedIds) {
    throw Error(ErrorKind::TooLarge, "refusing to enumerate pairings of " +
                                         std::to_string(ids.size()) + " ids");
  }
  std::vector<Id> rest(ids.begin(), ids.end());
  Pairing<Id> current;
  std::vector<Pairing<Id>> out;
  detail::enumerate_pairings_into(rest, current, out);
  return out;
}

struct LeafModel {
  std::string id;
  ArimaModel model;
};

enum class Strategy { adjacent, similarity };
enum class MergeRule { average, weighted };

Strategy parse_strategy(const std::string& name);
std::string to_string(Strategy strategy);

struct MergeNode {
  ArimaModel model;
  /// Empty for leaves.
  std::optional<std::array<std::size_t, 2>> children;
  std::array<DeviationRecord, 2> deviations{};
  std::vector<std::string> leaf_ids;

  [[nodiscard]] bool is_leaf() const { return !children.has_value(); }
  /// Leaf ids joined with ';'.
  [[nodiscard]] std::string id() const;
};

/// Binary merge tree stored as a node arena. levels[0] are the leaves; levels[k]
/// lists every node alive at depth k, including ones promoted unpaired from below.
struct MergeTree {
  std::vector<MergeNode> nodes;
  std::vector<std::vector<std::size_t>> levels;

  [[nodiscard]] std::size_t root() const { return levels.back().front(); }
  [[nodiscard]] const MergeNode& root_node() const { return nodes[root()]; }
  [[nodiscard]] std::size_t leaf_count() const { return levels.front().size(); }
  /// Index of the leaf node with this id.
  [[nodiscard]] std::size_t leaf_index(const std::string& id) const;
  /// Whether `node` at this level was carried up unchanged from the level below.
  [[nodiscard]] bool promoted(std::size_t level, std::size_t node) const;
};

MergeTree build_merge_tree(std::span<const LeafModel> leaves, Strategy strategy,
                           MergeRule rule = MergeRule::average);

}  // namespace arimerge

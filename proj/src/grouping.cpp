#include "arimerge/grouping.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace arimerge {

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw Error(ErrorKind::Overflow, "count exceeds 64-bit range");
  }
  return out;
}

void require_even(long n) {
  if (n < 2 || n % 2 != 0) {
    throw Error(ErrorKind::OddInput, "expected an even count >= 2, got " + std::to_string(n));
  }
}

std::string join_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) {
    if (!out.empty()) out += ';';
    out += id;
  }
  return out;
}

}  // namespace

PairingCount count_pairings(long two_n) {
  require_even(two_n);
  std::uint64_t t = 1;
  for (long k = 4; k <= two_n; k += 2) t = checked_mul(t, static_cast<std::uint64_t>(k - 1));
  return {t};
}

PairingCount count_trees(long n) {
  require_even(n);
  std::uint64_t g = 1;
  for (long m = n; m > 2;) {
    g = checked_mul(g, count_pairings(m).value);
    m /= 2;
    if (m % 2 != 0) ++m;
  }
  return {g};
}

Strategy parse_strategy(const std::string& name) {
  if (name == "adjacent") return Strategy::adjacent;
  if (name == "similarity") return Strategy::similarity;
  throw Error(ErrorKind::InvalidInput, "unknown strategy '" + name + "'");
}

std::string to_string(Strategy strategy) {
  return strategy == Strategy::adjacent ? "adjacent" : "similarity";
}

std::string MergeNode::id() const { return join_ids(leaf_ids); }

std::size_t MergeTree::leaf_index(const std::string& id) const {
  for (std::size_t idx : levels.front()) {
    if (nodes[idx].leaf_ids.front() == id) return idx;
  }
  throw Error(ErrorKind::InvalidInput, "no leaf '" + id + "'");
}

bool MergeTree::promoted(std::size_t level, std::size_t node) const {
  if (level == 0) return false;
  const auto& below = levels[level - 1];
  return std::find(below.begin(), below.end(), node) != below.end();
}

MergeTree build_merge_tree(std::span<const LeafModel> leaves, Strategy strategy, MergeRule rule) {
  if (leaves.empty()) throw Error(ErrorKind::EmptyInput, "no models to merge");

  MergeTree tree;
  std::set<std::string> seen;
  std::vector<std::size_t> current;
  for (const auto& leaf : leaves) {
    if (!seen.insert(leaf.id).second) {
      throw Error(ErrorKind::InvalidInput, "duplicate node id '" + leaf.id + "'");
    }
    leaf.model.validate();
    if (!(leaf.model.spec == leaves.front().model.spec)) {
      throw Error(ErrorKind::SpecMismatch, "leaf '" + leaf.id + "' has spec " +
                                               leaf.model.spec.to_string());
    }
    current.push_back(tree.nodes.size());
    tree.nodes.push_back({leaf.model, std::nullopt, {}, {leaf.id}});
  }
  tree.levels.push_back(current);

  while (current.size() > 1) {
    std::vector<std::size_t> order = current;
    if (strategy == Strategy::similarity) {
      std::stable_sort(order.begin(), order.end(), [&tree](std::size_t a, std::size_t b) {
        return tree.nodes[a].model.constant < tree.nodes[b].model.constant;
      });
    }
    std::vector<std::size_t> next;
    for (std::size_t k = 0; k + 1 < order.size(); k += 2) {
      const MergeNode& a = tree.nodes[order[k]];
      const MergeNode& b = tree.nodes[order[k + 1]];
      MergedModel merged = rule == MergeRule::weighted
                               ? weighted_merge(a.model, b.model, a.id(), b.id())
                               : average_merge(a.model, b.model, a.id(), b.id());
      std::vector<std::string> ids = a.leaf_ids;
      ids.insert(ids.end(), b.leaf_ids.begin(), b.leaf_ids.end());
      MergeNode node{std::move(merged.model), std::array{order[k], order[k + 1]},
                     std::move(merged.deviations), std::move(ids)};
      next.push_back(tree.nodes.size());
      tree.nodes.push_back(std::move(node));
    }
    if (order.size() % 2 != 0) next.push_back(order.back());
    tree.levels.push_back(next);
    current = std::move(next);
  }
  return tree;
}

}  // namespace arimerge

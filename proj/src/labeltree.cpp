#include "mlcp/labeltree.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <sstream>

namespace mlcp {

int hamming(const LabelVector& a, const LabelVector& b) {
  if (a.size() != b.size())
    throw contract_error("hamming: vectors differ in length");
  int mismatches = 0;
  for (std::size_t i = 0; i < a.size(); ++i) mismatches += a[i] != b[i];
  return mismatches;
}

int hamming(LabelsetCode a, LabelsetCode b) { return std::popcount(a ^ b); }

int complete_linkage(std::span<const LabelsetCode> a, std::span<const LabelsetCode> b) {
  if (a.empty() || b.empty())
    throw contract_error("complete_linkage: clusters must be non-empty");
  int best = 0;
  for (LabelsetCode s : a)
    for (LabelsetCode t : b) best = std::max(best, hamming(s, t));
  return best;
}

namespace {

struct Candidate {
  int dist = std::numeric_limits<int>::max();
  LabelsetCode lo = 0;   // smaller of the two cluster minima
  LabelsetCode hi = 0;   // larger of the two cluster minima
  int partner = -1;      // active slot of the partner cluster

  bool better_than(const Candidate& o) const {
    if (dist != o.dist) return dist < o.dist;
    if (lo != o.lo) return lo < o.lo;
    return hi < o.hi;
  }
};

// Condensed lower triangle over initial slots.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(std::size_t m) : m_(m), d_(m * (m - 1) / 2) {}
  std::uint8_t& at(std::size_t i, std::size_t j) {
    if (i > j) std::swap(i, j);
    return d_[j * (j - 1) / 2 + i];
  }
  std::uint8_t at(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    return d_[j * (j - 1) / 2 + i];
  }

 private:
  std::size_t m_;
  std::vector<std::uint8_t> d_;
};

}  // namespace

LabelTree build_tree(std::vector<LabelsetCode> labelsets, int label_count) {
  std::sort(labelsets.begin(), labelsets.end());
  labelsets.erase(std::unique(labelsets.begin(), labelsets.end()), labelsets.end());
  const std::size_t m = labelsets.size();
  if (m < 2) throw data_error("build_tree: need at least 2 distinct labelsets");
  if (label_count < 1 || label_count > 20)
    throw contract_error("build_tree: label count must be in [1, 20]");
  for (LabelsetCode code : labelsets)
    if (code >= (LabelsetCode{1} << label_count))
      throw data_error("build_tree: labelset code out of range");

  LabelTree tree;
  tree.label_count = label_count;
  tree.labelsets = labelsets;
  tree.nodes.reserve(2 * m - 1);
  for (std::size_t i = 0; i < m; ++i) {
    TreeNode leaf;
    leaf.id = static_cast<int>(i);
    leaf.members = {labelsets[i]};
    tree.nodes.push_back(std::move(leaf));
  }

  // Active slots: slot s currently hosts cluster with node id node_of_slot[s]
  // and minimum member code min_code[s]; dead slots are skipped.
  std::vector<int> node_of_slot(m);
  std::vector<LabelsetCode> min_code(m);
  std::vector<bool> alive(m, true);
  for (std::size_t s = 0; s < m; ++s) {
    node_of_slot[s] = static_cast<int>(s);
    min_code[s] = labelsets[s];
  }

  DistanceMatrix dist(m);
  for (std::size_t j = 1; j < m; ++j)
    for (std::size_t i = 0; i < j; ++i)
      dist.at(i, j) = static_cast<std::uint8_t>(hamming(labelsets[i], labelsets[j]));

  auto candidate = [&](std::size_t s, std::size_t t) {
    Candidate c;
    c.dist = dist.at(s, t);
    c.lo = std::min(min_code[s], min_code[t]);
    c.hi = std::max(min_code[s], min_code[t]);
    c.partner = static_cast<int>(t);
    return c;
  };

  // Per-slot cache of the best merge partner.
  std::vector<Candidate> best(m);
  auto rescan = [&](std::size_t s) {
    Candidate b;
    for (std::size_t t = 0; t < m; ++t) {
      if (t == s || !alive[t]) continue;
      const Candidate c = candidate(s, t);
      if (c.better_than(b)) b = c;
    }
    best[s] = b;
  };
  for (std::size_t s = 0; s < m; ++s) rescan(s);

  std::size_t active = m;
  while (active > 1) {
    std::size_t si = m;
    Candidate top;
    for (std::size_t s = 0; s < m; ++s) {
      if (!alive[s]) continue;
      if (best[s].better_than(top)) {
        top = best[s];
        si = s;
      }
    }
    const std::size_t sj = static_cast<std::size_t>(top.partner);

    TreeNode parent;
    parent.id = static_cast<int>(tree.nodes.size());
    const int a = node_of_slot[si];
    const int b = node_of_slot[sj];
    parent.children = {a, b};
    std::merge(tree.nodes[a].members.begin(), tree.nodes[a].members.end(),
               tree.nodes[b].members.begin(), tree.nodes[b].members.end(),
               std::back_inserter(parent.members));
    tree.nodes[a].parent = parent.id;
    tree.nodes[b].parent = parent.id;
    tree.nodes.push_back(std::move(parent));

    // Merged cluster takes slot si; complete linkage keeps the max distance.
    node_of_slot[si] = static_cast<int>(tree.nodes.size()) - 1;
    min_code[si] = std::min(min_code[si], min_code[sj]);
    alive[sj] = false;
    --active;
    for (std::size_t t = 0; t < m; ++t) {
      if (!alive[t] || t == si) continue;
      dist.at(si, t) = std::max(dist.at(si, t), dist.at(sj, t));
    }

    if (active == 1) break;
    rescan(si);
    for (std::size_t t = 0; t < m; ++t) {
      if (!alive[t] || t == si) continue;
      if (best[t].partner == static_cast<int>(si) ||
          best[t].partner == static_cast<int>(sj)) {
        rescan(t);
      } else {
        const Candidate c = candidate(t, si);
        if (c.better_than(best[t])) best[t] = c;
      }
    }
  }

  tree.root = static_cast<int>(tree.nodes.size()) - 1;
  layered_view(tree);
  return tree;
}

void layered_view(LabelTree& tree) {
  tree.nodes[static_cast<std::size_t>(tree.root)].depth = 0;
  // Node ids are topological (children precede parents for built trees), so
  // walk ids downward; for hand-built trees fall back to repeated sweeps.
  bool settled = false;
  while (!settled) {
    settled = true;
    for (auto it = tree.nodes.rbegin(); it != tree.nodes.rend(); ++it) {
      if (it->id == tree.root) continue;
      const int pd = tree.node(it->parent).depth;
      if (pd >= 0 && it->depth != pd + 1) {
        it->depth = pd + 1;
        settled = false;
      }
    }
  }

  int max_leaf_depth = 0;
  for (const TreeNode& n : tree.nodes)
    if (n.leaf()) max_leaf_depth = std::max(max_leaf_depth, n.depth);
  tree.layer_count = max_leaf_depth;

  tree.layers.assign(static_cast<std::size_t>(tree.layer_count), {});
  tree.layer_index_.assign(static_cast<std::size_t>(tree.layer_count), {});
  for (int i = 1; i <= tree.layer_count; ++i) {
    auto& layer = tree.layers[static_cast<std::size_t>(i - 1)];
    for (const TreeNode& n : tree.nodes)
      if (n.depth == i || (n.leaf() && n.depth < i)) layer.push_back(n.id);
    // Layer order: ascending smallest member code, for reproducible class ids.
    std::sort(layer.begin(), layer.end(), [&](int x, int y) {
      return tree.node(x).members.front() < tree.node(y).members.front();
    });
    auto& index = tree.layer_index_[static_cast<std::size_t>(i - 1)];
    for (std::size_t k = 0; k < layer.size(); ++k)
      for (LabelsetCode code : tree.node(layer[k]).members)
        index.emplace(code, static_cast<int>(k));
  }
}

int LabelTree::node_of(int layer, LabelsetCode code) const {
  if (layer < 1 || layer > layer_count)
    throw contract_error("node_of: layer out of range");
  const auto& index = layer_index_[static_cast<std::size_t>(layer - 1)];
  const auto it = index.find(code);
  if (it == index.end())
    throw data_error("node_of: labelset " + std::to_string(code) +
                     " is not in the tree");
  return it->second;
}

std::vector<int> transform_layer(const MultiLabelDataset& ds, const LabelTree& tree,
                                 int layer) {
  std::vector<std::size_t> all(ds.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return transform_layer(ds, all, tree, layer);
}

std::vector<int> transform_layer(const MultiLabelDataset& ds,
                                 std::span<const std::size_t> rows,
                                 const LabelTree& tree, int layer) {
  std::vector<int> classes;
  classes.reserve(rows.size());
  for (std::size_t i : rows) classes.push_back(tree.node_of(layer, ds.code(i)));
  return classes;
}

namespace {

void outline_rec(const LabelTree& tree, int id, int indent, std::ostringstream& out) {
  const TreeNode& n = tree.node(id);
  for (int i = 0; i < indent; ++i) out << "  ";
  out << (n.leaf() ? "leaf" : "node") << " " << n.id << " depth " << n.depth << " {";
  for (std::size_t i = 0; i < n.members.size(); ++i)
    out << (i ? "," : "") << n.members[i];
  out << "}\n";
  for (int child : n.children) outline_rec(tree, child, indent + 1, out);
}

}  // namespace

std::string tree_outline(const LabelTree& tree) {
  std::ostringstream out;
  outline_rec(tree, tree.root, 0, out);
  return out.str();
}

std::string tree_adjacency(const LabelTree& tree) {
  std::ostringstream out;
  for (const TreeNode& n : tree.nodes) {
    out << n.id << " " << n.depth << " " << n.parent;
    for (LabelsetCode code : n.members) out << " " << code;
    out << "\n";
  }
  return out.str();
}

}  // namespace mlcp

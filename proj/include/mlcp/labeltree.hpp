#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mlcp/dataset.hpp"

namespace mlcp {

// Count of positions where two equal-length binary vectors differ.
int hamming(const LabelVector& a, const LabelVector& b);

// Same metric on labelset codes (popcount of xor).
int hamming(LabelsetCode a, LabelsetCode b);

// Maximum pairwise Hamming distance across two disjoint labelset clusters.
int complete_linkage(std::span<const LabelsetCode> a, std::span<const LabelsetCode> b);

struct TreeNode {
  int id = -1;
  int depth = -1;
  int parent = -1;                      // -1 for the root
  std::vector<int> children;            // empty for leaves
  std::vector<LabelsetCode> members;    // sorted, non-empty
  bool leaf() const { return children.empty(); }
};

// Dendrogram over labelsets with layered views. Layer i (1-based) holds the
// nodes at depth i plus pass-through copies of leaves that ended shallower;
// every layer partitions the full labelset collection, and the final layer
// consists of singletons only.
struct LabelTree {
  int label_count = 0;                          // c
  int layer_count = 0;                          // L = max leaf depth
  int root = -1;
  std::vector<TreeNode> nodes;                  // indexed by node id
  std::vector<std::vector<int>> layers;         // layers[i-1] = node ids of layer i
  std::vector<LabelsetCode> labelsets;          // input collection, sorted

  const TreeNode& node(int id) const { return nodes[static_cast<std::size_t>(id)]; }
  std::size_t layer_width(int layer) const {
    return layers[static_cast<std::size_t>(layer - 1)].size();
  }

  // Position k of the node claiming `code` within layer i; throws if the
  // code is not part of the collection.
  int node_of(int layer, LabelsetCode code) const;

  // Node id behind position k of layer i.
  int layer_node_id(int layer, int k) const {
    return layers[static_cast<std::size_t>(layer - 1)][static_cast<std::size_t>(k)];
  }

 private:
  friend LabelTree build_tree(std::vector<LabelsetCode>, int);
  friend void layered_view(LabelTree&);
  std::vector<std::unordered_map<LabelsetCode, int>> layer_index_;
};

// Agglomerative clustering with complete linkage over Hamming distances.
// Deterministic: ties between candidate merges are broken by the pair of
// cluster minima (ascending), which totally orders all candidate pairs.
LabelTree build_tree(std::vector<LabelsetCode> labelsets, int label_count);

// Recompute depths, layers and per-layer membership maps from the node
// parent/child structure. build_tree calls this; exposed for hand-built
// trees in tests.
void layered_view(LabelTree& tree);

// Multiclass transformation of layer i: class of row j is the layer
// position of the node containing the row's labelset.
std::vector<int> transform_layer(const MultiLabelDataset& ds, const LabelTree& tree,
                                 int layer);
std::vector<int> transform_layer(const MultiLabelDataset& ds,
                                 std::span<const std::size_t> rows,
                                 const LabelTree& tree, int layer);

// Human-readable indented outline of the tree.
std::string tree_outline(const LabelTree& tree);

// Machine-readable adjacency listing: "id depth parent codes..." per line.
std::string tree_adjacency(const LabelTree& tree);

}  // namespace mlcp

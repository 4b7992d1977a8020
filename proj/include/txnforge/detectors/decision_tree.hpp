#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "txnforge/matrix.hpp"

namespace txnforge::detectors {

struct TreeNode {
    bool is_leaf = true;
    int feature = -1;      // internal nodes only
    double threshold = 0.0;
    int left = -1;         // child indices into DecisionTree::nodes
    int right = -1;
    int label = 0;         // leaf majority class
};

/// CART with Gini impurity. Candidate thresholds are midpoints between
/// adjacent sorted distinct values of each feature; rows with value <=
/// threshold go left. The best split is chosen by lowest weighted child
/// impurity, ties broken by lowest feature index then lowest threshold.
/// A pure node, an exhausted depth budget, or the absence of any
/// candidate split produces a leaf; leaf labels are the majority class
/// with ties resolved to 0.
class DecisionTree {
public:
    int predict_row(std::span<const double> row) const;
    std::vector<int> predict(const Matrix& x) const;

    /// Thresholds of internal nodes in node-creation (pre-)order.
    std::vector<double> internal_thresholds() const;
    const std::vector<TreeNode>& nodes() const { return nodes_; }
    int max_depth() const { return max_depth_; }
    int leaf_count() const;

private:
    friend DecisionTree dtree_fit(const Matrix&, const std::vector<int>&, int, std::uint64_t);
    std::vector<TreeNode> nodes_;
    int max_depth_ = 0;
};

/// Grows the tree greedily to at most max_depth levels of splits. The
/// seed is accepted for interface uniformity with the other detectors;
/// fitting is fully deterministic and never consumes it. Throws
/// ParamError on empty data, size mismatch, or max_depth < 1.
DecisionTree dtree_fit(const Matrix& x, const std::vector<int>& y, int max_depth,
                       std::uint64_t seed = 0);

} // namespace txnforge::detectors

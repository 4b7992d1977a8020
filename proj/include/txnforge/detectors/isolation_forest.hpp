#pragma once

#include <cstdint>
#include <vector>

#include "txnforge/matrix.hpp"
#include "txnforge/rng.hpp"

namespace txnforge::detectors {

struct IsoNode {
    bool is_leaf = true;
    int feature = -1;
    double split = 0.0;
    int left = -1;   // child indices into IsolationTree::nodes
    int right = -1;
    int size = 0;    // leaf population
};

struct IsolationTree {
    std::vector<IsoNode> nodes;  // pre-order: each left subtree precedes its right sibling
    int depth_limit = 0;
};

/// Average unsuccessful-search path length c(n) in a BST of n points:
/// 0 for n <= 1, 1 for n == 2, else 2(ln(n-1) + gamma) - 2(n-1)/n.
double average_path_c(std::int64_t n);

/// Builds one isolation tree over x restricted to `rows`.
///
/// Draw protocol at each internal node, pinned for determinism: collect
/// eligible features (node min < node max) in ascending index order;
/// pick eligible[uniform_below(count)]; split = min + uniform() * (max -
/// min), nudged to nextafter(min, +inf) if it lands on min. Rows with
/// value < split go left; the left subtree is built fully before the
/// right. Recursion stops at depth_limit, at single-row nodes, and at
/// nodes with no eligible feature.
IsolationTree build_isolation_tree(const Matrix& x, const std::vector<std::size_t>& rows,
                                   Rng64& rng, int depth_limit);

/// Path length of x's row through the tree: edges walked plus
/// average_path_c(leaf size) for unresolved leaves.
double iso_path_length(const IsolationTree& tree, const Matrix& x, std::size_t row);

struct IForestParams {
    int n_trees = 100;
    int subsample_size = 256;  // capped at N
    double contamination = 0.1;
    std::uint64_t seed = 42;
};

struct IForestModel {
    std::vector<IsolationTree> trees;
    int effective_subsample = 0;
    int depth_limit = 0;
};

struct IForestResult {
    std::vector<double> scores;  // 2^(-E[h]/c(m)), one per row
    std::vector<int> flags;      // 1 for the top ceil(contamination*N) scores
    int n_flagged = 0;
    int effective_subsample = 0;
    int depth_limit = 0;
};

/// Fits n_trees isolation trees on x.
///
/// Tree t uses its own stream seeded from mix_seed(seed, t). When N
/// exceeds the subsample size the tree's rows come from a partial
/// Fisher-Yates shuffle on that stream; otherwise all rows are used in
/// order and no shuffle draws are consumed.
///
/// Throws ParamError when N < 2 or n_trees/subsample_size < 1.
IForestModel iforest_fit(const Matrix& x, const IForestParams& params);

/// Scores every row of x against a fitted model. Flags are the top
/// ceil(contamination * N) rows by (score desc, row index asc). Throws
/// ParamError when contamination is outside (0, 0.5] or x is empty.
IForestResult iforest_score(const IForestModel& model, const Matrix& x, double contamination);

/// iforest_fit followed by iforest_score on the same matrix.
IForestResult iforest_fit_score(const Matrix& x, const IForestParams& params);

} // namespace txnforge::detectors

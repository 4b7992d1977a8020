#include "txnforge/detectors/decision_tree.hpp"

#include <algorithm>
#include <numeric>

#include "txnforge/errors.hpp"

namespace txnforge::detectors {

namespace {

double gini(std::int64_t pos, std::int64_t total) {
    if (total == 0) return 0.0;
    const double p = static_cast<double>(pos) / static_cast<double>(total);
    return 2.0 * p * (1.0 - p);
}

int majority_label(const std::vector<int>& y, const std::vector<std::size_t>& rows) {
    std::int64_t pos = 0;
    for (auto r : rows) pos += y[r] != 0 ? 1 : 0;
    const std::int64_t neg = static_cast<std::int64_t>(rows.size()) - pos;
    return pos > neg ? 1 : 0;
}

struct Split {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double impurity = 0.0;
};

Split best_split(const Matrix& x, const std::vector<int>& y,
                 const std::vector<std::size_t>& rows) {
    Split best;
    const auto n = static_cast<std::int64_t>(rows.size());
    std::vector<std::pair<double, int>> col(rows.size());

    for (std::size_t f = 0; f < x.cols; ++f) {
        for (std::size_t i = 0; i < rows.size(); ++i)
            col[i] = {x.at(rows[i], f), y[rows[i]] != 0 ? 1 : 0};
        std::sort(col.begin(), col.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });

        std::int64_t total_pos = 0;
        for (const auto& [v, lab] : col) total_pos += lab;

        std::int64_t left_n = 0;
        std::int64_t left_pos = 0;
        for (std::size_t i = 0; i + 1 < col.size(); ++i) {
            ++left_n;
            left_pos += col[i].second;
            if (col[i].first == col[i + 1].first) continue;
            const double threshold = col[i].first + (col[i + 1].first - col[i].first) / 2.0;
            const std::int64_t right_n = n - left_n;
            const double impurity =
                (static_cast<double>(left_n) * gini(left_pos, left_n) +
                 static_cast<double>(right_n) * gini(total_pos - left_pos, right_n)) /
                static_cast<double>(n);
            // Strict < plus ascending (feature, threshold) iteration keeps
            // the documented tie-break.
            if (!best.found || impurity < best.impurity) {
                best.found = true;
                best.feature = f;
                best.threshold = threshold;
                best.impurity = impurity;
            }
        }
    }
    return best;
}

int grow(const Matrix& x, const std::vector<int>& y, std::vector<TreeNode>& nodes,
         std::vector<std::size_t>&& rows, int depth, int max_depth) {
    const int idx = static_cast<int>(nodes.size());
    nodes.emplace_back();
    nodes[idx].label = majority_label(y, rows);

    std::int64_t pos = 0;
    for (auto r : rows) pos += y[r] != 0 ? 1 : 0;
    const bool pure = pos == 0 || pos == static_cast<std::int64_t>(rows.size());
    if (pure || depth >= max_depth) return idx;

    const Split split = best_split(x, y, rows);
    if (!split.found) return idx;

    std::vector<std::size_t> left_rows;
    std::vector<std::size_t> right_rows;
    for (auto r : rows) {
        if (x.at(r, split.feature) <= split.threshold) left_rows.push_back(r);
        else right_rows.push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    nodes[idx].is_leaf = false;
    nodes[idx].feature = static_cast<int>(split.feature);
    nodes[idx].threshold = split.threshold;
    const int left = grow(x, y, nodes, std::move(left_rows), depth + 1, max_depth);
    nodes[idx].left = left;
    const int right = grow(x, y, nodes, std::move(right_rows), depth + 1, max_depth);
    nodes[idx].right = right;
    return idx;
}

} // namespace

DecisionTree dtree_fit(const Matrix& x, const std::vector<int>& y, int max_depth,
                       std::uint64_t /*seed*/) {
    if (x.rows == 0 || x.cols == 0) throw ParamError("dtree_fit: empty matrix");
    if (x.rows != y.size()) throw ParamError("dtree_fit: label count does not match rows");
    if (max_depth < 1) throw ParamError("dtree_fit: max_depth must be >= 1");

    DecisionTree tree;
    tree.max_depth_ = max_depth;
    std::vector<std::size_t> rows(x.rows);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    grow(x, y, tree.nodes_, std::move(rows), 0, max_depth);
    return tree;
}

int DecisionTree::predict_row(std::span<const double> row) const {
    int idx = 0;
    while (!nodes_[idx].is_leaf) {
        const auto& node = nodes_[idx];
        idx = row[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left
                                                                            : node.right;
    }
    return nodes_[idx].label;
}

std::vector<int> DecisionTree::predict(const Matrix& x) const {
    if (nodes_.empty()) throw ParamError("predict on unfitted tree");
    std::vector<int> out(x.rows);
    for (std::size_t r = 0; r < x.rows; ++r) out[r] = predict_row(x.row(r));
    return out;
}

std::vector<double> DecisionTree::internal_thresholds() const {
    std::vector<double> out;
    for (const auto& node : nodes_)
        if (!node.is_leaf) out.push_back(node.threshold);
    return out;
}

int DecisionTree::leaf_count() const {
    int count = 0;
    for (const auto& node : nodes_) count += node.is_leaf ? 1 : 0;
    return count;
}

} // namespace txnforge::detectors

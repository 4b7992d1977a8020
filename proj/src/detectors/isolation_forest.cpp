#include "txnforge/detectors/isolation_forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "txnforge/errors.hpp"

namespace txnforge::detectors {

double average_path_c(std::int64_t n) {
    if (n <= 1) return 0.0;
    if (n == 2) return 1.0;
    constexpr double kEulerGamma = 0.5772156649015329;
    const auto nd = static_cast<double>(n);
    return 2.0 * (std::log(nd - 1.0) + kEulerGamma) - 2.0 * (nd - 1.0) / nd;
}

namespace {

int grow(const Matrix& x, std::vector<IsoNode>& nodes, std::vector<std::size_t>&& rows,
         Rng64& rng, int depth, int depth_limit) {
    const int idx = static_cast<int>(nodes.size());
    nodes.emplace_back();
    nodes[idx].size = static_cast<int>(rows.size());
    if (depth >= depth_limit || rows.size() <= 1) return idx;

    std::vector<std::size_t> eligible;
    std::vector<std::pair<double, double>> ranges(x.cols);
    for (std::size_t f = 0; f < x.cols; ++f) {
        double lo = x.at(rows[0], f);
        double hi = lo;
        for (auto r : rows) {
            lo = std::min(lo, x.at(r, f));
            hi = std::max(hi, x.at(r, f));
        }
        ranges[f] = {lo, hi};
        if (lo < hi) eligible.push_back(f);
    }
    if (eligible.empty()) return idx;

    const std::size_t feature = eligible[rng.uniform_below(eligible.size())];
    const auto [lo, hi] = ranges[feature];
    double split = lo + rng.uniform() * (hi - lo);
    if (split <= lo) split = std::nextafter(lo, std::numeric_limits<double>::infinity());

    std::vector<std::size_t> left_rows;
    std::vector<std::size_t> right_rows;
    for (auto r : rows) {
        if (x.at(r, feature) < split) left_rows.push_back(r);
        else right_rows.push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    nodes[idx].is_leaf = false;
    nodes[idx].feature = static_cast<int>(feature);
    nodes[idx].split = split;
    const int left = grow(x, nodes, std::move(left_rows), rng, depth + 1, depth_limit);
    nodes[idx].left = left;
    const int right = grow(x, nodes, std::move(right_rows), rng, depth + 1, depth_limit);
    nodes[idx].right = right;
    return idx;
}

} // namespace

IsolationTree build_isolation_tree(const Matrix& x, const std::vector<std::size_t>& rows,
                                   Rng64& rng, int depth_limit) {
    if (rows.empty()) throw ParamError("build_isolation_tree: no rows");
    if (depth_limit < 0) throw ParamError("build_isolation_tree: negative depth limit");
    IsolationTree tree;
    tree.depth_limit = depth_limit;
    std::vector<std::size_t> work = rows;
    grow(x, tree.nodes, std::move(work), rng, 0, depth_limit);
    return tree;
}

double iso_path_length(const IsolationTree& tree, const Matrix& x, std::size_t row) {
    int idx = 0;
    int edges = 0;
    while (!tree.nodes[idx].is_leaf) {
        const auto& node = tree.nodes[idx];
        idx = x.at(row, static_cast<std::size_t>(node.feature)) < node.split ? node.left
                                                                             : node.right;
        ++edges;
    }
    return static_cast<double>(edges) + average_path_c(tree.nodes[idx].size);
}

IForestModel iforest_fit(const Matrix& x, const IForestParams& params) {
    if (x.rows < 2 || x.cols == 0) throw ParamError("iforest_fit: need at least 2 rows");
    if (params.n_trees < 1) throw ParamError("iforest_fit: n_trees must be >= 1");
    if (params.subsample_size < 1) throw ParamError("iforest_fit: subsample_size must be >= 1");

    const std::size_t n = x.rows;
    const auto m = std::min<std::size_t>(static_cast<std::size_t>(params.subsample_size), n);
    const int depth_limit =
        m <= 1 ? 0 : static_cast<int>(std::ceil(std::log2(static_cast<double>(m))));

    IForestModel model;
    model.effective_subsample = static_cast<int>(m);
    model.depth_limit = depth_limit;
    model.trees.reserve(static_cast<std::size_t>(params.n_trees));

    std::vector<std::size_t> base(n);
    std::iota(base.begin(), base.end(), std::size_t{0});

    for (int t = 0; t < params.n_trees; ++t) {
        Rng64 rng(mix_seed(params.seed, static_cast<std::uint64_t>(t)));
        std::vector<std::size_t> rows;
        if (n > m) {
            // Partial Fisher-Yates: the first m entries after the swaps.
            std::vector<std::size_t> idx = base;
            for (std::size_t i = 0; i < m; ++i) {
                const std::size_t j = i + rng.uniform_below(n - i);
                std::swap(idx[i], idx[j]);
            }
            rows.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(m));
        } else {
            rows = base;
        }
        model.trees.push_back(build_isolation_tree(x, rows, rng, depth_limit));
    }
    return model;
}

IForestResult iforest_score(const IForestModel& model, const Matrix& x, double contamination) {
    if (x.rows == 0 || x.cols == 0) throw ParamError("iforest_score: empty matrix");
    if (!(contamination > 0.0) || contamination > 0.5)
        throw ParamError("iforest_score: contamination must be in (0, 0.5]");
    if (model.trees.empty()) throw ParamError("iforest_score: unfitted model");

    const std::size_t n = x.rows;
    IForestResult res;
    res.effective_subsample = model.effective_subsample;
    res.depth_limit = model.depth_limit;

    std::vector<double> path_sum(n, 0.0);
    for (const auto& tree : model.trees)
        for (std::size_t i = 0; i < n; ++i) path_sum[i] += iso_path_length(tree, x, i);

    const double norm = average_path_c(model.effective_subsample);
    res.scores.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double mean_path = path_sum[i] / static_cast<double>(model.trees.size());
        // m == 1 gives c(m) = 0; every point is then equally shallow.
        res.scores[i] = norm > 0.0 ? std::exp2(-mean_path / norm) : 1.0;
    }

    // ceil with a tiny slack so contamination * N that is an exact
    // integer in real arithmetic is not pushed up by float error
    // (0.1 * 1010 and 0.01 * 1000 both land barely above their true
    // integer values in doubles).
    const auto k = static_cast<std::size_t>(
        std::ceil(contamination * static_cast<double>(n) - 1e-9));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (res.scores[a] != res.scores[b]) return res.scores[a] > res.scores[b];
        return a < b;
    });
    res.flags.assign(n, 0);
    for (std::size_t i = 0; i < k && i < n; ++i) res.flags[order[i]] = 1;
    res.n_flagged = static_cast<int>(std::min(k, n));
    return res;
}

IForestResult iforest_fit_score(const Matrix& x, const IForestParams& params) {
    return iforest_score(iforest_fit(x, params), x, params.contamination);
}

} // namespace txnforge::detectors

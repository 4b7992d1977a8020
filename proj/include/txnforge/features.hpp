#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "txnforge/abm.hpp"
#include "txnforge/matrix.hpp"

namespace txnforge::features {

/// Per-agent feature vector for the detectors. txn_mean_time is the
/// arithmetic mean of the agent's event steps as sender (the wrapped step
/// indices are averaged as-is, so a 10 PM Gaussian whose tail wraps past
/// midnight pulls the mean left); empty when the agent sent nothing.
/// out_degree always equals num_txns; in_degree counts events received
/// and is zero on SimpleModel runs.
struct AgentFeatures {
    std::uint32_t agent_id = 0;
    abm::AgentLabel label = abm::AgentLabel::normal;
    std::optional<double> txn_mean_time;
    int num_txns = 0;
    int in_degree = 0;
    int out_degree = 0;

    bool operator==(const AgentFeatures&) const = default;
};

enum class FeatureSet { time_only, all, in_degree_only, out_degree_only };

/// CLI spellings: "time", "all", "in_degree", "out_degree".
std::string_view to_string(FeatureSet set);
FeatureSet feature_set_from_string(std::string_view text);

/// One row per agent, zero-event agents included. Order-free aggregates:
/// permuting the event list leaves the output unchanged. Set
/// `circular_mean` to average transaction steps as angles on the 96-step
/// circle instead of arithmetically.
///
/// Throws ParamError if the run has no agents.
std::vector<AgentFeatures> extract_features(const abm::SimRun& run, bool circular_mean = false);

/// Matrix view of selected feature columns, plus aligned labels (1 =
/// suspicious) and agent ids. Rows without txn_mean_time are dropped from
/// time-containing sets and reported in dropped_ids; degree-only sets
/// keep every agent.
struct SelectedColumns {
    Matrix x;
    std::vector<int> labels;
    std::vector<std::uint32_t> agent_ids;
    std::vector<std::uint32_t> dropped_ids;
    std::vector<std::string> column_names;
};

/// Column order is fixed: (txn_mean_time, num_txns, in_degree,
/// out_degree), filtered by the set. Throws DataError when no rows
/// remain after dropping.
SelectedColumns select_columns(const std::vector<AgentFeatures>& features, FeatureSet set);

} // namespace txnforge::features

#include "txnforge/features.hpp"

#include <cmath>
#include <numbers>

#include "txnforge/errors.hpp"
#include "txnforge/schedule.hpp"

namespace txnforge::features {

std::string_view to_string(FeatureSet set) {
    switch (set) {
    case FeatureSet::time_only: return "time";
    case FeatureSet::all: return "all";
    case FeatureSet::in_degree_only: return "in_degree";
    case FeatureSet::out_degree_only: return "out_degree";
    }
    throw ParamError("invalid FeatureSet value");
}

FeatureSet feature_set_from_string(std::string_view text) {
    if (text == "time") return FeatureSet::time_only;
    if (text == "all") return FeatureSet::all;
    if (text == "in_degree") return FeatureSet::in_degree_only;
    if (text == "out_degree") return FeatureSet::out_degree_only;
    throw DataError("unknown feature set: " + std::string(text));
}

namespace {

double mean_step_of(const std::vector<int>& steps, bool circular) {
    if (!circular) {
        double sum = 0.0;
        for (int s : steps) sum += static_cast<double>(s);
        return sum / static_cast<double>(steps.size());
    }
    // Average as angles on the 96-step circle, then map the resultant
    // direction back to [0, 96).
    const double scale = 2.0 * std::numbers::pi / static_cast<double>(schedule::kStepsPerDay);
    double sx = 0.0;
    double sy = 0.0;
    for (int s : steps) {
        sx += std::cos(scale * static_cast<double>(s));
        sy += std::sin(scale * static_cast<double>(s));
    }
    double step = std::atan2(sy, sx) / scale;
    if (step < 0.0) step += static_cast<double>(schedule::kStepsPerDay);
    if (step >= static_cast<double>(schedule::kStepsPerDay)) step = 0.0;
    return step;
}

} // namespace

std::vector<AgentFeatures> extract_features(const abm::SimRun& run, bool circular_mean) {
    if (run.agents.empty()) throw ParamError("run has no agents");

    std::vector<std::vector<int>> sent_steps(run.agents.size());
    std::vector<int> in_degree(run.agents.size(), 0);
    for (const auto& ev : run.events) {
        if (ev.sender_id >= run.agents.size())
            throw DataError("event references unknown sender id " + std::to_string(ev.sender_id));
        sent_steps[ev.sender_id].push_back(ev.step);
        if (ev.receiver_id) {
            if (*ev.receiver_id >= run.agents.size())
                throw DataError("event references unknown receiver id " +
                                std::to_string(*ev.receiver_id));
            ++in_degree[*ev.receiver_id];
        }
    }

    std::vector<AgentFeatures> out;
    out.reserve(run.agents.size());
    for (const auto& agent : run.agents) {
        AgentFeatures f;
        f.agent_id = agent.id;
        f.label = agent.label;
        const auto& steps = sent_steps[agent.id];
        f.num_txns = static_cast<int>(steps.size());
        f.out_degree = f.num_txns;
        f.in_degree = in_degree[agent.id];
        if (!steps.empty()) f.txn_mean_time = mean_step_of(steps, circular_mean);
        out.push_back(std::move(f));
    }
    return out;
}

SelectedColumns select_columns(const std::vector<AgentFeatures>& features, FeatureSet set) {
    const bool wants_time = set == FeatureSet::time_only || set == FeatureSet::all;

    std::vector<std::string> names;
    if (wants_time) names.emplace_back("txn_mean_time");
    if (set == FeatureSet::all) names.emplace_back("num_txns");
    if (set == FeatureSet::all || set == FeatureSet::in_degree_only)
        names.emplace_back("in_degree");
    if (set == FeatureSet::all || set == FeatureSet::out_degree_only)
        names.emplace_back("out_degree");

    SelectedColumns sel;
    sel.column_names = names;
    std::vector<double> data;
    for (const auto& f : features) {
        if (wants_time && !f.txn_mean_time) {
            sel.dropped_ids.push_back(f.agent_id);
            continue;
        }
        if (wants_time) data.push_back(*f.txn_mean_time);
        if (set == FeatureSet::all) data.push_back(static_cast<double>(f.num_txns));
        if (set == FeatureSet::all || set == FeatureSet::in_degree_only)
            data.push_back(static_cast<double>(f.in_degree));
        if (set == FeatureSet::all || set == FeatureSet::out_degree_only)
            data.push_back(static_cast<double>(f.out_degree));
        sel.labels.push_back(f.label == abm::AgentLabel::suspicious ? 1 : 0);
        sel.agent_ids.push_back(f.agent_id);
    }
    if (sel.labels.empty()) throw DataError("no rows left after dropping agents without events");

    sel.x.rows = sel.labels.size();
    sel.x.cols = names.size();
    sel.x.data = std::move(data);
    return sel;
}

} // namespace txnforge::features

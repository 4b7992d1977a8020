#include "txnforge/abm.hpp"

#include <array>
#include <cmath>
#include <string>

#include "txnforge/errors.hpp"
#include "txnforge/rng.hpp"

namespace txnforge::abm {

std::string_view to_string(AgentLabel label) {
    return label == AgentLabel::normal ? "normal" : "suspicious";
}

AgentLabel label_from_string(std::string_view text) {
    if (text == "normal") return AgentLabel::normal;
    if (text == "suspicious") return AgentLabel::suspicious;
    throw DataError("unknown agent label: '" + std::string(text) + "'");
}

std::string_view to_string(ModelKind kind) {
    return kind == ModelKind::simple ? "simple" : "graph";
}

ModelKind model_kind_from_string(std::string_view text) {
    if (text == "simple") return ModelKind::simple;
    if (text == "graph") return ModelKind::graph;
    throw DataError("unknown model kind: '" + std::string(text) + "'");
}

AgentTypeParams default_params(AgentLabel label) {
    AgentTypeParams params;
    params.label = label;
    if (label == AgentLabel::suspicious) {
        params.mean_hour = 22.0;
        params.mean_num_txns = 10.0;
        params.pair_prob_same_type = 0.7;
    }
    return params;
}

namespace {

void validate_type_params(const AgentTypeParams& params, std::string_view name) {
    const std::string prefix = std::string(name) + ".";
    if (!std::isfinite(params.mean_hour) || params.mean_hour < 0.0 || params.mean_hour >= 24.0) {
        throw ParamError(prefix + "mean_hour must lie in [0, 24), got " +
                         std::to_string(params.mean_hour));
    }
    if (!std::isfinite(params.mean_num_txns) || params.mean_num_txns < 0.0) {
        throw ParamError(prefix + "mean_num_txns must be finite and >= 0");
    }
    if (!std::isfinite(params.amount_mean)) {
        throw ParamError(prefix + "amount_mean must be finite");
    }
    if (!std::isfinite(params.amount_std) || params.amount_std < 0.0) {
        throw ParamError(prefix + "amount_std must be finite and >= 0");
    }
    if (!std::isfinite(params.pair_prob_same_type) || params.pair_prob_same_type < 0.0 ||
        params.pair_prob_same_type > 1.0) {
        throw ParamError(prefix + "pair_prob_same_type must lie in [0, 1]");
    }
}

} // namespace

void validate_config(const ModelConfig& config) {
    if (config.n_normal < 0 || config.n_suspicious < 0) {
        throw ParamError("agent counts must be non-negative");
    }
    if (config.n_normal + config.n_suspicious < 1) {
        throw ParamError("population is empty: n_normal + n_suspicious must be >= 1");
    }
    if (config.steps != schedule::kStepsPerDay) {
        throw ParamError("steps is fixed at 96, got " + std::to_string(config.steps));
    }
    if (config.minutes_per_step != schedule::kMinutesPerStep) {
        throw ParamError("minutes_per_step is fixed at 15, got " +
                         std::to_string(config.minutes_per_step));
    }
    validate_type_params(config.normal_params, "normal_params");
    validate_type_params(config.suspicious_params, "suspicious_params");

    if (config.model_kind == ModelKind::graph && !config.uniform_partner) {
        // A reachable cross-type route into an empty population can never
        // be satisfied at runtime; reject at load time.
        if (config.n_normal > 0 && config.normal_params.pair_prob_same_type < 1.0 &&
            config.n_suspicious == 0) {
            throw ConfigError("normal_params.pair_prob_same_type routes to suspicious agents, "
                              "but n_suspicious is 0");
        }
        if (config.n_suspicious > 0 && config.suspicious_params.pair_prob_same_type < 1.0 &&
            config.n_normal == 0) {
            throw ConfigError("suspicious_params.pair_prob_same_type routes to normal agents, "
                              "but n_normal is 0");
        }
    }
}

std::uint64_t derive_agent_seed(std::uint64_t master_seed, std::uint32_t agent_id) {
    return mix_seed(master_seed, agent_id);
}

namespace {

// One Gaussian amount, truncated below at 0.01 by resampling (100
// attempts, then clamp) and quantized to cents.
double sample_amount(Rng64& rng, double mean, double stddev) {
    double draw = mean;
    for (int attempt = 0; attempt < 100; ++attempt) {
        draw = mean + stddev * rng.gaussian();
        if (draw >= 0.01) break;
    }
    if (draw < 0.01) draw = 0.01;
    return std::round(draw * 100.0) / 100.0;
}

SimRun run_impl(const ModelConfig& input) {
    ModelConfig config = input;
    config.normal_params.label = AgentLabel::normal;
    config.suspicious_params.label = AgentLabel::suspicious;
    validate_config(config);

    const bool graph = config.model_kind == ModelKind::graph;
    const std::uint32_t n_normal = static_cast<std::uint32_t>(config.n_normal);
    const std::uint32_t n_total = n_normal + static_cast<std::uint32_t>(config.n_suspicious);

    SimRun run;
    run.config = config;
    run.agents.reserve(n_total);
    for (std::uint32_t id = 0; id < n_total; ++id) {
        run.agents.push_back(
            Agent{id, id < n_normal ? AgentLabel::normal : AgentLabel::suspicious});
    }

    const schedule::ProbTable normal_table = schedule::build_prob_table(
        config.normal_params.mean_hour, config.normal_params.mean_num_txns);
    const schedule::ProbTable suspicious_table = schedule::build_prob_table(
        config.suspicious_params.mean_hour, config.suspicious_params.mean_num_txns);

    std::vector<Rng64> streams;
    streams.reserve(n_total);
    std::vector<std::array<double, schedule::kStepsPerDay>> amount_tables;
    if (graph) amount_tables.resize(n_total);

    for (std::uint32_t id = 0; id < n_total; ++id) {
        streams.emplace_back(derive_agent_seed(config.seed, id));
        if (graph) {
            const AgentTypeParams& params =
                id < n_normal ? config.normal_params : config.suspicious_params;
            for (int t = 0; t < schedule::kStepsPerDay; ++t) {
                amount_tables[id][t] =
                    sample_amount(streams.back(), params.amount_mean, params.amount_std);
            }
        }
    }

    for (int t = 0; t < schedule::kStepsPerDay; ++t) {
        for (std::uint32_t id = 0; id < n_total; ++id) {
            const bool is_normal = id < n_normal;
            const double prob =
                is_normal ? normal_table.txn_prob[t] : suspicious_table.txn_prob[t];
            if (streams[id].uniform() >= prob) continue;

            TransactionEvent event;
            event.step = t;
            event.sender_id = id;
            event.sender_label = is_normal ? AgentLabel::normal : AgentLabel::suspicious;
            if (graph) {
                const AgentTypeParams& params =
                    is_normal ? config.normal_params : config.suspicious_params;
                std::uint32_t receiver;
                if (config.uniform_partner) {
                    receiver = static_cast<std::uint32_t>(streams[id].uniform_below(n_total));
                } else {
                    const bool same_type =
                        streams[id].uniform() < params.pair_prob_same_type;
                    const bool target_normal = same_type == is_normal;
                    const std::uint32_t base = target_normal ? 0 : n_normal;
                    const std::uint32_t count =
                        target_normal ? n_normal : n_total - n_normal;
                    receiver = base + static_cast<std::uint32_t>(
                                          streams[id].uniform_below(count));
                }
                event.receiver_id = receiver;
                event.amount = amount_tables[id][t];
            }
            run.events.push_back(event);
        }
    }
    return run;
}

} // namespace

SimRun run_simple(const ModelConfig& config) {
    if (config.model_kind != ModelKind::simple) {
        throw ParamError("run_simple requires model_kind == simple");
    }
    return run_impl(config);
}

SimRun run_graph(const ModelConfig& config) {
    if (config.model_kind != ModelKind::graph) {
        throw ParamError("run_graph requires model_kind == graph");
    }
    return run_impl(config);
}

SimRun run_model(const ModelConfig& config) {
    return config.model_kind == ModelKind::graph ? run_graph(config) : run_simple(config);
}

} // namespace txnforge::abm

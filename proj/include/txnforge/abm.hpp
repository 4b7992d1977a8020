#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "txnforge/schedule.hpp"

namespace txnforge::abm {

// Agent-based transaction models over one simulated day of 96 steps.
//
// SimpleModel emits one-sided cash events (no receiver, no amount);
// GraphModel emits sender->receiver transactions with Gaussian amounts.
//
// Determinism contract: a run is a pure function of its ModelConfig.
// Every agent owns an independent stream seeded by
// derive_agent_seed(config.seed, agent_id), and the draw order is pinned:
//
//   1. at instantiation (GraphModel only), agent streams generate their
//      96-entry amount lookup tables in ascending agent id, step order;
//   2. the simulation iterates steps outer, agents inner by ascending id;
//      each (step, agent) consumes one uniform for the Bernoulli
//      transact-or-not decision;
//   3. a transacting GraphModel agent then consumes one uniform for
//      receiver type (skipped when uniform_partner is set) and one
//      bounded draw for the receiver index within that type.
//
// Events therefore come out ordered by (step, sender_id) without sorting.

enum class AgentLabel { normal, suspicious };

std::string_view to_string(AgentLabel label);
AgentLabel label_from_string(std::string_view text);

enum class ModelKind { simple, graph };

std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view text);

/// Behavioral parameters of one agent class. Defaults follow the stock
/// GraphModel scenario (see default_params).
struct AgentTypeParams {
    AgentLabel label = AgentLabel::normal;
    double mean_hour = 12.0;       // 24h clock, [0, 24)
    double mean_num_txns = schedule::kDefaultMeanTxns;
    double amount_mean = 20.0;     // currency units
    double amount_std = 5.0;       // >= 0
    double pair_prob_same_type = 0.9;  // receiver routed to own type with this probability

    bool operator==(const AgentTypeParams&) const = default;
};

/// Stock parameters: normal agents transact around noon (4/day, 90% same
/// type), suspicious agents around 10 PM (10/day, 70% same type); both
/// draw amounts from Gaussian(20, 5).
AgentTypeParams default_params(AgentLabel label);

struct ModelConfig {
    ModelKind model_kind = ModelKind::simple;
    int n_normal = 0;
    int n_suspicious = 0;
    AgentTypeParams normal_params = default_params(AgentLabel::normal);
    AgentTypeParams suspicious_params = default_params(AgentLabel::suspicious);
    std::uint64_t seed = 42;
    int steps = schedule::kStepsPerDay;                 // fixed at 96
    int minutes_per_step = schedule::kMinutesPerStep;   // fixed at 15
    bool uniform_partner = false;  // receiver uniform over all agents, ignoring pair probabilities

    bool operator==(const ModelConfig&) const = default;
};

struct Agent {
    std::uint32_t id = 0;
    AgentLabel label = AgentLabel::normal;

    bool operator==(const Agent&) const = default;
};

/// One simulated transaction. receiver_id and amount are present exactly
/// when the run is a GraphModel run. Self-loops are permitted. Amounts
/// are quantized to cents so their two-decimal CSV rendering is lossless.
struct TransactionEvent {
    int step = 0;
    std::uint32_t sender_id = 0;
    std::optional<std::uint32_t> receiver_id;
    std::optional<double> amount;
    AgentLabel sender_label = AgentLabel::normal;

    bool operator==(const TransactionEvent&) const = default;
};

/// A completed run: config snapshot, agent roster (normal ids first,
/// then suspicious), and events ordered by (step, sender_id).
struct SimRun {
    ModelConfig config;
    std::vector<Agent> agents;
    std::vector<TransactionEvent> events;
};

/// Checks every ModelConfig invariant. Throws ParamError on bad field
/// values (counts, ranges, fixed step constants) and ConfigError when a
/// pair probability routes to an empty population.
void validate_config(const ModelConfig& config);

/// Stream seed for one agent: SplitMix64-style avalanche over the master
/// seed and the agent id. Distinct ids give distinct streams.
std::uint64_t derive_agent_seed(std::uint64_t master_seed, std::uint32_t agent_id);

/// Runs the one-sided cash model. Requires model_kind == simple.
SimRun run_simple(const ModelConfig& config);

/// Runs the sender->receiver transaction model. Requires model_kind == graph.
SimRun run_graph(const ModelConfig& config);

/// Dispatches on config.model_kind.
SimRun run_model(const ModelConfig& config);

} // namespace txnforge::abm

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "sicma/config.hpp"
#include "sicma/policy.hpp"

namespace sicma {

enum class Scheme { fixed, adaptive };

std::string_view to_string(Scheme s);
Scheme parse_scheme(std::string_view s);

enum class NodeMode { idle, backlogged };

struct NodeState {
    NodeMode mode = NodeMode::idle;
    double pending_gen_time = 0.0;   // valid while backlogged
    std::optional<double> last_delivered_gen_time;
    double next_arrival = 0.0;       // next Poisson arrival, absolute time
};

struct SimConfig {
    Scheme scheme = Scheme::fixed;
    double horizon_s = 0.0;
    double warmup_s = 0.0;
    std::uint64_t seed = 1;
    SystemConfig system;
    int batches = 20;                // batch means for in-run standard errors
    // Probability each node starts backlogged. Unset: the stationary backlog
    // probability of the fixed scheme at the configured rate.
    std::optional<double> initial_backlog_prob;
};

/// Longest slot either scheme can use; the fixed slot T* for the default constants.
double longest_slot(const SystemConfig& cfg, Scheme scheme);

/// Horizon giving at least `min_slots` slots after a warmup of `warmup_fraction` of it.
SimConfig make_sim_config(const SystemConfig& system, Scheme scheme, double min_slots, std::uint64_t seed,
                          double warmup_fraction = 0.1);

// Whole-run message bookkeeping; initial backlogged messages count as generated.
struct MessageLedger {
    long generated = 0;
    long delivered = 0;
    long decode_failures = 0;
    long dropped_engaged = 0;     // arrived while the node was contending or transmitting
    long overwritten = 0;         // superseded by a later arrival in the same idle slot
    long in_flight = 0;           // still held at the horizon

    bool balanced() const {
        return generated == delivered + decode_failures + dropped_engaged + overwritten + in_flight;
    }
};

struct SimMetrics {
    double pdr = 0.0, pdr_se = 0.0;                   // per transmission
    double delivery_ratio = 0.0, delivery_ratio_se = 0.0;  // per generated message
    double delay_s = 0.0, delay_se = 0.0;
    double throughput_bps = 0.0, throughput_se = 0.0;  // per node
    double norm_throughput = 0.0, norm_throughput_se = 0.0;
    double aoi_s = 0.0, aoi_se = 0.0;
    double cbr = 0.0, cbr_se = 0.0;
    bool aoi_censored = false;

    long slots = 0;            // post-warmup
    long transmissions = 0;
    long successes = 0;
    double window_s = 0.0;
    int max_backlog = 0;
    int replications = 1;
    MessageLedger ledger;
};

struct TransmissionEvent {
    std::size_t node = 0;
    double gen_time = 0.0;
    bool decoded = false;
};

// Per-slot trace handed to an observer; events are filled only when one is installed.
struct SlotRecord {
    double start = 0.0;
    double end = 0.0;
    int backlog = 0;
    SchemeParams params;
    int transmitters = 0;
    int decoded = 0;
    std::vector<TransmissionEvent> events;
};

using SlotObserver = std::function<void(const SlotRecord&)>;

/// One sequential run; deterministic given the config and seed.
SimMetrics run(const SimConfig& cfg, const SlotObserver& observer = {});

/// Independent runs with seeds seed, seed+1, ...; means and standard errors
/// across runs. One replication returns run() unchanged.
SimMetrics replicate(const SimConfig& cfg, int replications, int jobs = 1);

}  // namespace sicma

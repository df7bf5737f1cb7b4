#include "sicma/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "sicma/age.hpp"
#include "sicma/analytic_fixed.hpp"
#include "sicma/decoder.hpp"
#include "sicma/parallel.hpp"

namespace sicma {

std::string_view to_string(Scheme s) {
    return s == Scheme::fixed ? "fixed" : "adaptive";
}

Scheme parse_scheme(std::string_view s) {
    if (s == "fixed") return Scheme::fixed;
    if (s == "adaptive") return Scheme::adaptive;
    throw std::invalid_argument("unknown scheme '" + std::string(s) + "'");
}

double longest_slot(const SystemConfig& cfg, Scheme scheme) {
    const double t_fixed = fixed_params(cfg).slot_s;
    if (scheme == Scheme::fixed) return t_fixed;
    double longest = cfg.empty_slot_s();
    for (int k = 1; k <= cfg.n; ++k) longest = std::max(longest, adaptive_params(k, cfg).slot_s);
    return longest;
}

SimConfig make_sim_config(const SystemConfig& system, Scheme scheme, double min_slots, std::uint64_t seed,
                          double warmup_fraction) {
    if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0)) throw std::domain_error("warmup fraction must lie in [0,1)");
    SimConfig cfg;
    cfg.scheme = scheme;
    cfg.system = system.validated();
    cfg.seed = seed;
    cfg.horizon_s = min_slots * longest_slot(cfg.system, scheme) / (1.0 - warmup_fraction);
    cfg.warmup_s = warmup_fraction * cfg.horizon_s;
    return cfg;
}

namespace {

struct Batch {
    double time = 0.0;
    double busy_time = 0.0;
    double age_area = 0.0;
    double delay_sum = 0.0;
    long transmissions = 0;
    long successes = 0;
    long generated = 0;
};

struct Moments {
    double sum = 0.0, sum_sq = 0.0;
    int count = 0;
    void add(double x) {
        sum += x;
        sum_sq += x * x;
        ++count;
    }
    double std_error() const {
        if (count < 2) return 0.0;
        double mean = sum / count;
        double var = (sum_sq - count * mean * mean) / (count - 1);
        return var > 0.0 ? std::sqrt(var / count) : 0.0;
    }
};

class Simulation {
public:
    Simulation(const SimConfig& cfg, const SlotObserver& observer)
        : cfg_(cfg),
          sys_(cfg.system.validated()),
          observer_(observer),
          rng_(cfg.seed),
          unit_exp_(1.0),
          arrival_(sys_.lambda),
          batches_(static_cast<std::size_t>(cfg.batches)) {
        if (!(cfg.horizon_s > 0.0)) throw std::invalid_argument("simulation horizon must be positive");
        if (!(cfg.warmup_s >= 0.0 && cfg.warmup_s < cfg.horizon_s))
            throw std::invalid_argument("warmup must be shorter than the horizon");
        if (cfg.batches < 1) throw std::invalid_argument("at least one batch required");

        fixed_ = fixed_params(sys_);
        if (cfg.scheme == Scheme::adaptive) {
            adaptive_.resize(static_cast<std::size_t>(sys_.n) + 1);
            for (int k = 1; k <= sys_.n; ++k) {
                adaptive_[static_cast<std::size_t>(k)] = adaptive_params(k, sys_);
                receivers_.emplace_back(adaptive_[static_cast<std::size_t>(k)].gamma, sys_.epsilon);
            }
        } else {
            receivers_.emplace_back(fixed_.gamma, sys_.epsilon);
        }
        batch_width_ = (cfg.horizon_s - cfg.warmup_s) / cfg.batches;
    }

    SimMetrics execute();

private:
    const SchemeParams& params_for(int k) const;
    const SicReceiver& receiver_for(int k) const;
    void initialize();
    void enter_window(double t);
    void select_batch(double t);
    void handle_arrival(std::size_t i, double slot_end, bool engaged, bool counted);
    double truncated_exp(double rate, double limit);
    SimMetrics summarize();

    SimConfig cfg_;
    SystemConfig sys_;
    const SlotObserver& observer_;
    Rng rng_;
    std::exponential_distribution<double> unit_exp_;
    std::exponential_distribution<double> arrival_;
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};

    SchemeParams fixed_;
    std::vector<SchemeParams> adaptive_;
    std::vector<SicReceiver> receivers_;
    SchemeParams empty_;

    std::vector<NodeState> nodes_;
    std::vector<AgeTracker> ages_;
    std::vector<char> delivered_in_window_;
    int backlog_ = 0;

    bool in_window_ = false;
    double batch_width_ = 0.0;
    std::vector<Batch> batches_;
    std::size_t batch_ = 0;
    double now_ = 0.0;

    long slots_ = 0;
    int max_backlog_ = 0;
    MessageLedger ledger_;

    std::vector<std::size_t> transmitters_;
    std::vector<double> gains_;
    std::vector<char> engaged_;
    SlotRecord record_;
};

const SchemeParams& Simulation::params_for(int k) const {
    if (cfg_.scheme == Scheme::fixed) return fixed_;
    if (k == 0) return empty_;
    return adaptive_[static_cast<std::size_t>(k)];
}

const SicReceiver& Simulation::receiver_for(int k) const {
    return cfg_.scheme == Scheme::fixed ? receivers_.front() : receivers_[static_cast<std::size_t>(k) - 1];
}

double Simulation::truncated_exp(double rate, double limit) {
    // Exp(rate) conditioned on being below `limit`, by inversion.
    const double mass = -std::expm1(-rate * limit);
    const double v = -std::log1p(-uniform_(rng_) * mass) / rate;
    return std::min(v, limit);
}

void Simulation::initialize() {
    const std::size_t n = static_cast<std::size_t>(sys_.n);
    empty_.p = 0.0;
    empty_.gamma = sys_.gamma_max;
    empty_.slot_s = sys_.empty_slot_s();

    const double b0 = cfg_.initial_backlog_prob.value_or(backlog_prob(sys_.lambda, fixed_.slot_s));
    if (!(b0 >= 0.0 && b0 <= 1.0)) throw std::domain_error("initial backlog probability must lie in [0,1]");
    std::bernoulli_distribution starts_backlogged(b0);

    nodes_.assign(n, NodeState{});
    ages_.assign(n, AgeTracker(0.0, 0.0));
    delivered_in_window_.assign(n, 0);
    engaged_.assign(n, 0);
    for (auto& node : nodes_) {
        if (starts_backlogged(rng_)) {
            node.mode = NodeMode::backlogged;
            // as if the message arrived during the slot before time zero
            node.pending_gen_time = -truncated_exp(sys_.lambda, fixed_.slot_s);
            ++backlog_;
            ++ledger_.generated;
        }
        node.next_arrival = arrival_(rng_);
    }
}

void Simulation::enter_window(double t) {
    in_window_ = true;
    for (auto& a : ages_) a.flush(t);
    batch_ = 0;
}

void Simulation::select_batch(double t) {
    std::size_t idx = static_cast<std::size_t>(std::floor((t - cfg_.warmup_s) / batch_width_));
    idx = std::min(idx, batches_.size() - 1);
    if (idx == batch_) return;
    for (auto& a : ages_) batches_[batch_].age_area += a.flush(t);
    batch_ = idx;
}

void Simulation::handle_arrival(std::size_t i, double slot_end, bool engaged, bool counted) {
    NodeState& node = nodes_[i];
    const double first = node.next_arrival;
    const double lambda = sys_.lambda;
    long count;
    if (engaged) {
        count = 1 + std::poisson_distribution<long>(lambda * (slot_end - first))(rng_);
        ledger_.dropped_engaged += count;
    } else {
        // Keep only the last arrival of the slot. Given one at `first`, the
        // rest of the slot is a fresh Poisson stretch.
        const double span = slot_end - first;
        double last = first;
        count = 1;
        if (uniform_(rng_) >= std::exp(-lambda * span)) {
            last = slot_end - truncated_exp(lambda, span);
            count = 2;
            if (last > first) count += std::poisson_distribution<long>(lambda * (last - first))(rng_);
        }
        ledger_.overwritten += count - 1;
        node.mode = NodeMode::backlogged;
        node.pending_gen_time = last;
        ++backlog_;
    }
    ledger_.generated += count;
    if (counted) batches_[batch_].generated += count;
    node.next_arrival = slot_end + arrival_(rng_);
}

SimMetrics Simulation::execute() {
    initialize();
    const std::size_t n = nodes_.size();
    transmitters_.reserve(n);
    gains_.reserve(n);

    while (now_ < cfg_.horizon_s) {
        const double start = now_;
        if (!in_window_ && start >= cfg_.warmup_s) enter_window(start);
        if (in_window_) select_batch(start);

        const int k = backlog_;
        max_backlog_ = std::max(max_backlog_, k);
        const SchemeParams& sp = params_for(k);
        const double end = start + sp.slot_s;

        transmitters_.clear();
        gains_.clear();
        if (k > 0) {
            std::bernoulli_distribution attempt(sp.p);
            for (std::size_t i = 0; i < n; ++i) {
                if (nodes_[i].mode != NodeMode::backlogged) continue;
                engaged_[i] = 1;
                if (sp.p >= 1.0 || attempt(rng_)) {
                    transmitters_.push_back(i);
                    gains_.push_back(unit_exp_(rng_));
                }
            }
        }

        int decoded = 0;
        if (!transmitters_.empty()) {
            DecodeOutcome outcome = receiver_for(k).decode(gains_, &rng_);
            decoded = outcome.num_decoded;
            Batch& batch = batches_[batch_];
            for (std::size_t j = 0; j < transmitters_.size(); ++j) {
                const std::size_t i = transmitters_[j];
                NodeState& node = nodes_[i];
                if (in_window_) {
                    batch.delay_sum += end - node.pending_gen_time;
                    ++batch.transmissions;
                }
                if (observer_) record_.events.push_back({i, node.pending_gen_time, outcome.decoded[j]});
                if (outcome.decoded[j]) {
                    ++ledger_.delivered;
                    node.last_delivered_gen_time = node.pending_gen_time;
                    double area = ages_[i].deliver(end, node.pending_gen_time);
                    if (in_window_) {
                        batch.age_area += area;
                        ++batch.successes;
                        delivered_in_window_[i] = 1;
                    }
                } else {
                    ++ledger_.decode_failures;
                }
            }
        }

        // Arrivals use the modes held at slot start; engaged_ marks nodes
        // that were contending or transmitting.
        for (std::size_t i = 0; i < n; ++i) {
            if (nodes_[i].next_arrival < end) handle_arrival(i, end, engaged_[i] != 0, in_window_);
        }
        for (std::size_t i : transmitters_) {
            nodes_[i].mode = NodeMode::idle;
            --backlog_;
        }
        // Non-transmitting contenders stay backlogged; clear the marks.
        if (k > 0) std::fill(engaged_.begin(), engaged_.end(), 0);

        if (in_window_) {
            Batch& batch = batches_[batch_];
            batch.time += sp.slot_s;
            if (!transmitters_.empty()) batch.busy_time += sp.slot_s;
            ++slots_;
        }
        if (observer_) {
            record_.start = start;
            record_.end = end;
            record_.backlog = k;
            record_.params = sp;
            record_.transmitters = static_cast<int>(transmitters_.size());
            record_.decoded = decoded;
            observer_(record_);
            record_.events.clear();
        }
        now_ = end;
    }

    if (!in_window_) throw std::logic_error("simulation ended before the warmup elapsed");
    for (auto& a : ages_) batches_[batch_].age_area += a.flush(now_);
    ledger_.in_flight = backlog_;
    return summarize();
}

SimMetrics Simulation::summarize() {
    SimMetrics m;
    const double n = static_cast<double>(sys_.n);
    const double bits = static_cast<double>(sys_.packet_bits);
    Batch total;
    Moments pdr, ratio, delay, thr, nthr, aoi, busy;
    for (const Batch& b : batches_) {
        total.time += b.time;
        total.busy_time += b.busy_time;
        total.age_area += b.age_area;
        total.delay_sum += b.delay_sum;
        total.transmissions += b.transmissions;
        total.successes += b.successes;
        total.generated += b.generated;
        if (b.time <= 0.0) continue;
        if (b.transmissions > 0) {
            pdr.add(static_cast<double>(b.successes) / static_cast<double>(b.transmissions));
            delay.add(b.delay_sum / static_cast<double>(b.transmissions));
        }
        if (b.generated > 0) ratio.add(static_cast<double>(b.successes) / static_cast<double>(b.generated));
        thr.add(bits * static_cast<double>(b.successes) / (n * b.time));
        nthr.add(static_cast<double>(b.successes) / (n * b.time * sys_.lambda));
        aoi.add(b.age_area / (n * b.time));
        busy.add(b.busy_time / b.time);
    }

    m.window_s = total.time;
    m.slots = slots_;
    m.transmissions = total.transmissions;
    m.successes = total.successes;
    m.max_backlog = max_backlog_;
    m.ledger = ledger_;

    const double tx = static_cast<double>(total.transmissions);
    m.pdr = tx > 0 ? static_cast<double>(total.successes) / tx : 0.0;
    m.pdr_se = pdr.std_error();
    m.delivery_ratio = total.generated > 0 ? static_cast<double>(total.successes) / static_cast<double>(total.generated) : 0.0;
    m.delivery_ratio_se = ratio.std_error();
    m.delay_s = tx > 0 ? total.delay_sum / tx : 0.0;
    m.delay_se = delay.std_error();
    m.throughput_bps = bits * static_cast<double>(total.successes) / (n * total.time);
    m.throughput_se = thr.std_error();
    m.norm_throughput = static_cast<double>(total.successes) / (n * total.time * sys_.lambda);
    m.norm_throughput_se = nthr.std_error();
    m.aoi_s = total.age_area / (n * total.time);
    m.aoi_se = aoi.std_error();
    m.cbr = total.busy_time / total.time;
    m.cbr_se = busy.std_error();
    m.aoi_censored = std::any_of(delivered_in_window_.begin(), delivered_in_window_.end(), [](char d) { return d == 0; });
    return m;
}

}  // namespace

SimMetrics run(const SimConfig& cfg, const SlotObserver& observer) {
    Simulation sim(cfg, observer);
    return sim.execute();
}

SimMetrics replicate(const SimConfig& cfg, int replications, int jobs) {
    if (replications < 1) throw std::invalid_argument("replications must be >= 1");
    if (replications == 1) return run(cfg);

    std::vector<SimMetrics> runs(static_cast<std::size_t>(replications));
    parallel_for(runs.size(), jobs, [&](std::size_t r) {
        SimConfig c = cfg;
        c.seed = cfg.seed + r;
        runs[r] = run(c);
    });

    auto across = [&](auto field, double& mean, double& se) {
        Moments mo;
        for (const auto& r : runs) mo.add(r.*field);
        mean = mo.sum / mo.count;
        se = mo.std_error();
    };

    SimMetrics m;
    across(&SimMetrics::pdr, m.pdr, m.pdr_se);
    across(&SimMetrics::delivery_ratio, m.delivery_ratio, m.delivery_ratio_se);
    across(&SimMetrics::delay_s, m.delay_s, m.delay_se);
    across(&SimMetrics::throughput_bps, m.throughput_bps, m.throughput_se);
    across(&SimMetrics::norm_throughput, m.norm_throughput, m.norm_throughput_se);
    across(&SimMetrics::aoi_s, m.aoi_s, m.aoi_se);
    across(&SimMetrics::cbr, m.cbr, m.cbr_se);
    m.replications = replications;
    for (const auto& r : runs) {
        m.aoi_censored = m.aoi_censored || r.aoi_censored;
        m.slots += r.slots;
        m.transmissions += r.transmissions;
        m.successes += r.successes;
        m.window_s += r.window_s;
        m.max_backlog = std::max(m.max_backlog, r.max_backlog);
        m.ledger.generated += r.ledger.generated;
        m.ledger.delivered += r.ledger.delivered;
        m.ledger.decode_failures += r.ledger.decode_failures;
        m.ledger.dropped_engaged += r.ledger.dropped_engaged;
        m.ledger.overwritten += r.ledger.overwritten;
        m.ledger.in_flight += r.ledger.in_flight;
    }
    return m;
}

}  // namespace sicma

#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "oracles.hpp"
#include "sicma/analytic_fixed.hpp"
#include "sicma/mh_table.hpp"
#include "sicma/policy.hpp"
#include "sicma/simulator.hpp"

using namespace sicma;

namespace {

SimConfig scenario(Scheme scheme, double s, double slots, std::uint64_t seed = 1, int n = 50) {
    SystemConfig sys = default_config();
    sys.n = n;
    sys.lambda = 1.0 / s;
    return make_sim_config(sys, scheme, slots, seed);
}

void check_same(const SimMetrics& a, const SimMetrics& b) {
    CHECK(a.pdr == b.pdr);
    CHECK(a.pdr_se == b.pdr_se);
    CHECK(a.delivery_ratio == b.delivery_ratio);
    CHECK(a.delay_s == b.delay_s);
    CHECK(a.delay_se == b.delay_se);
    CHECK(a.throughput_bps == b.throughput_bps);
    CHECK(a.norm_throughput == b.norm_throughput);
    CHECK(a.aoi_s == b.aoi_s);
    CHECK(a.aoi_se == b.aoi_se);
    CHECK(a.cbr == b.cbr);
    CHECK(a.slots == b.slots);
    CHECK(a.transmissions == b.transmissions);
    CHECK(a.successes == b.successes);
    CHECK(a.ledger.generated == b.ledger.generated);
}

}  // namespace

TEST_CASE("scheme names") {
    CHECK(parse_scheme("fixed") == Scheme::fixed);
    CHECK(parse_scheme("adaptive") == Scheme::adaptive);
    CHECK(to_string(Scheme::adaptive) == "adaptive");
    CHECK_THROWS(parse_scheme("aloha"));
}

TEST_CASE("configuration errors") {
    SimConfig cfg = scenario(Scheme::fixed, 0.01, 100);
    cfg.warmup_s = cfg.horizon_s;
    CHECK_THROWS(run(cfg));
    cfg.warmup_s = -1.0;
    CHECK_THROWS(run(cfg));
    cfg = scenario(Scheme::fixed, 0.01, 100);
    cfg.initial_backlog_prob = 1.5;
    CHECK_THROWS(run(cfg));
    CHECK_THROWS(replicate(scenario(Scheme::fixed, 0.01, 100), 0));
    CHECK_THROWS(make_sim_config(default_config(), Scheme::fixed, 100, 1, 1.0));
}

TEST_CASE("horizon sizing") {
    SystemConfig sys = default_config();
    SimConfig cfg = make_sim_config(sys, Scheme::fixed, 1000, 1);
    const double t = fixed_params(sys).slot_s;
    CHECK(cfg.horizon_s == doctest::Approx(1000 * t / 0.9));
    CHECK(cfg.warmup_s == doctest::Approx(0.1 * cfg.horizon_s));
    CHECK(longest_slot(sys, Scheme::adaptive) == doctest::Approx(adaptive_params(sys.n, sys).slot_s));
    SimMetrics m = run(cfg);
    CHECK(m.slots >= 1000);
}

TEST_CASE("lone node delivers with probability 1 - eps") {
    SimConfig cfg = scenario(Scheme::fixed, 0.05, 20000, 3, 1);
    SimMetrics m = replicate(cfg, 8);
    CHECK(m.transmissions > 5000);
    CHECK(std::abs(m.pdr - 0.9) <= 3 * m.pdr_se);
    CHECK(std::abs(m.pdr - 0.9) <= 3 * std::sqrt(0.09 / static_cast<double>(m.transmissions)) * 1.5);
}

TEST_CASE("message conservation") {
    for (Scheme scheme : {Scheme::fixed, Scheme::adaptive}) {
        for (double s : {0.001, 0.03, 0.5}) {
            SimMetrics m = run(scenario(scheme, s, 3000, 9));
            CAPTURE(s);
            CHECK(m.ledger.balanced());
            CHECK(m.ledger.delivered <= m.ledger.generated);
            CHECK(m.successes <= m.transmissions);
            CHECK(m.pdr >= 0.0);
            CHECK(m.pdr <= 1.0);
            CHECK(m.norm_throughput >= 0.0);
            CHECK(m.norm_throughput <= 1.0);
        }
    }
}

TEST_CASE("slot trace respects the protocol") {
    for (Scheme scheme : {Scheme::fixed, Scheme::adaptive}) {
        SimConfig cfg = scenario(scheme, 0.02, 3000, 4);
        const SystemConfig sys = cfg.system;
        const SchemeParams fixed = fixed_params(sys);
        double clock = 0.0;
        long count = 0;
        run(cfg, [&](const SlotRecord& r) {
            ++count;
            CHECK(r.start == clock);
            clock = r.end;
            CHECK(r.backlog >= 0);
            CHECK(r.backlog <= sys.n);
            CHECK(r.transmitters <= r.backlog);
            CHECK(r.decoded <= r.transmitters);
            CHECK(r.events.size() == static_cast<std::size_t>(r.transmitters));
            for (const auto& e : r.events) CHECK(e.gen_time <= r.start);
            const double len = r.end - r.start;
            if (scheme == Scheme::fixed) {
                CHECK(len == doctest::Approx(fixed.slot_s));
                CHECK(r.transmitters == r.backlog);
            } else if (r.backlog == 0) {
                CHECK(len == doctest::Approx(sys.empty_slot_s()));
            } else {
                SchemeParams sp = adaptive_params(r.backlog, sys);
                CHECK(len == doctest::Approx(sp.slot_s));
                CHECK(r.params.p == sp.p);
                CHECK(r.params.gamma == sp.gamma);
            }
        });
        CHECK(count > 3000);
        CHECK(clock >= cfg.horizon_s);
    }
}

TEST_CASE("runs are reproducible") {
    SimConfig cfg = scenario(Scheme::adaptive, 0.01, 2000, 17);
    check_same(run(cfg), run(cfg));
    check_same(replicate(cfg, 1), run(cfg));
    check_same(replicate(cfg, 4, 1), replicate(cfg, 4, 3));
    SimConfig other = cfg;
    other.seed = 18;
    CHECK(run(other).ledger.generated != run(cfg).ledger.generated);
}

TEST_CASE("metrics recomputed from the slot trace") {
    for (Scheme scheme : {Scheme::fixed, Scheme::adaptive}) {
        SimConfig cfg = scenario(scheme, 0.05, 5000, 21);
        const int n = cfg.system.n;
        std::vector<std::vector<std::pair<double, double>>> deliveries(static_cast<std::size_t>(n));
        std::vector<double> origin_at_start(static_cast<std::size_t>(n), 0.0);
        double window_start = -1.0, window_end = 0.0, busy = 0.0, delay_sum = 0.0;
        long tx = 0, ok = 0, slots = 0;
        run(cfg, [&](const SlotRecord& r) {
            const bool in_window = r.start >= cfg.warmup_s;
            if (in_window && window_start < 0.0) window_start = r.start;
            for (const auto& e : r.events) {
                if (!e.decoded) continue;
                if (in_window) deliveries[e.node].emplace_back(r.end, e.gen_time);
                else origin_at_start[e.node] = std::max(origin_at_start[e.node], e.gen_time);
            }
            if (!in_window) return;
            ++slots;
            window_end = r.end;
            if (r.transmitters > 0) busy += r.end - r.start;
            for (const auto& e : r.events) {
                ++tx;
                ok += e.decoded;
                delay_sum += r.end - e.gen_time;
            }
        });
        SimMetrics m = run(cfg);
        const double window = window_end - window_start;
        CHECK(m.slots == slots);
        CHECK(m.transmissions == tx);
        CHECK(m.successes == ok);
        CHECK(m.window_s == doctest::Approx(window).epsilon(1e-12));
        CHECK(m.pdr == doctest::Approx(static_cast<double>(ok) / tx).epsilon(1e-12));
        CHECK(m.delay_s == doctest::Approx(delay_sum / tx).epsilon(1e-10));
        CHECK(m.cbr == doctest::Approx(busy / window).epsilon(1e-10));
        CHECK(m.throughput_bps == doctest::Approx(4000.0 * ok / (n * window)).epsilon(1e-10));
        double aoi = 0.0;
        for (int i = 0; i < n; ++i)
            aoi += oracle::sawtooth_mean(deliveries[i], origin_at_start[i], window_start, window_end);
        CHECK(m.aoi_s == doctest::Approx(aoi / n).epsilon(1e-9));
    }
}

TEST_CASE("standard error shrinks like one over root R") {
    SimConfig cfg = scenario(Scheme::fixed, 0.02, 2000, 100);
    SimMetrics r4 = replicate(cfg, 4, 4);
    cfg.seed = 200;
    SimMetrics r16 = replicate(cfg, 16, 4);
    CHECK(r4.replications == 4);
    CHECK(r16.replications == 16);
    // pooled over metrics; a single 4-run estimate of spread is itself noisy.
    // The busy ratio is left out: it is exactly 1 at this load.
    double log_ratio = 0.0;
    const std::pair<double, double> pairs[] = {{r4.pdr_se, r16.pdr_se},           {r4.delay_se, r16.delay_se},
                                               {r4.throughput_se, r16.throughput_se}, {r4.aoi_se, r16.aoi_se},
                                               {r4.delivery_ratio_se, r16.delivery_ratio_se}};
    for (auto [a, b] : pairs) {
        REQUIRE(a > 0.0);
        REQUIRE(b > 0.0);
        log_ratio += std::log(a / b);
    }
    const double ratio = std::exp(log_ratio / std::size(pairs));
    CHECK(ratio > 1.3);
    CHECK(ratio < 3.1);
}

TEST_CASE("fixed scheme agrees with the closed form") {
    SystemConfig sys = default_config();
    sys.lambda = 1.0 / 0.01;
    SimConfig cfg = make_sim_config(sys, Scheme::fixed, 2000, 55);
    SimMetrics m = replicate(cfg, 16, 4);
    const double gamma = fixed_params(sys).gamma;
    auto table = mh_table(sys.n, gamma, sys.epsilon, 200000, 7);
    FixedMetrics fm = fixed_metrics(sys, table.curve(sys.n, gamma, sys.epsilon));
    CHECK(std::abs(m.delay_s - fm.ed) <= 3 * m.delay_se);
    CHECK(std::abs(m.pdr - fm.p_s) <= 3 * m.pdr_se);
    CHECK(std::abs(m.aoi_s - fm.ea) <= 0.03 * fm.ea);
    CHECK(std::abs(m.throughput_bps - fm.theta_bps) <= 3 * m.throughput_se);
}

TEST_CASE("starting state") {
    SimConfig cfg = scenario(Scheme::fixed, 0.5, 200, 2);
    cfg.initial_backlog_prob = 0.0;
    long first_backlog = -1;
    run(cfg, [&](const SlotRecord& r) {
        if (first_backlog < 0) first_backlog = r.backlog;
    });
    CHECK(first_backlog == 0);
    cfg.initial_backlog_prob = 1.0;
    first_backlog = -1;
    run(cfg, [&](const SlotRecord& r) {
        if (first_backlog < 0) first_backlog = r.backlog;
    });
    CHECK(first_backlog == 50);
}

TEST_CASE("adaptive scheme in heavy traffic") {
    SimMetrics adaptive = replicate(scenario(Scheme::adaptive, 0.001, 4000, 31), 4, 4);
    SimMetrics fixed = replicate(scenario(Scheme::fixed, 0.001, 4000, 31), 4, 4);
    CHECK(adaptive.pdr > 0.7);
    CHECK(fixed.pdr > 0.85);
    CHECK(adaptive.delay_s < fixed.delay_s);
    CHECK(adaptive.aoi_s < fixed.aoi_s);
    CHECK(adaptive.throughput_bps > fixed.throughput_bps);
}

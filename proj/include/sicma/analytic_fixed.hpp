#pragma once

#include <span>
#include <vector>

#include "sicma/config.hpp"

namespace sicma {

// Closed-form metrics of the fixed-parameter scheme (p* = 1, slot T*).
struct FixedMetrics {
    double gamma = 0.0;
    double slot_s = 0.0;   // T*
    double b = 0.0;        // backlog probability at slot start
    double tau = 0.0;      // per-slot transmit probability
    double p_s = 0.0;      // per-transmission success probability
    double cbr = 0.0;
    double ey = 0.0;       // E[Y], s
    double ey2 = 0.0;      // E[Y^2], s^2
    double ed = 0.0;       // mean access delay, s
    double theta = 0.0;    // delivered messages per second per node
    double theta_bps = 0.0;
    double theta_norm = 0.0;
    double ea = 0.0;       // mean AoI, s; +inf when p_s == 0
};

/// Backlog probability at p* = 1: 1 / (1 + 1/(1 - e^{-lambda T})).
double backlog_prob(double lambda, double slot_s);

/// Distribution of the number of backlogged nodes among the other n-1.
std::vector<double> q_dist(int n, double b);

/// P_s = (1/(n tau)) sum_{h>=1} m_h C(n,h) tau^h (1-tau)^(n-h).
double success_prob(int n, double tau, std::span<const double> mh);

double cbr(int n, double b, double p_star);

struct InterdepartureMoments {
    double ey = 0.0;
    double ey2 = 0.0;
};
InterdepartureMoments interdeparture_moments(double lambda, double slot_s);

double mean_access_delay(double lambda, double slot_s, double p_star);

struct Throughput {
    double theta = 0.0;
    double theta_bps = 0.0;
    double theta_norm = 0.0;
};
Throughput throughput(double p_s, double ey, long packet_bits, double lambda);

/// E[A] = E[D] + E[Y^2]/(2E[Y]) + E[Y](1/P_s - 1). Infinite when p_s == 0.
double mean_aoi(double ed, double ey, double ey2, double p_s);

/// Chains every step for the configured lambda. `mh` is m_0..m_n at gamma*.
FixedMetrics fixed_metrics(const SystemConfig& cfg, std::span<const double> mh);

}  // namespace sicma

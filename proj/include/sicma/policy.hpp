#pragma once

#include <span>
#include <vector>

#include "sicma/config.hpp"

namespace sicma {

// Per-slot decision: transmit probability, SNIR threshold, slot duration.
struct SchemeParams {
    double p = 1.0;
    double gamma = 0.0;
    double slot_s = 0.0;
};

/// p* = 1, gamma* = 1/(a n + b), slot from slot_time.
SchemeParams fixed_params(const SystemConfig& cfg);

/// Backlog-dependent setting for k >= 1 backlogged nodes.
/// Below k_c: p = 1/k at gamma_max. From k_c on: p = 1, gamma = 1/(a k + b).
SchemeParams adaptive_params(int k, const SystemConfig& cfg);

/// Binomial pmf C(k,h) p^h (1-p)^(k-h) for h = 0..k.
std::vector<double> binomial_pmf(int k, double p);

/// Expected spectral efficiency (bit/s/Hz) with k contenders each sending
/// w.p. p at threshold gamma. `mh[h]` is m_h(gamma); needs h = 0..k.
double sum_rate(int k, double p, double gamma, std::span<const double> mh);

struct RateGrid {
    std::vector<double> p;
    std::vector<double> gamma;
};

/// p in {0.05, 0.10, ..., 1.0} and `gamma_points` log-spaced thresholds in
/// (gamma_lo, gamma_hi], the last one equal to gamma_hi.
RateGrid default_rate_grid(double gamma_hi, double gamma_lo = 1e-3, int gamma_points = 40);

struct RateOptimum {
    double p = 0.0;
    double gamma = 0.0;
    double rate = 0.0;
};

// Exhaustive search. `mh_at(gamma)` returns m_0..m_k at that threshold.
// Ties resolve toward the smaller p, then the smaller gamma.
template <class MhLookup>
RateOptimum grid_maximize_sum_rate(int k, const RateGrid& grid, MhLookup&& mh_at);

}  // namespace sicma

#include "sicma/policy_impl.hpp"

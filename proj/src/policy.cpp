#include "sicma/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sicma {

SchemeParams fixed_params(const SystemConfig& cfg) {
    if (cfg.n < 1) throw std::domain_error("fixed_params: n must be >= 1");
    SchemeParams out;
    out.p = 1.0;
    out.gamma = 1.0 / (cfg.a_gamma * cfg.n + cfg.b_gamma);
    out.slot_s = slot_time(out.gamma, cfg.packet_bits, cfg.bandwidth_hz);
    return out;
}

SchemeParams adaptive_params(int k, const SystemConfig& cfg) {
    if (k < 1) throw std::domain_error("adaptive_params: k must be >= 1 (empty slots use T_0)");
    SchemeParams out;
    if (k < cfg.k_c) {
        out.p = 1.0 / k;
        out.gamma = cfg.gamma_max;
    } else {
        out.p = 1.0;
        out.gamma = 1.0 / (cfg.a_gamma * k + cfg.b_gamma);
    }
    out.slot_s = slot_time(out.gamma, cfg.packet_bits, cfg.bandwidth_hz);
    return out;
}

std::vector<double> binomial_pmf(int k, double p) {
    if (k < 0) throw std::domain_error("binomial_pmf: k must be >= 0");
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("binomial_pmf: p must lie in [0,1]");
    std::vector<double> w(static_cast<std::size_t>(k) + 1, 0.0);
    if (p == 0.0) {
        w[0] = 1.0;
        return w;
    }
    if (p == 1.0) {
        w[static_cast<std::size_t>(k)] = 1.0;
        return w;
    }
    const double lp = std::log(p), lq = std::log1p(-p);
    for (int h = 0; h <= k; ++h) {
        double log_c = std::lgamma(k + 1.0) - std::lgamma(h + 1.0) - std::lgamma(k - h + 1.0);
        w[static_cast<std::size_t>(h)] = std::exp(log_c + h * lp + (k - h) * lq);
    }
    return w;
}

double sum_rate(int k, double p, double gamma, std::span<const double> mh) {
    if (k < 0) throw std::domain_error("sum_rate: k must be >= 0");
    if (mh.size() < static_cast<std::size_t>(k) + 1)
        throw std::out_of_range("sum_rate: m_h curve does not reach h = k");
    auto w = binomial_pmf(k, p);
    double expected_decoded = 0.0;
    for (int h = 0; h <= k; ++h) expected_decoded += mh[static_cast<std::size_t>(h)] * w[static_cast<std::size_t>(h)];
    return std::log2(1.0 + gamma) * expected_decoded;
}

RateGrid default_rate_grid(double gamma_hi, double gamma_lo, int gamma_points) {
    if (!(gamma_hi > gamma_lo) || gamma_lo <= 0.0 || gamma_points < 1)
        throw std::invalid_argument("default_rate_grid: bad threshold range");
    RateGrid g;
    for (int i = 1; i <= 20; ++i) g.p.push_back(i / 20.0);
    // Open at gamma_lo, closed at gamma_hi.
    const double lo = std::log(gamma_lo), hi = std::log(gamma_hi);
    for (int i = 1; i <= gamma_points; ++i) g.gamma.push_back(std::exp(lo + (hi - lo) * i / gamma_points));
    g.gamma.back() = gamma_hi;
    return g;
}

}  // namespace sicma

#include "sicma/analytic_fixed.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "sicma/policy.hpp"

namespace sicma {

namespace {

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::domain_error(std::string(what) + " must be positive and finite");
}

void require_unit_p(double p_star) {
    if (p_star != 1.0) throw std::domain_error("fixed-scheme expressions are specialized to p* = 1");
}

}  // namespace

double backlog_prob(double lambda, double slot_s) {
    require_positive(lambda, "lambda");
    require_positive(slot_s, "slot time");
    // 1 - e^{-x}, accurate for small x
    const double arrival = -std::expm1(-lambda * slot_s);
    return arrival / (arrival + 1.0);
}

std::vector<double> q_dist(int n, double b) {
    if (n < 1) throw std::domain_error("q_dist: n must be >= 1");
    return binomial_pmf(n - 1, b);
}

double success_prob(int n, double tau, std::span<const double> mh) {
    if (n < 1) throw std::domain_error("success_prob: n must be >= 1");
    if (!(tau > 0.0 && tau <= 1.0)) throw std::domain_error("success_prob: tau must lie in (0,1]");
    if (mh.size() < static_cast<std::size_t>(n) + 1) throw std::out_of_range("success_prob: m_h curve does not reach h = n");
    auto w = binomial_pmf(n, tau);
    double decoded = 0.0;
    for (int h = 1; h <= n; ++h) decoded += mh[static_cast<std::size_t>(h)] * w[static_cast<std::size_t>(h)];
    return decoded / (n * tau);
}

double cbr(int n, double b, double p_star) {
    if (n < 1) throw std::domain_error("cbr: n must be >= 1");
    const double tau = b * p_star;
    if (!(tau >= 0.0 && tau <= 1.0)) throw std::domain_error("cbr: b * p* must lie in [0,1]");
    return 1.0 - std::pow(1.0 - tau, n);
}

InterdepartureMoments interdeparture_moments(double lambda, double slot_s) {
    require_positive(lambda, "lambda");
    require_positive(slot_s, "slot time");
    const double e = std::exp(-lambda * slot_s);
    const double one_minus = -std::expm1(-lambda * slot_s);
    InterdepartureMoments m;
    m.ey = slot_s + slot_s / one_minus;
    m.ey2 = slot_s * slot_s * (1.0 + (3.0 - e) / (one_minus * one_minus));
    return m;
}

double mean_access_delay(double lambda, double slot_s, double p_star) {
    require_positive(lambda, "lambda");
    require_positive(slot_s, "slot time");
    require_unit_p(p_star);
    // 1/lambda - T/(e^{lambda T} - 1) is the mean time from the last
    // arrival in a slot to the slot end; for small lambda T it tends to T/2
    // and the direct form cancels catastrophically, so use the series there.
    const double x = lambda * slot_s;
    double last_arrival_gap;
    if (x < 1e-4) last_arrival_gap = slot_s * (0.5 - x / 12.0 + x * x * x / 720.0);
    else last_arrival_gap = 1.0 / lambda - slot_s / std::expm1(x);
    return last_arrival_gap + slot_s / p_star;
}

Throughput throughput(double p_s, double ey, long packet_bits, double lambda) {
    if (!(p_s >= 0.0 && p_s <= 1.0)) throw std::domain_error("throughput: P_s must lie in [0,1]");
    require_positive(ey, "E[Y]");
    require_positive(lambda, "lambda");
    Throughput t;
    t.theta = p_s / ey;
    t.theta_bps = static_cast<double>(packet_bits) * t.theta;
    t.theta_norm = t.theta / lambda;
    return t;
}

double mean_aoi(double ed, double ey, double ey2, double p_s) {
    if (p_s <= 0.0) return std::numeric_limits<double>::infinity();
    return ed + ey2 / (2.0 * ey) + ey * (1.0 / p_s - 1.0);
}

FixedMetrics fixed_metrics(const SystemConfig& cfg, std::span<const double> mh) {
    const SchemeParams fp = fixed_params(cfg);
    FixedMetrics m;
    m.gamma = fp.gamma;
    m.slot_s = fp.slot_s;
    m.b = backlog_prob(cfg.lambda, fp.slot_s);
    m.tau = m.b * fp.p;
    m.p_s = success_prob(cfg.n, m.tau, mh);
    m.cbr = cbr(cfg.n, m.b, fp.p);
    const auto y = interdeparture_moments(cfg.lambda, fp.slot_s);
    m.ey = y.ey;
    m.ey2 = y.ey2;
    m.ed = mean_access_delay(cfg.lambda, fp.slot_s, fp.p);
    const auto th = throughput(m.p_s, m.ey, cfg.packet_bits, cfg.lambda);
    m.theta = th.theta;
    m.theta_bps = th.theta_bps;
    m.theta_norm = th.theta_norm;
    m.ea = mean_aoi(m.ed, m.ey, m.ey2, m.p_s);
    return m;
}

}  // namespace sicma

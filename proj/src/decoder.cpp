#include "sicma/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "sicma/config.hpp"

namespace sicma {

SicReceiver::SicReceiver(double gamma, double epsilon)
    : gamma_(gamma), c_(sicma::outage_constant(epsilon)), snr_(0.0) {
    if (!(gamma > 0.0)) throw std::domain_error("SIC threshold must be positive");
    snr_ = gamma_ / c_;
}

int SicReceiver::count_decoded_sorted(std::span<const double> gains) const {
    double residual = 0.0;
    for (double g : gains) residual += g;
    int decoded = 0;
    for (double g : gains) {
        residual -= g;
        // Guards against the running subtraction drifting below zero.
        if (residual < 0.0) residual = 0.0;
        if (g < c_ + gamma_ * residual) break;
        ++decoded;
    }
    return decoded;
}

DecodeOutcome SicReceiver::decode(std::span<const double> gains, Rng* tie_rng) const {
    DecodeOutcome out;
    out.decoded.assign(gains.size(), false);
    if (gains.empty()) return out;
    for (double g : gains)
        if (!(g > 0.0)) throw std::domain_error("fading gains must be positive");

    std::vector<std::size_t> order(gains.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return gains[a] > gains[b]; });
    if (tie_rng) {
        for (std::size_t i = 0; i < order.size();) {
            std::size_t j = i + 1;
            while (j < order.size() && gains[order[j]] == gains[order[i]]) ++j;
            if (j - i > 1) std::shuffle(order.begin() + static_cast<long>(i), order.begin() + static_cast<long>(j), *tie_rng);
            i = j;
        }
    }

    // Same accumulation order as count_decoded_sorted so both paths agree bit for bit.
    double residual = 0.0;
    for (std::size_t idx : order) residual += gains[idx];
    for (std::size_t idx : order) {
        double g = gains[idx];
        residual -= g;
        if (residual < 0.0) residual = 0.0;
        if (g < c_ + gamma_ * residual) break;
        out.decoded[idx] = true;
        ++out.num_decoded;
    }
    return out;
}

DecodeOutcome decode_slot(std::span<const double> gains, double gamma, double epsilon, Rng* tie_rng) {
    return SicReceiver(gamma, epsilon).decode(gains, tie_rng);
}

MhEstimate estimate_mh(int h, double gamma, double epsilon, long samples, std::uint64_t seed) {
    if (h < 0) throw std::domain_error("estimate_mh: h must be >= 0");
    if (samples < 1) throw std::domain_error("estimate_mh: samples must be >= 1");
    SicReceiver rx(gamma, epsilon);
    MhEstimate est;
    est.samples = samples;
    if (h == 0) return est;

    Rng rng(seed);
    std::exponential_distribution<double> fading(1.0);
    std::vector<double> gains(static_cast<std::size_t>(h));
    // Welford
    double mean = 0.0, m2 = 0.0;
    for (long s = 0; s < samples; ++s) {
        for (auto& g : gains) g = fading(rng);
        std::sort(gains.begin(), gains.end(), std::greater<>());
        double x = rx.count_decoded_sorted(gains);
        double delta = x - mean;
        mean += delta / static_cast<double>(s + 1);
        m2 += delta * (x - mean);
    }
    est.mean = mean;
    est.std_error = samples > 1 ? std::sqrt(m2 / static_cast<double>(samples - 1) / static_cast<double>(samples)) : 0.0;
    return est;
}

}  // namespace sicma

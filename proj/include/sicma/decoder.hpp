#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace sicma {

using Rng = std::mt19937_64;

struct DecodeOutcome {
    int num_decoded = 0;
    // Aligned with the caller's transmitter order.
    std::vector<bool> decoded;
};

// Ideal ordered SIC receiver at a fixed threshold.
//
// Received powers are S_j = G_j * S0 with S0 = gamma / c. Packets are taken
// in descending power; packet l decodes iff every stronger one did and
// S_l / (1 + sum_{r>l} S_r) >= gamma. Substituting S0 this is
// G_l >= c + gamma * sum_{r>l} G_r, which is what gets evaluated.
class SicReceiver {
public:
    SicReceiver(double gamma, double epsilon);

    double gamma() const { return gamma_; }
    double outage_constant() const { return c_; }
    double snr() const { return snr_; }

    /// Ties in power are ordered uniformly at random with `tie_rng`, or by index if null.
    DecodeOutcome decode(std::span<const double> gains, Rng* tie_rng = nullptr) const;

    /// Count-only path. `gains` must already be sorted in descending order.
    int count_decoded_sorted(std::span<const double> gains) const;

private:
    double gamma_;
    double c_;
    double snr_;
};

DecodeOutcome decode_slot(std::span<const double> gains, double gamma, double epsilon,
                          Rng* tie_rng = nullptr);

struct MhEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    long samples = 0;
};

/// Monte-Carlo mean number of packets decoded out of h simultaneous
/// transmissions with i.i.d. unit-mean exponential gains.
MhEstimate estimate_mh(int h, double gamma, double epsilon, long samples, std::uint64_t seed);

}  // namespace sicma

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace sicma {

// Physical and protocol constants of one network instance.
//
// Units: seconds, Hz, bits, linear SNR. The noise level is carried only for
// reference; every power in the model is normalized by it.
struct SystemConfig {
    int n = 50;                       // nodes
    long packet_bits = 4000;          // L
    double bandwidth_hz = 1e6;        // W
    double epsilon = 0.1;             // single-transmitter outage tolerance
    double gamma_max = 31.0;          // largest feasible SNIR threshold
    double lambda = 100.0;            // per-node message rate, 1/s
    int k_c = 6;                      // adaptive switch point
    double a_gamma = 0.39;
    double b_gamma = 0.78;
    std::optional<double> t0_s;       // empty-slot duration; unset means slot_time(gamma_max)
    double noise_dbm = -107.0;        // informational

    /// -ln(1 - epsilon), filled in by validated().
    double c = 0.0;

    /// Empty-system slot duration in seconds.
    double empty_slot_s() const;

    /// Throws std::domain_error on any violated invariant; returns a copy with c set.
    SystemConfig validated() const;
};

/// The configuration used throughout the evaluation campaign (n=50, 500 B, 1 MHz, eps=0.1).
SystemConfig default_config();

/// Time to send L bits at spectral efficiency log2(1+gamma).
double slot_time(double gamma, long packet_bits, double bandwidth_hz);

/// Mean received SNR such that a lone Rayleigh-faded packet clears gamma w.p. 1-epsilon.
double target_snr(double gamma, double epsilon);

/// -ln(1 - epsilon).
double outage_constant(double epsilon);

// Config file: one `key = value` per line, `#` comments. Keys are the
// snake_case field names n, l, w, epsilon, gamma_max, lambda, k_c, a_gamma,
// b_gamma, t_0, p_n. `l` needs a unit: "500 B", "500 bytes", "4000 bit".
// `t_0` accepts "auto" or seconds with an optional "s"/"ms" suffix.
SystemConfig parse_config(std::string_view text);
SystemConfig load_config(const std::filesystem::path& path);
std::string format_config(const SystemConfig& cfg);

}  // namespace sicma

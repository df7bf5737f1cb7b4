#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sicma/config.hpp"
#include "sicma/csv.hpp"
#include "sicma/mh_table.hpp"
#include "sicma/simulator.hpp"

namespace sicma {

inline constexpr const char* kToolVersion = "0.1.0";

/// `points` log-spaced values from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int points);

/// "lo:hi:points" (log-spaced) or a comma list of seconds.
std::vector<double> parse_s_grid(const std::string& text);

struct SweepSpec {
    std::vector<double> s_grid = log_grid(1e-3, 1.0, 40);
    std::vector<Scheme> schemes = {Scheme::fixed, Scheme::adaptive};
    bool analytic = true;             // fixed-scheme closed form rows
    int replications = 20;
    std::uint64_t seed_base = 1;
    std::filesystem::path out_dir = "results";
    double min_slots = 1e5;           // post-warmup slots per point, summed over replications
    double warmup_fraction = 0.1;
    std::optional<double> horizon_s;  // overrides the slot-count sizing
    std::optional<double> warmup_s;
    long mh_samples = 100000;
    std::optional<std::filesystem::path> mh_cache;
    int jobs = 1;

    void validate() const;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<std::string> metadata;
    std::vector<std::filesystem::path> files;
};

/// Seed of one (scheme, grid point) job; replications add 0, 1, 2, ...
std::uint64_t point_seed(std::uint64_t seed_base, Scheme scheme, std::size_t point);

std::string config_hash(const SystemConfig& cfg, const SweepSpec& spec);

/// Simulation config for one sweep point at mean generation time s.
SimConfig point_config(const SweepSpec& spec, const SystemConfig& system, Scheme scheme, std::size_t point, double s);

SweepRow analytic_row(const SystemConfig& system, double s, const std::vector<double>& mh);
SweepRow sim_row(Scheme scheme, double s, const SimMetrics& m);

/// Computes every row in grid order without touching the filesystem
/// (apart from the optional m_h cache).
SweepResult compute_sweep(const SweepSpec& spec, const SystemConfig& system);

/// compute_sweep plus sweep.csv and the five figure extracts under spec.out_dir.
SweepResult sweep(const SweepSpec& spec, const SystemConfig& system);

struct CompareLine {
    std::string metric;
    double s_seconds = 0.0;
    double analytic = 0.0;
    double simulated = 0.0;
    double std_error = 0.0;
    double z = 0.0;
    std::string status;   // PASS | FAIL | SKIP
};

struct CompareReport {
    std::vector<CompareLine> lines;
    bool pass = true;
    double z_limit = 3.0;
};

/// z = (sim - analytic) / sim stderr for every metric with a simulated
/// counterpart; AoI is skipped at censored points.
CompareReport compare(const std::vector<SweepRow>& analytic_rows, const std::vector<SweepRow>& sim_rows,
                      double z_limit = 3.0);

/// Splits fixed-scheme rows of a sweep by source and compares them.
CompareReport compare_sweep(const std::vector<SweepRow>& rows, double z_limit = 3.0);

void write_compare_csv(std::ostream& out, const CompareReport& report);
void print_compare_summary(std::ostream& out, const CompareReport& report);

// Tables for gamma*(n) and every gamma*_k, k = k_c..n, each covering
// h = 0..n, merged into the file at `path`. Returns the number of entries
// that had to be sampled (zero when the file already holds them).
int mh_precompute(const SystemConfig& system, const std::filesystem::path& path, long samples, std::uint64_t seed,
                  int jobs = 1);

}  // namespace sicma

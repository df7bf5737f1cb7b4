#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <tuple>
#include <vector>

namespace sicma {

/// Rounds to 6 significant digits; the cache key for thresholds and tolerances.
double quantize_key(double x);

struct MhEntry {
    int h = 0;
    double gamma = 0.0;
    double epsilon = 0.0;
    long samples = 0;
    std::uint64_t seed = 0;
    double estimate = 0.0;
    double std_error = 0.0;
};

// Cached m_h(gamma) estimates keyed by (h, quantized gamma, quantized epsilon).
//
// Text format, one entry per line, whitespace separated, in this column order:
//   h gamma epsilon samples seed estimate stderr
// Lines starting with '#' are comments. Reals are written with 17 significant
// digits so a reload reproduces every estimate exactly.
class MhTable {
public:
    using Key = std::tuple<int, double, double>;

    void insert(const MhEntry& e);
    const MhEntry* find(int h, double gamma, double epsilon) const;
    bool covers(int h_max, double gamma, double epsilon) const;
    std::size_t size() const { return entries_.size(); }

    /// m_0..m_{h_max} at this threshold; throws std::out_of_range if any is missing.
    std::vector<double> curve(int h_max, double gamma, double epsilon) const;
    std::vector<double> curve_std_error(int h_max, double gamma, double epsilon) const;

    const std::map<Key, MhEntry>& entries() const { return entries_; }

    void save(const std::filesystem::path& path) const;
    static MhTable load(const std::filesystem::path& path);

private:
    std::map<Key, MhEntry> entries_;
};

/// Per-h seed derived from a base seed so each entry is reproducible on its own.
std::uint64_t mh_entry_seed(std::uint64_t base_seed, int h, double gamma, double epsilon);

/// Fills h = 0..h_max at gamma into `table`, sampling only missing entries or
/// entries whose sample count or seed differ. Returns the number of entries sampled.
int fill_mh(MhTable& table, int h_max, double gamma, double epsilon, long samples, std::uint64_t seed);

/// Builds a fresh table for h = 0..h_max at one threshold.
MhTable mh_table(int h_max, double gamma, double epsilon, long samples, std::uint64_t seed);

}  // namespace sicma

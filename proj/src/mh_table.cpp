#include "sicma/mh_table.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "sicma/decoder.hpp"

namespace sicma {

double quantize_key(double x) {
    if (x == 0.0 || !std::isfinite(x)) return x;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.5e", x);
    return std::strtod(buf, nullptr);
}

void MhTable::insert(const MhEntry& e) {
    if (e.estimate < 0.0 || e.estimate > e.h)
        throw std::domain_error("m_h estimate outside [0, h]");
    entries_[Key{e.h, quantize_key(e.gamma), quantize_key(e.epsilon)}] = e;
}

const MhEntry* MhTable::find(int h, double gamma, double epsilon) const {
    auto it = entries_.find(Key{h, quantize_key(gamma), quantize_key(epsilon)});
    return it == entries_.end() ? nullptr : &it->second;
}

bool MhTable::covers(int h_max, double gamma, double epsilon) const {
    for (int h = 0; h <= h_max; ++h)
        if (!find(h, gamma, epsilon)) return false;
    return true;
}

std::vector<double> MhTable::curve(int h_max, double gamma, double epsilon) const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(h_max) + 1);
    for (int h = 0; h <= h_max; ++h) {
        const MhEntry* e = find(h, gamma, epsilon);
        if (!e) {
            std::ostringstream msg;
            msg << "no m_h entry for h=" << h << " gamma=" << gamma << " epsilon=" << epsilon;
            throw std::out_of_range(msg.str());
        }
        out.push_back(e->estimate);
    }
    return out;
}

std::vector<double> MhTable::curve_std_error(int h_max, double gamma, double epsilon) const {
    std::vector<double> out;
    for (int h = 0; h <= h_max; ++h) {
        const MhEntry* e = find(h, gamma, epsilon);
        if (!e) throw std::out_of_range("no m_h entry for h=" + std::to_string(h));
        out.push_back(e->std_error);
    }
    return out;
}

void MhTable::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write m_h table " + path.string());
    out << "# h gamma epsilon samples seed estimate stderr\n";
    char line[256];
    for (const auto& [key, e] : entries_) {
        std::snprintf(line, sizeof line, "%d %.17g %.17g %ld %llu %.17g %.17g\n", e.h, e.gamma, e.epsilon,
                      e.samples, static_cast<unsigned long long>(e.seed), e.estimate, e.std_error);
        out << line;
    }
    out.flush();
    if (!out) throw std::runtime_error("failed writing m_h table " + path.string());
}

MhTable MhTable::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open m_h table " + path.string());
    MhTable table;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        MhEntry e;
        unsigned long long seed = 0;
        std::string gamma, eps, est, se;
        if (!(row >> e.h >> gamma >> eps >> e.samples >> seed >> est >> se))
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": malformed m_h row");
        e.gamma = std::strtod(gamma.c_str(), nullptr);
        e.epsilon = std::strtod(eps.c_str(), nullptr);
        e.estimate = std::strtod(est.c_str(), nullptr);
        e.std_error = std::strtod(se.c_str(), nullptr);
        e.seed = seed;
        table.insert(e);
    }
    return table;
}

std::uint64_t mh_entry_seed(std::uint64_t base_seed, int h, double gamma, double epsilon) {
    // splitmix64 over the key fields
    auto mix = [](std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    };
    std::uint64_t s = mix(base_seed);
    s = mix(s ^ static_cast<std::uint64_t>(h));
    s = mix(s ^ static_cast<std::uint64_t>(std::llround(quantize_key(gamma) * 1e9)));
    s = mix(s ^ static_cast<std::uint64_t>(std::llround(quantize_key(epsilon) * 1e9)));
    return s;
}

int fill_mh(MhTable& table, int h_max, double gamma, double epsilon, long samples, std::uint64_t seed) {
    if (h_max < 0) throw std::domain_error("h_max must be >= 0");
    int sampled = 0;
    for (int h = 0; h <= h_max; ++h) {
        const std::uint64_t entry_seed = mh_entry_seed(seed, h, gamma, epsilon);
        if (const MhEntry* e = table.find(h, gamma, epsilon); e && e->samples == samples && e->seed == entry_seed)
            continue;
        MhEstimate est = estimate_mh(h, gamma, epsilon, samples, entry_seed);
        table.insert(MhEntry{h, gamma, epsilon, samples, entry_seed, est.mean, est.std_error});
        if (h > 0) ++sampled;
    }
    return sampled;
}

MhTable mh_table(int h_max, double gamma, double epsilon, long samples, std::uint64_t seed) {
    if (h_max < 1) throw std::domain_error("mh_table: h_max must be >= 1");
    MhTable table;
    fill_mh(table, h_max, gamma, epsilon, samples, seed);
    return table;
}

}  // namespace sicma

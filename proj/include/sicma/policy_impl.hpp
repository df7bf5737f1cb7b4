#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace sicma {

template <class MhLookup>
RateOptimum grid_maximize_sum_rate(int k, const RateGrid& grid, MhLookup&& mh_at) {
    if (grid.p.empty() || grid.gamma.empty()) throw std::invalid_argument("empty sum-rate grid");
    std::vector<std::vector<double>> curves;
    curves.reserve(grid.gamma.size());
    for (double g : grid.gamma) curves.push_back(mh_at(g));

    // Visiting p then gamma in ascending order and keeping only strict
    // improvements gives the tie-break for free, provided the axes are sorted.
    std::vector<std::size_t> pi(grid.p.size()), gi(grid.gamma.size());
    for (std::size_t i = 0; i < pi.size(); ++i) pi[i] = i;
    for (std::size_t i = 0; i < gi.size(); ++i) gi[i] = i;
    std::sort(pi.begin(), pi.end(), [&](auto a, auto b) { return grid.p[a] < grid.p[b]; });
    std::sort(gi.begin(), gi.end(), [&](auto a, auto b) { return grid.gamma[a] < grid.gamma[b]; });

    RateOptimum best;
    bool first = true;
    for (std::size_t a : pi) {
        for (std::size_t b : gi) {
            double u = sum_rate(k, grid.p[a], grid.gamma[b], curves[b]);
            if (first || u > best.rate) {
                best = {grid.p[a], grid.gamma[b], u};
                first = false;
            }
        }
    }
    return best;
}

}  // namespace sicma

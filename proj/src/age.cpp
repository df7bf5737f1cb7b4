#include "sicma/age.hpp"

#include <stdexcept>

namespace sicma {

double age_area(double origin, double t0, double t1) {
    const double a0 = t0 - origin;
    const double a1 = t1 - origin;
    // trapezoid of a linear function is exact
    return 0.5 * (a0 + a1) * (t1 - t0);
}

double AgeTracker::flush(double t) {
    double area = age_area(origin_, mark_, t);
    mark_ = t;
    return area;
}

double AgeTracker::deliver(double t, double gen_time) {
    double area = flush(t);
    if (gen_time > origin_) origin_ = gen_time;
    return area;
}

AoiSummary measure_aoi(std::span<const Delivery> deliveries, double initial_origin, double start, double end) {
    if (!(end > start)) throw std::invalid_argument("measure_aoi: empty window");
    AgeTracker tracker(initial_origin, start);
    double area = 0.0;
    bool any = false;
    for (const auto& d : deliveries) {
        if (d.time < start || d.time > end) continue;
        area += tracker.deliver(d.time, d.gen_time);
        any = true;
    }
    area += tracker.flush(end);
    return {area / (end - start), !any};
}

AoiSummary measure_aoi(std::span<const std::vector<Delivery>> per_node, std::span<const double> initial_origins,
                       double start, double end) {
    if (per_node.size() != initial_origins.size() || per_node.empty())
        throw std::invalid_argument("measure_aoi: one initial origin per node required");
    AoiSummary total;
    for (std::size_t i = 0; i < per_node.size(); ++i) {
        auto s = measure_aoi(per_node[i], initial_origins[i], start, end);
        total.mean += s.mean;
        total.censored = total.censored || s.censored;
    }
    total.mean /= static_cast<double>(per_node.size());
    return total;
}

}  // namespace sicma

#pragma once

#include <span>
#include <vector>

namespace sicma {

// Sawtooth age of one node's data at the collector: age(t) = t - origin,
// where origin is the generation time of the newest delivered update.
// Areas are integrated exactly between updates.
class AgeTracker {
public:
    explicit AgeTracker(double origin = 0.0, double now = 0.0) : origin_(origin), mark_(now) {}

    /// Area under age(t) on [mark, t]; moves the mark to t.
    double flush(double t);

    /// Delivery at time t of a message generated at gen_time. Returns the
    /// area accumulated up to t. Stale updates leave the origin untouched.
    double deliver(double t, double gen_time);

    double age_at(double t) const { return t - origin_; }
    double origin() const { return origin_; }

private:
    double origin_;
    double mark_;
};

/// Integral of (t - origin) over [t0, t1].
double age_area(double origin, double t0, double t1);

struct Delivery {
    double time = 0.0;       // when the update reached the collector
    double gen_time = 0.0;   // when it was generated
};

struct AoiSummary {
    double mean = 0.0;
    bool censored = false;   // at least one node had no delivery inside the window
};

// Time-average age over [start, end] for one node, given its deliveries in
// time order and the origin in force at `start`.
AoiSummary measure_aoi(std::span<const Delivery> deliveries, double initial_origin, double start, double end);

/// Average over nodes of measure_aoi; censored if any node is.
AoiSummary measure_aoi(std::span<const std::vector<Delivery>> per_node, std::span<const double> initial_origins,
                       double start, double end);

}  // namespace sicma

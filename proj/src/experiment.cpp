#include "sicma/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "sicma/analytic_fixed.hpp"
#include "sicma/parallel.hpp"
#include "sicma/policy.hpp"

namespace sicma {

std::vector<double> log_grid(double lo, double hi, int points) {
    if (!(lo > 0.0) || !(hi > lo) || points < 2) throw std::invalid_argument("log_grid: need 0 < lo < hi and >= 2 points");
    std::vector<double> g(static_cast<std::size_t>(points));
    const double a = std::log10(lo), b = std::log10(hi);
    for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = std::pow(10.0, a + (b - a) * i / (points - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

std::vector<double> parse_s_grid(const std::string& text) {
    auto number = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad S grid '" + text + "'");
        }
        if (used != s.size()) throw std::invalid_argument("bad S grid '" + text + "'");
        return v;
    };
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream in(text);
        std::string p;
        while (std::getline(in, p, ':')) parts.push_back(p);
        if (parts.size() != 3) throw std::invalid_argument("S grid range must be lo:hi:points");
        double pts = number(parts[2]);
        if (pts != std::floor(pts)) throw std::invalid_argument("S grid point count must be an integer");
        return log_grid(number(parts[0]), number(parts[1]), static_cast<int>(pts));
    }
    std::vector<double> out;
    std::stringstream in(text);
    std::string p;
    while (std::getline(in, p, ',')) out.push_back(number(p));
    return out;
}

void SweepSpec::validate() const {
    if (s_grid.empty()) throw std::invalid_argument("sweep: empty S grid");
    for (std::size_t i = 0; i < s_grid.size(); ++i) {
        if (!(s_grid[i] > 0.0)) throw std::invalid_argument("sweep: S values must be positive");
        if (i > 0 && !(s_grid[i] > s_grid[i - 1])) throw std::invalid_argument("sweep: S grid must be strictly increasing");
    }
    if (schemes.empty() && !analytic) throw std::invalid_argument("sweep: nothing to compute");
    if (replications < 1) throw std::invalid_argument("sweep: replications must be >= 1");
    if (!(min_slots >= 1.0)) throw std::invalid_argument("sweep: min_slots must be >= 1");
    if (mh_samples < 1) throw std::invalid_argument("sweep: m_h samples must be >= 1");
    if (horizon_s && !(*horizon_s > 0.0)) throw std::invalid_argument("sweep: horizon must be positive");
    if (warmup_s && horizon_s && !(*warmup_s < *horizon_s))
        throw std::invalid_argument("sweep: warmup must be shorter than the horizon");
}

std::uint64_t point_seed(std::uint64_t seed_base, Scheme scheme, std::size_t point) {
    auto mix = [](std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    };
    std::uint64_t s = mix(seed_base);
    s = mix(s ^ (scheme == Scheme::fixed ? 0x1ULL : 0x2ULL));
    return mix(s ^ static_cast<std::uint64_t>(point));
}

std::string config_hash(const SystemConfig& cfg, const SweepSpec& spec) {
    std::ostringstream text;
    text << format_config(cfg);
    text << std::setprecision(17);
    for (double s : spec.s_grid) text << s << ' ';
    for (Scheme s : spec.schemes) text << to_string(s) << ' ';
    text << spec.analytic << ' ' << spec.replications << ' ' << spec.min_slots << ' ' << spec.warmup_fraction << ' '
         << spec.horizon_s.value_or(-1.0) << ' ' << spec.warmup_s.value_or(-1.0) << ' ' << spec.mh_samples;
    // FNV-1a 64
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text.str()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

SimConfig point_config(const SweepSpec& spec, const SystemConfig& system, Scheme scheme, std::size_t point, double s) {
    SystemConfig sys = system;
    sys.lambda = 1.0 / s;
    sys = sys.validated();
    const std::uint64_t seed = point_seed(spec.seed_base, scheme, point);
    if (spec.horizon_s) {
        SimConfig cfg;
        cfg.scheme = scheme;
        cfg.system = sys;
        cfg.seed = seed;
        cfg.horizon_s = *spec.horizon_s;
        cfg.warmup_s = spec.warmup_s.value_or(spec.warmup_fraction * *spec.horizon_s);
        return cfg;
    }
    SimConfig cfg = make_sim_config(sys, scheme, std::ceil(spec.min_slots / spec.replications), seed, spec.warmup_fraction);
    if (spec.warmup_s) {
        if (!(*spec.warmup_s < cfg.horizon_s)) throw std::invalid_argument("sweep: warmup exceeds the derived horizon");
        cfg.warmup_s = *spec.warmup_s;
    }
    return cfg;
}

SweepRow analytic_row(const SystemConfig& system, double s, const std::vector<double>& mh) {
    SystemConfig sys = system;
    sys.lambda = 1.0 / s;
    FixedMetrics fm = fixed_metrics(sys.validated(), mh);
    SweepRow r;
    r.scheme = "fixed";
    r.source = "analytic";
    r.s_seconds = s;
    r.pdr = fm.p_s;
    r.mean_access_delay_s = fm.ed;
    r.throughput_bps = fm.theta_bps;
    r.normalized_throughput = fm.theta_norm;
    r.mean_aoi_s = fm.ea;
    r.cbr = fm.cbr;
    // delivered per generated message
    r.delivery_ratio = fm.theta_norm;
    return r;
}

SweepRow sim_row(Scheme scheme, double s, const SimMetrics& m) {
    SweepRow r;
    r.scheme = std::string(to_string(scheme));
    r.source = "sim";
    r.s_seconds = s;
    r.pdr = m.pdr;
    r.pdr_stderr = m.pdr_se;
    r.mean_access_delay_s = m.delay_s;
    r.delay_stderr = m.delay_se;
    r.throughput_bps = m.throughput_bps;
    r.thr_stderr = m.throughput_se;
    r.normalized_throughput = m.norm_throughput;
    r.nthr_stderr = m.norm_throughput_se;
    r.mean_aoi_s = m.aoi_s;
    r.aoi_stderr = m.aoi_se;
    r.cbr = m.cbr;
    r.cbr_stderr = m.cbr_se;
    r.slots = m.slots;
    r.censored = m.aoi_censored;
    r.delivery_ratio = m.delivery_ratio;
    r.delivery_ratio_stderr = m.delivery_ratio_se;
    r.replications = m.replications;
    return r;
}

SweepResult compute_sweep(const SweepSpec& spec, const SystemConfig& system_in) {
    spec.validate();
    const SystemConfig system = system_in.validated();

    std::vector<double> mh;
    const bool want_analytic = spec.analytic;
    if (want_analytic) {
        const double gamma = fixed_params(system).gamma;
        MhTable table;
        if (spec.mh_cache && std::filesystem::exists(*spec.mh_cache)) table = MhTable::load(*spec.mh_cache);
        int sampled = fill_mh(table, system.n, gamma, system.epsilon, spec.mh_samples, spec.seed_base);
        if (spec.mh_cache && sampled > 0) table.save(*spec.mh_cache);
        mh = table.curve(system.n, gamma, system.epsilon);
    }

    struct Job {
        Scheme scheme;
        std::size_t point;
    };
    std::vector<Job> jobs;
    for (std::size_t i = 0; i < spec.s_grid.size(); ++i)
        for (Scheme s : spec.schemes) jobs.push_back({s, i});
    std::vector<SimMetrics> results(jobs.size());
    parallel_for(jobs.size(), spec.jobs, [&](std::size_t j) {
        const Job& job = jobs[j];
        SimConfig cfg = point_config(spec, system, job.scheme, job.point, spec.s_grid[job.point]);
        results[j] = replicate(cfg, spec.replications, 1);
    });

    SweepResult out;
    std::size_t j = 0;
    for (std::size_t i = 0; i < spec.s_grid.size(); ++i) {
        const double s = spec.s_grid[i];
        for (Scheme sc : spec.schemes) {
            if (sc == Scheme::fixed && want_analytic) out.rows.push_back(analytic_row(system, s, mh));
            out.rows.push_back(sim_row(sc, s, results[j++]));
        }
        bool has_fixed = false;
        for (Scheme sc : spec.schemes) has_fixed = has_fixed || sc == Scheme::fixed;
        if (want_analytic && !has_fixed) out.rows.push_back(analytic_row(system, s, mh));
    }

    out.metadata = {
        std::string("sicma sweep, tool_version=") + kToolVersion,
        "config_hash=" + config_hash(system, spec),
        "seed_base=" + std::to_string(spec.seed_base),
        "replications=" + std::to_string(spec.replications),
        "n=" + std::to_string(system.n) + " L_bits=" + std::to_string(system.packet_bits) +
            " W_hz=" + format_real(system.bandwidth_hz) + " epsilon=" + format_real(system.epsilon) +
            " gamma_max=" + format_real(system.gamma_max) + " k_c=" + std::to_string(system.k_c) +
            " a_gamma=" + format_real(system.a_gamma) + " b_gamma=" + format_real(system.b_gamma),
        "units: S_seconds and delays in s; throughput_bps in bit/s per node (figures plot kbit/s)",
    };
    return out;
}

SweepResult sweep(const SweepSpec& spec, const SystemConfig& system) {
    spec.validate();
    std::error_code ec;
    std::filesystem::create_directories(spec.out_dir, ec);
    if (ec || !std::filesystem::is_directory(spec.out_dir))
        throw std::runtime_error("cannot create output directory " + spec.out_dir.string());

    SweepResult res = compute_sweep(spec, system);

    auto write = [&](const std::filesystem::path& path, auto&& body) {
        std::ofstream out(path, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        body(out);
        out.flush();
        if (!out) throw std::runtime_error("failed writing " + path.string());
        res.files.push_back(path);
    };
    write(spec.out_dir / "sweep.csv", [&](std::ostream& o) { write_sweep_csv(o, res.metadata, res.rows); });
    for (const auto& fig : figure_files())
        write(spec.out_dir / fig.file_name, [&](std::ostream& o) { write_figure_csv(o, res.metadata, fig, res.rows); });
    return res;
}

namespace {

struct MetricField {
    const char* name;
    double SweepRow::*value;
    double SweepRow::*std_error;
};

constexpr MetricField kCompared[] = {
    {"pdr", &SweepRow::pdr, &SweepRow::pdr_stderr},
    {"mean_access_delay_s", &SweepRow::mean_access_delay_s, &SweepRow::delay_stderr},
    {"throughput_bps", &SweepRow::throughput_bps, &SweepRow::thr_stderr},
    {"normalized_throughput", &SweepRow::normalized_throughput, &SweepRow::nthr_stderr},
    {"mean_aoi_s", &SweepRow::mean_aoi_s, &SweepRow::aoi_stderr},
    {"cbr", &SweepRow::cbr, &SweepRow::cbr_stderr},
};

}  // namespace

CompareReport compare(const std::vector<SweepRow>& analytic_rows, const std::vector<SweepRow>& sim_rows,
                      double z_limit) {
    CompareReport report;
    report.z_limit = z_limit;
    std::map<double, const SweepRow*> analytic_by_s;
    for (const auto& r : analytic_rows) analytic_by_s[r.s_seconds] = &r;
    for (const auto& sim : sim_rows) {
        auto it = analytic_by_s.find(sim.s_seconds);
        if (it == analytic_by_s.end()) continue;
        const SweepRow& an = *it->second;
        for (const auto& f : kCompared) {
            CompareLine line;
            line.metric = f.name;
            line.s_seconds = sim.s_seconds;
            line.analytic = an.*f.value;
            line.simulated = sim.*f.value;
            line.std_error = sim.*f.std_error;
            const double diff = line.simulated - line.analytic;
            if (std::string(f.name) == "mean_aoi_s" && sim.censored) {
                line.status = "SKIP";
                report.lines.push_back(line);
                continue;
            }
            // A busy fraction near 0 or 1 can come out exactly 0 or 1 with zero spread; the
            // independent-slot binomial error under the analytic value bounds the noise from below.
            double se = line.std_error;
            if (std::string(f.name) == "cbr" && sim.slots > 0) {
                const double p0 = std::clamp(line.analytic, 0.0, 1.0);
                se = std::max(se, std::sqrt(p0 * (1.0 - p0) / static_cast<double>(sim.slots)));
                line.std_error = se;
            }
            if (std::abs(diff) <= 1e-9 * std::max(1.0, std::abs(line.analytic))) line.z = 0.0;
            else if (se > 0.0) line.z = diff / se;
            else line.z = std::copysign(std::numeric_limits<double>::infinity(), diff);
            line.status = std::abs(line.z) <= z_limit ? "PASS" : "FAIL";
            if (line.status == "FAIL") report.pass = false;
            report.lines.push_back(line);
        }
    }
    if (report.lines.empty()) report.pass = false;
    return report;
}

CompareReport compare_sweep(const std::vector<SweepRow>& rows, double z_limit) {
    std::vector<SweepRow> analytic, sim;
    for (const auto& r : rows) {
        if (r.scheme != "fixed") continue;
        (r.source == "analytic" ? analytic : sim).push_back(r);
    }
    return compare(analytic, sim, z_limit);
}

void write_compare_csv(std::ostream& out, const CompareReport& report) {
    out << "metric,S_seconds,analytic,sim,sim_stderr,z,status\n";
    for (const auto& l : report.lines)
        out << l.metric << ',' << format_real(l.s_seconds) << ',' << format_real(l.analytic) << ','
            << format_real(l.simulated) << ',' << format_real(l.std_error) << ',' << format_real(l.z) << ','
            << l.status << '\n';
}

void print_compare_summary(std::ostream& out, const CompareReport& report) {
    int pass = 0, fail = 0, skip = 0;
    for (const auto& l : report.lines) {
        if (l.status == "PASS") ++pass;
        else if (l.status == "FAIL") ++fail;
        else ++skip;
    }
    out << "fixed scheme analytic vs simulation, |z| <= " << report.z_limit << ": " << pass << " pass, " << fail
        << " fail, " << skip << " skipped\n";
    for (const auto& l : report.lines)
        if (l.status == "FAIL")
            out << "  FAIL " << l.metric << " at S=" << format_real(l.s_seconds) << " s: analytic "
                << format_real(l.analytic) << ", sim " << format_real(l.simulated) << " +- "
                << format_real(l.std_error) << " (z=" << format_real(l.z) << ")\n";
    if (report.lines.empty()) out << "  no comparable rows\n";
    out << (report.pass ? "PASS" : "FAIL") << '\n';
}

int mh_precompute(const SystemConfig& system_in, const std::filesystem::path& path, long samples, std::uint64_t seed,
                  int jobs) {
    const SystemConfig system = system_in.validated();
    MhTable table;
    if (std::filesystem::exists(path)) table = MhTable::load(path);

    std::vector<double> gammas{fixed_params(system).gamma};
    for (int k = system.k_c; k <= system.n; ++k) {
        double g = adaptive_params(k, system).gamma;
        bool dup = false;
        for (double x : gammas) dup = dup || quantize_key(x) == quantize_key(g);
        if (!dup) gammas.push_back(g);
    }

    // Each threshold fills its own table; merge in a fixed order afterwards.
    std::vector<MhTable> parts(gammas.size());
    std::vector<int> counts(gammas.size(), 0);
    parallel_for(gammas.size(), jobs, [&](std::size_t i) {
        MhTable local;
        for (int h = 0; h <= system.n; ++h)
            if (const MhEntry* e = table.find(h, gammas[i], system.epsilon)) local.insert(*e);
        counts[i] = fill_mh(local, system.n, gammas[i], system.epsilon, samples, seed);
        parts[i] = std::move(local);
    });
    int sampled = 0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        sampled += counts[i];
        for (const auto& [key, e] : parts[i].entries()) table.insert(e);
    }
    if (sampled > 0 || !std::filesystem::exists(path)) table.save(path);
    return sampled;
}

}  // namespace sicma

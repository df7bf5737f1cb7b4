#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sicma/experiment.hpp"
#include "sicma/policy.hpp"

using namespace sicma;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / "sicma_test_experiment" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

SweepSpec small_spec(const fs::path& out) {
    SweepSpec spec;
    spec.s_grid = {0.002, 0.05, 0.8};
    spec.replications = 3;
    spec.min_slots = 900;
    spec.mh_samples = 2000;
    spec.out_dir = out;
    return spec;
}

}  // namespace

TEST_CASE("S grids") {
    auto g = log_grid(1e-3, 1.0, 40);
    REQUIRE(g.size() == 40);
    CHECK(g.front() == 1e-3);
    CHECK(g.back() == 1.0);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
    CHECK(g[13] == doctest::Approx(0.01));
    CHECK(parse_s_grid("0.001:1:4") == log_grid(1e-3, 1.0, 4));
    CHECK(parse_s_grid("0.001,0.01,0.5") == std::vector<double>{0.001, 0.01, 0.5});
    CHECK_THROWS(parse_s_grid("1:2"));
    CHECK_THROWS(parse_s_grid("0.1,abc"));
    CHECK_THROWS(parse_s_grid("0.001:1:2.5"));
    CHECK_THROWS(log_grid(0.0, 1.0, 5));
    SweepSpec def;
    CHECK(def.s_grid == log_grid(1e-3, 1.0, 40));
}

TEST_CASE("sweep settings are validated") {
    SweepSpec spec;
    spec.s_grid = {0.1, 0.01};
    CHECK_THROWS(spec.validate());
    spec.s_grid = {-0.1};
    CHECK_THROWS(spec.validate());
    spec.s_grid = {};
    CHECK_THROWS(spec.validate());
    spec = SweepSpec{};
    spec.replications = 0;
    CHECK_THROWS(spec.validate());
    spec = SweepSpec{};
    spec.horizon_s = 1.0;
    spec.warmup_s = 2.0;
    CHECK_THROWS(spec.validate());
}

TEST_CASE("seeds and config hash") {
    CHECK(point_seed(1, Scheme::fixed, 0) != point_seed(1, Scheme::adaptive, 0));
    CHECK(point_seed(1, Scheme::fixed, 0) != point_seed(1, Scheme::fixed, 1));
    CHECK(point_seed(1, Scheme::fixed, 0) != point_seed(2, Scheme::fixed, 0));
    CHECK(point_seed(5, Scheme::fixed, 3) == point_seed(5, Scheme::fixed, 3));
    SweepSpec spec;
    SystemConfig cfg = default_config();
    const std::string h = config_hash(cfg, spec);
    CHECK(h.size() == 16);
    CHECK(config_hash(cfg, spec) == h);
    cfg.n = 49;
    CHECK(config_hash(cfg, spec) != h);
}

TEST_CASE("rows per grid point") {
    SweepSpec spec = small_spec(scratch("rows"));
    const SystemConfig sys = default_config();

    SweepResult both = compute_sweep(spec, sys);
    CHECK(both.rows.size() == 3 * 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(both.rows[3 * i].source == "analytic");
        CHECK(both.rows[3 * i + 1].scheme == "fixed");
        CHECK(both.rows[3 * i + 2].scheme == "adaptive");
        CHECK(both.rows[3 * i].s_seconds == spec.s_grid[i]);
    }

    spec.schemes = {Scheme::fixed};
    SweepResult fixed = compute_sweep(spec, sys);
    CHECK(fixed.rows.size() == 3 * 2);
    for (const auto& r : fixed.rows) {
        CHECK(r.scheme == "fixed");
        if (r.source == "analytic") {
            CHECK(r.pdr_stderr == 0.0);
            CHECK(r.delay_stderr == 0.0);
            CHECK(r.thr_stderr == 0.0);
            CHECK(r.nthr_stderr == 0.0);
            CHECK(r.aoi_stderr == 0.0);
            CHECK(r.slots == 0);
        } else {
            CHECK(r.slots >= 900);
            CHECK(r.replications == 3);
        }
    }

    spec.analytic = false;
    spec.schemes = {Scheme::adaptive};
    CHECK(compute_sweep(spec, sys).rows.size() == 3);
}

TEST_CASE("sweep writes the table and five figure extracts") {
    const fs::path out = scratch("files");
    SweepSpec spec = small_spec(out);
    SweepResult res = sweep(spec, default_config());
    REQUIRE(res.files.size() == 6);
    CHECK(fs::exists(out / "sweep.csv"));
    for (const auto& f : figure_files()) CHECK(fs::exists(out / f.file_name));
    CHECK(figure_files().size() == 5);

    std::vector<std::string> meta;
    auto rows = read_sweep_csv(out / "sweep.csv", &meta);
    REQUIRE(rows.size() == res.rows.size());
    bool has_hash = false, has_seed = false, has_version = false;
    for (const auto& m : meta) {
        has_hash = has_hash || m.rfind("config_hash=", 0) == 0;
        has_seed = has_seed || m.rfind("seed_base=", 0) == 0;
        has_version = has_version || m.find("tool_version=") != std::string::npos;
    }
    CHECK(has_hash);
    CHECK(has_seed);
    CHECK(has_version);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].scheme == res.rows[i].scheme);
        CHECK(rows[i].pdr == doctest::Approx(res.rows[i].pdr).epsilon(1e-11));
        CHECK(rows[i].mean_aoi_s == doctest::Approx(res.rows[i].mean_aoi_s).epsilon(1e-11));
        CHECK(rows[i].slots == res.rows[i].slots);
    }

    // header of the main table: fixed prefix, appended columns after it
    std::istringstream text(slurp(out / "sweep.csv"));
    std::string line;
    while (std::getline(text, line) && line[0] == '#') {}
    CHECK(line.rfind("scheme,source,S_seconds,pdr,pdr_stderr,mean_access_delay_s,delay_stderr,throughput_bps,"
                     "thr_stderr,normalized_throughput,nthr_stderr,mean_aoi_s,aoi_stderr,cbr,slots,censored_flag",
                     0) == 0);

    std::istringstream fig(slurp(out / "fig3_throughput.csv"));
    bool unit_noted = false;
    while (std::getline(fig, line) && line[0] == '#') unit_noted = unit_noted || line.find("kbit/s") != std::string::npos;
    CHECK(unit_noted);
    CHECK(line == "scheme,source,S_seconds,throughput_bps,thr_stderr,slots,censored_flag");
}

TEST_CASE("reruns are byte-identical regardless of parallelism") {
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    SweepSpec spec = small_spec(a);
    spec.jobs = 1;
    sweep(spec, default_config());
    spec.out_dir = b;
    spec.jobs = 3;
    sweep(spec, default_config());
    CHECK(slurp(a / "sweep.csv") == slurp(b / "sweep.csv"));
    for (const auto& f : figure_files()) CHECK(slurp(a / f.file_name) == slurp(b / f.file_name));
}

TEST_CASE("unwritable output") {
    SweepSpec spec = small_spec("/proc/sicma_cannot_write_here");
    CHECK_THROWS(sweep(spec, default_config()));
}

TEST_CASE("csv reader rejects foreign files") {
    const fs::path dir = scratch("csv");
    std::ofstream(dir / "bad.csv") << "a,b,c\n1,2,3\n";
    CHECK_THROWS(read_sweep_csv(dir / "bad.csv"));
    std::ofstream(dir / "empty.csv") << "# only metadata\n";
    CHECK_THROWS(read_sweep_csv(dir / "empty.csv"));
    CHECK_THROWS(read_sweep_csv(dir / "missing.csv"));
    CHECK(format_real(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_real(0.25) == "0.25");
}

TEST_CASE("compare") {
    SweepRow an;
    an.scheme = "fixed";
    an.source = "analytic";
    an.s_seconds = 0.01;
    an.pdr = 0.9;
    an.mean_access_delay_s = 0.07;
    an.throughput_bps = 30000;
    an.normalized_throughput = 0.08;
    an.mean_aoi_s = 0.14;
    an.cbr = 0.99;
    SweepRow sim = an;
    sim.source = "sim";
    sim.pdr_stderr = 0.001;
    sim.delay_stderr = 0.0001;
    sim.thr_stderr = 10;
    sim.nthr_stderr = 1e-4;
    sim.aoi_stderr = 1e-3;
    sim.cbr_stderr = 1e-4;
    sim.slots = 100000;

    CompareReport same = compare({an}, {sim});
    CHECK(same.pass);
    CHECK(same.lines.size() == 6);
    for (const auto& l : same.lines) CHECK(l.z == 0.0);

    SweepRow bad = sim;
    bad.mean_access_delay_s += 0.01;
    CompareReport broken = compare({an}, {bad});
    CHECK_FALSE(broken.pass);
    int fails = 0;
    for (const auto& l : broken.lines) {
        if (l.status != "FAIL") continue;
        ++fails;
        CHECK(l.metric == "mean_access_delay_s");
        CHECK(l.s_seconds == 0.01);
        CHECK(l.z == doctest::Approx(100.0));
    }
    CHECK(fails == 1);
    std::ostringstream summary;
    print_compare_summary(summary, broken);
    CHECK(summary.str().find("mean_access_delay_s") != std::string::npos);

    // censored points skip the age comparison
    SweepRow censored = sim;
    censored.censored = true;
    censored.mean_aoi_s *= 2;
    CompareReport skipped = compare({an}, {censored});
    CHECK(skipped.pass);

    // a busy ratio that is exactly 1 over a finite run is not evidence against 1 - 1e-8
    SweepRow saturated_an = an, saturated_sim = sim;
    saturated_an.cbr = 1.0 - 1e-8;
    saturated_sim.cbr = 1.0;
    saturated_sim.cbr_stderr = 0.0;
    CHECK(compare({saturated_an}, {saturated_sim}).pass);
    saturated_sim.cbr = 0.98;
    CHECK_FALSE(compare({saturated_an}, {saturated_sim}).pass);

    CHECK_FALSE(compare({}, {sim}).pass);

    std::ostringstream csv;
    write_compare_csv(csv, broken);
    CHECK(csv.str().rfind("metric,S_seconds,analytic,sim,sim_stderr,z,status\n", 0) == 0);
}

TEST_CASE("m_h precompute is idempotent") {
    const fs::path dir = scratch("mh");
    SystemConfig sys = default_config();
    sys.n = 8;
    sys.k_c = 3;
    const fs::path path = dir / "mh.txt";
    const int first = mh_precompute(sys, path, 500, 1);
    // gamma* coincides with gamma_8, so thresholds are k = 3..8, each h = 1..8
    CHECK(first == 6 * 8);
    const std::string saved = slurp(path);
    CHECK(mh_precompute(sys, path, 500, 1) == 0);
    CHECK(slurp(path) == saved);
    MhTable t = MhTable::load(path);
    CHECK(t.covers(sys.n, fixed_params(sys).gamma, sys.epsilon));
    for (int k = sys.k_c; k <= sys.n; ++k) {
        const double g = adaptive_params(k, sys).gamma;
        CHECK(t.covers(sys.n, g, sys.epsilon));
        const MhEntry* m1 = t.find(1, g, sys.epsilon);
        CHECK(std::abs(m1->estimate - 0.9) <= 4 * m1->std_error);
    }
}

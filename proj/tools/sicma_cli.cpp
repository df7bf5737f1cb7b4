// Command-line front end: sweep, compare, mh, single.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "sicma/analytic_fixed.hpp"
#include "sicma/config.hpp"
#include "sicma/experiment.hpp"
#include "sicma/mh_table.hpp"
#include "sicma/policy.hpp"
#include "sicma/simulator.hpp"

namespace {

std::vector<sicma::Scheme> schemes_from(const std::string& s) {
    if (s == "both") return {sicma::Scheme::fixed, sicma::Scheme::adaptive};
    return {sicma::parse_scheme(s)};
}

sicma::SystemConfig system_from(const std::string& path) {
    return path.empty() ? sicma::default_config() : sicma::load_config(path);
}

void print_metrics(const sicma::SimMetrics& m) {
    auto row = [](const char* name, double v, double se) {
        std::printf("  %-24s %.6g  (stderr %.3g)\n", name, v, se);
    };
    row("pdr", m.pdr, m.pdr_se);
    row("delivery_ratio", m.delivery_ratio, m.delivery_ratio_se);
    row("mean_access_delay_s", m.delay_s, m.delay_se);
    row("throughput_bps", m.throughput_bps, m.throughput_se);
    row("normalized_throughput", m.norm_throughput, m.norm_throughput_se);
    row("mean_aoi_s", m.aoi_s, m.aoi_se);
    row("cbr", m.cbr, m.cbr_se);
    std::printf("  slots %ld  transmissions %ld  successes %ld  window %.6g s  max backlog %d%s\n", m.slots,
                m.transmissions, m.successes, m.window_s, m.max_backlog, m.aoi_censored ? "  [AoI censored]" : "");
    const auto& l = m.ledger;
    std::printf("  messages: generated %ld = delivered %ld + failed %ld + dropped %ld + overwritten %ld + held %ld\n",
                l.generated, l.delivered, l.decode_failures, l.dropped_engaged, l.overwritten, l.in_flight);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SIC random access simulator and fixed-scheme analytic model"};
    app.require_subcommand(1);

    std::string config_path;
    std::string scheme = "both";
    std::string s_grid;
    int reps = 20;
    std::uint64_t seed = 1;
    std::string out = "results";
    std::optional<double> horizon, warmup;
    double min_slots = 1e5;
    long mh_samples = 100000;
    std::string mh_cache;
    int jobs = 1;

    auto* sweep_cmd = app.add_subcommand("sweep", "sweep S = 1/lambda and write figure CSVs");
    sweep_cmd->add_option("--config", config_path, "system config file");
    sweep_cmd->add_option("--scheme", scheme, "fixed | adaptive | both")->check(CLI::IsMember({"fixed", "adaptive", "both"}));
    sweep_cmd->add_option("--s-grid", s_grid, "lo:hi:points (log-spaced) or comma list, seconds");
    sweep_cmd->add_option("--reps", reps, "replications per point");
    sweep_cmd->add_option("--seed", seed, "seed base");
    sweep_cmd->add_option("--out", out, "output directory");
    sweep_cmd->add_option("--horizon", horizon, "simulated seconds per replication (default: sized by --min-slots)");
    sweep_cmd->add_option("--warmup", warmup, "discarded seconds per replication (default: 10% of horizon)");
    sweep_cmd->add_option("--min-slots", min_slots, "post-warmup slots per point across replications");
    sweep_cmd->add_option("--mh-samples", mh_samples, "samples per m_h entry for the analytic rows");
    sweep_cmd->add_option("--mh-cache", mh_cache, "m_h table file to reuse and extend");
    sweep_cmd->add_option("--jobs", jobs, "parallel jobs");
    bool no_analytic = false;
    sweep_cmd->add_flag("--no-analytic", no_analytic, "skip the closed-form rows");

    std::string compare_in = "results";
    double z_limit = 3.0;
    auto* compare_cmd = app.add_subcommand("compare", "check fixed-scheme simulation against the closed form");
    compare_cmd->add_option("--in", compare_in, "sweep directory or sweep.csv");
    compare_cmd->add_option("--z", z_limit, "largest accepted |z|");
    compare_cmd->add_option("--out", out, "where to write compare_report.csv (default: next to the input)");

    std::string mh_out = "mh_table.txt";
    auto* mh_cmd = app.add_subcommand("mh", "precompute m_h tables for gamma* and every adaptive gamma_k");
    mh_cmd->add_option("--config", config_path, "system config file");
    mh_cmd->add_option("--out", mh_out, "table file (merged if it exists)");
    mh_cmd->add_option("--samples", mh_samples, "samples per entry");
    mh_cmd->add_option("--seed", seed, "seed base");
    mh_cmd->add_option("--jobs", jobs, "parallel jobs");

    double s_value = 0.01;
    std::string single_scheme = "fixed";
    int single_reps = 1;
    auto* single_cmd = app.add_subcommand("single", "simulate one scenario and print every metric");
    single_cmd->add_option("--config", config_path, "system config file");
    single_cmd->add_option("--scheme", single_scheme, "fixed | adaptive")->check(CLI::IsMember({"fixed", "adaptive"}));
    single_cmd->add_option("--s", s_value, "mean generation time S = 1/lambda, seconds")->required();
    single_cmd->add_option("--reps", single_reps, "replications");
    single_cmd->add_option("--seed", seed, "seed");
    single_cmd->add_option("--horizon", horizon, "simulated seconds");
    single_cmd->add_option("--warmup", warmup, "discarded seconds");
    single_cmd->add_option("--min-slots", min_slots, "post-warmup slots when no horizon is given");
    single_cmd->add_option("--mh-samples", mh_samples, "samples per m_h entry for the fixed closed form");
    single_cmd->add_option("--jobs", jobs, "parallel jobs");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sweep_cmd) {
            sicma::SweepSpec spec;
            if (!s_grid.empty()) spec.s_grid = sicma::parse_s_grid(s_grid);
            spec.schemes = schemes_from(scheme);
            spec.analytic = !no_analytic;
            spec.replications = reps;
            spec.seed_base = seed;
            spec.out_dir = out;
            spec.horizon_s = horizon;
            spec.warmup_s = warmup;
            spec.min_slots = min_slots;
            spec.mh_samples = mh_samples;
            if (!mh_cache.empty()) spec.mh_cache = mh_cache;
            spec.jobs = jobs;
            auto res = sicma::sweep(spec, system_from(config_path));
            for (const auto& f : res.files) std::cout << f.string() << '\n';
            return 0;
        }
        if (*compare_cmd) {
            std::filesystem::path in = compare_in;
            if (std::filesystem::is_directory(in)) in /= "sweep.csv";
            auto rows = sicma::read_sweep_csv(in);
            auto report = sicma::compare_sweep(rows, z_limit);
            std::filesystem::path report_path =
                compare_cmd->count("--out") ? std::filesystem::path(out) : in.parent_path();
            if (report_path.empty()) report_path = ".";
            std::filesystem::create_directories(report_path);
            std::ofstream csv(report_path / "compare_report.csv");
            if (!csv) throw std::runtime_error("cannot write compare report");
            sicma::write_compare_csv(csv, report);
            sicma::print_compare_summary(std::cout, report);
            return report.pass ? 0 : 1;
        }
        if (*mh_cmd) {
            int sampled = sicma::mh_precompute(system_from(config_path), mh_out, mh_samples, seed, jobs);
            std::cout << "sampled " << sampled << " entries into " << mh_out << '\n';
            return 0;
        }
        if (*single_cmd) {
            sicma::SystemConfig sys = system_from(config_path);
            sys.lambda = 1.0 / s_value;
            sys = sys.validated();
            const auto sch = sicma::parse_scheme(single_scheme);
            sicma::SimConfig cfg = sicma::make_sim_config(sys, sch, min_slots / single_reps, seed);
            if (horizon) {
                cfg.horizon_s = *horizon;
                cfg.warmup_s = 0.1 * *horizon;
            }
            if (warmup) cfg.warmup_s = *warmup;
            std::printf("%s scheme, S = %g s, horizon %g s, warmup %g s, %d replication(s)\n", single_scheme.c_str(),
                        s_value, cfg.horizon_s, cfg.warmup_s, single_reps);
            auto m = sicma::replicate(cfg, single_reps, jobs);
            print_metrics(m);
            if (sch == sicma::Scheme::fixed) {
                const double gamma = sicma::fixed_params(sys).gamma;
                auto table = sicma::mh_table(sys.n, gamma, sys.epsilon, mh_samples, seed);
                auto fm = sicma::fixed_metrics(sys, table.curve(sys.n, gamma, sys.epsilon));
                std::printf("closed form: P_s %.6g  E[D] %.6g s  Theta %.6g bit/s  Theta/lambda %.6g  E[A] %.6g s  CBR %.6g  b %.6g\n",
                            fm.p_s, fm.ed, fm.theta_bps, fm.theta_norm, fm.ea, fm.cbr, fm.b);
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

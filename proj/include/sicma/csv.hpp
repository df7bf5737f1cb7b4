#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace sicma {

// One row of the sweep results. Column order is fixed by kSweepColumns;
// new columns may only be appended.
struct SweepRow {
    std::string scheme;   // fixed | adaptive
    std::string source;   // sim | analytic
    double s_seconds = 0.0;
    double pdr = 0.0, pdr_stderr = 0.0;
    double mean_access_delay_s = 0.0, delay_stderr = 0.0;
    double throughput_bps = 0.0, thr_stderr = 0.0;
    double normalized_throughput = 0.0, nthr_stderr = 0.0;
    double mean_aoi_s = 0.0, aoi_stderr = 0.0;
    double cbr = 0.0;
    long slots = 0;
    bool censored = false;
    // appended columns
    double delivery_ratio = 0.0, delivery_ratio_stderr = 0.0;
    double cbr_stderr = 0.0;
    int replications = 0;
};

extern const std::vector<std::string> kSweepColumns;

std::string format_real(double v);

void write_sweep_csv(std::ostream& out, const std::vector<std::string>& metadata, const std::vector<SweepRow>& rows);

/// Reads a file written by write_sweep_csv. Metadata lines are returned in `metadata` when non-null.
std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path, std::vector<std::string>* metadata = nullptr);

struct FigureFile {
    std::string file_name;
    std::string metric;       // column in the sweep schema
    std::string stderr_column;
    std::string caption;
};

/// The five per-figure extracts: PDR, access delay, throughput, normalized throughput, AoI.
const std::vector<FigureFile>& figure_files();

void write_figure_csv(std::ostream& out, const std::vector<std::string>& metadata, const FigureFile& fig,
                      const std::vector<SweepRow>& rows);

double row_value(const SweepRow& row, const std::string& column);

}  // namespace sicma

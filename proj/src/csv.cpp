#include "sicma/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace sicma {

const std::vector<std::string> kSweepColumns = {
    "scheme",         "source",        "S_seconds",       "pdr",
    "pdr_stderr",     "mean_access_delay_s", "delay_stderr", "throughput_bps",
    "thr_stderr",     "normalized_throughput", "nthr_stderr", "mean_aoi_s",
    "aoi_stderr",     "cbr",           "slots",           "censored_flag",
    "delivery_ratio", "delivery_ratio_stderr", "cbr_stderr", "replications",
};

std::string format_real(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace {

double parse_real(const std::string& s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw std::runtime_error("not a number: '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

double row_value(const SweepRow& r, const std::string& c) {
    if (c == "S_seconds") return r.s_seconds;
    if (c == "pdr") return r.pdr;
    if (c == "pdr_stderr") return r.pdr_stderr;
    if (c == "mean_access_delay_s") return r.mean_access_delay_s;
    if (c == "delay_stderr") return r.delay_stderr;
    if (c == "throughput_bps") return r.throughput_bps;
    if (c == "thr_stderr") return r.thr_stderr;
    if (c == "normalized_throughput") return r.normalized_throughput;
    if (c == "nthr_stderr") return r.nthr_stderr;
    if (c == "mean_aoi_s") return r.mean_aoi_s;
    if (c == "aoi_stderr") return r.aoi_stderr;
    if (c == "cbr") return r.cbr;
    if (c == "cbr_stderr") return r.cbr_stderr;
    if (c == "slots") return static_cast<double>(r.slots);
    if (c == "delivery_ratio") return r.delivery_ratio;
    if (c == "delivery_ratio_stderr") return r.delivery_ratio_stderr;
    throw std::out_of_range("no numeric column '" + c + "'");
}

void write_sweep_csv(std::ostream& out, const std::vector<std::string>& metadata, const std::vector<SweepRow>& rows) {
    for (const auto& m : metadata) out << "# " << m << '\n';
    for (std::size_t i = 0; i < kSweepColumns.size(); ++i) out << (i ? "," : "") << kSweepColumns[i];
    out << '\n';
    for (const auto& r : rows) {
        out << r.scheme << ',' << r.source << ',' << format_real(r.s_seconds) << ',' << format_real(r.pdr) << ','
            << format_real(r.pdr_stderr) << ',' << format_real(r.mean_access_delay_s) << ','
            << format_real(r.delay_stderr) << ',' << format_real(r.throughput_bps) << ','
            << format_real(r.thr_stderr) << ',' << format_real(r.normalized_throughput) << ','
            << format_real(r.nthr_stderr) << ',' << format_real(r.mean_aoi_s) << ',' << format_real(r.aoi_stderr)
            << ',' << format_real(r.cbr) << ',' << r.slots << ',' << (r.censored ? 1 : 0) << ','
            << format_real(r.delivery_ratio) << ',' << format_real(r.delivery_ratio_stderr) << ','
            << format_real(r.cbr_stderr) << ',' << r.replications << '\n';
    }
}

std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path, std::vector<std::string>* metadata) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    std::vector<std::string> header;
    std::vector<SweepRow> rows;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (metadata) metadata->push_back(line.size() > 2 ? line.substr(2) : std::string());
            continue;
        }
        auto cells = split(line);
        if (header.empty()) {
            header = cells;
            // Known prefix must match; extra trailing columns are tolerated.
            if (header.size() < 16) throw std::runtime_error(path.string() + ": truncated header");
            for (std::size_t i = 0; i < std::min(header.size(), kSweepColumns.size()); ++i)
                if (header[i] != kSweepColumns[i])
                    throw std::runtime_error(path.string() + ": unexpected column '" + header[i] + "'");
            continue;
        }
        if (cells.size() != header.size())
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": wrong number of cells");
        SweepRow r;
        r.scheme = cells[0];
        r.source = cells[1];
        r.s_seconds = parse_real(cells[2]);
        r.pdr = parse_real(cells[3]);
        r.pdr_stderr = parse_real(cells[4]);
        r.mean_access_delay_s = parse_real(cells[5]);
        r.delay_stderr = parse_real(cells[6]);
        r.throughput_bps = parse_real(cells[7]);
        r.thr_stderr = parse_real(cells[8]);
        r.normalized_throughput = parse_real(cells[9]);
        r.nthr_stderr = parse_real(cells[10]);
        r.mean_aoi_s = parse_real(cells[11]);
        r.aoi_stderr = parse_real(cells[12]);
        r.cbr = parse_real(cells[13]);
        r.slots = std::stol(cells[14]);
        r.censored = cells[15] == "1";
        if (cells.size() > 16) r.delivery_ratio = parse_real(cells[16]);
        if (cells.size() > 17) r.delivery_ratio_stderr = parse_real(cells[17]);
        if (cells.size() > 18) r.cbr_stderr = parse_real(cells[18]);
        if (cells.size() > 19) r.replications = std::stoi(cells[19]);
        rows.push_back(r);
    }
    if (header.empty()) throw std::runtime_error(path.string() + ": no header line");
    return rows;
}

const std::vector<FigureFile>& figure_files() {
    static const std::vector<FigureFile> files = {
        {"fig1_pdr.csv", "pdr", "pdr_stderr", "Packet delivery ratio vs S"},
        {"fig2_access_delay.csv", "mean_access_delay_s", "delay_stderr", "Mean access delay (s) vs S"},
        {"fig3_throughput.csv", "throughput_bps", "thr_stderr",
         "Node throughput vs S; stored in bit/s, plotted in kbit/s"},
        {"fig4_normalized_throughput.csv", "normalized_throughput", "nthr_stderr", "Normalized throughput vs S"},
        {"fig5_aoi.csv", "mean_aoi_s", "aoi_stderr", "Mean AoI (s) vs S"},
    };
    return files;
}

void write_figure_csv(std::ostream& out, const std::vector<std::string>& metadata, const FigureFile& fig,
                      const std::vector<SweepRow>& rows) {
    for (const auto& m : metadata) out << "# " << m << '\n';
    out << "# figure: " << fig.caption << '\n';
    out << "scheme,source,S_seconds," << fig.metric << ',' << fig.stderr_column << ",slots,censored_flag\n";
    for (const auto& r : rows) {
        out << r.scheme << ',' << r.source << ',' << format_real(r.s_seconds) << ','
            << format_real(row_value(r, fig.metric)) << ',' << format_real(row_value(r, fig.stderr_column)) << ','
            << r.slots << ',' << (r.censored ? 1 : 0) << '\n';
    }
}

}  // namespace sicma

#include "sicma/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace sicma {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return out;
}

// Splits "500 B" / "500B" into number and unit.
std::pair<double, std::string> number_with_unit(std::string_view key, std::string_view value) {
    value = trim(value);
    std::size_t pos = 0;
    while (pos < value.size() &&
           (std::isdigit(static_cast<unsigned char>(value[pos])) || value[pos] == '.' ||
            value[pos] == '-' || value[pos] == '+' ||
            ((value[pos] == 'e' || value[pos] == 'E') && pos + 1 < value.size() &&
             (std::isdigit(static_cast<unsigned char>(value[pos + 1])) || value[pos + 1] == '-' ||
              value[pos + 1] == '+'))))
        ++pos;
    std::string num(value.substr(0, pos));
    std::string unit(trim(value.substr(pos)));
    if (num.empty()) throw std::invalid_argument("config: '" + std::string(key) + "' is not a number");
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(num, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: '" + std::string(key) + "' is not a number");
    }
    if (used != num.size()) throw std::invalid_argument("config: '" + std::string(key) + "' is not a number");
    return {v, unit};
}

double plain_number(std::string_view key, std::string_view value) {
    auto [v, unit] = number_with_unit(key, value);
    if (!unit.empty()) throw std::invalid_argument("config: unexpected unit '" + unit + "' on " + std::string(key));
    return v;
}

int plain_int(std::string_view key, std::string_view value) {
    double v = plain_number(key, value);
    if (v != std::floor(v) || std::abs(v) > 1e9)
        throw std::invalid_argument("config: '" + std::string(key) + "' must be an integer");
    return static_cast<int>(v);
}

}  // namespace

double outage_constant(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::domain_error("epsilon must lie in (0,1)");
    return -std::log1p(-epsilon);
}

double slot_time(double gamma, long packet_bits, double bandwidth_hz) {
    if (!(gamma > 0.0)) throw std::domain_error("slot_time: gamma must be positive");
    if (packet_bits < 1) throw std::domain_error("slot_time: packet length must be positive");
    if (!(bandwidth_hz > 0.0)) throw std::domain_error("slot_time: bandwidth must be positive");
    return static_cast<double>(packet_bits) / (bandwidth_hz * std::log2(1.0 + gamma));
}

double target_snr(double gamma, double epsilon) {
    if (!(gamma > 0.0)) throw std::domain_error("target_snr: gamma must be positive");
    return gamma / outage_constant(epsilon);
}

double SystemConfig::empty_slot_s() const {
    return t0_s ? *t0_s : slot_time(gamma_max, packet_bits, bandwidth_hz);
}

SystemConfig SystemConfig::validated() const {
    if (n < 1) throw std::domain_error("config: n must be >= 1");
    if (packet_bits < 1) throw std::domain_error("config: L must be >= 1 bit");
    if (!(bandwidth_hz > 0.0)) throw std::domain_error("config: W must be positive");
    if (!(gamma_max > 0.0)) throw std::domain_error("config: gamma_max must be positive");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::domain_error("config: lambda must be positive");
    if (k_c < 1) throw std::domain_error("config: k_c must be >= 1");
    if (!(a_gamma > 0.0) || !(b_gamma > 0.0)) throw std::domain_error("config: a_gamma, b_gamma must be positive");
    if (t0_s && !(*t0_s > 0.0)) throw std::domain_error("config: T_0 must be positive");
    SystemConfig out = *this;
    out.c = outage_constant(epsilon);
    return out;
}

SystemConfig default_config() {
    return SystemConfig{}.validated();
}

SystemConfig parse_config(std::string_view text) {
    SystemConfig cfg;
    std::set<std::string> seen;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
        std::string key = lower(trim(line.substr(0, eq)));
        std::string_view value = trim(line.substr(eq + 1));
        if (!seen.insert(key).second) throw std::invalid_argument("config: duplicate key '" + key + "'");

        if (key == "n") {
            cfg.n = plain_int(key, value);
        } else if (key == "l") {
            auto [v, unit] = number_with_unit(key, value);
            std::string u = lower(unit);
            double bits;
            if (u == "b" && unit == "B") bits = v * 8.0;
            else if (u == "byte" || u == "bytes") bits = v * 8.0;
            else if (unit == "b" || u == "bit" || u == "bits") bits = v;
            else throw std::invalid_argument("config: 'l' needs a unit suffix (B, bytes, bit)");
            if (bits != std::floor(bits)) throw std::invalid_argument("config: 'l' must be a whole number of bits");
            cfg.packet_bits = static_cast<long>(bits);
        } else if (key == "w") {
            auto [v, unit] = number_with_unit(key, value);
            std::string u = lower(unit);
            if (u.empty() || u == "hz") cfg.bandwidth_hz = v;
            else if (u == "khz") cfg.bandwidth_hz = v * 1e3;
            else if (u == "mhz") cfg.bandwidth_hz = v * 1e6;
            else throw std::invalid_argument("config: unknown bandwidth unit '" + unit + "'");
        } else if (key == "epsilon") {
            cfg.epsilon = plain_number(key, value);
        } else if (key == "gamma_max") {
            cfg.gamma_max = plain_number(key, value);
        } else if (key == "lambda") {
            cfg.lambda = plain_number(key, value);
        } else if (key == "k_c") {
            cfg.k_c = plain_int(key, value);
        } else if (key == "a_gamma") {
            cfg.a_gamma = plain_number(key, value);
        } else if (key == "b_gamma") {
            cfg.b_gamma = plain_number(key, value);
        } else if (key == "t_0") {
            if (lower(value) == "auto") {
                cfg.t0_s.reset();
            } else {
                auto [v, unit] = number_with_unit(key, value);
                std::string u = lower(unit);
                if (u.empty() || u == "s") cfg.t0_s = v;
                else if (u == "ms") cfg.t0_s = v * 1e-3;
                else throw std::invalid_argument("config: unknown time unit '" + unit + "'");
            }
        } else if (key == "p_n") {
            auto [v, unit] = number_with_unit(key, value);
            if (!unit.empty() && lower(unit) != "dbm")
                throw std::invalid_argument("config: 'p_n' is given in dBm");
            cfg.noise_dbm = v;
        } else {
            throw std::invalid_argument("config: unknown key '" + key + "'");
        }
    }
    return cfg.validated();
}

SystemConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string format_config(const SystemConfig& cfg) {
    std::ostringstream out;
    out.precision(17);
    out << "n = " << cfg.n << '\n'
        << "l = " << cfg.packet_bits << " bit\n"
        << "w = " << cfg.bandwidth_hz << '\n'
        << "epsilon = " << cfg.epsilon << '\n'
        << "gamma_max = " << cfg.gamma_max << '\n'
        << "lambda = " << cfg.lambda << '\n'
        << "k_c = " << cfg.k_c << '\n'
        << "a_gamma = " << cfg.a_gamma << '\n'
        << "b_gamma = " << cfg.b_gamma << '\n';
    if (cfg.t0_s) out << "t_0 = " << *cfg.t0_s << '\n';
    else out << "t_0 = auto\n";
    out << "p_n = " << cfg.noise_dbm << " dBm\n";
    return out.str();
}

}  // namespace sicma

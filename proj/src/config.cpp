#include "linkadapt/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace linkadapt {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        std::string v = value;
        if (v == "inf" || v == "infinity") return std::numeric_limits<double>::infinity();
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(value);
        return d;
    } catch (...) {
        throw std::invalid_argument("config: bad numeric value for `" + key + "`: " + value);
    }
}

long parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (...) {
        throw std::invalid_argument("config: bad integer value for `" + key + "`: " + value);
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw std::invalid_argument("config: bad boolean value for `" + key + "`: " + value);
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_double(key, item));
    }
    if (out.empty()) throw std::invalid_argument("config: empty list for `" + key + "`");
    return out;
}

std::pair<double, double> parse_range(const std::string& key, const std::string& value) {
    std::vector<double> v = parse_list(key, value);
    if (v.size() != 2) throw std::invalid_argument("config: `" + key + "` expects two comma-separated values");
    return {v[0], v[1]};
}

bool starts_with(const std::string& s, const std::string& prefix) {
    return s.size() >= prefix.size() && s.compare(0, prefix.size(), prefix) == 0;
}

// bandK.field keys; bands are 1-indexed in config files.
bool apply_band_key(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (!starts_with(key, "band")) return false;
    const std::size_t dot = key.find('.');
    if (dot == std::string::npos) return false;
    const std::string idx_str = key.substr(4, dot - 4);
    if (idx_str.empty() || idx_str.find_first_not_of("0123456789") != std::string::npos) return false;
    const std::size_t idx = static_cast<std::size_t>(parse_int(key, idx_str));
    if (idx == 0) throw std::invalid_argument("config: band indices start at 1 (`" + key + "`)");
    if (cfg.bands.size() < idx) cfg.bands.resize(idx);
    BandSpec& band = cfg.bands[idx - 1];
    const std::string field = key.substr(dot + 1);
    if (field == "bandwidth")
        band.bandwidth_hz = parse_double(key, value);
    else if (field == "center_offset")
        band.center_offset_hz = parse_double(key, value);
    else if (field == "distance")
        band.distance_m = parse_double(key, value);
    else if (field == "threshold")
        band.threshold_w = parse_double(key, value);
    else if (field == "nu")
        band.nu = parse_double(key, value);
    else if (field == "psi_th")
        band.psi_th = parse_double(key, value);
    else
        throw std::invalid_argument("config: unknown key `" + key + "`");
    return true;
}

} // namespace

ExperimentConfig parse_experiment_config(const std::string& text) {
    ExperimentConfig cfg;
    std::size_t declared_bands = 0;
    bool have_declared_bands = false;

    std::stringstream lines(text);
    std::string line;
    int line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(line_no) + " is not `key = value`");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw std::invalid_argument("config: empty key on line " + std::to_string(line_no));
        if (value.empty())
            throw std::invalid_argument("config: missing value for `" + key + "` on line " + std::to_string(line_no));

        if (key == "experiment") cfg.kind = experiment_kind_from_string(value);
        else if (key == "trials") cfg.trials = static_cast<int>(parse_int(key, value));
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
        else if (key == "sweep.param") cfg.sweep_param = value;
        else if (key == "sweep.values") cfg.sweep_values = parse_list(key, value);
        else if (key == "ofdm.n_subcarriers") cfg.ofdm.n_subcarriers = static_cast<int>(parse_int(key, value));
        else if (key == "ofdm.spacing_hz") cfg.ofdm.subcarrier_spacing_hz = parse_double(key, value);
        else if (key == "channel.noise_var") cfg.noise_var = parse_double(key, value);
        else if (key == "channel.avg_gain") cfg.avg_gain = parse_double(key, value);
        else if (key == "channel.avg_gain_db") cfg.avg_gain = std::pow(10.0, 0.1 * parse_double(key, value));
        else if (key == "channel.interference") cfg.interference_w = parse_double(key, value);
        else if (key == "channel.su_path_loss_db") cfg.su_path_loss_db = parse_double(key, value);
        else if (key == "ber.threshold") cfg.ber_threshold = parse_double(key, value);
        else if (key == "moop.alpha") cfg.alpha = parse_double(key, value);
        else if (key == "moop.u_power") cfg.u_power = parse_double(key, value);
        else if (key == "moop.u_bits") cfg.u_bits = parse_double(key, value);
        else if (key == "bits.max") cfg.b_max = static_cast<int>(parse_int(key, value));
        else if (key == "power.cap") cfg.p_cap = parse_double(key, value);
        else if (key == "pathloss.exponent") cfg.pathloss.exponent = parse_double(key, value);
        else if (key == "pathloss.wavelength") cfg.pathloss.wavelength_m = parse_double(key, value);
        else if (key == "pathloss.ref_distance") cfg.pathloss.reference_distance_m = parse_double(key, value);
        else if (key == "cci.distance") cfg.cci_distance_m = parse_double(key, value);
        else if (key == "cci.threshold") cfg.cci_threshold_w = parse_double(key, value);
        else if (key == "cci.fading_margin_db") cfg.fading_margin_db = parse_double(key, value);
        else if (key == "cci.nu") cfg.cci_nu = parse_double(key, value);
        else if (key == "cci.psi_th") cfg.cci_psi_th = parse_double(key, value);
        else if (key == "sensing.p_md") cfg.sensing.p_md = parse_double(key, value);
        else if (key == "sensing.p_fa") cfg.sensing.p_fa = parse_double(key, value);
        else if (key == "sensing.p_active") cfg.sensing.p_active = parse_double(key, value);
        else if (key == "sensing.p_md_range") cfg.sensing.p_md_range = parse_range(key, value);
        else if (key == "sensing.p_fa_range") cfg.sensing.p_fa_range = parse_range(key, value);
        else if (key == "sensing.p_active_range") cfg.sensing.p_active_range = parse_range(key, value);
        else if (key == "sensing.perfect") cfg.sensing.perfect = parse_bool(key, value);
        else if (key == "bands.count") {
            declared_bands = static_cast<std::size_t>(parse_int(key, value));
            have_declared_bands = true;
        }
        else if (key == "tri.w_cci") cfg.w_cci = parse_double(key, value);
        else if (key == "tri.w_aci") cfg.w_aci = parse_double(key, value);
        else if (key == "tri.w_rate") cfg.w_rate = parse_double(key, value);
        else if (key == "tri.csi_mode") cfg.csi_mode = value;
        else if (key == "ee.kappa") cfg.ee.kappa = parse_double(key, value);
        else if (key == "ee.circuit_power") cfg.ee.circuit_power_w = parse_double(key, value);
        else if (key == "ee.rate_floor") cfg.ee.rate_floor = parse_double(key, value);
        else if (key == "ee.tol") cfg.ee.tol = parse_double(key, value);
        else if (key == "ee.q_init") cfg.ee.q_init = parse_double(key, value);
        else if (key == "ee.est_var") cfg.est_var = parse_double(key, value);
        else if (key == "ga.population") cfg.ga.population = static_cast<int>(parse_int(key, value));
        else if (key == "ga.max_generations") cfg.ga.max_generations = static_cast<int>(parse_int(key, value));
        else if (key == "ga.objective_tol") cfg.ga.objective_tol = parse_double(key, value);
        else if (key == "ga.stall_window") cfg.ga.stall_window = static_cast<int>(parse_int(key, value));
        else if (key == "ga.elite_count") cfg.ga.elite_count = static_cast<int>(parse_int(key, value));
        else if (key == "ga.crossover_fraction") cfg.ga.crossover_fraction = parse_double(key, value);
        else if (key == "ga.tournament_size") cfg.ga.tournament_size = static_cast<int>(parse_int(key, value));
        else if (key == "ga.laplace_location") cfg.ga.laplace_location = parse_double(key, value);
        else if (key == "ga.laplace_scale") cfg.ga.laplace_scale = parse_double(key, value);
        else if (key == "ga.mutation_index_real") cfg.ga.mutation_index_real = parse_double(key, value);
        else if (key == "ga.mutation_index_int") cfg.ga.mutation_index_int = parse_double(key, value);
        else if (key == "ga.seed_closed_form") cfg.ga.seed_closed_form = parse_bool(key, value);
        else if (!apply_band_key(cfg, key, value))
            throw std::invalid_argument("config: unknown key `" + key + "`");
    }

    if (have_declared_bands && cfg.bands.size() != declared_bands)
        throw std::invalid_argument("config: bands.count disagrees with the bandK sections present");
    if (cfg.trials < 1) throw std::invalid_argument("config: trials must be >= 1");
    if (cfg.sweep_values.empty()) throw std::invalid_argument("config: sweep.values must be nonempty");
    cfg.ofdm.validate();
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_experiment_config(ss.str());
}

} // namespace linkadapt

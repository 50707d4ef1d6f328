#include "linkadapt/harness.hpp"

#include "linkadapt/bitpower.hpp"
#include "linkadapt/cr_bitpower.hpp"
#include "linkadapt/oracle.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <thread>

namespace linkadapt {

namespace {

// Kahan accumulator; trial results are reduced in trial order so sums do not
// depend on scheduling.
struct Accum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

struct TrialMetrics {
    double throughput = 0.0;
    double power = 0.0;
    double rate = 0.0;
    double ee = 0.0;
    double ee_rate_per_power = 0.0;
    double violation_cci = 0.0;
    double violation_aci = 0.0;
    double iterations = 0.0;
    double gap_oracle = 0.0;
    double gap_closed_form = 0.0;
    double ber_ratio = 0.0;
    bool infeasible = false;
};

SensingModel draw_sensing(const SensingSpec& spec, Rng& rng) {
    SensingModel s;
    if (spec.perfect) return SensingModel{0.0, 0.0, 0.5};
    s.p_md = spec.p_md_range ? rng.uniform(spec.p_md_range->first, spec.p_md_range->second) : spec.p_md;
    s.p_fa = spec.p_fa_range ? rng.uniform(spec.p_fa_range->first, spec.p_fa_range->second) : spec.p_fa;
    s.p_active =
        spec.p_active_range ? rng.uniform(spec.p_active_range->first, spec.p_active_range->second) : spec.p_active;
    return s;
}

PuBand band_from_spec(const BandSpec& spec, const OfdmConfig& ofdm, double fading_margin_db) {
    PuBand band;
    band.bandwidth_hz = spec.bandwidth_hz;
    band.spectral_offsets_hz = band_offsets(ofdm, spec.center_offset_hz);
    band.distance_m = spec.distance_m;
    band.interference_threshold_w = spec.threshold_w;
    band.fading_margin_db = fading_margin_db;
    band.exp_mean_inv = spec.nu;
    band.confidence = spec.psi_th;
    return band;
}

PuBand co_channel_band(const ExperimentConfig& cfg) {
    PuBand band;
    band.bandwidth_hz = cfg.ofdm.n_subcarriers * cfg.ofdm.subcarrier_spacing_hz;
    band.distance_m = cfg.cci_distance_m;
    band.interference_threshold_w = cfg.cci_threshold_w;
    band.fading_margin_db = cfg.fading_margin_db;
    band.exp_mean_inv = cfg.cci_nu;
    band.confidence = cfg.cci_psi_th;
    return band;
}

void apply_sweep(ExperimentConfig& cfg, const std::string& param, double value) {
    if (param == "alpha") {
        cfg.alpha = value;
    } else if (param == "p_cap") {
        cfg.p_cap = value;
    } else if (param == "fading_margin_db") {
        cfg.fading_margin_db = value;
    } else if (param == "cci_threshold") {
        cfg.cci_threshold_w = value;
    } else if (param == "aci_threshold") {
        for (auto& b : cfg.bands) b.threshold_w = value;
    } else if (param == "avg_gain_db") {
        cfg.avg_gain = std::pow(10.0, 0.1 * value);
    } else if (param == "w_rate") {
        // Renormalize the remaining Ch4 weights around the swept rate weight.
        const double rest = cfg.w_cci + cfg.w_aci;
        const double scale = rest > 0.0 ? (1.0 - value) / rest : 0.0;
        cfg.w_cci *= scale;
        cfg.w_aci *= scale;
        cfg.w_rate = value;
    } else if (param == "w_cci") {
        const double rest = cfg.w_rate + cfg.w_aci;
        const double scale = rest > 0.0 ? (1.0 - value) / rest : 0.0;
        cfg.w_rate *= scale;
        cfg.w_aci *= scale;
        cfg.w_cci = value;
    } else if (param == "rate_floor") {
        cfg.ee.rate_floor = value;
    } else if (param == "est_var") {
        cfg.est_var = value;
    } else if (param == "psi_th") {
        cfg.cci_psi_th = value;
        for (auto& b : cfg.bands) b.psi_th = value;
    } else if (param == "trials_per_point") {
        cfg.trials = static_cast<int>(value);
    } else {
        throw std::invalid_argument("unknown sweep parameter: " + param);
    }
}

std::vector<std::vector<double>> leakage_table(const ExperimentConfig& cfg, const OfdmConfig& ofdm) {
    std::vector<std::vector<double>> table;
    for (const auto& spec : cfg.bands) {
        PuBand band = band_from_spec(spec, ofdm, cfg.fading_margin_db);
        std::vector<double> row(static_cast<std::size_t>(ofdm.n_subcarriers));
        for (int i = 0; i < ofdm.n_subcarriers; ++i) row[static_cast<std::size_t>(i)] = leakage_factor(ofdm, band, i);
        table.push_back(std::move(row));
    }
    return table;
}

TrialMetrics run_trial(const ExperimentConfig& cfg, const std::vector<std::vector<double>>& leakage,
                       std::uint64_t trial_index) {
    Rng rng = Rng::substream(cfg.seed, trial_index);
    TrialMetrics m;

    std::vector<double> interference(static_cast<std::size_t>(cfg.ofdm.n_subcarriers), cfg.interference_w);
    ChannelRealization ch = sample_rayleigh_channel(cfg.ofdm, cfg.avg_gain, cfg.noise_var, interference, rng);
    BerTargets targets = BerTargets::uniform(cfg.ofdm.n_subcarriers, cfg.ber_threshold);
    MoopWeights w = cfg.weights();

    switch (cfg.kind) {
        case ExperimentKind::MoopSweep: {
            ContinuousAllocation cont = allocate_power_capped(ch, w, targets, cfg.b_max, cfg.p_cap);
            Allocation a = round_allocation(cont, ch, w, targets);
            a = rounding_repair(std::move(a), ch, w, targets, {LinearConstraint{{}, cfg.p_cap}});
            m.throughput = a.total_bits();
            m.power = a.total_power();
            break;
        }
        case ExperimentKind::CrSweep:
        case ExperimentKind::ViolationRatio: {
            SensingModel s_m = draw_sensing(cfg.sensing, rng);
            std::vector<SensingModel> s_l;
            std::vector<PuBand> bands;
            for (const auto& spec : cfg.bands) {
                s_l.push_back(draw_sensing(cfg.sensing, rng));
                bands.push_back(band_from_spec(spec, cfg.ofdm, cfg.fading_margin_db));
            }
            InterferenceCaps caps =
                build_caps(cfg.p_cap, bands, co_channel_band(cfg), s_m, s_l, cfg.pathloss, cfg.ofdm);
            caps.leakage = leakage; // precomputed once per grid point
            Allocation a = allocate_cr(ch, w, targets, cfg.b_max, caps);
            m.throughput = a.total_bits();
            m.power = a.total_power();
            m.iterations = a.solver_iterations;
            if (cfg.kind == ExperimentKind::ViolationRatio) {
                std::vector<double> gains;
                std::vector<double> pl;
                std::vector<double> thresholds;
                gains.push_back(rng.exponential(1.0 / cfg.cci_nu));
                pl.push_back(path_loss_lin(cfg.cci_distance_m, cfg.pathloss));
                thresholds.push_back(cfg.cci_threshold_w);
                for (const auto& spec : cfg.bands) {
                    gains.push_back(rng.exponential(1.0 / spec.nu));
                    pl.push_back(path_loss_lin(spec.distance_m, cfg.pathloss));
                    thresholds.push_back(spec.threshold_w);
                }
                std::vector<bool> flags = measure_violation(a, gains, pl, thresholds, leakage);
                m.violation_cci = flags[0] ? 1.0 : 0.0;
                for (std::size_t l = 1; l < flags.size(); ++l) m.violation_aci += flags[l] ? 1.0 : 0.0;
                if (!cfg.bands.empty()) m.violation_aci /= static_cast<double>(cfg.bands.size());
            }
            break;
        }
        case ExperimentKind::RateInterferenceSweep: {
            const double pl_m_db = path_loss_db(cfg.cci_distance_m, cfg.pathloss);
            CsiMode mode = cfg.csi_mode == "full"        ? CsiMode::FullCsi
                           : cfg.csi_mode == "statistics" ? CsiMode::PathLossPlusStatistics
                                                          : CsiMode::PathLossOnly;
            const double g_m = mode == CsiMode::FullCsi ? rng.exponential(1.0 / cfg.cci_nu) : 1.0;
            const double x_m = knowledge_coeff(mode, pl_m_db, cfg.cci_nu, cfg.cci_psi_th, g_m);
            std::vector<double> x_bands;
            std::vector<double> aci_caps;
            for (const auto& spec : cfg.bands) {
                const double pl_l_db = path_loss_db(spec.distance_m, cfg.pathloss);
                const double g_l = mode == CsiMode::FullCsi ? rng.exponential(1.0 / spec.nu) : 1.0;
                x_bands.push_back(knowledge_coeff(mode, pl_l_db, spec.nu, spec.psi_th, g_l));
                aci_caps.push_back(spec.threshold_w * x_bands.back());
            }
            const double cap_m = cfg.cci_threshold_w * x_m;

            TriWeights tw;
            tw.w_cci = cfg.w_cci;
            tw.w_rate = cfg.w_rate;
            tw.w_aci.assign(cfg.bands.size(), cfg.bands.empty() ? 0.0 : cfg.w_aci / cfg.bands.size());
            tw.u_cci = 1.0 / cfg.cci_threshold_w;
            for (const auto& spec : cfg.bands) tw.u_aci.push_back(1.0 / spec.threshold_w);
            const double max_rate =
                max_achievable_rate(ch, cap_m, aci_caps, cfg.ofdm.subcarrier_spacing_hz, leakage);
            tw.u_rate = max_rate > 0.0 && std::isfinite(max_rate) ? 1.0 / max_rate : 1.0;

            RateInterferenceResult r = allocate_rate_interference(
                ch, tw, x_m, x_bands, cap_m, aci_caps, cfg.ofdm.subcarrier_spacing_hz, leakage);
            m.rate = achievable_rate(ch, r.power_w, cfg.ofdm.subcarrier_spacing_hz);
            for (double p : r.power_w) m.power += p;
            m.ee_rate_per_power = m.power > 0.0 ? m.rate / m.power : 0.0;
            m.iterations = r.solver_iterations;
            break;
        }
        case ExperimentKind::EeSweep: {
            SensingModel s_m = draw_sensing(cfg.sensing, rng);
            SensingPosteriors post = cfg.sensing.perfect ? SensingPosteriors{0.0, 1.0}
                                                         : sensing_posteriors(s_m);
            UncertainChannel uch;
            uch.est_gains = ch.gains;
            uch.est_var = cfg.est_var;
            uch.path_loss_lin = std::pow(10.0, -0.1 * cfg.su_path_loss_db);
            uch.noise_var = cfg.noise_var;
            uch.interference = interference;
            uch.spacing_hz = cfg.ofdm.subcarrier_spacing_hz;

            std::vector<PuBand> bands;
            std::vector<double> beta_oo;
            std::vector<double> band_pl;
            for (const auto& spec : cfg.bands) {
                bands.push_back(band_from_spec(spec, cfg.ofdm, cfg.fading_margin_db));
                SensingPosteriors pl_post =
                    cfg.sensing.perfect ? SensingPosteriors{0.0, 1.0} : sensing_posteriors(draw_sensing(cfg.sensing, rng));
                beta_oo.push_back(pl_post.beta_oo);
                band_pl.push_back(path_loss_lin(spec.distance_m, cfg.pathloss));
            }
            InterferenceCaps caps = build_statistical_caps(
                cfg.p_cap, post.beta_ov, co_channel_band(cfg), path_loss_lin(cfg.cci_distance_m, cfg.pathloss),
                bands, beta_oo, band_pl, leakage);
            try {
                DinkelbachResult r = dinkelbach_solve(uch, caps, cfg.ee);
                m.ee = r.q_star;
                m.rate = capacity_uncertain(r.power, uch);
                for (double p : r.power) m.power += p;
                m.iterations = r.iterations;
            } catch (const InfeasibleError&) {
                m.infeasible = true;
            }
            break;
        }
        case ExperimentKind::GaCompare: {
            GaProblem prob;
            prob.ch = &ch;
            prob.weights = w;
            prob.ber_threshold = cfg.ber_threshold;
            prob.p_cap = cfg.p_cap;
            prob.b_max = cfg.b_max;
            prob.power_upper.resize(ch.cnr.size());
            for (std::size_t i = 0; i < ch.cnr.size(); ++i) {
                const double g = ch.cnr[i];
                const double cap_i = g > 0.0 ? power_from_bits(cfg.b_max, g, targets.snr_gap(static_cast<int>(i)))
                                             : 0.0;
                prob.power_upper[i] = std::min(cfg.p_cap, cap_i);
            }
            GaResult ga = evolve(prob, cfg.ga, rng);

            ContinuousAllocation cont = allocate_power_capped(ch, w, targets, cfg.b_max, cfg.p_cap);
            Allocation cf = round_allocation(cont, ch, w, targets);
            cf = rounding_repair(std::move(cf), ch, w, targets, {LinearConstraint{{}, cfg.p_cap}});

            m.gap_closed_form = std::abs(ga.best.objective - cf.objective) /
                                std::max(std::abs(cf.objective), 1e-300);
            double ber_sum = 0.0;
            int loaded = 0;
            for (std::size_t i = 0; i < ga.best.bits.size(); ++i) {
                if (ga.best.bits[i] < 1) continue;
                ber_sum += ber_mqam(ga.best.power[i], ga.best.bits[i], ch.cnr[i]);
                ++loaded;
            }
            m.ber_ratio = loaded > 0 ? ber_sum / loaded / cfg.ber_threshold : 0.0;
            m.throughput = 0.0;
            for (int b : ga.best.bits) m.throughput += b;
            for (double p : ga.best.power) m.power += p;
            m.iterations = ga.generations_run;
            break;
        }
        case ExperimentKind::OracleCompare: {
            std::vector<LinearConstraint> constraints{LinearConstraint{{}, cfg.p_cap}};
            for (std::size_t l = 0; l < leakage.size(); ++l)
                constraints.push_back(LinearConstraint{leakage[l], cfg.bands[l].threshold_w});

            ContinuousAllocation cont = allocate_power_capped(ch, w, targets, cfg.b_max, cfg.p_cap);
            Allocation a = round_allocation(cont, ch, w, targets);
            a = rounding_repair(std::move(a), ch, w, targets, constraints);
            Allocation best = exhaustive_search(ch, w, targets, cfg.b_max, constraints);
            m.gap_oracle =
                std::abs(a.objective - best.objective) / std::max(std::abs(best.objective), 1e-300);
            m.throughput = a.total_bits();
            m.power = a.total_power();
            break;
        }
    }
    return m;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

} // namespace

std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::MoopSweep: return "moop_sweep";
        case ExperimentKind::CrSweep: return "cr_sweep";
        case ExperimentKind::RateInterferenceSweep: return "rate_interference_sweep";
        case ExperimentKind::EeSweep: return "ee_sweep";
        case ExperimentKind::GaCompare: return "ga_compare";
        case ExperimentKind::OracleCompare: return "oracle_compare";
        case ExperimentKind::ViolationRatio: return "violation_ratio";
    }
    throw std::logic_error("to_string: unknown experiment kind");
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
    if (s == "moop_sweep") return ExperimentKind::MoopSweep;
    if (s == "cr_sweep") return ExperimentKind::CrSweep;
    if (s == "rate_interference_sweep") return ExperimentKind::RateInterferenceSweep;
    if (s == "ee_sweep") return ExperimentKind::EeSweep;
    if (s == "ga_compare") return ExperimentKind::GaCompare;
    if (s == "oracle_compare") return ExperimentKind::OracleCompare;
    if (s == "violation_ratio") return ExperimentKind::ViolationRatio;
    throw std::invalid_argument("unknown experiment kind: " + s);
}

std::vector<MetricRecord> run_experiment(const ExperimentConfig& base, int workers) {
    if (base.trials < 1) throw std::invalid_argument("run_experiment: trials < 1");
    if (base.sweep_values.empty()) throw std::invalid_argument("run_experiment: empty sweep grid");
    if (workers < 1) workers = 1;

    std::vector<MetricRecord> records;
    for (std::size_t g = 0; g < base.sweep_values.size(); ++g) {
        ExperimentConfig cfg = base;
        apply_sweep(cfg, base.sweep_param, base.sweep_values[g]);
        const std::vector<std::vector<double>> leakage = leakage_table(cfg, cfg.ofdm);

        // Substreams keyed by trial index only: every grid point sees the same
        // channel draws, so sweeps compare paired realizations.
        std::vector<TrialMetrics> trials(static_cast<std::size_t>(cfg.trials));
        if (workers == 1) {
            for (int t = 0; t < cfg.trials; ++t)
                trials[static_cast<std::size_t>(t)] = run_trial(cfg, leakage, static_cast<std::uint64_t>(t));
        } else {
            std::atomic<int> next{0};
            auto worker = [&]() {
                for (;;) {
                    const int t = next.fetch_add(1);
                    if (t >= cfg.trials) return;
                    trials[static_cast<std::size_t>(t)] =
                        run_trial(cfg, leakage, static_cast<std::uint64_t>(t));
                }
            };
            std::vector<std::thread> pool;
            for (int k = 0; k < workers; ++k) pool.emplace_back(worker);
            for (auto& th : pool) th.join();
        }

        Accum throughput, power, rate, ee, ee_rp, vcci, vaci, iters, gap_o, gap_cf, ber_ratio;
        int infeasible = 0;
        int valid = 0;
        for (const auto& t : trials) {
            if (t.infeasible) {
                ++infeasible;
                continue;
            }
            ++valid;
            throughput.add(t.throughput);
            power.add(t.power);
            rate.add(t.rate);
            ee.add(t.ee);
            ee_rp.add(t.ee_rate_per_power);
            vcci.add(t.violation_cci);
            vaci.add(t.violation_aci);
            iters.add(t.iterations);
            gap_o.add(t.gap_oracle);
            gap_cf.add(t.gap_closed_form);
            ber_ratio.add(t.ber_ratio);
        }
        const double denom = valid > 0 ? static_cast<double>(valid) : 1.0;

        MetricRecord rec;
        rec.sweep_value = base.sweep_values[g];
        switch (cfg.kind) {
            case ExperimentKind::MoopSweep:
                rec.avg_throughput_bits = throughput.sum / denom;
                rec.avg_power_w = power.sum / denom;
                break;
            case ExperimentKind::CrSweep:
                rec.avg_throughput_bits = throughput.sum / denom;
                rec.avg_power_w = power.sum / denom;
                rec.avg_iterations = iters.sum / denom;
                break;
            case ExperimentKind::ViolationRatio:
                rec.violation_ratio_cci = vcci.sum / static_cast<double>(cfg.trials);
                rec.violation_ratio_aci = vaci.sum / static_cast<double>(cfg.trials);
                rec.avg_throughput_bits = throughput.sum / denom;
                rec.avg_power_w = power.sum / denom;
                break;
            case ExperimentKind::RateInterferenceSweep:
                rec.avg_rate_bps = rate.sum / denom;
                rec.avg_power_w = power.sum / denom;
                rec.ee_bits_per_joule = ee_rp.sum / denom;
                break;
            case ExperimentKind::EeSweep:
                rec.ee_j_per_bit = ee.sum / denom;
                rec.avg_rate_bps = rate.sum / denom;
                rec.avg_power_w = power.sum / denom;
                rec.avg_iterations = iters.sum / denom;
                rec.infeasible_fraction = static_cast<double>(infeasible) / cfg.trials;
                break;
            case ExperimentKind::GaCompare:
                rec.objective_gap_vs_closed_form = gap_cf.sum / denom;
                rec.mean_ber_ratio = ber_ratio.sum / denom;
                rec.avg_throughput_bits = throughput.sum / denom;
                rec.avg_power_w = power.sum / denom;
                rec.avg_iterations = iters.sum / denom;
                break;
            case ExperimentKind::OracleCompare:
                rec.objective_gap_vs_oracle = gap_o.sum / denom;
                rec.avg_throughput_bits = throughput.sum / denom;
                rec.avg_power_w = power.sum / denom;
                break;
        }
        records.push_back(rec);
    }
    return records;
}

namespace {

void append_config_comments(std::string& out, const ExperimentConfig& cfg) {
    auto kv = [&out](const std::string& key, const std::string& value) {
        out += "# " + key + " = " + value + "\n";
    };
    kv("experiment", to_string(cfg.kind));
    kv("trials", std::to_string(cfg.trials));
    kv("seed", std::to_string(cfg.seed));
    kv("sweep.param", cfg.sweep_param);
    std::string vals;
    for (std::size_t i = 0; i < cfg.sweep_values.size(); ++i) {
        if (i) vals += ",";
        vals += format_double(cfg.sweep_values[i]);
    }
    kv("sweep.values", vals);
    kv("ofdm.n_subcarriers", std::to_string(cfg.ofdm.n_subcarriers));
    kv("ofdm.spacing_hz", format_double(cfg.ofdm.subcarrier_spacing_hz));
    kv("channel.noise_var", format_double(cfg.noise_var));
    kv("channel.avg_gain", format_double(cfg.avg_gain));
    kv("channel.interference", format_double(cfg.interference_w));
    kv("channel.su_path_loss_db", format_double(cfg.su_path_loss_db));
    kv("ber.threshold", format_double(cfg.ber_threshold));
    kv("moop.alpha", format_double(cfg.alpha));
    kv("moop.u_power", format_double(cfg.u_power));
    kv("moop.u_bits", format_double(cfg.u_bits));
    kv("bits.max", std::to_string(cfg.b_max));
    kv("power.cap", format_double(cfg.p_cap));
    kv("pathloss.exponent", format_double(cfg.pathloss.exponent));
    kv("pathloss.wavelength", format_double(cfg.pathloss.wavelength_m));
    kv("pathloss.ref_distance", format_double(cfg.pathloss.reference_distance_m));
    kv("cci.distance", format_double(cfg.cci_distance_m));
    kv("cci.threshold", format_double(cfg.cci_threshold_w));
    kv("cci.fading_margin_db", format_double(cfg.fading_margin_db));
    kv("cci.nu", format_double(cfg.cci_nu));
    kv("cci.psi_th", format_double(cfg.cci_psi_th));
    kv("sensing.p_md", format_double(cfg.sensing.p_md));
    kv("sensing.p_fa", format_double(cfg.sensing.p_fa));
    kv("sensing.p_active", format_double(cfg.sensing.p_active));
    if (cfg.sensing.p_md_range)
        kv("sensing.p_md_range", format_double(cfg.sensing.p_md_range->first) + "," +
                                     format_double(cfg.sensing.p_md_range->second));
    if (cfg.sensing.p_fa_range)
        kv("sensing.p_fa_range", format_double(cfg.sensing.p_fa_range->first) + "," +
                                    format_double(cfg.sensing.p_fa_range->second));
    if (cfg.sensing.p_active_range)
        kv("sensing.p_active_range", format_double(cfg.sensing.p_active_range->first) + "," +
                                        format_double(cfg.sensing.p_active_range->second));
    kv("sensing.perfect", cfg.sensing.perfect ? "true" : "false");
    kv("bands.count", std::to_string(cfg.bands.size()));
    for (std::size_t b = 0; b < cfg.bands.size(); ++b) {
        const std::string prefix = "band" + std::to_string(b + 1);
        kv(prefix + ".bandwidth", format_double(cfg.bands[b].bandwidth_hz));
        kv(prefix + ".center_offset", format_double(cfg.bands[b].center_offset_hz));
        kv(prefix + ".distance", format_double(cfg.bands[b].distance_m));
        kv(prefix + ".threshold", format_double(cfg.bands[b].threshold_w));
        kv(prefix + ".nu", format_double(cfg.bands[b].nu));
        kv(prefix + ".psi_th", format_double(cfg.bands[b].psi_th));
    }
    kv("tri.w_cci", format_double(cfg.w_cci));
    kv("tri.w_aci", format_double(cfg.w_aci));
    kv("tri.w_rate", format_double(cfg.w_rate));
    kv("tri.csi_mode", cfg.csi_mode);
    kv("ee.kappa", format_double(cfg.ee.kappa));
    kv("ee.circuit_power", format_double(cfg.ee.circuit_power_w));
    kv("ee.rate_floor", format_double(cfg.ee.rate_floor));
    kv("ee.tol", format_double(cfg.ee.tol));
    kv("ee.est_var", format_double(cfg.est_var));
    kv("ga.population", std::to_string(cfg.ga.population));
    kv("ga.max_generations", std::to_string(cfg.ga.max_generations));
    kv("ga.elite_count", std::to_string(cfg.ga.elite_count));
    kv("ga.crossover_fraction", format_double(cfg.ga.crossover_fraction));
    kv("ga.objective_tol", format_double(cfg.ga.objective_tol));
}

} // namespace

std::string metrics_to_csv(const ExperimentConfig& cfg, const std::vector<MetricRecord>& records) {
    std::string out;
    append_config_comments(out, cfg);

    struct Column {
        const char* name;
        const std::optional<double> MetricRecord::* field;
    };
    static const Column kColumns[] = {
        {"avg_throughput_bits", &MetricRecord::avg_throughput_bits},
        {"avg_power_w", &MetricRecord::avg_power_w},
        {"avg_rate_bps", &MetricRecord::avg_rate_bps},
        {"ee_j_per_bit", &MetricRecord::ee_j_per_bit},
        {"ee_bits_per_joule", &MetricRecord::ee_bits_per_joule},
        {"violation_ratio_cci", &MetricRecord::violation_ratio_cci},
        {"violation_ratio_aci", &MetricRecord::violation_ratio_aci},
        {"avg_iterations", &MetricRecord::avg_iterations},
        {"objective_gap_vs_oracle", &MetricRecord::objective_gap_vs_oracle},
        {"objective_gap_vs_closed_form", &MetricRecord::objective_gap_vs_closed_form},
        {"mean_ber_ratio", &MetricRecord::mean_ber_ratio},
        {"infeasible_fraction", &MetricRecord::infeasible_fraction},
    };

    std::vector<const Column*> engaged;
    for (const auto& col : kColumns) {
        bool used = false;
        for (const auto& rec : records) used = used || (rec.*col.field).has_value();
        if (used) engaged.push_back(&col);
    }

    out += cfg.sweep_param;
    for (const auto* col : engaged) out += std::string(",") + col->name;
    out += "\n";
    for (const auto& rec : records) {
        out += format_double(rec.sweep_value);
        for (const auto* col : engaged) {
            out += ",";
            const auto& v = rec.*col->field;
            if (v) out += format_double(*v);
        }
        out += "\n";
    }
    return out;
}

Allocation baseline_uniform_power(const ChannelRealization& ch, double total_power, const BerTargets& t,
                                  int b_max) {
    if (total_power < 0.0) throw std::invalid_argument("baseline_uniform_power: negative power");
    const int n = ch.size();
    const double p = total_power / n;
    Allocation a;
    a.bits.assign(static_cast<std::size_t>(n), 0);
    a.power_w.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        const double g = ch.cnr[static_cast<std::size_t>(i)];
        if (!(g > 0.0) || p <= 0.0) continue;
        const double gap = t.snr_gap(i);
        const int b = std::min(b_max, static_cast<int>(std::floor(std::log2(1.0 + g * p / gap))));
        if (b < 2) continue;
        a.bits[static_cast<std::size_t>(i)] = b;
        a.power_w[static_cast<std::size_t>(i)] = p;
        a.active_set.push_back(i);
    }
    return a;
}

Allocation baseline_uniform_bits(const ChannelRealization& ch, int bits_per_subcarrier, const BerTargets& t) {
    if (bits_per_subcarrier < 2) throw std::invalid_argument("baseline_uniform_bits: bits < 2");
    const int n = ch.size();
    Allocation a;
    a.bits.assign(static_cast<std::size_t>(n), bits_per_subcarrier);
    a.power_w.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        const double g = ch.cnr[static_cast<std::size_t>(i)];
        a.power_w[static_cast<std::size_t>(i)] =
            power_from_bits(static_cast<double>(bits_per_subcarrier), g, t.snr_gap(i));
        a.active_set.push_back(i);
    }
    return a;
}

} // namespace linkadapt

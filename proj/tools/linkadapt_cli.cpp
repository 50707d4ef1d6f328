#include "linkadapt/bitpower.hpp"
#include "linkadapt/channel.hpp"
#include "linkadapt/config.hpp"
#include "linkadapt/cr_bitpower.hpp"
#include "linkadapt/ga.hpp"
#include "linkadapt/harness.hpp"
#include "linkadapt/numeric.hpp"
#include "linkadapt/oracle.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitInfeasible = 2;

int default_workers() {
    if (const char* env = std::getenv("LINKADAPT_WORKERS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return 1;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << content;
}

std::string allocation_csv(const linkadapt::Allocation& a, const linkadapt::ChannelRealization& ch) {
    std::string out = "subcarrier,cnr,bits,power_w\n";
    for (std::size_t i = 0; i < a.bits.size(); ++i) {
        out += std::to_string(i) + "," + format_double(ch.cnr[i]) + "," + std::to_string(a.bits[i]) + "," +
               format_double(a.power_w[i]) + "\n";
    }
    out += "# total_bits = " + std::to_string(a.total_bits()) + "\n";
    out += "# total_power_w = " + format_double(a.total_power()) + "\n";
    out += "# objective = " + format_double(a.objective) + "\n";
    return out;
}

struct InstanceOptions {
    int n = 8;
    std::uint64_t seed = 1;
    double alpha = 0.5;
    double ber_th = 1e-4;
    int b_max = 6;
    double p_cap = 1e-3;
    double noise_var = 1e-16;
    double avg_gain = 1.0;
};

linkadapt::ChannelRealization sample_instance(const InstanceOptions& opt) {
    linkadapt::OfdmConfig ofdm{opt.n, 1.25e6 / opt.n, 0.0};
    linkadapt::Rng rng = linkadapt::Rng::substream(opt.seed, 0);
    return linkadapt::sample_rayleigh_channel(ofdm, opt.avg_gain, opt.noise_var, {}, rng);
}

void add_instance_flags(CLI::App* cmd, InstanceOptions& opt) {
    cmd->add_option("--n", opt.n, "number of subcarriers");
    cmd->add_option("--seed", opt.seed, "channel seed");
    cmd->add_option("--alpha", opt.alpha, "power/throughput tradeoff weight");
    cmd->add_option("--ber", opt.ber_th, "per-subcarrier BER threshold");
    cmd->add_option("--bmax", opt.b_max, "maximum bits per subcarrier");
    cmd->add_option("--pcap", opt.p_cap, "total power cap [W]");
    cmd->add_option("--noise", opt.noise_var, "noise variance [W]");
    cmd->add_option("--gain", opt.avg_gain, "average channel power gain");
}

int run_selftest() {
    using namespace linkadapt;
    int failures = 0;
    auto check = [&failures](bool ok, const char* what) {
        std::printf("%s %s\n", ok ? "[pass]" : "[FAIL]", what);
        if (!ok) ++failures;
    };

    const double gap = -std::log(5.0 * 1e-4) / 1.6;
    check(std::abs(10.0 * std::log10(gap) - 6.77) < 0.01, "SNR gap at BER 1e-4 is 6.77 dB");

    check(std::abs(exp_integral_ei(-1.0) + 0.21938393439552) < 1e-10, "Ei(-1) reference value");

    SensingModel s{0.05, 0.1, 0.5};
    SensingPosteriors post = sensing_posteriors(s);
    check(std::abs(post.beta_ov - 0.025 / 0.475) < 1e-12, "sensing posterior beta_ov");

    OfdmConfig ofdm{16, 1.25e6 / 16, 0.0};
    Rng rng = Rng::substream(7, 0);
    ChannelRealization ch = sample_rayleigh_channel(ofdm, 1.0, 1e-12, {}, rng);
    BerTargets t = BerTargets::uniform(16, 1e-4);
    MoopWeights w{0.5, 1.0, 1.0};
    ContinuousAllocation cont = allocate_power_capped(ch, w, t, 6, 1e-6);
    Allocation a = round_allocation(cont, ch, w, t);
    a = rounding_repair(std::move(a), ch, w, t, {LinearConstraint{{}, 1e-6}});
    check(a.total_power() <= 1e-6, "repair honors the power cap");

    bool ber_ok = true;
    for (std::size_t i = 0; i < a.bits.size(); ++i)
        if (a.bits[i] >= 2)
            ber_ok = ber_ok && std::abs(ber_mqam(a.power_w[i], a.bits[i], ch.cnr[i]) - 1e-4) < 1e-4 * 1e-9;
    check(ber_ok, "loaded subcarriers sit on the BER boundary");

    Rng r1 = Rng::substream(42, 3);
    Rng r2 = Rng::substream(42, 3);
    bool det = true;
    for (int i = 0; i < 64; ++i) det = det && r1.next_u64() == r2.next_u64();
    check(det, "substreams are reproducible");

    PuBand wide;
    wide.bandwidth_hz = 4.0e9;
    wide.spectral_offsets_hz.assign(16, 0.0);
    check(std::abs(leakage_factor(ofdm, wide, 0) - 1.0) < 1e-4, "leakage of a very wide band approaches 1");

    return failures == 0 ? kExitOk : kExitConfigError;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multiobjective bit/power loading simulator for multicarrier links"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "execute an experiment config and emit CSV");
    std::string config_path;
    std::string out_path;
    std::int64_t seed_override = -1;
    int workers = default_workers();
    run->add_option("config", config_path, "experiment config file")->required();
    run->add_option("--seed", seed_override, "override the config seed");
    run->add_option("--out", out_path, "output CSV path (default stdout)");
    run->add_option("--workers", workers, "worker thread count");

    // allocate
    auto* alloc = app.add_subcommand("allocate", "single-shot closed-form allocation");
    InstanceOptions alloc_opt;
    add_instance_flags(alloc, alloc_opt);
    std::string alloc_out;
    alloc->add_option("--out", alloc_out, "output path (default stdout)");

    // oracle
    auto* oracle_cmd = app.add_subcommand("oracle", "exhaustive search on a small instance");
    InstanceOptions oracle_opt;
    add_instance_flags(oracle_cmd, oracle_opt);
    std::string oracle_out;
    oracle_cmd->add_option("--out", oracle_out, "output path (default stdout)");

    // ga
    auto* ga_cmd = app.add_subcommand("ga", "genetic algorithm on the average-BER problem");
    InstanceOptions ga_opt;
    add_instance_flags(ga_cmd, ga_opt);
    int ga_pop = 100;
    int ga_gens = 300;
    std::string ga_out;
    ga_cmd->add_option("--population", ga_pop, "population size");
    ga_cmd->add_option("--generations", ga_gens, "maximum generations");
    ga_cmd->add_option("--out", ga_out, "generation log output path (default stdout)");

    // selftest
    app.add_subcommand("selftest", "run the built-in invariant battery");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            linkadapt::ExperimentConfig cfg = linkadapt::load_experiment_config(config_path);
            if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
            std::vector<linkadapt::MetricRecord> records = linkadapt::run_experiment(cfg, workers);
            write_output(out_path, linkadapt::metrics_to_csv(cfg, records));
            return kExitOk;
        }
        if (alloc->parsed()) {
            linkadapt::ChannelRealization ch = sample_instance(alloc_opt);
            linkadapt::BerTargets t = linkadapt::BerTargets::uniform(alloc_opt.n, alloc_opt.ber_th);
            linkadapt::MoopWeights w{alloc_opt.alpha, 1.0, 1.0};
            linkadapt::ContinuousAllocation cont =
                linkadapt::allocate_power_capped(ch, w, t, alloc_opt.b_max, alloc_opt.p_cap);
            linkadapt::Allocation a = linkadapt::round_allocation(cont, ch, w, t);
            a = linkadapt::rounding_repair(std::move(a), ch, w, t,
                                           {linkadapt::LinearConstraint{{}, alloc_opt.p_cap}});
            write_output(alloc_out, allocation_csv(a, ch));
            return kExitOk;
        }
        if (oracle_cmd->parsed()) {
            linkadapt::ChannelRealization ch = sample_instance(oracle_opt);
            linkadapt::BerTargets t = linkadapt::BerTargets::uniform(oracle_opt.n, oracle_opt.ber_th);
            linkadapt::MoopWeights w{oracle_opt.alpha, 1.0, 1.0};
            linkadapt::Allocation best = linkadapt::exhaustive_search(
                ch, w, t, oracle_opt.b_max, {linkadapt::LinearConstraint{{}, oracle_opt.p_cap}});
            write_output(oracle_out, allocation_csv(best, ch));
            return kExitOk;
        }
        if (ga_cmd->parsed()) {
            linkadapt::ChannelRealization ch = sample_instance(ga_opt);
            linkadapt::GaProblem prob;
            prob.ch = &ch;
            prob.weights = linkadapt::MoopWeights{ga_opt.alpha, 1.0, 1.0};
            prob.ber_threshold = ga_opt.ber_th;
            prob.p_cap = ga_opt.p_cap;
            prob.b_max = ga_opt.b_max;
            linkadapt::GaConfig gcfg;
            gcfg.population = ga_pop;
            gcfg.max_generations = ga_gens;
            linkadapt::Rng rng = linkadapt::Rng::substream(ga_opt.seed, 1);
            linkadapt::GaResult result = linkadapt::evolve(prob, gcfg, rng);
            std::string csv = "generation,best,mean,feasible_fraction\n";
            for (const auto& row : result.log)
                csv += std::to_string(row.generation) + "," + format_double(row.best_fitness) + "," +
                       format_double(row.mean_fitness) + "," + format_double(row.feasible_fraction) + "\n";
            csv += "# best_objective = " + format_double(result.best.objective) + "\n";
            csv += "# best_feasible = " + std::string(result.best.feasible ? "true" : "false") + "\n";
            write_output(ga_out, csv);
            return kExitOk;
        }
        return run_selftest();
    } catch (const linkadapt::InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
}

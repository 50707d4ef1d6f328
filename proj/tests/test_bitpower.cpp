#include "linkadapt/bitpower.hpp"

#include "linkadapt/channel.hpp"
#include "linkadapt/oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace linkadapt;

namespace {

ChannelRealization channel_from_cnr(std::vector<double> cnr) {
    ChannelRealization ch;
    ch.cnr = std::move(cnr);
    ch.gains = ch.cnr;
    ch.noise_var_w = 1.0;
    ch.interference_w.assign(ch.cnr.size(), 0.0);
    return ch;
}

ChannelRealization random_channel(int n, double mean_cnr, std::uint64_t seed) {
    Rng rng = Rng::substream(seed, 17);
    std::vector<double> cnr(static_cast<std::size_t>(n));
    for (auto& g : cnr) g = rng.exponential(mean_cnr);
    return channel_from_cnr(std::move(cnr));
}

} // namespace

TEST_CASE("ber_mqam: limits, inversion, direct evaluation") {
    CHECK(ber_mqam(0.0, 2, 100.0) == doctest::Approx(0.2));

    // Power from the active constraint reproduces the threshold exactly.
    const double gap = -std::log(5.0 * 1e-4) / 1.6;
    for (int b = 2; b <= 8; ++b) {
        const double p = gap / 50.0 * (std::exp2(b) - 1.0);
        CHECK(ber_mqam(p, b, 50.0) == doctest::Approx(1e-4).epsilon(1e-12));
    }

    CHECK(ber_mqam(0.1425, 2, 100.0) ==
          doctest::Approx(0.2 * std::exp(-1.6 * 0.1425 * 100.0 / 3.0)).epsilon(1e-14));
    CHECK_THROWS_AS(ber_mqam(0.1, 0, 100.0), std::domain_error);
}

TEST_CASE("power_from_bits: nulled subcarrier, paper gap value, direct evaluation") {
    CHECK(power_from_bits(0.0, 123.0, 4.75) == 0.0);

    const double gap = -std::log(5.0 * 1e-4) / 1.6;
    CHECK(gap == doctest::Approx(4.7506).epsilon(1e-4));
    CHECK(10.0 * std::log10(gap) == doctest::Approx(6.77).epsilon(0.002));

    CHECK(power_from_bits(4.0, 500.0, 4.7506) == doctest::Approx(4.7506 * 15.0 / 500.0).epsilon(1e-12));
    CHECK_THROWS_AS(power_from_bits(3.0, 0.0, 4.75), InfeasibleError);
}

TEST_CASE("allocate_relaxed: closed form, threshold, caps") {
    BerTargets t = BerTargets::uniform(1, 1e-4);
    const double gap = t.snr_gap(0);
    MoopWeights w{0.5, 1.0, 1.0};

    ChannelRealization ch = channel_from_cnr({1000.0});
    ContinuousAllocation a = allocate_relaxed(ch, w, t, kUnboundedBits);
    const double expect = std::log2(1.0 / std::log(2.0) * 1000.0 / gap);
    CHECK(a.bits[0] == doctest::Approx(expect).epsilon(1e-12));
    CHECK(expect == doctest::Approx(8.2465).epsilon(1e-3));

    ContinuousAllocation capped = allocate_relaxed(ch, w, t, 6.0);
    CHECK(capped.bits[0] == 6.0);
    CHECK(capped.power_w[0] == doctest::Approx(gap / 1000.0 * 63.0));

    // gamma below the b>=2 threshold nulls the subcarrier.
    const double gamma_min = std::log(2.0) * gap * 4.0; // alpha = 0.5, u = 1
    CHECK(gamma_min == doctest::Approx(13.17).epsilon(1e-2));
    ChannelRealization weak = channel_from_cnr({10.0});
    ContinuousAllocation nulled = allocate_relaxed(weak, w, t, 6.0);
    CHECK(nulled.bits[0] == 0.0);
    CHECK(nulled.power_w[0] == 0.0);

    // Exactly at the threshold: loaded with b = 2.
    ChannelRealization edge = channel_from_cnr({gamma_min});
    CHECK(allocate_relaxed(edge, w, t, 6.0).bits[0] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("allocate_relaxed: degenerate weights") {
    BerTargets t = BerTargets::uniform(3, 1e-4);
    ChannelRealization ch = channel_from_cnr({50.0, 500.0, 5000.0});

    ContinuousAllocation all_null = allocate_relaxed(ch, MoopWeights{1.0, 1.0, 1.0}, t, 6.0);
    CHECK(all_null.total_bits() == 0.0);

    ContinuousAllocation all_max = allocate_relaxed(ch, MoopWeights{0.0, 1.0, 1.0}, t, 6.0);
    for (double b : all_max.bits) CHECK(b == 6.0);

    CHECK_THROWS_AS(allocate_relaxed(ch, MoopWeights{0.0, 1.0, 1.0}, t, kUnboundedBits), std::domain_error);
}

TEST_CASE("allocate_relaxed: b_max engages exactly at the cap threshold") {
    BerTargets t = BerTargets::uniform(1, 1e-4);
    MoopWeights w{0.35, 1.0, 1.0};
    const double gap = t.snr_gap(0);
    const double k = (w.alpha / w.u_power) * std::log(2.0) / ((1.0 - w.alpha) / w.u_bits);
    const double gamma_cap = k * gap * std::exp2(6.0);
    for (double f : {0.9, 0.999, 1.0, 1.001, 1.5}) {
        ChannelRealization ch = channel_from_cnr({f * gamma_cap});
        ContinuousAllocation a = allocate_relaxed(ch, w, t, 6.0);
        if (f >= 1.0)
            CHECK(a.bits[0] == 6.0);
        else
            CHECK(a.bits[0] < 6.0);
    }
}

TEST_CASE("allocate_power_capped: inactive cap returns the relaxed solution") {
    BerTargets t = BerTargets::uniform(4, 1e-4);
    MoopWeights w{0.5, 1.0, 1.0};
    ChannelRealization ch = random_channel(4, 1000.0, 5);
    ContinuousAllocation relaxed = allocate_relaxed(ch, w, t, 6.0);
    ContinuousAllocation capped = allocate_power_capped(ch, w, t, 6.0, 1e9);
    CHECK(relaxed.bits == capped.bits);
    CHECK(capped.multipliers.lambda_power == 0.0);
}

TEST_CASE("allocate_power_capped: symmetric channel fills the cap evenly") {
    BerTargets t = BerTargets::uniform(8, 1e-4);
    MoopWeights w{0.5, 1.0, 1.0};
    ChannelRealization ch = channel_from_cnr(std::vector<double>(8, 800.0));
    const double relaxed_power = allocate_relaxed(ch, w, t, 6.0).total_power();
    const double cap = relaxed_power / 3.0;
    ContinuousAllocation a = allocate_power_capped(ch, w, t, 6.0, cap);
    for (int i = 1; i < 8; ++i) CHECK(a.bits[static_cast<std::size_t>(i)] == doctest::Approx(a.bits[0]));
    CHECK(a.total_power() == doctest::Approx(cap).epsilon(1e-9));
    CHECK(a.multipliers.lambda_power > 0.0);
}

TEST_CASE("allocate_power_capped: KKT residuals of the closed form") {
    BerTargets t = BerTargets::uniform(6, 1e-4);
    MoopWeights w{0.5, 1.0, 1.0};
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        ChannelRealization ch = random_channel(6, 2000.0, seed);
        const double relaxed_power = allocate_relaxed(ch, w, t, 6.0).total_power();
        const double cap = 0.4 * relaxed_power;
        ContinuousAllocation a = allocate_power_capped(ch, w, t, 6.0, cap);
        const double lambda = a.multipliers.lambda_power;

        // Complementary slackness.
        CHECK(std::abs(lambda * (a.total_power() - cap)) <= 1e-8 * cap * std::max(lambda, 1.0));
        // Stationarity on interior subcarriers (0 < b < b_max):
        //   (alpha + lambda) ln2 (gap/gamma) 2^b = (1 - alpha)
        for (int i = 0; i < 6; ++i) {
            const double b = a.bits[static_cast<std::size_t>(i)];
            if (b <= 0.0 || b >= 6.0) continue;
            const double resid = (w.alpha + lambda) * std::log(2.0) * t.snr_gap(i) /
                                     ch.cnr[static_cast<std::size_t>(i)] * std::exp2(b) -
                                 (1.0 - w.alpha);
            CHECK(std::abs(resid) <= 1e-8);
        }
    }
}

TEST_CASE("rounding repair: no-op, forced move, oracle proximity") {
    BerTargets t = BerTargets::uniform(2, 1e-4);
    MoopWeights w{0.5, 1.0, 1.0};
    ChannelRealization ch = channel_from_cnr({500.0, 900.0});

    Allocation feasible;
    feasible.bits = {2, 3};
    feasible.power_w = {power_from_bits(2, 500.0, t.snr_gap(0)), power_from_bits(3, 900.0, t.snr_gap(1))};
    Allocation same = rounding_repair(feasible, ch, w, t, {LinearConstraint{{}, 1.0}});
    CHECK(same.bits == feasible.bits);

    // Cap forcing exactly one decrement on the priciest subcarrier.
    Allocation over;
    over.bits = {4, 4};
    over.power_w = {power_from_bits(4, 500.0, t.snr_gap(0)), power_from_bits(4, 900.0, t.snr_gap(1))};
    const double total = over.power_w[0] + over.power_w[1];
    Allocation fixed = rounding_repair(over, ch, w, t, {LinearConstraint{{}, total * 0.95}});
    CHECK(fixed.bits[0] == 3); // lower cnr: larger delta_p
    CHECK(fixed.bits[1] == 4);
    CHECK(fixed.total_power() <= total * 0.95);
}

TEST_CASE("closed form plus repair lands within 5% of the oracle") {
    MoopWeights w{0.5, 1.0, 1.0};
    int checked = 0;
    for (int n : {4, 6}) {
        BerTargets t = BerTargets::uniform(n, 1e-4);
        for (std::uint64_t seed = 1; seed <= 25; ++seed) {
            ChannelRealization ch = random_channel(n, 3000.0, seed * 31);
            const double relaxed_power = allocate_relaxed(ch, w, t, 6.0).total_power();
            if (relaxed_power <= 0.0) continue;
            const double cap = 0.5 * relaxed_power;
            std::vector<LinearConstraint> cs{LinearConstraint{{}, cap}};

            ContinuousAllocation cont = allocate_power_capped(ch, w, t, 6.0, cap);
            Allocation a = round_allocation(cont, ch, w, t);
            a = rounding_repair(std::move(a), ch, w, t, cs);
            CHECK(a.total_power() <= cap * (1.0 + 1e-12));

            Allocation best = exhaustive_search(ch, w, t, 6, cs);
            CHECK(best.objective <= a.objective + 1e-12);
            CHECK(std::abs(a.objective - best.objective) <= 0.05 * std::abs(best.objective));
            ++checked;
        }
    }
    CHECK(checked >= 40);
}

TEST_CASE("active-BER holds on every loaded subcarrier after repair") {
    MoopWeights w{0.4, 1.0, 1.0};
    BerTargets t = BerTargets::uniform(16, 1e-4);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        ChannelRealization ch = random_channel(16, 1500.0, seed + 100);
        const double cap = 0.3 * std::max(allocate_relaxed(ch, w, t, 6.0).total_power(), 1e-12);
        ContinuousAllocation cont = allocate_power_capped(ch, w, t, 6.0, cap);
        Allocation a = round_allocation(cont, ch, w, t);
        a = rounding_repair(std::move(a), ch, w, t, {LinearConstraint{{}, cap}});
        for (int i = 0; i < 16; ++i) {
            const int b = a.bits[static_cast<std::size_t>(i)];
            if (b == 0) {
                CHECK(a.power_w[static_cast<std::size_t>(i)] == 0.0);
                continue;
            }
            CHECK(b >= 2);
            CHECK(b <= 6);
            const double ber = ber_mqam(a.power_w[static_cast<std::size_t>(i)], b,
                                        ch.cnr[static_cast<std::size_t>(i)]);
            CHECK(std::abs(ber - 1e-4) <= 1e-9 * 1e-4);
        }
    }
}

TEST_CASE("monotonicity: raising alpha never raises bits or power") {
    BerTargets t = BerTargets::uniform(12, 1e-4);
    ChannelRealization ch = random_channel(12, 2000.0, 77);
    double prev_bits = 1e300;
    double prev_power = 1e300;
    for (double alpha : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) {
        ContinuousAllocation a = allocate_relaxed(ch, MoopWeights{alpha, 1.0, 1.0}, t, 6.0);
        CHECK(a.total_bits() <= prev_bits + 1e-12);
        CHECK(a.total_power() <= prev_power + 1e-12);
        prev_bits = a.total_bits();
        prev_power = a.total_power();
    }
}

TEST_CASE("bisect_alpha: inactive cap returns the initial weight") {
    BerTargets t = BerTargets::uniform(8, 1e-4);
    ChannelRealization ch = random_channel(8, 1000.0, 11);
    auto [alpha, a] = bisect_alpha(ch, t, 6.0, 1e6, 0.5, 1e-9);
    CHECK(alpha == 0.5);
    CHECK(a.total_power() < 1e6);
}

TEST_CASE("bisect_alpha: tight cap drives alpha toward one") {
    BerTargets t = BerTargets::uniform(8, 1e-4);
    ChannelRealization ch = random_channel(8, 1000.0, 13);
    auto [alpha, a] = bisect_alpha(ch, t, 6.0, 1e-30, 0.5, 1e-9);
    CHECK(alpha > 0.99);
    CHECK(a.total_bits() == 0);
}

TEST_CASE("bisect_alpha: one-subcarrier crossing is smooth and hits the tolerance") {
    BerTargets t = BerTargets::uniform(1, 1e-4);
    ChannelRealization ch = channel_from_cnr({2.0e6});
    const double unconstrained = allocate_relaxed(ch, MoopWeights{0.5, 1.0, 1.0}, t, 10.0).total_power();
    const double cap = 0.5 * unconstrained;
    const double tol = 1e-12;

    auto [alpha, a] = bisect_alpha(ch, t, 10.0, cap, 0.5, tol);
    CHECK(alpha > 0.5);
    CHECK(a.total_power() <= cap * (1.0 + 1e-12));
    const double cont = allocate_relaxed(ch, MoopWeights{alpha, 1.0, 1.0}, t, 10.0).total_power();
    CHECK(cont <= cap);
    CHECK(cap - cont <= tol);
}

TEST_CASE("bisect_alpha: Ch2-style instance meets the cap from below") {
    // N = 128, BER 1e-4, P_th = 0.1 mW; mean CNR large enough that several
    // subcarriers fit under the cap.
    const int n = 128;
    BerTargets t = BerTargets::uniform(n, 1e-4);
    OfdmConfig cfg{n, 1.25e6 / n, 0.0};
    Rng rng = Rng::substream(2024, 0);
    ChannelRealization ch = sample_rayleigh_channel(cfg, 1e6, 1.0, {}, rng);
    const double cap = 1e-4;
    const double tol = 1e-9;

    const double unconstrained = allocate_relaxed(ch, MoopWeights{0.5, 1.0, 1.0}, t, 6.0).total_power();
    REQUIRE(unconstrained > cap);

    auto [alpha, a] = bisect_alpha(ch, t, 6.0, cap, 0.5, tol);
    CHECK(alpha > 0.5);
    CHECK(a.total_power() <= cap * (1.0 + 1e-12));
    const double cont = allocate_relaxed(ch, MoopWeights{alpha, 1.0, 1.0}, t, 6.0).total_power();
    CHECK(cont <= cap);
    // The crossing may sit on a nulling jump; the gap is then at most one
    // minimal-constellation step on the marginal subcarrier.
    CHECK(cap - cont <= 1e-5);
}

TEST_CASE("analytic averages: vanishing CNR limit and linear scaling in N") {
    BerTargets t = BerTargets::uniform(1, 1e-4);
    MoopWeights w{0.5, 1.0, 1.0};
    AnalyticAverages hopeless = analytic_averages(1e9, w, t, 4);
    CHECK(hopeless.avg_throughput_bits < 1e-6);
    CHECK(hopeless.avg_power_w < 1e-6);

    AnalyticAverages one = analytic_averages(1e-3, w, t, 1);
    AnalyticAverages many = analytic_averages(1e-3, w, t, 64);
    CHECK(many.avg_throughput_bits == doctest::Approx(64.0 * one.avg_throughput_bits).epsilon(1e-12));
    CHECK(many.avg_power_w == doctest::Approx(64.0 * one.avg_power_w).epsilon(1e-12));
}

TEST_CASE("analytic averages: Monte Carlo oracle at 2e5 samples") {
    const int n = 16;
    BerTargets t = BerTargets::uniform(n, 1e-4);
    MoopWeights w{0.5, 1.0, 1.0};
    const double nu = 1e-3; // 30 dB mean CNR

    OfdmConfig cfg{n, 1e4, 0.0};
    Rng rng = Rng::substream(31337, 0);
    double bits = 0.0;
    double power = 0.0;
    const int trials = 12500; // 2e5 subcarrier samples
    for (int k = 0; k < trials; ++k) {
        ChannelRealization ch = sample_rayleigh_channel(cfg, 1.0 / nu, 1.0, {}, rng);
        ContinuousAllocation a = allocate_relaxed(ch, w, t, kUnboundedBits);
        bits += a.total_bits();
        power += a.total_power();
    }
    bits /= trials;
    power /= trials;

    AnalyticAverages av = analytic_averages(nu, w, t, n);
    CHECK(std::abs(bits - av.avg_throughput_bits) <= 0.02 * av.avg_throughput_bits);
    CHECK(std::abs(power - av.avg_power_w) <= 0.02 * av.avg_power_w);
}

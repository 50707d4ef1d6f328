#include "linkadapt/cr_bitpower.hpp"

#include "linkadapt/bitpower.hpp"
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
    Rng rng = Rng::substream(seed, 23);
    std::vector<double> cnr(static_cast<std::size_t>(n));
    for (auto& g : cnr) g = rng.exponential(mean_cnr);
    return channel_from_cnr(std::move(cnr));
}

// Synthetic caps: no geometry, just direct numbers and leakage rows.
InterferenceCaps direct_caps(double power_cap, std::vector<double> aci_caps,
                             std::vector<std::vector<double>> leakage) {
    InterferenceCaps caps;
    caps.power_cap_w = power_cap;
    caps.aci_caps_w = std::move(aci_caps);
    caps.leakage = std::move(leakage);
    return caps;
}

std::vector<double> half_leakage(int n) { return std::vector<double>(static_cast<std::size_t>(n), 0.5); }

} // namespace

TEST_CASE("build_caps: perfect sensing keeps the plain power budget") {
    OfdmConfig ofdm{8, 1.25e6 / 8, 0.0};
    PathLossModel pl{100.0, 4.0, 0.33};
    PuBand co;
    co.distance_m = 1000.0;
    co.interference_threshold_w = 1e-14;
    co.fading_margin_db = 0.0;

    InterferenceCaps caps = build_caps(1e-3, {}, co, SensingModel{0.0, 0.0, 0.5}, {}, pl, ofdm);
    CHECK(caps.power_cap_w == 1e-3);
    CHECK(caps.aci_caps_w.empty());
}

TEST_CASE("build_caps: hand evaluation with the Ch3-style geometry") {
    OfdmConfig ofdm{8, 1.25e6 / 8, 0.0};
    PathLossModel pl{100.0, 4.0, 0.33};
    SensingModel s_m{0.05, 0.1, 0.5};

    PuBand co;
    co.distance_m = 1000.0;
    co.interference_threshold_w = 1e-14;
    co.fading_margin_db = 0.0;

    PuBand adj;
    adj.distance_m = 1500.0;
    adj.interference_threshold_w = 1e-14;
    adj.fading_margin_db = 0.0;
    adj.bandwidth_hz = 1e5;
    adj.spectral_offsets_hz = band_offsets(ofdm, 1.5e6);

    const double beta_ov = 0.025 / 0.475;
    const double beta_oo = 0.475 / 0.525;
    const double pl_m = 20.0 * std::log10(4.0 * M_PI * 100.0 / 0.33) + 40.0;
    const double pl_l = 20.0 * std::log10(4.0 * M_PI * 100.0 / 0.33) + 40.0 * std::log10(15.0);
    const double expect_power = std::min(1e-3, 1.0 / beta_ov * std::pow(10.0, 0.1 * pl_m) * 1e-14);
    const double expect_aci = 1.0 / beta_oo * std::pow(10.0, 0.1 * pl_l) * 1e-14;

    InterferenceCaps caps = build_caps(1e-3, {adj}, co, s_m, {s_m}, pl, ofdm);
    CHECK(caps.power_cap_w == doctest::Approx(expect_power).epsilon(1e-12));
    CHECK(caps.aci_caps_w[0] == doctest::Approx(expect_aci).epsilon(1e-12));
    CHECK(caps.leakage.size() == 1);
    for (double lf : caps.leakage[0]) {
        CHECK(lf >= 0.0);
        CHECK(lf <= 1.0);
    }
}

TEST_CASE("build_caps: a 10 dB fading margin backs the interference cap off tenfold") {
    OfdmConfig ofdm{4, 1e5, 0.0};
    PathLossModel pl{100.0, 4.0, 0.33};
    SensingModel s{0.05, 0.1, 0.5};
    PuBand co;
    co.distance_m = 1000.0;
    co.interference_threshold_w = 1e-14;

    PuBand co_fm = co;
    co_fm.fading_margin_db = 10.0;

    InterferenceCaps base = build_caps(1e9, {}, co, s, {}, pl, ofdm);
    InterferenceCaps margin = build_caps(1e9, {}, co_fm, s, {}, pl, ofdm);
    CHECK(margin.power_cap_w == doctest::Approx(0.1 * base.power_cap_w).epsilon(1e-12));
}

TEST_CASE("solve_multipliers: inactive constraint settles at zero") {
    auto violation = [](const std::vector<double>& l) {
        return std::vector<double>{-1.0 - l[0]}; // already satisfied
    };
    MultiplierSolve sol = solve_multipliers(violation, {5.0}, {1.0});
    CHECK(sol.lambdas[0] == 0.0);
}

TEST_CASE("solve_multipliers: single constraint reproduces the closed-form lambda") {
    const int n = 6;
    BerTargets t = BerTargets::uniform(n, 1e-4);
    MoopWeights w{0.5, 1.0, 1.0};
    ChannelRealization ch = random_channel(n, 2500.0, 41);
    const double cap = 0.35 * allocate_relaxed(ch, w, t, 6.0).total_power();

    ContinuousAllocation a = allocate_power_capped(ch, w, t, 6.0, cap);
    const double lambda_closed = a.multipliers.lambda_power;

    InterferenceCaps caps = direct_caps(cap, {}, {});
    ContinuousAllocation b = allocate_cr_continuous(ch, w, t, 6.0, caps);
    CHECK(b.multipliers.lambda_power == doctest::Approx(lambda_closed).epsilon(1e-10));
    CHECK(b.total_power() == doctest::Approx(cap).epsilon(1e-9));
}

TEST_CASE("solve_multipliers: infeasible bracket raises") {
    auto violation = [](const std::vector<double>& l) {
        (void)l;
        return std::vector<double>{1.0}; // never satisfiable
    };
    CHECK_THROWS_AS(solve_multipliers(violation, {0.0}, {1.0}), InfeasibleError);
}

TEST_CASE("allocate_cr: infinite caps reduce to the relaxed allocator") {
    const int n = 12;
    BerTargets t = BerTargets::uniform(n, 1e-4);
    MoopWeights w{0.5, 1.0, 1.0};
    ChannelRealization ch = random_channel(n, 1200.0, 3);
    InterferenceCaps caps = direct_caps(1e12, {1e12}, {half_leakage(n)});

    Allocation cr = allocate_cr(ch, w, t, 6.0, caps);
    ContinuousAllocation relaxed = allocate_relaxed(ch, w, t, 6.0);
    Allocation rounded = round_allocation(relaxed, ch, w, t);
    CHECK(cr.bits == rounded.bits);
    CHECK(cr.multipliers.lambda_power == 0.0);
}

TEST_CASE("allocate_cr: tight ACI cap alone is met with equality before rounding") {
    const int n = 10;
    BerTargets t = BerTargets::uniform(n, 1e-4);
    MoopWeights w{0.5, 1.0, 1.0};
    ChannelRealization ch = random_channel(n, 3000.0, 8);

    ContinuousAllocation relaxed = allocate_relaxed(ch, w, t, 6.0);
    std::vector<double> leak(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) leak[static_cast<std::size_t>(i)] = 0.1 + 0.05 * i;
    double relaxed_weighted = 0.0;
    for (int i = 0; i < n; ++i)
        relaxed_weighted += leak[static_cast<std::size_t>(i)] * relaxed.power_w[static_cast<std::size_t>(i)];
    const double aci_cap = 0.3 * relaxed_weighted;

    InterferenceCaps caps = direct_caps(1e12, {aci_cap}, {leak});
    ContinuousAllocation cont = allocate_cr_continuous(ch, w, t, 6.0, caps);
    double weighted = 0.0;
    for (int i = 0; i < n; ++i)
        weighted += leak[static_cast<std::size_t>(i)] * cont.power_w[static_cast<std::size_t>(i)];
    CHECK(std::abs(weighted - aci_cap) <= 1e-8 * aci_cap);
    CHECK(cont.multipliers.lambda_power == 0.0);
    CHECK(cont.multipliers.lambda_aci[0] > 0.0);
}

TEST_CASE("allocate_cr: complementary slackness at the continuous stage") {
    const int n = 8;
    BerTargets t = BerTargets::uniform(n, 1e-4);
    MoopWeights w{0.5, 1.0, 1.0};
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        ChannelRealization ch = random_channel(n, 2500.0, seed * 7);
        ContinuousAllocation relaxed = allocate_relaxed(ch, w, t, 6.0);
        if (relaxed.total_power() <= 0.0) continue;
        std::vector<double> leak = half_leakage(n);
        const double pow_cap = 0.5 * relaxed.total_power();
        const double aci_cap = 0.4 * 0.5 * relaxed.total_power();
        InterferenceCaps caps = direct_caps(pow_cap, {aci_cap}, {leak});

        ContinuousAllocation cont = allocate_cr_continuous(ch, w, t, 6.0, caps);
        const double slack_pow = cont.total_power() - pow_cap;
        double weighted = 0.0;
        for (int i = 0; i < n; ++i) weighted += 0.5 * cont.power_w[static_cast<std::size_t>(i)];
        const double slack_aci = weighted - aci_cap;

        CHECK(slack_pow <= 1e-8 * pow_cap);
        CHECK(slack_aci <= 1e-8 * aci_cap);
        CHECK(std::abs(cont.multipliers.lambda_power * slack_pow) <=
              1e-8 * pow_cap * std::max(1.0, cont.multipliers.lambda_power));
        CHECK(std::abs(cont.multipliers.lambda_aci[0] * slack_aci) <=
              1e-8 * aci_cap * std::max(1.0, cont.multipliers.lambda_aci[0]));
    }
}

TEST_CASE("allocate_cr: two-band multipliers are self-consistent") {
    const int n = 12;
    BerTargets t = BerTargets::uniform(n, 1e-4);
    MoopWeights w{0.5, 1.0, 1.0};
    ChannelRealization ch = random_channel(n, 2600.0, 71);
    ContinuousAllocation relaxed = allocate_relaxed(ch, w, t, 6.0);
    REQUIRE(relaxed.total_power() > 0.0);

    std::vector<double> leak_a(static_cast<std::size_t>(n));
    std::vector<double> leak_b(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        leak_a[static_cast<std::size_t>(i)] = 0.05 + 0.9 * i / (n - 1.0);
        leak_b[static_cast<std::size_t>(i)] = 0.95 - 0.9 * i / (n - 1.0);
    }
    double ra = 0.0;
    double rb = 0.0;
    for (int i = 0; i < n; ++i) {
        ra += leak_a[static_cast<std::size_t>(i)] * relaxed.power_w[static_cast<std::size_t>(i)];
        rb += leak_b[static_cast<std::size_t>(i)] * relaxed.power_w[static_cast<std::size_t>(i)];
    }
    InterferenceCaps caps = direct_caps(1e12, {0.4 * ra, 0.5 * rb}, {leak_a, leak_b});

    ContinuousAllocation cont = allocate_cr_continuous(ch, w, t, 6.0, caps);
    // Recompute both weighted sums from the returned allocation.
    for (int band = 0; band < 2; ++band) {
        const auto& leak = band == 0 ? leak_a : leak_b;
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            s += leak[static_cast<std::size_t>(i)] * cont.power_w[static_cast<std::size_t>(i)];
        const double cap = caps.aci_caps_w[static_cast<std::size_t>(band)];
        const double lambda = cont.multipliers.lambda_aci[static_cast<std::size_t>(band)];
        CHECK(s <= cap * (1.0 + 1e-8));
        if (lambda > 0.0) CHECK(std::abs(s - cap) <= 1e-8 * cap);
    }
}

TEST_CASE("allocate_cr: post-repair feasibility and active-BER on every load") {
    const int n = 16;
    BerTargets t = BerTargets::uniform(n, 1e-4);
    MoopWeights w{0.4, 1.0, 1.0};
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        ChannelRealization ch = random_channel(n, 1800.0, seed * 13 + 1);
        ContinuousAllocation relaxed = allocate_relaxed(ch, w, t, 6.0);
        if (relaxed.total_power() <= 0.0) continue;
        std::vector<double> leak(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) leak[static_cast<std::size_t>(i)] = 0.02 + 0.96 * i / (n - 1.0);
        const double pow_cap = 0.45 * relaxed.total_power();
        double relaxed_weighted = 0.0;
        for (int i = 0; i < n; ++i)
            relaxed_weighted += leak[static_cast<std::size_t>(i)] * relaxed.power_w[static_cast<std::size_t>(i)];
        const double aci_cap = 0.35 * relaxed_weighted;
        InterferenceCaps caps = direct_caps(pow_cap, {aci_cap}, {leak});

        Allocation a = allocate_cr(ch, w, t, 6.0, caps);
        CHECK(a.total_power() <= pow_cap * (1.0 + 1e-12));
        double weighted = 0.0;
        for (int i = 0; i < n; ++i)
            weighted += leak[static_cast<std::size_t>(i)] * a.power_w[static_cast<std::size_t>(i)];
        CHECK(weighted <= aci_cap * (1.0 + 1e-12));
        for (int i = 0; i < n; ++i) {
            const int b = a.bits[static_cast<std::size_t>(i)];
            if (b == 0) continue;
            CHECK(b >= 2);
            const double ber = ber_mqam(a.power_w[static_cast<std::size_t>(i)], b,
                                        ch.cnr[static_cast<std::size_t>(i)]);
            CHECK(std::abs(ber - 1e-4) <= 1e-9 * 1e-4);
        }
    }
}

TEST_CASE("allocate_cr: objective within 5% of the oracle under tight caps") {
    MoopWeights w{0.5, 1.0, 1.0};
    for (int n : {4, 6}) {
        BerTargets t = BerTargets::uniform(n, 1e-4);
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            ChannelRealization ch = random_channel(n, 4000.0, seed * 3 + 500);
            ContinuousAllocation relaxed = allocate_relaxed(ch, w, t, 6.0);
            if (relaxed.total_power() <= 0.0) continue;
            std::vector<double> leak(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) leak[static_cast<std::size_t>(i)] = 0.1 + 0.8 * i / (n - 1.0);
            const double pow_cap = 0.5 * relaxed.total_power();
            double rw = 0.0;
            for (int i = 0; i < n; ++i)
                rw += leak[static_cast<std::size_t>(i)] * relaxed.power_w[static_cast<std::size_t>(i)];
            const double aci_cap = 0.45 * rw;
            InterferenceCaps caps = direct_caps(pow_cap, {aci_cap}, {leak});

            Allocation a = allocate_cr(ch, w, t, 6.0, caps);
            std::vector<LinearConstraint> cs{LinearConstraint{{}, pow_cap}, LinearConstraint{leak, aci_cap}};
            Allocation best = exhaustive_search(ch, w, t, 6, cs);
            CHECK(best.objective <= a.objective + 1e-12);
            CHECK(std::abs(a.objective - best.objective) <= 0.05 * std::abs(best.objective) + 1e-15);
        }
    }
}

TEST_CASE("allocate_cr: throughput component nonincreasing in alpha") {
    const int n = 12;
    BerTargets t = BerTargets::uniform(n, 1e-4);
    ChannelRealization ch = random_channel(n, 2000.0, 314);
    InterferenceCaps caps = direct_caps(1e-2, {5e-3}, {half_leakage(n)});
    double prev_bits = 1e308;
    for (double alpha : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) {
        ContinuousAllocation cont = allocate_cr_continuous(ch, MoopWeights{alpha, 1.0, 1.0}, t, 6.0, caps);
        // Tolerance covers multiplier-solver jitter while a cap stays active.
        CHECK(cont.total_bits() <= prev_bits * (1.0 + 1e-6) + 1e-6);
        prev_bits = cont.total_bits();
    }
}

TEST_CASE("allocate_cr: perfect-sensing caps reproduce the plain power-capped path bit for bit") {
    const int n = 10;
    BerTargets t = BerTargets::uniform(n, 1e-4);
    MoopWeights w{0.5, 1.0, 1.0};
    ChannelRealization ch = random_channel(n, 2200.0, 99);
    const double p_th = 0.4 * allocate_relaxed(ch, w, t, 6.0).total_power();

    InterferenceCaps caps = direct_caps(p_th, {}, {});
    Allocation cr = allocate_cr(ch, w, t, 6.0, caps);

    ContinuousAllocation cont = allocate_power_capped(ch, w, t, 6.0, p_th);
    Allocation plain = round_allocation(cont, ch, w, t);
    plain = rounding_repair(std::move(plain), ch, w, t, {LinearConstraint{{}, p_th}});
    CHECK(cr.bits == plain.bits);
}

TEST_CASE("measure_violation: dead link, boundary convention, basic accounting") {
    Allocation a;
    a.bits = {4, 4};
    a.power_w = {1e-3, 2e-3};
    std::vector<std::vector<double>> leakage{{0.5, 0.25}};
    // true interference: gain * pl * sum(p) = 1 * 1e-11 * 3e-3 = 3e-14
    std::vector<double> gains{1.0, 1.0};
    std::vector<double> pl{1e-11, 1e-11};
    const double aci_weighted = 0.5 * 1e-3 + 0.25 * 2e-3; // 1e-3

    std::vector<bool> flags = measure_violation(a, gains, pl, {3e-14, 1e-11 * aci_weighted}, leakage);
    CHECK_FALSE(flags[0]); // boundary counts as non-violation
    CHECK_FALSE(flags[1]);

    flags = measure_violation(a, gains, pl, {2.9e-14, 1e-20}, leakage);
    CHECK(flags[0]);
    CHECK(flags[1]);

    flags = measure_violation(a, {0.0, 0.0}, pl, {1e-30, 1e-30}, leakage);
    CHECK_FALSE(flags[0]);
    CHECK_FALSE(flags[1]);
}

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <functional>
#include <queue>
#include <vector>

#include "pqcsim/queueing.hpp"

using namespace pqcsim;

namespace {

// Closed form with explicit factorials; adequate for the small c used here.
double erlang_c_factorial(int c, double a) {
    long double sum = 0.0L, term = 1.0L;
    for (int k = 0; k < c; ++k) {
        if (k > 0) term *= a / k;
        sum += term;
    }
    long double top = term * a / c / (1.0L - a / c);
    return static_cast<double>(top / (sum + top));
}

double mean_wait_ms_oracle(double lambda, double mu, int c) {
    return erlang_c_factorial(c, lambda / mu) / (c * mu - lambda) * 1000.0;
}

// FCFS M/M/c by direct simulation: each arrival takes the earliest free server.
double des_mean_wait(double lambda, double mu, int c, int n, std::uint64_t seed) {
    RandomStream rng(seed);
    std::priority_queue<double, std::vector<double>, std::greater<>> free_at;
    for (int i = 0; i < c; ++i) free_at.push(0.0);
    double t = 0.0, total = 0.0;
    for (int i = 0; i < n; ++i) {
        t += -std::log(rng.uniform()) / lambda;
        double start = std::max(t, free_at.top());
        free_at.pop();
        total += start - t;
        free_at.push(start - std::log(rng.uniform()) / mu);
    }
    return total / n;
}

}  // namespace

TEST_CASE("erlang_c against the closed form") {
    CHECK(erlang_c(2, 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(erlang_c(1, 1e-12) < 1e-11);
    CHECK(erlang_c(1, 0.0) == 0.0);
    for (double rho : {0.1, 0.5, 0.9, 0.99}) CHECK(erlang_c(1, rho) == doctest::Approx(rho).epsilon(1e-12));
    for (int c = 1; c <= 18; ++c)
        for (double f : {0.05, 0.3, 0.7, 0.95}) CHECK(erlang_c(c, f * c) == doctest::Approx(erlang_c_factorial(c, f * c)).epsilon(1e-9));
    CHECK_THROWS_AS(erlang_c(2, 2.0), std::domain_error);
    CHECK_THROWS_AS(erlang_c(0, 0.5), std::domain_error);
    double big = erlang_c(500, 450.0);
    CHECK(big >= 0.0);
    CHECK(big <= 1.0);
}

TEST_CASE("erlang_c monotonicity") {
    for (int c = 1; c <= 10; ++c) {
        double prev = 0.0;
        for (double a = 0.01; a < c; a += 0.01 * c) {
            double v = erlang_c(c, a);
            CHECK(v >= prev);
            CHECK(v <= 1.0);
            prev = v;
        }
    }
    for (double a : {0.5, 2.0, 5.5})
        for (int c = static_cast<int>(a) + 1; c < 20; ++c) CHECK(erlang_c(c + 1, a) <= erlang_c(c, a));
}

TEST_CASE("mmc_assess agrees with a discrete-event simulation") {
    int idx = 0;
    for (int c : {1, 2, 4}) {
        for (double rho : {0.3, 0.6, 0.9}) {
            double mu = 1.0, lambda = rho * c * mu;
            double sim = des_mean_wait(lambda, mu, c, 1'000'000, 1000 + idx++);
            double model = mmc_assess({lambda, mu, c}).mean_wait_us / 1e6;
            INFO("c=" << c << " rho=" << rho << " sim=" << sim << " model=" << model);
            CHECK(std::abs(sim / model - 1.0) < 0.05);
        }
    }
}

TEST_CASE("mmc_assess examples") {
    auto s = mmc_assess({13.5, 3.58, 2});
    CHECK(s.saturated);
    CHECK(s.rho == doctest::Approx(1.8855).epsilon(1e-4));
    CHECK(s.mean_wait_us == kSaturationSentinelUs);

    auto m = mmc_assess({13.5, 1.0 / 281e-6, 2});
    CHECK_FALSE(m.saturated);
    CHECK(m.rho == doctest::Approx(0.0019).epsilon(0.01));
    CHECK(m.mean_wait_ms() < 1e-3);

    auto e = mmc_assess({13.5, 3.58, 8});
    CHECK(e.rho == doctest::Approx(0.47).epsilon(0.01));
    CHECK(e.mean_wait_ms() == doctest::Approx(mean_wait_ms_oracle(13.5, 3.58, 8)).epsilon(1e-9));
    CHECK(e.mean_wait_ms() == doctest::Approx(2.9).epsilon(0.05));

    for (double rho : {1.0, 1.5, 10.0, 1000.0}) {
        auto a = mmc_assess({rho * 2.0, 1.0, 2});
        CHECK(a.saturated);
        CHECK(a.mean_wait_us == 10'000'000.0);
    }
}

TEST_CASE("wait quantile") {
    QueueParams q{13.5, 3.58, 4};
    auto a = mmc_assess(q);
    double oracle = std::log(a.erlang_c / 0.05) / (4 * 3.58 - 13.5) * 1e6;
    CHECK(wait_quantile_us(q, 0.95) == doctest::Approx(oracle));
    CHECK(wait_quantile_us(q, 0.95) / 1000.0 == doctest::Approx(3492).epsilon(0.02));
    CHECK(wait_quantile_us({1.0, 100.0, 2}, 0.5) == 0.0);
    CHECK(wait_quantile_us({13.5, 3.58, 2}, 0.95) == kSaturationSentinelUs);
}

TEST_CASE("saturation boundary") {
    CHECK(saturation_boundary(3.58, 2) == doctest::Approx(7.16));
    CHECK(saturation_boundary(3.58, 1) == doctest::Approx(3.58));
    CHECK(saturation_boundary(3.58, 2) / 1.0 == doctest::Approx(7.16));
}

TEST_CASE("min_servers") {
    CHECK(min_servers(13.5, 3.58, ServerCriterion::stability()) == 4);
    CHECK(mmc_assess({13.5, 3.58, 4}).rho == doctest::Approx(0.9427).epsilon(1e-4));
    CHECK(min_servers(60.2, 3.58, ServerCriterion::stability()) == 17);
    CHECK(mmc_assess({60.2, 3.58, 17}).rho == doctest::Approx(0.989).epsilon(1e-3));

    int oracle = 0;
    for (int c = 5; c <= 10 && !oracle; ++c)
        if (mean_wait_ms_oracle(13.5, 3.58, c) <= 10.0) oracle = c;
    REQUIRE(oracle != 0);
    CHECK(min_servers(13.5, 3.58, ServerCriterion::wait_below(10.0)) == oracle);
    CHECK_THROWS(min_servers(0.0, 1.0, ServerCriterion::stability()));
}

TEST_CASE("dos metrics") {
    QueueParams ecdsa{13.5, 1e6 / 29.6296, 2};
    auto d = dos_metrics(13.5, 3.58, 2, 300, ecdsa);
    CHECK(d.surplus_ops_s == doctest::Approx(6.34));
    CHECK(d.queued_count == doctest::Approx(1902).epsilon(0.001));
    CHECK(d.mean_wait_s == doctest::Approx(133).epsilon(0.005));
    CHECK(d.last_wait_s == doctest::Approx(2 * d.mean_wait_s));
    CHECK(dos_metrics(13.5, 3.58, 2, 60, ecdsa).queued_count == doctest::Approx(380).epsilon(0.002));
    CHECK(d.utilisation_ratio == doctest::Approx(9428).epsilon(0.001));
    CHECK_THROWS_AS(dos_metrics(5.0, 3.58, 2, 60, ecdsa), std::domain_error);
    CHECK_THROWS_AS(dos_metrics(13.5, 3.58, 2, 0, ecdsa), std::domain_error);
}

TEST_CASE("hourly profile") {
    auto profiles = builtin_profiles();
    auto traffic = default_traffic_config(profiles);
    auto xmas = find_scenario(traffic.scenarios, "christmas");
    auto s = hourly_profile(find_profile(profiles, "SPHINCS+-SHA2-128s"), xmas, 2, traffic);
    CHECK(s.hours.size() == 24);
    CHECK(s.saturated_hours == 16);
    CHECK(s.peak_rho == doctest::Approx(8.41).epsilon(0.002));
    CHECK(s.peak_hour == 10);
    auto f = hourly_profile(find_profile(profiles, "Falcon-512"), xmas, 2, traffic);
    CHECK(f.saturated_hours == 0);
    CHECK(f.peak_rho == doctest::Approx(0.004).epsilon(0.15));
    for (const auto& p : profiles)
        if (p.name != "SPHINCS+-SHA2-128s") CHECK(hourly_profile(p, xmas, 2, traffic).saturated_hours == 0);

    auto flat = traffic;
    flat.profile.components = {{1.0, 12.0, 0.5}};
    auto z = hourly_profile(find_profile(profiles, "ECDSA-P256"), xmas, 2, flat);
    CHECK(z.hours[0].rho < 1e-12);
}

TEST_CASE("degraded comparison") {
    auto profiles = builtin_profiles();
    std::vector<double> base;
    RandomStream rng(4);
    for (int i = 0; i < 10000; ++i) base.push_back(15.0 + 5.0 * rng.uniform());
    auto s = degraded_compare(find_profile(profiles, "SPHINCS+-SHA2-128s"), base, 13.5);
    CHECK_FALSE(s.meaningful);
    CHECK(s.rho_normal == doctest::Approx(1.8855).epsilon(1e-4));
    CHECK(s.rho_degraded == doctest::Approx(3.771).epsilon(1e-4));
    for (const char* name : {"Falcon-512", "ECDSA-P256", "ML-DSA-87"}) {
        auto r = degraded_compare(find_profile(profiles, name), base, 13.5);
        CHECK(r.meaningful);
        CHECK(std::abs(r.delta) <= 0.06);
    }
}

TEST_CASE("tps sweep crosses saturation at c mu") {
    auto profiles = builtin_profiles();
    const auto& s = find_profile(profiles, "SPHINCS+-SHA2-128s");
    std::vector<double> lambdas;
    for (int i = 1; i <= 200; ++i) lambdas.push_back(0.1 * i);
    auto rows = tps_sweep(s, 2, lambdas);
    double first = 0.0;
    for (const auto& r : rows)
        if (r.q.rho >= 1.0) {
            first = r.x;
            break;
        }
    double sat = 2 * s.service_rate();
    CHECK(first >= sat);
    CHECK(first - 0.1 < sat);
    CHECK(first == doctest::Approx(7.2).epsilon(0.01));
}

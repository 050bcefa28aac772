#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <random>

#include "pqcsim/stats.hpp"

using namespace pqcsim;

namespace {

double gev_draw(double xi, double loc, double scale, RandomStream& rng) {
    double e = -std::log(rng.uniform());
    if (xi == 0.0) return loc - scale * std::log(e);
    return loc + scale * (std::pow(e, -xi) - 1.0) / xi;
}

std::vector<double> gev_sample(double xi, double loc, double scale, int n, std::uint64_t seed) {
    RandomStream rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = gev_draw(xi, loc, scale, rng);
    return v;
}

std::vector<double> lognormal_sample(double mu, double sigma, int n, RandomStream& rng) {
    std::vector<double> v(n);
    for (auto& x : v) x = std::exp(mu + sigma * rng.normal());
    return v;
}

}  // namespace

TEST_CASE("block maxima") {
    std::vector<double> v(10000);
    for (int i = 0; i < 10000; ++i) v[i] = i;
    auto m = block_maxima(v);
    REQUIRE(m.size() == 200);
    for (int b = 0; b < 200; ++b) CHECK(m[b] == 50.0 * b + 49.0);
    std::vector<double> c(1000, 7.5);
    for (double x : block_maxima(c)) CHECK(x == 7.5);
    std::size_t dropped = 0;
    v.resize(10030);
    CHECK(block_maxima(v, 50, &dropped).size() == 200);
    CHECK(dropped == 30);
    CHECK_THROWS_AS(block_maxima(std::vector<double>(99, 1.0)), std::domain_error);
}

TEST_CASE("GEV recovers known parameters") {
    auto g = fit_gev_mle(gev_sample(0.0, 10.0, 2.0, 10000, 1));
    CHECK(std::abs(g.xi) < 0.02);
    CHECK(g.loc == doctest::Approx(10.0).epsilon(0.01));
    CHECK(g.scale == doctest::Approx(2.0).epsilon(0.03));
    auto f = fit_gev_mle(gev_sample(0.3, 5.0, 1.0, 10000, 2));
    CHECK(std::abs(f.xi - 0.3) < 0.05);
    auto w = fit_gev_mle(gev_sample(-0.2, 5.0, 1.0, 10000, 3));
    CHECK(std::abs(w.xi + 0.2) < 0.05);
    CHECK_THROWS(fit_gev_mle(std::vector<double>(10, 1.0)));
}

TEST_CASE("GEV optimum has a vanishing gradient") {
    for (double xi : {-0.1, 0.0, 0.15}) {
        auto x = gev_sample(xi, 40.0, 6.0, 500, 11);
        auto f = fit_gev_mle(x);
        double ll = gev_loglik(x, f.xi, f.loc, f.scale);
        CHECK(ll == doctest::Approx(f.loglik));
        const double h = 1e-6;
        double g[3] = {
            (gev_loglik(x, f.xi + h, f.loc, f.scale) - gev_loglik(x, f.xi - h, f.loc, f.scale)) / (2 * h),
            (gev_loglik(x, f.xi, f.loc + h, f.scale) - gev_loglik(x, f.xi, f.loc - h, f.scale)) / (2 * h),
            (gev_loglik(x, f.xi, f.loc, f.scale + h) - gev_loglik(x, f.xi, f.loc, f.scale - h)) / (2 * h)};
        for (double v : g) CHECK(std::abs(v) < 1e-3 * std::abs(ll));
    }
}

TEST_CASE("GEV quantile") {
    GevFit g{0.0, 0.0, 1.0};
    CHECK(std::abs(gev_quantile(g, std::exp(-1.0))) < 1e-12);
    GevFit f{0.2, 30.0, 4.0};
    double prev = -1e300;
    for (double q = 0.01; q < 1.0; q += 0.01) {
        double v = gev_quantile(f, q);
        CHECK(v > prev);
        prev = v;
    }
    CHECK(gev_quantile(f, 0.999) == doctest::Approx(30.0 + 4.0 * (std::pow(-std::log(0.999), -0.2) - 1.0) / 0.2));
    CHECK(gev_quantile(GevFit{1e-10, 0.0, 1.0}, 0.9) == doctest::Approx(-std::log(-std::log(0.9))).epsilon(1e-6));
}

TEST_CASE("tail classification") {
    CHECK(classify_tail(0.028) == TailClass::Gumbel);
    CHECK(classify_tail(0.078) == TailClass::Frechet);
    CHECK(classify_tail(-0.2) == TailClass::Weibull);
    CHECK(classify_tail(0.05) == TailClass::Frechet);
    CHECK(classify_tail(-0.05) == TailClass::Weibull);
    CHECK(to_string(TailClass::Gumbel) == "Gumbel");
}

TEST_CASE("bootstrap") {
    auto x = gev_sample(0.05, 50.0, 8.0, 200, 21);
    auto a = bootstrap_ci(x, 0.999, 100, 0.95, 7);
    auto b = bootstrap_ci(x, 0.999, 100, 0.95, 7);
    CHECK(a == b);
    CHECK(a.first < gev_quantile(fit_gev_mle(x), 0.999));
    CHECK(a.second > gev_quantile(fit_gev_mle(x), 0.999));
    auto c = bootstrap_ci(std::vector<double>(200, 12.0), 0.999, 50, 0.95, 7);
    CHECK(c.first == doctest::Approx(12.0));
    CHECK(c.second == doctest::Approx(c.first));

    auto r = bootstrap_quantiles(x, {0.999, 0.9999}, 100, 0.95, 7);
    CHECK(r.ci.size() == 2);
    CHECK(r.resamples == 100);
    CHECK(r.ci[0] == a);
}

TEST_CASE("KS null calibration and power") {
    RandomStream rng(31);
    LogNormalParams p{3.0, 0.4};
    int reject = 0;
    const int reps = 1000;
    for (int r = 0; r < reps; ++r) {
        auto x = lognormal_sample(3.0, 0.4, 10000, rng);
        if (ks_test_lognormal(x, p).second < 0.05) ++reject;
    }
    CHECK(reject / double(reps) >= 0.03);
    CHECK(reject / double(reps) <= 0.07);

    auto shifted = lognormal_sample(3.1, 0.4, 10000, rng);
    CHECK(ks_test_lognormal(shifted, p).second < 0.001);

    CHECK(kolmogorov_sf(0.0) == 1.0);
    CHECK(kolmogorov_sf(1.3581) == doctest::Approx(0.05).epsilon(0.01));
}

TEST_CASE("AD null calibration") {
    RandomStream rng(32);
    int reject = 0;
    const int reps = 1000;
    for (int r = 0; r < reps; ++r) {
        auto x = lognormal_sample(1.0, 0.8, 2000, rng);
        if (ad_test_log_normality(x).second) ++reject;
    }
    CHECK(reject / double(reps) >= 0.03);
    CHECK(reject / double(reps) <= 0.07);

    std::vector<double> bimodal;
    for (int i = 0; i < 2000; ++i) bimodal.push_back(i % 2 ? std::exp(1.0 + 0.1 * rng.normal()) : std::exp(3.0 + 0.1 * rng.normal()));
    auto [stat, rej] = ad_test_log_normality(bimodal);
    CHECK(rej);
    CHECK(stat > 100 * kAdCritical5pct);
    CHECK_THROWS_AS(ad_test_log_normality({1, 2, 3, 4, 5, 6, 7, 0}), std::domain_error);
}

TEST_CASE("lognormal MLE") {
    RandomStream rng(40);
    auto x = lognormal_sample(2.5, 0.3, 50000, rng);
    auto p = fit_lognormal_mle(x);
    CHECK(p.mu_ln == doctest::Approx(2.5).epsilon(0.005));
    CHECK(p.sigma_ln == doctest::Approx(0.3).epsilon(0.01));
}

TEST_CASE("AIC ranking") {
    std::mt19937_64 eng(5);
    std::gamma_distribution<double> gam(3.0, 2.0);
    std::vector<double> g(5000);
    for (auto& v : g) v = gam(eng);
    auto cmp = aic_bic_compare(g);
    CHECK(cmp.candidates.front().name == "gamma");
    CHECK(cmp.candidates.front().delta_aic == 0.0);
    CHECK(cmp.find("gamma").params[0] == doctest::Approx(3.0).epsilon(0.05));

    RandomStream rng(6);
    auto ln = lognormal_sample(3.0, 0.5, 5000, rng);
    auto lc = aic_bic_compare(ln);
    CHECK(lc.candidates.front().name == "lognormal");
    CHECK(lc.find("weibull").delta_aic > 10);

    auto twin = aic_bic_compare(ln, {"lognormal", "lognormal"});
    CHECK(twin.candidates[0].aic == twin.candidates[1].aic);
    const auto& l = lc.find("lognormal");
    CHECK(l.aic == doctest::Approx(4.0 - 2.0 * l.loglik));
    CHECK(l.bic == doctest::Approx(2.0 * std::log(5000.0) - 2.0 * l.loglik));

    CHECK_THROWS_AS(aic_bic_compare(ln, {"lognormal", "cauchy"}), std::invalid_argument);
}

TEST_CASE("effect sizes") {
    std::vector<double> a{1, 2, 3, 4, 5};
    CHECK(cohens_d(a, a).cohens_d == 0.0);
    std::vector<double> b{2, 3, 4, 5, 6};
    // Means differ by 1; both sample variances are 2.5.
    CHECK(cohens_d(b, a).cohens_d == doctest::Approx(1.0 / std::sqrt(2.5)));
    CHECK(cohens_d(a, b).cohens_d < 0.0);
    auto off = cohens_d(std::vector<double>(5, 10.0), std::vector<double>(5, 1.0));
    CHECK(std::isinf(off.cohens_d));
    CHECK(off.magnitude == "Huge (off-scale)");
    CHECK(magnitude_label(0.41) == "Small");
    CHECK(magnitude_label(1.58) == "Very Large");

    auto [u, p] = mann_whitney_u(std::vector<double>(10, 3.0), std::vector<double>(10, 3.0));
    CHECK(p == 1.0);
    std::vector<double> lo(1000), hi(1000);
    for (int i = 0; i < 1000; ++i) {
        lo[i] = i;
        hi[i] = 5000 + i;
    }
    auto s = mann_whitney_u(lo, hi);
    CHECK(s.first == 0.0);
    CHECK(s.second < 1e-10);
    CHECK(mann_whitney_u(hi, lo).first == 1e6);

    // Small case checked against a hand count of pairs (a > b counts 1, ties 0.5).
    std::vector<double> x{1, 3, 3, 7}, y{2, 3, 5};
    double pairs = 0;
    for (double i : x)
        for (double j : y) pairs += i > j ? 1.0 : (i == j ? 0.5 : 0.0);
    CHECK(mann_whitney_u(x, y).first == pairs);
}

TEST_CASE("anova eta squared") {
    std::vector<double> g{1, 2, 3};
    CHECK(anova_eta2({g, g, g}).first == 0.0);
    CHECK(anova_eta2({{5, 5}, {5, 5}}).first == 0.0);
    auto [e, f] = anova_eta2({{1, 2, 3}, {4, 5, 6}});
    // SSB = 6 * 2.25 = 13.5, SSW = 4, SST = 17.5.
    CHECK(e == doctest::Approx(13.5 / 17.5));
    CHECK(f == doctest::Approx(13.5 / (4.0 / 4.0)));
    CHECK(anova_eta2({{1, 1}, {2, 2}}).first == 1.0);
    CHECK_THROWS(anova_eta2({{1, 2}}));
}

#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "pqcsim/decision_models.hpp"

using namespace pqcsim;

TEST_CASE("cdi") {
    auto a = cdi(0.30, 43.69);
    CHECK(a.cdi == doctest::Approx(0.0069).epsilon(0.01));
    CHECK(a.passes_threshold);
    CHECK(cdi(0.0, 43.39).cdi == 0.0);
    auto s = cdi(9986.5, 10029.93);
    CHECK(std::round(s.cdi * 1e4) / 1e4 == doctest::Approx(0.9957));
    CHECK_FALSE(s.passes_threshold);
    double prev = -1;
    for (double d = 0; d < 10; d += 0.5) {
        double v = cdi(d, 43.39 + d).cdi;
        CHECK(v > prev);
        prev = v;
    }
    CHECK_THROWS_AS(cdi(1.0, 0.0), std::domain_error);
}

TEST_CASE("format compliance") {
    auto profiles = builtin_profiles();
    auto verdicts = [&](const char* n) {
        const auto& p = find_profile(profiles, n);
        return format_compliance(p, linked_classical(profiles, p));
    };
    auto f = verdicts("Falcon-512");
    REQUIRE(f.size() == 3);
    for (const auto& v : f) CHECK(v.verdict == Verdict::PASS);
    CHECK(f[0].combined_bytes == 1563);

    auto m = verdicts("ML-DSA-44");
    CHECK(m[0].limit_bytes == 2048);
    CHECK(m[0].verdict == Verdict::SIG_FAIL);
    CHECK(m[1].verdict == Verdict::PASS);
    CHECK(m[2].verdict == Verdict::PASS);

    auto g = verdicts("Falcon-1024");
    CHECK(g[0].verdict == Verdict::COMBINED_FAIL);
    CHECK(g[0].combined_bytes == 3073);

    auto h = verdicts("ML-DSA-65-Hybrid");
    CHECK(h[0].combined_bytes == 5317);
    CHECK_THROWS(format_compliance(find_profile(profiles, "ML-DSA-65-Hybrid")));

    for (const auto& p : profiles) CHECK(format_compliance(p, linked_classical(profiles, p)).size() == 3);
}

TEST_CASE("route p99") {
    auto profiles = builtin_profiles();
    auto routes = default_routes();
    auto rits = route_table(find_route(routes, "RITS"), profiles, 2);
    auto by = [](const std::vector<RouteResult>& rows, const std::string& a) {
        for (const auto& r : rows)
            if (r.algo == a) return r;
        throw std::runtime_error("missing " + a);
    };
    CHECK(by(rits, "ECDSA-P256").route_p99_ms == doctest::Approx(277.15).epsilon(1e-4));
    CHECK(by(rits, "ECDSA-P256").sla_pass);
    auto s = by(rits, "SPHINCS+-SHA2-128s");
    CHECK(s.route_p99_ms == doctest::Approx(574.0).epsilon(1e-4));
    CHECK(s.delta_vs_baseline == doctest::Approx(296.85).epsilon(1e-4));
    CHECK(s.cdi_route == doctest::Approx(0.5172).epsilon(1e-3));
    CHECK(s.sla_pass);

    auto swift = route_table(find_route(routes, "SWIFT"), profiles, 2);
    auto hy = by(swift, "ML-DSA-65-Hybrid");
    CHECK(hy.sign_p99_ms == doctest::Approx(1.84));
    CHECK(hy.route_p99_ms == doctest::Approx(838.84).epsilon(1e-5));
    CHECK(hy.delta_vs_baseline / hy.route_p99_ms == doctest::Approx(0.002015).epsilon(0.002));
    CHECK(hy.sla_pass);

    for (const auto& p : profiles) {
        if (p.name == "SPHINCS+-SHA2-128s" || p.mode == Mode::classical) continue;
        double d = *p.delta_p99_ref_ms;
        double npp = cdi(d, 43.39 + d).cdi;
        CHECK(npp > by(rits, p.name).cdi_route);
        CHECK(by(rits, p.name).cdi_route > by(swift, p.name).cdi_route);
    }

    auto measured = route_table(find_route(routes, "RITS"), profiles, 2, {{"ML-DSA-65", 2.0}});
    CHECK(by(measured, "ML-DSA-65").sign_p99_ms == doctest::Approx(2.15));
}

TEST_CASE("becs amortisation") {
    CHECK(becs_amortised(0.28, 1000) == doctest::Approx(0.00028));
    CHECK(becs_amortised(1.7, 1) == 1.7);
    CHECK(becs_amortised(0.28, 50000) == doctest::Approx(5.6e-6));
    CHECK_THROWS(becs_amortised(0.28, 0));
}

TEST_CASE("volume projection") {
    auto v = volume_projection(5.2e6, 0.156, 5);
    CHECK(v[0].first == 2026);
    CHECK(v[1].second == 6011200);
    CHECK(v[3].second == 8032983);
    for (const auto& [y, n] : volume_projection(5.2e6, 0.0, 5)) CHECK(n == 5200000);
}

TEST_CASE("hndl exposure") {
    auto rows = hndl_exposure();
    REQUIRE(rows.size() == 5);
    CHECK(rows[0].records == 1898000000LL);
    long long oracle = 0;
    for (int k = 0; k < 4; ++k) oracle += std::llround(5.2e6 * std::pow(1.156, k)) * 365;
    CHECK(oracle == 9560492450LL);
    CHECK(rows[3].cumulative == 9560492450LL);
    CHECK(rows[4].exposed == "partial");
    CHECK(rows[4].expected_exposed_records == doctest::Approx(0.5 * rows[4].records));
    for (int k = 0; k < 4; ++k) CHECK(rows[k].exposed == "yes");

    HndlParams none;
    none.retention_years = 0;
    for (const auto& r : hndl_exposure(none)) {
        CHECK(r.exposed == "no");
        CHECK(r.cumulative == 0);
    }
    HndlParams leap;
    leap.leap_years = true;
    CHECK(hndl_exposure(leap)[2].records == std::llround(5.2e6 * 1.156 * 1.156) * 366);
}

TEST_CASE("storage cost") {
    CHECK(storage_cost(9.56e9, 1000) == doctest::Approx(459).epsilon(0.002));
    CHECK(storage_cost(9.56e9, 2000) == doctest::Approx(918).epsilon(0.002));
    CHECK(storage_cost(0, 1000) == 0.0);
}

TEST_CASE("migration costs") {
    auto t = migration_cost_table();
    REQUIRE(t.size() == 4);
    CHECK(t[1].cost_usd_m == doctest::Approx(21.4));
    CHECK(t[1].low_usd_m == doctest::Approx(10.7));
    CHECK(t[1].high_usd_m == doctest::Approx(32.1));
    CHECK(t[2].cost_usd_m == 7.6);
    CHECK(t[3].cost_usd_m == 1.5);
    CHECK(t[3].recurring);
    MigrationBreakdown b;
    CHECK(b.big4_count * b.big4_each_usd_m == doctest::Approx(14.8));
}

TEST_CASE("sla headroom") {
    CHECK(sla_headroom(44.6, 2000) == doctest::Approx(1955.4));
    CHECK(sla_headroom(2000, 2000) == 0.0);
    CHECK(sla_headroom(10029.93, 2000) == doctest::Approx(-8029.93));
}

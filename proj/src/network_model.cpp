#include "pqcsim/network_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pqcsim {

const HopSpec& NetworkConfig::tier(const std::string& label) const {
    for (const auto& t : tiers)
        if (t.label == label) return t;
    throw std::invalid_argument("unknown hop tier '" + label + "'");
}

double NetworkConfig::city_leg_ms(const std::string& city) const {
    for (const auto& c : cities)
        if (c.city == city) return c.one_way_ms;
    throw std::invalid_argument("unknown city '" + city + "'");
}

std::vector<Institution> default_institutions(int n_regionals) {
    std::vector<Institution> v{
        {"CBA", 0.271, "SYD"}, {"ANZ", 0.241, "MEL"}, {"NAB", 0.219, "MEL"}, {"WBC", 0.196, "SYD"}};
    static const char* cities[] = {"SYD", "MEL", "BNE"};
    for (int i = 0; i < n_regionals; ++i)
        v.push_back({"REG-" + std::to_string(i + 1), 0.073 / n_regionals, cities[i % 3]});
    return v;
}

NetworkConfig default_network_config() {
    NetworkConfig cfg;
    cfg.tiers = {{"intrabank", 1.2, 0.25}, {"hub", 9.8, 0.48}, {"interbank", 14.6, 0.58},
                 {"rits", 2.8, 0.22},      {"swift", 96.0, 0.88}};
    cfg.institutions = default_institutions();
    cfg.cities = {{"SYD", 0.8}, {"MEL", 9.2}, {"BNE", 5.8}};
    // Innovation sd calibrated so the corpus reproduces the published baseline percentiles.
    cfg.ar1.sigma_eps = 1.5;
    return cfg;
}

void validate(const NetworkConfig& cfg) {
    std::ostringstream err;
    for (const auto& t : cfg.tiers) {
        if (!(t.mean_ms > 0.0)) err << "  network.tiers." << t.label << ": mean_ms must be > 0\n";
        if (!(t.cv >= 0.0)) err << "  network.tiers." << t.label << ": cv must be >= 0\n";
    }
    if (cfg.institutions.empty()) err << "  network.institutions: empty institution set\n";
    double sum = 0.0;
    for (const auto& i : cfg.institutions) {
        if (i.share < 0.0 || i.share > 1.0) err << "  network.institutions." << i.name << ": share outside [0,1]\n";
        sum += i.share;
        bool known = std::any_of(cfg.cities.begin(), cfg.cities.end(), [&](auto& c) { return c.city == i.city; });
        if (!known) err << "  network.institutions." << i.name << ": unknown city '" << i.city << "'\n";
    }
    if (!cfg.institutions.empty() && std::abs(sum - 1.0) > 1e-9)
        err << "  network.institutions: shares sum to " << sum << ", expected 1\n";
    for (const auto& c : cfg.cities)
        if (!(c.one_way_ms >= 0.0)) err << "  network.cities." << c.city << ": one_way_ms must be >= 0\n";
    if (!(std::abs(cfg.ar1.alpha) < 1.0)) err << "  network.ar1.alpha: |alpha| must be < 1\n";
    if (!(cfg.ar1.sigma_eps >= 0.0)) err << "  network.ar1.sigma_eps must be >= 0\n";
    if (!(cfg.jitter_floor_ms > 0.0)) err << "  network.jitter_floor_ms must be > 0\n";
    for (const auto& h : cfg.npp_hops) {
        bool known = std::any_of(cfg.tiers.begin(), cfg.tiers.end(), [&](auto& t) { return t.label == h; });
        if (!known) err << "  network.npp_hops: unknown tier '" << h << "'\n";
    }
    auto msg = err.str();
    if (!msg.empty()) throw std::invalid_argument(msg);
}

Ar1State ar1_step(const Ar1State& state, double eps) {
    Ar1State next = state;
    next.x = state.alpha * state.x + (1.0 - state.alpha) * eps;
    return next;
}

Ar1State ar1_step(const Ar1State& state, RandomStream& rng) {
    return ar1_step(state, state.sigma_eps * rng.normal());
}

double jitter_multiplier(const Ar1State& state) { return 1.0 + state.sigma_ar * state.x; }

double apply_jitter(double base_ms, const Ar1State& state, double floor_ms) {
    return std::max(base_ms * jitter_multiplier(state), floor_ms);
}

Ar1State carry_over_or_reset(const Ar1State& state, const ScenarioSpec& prev, const ScenarioSpec& next) {
    Ar1State out = state;
    bool chained = !prev.multi_day_family.empty() && prev.multi_day_family == next.multi_day_family;
    if (!chained) out.x = 0.0;
    return out;
}

InstitutionSampler::InstitutionSampler(std::vector<Institution> institutions) : inst_(std::move(institutions)) {
    if (inst_.empty()) throw std::invalid_argument("institution set is empty");
    double acc = 0.0;
    for (const auto& i : inst_) {
        acc += i.share;
        cumulative_.push_back(acc);
    }
}

std::size_t InstitutionSampler::sample_index(RandomStream& rng) const {
    double u = rng.uniform() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return static_cast<std::size_t>(it - cumulative_.begin());
}

const Institution& InstitutionSampler::sample(RandomStream& rng) const { return inst_[sample_index(rng)]; }

Institution sample_institution(const std::vector<Institution>& institutions, RandomStream& rng) {
    return InstitutionSampler(institutions).sample(rng);
}

NetworkModel::NetworkModel(NetworkConfig cfg) : cfg_(std::move(cfg)) {
    validate(cfg_);
    for (const auto& h : cfg_.npp_hops) hops_.push_back(cfg_.tier(h).params());
}

double NetworkModel::geographic_ms(const Institution& origin, const Institution& dest) const {
    const std::string& dest_city = cfg_.mirror_origin_city ? origin.city : dest.city;
    return cfg_.city_leg_ms(origin.city) + cfg_.city_leg_ms(dest_city);
}

double NetworkModel::npp_route_latency(const Institution& origin, const Institution& dest, RandomStream& rng,
                                       const Ar1State& ar1) const {
    double total = 0.0;
    for (const auto& h : hops_) total += apply_jitter(sample_lognormal(h, rng), ar1, cfg_.jitter_floor_ms);
    if (cfg_.city_legs_additive) total += geographic_ms(origin, dest);
    return total;
}

}  // namespace pqcsim

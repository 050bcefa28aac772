#include "pqcsim/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <stdexcept>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "pqcsim/mc_engine.hpp"
#include "pqcsim/random.hpp"

namespace pqcsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

using Vec3 = std::array<double, 3>;

// Plain Nelder-Mead; returns the best vertex.
Vec3 nelder_mead(const std::function<double(const Vec3&)>& f, Vec3 x0, Vec3 step, double ftol, int max_iter,
                 double* fbest) {
    std::array<Vec3, 4> s;
    std::array<double, 4> fv;
    s[0] = x0;
    for (int i = 0; i < 3; ++i) {
        s[i + 1] = x0;
        s[i + 1][i] += step[i];
    }
    for (int i = 0; i < 4; ++i) fv[i] = f(s[i]);
    for (int it = 0; it < max_iter; ++it) {
        std::array<int, 4> idx{0, 1, 2, 3};
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fv[a] < fv[b]; });
        auto s2 = s;
        auto f2 = fv;
        for (int i = 0; i < 4; ++i) {
            s[i] = s2[idx[i]];
            fv[i] = f2[idx[i]];
        }
        double spread = std::abs(fv[3] - fv[0]);
        double size = 0.0;
        for (int i = 1; i < 4; ++i)
            for (int k = 0; k < 3; ++k) size = std::max(size, std::abs(s[i][k] - s[0][k]));
        if (std::isfinite(fv[3]) && spread <= ftol * (std::abs(fv[0]) + 1e-12) && size < 1e-9) break;

        Vec3 c{0, 0, 0};
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 3; ++k) c[k] += s[i][k] / 3.0;
        auto along = [&](double t) {
            Vec3 p;
            for (int k = 0; k < 3; ++k) p[k] = c[k] + t * (s[3][k] - c[k]);
            return p;
        };
        Vec3 xr = along(-1.0);
        double fr = f(xr);
        if (fr < fv[0]) {
            Vec3 xe = along(-2.0);
            double fe = f(xe);
            if (fe < fr) {
                s[3] = xe;
                fv[3] = fe;
            } else {
                s[3] = xr;
                fv[3] = fr;
            }
        } else if (fr < fv[2]) {
            s[3] = xr;
            fv[3] = fr;
        } else {
            Vec3 xc = fr < fv[3] ? along(-0.5) : along(0.5);
            double fc = f(xc);
            if (fc < std::min(fr, fv[3])) {
                s[3] = xc;
                fv[3] = fc;
            } else {
                for (int i = 1; i < 4; ++i) {
                    for (int k = 0; k < 3; ++k) s[i][k] = s[0][k] + 0.5 * (s[i][k] - s[0][k]);
                    fv[i] = f(s[i]);
                }
            }
        }
    }
    int best = static_cast<int>(std::min_element(fv.begin(), fv.end()) - fv.begin());
    *fbest = fv[best];
    return s[best];
}

}  // namespace

double mean(const std::vector<double>& v) {
    if (v.empty()) throw std::domain_error("mean of empty sample");
    return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

double variance(const std::vector<double>& v, int ddof) {
    if (v.size() <= static_cast<std::size_t>(ddof)) throw std::domain_error("variance: too few values");
    double m = mean(v), ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return ss / (v.size() - ddof);
}

double stddev(const std::vector<double>& v, int ddof) { return std::sqrt(variance(v, ddof)); }

std::vector<double> block_maxima(const std::vector<double>& samples, std::size_t block_size, std::size_t* dropped) {
    if (block_size == 0) throw std::domain_error("block_maxima: block size must be positive");
    std::size_t n_blocks = samples.size() / block_size;
    if (n_blocks < 2) throw std::domain_error("block_maxima: fewer than two complete blocks");
    std::size_t rest = samples.size() - n_blocks * block_size;
    if (dropped) *dropped = rest;
    if (rest) std::clog << "block_maxima: dropped " << rest << " trailing samples\n";
    std::vector<double> out;
    for (std::size_t b = 0; b < n_blocks; ++b) {
        auto first = samples.begin() + b * block_size;
        out.push_back(*std::max_element(first, first + block_size));
    }
    return out;
}

double gev_loglik(const std::vector<double>& x, double xi, double loc, double scale) {
    if (!(scale > 0.0)) return -kInf;
    const double n = static_cast<double>(x.size());
    double ll = -n * std::log(scale);
    if (std::abs(xi) < 1e-8) {
        for (double v : x) {
            double z = (v - loc) / scale;
            ll -= z + std::exp(-z);
        }
        return ll;
    }
    for (double v : x) {
        double t = xi * (v - loc) / scale;
        if (!(t > -1.0)) return -kInf;
        double lt = std::log1p(t);
        ll -= (1.0 + 1.0 / xi) * lt + std::exp(-lt / xi);
    }
    return ll;
}

GevFit fit_gev_mle(const std::vector<double>& maxima, const GevFit* start) {
    if (maxima.size() < 20) throw std::domain_error("fit_gev_mle: need at least 20 maxima");
    double m = mean(maxima), s = stddev(maxima);
    if (!(s > 0.0)) throw std::runtime_error("fit_gev_mle: zero variance in maxima, likelihood is degenerate");
    double sigma0 = s * std::sqrt(6.0) / std::numbers::pi;
    double mu0 = m - 0.5772156649015329 * sigma0;

    auto nll = [&](const Vec3& p) {
        if (p[0] < -0.5 || p[0] > 0.5) return kInf;
        double ll = gev_loglik(maxima, p[0], p[1], std::exp(p[2]));
        return std::isfinite(ll) ? -ll : kInf;
    };

    Vec3 best{0.0, mu0, std::log(sigma0)};
    double fbest = nll(best);
    if (start) {
        Vec3 s0{start->xi, start->loc, std::log(start->scale)};
        if (std::isfinite(nll(s0)) && nll(s0) < fbest) {
            best = s0;
            fbest = nll(s0);
        }
    }
    const double xis[] = {0.0, 0.1, -0.1, 0.25, -0.25};
    const double shifts[] = {0.0, 0.5, -0.5};
    for (double xi0 : xis)
        for (double sh : shifts) {
            if (start) break;
            Vec3 x0{xi0, mu0 + sh * sigma0, std::log(sigma0)};
            if (!std::isfinite(nll(x0))) continue;
            double f;
            Vec3 x = nelder_mead(nll, x0, {0.05, 0.1 * sigma0, 0.1}, 1e-12, 4000, &f);
            if (f < fbest) {
                fbest = f;
                best = x;
            }
        }
    // Polish from the best start until the simplex stops improving.
    for (int round = 0; round < 5; ++round) {
        double f;
        Vec3 x = nelder_mead(nll, best, {0.01, 0.02 * sigma0, 0.02}, 1e-14, 4000, &f);
        bool improved = f < fbest - 1e-12;
        if (f <= fbest) {
            fbest = f;
            best = x;
        }
        if (!improved) break;
    }
    if (!std::isfinite(fbest))
        throw std::runtime_error("fit_gev_mle: optimisation did not reach a finite likelihood (mean " +
                                 std::to_string(m) + ", sd " + std::to_string(s) + ")");
    GevFit fit;
    fit.xi = best[0];
    fit.loc = best[1];
    fit.scale = std::exp(best[2]);
    fit.n_blocks = static_cast<int>(maxima.size());
    fit.loglik = -fbest;
    return fit;
}

double gev_quantile(const GevFit& fit, double q) {
    if (!(q > 0.0 && q < 1.0)) throw std::domain_error("gev_quantile: q must be in (0,1)");
    double y = -std::log(q);
    if (std::abs(fit.xi) < 1e-8) return fit.loc - fit.scale * std::log(y);
    return fit.loc + fit.scale * (std::pow(y, -fit.xi) - 1.0) / fit.xi;
}

std::string to_string(TailClass t) {
    switch (t) {
        case TailClass::Gumbel: return "Gumbel";
        case TailClass::Frechet: return "Frechet";
        case TailClass::Weibull: return "Weibull";
    }
    return "?";
}

TailClass classify_tail(double xi) {
    if (xi >= 0.05) return TailClass::Frechet;
    if (xi <= -0.05) return TailClass::Weibull;
    return TailClass::Gumbel;
}

BootstrapResult bootstrap_quantiles(const std::vector<double>& maxima, const std::vector<double>& qs,
                                    int n_resamples, double confidence, std::uint64_t seed) {
    BootstrapResult r;
    r.resamples = n_resamples;
    bool constant = std::all_of(maxima.begin(), maxima.end(), [&](double v) { return v == maxima.front(); });
    if (constant) {
        for (std::size_t i = 0; i < qs.size(); ++i) r.ci.push_back({maxima.front(), maxima.front()});
        return r;
    }
    std::vector<std::vector<double>> est(qs.size());
    std::vector<double> resample(maxima.size());
    std::optional<GevFit> full;
    try {
        full = fit_gev_mle(maxima);
    } catch (const std::exception&) {
    }
    for (int b = 0; b < n_resamples; ++b) {
        RandomStream rng(hash_seed({seed, static_cast<std::uint64_t>(b)}));
        for (auto& v : resample) v = maxima[rng.below(maxima.size())];
        try {
            GevFit f = full ? fit_gev_mle(resample, &*full) : fit_gev_mle(resample);
            for (std::size_t i = 0; i < qs.size(); ++i) est[i].push_back(gev_quantile(f, qs[i]));
        } catch (const std::exception&) {
            ++r.failures;
        }
    }
    if (r.failures > n_resamples / 10)
        std::clog << "warning: " << r.failures << " of " << n_resamples << " bootstrap GEV refits failed\n";
    double alpha = 1.0 - confidence;
    for (auto& e : est) {
        if (e.empty()) throw std::runtime_error("bootstrap: every resample fit failed");
        r.ci.push_back({percentile(e, alpha / 2.0), percentile(e, 1.0 - alpha / 2.0)});
    }
    return r;
}

std::pair<double, double> bootstrap_ci(const std::vector<double>& maxima, double q, int n_resamples,
                                       double confidence, std::uint64_t seed) {
    return bootstrap_quantiles(maxima, {q}, n_resamples, confidence, seed).ci.front();
}

GevReport gev_report(const std::vector<double>& samples, std::size_t block_size, int n_resamples,
                     std::uint64_t seed, bool daily_maxima_mode) {
    GevReport r;
    std::vector<double> maxima = daily_maxima_mode ? samples : block_maxima(samples, block_size, &r.dropped);
    r.indicative = !daily_maxima_mode;
    r.fit = fit_gev_mle(maxima);
    r.q99 = gev_quantile(r.fit, 0.99);
    r.q999 = gev_quantile(r.fit, 0.999);
    r.q9999 = gev_quantile(r.fit, 0.9999);
    r.tail_class = classify_tail(r.fit.xi);
    auto b = bootstrap_quantiles(maxima, {0.999, 0.9999}, n_resamples, 0.95, seed);
    r.ci999 = b.ci[0];
    r.ci9999 = b.ci[1];
    r.bootstrap_failures = b.failures;
    r.bootstrap_resamples = b.resamples;
    return r;
}

double kolmogorov_sf(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 1.18) {
        // Small-argument form of the CDF.
        double s = 0.0;
        const double c = std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
        for (int k = 1; k <= 50; ++k) s += std::exp(-(2.0 * k - 1) * (2.0 * k - 1) * c);
        double cdf = std::sqrt(2.0 * std::numbers::pi) / lambda * s;
        return std::clamp(1.0 - cdf, 0.0, 1.0);
    }
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
        double term = std::exp(-2.0 * k * k * lambda * lambda);
        s += (k % 2 ? term : -term);
        if (term < 1e-300) break;
    }
    return std::clamp(2.0 * s, 0.0, 1.0);
}

std::pair<double, double> ks_test_lognormal(const std::vector<double>& samples, const LogNormalParams& params) {
    if (samples.size() < 2) throw std::domain_error("ks_test_lognormal: need at least two samples");
    std::vector<double> x(samples);
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double f = x[i] > 0.0 ? norm_cdf((std::log(x[i]) - params.mu_ln) / params.sigma_ln) : 0.0;
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return {d, kolmogorov_sf(std::sqrt(n) * d)};
}

std::pair<double, bool> ad_test_log_normality(const std::vector<double>& samples) {
    if (samples.size() < 8) throw std::domain_error("ad_test_log_normality: need at least 8 samples");
    std::vector<double> y;
    y.reserve(samples.size());
    for (double v : samples) {
        if (!(v > 0.0)) throw std::domain_error("ad_test_log_normality: non-positive sample");
        y.push_back(std::log(v));
    }
    std::sort(y.begin(), y.end());
    const std::size_t n = y.size();
    double m = mean(y), s = stddev(y);
    if (!(s > 0.0)) return {kInf, true};
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double zi = (y[i] - m) / s;
        double zj = (y[n - 1 - i] - m) / s;
        double lf = std::log(std::max(norm_cdf(zi), 1e-300));
        double ls = std::log(std::max(norm_cdf(-zj), 1e-300));
        acc += (2.0 * (i + 1) - 1.0) * (lf + ls);
    }
    double dn = static_cast<double>(n);
    double a2 = -dn - acc / dn;
    double adj = a2 * (1.0 + 4.0 / dn - 25.0 / (dn * dn));
    return {adj, adj > kAdCritical5pct};
}

LogNormalParams fit_lognormal_mle(const std::vector<double>& samples) {
    std::vector<double> y;
    for (double v : samples) {
        if (!(v > 0.0)) throw std::domain_error("fit_lognormal_mle: non-positive sample");
        y.push_back(std::log(v));
    }
    return {mean(y), std::sqrt(variance(y, 0))};
}

GofReport gof_report(const std::vector<double>& samples) {
    GofReport g;
    auto p = fit_lognormal_mle(samples);
    std::tie(g.ks_stat, g.ks_p) = ks_test_lognormal(samples, p);
    std::tie(g.ad_stat, g.reject_ad) = ad_test_log_normality(samples);
    g.reject_ks = g.ks_p < 0.05;
    return g;
}

const CandidateFit& ModelComparison::find(const std::string& name) const {
    for (const auto& c : candidates)
        if (c.name == name) return c;
    throw std::invalid_argument("candidate '" + name + "' not compared");
}

CandidateFit fit_candidate(const std::string& name, const std::vector<double>& x) {
    CandidateFit c;
    c.name = name;
    const double n = static_cast<double>(x.size());
    double sum_log = 0.0;
    for (double v : x) {
        if (!(v > 0.0)) throw std::domain_error("fit_candidate: non-positive sample");
        sum_log += std::log(v);
    }
    const double mean_log = sum_log / n;
    const double m = mean(x);

    if (name == "lognormal") {
        auto p = fit_lognormal_mle(x);
        double s2 = p.sigma_ln * p.sigma_ln;
        double ss = 0.0;
        for (double v : x) ss += (std::log(v) - p.mu_ln) * (std::log(v) - p.mu_ln);
        c.loglik = -sum_log - 0.5 * n * std::log(2.0 * std::numbers::pi * s2) - ss / (2.0 * s2);
        c.params = {p.mu_ln, p.sigma_ln};
    } else if (name == "gamma") {
        // Newton iteration on the shape; converged when the step is below 1e-12 relative.
        double s = std::log(m) - mean_log;
        if (!(s > 0.0)) throw std::runtime_error("gamma fit: degenerate sample");
        double k = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
        for (int it = 0; it < 100; ++it) {
            double g = std::log(k) - boost::math::digamma(k) - s;
            double dg = 1.0 / k - boost::math::trigamma(k);
            double step = g / dg;
            k -= step;
            if (k <= 0.0) throw std::runtime_error("gamma fit: shape left the domain");
            if (std::abs(step) < 1e-12 * k) break;
        }
        double theta = m / k;
        double sx = 0.0;
        for (double v : x) sx += v;
        c.loglik = (k - 1.0) * sum_log - sx / theta - n * (k * std::log(theta) + std::lgamma(k));
        c.params = {k, theta};
    } else if (name == "weibull") {
        // Newton on the profile equation for the shape, data rescaled by its maximum.
        double xmax = *std::max_element(x.begin(), x.end());
        std::vector<double> lx;
        for (double v : x) lx.push_back(std::log(v / xmax));
        double mlx = mean_log - std::log(xmax);
        auto eval = [&](double k, double& g, double& dg) {
            double s0 = 0, s1 = 0, s2 = 0;
            for (double l : lx) {
                double e = std::exp(k * l);
                s0 += e;
                s1 += e * l;
                s2 += e * l * l;
            }
            g = s1 / s0 - 1.0 / k - mlx;
            dg = (s2 * s0 - s1 * s1) / (s0 * s0) + 1.0 / (k * k);
        };
        double sd = stddev(lx, 0);
        double k = sd > 0 ? 1.2825 / sd : 1.0;
        bool ok = false;
        for (int it = 0; it < 200; ++it) {
            double g, dg;
            eval(k, g, dg);
            double next = k - g / dg;
            if (next <= 0.0) next = 0.5 * k;
            if (std::abs(next - k) < 1e-12 * k) {
                k = next;
                ok = true;
                break;
            }
            k = next;
        }
        if (!ok) throw std::runtime_error("weibull fit: shape iteration did not converge");
        double s0 = 0;
        for (double l : lx) s0 += std::exp(k * l);
        double lam = xmax * std::pow(s0 / n, 1.0 / k);
        double acc = 0.0;
        for (double v : x) acc += std::pow(v / lam, k);
        c.loglik = n * std::log(k) - n * k * std::log(lam) + (k - 1.0) * sum_log - acc;
        c.params = {k, lam};
    } else if (name == "inverse-gaussian") {
        double inv = 0.0;
        for (double v : x) inv += 1.0 / v - 1.0 / m;
        double lam = n / inv;
        double acc = 0.0;
        for (double v : x) acc += (v - m) * (v - m) / v;
        c.loglik = 0.5 * n * std::log(lam / (2.0 * std::numbers::pi)) - 1.5 * sum_log - lam * acc / (2.0 * m * m);
        c.params = {m, lam};
    } else {
        throw std::invalid_argument("unknown candidate distribution '" + name + "'");
    }
    if (!std::isfinite(c.loglik)) throw std::runtime_error(name + " fit: non-finite likelihood");
    const double k_params = 2.0;
    c.aic = 2.0 * k_params - 2.0 * c.loglik;
    c.bic = k_params * std::log(n) - 2.0 * c.loglik;
    return c;
}

ModelComparison aic_bic_compare(const std::vector<double>& samples, const std::vector<std::string>& candidates) {
    if (samples.size() < 30) throw std::domain_error("aic_bic_compare: need at least 30 samples");
    ModelComparison mc;
    for (const auto& name : candidates) {
        try {
            mc.candidates.push_back(fit_candidate(name, samples));
        } catch (const std::invalid_argument&) {
            throw;
        } catch (const std::exception&) {
            CandidateFit c;
            c.name = name;
            c.available = false;
            mc.candidates.push_back(c);
        }
    }
    std::stable_sort(mc.candidates.begin(), mc.candidates.end(), [](const CandidateFit& a, const CandidateFit& b) {
        if (a.available != b.available) return a.available;
        return a.aic < b.aic;
    });
    if (!mc.candidates.empty() && mc.candidates.front().available) {
        double best = mc.candidates.front().aic;
        for (auto& c : mc.candidates)
            if (c.available) c.delta_aic = c.aic - best;
    }
    return mc;
}

std::string magnitude_label(double d) {
    double a = std::abs(d);
    if (a > 1e3) return "Huge (off-scale)";
    if (a >= 2.0) return "Huge";
    if (a >= 1.2) return "Very Large";
    if (a >= 0.8) return "Large";
    if (a >= 0.5) return "Medium";
    if (a >= 0.2) return "Small";
    return "Negligible";
}

EffectSize cohens_d(const std::vector<double>& a, const std::vector<double>& baseline) {
    if (a.empty() || baseline.empty()) throw std::domain_error("cohens_d: empty sample");
    double va = a.size() > 1 ? variance(a) : 0.0;
    double vb = baseline.size() > 1 ? variance(baseline) : 0.0;
    double pooled = std::sqrt((va + vb) / 2.0);
    double diff = mean(a) - mean(baseline);
    EffectSize e;
    if (pooled > 0.0)
        e.cohens_d = diff / pooled;
    else
        e.cohens_d = diff == 0.0 ? 0.0 : std::copysign(kInf, diff);
    e.magnitude = magnitude_label(e.cohens_d);
    return e;
}

std::pair<double, double> mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) throw std::domain_error("mann_whitney_u: empty sample");
    const std::size_t n1 = a.size(), n2 = b.size(), n = n1 + n2;
    std::vector<std::pair<double, int>> all;
    all.reserve(n);
    for (double v : a) all.push_back({v, 0});
    for (double v : b) all.push_back({v, 1});
    std::sort(all.begin(), all.end(), [](auto& x, auto& y) { return x.first < y.first; });
    double r1 = 0.0, tie_term = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && all[j].first == all[i].first) ++j;
        double rank = 0.5 * (i + 1 + j);
        double t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        for (std::size_t k = i; k < j; ++k)
            if (all[k].second == 0) r1 += rank;
        i = j;
    }
    double dn1 = n1, dn2 = n2, dn = n;
    double u1 = r1 - dn1 * (dn1 + 1.0) / 2.0;
    double mu = dn1 * dn2 / 2.0;
    double var = dn1 * dn2 / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
    if (!(var > 0.0)) return {u1, 1.0};
    double z = std::max(0.0, std::abs(u1 - mu) - 0.5) / std::sqrt(var);
    return {u1, std::min(1.0, std::erfc(z / std::numbers::sqrt2))};
}

EffectSize effect_size(const std::vector<double>& a, const std::vector<double>& baseline) {
    EffectSize e = cohens_d(a, baseline);
    std::tie(e.mw_u, e.mw_p) = mann_whitney_u(a, baseline);
    return e;
}

std::pair<double, double> anova_eta2(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) throw std::domain_error("anova_eta2: need at least two groups");
    double total = 0.0;
    std::size_t n = 0;
    for (const auto& g : groups) {
        if (g.size() < 2) throw std::domain_error("anova_eta2: each group needs at least two values");
        for (double v : g) total += v;
        n += g.size();
    }
    double grand = total / n;
    double ssb = 0.0, ssw = 0.0;
    for (const auto& g : groups) {
        double m = mean(g);
        ssb += g.size() * (m - grand) * (m - grand);
        for (double v : g) ssw += (v - m) * (v - m);
    }
    double sst = ssb + ssw;
    double eta2 = sst > 0.0 ? ssb / sst : 0.0;
    double k = static_cast<double>(groups.size());
    double f;
    if (ssw > 0.0)
        f = (ssb / (k - 1.0)) / (ssw / (n - k));
    else
        f = ssb > 0.0 ? kInf : 0.0;
    return {eta2, f};
}

}  // namespace pqcsim

#include "hyperion/analysis.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_fit.h>
#include <gsl/gsl_min.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>

#include "hyperion/errors.hpp"

namespace hyperion {

namespace {

void require_same_size(std::span<const double> a, std::span<const double> b, const char* what) {
    if (a.size() != b.size()) {
        throw AnalysisError(std::string(what) + ": inputs differ in length (" +
                            std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    }
}

struct LinearFit {
    double intercept;
    double slope;
    double slope_var;
    double r_squared;
    std::vector<double> residuals;
};

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    double c0 = 0.0, c1 = 0.0, cov00 = 0.0, cov01 = 0.0, cov11 = 0.0, sumsq = 0.0;
    gsl_fit_linear(x.data(), 1, y.data(), 1, x.size(), &c0, &c1, &cov00, &cov01, &cov11, &sumsq);
    double mean = 0.0;
    for (double v : y) {
        mean += v;
    }
    mean /= static_cast<double>(y.size());
    double total = 0.0;
    for (double v : y) {
        total += (v - mean) * (v - mean);
    }
    LinearFit f{c0, c1, cov11, 1.0, {}};
    if (total > 0.0) {
        f.r_squared = std::clamp(1.0 - sumsq / total, 0.0, 1.0);
    }
    f.residuals.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        f.residuals.push_back(y[i] - (c0 + c1 * x[i]));
    }
    return f;
}

// Least-squares floor + amplitude * exp(-rate * s) for a fixed rate.
struct DecayTrial {
    double floor;
    double amplitude;
    double rss;
};

DecayTrial decay_trial(const std::vector<double>& s, const std::vector<double>& y, double rate) {
    double sw = 0.0, sww = 0.0, sy = 0.0, swy = 0.0;
    const double n = static_cast<double>(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double w = std::exp(-rate * s[i]);
        sw += w;
        sww += w * w;
        sy += y[i];
        swy += w * y[i];
    }
    const double det = n * sww - sw * sw;
    DecayTrial t{0.0, 0.0, 0.0};
    if (det > 0.0) {
        t.amplitude = (n * swy - sw * sy) / det;
        t.floor = (sy - t.amplitude * sw) / n;
    } else {
        t.floor = sy / n;
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double r = y[i] - t.floor - t.amplitude * std::exp(-rate * s[i]);
        t.rss += r * r;
    }
    return t;
}

struct DecayData {
    const std::vector<double>* s;
    const std::vector<double>* y;
};

double decay_objective(double log_rate, void* params) {
    const auto* d = static_cast<const DecayData*>(params);
    return decay_trial(*d->s, *d->y, std::exp(log_rate)).rss;
}

}  // namespace

void DistributionPair::validate() const {
    if (p_cl.size() != p_qm.size()) {
        throw AnalysisError("distribution pair has mismatched index ranges");
    }
    for (const auto* p : {&p_cl, &p_qm}) {
        double s = 0.0;
        for (double v : *p) {
            s += v;
        }
        if (std::abs(s - 1.0) > 1e-12) {
            throw AnalysisError("probability vector sums to " + std::to_string(s));
        }
    }
}

double one_norm(const DistributionPair& pair) {
    pair.validate();
    return one_norm(pair.p_cl, pair.p_qm);
}

double one_norm(std::span<const double> p, std::span<const double> q) {
    require_same_size(p, q, "one_norm");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        s += std::abs(p[i] - q[i]);
    }
    return s;
}

std::vector<double> triangular_smooth(std::span<const double> p, double beta, double delta_s) {
    if (!(beta > 0.0)) {
        throw AnalysisError("triangular_smooth: beta must be > 0");
    }
    if (!(delta_s >= beta * (1.0 - 1e-12))) {
        throw AnalysisError("triangular_smooth: half-width " + std::to_string(delta_s) +
                            " is below the bin spacing " + std::to_string(beta));
    }
    const double ratio = delta_s / beta;
    const auto reach = static_cast<std::ptrdiff_t>(std::ceil(ratio - 1e-12)) - 1;
    std::vector<double> w(static_cast<std::size_t>(reach) + 1);
    double total = 0.0;
    for (std::ptrdiff_t k = 0; k <= reach; ++k) {
        w[static_cast<std::size_t>(k)] = 1.0 - static_cast<double>(k) / ratio;
        total += k == 0 ? w[0] : 2.0 * w[static_cast<std::size_t>(k)];
    }
    for (double& v : w) {
        v /= total;
    }
    const auto n = static_cast<std::ptrdiff_t>(p.size());
    std::vector<double> out(p.size(), 0.0);
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const double mass = p[static_cast<std::size_t>(i)];
        if (mass == 0.0) {
            continue;
        }
        for (std::ptrdiff_t k = -reach; k <= reach; ++k) {
            const std::ptrdiff_t j = std::clamp<std::ptrdiff_t>(i + k, 0, n - 1);
            out[static_cast<std::size_t>(j)] += mass * w[static_cast<std::size_t>(std::abs(k))];
        }
    }
    return out;
}

double sigma_m(double sigma, std::size_t n) {
    if (n == 0) {
        throw AnalysisError("sigma_m: ensemble size must be >= 1");
    }
    return sigma / std::sqrt(static_cast<double>(n));
}

ScalingFit fit_power_law(std::span<const double> x, std::span<const double> y) {
    require_same_size(x, y, "fit_power_law");
    if (x.size() < 3) {
        throw AnalysisError("fit_power_law needs at least 3 points, got " + std::to_string(x.size()));
    }
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
            throw AnalysisError("fit_power_law: nonpositive input at index " + std::to_string(i));
        }
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    const LinearFit f = linear_fit(lx, ly);
    ScalingFit out;
    out.exponent = f.slope;
    out.prefactor = std::exp(f.intercept);
    out.r_squared = f.r_squared;
    out.exponent_std_error = x.size() > 2 ? std::sqrt(std::max(f.slope_var, 0.0)) : 0.0;
    out.residuals = f.residuals;
    return out;
}

ExponentialFit fit_exponential(std::span<const double> tau, std::span<const double> y,
                               double tau_lo, double tau_hi) {
    require_same_size(tau, y, "fit_exponential");
    std::vector<double> t, ly;
    for (std::size_t i = 0; i < tau.size(); ++i) {
        if (tau[i] >= tau_lo && tau[i] <= tau_hi) {
            if (!(y[i] > 0.0)) {
                throw AnalysisError("fit_exponential: nonpositive value at tau=" +
                                    std::to_string(tau[i]));
            }
            t.push_back(tau[i]);
            ly.push_back(std::log(y[i]));
        }
    }
    if (t.size() < 2) {
        throw AnalysisError("fit_exponential: window [" + std::to_string(tau_lo) + ", " +
                            std::to_string(tau_hi) + "] holds fewer than 2 samples");
    }
    const LinearFit f = linear_fit(t, ly);
    return {f.slope, f.intercept, f.r_squared, t.size()};
}

DecayFit fit_decay_time(std::span<const double> tau, std::span<const double> y) {
    require_same_size(tau, y, "fit_decay_time");
    if (tau.size() < 4) {
        throw AnalysisError("fit_decay_time needs at least 4 samples");
    }
    const auto peak = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
    std::vector<double> s, v;
    for (std::size_t i = peak; i < tau.size(); ++i) {
        s.push_back(tau[i] - tau[peak]);
        v.push_back(y[i]);
    }
    DecayFit out;
    out.tau_start = tau[peak];
    if (s.size() < 4 || !(s.back() > 0.0)) {
        warn("fit_decay_time: maximum lies at the end of the series; no decay to fit");
        return out;
    }
    // Coarse logarithmic scan of the rate, then golden-section refinement.
    const double span = s.back();
    const double step = s[1] - s[0];
    const double lo = std::log(1.0 / (20.0 * span));
    const double hi = std::log(1.0 / std::max(step, 1e-12));
    constexpr int grid = 96;
    std::vector<double> rss(grid + 1);
    DecayData data{&s, &v};
    int best = 0;
    for (int k = 0; k <= grid; ++k) {
        rss[static_cast<std::size_t>(k)] = decay_objective(lo + (hi - lo) * k / grid, &data);
        if (rss[static_cast<std::size_t>(k)] < rss[static_cast<std::size_t>(best)]) {
            best = k;
        }
    }
    double log_rate = lo + (hi - lo) * best / grid;
    if (best > 0 && best < grid) {
        gsl_function fn{&decay_objective, &data};
        const auto old_handler = gsl_set_error_handler_off();
        std::unique_ptr<gsl_min_fminimizer, decltype(&gsl_min_fminimizer_free)> m(
            gsl_min_fminimizer_alloc(gsl_min_fminimizer_goldensection), &gsl_min_fminimizer_free);
        const double a = lo + (hi - lo) * (best - 1) / grid;
        const double b = lo + (hi - lo) * (best + 1) / grid;
        if (gsl_min_fminimizer_set(m.get(), &fn, log_rate, a, b) == GSL_SUCCESS) {
            for (int it = 0; it < 200; ++it) {
                gsl_min_fminimizer_iterate(m.get());
                const double x_lo = gsl_min_fminimizer_x_lower(m.get());
                const double x_hi = gsl_min_fminimizer_x_upper(m.get());
                if (gsl_min_test_interval(x_lo, x_hi, 1e-10, 0.0) == GSL_SUCCESS) {
                    break;
                }
            }
            log_rate = gsl_min_fminimizer_x_minimum(m.get());
        }
        gsl_set_error_handler(old_handler);
    }
    const double rate = std::exp(log_rate);
    const DecayTrial t = decay_trial(s, v, rate);
    out.tau_d = 1.0 / rate;
    out.amplitude = t.amplitude;
    out.floor = t.floor;
    out.rms_residual = std::sqrt(t.rss / static_cast<double>(s.size()));
    out.decaying = best > 0 && best < grid && t.amplitude > 0.0;
    if (!out.decaying) {
        warn("fit_decay_time: series does not decay within its span");
    }
    return out;
}

double time_average(std::span<const double> tau, std::span<const double> y, double tau_lo,
                    double tau_hi) {
    require_same_size(tau, y, "time_average");
    double s = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < tau.size(); ++i) {
        if (tau[i] >= tau_lo && tau[i] <= tau_hi) {
            s += y[i];
            ++n;
        }
    }
    if (n == 0) {
        throw AnalysisError("time_average: no samples in [" + std::to_string(tau_lo) + ", " +
                            std::to_string(tau_hi) + "]");
    }
    return s / static_cast<double>(n);
}

double collapse_parameter(double beta, double d) {
    if (!(d > 0.0)) {
        throw AnalysisError("collapse_parameter: D must be > 0");
    }
    return beta * beta / d;
}

ScalingFit smoothing_scaling_check(std::span<const double> beta, std::span<const double> delta_s,
                                   std::span<const double> one_norms) {
    require_same_size(beta, delta_s, "smoothing_scaling_check");
    require_same_size(beta, one_norms, "smoothing_scaling_check");
    std::vector<double> ratio;
    for (std::size_t i = 0; i < beta.size(); ++i) {
        ratio.push_back(beta[i] / delta_s[i]);
    }
    return fit_power_law(ratio, one_norms);
}

Peak peak_abs(std::span<const double> tau, std::span<const double> y, double tau_lo,
              double tau_hi) {
    if (tau.size() != y.size()) {
        throw AnalysisError("peak_abs: tau and y differ in length");
    }
    Peak p;
    bool any = false;
    for (std::size_t i = 0; i < tau.size(); ++i) {
        if (tau[i] >= tau_lo && tau[i] <= tau_hi) {
            any = true;
            if (std::abs(y[i]) > p.value) {
                p = {std::abs(y[i]), tau[i]};
            }
        }
    }
    if (!any) {
        throw AnalysisError("peak_abs: no samples in window");
    }
    return p;
}

Envelope envelope(std::span<const double> tau, std::span<const double> y, double bin) {
    if (tau.size() != y.size() || tau.empty()) {
        throw AnalysisError("envelope: needs equal, non-empty tau and y");
    }
    if (!(bin > 0.0)) {
        throw AnalysisError("envelope: bin must be > 0");
    }
    Envelope env;
    const double t0 = tau.front();
    long current = -1;
    for (std::size_t i = 0; i < tau.size(); ++i) {
        const long k = static_cast<long>(std::floor((tau[i] - t0) / bin));
        const double v = std::abs(y[i]);
        if (k != current) {
            env.tau.push_back(tau[i]);
            env.value.push_back(v);
            current = k;
        } else if (v > env.value.back()) {
            env.value.back() = v;
            env.tau.back() = tau[i];
        }
    }
    return env;
}

double one_norm_floor(std::span<const double> p, double n) {
    if (!(n > 0.0)) {
        throw AnalysisError("one_norm_floor: n must be > 0");
    }
    double s = 0.0;
    for (double x : p) {
        if (x > 0.0) {
            s += std::sqrt(2.0 * x * (1.0 - x) / (std::numbers::pi * n));
        }
    }
    return s;
}

}  // namespace hyperion

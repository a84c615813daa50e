#include "hyperion/quantum.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <string>

#include "hyperion/environment.hpp"
#include "hyperion/errors.hpp"
#include "hyperion/orbit.hpp"
#include "hyperion/schedule.hpp"
#include "vector_kernels.hpp"

namespace hyperion {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double tidal_scale = 1.5 * pi * pi;  // 3 pi^2 / 2

// Tidal coupling A = (3 pi^2 / 2)(alpha / beta)(a/r)^3 and 2 theta at time t.
struct Tidal {
    double coupling;
    double two_theta;
};

Tidal tidal_at(const SystemParams& p, const OrbitSolution& orbit, double t) {
    const auto d = orbit.drive(t);
    return {tidal_scale * p.alpha / p.beta * d.inv_r_cubed, 2.0 * d.theta};
}

class Stepper {
public:
    virtual ~Stepper() = default;
    /// Advances c by h from time t with the noise amplitude sigma R held fixed.
    virtual void step(std::vector<cplx>& c, double t, double h, double noise_amp) = 0;
};

// Shared problem data: kinetic diagonal beta m^2 / 2 per basis index.
struct Basis {
    const SystemParams& params;
    const OrbitSolution& orbit;
    int K;
    int harmonic;
    std::vector<double> kinetic;

    Basis(const SystemParams& p, const OrbitSolution& o, int k, int harm)
        : params(p), orbit(o), K(k), harmonic(harm), kinetic(2 * static_cast<std::size_t>(k) + 1) {
        for (int m = -K; m <= K; ++m) {
            kinetic[static_cast<std::size_t>(m + K)] = 0.5 * p.beta * m * m;
        }
    }
    std::size_t dim() const { return kinetic.size(); }
};

// ---------------------------------------------------------------------------
// Crank-Nicolson (Cayley) on chains of fixed stride.

// Solves (1 + i half H) x = (1 - i half H) c in place for the chain
// c[0], c[stride], ... of length n, where H is tridiagonal with diagonal
// diag[j * stride] (or zero), superdiagonal `upper` and subdiagonal `lower`.
void cayley_chain(cplx* c, std::size_t stride, std::size_t n, const double* diag, cplx upper,
                  cplx lower, double half, std::vector<cplx>& cp, std::vector<cplx>& dp) {
    if (n == 0) {
        return;
    }
    cp.resize(n);
    dp.resize(n);
    const cplx ih(0.0, half);
    const cplx a = ih * lower;
    const cplx u = ih * upper;
    cplx cp_prev = 0.0;
    cplx dp_prev = 0.0;
    cplx x_prev = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const cplx x = c[j * stride];
        const cplx x_next = j + 1 < n ? c[(j + 1) * stride] : cplx(0.0);
        const double d = diag != nullptr ? diag[j * stride] : 0.0;
        const cplx hx = d * x + upper * x_next + lower * x_prev;
        const cplx rhs = x - ih * hx;
        const cplx denom = cplx(1.0, half * d) - a * cp_prev;
        cp[j] = u / denom;
        dp[j] = (rhs - a * dp_prev) / denom;
        cp_prev = cp[j];
        dp_prev = dp[j];
        x_prev = x;
    }
    c[(n - 1) * stride] = dp[n - 1];
    for (std::size_t j = n - 1; j-- > 0;) {
        c[j * stride] = dp[j] - cp[j] * c[(j + 1) * stride];
    }
}

class CrankNicolson final : public Stepper {
public:
    explicit CrankNicolson(const Basis& basis) : basis_(basis) {}

    void step(std::vector<cplx>& c, double t, double h, double noise_amp) override {
        if (noise_amp != 0.0) {
            noise(c, 0.5 * h, noise_amp);
        }
        const Tidal td = tidal_at(basis_.params, basis_.orbit, t + 0.5 * h);
        // H_{m, m+2} = -A e^{2 i theta}; H_{m+2, m} = -A e^{-2 i theta}
        const cplx upper = -td.coupling * std::polar(1.0, td.two_theta);
        const cplx lower = std::conj(upper);
        for (std::size_t s0 = 0; s0 < 2 && s0 < c.size(); ++s0) {
            const std::size_t n = (c.size() - s0 + 1) / 2;
            cayley_chain(c.data() + s0, 2, n, basis_.kinetic.data() + s0, upper, lower, 0.5 * h,
                         cp_, dp_);
        }
        if (noise_amp != 0.0) {
            noise(c, 0.5 * h, noise_amp);
        }
    }

private:
    // Exact-coefficient CN step of the noise coupling (sigma R / 2 beta)(S_+k + S_-k).
    void noise(std::vector<cplx>& c, double duration, double noise_amp) {
        const double g = noise_amp / (2.0 * basis_.params.beta);
        const auto k = static_cast<std::size_t>(basis_.harmonic);
        for (std::size_t s0 = 0; s0 < k && s0 < c.size(); ++s0) {
            const std::size_t n = (c.size() - s0 + k - 1) / k;
            cayley_chain(c.data() + s0, k, n, nullptr, g, g, 0.5 * duration, cp_, dp_);
        }
    }

    const Basis& basis_;
    std::vector<cplx> cp_;
    std::vector<cplx> dp_;
};

// ---------------------------------------------------------------------------
// FFT split-operator: exact kinetic phases in m, exact potential phases in
// angle, composed to fourth order.

std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

std::size_t good_fft_size(std::size_t n) {
    for (std::size_t s = std::max<std::size_t>(n, 2);; ++s) {
        std::size_t r = s;
        for (std::size_t f : {2, 3, 5, 7}) {
            while (r % f == 0) {
                r /= f;
            }
        }
        if (r == 1 && s % 2 == 0) {
            return s;
        }
    }
}

class FftGrid {
public:
    explicit FftGrid(std::size_t size) : size_(size) {
        std::lock_guard lock(fftw_planner_mutex());
        buf_ = fftw_alloc_complex(size_);
        synth_ = fftw_plan_dft_1d(static_cast<int>(size_), buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
        analyse_ = fftw_plan_dft_1d(static_cast<int>(size_), buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
        cos_.resize(size_);
        sin_.resize(size_);
        for (std::size_t k = 0; k < size_; ++k) {
            const double x = 2.0 * pi * static_cast<double>(k) / static_cast<double>(size_);
            cos_[k] = std::cos(x);
            sin_[k] = std::sin(x);
        }
        angle_.resize(size_);
        phase_.resize(2 * size_);
    }
    FftGrid(const FftGrid&) = delete;
    FftGrid& operator=(const FftGrid&) = delete;
    ~FftGrid() {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(synth_);
        fftw_destroy_plan(analyse_);
        fftw_free(buf_);
    }

    std::size_t size() const { return size_; }
    fftw_complex* data() { return buf_; }
    double grid_cos(std::size_t k) const { return cos_[k]; }
    double grid_sin(std::size_t k) const { return sin_[k]; }

    /// Multiplies the amplitudes by exp(-i angle(x_k)) in angle space, x_k = 2 pi k / size.
    template <typename AngleFn>
    void apply_potential(AngleFn&& angle_at) {
        for (std::size_t k = 0; k < size_; ++k) {
            angle_[k] = angle_at(k);
        }
        detail::unit_phases(angle_.data(), phase_.data(), size_);
        fftw_execute(synth_);
        const double inv = 1.0 / static_cast<double>(size_);
        for (std::size_t k = 0; k < size_; ++k) {
            // multiply by (cos a - i sin a) / size
            const double re = buf_[k][0];
            const double im = buf_[k][1];
            const double pc = phase_[2 * k] * inv;
            const double ps = -phase_[2 * k + 1] * inv;
            buf_[k][0] = re * pc - im * ps;
            buf_[k][1] = re * ps + im * pc;
        }
        fftw_execute(analyse_);
    }

private:
    std::size_t size_;
    fftw_complex* buf_ = nullptr;
    fftw_plan synth_ = nullptr;
    fftw_plan analyse_ = nullptr;
    std::vector<double> cos_;
    std::vector<double> sin_;
    std::vector<double> angle_;
    std::vector<double> phase_;
};

class SplitOperator final : public Stepper {
public:
    explicit SplitOperator(const Basis& basis) : basis_(basis) {
        const std::size_t chain_len = (basis_.dim() + 1) / 2;
        chain_grid_ = std::make_unique<FftGrid>(good_fft_size(chain_len + 2));
    }

    void step(std::vector<cplx>& c, double t, double h, double noise_amp) override {
        // Yoshida triple jump of Strang steps T(h/2) V(h) T(h/2).
        static const double w1 = 1.0 / (2.0 - std::cbrt(2.0));
        static const double w0 = 1.0 - 2.0 * w1;
        kinetic(c, 0.5 * w1 * h);
        potential(c, t + 0.5 * w1 * h, w1 * h, noise_amp);
        kinetic(c, 0.5 * (w1 + w0) * h);
        potential(c, t + (w1 + 0.5 * w0) * h, w0 * h, noise_amp);
        kinetic(c, 0.5 * (w0 + w1) * h);
        potential(c, t + (w1 + w0 + 0.5 * w1) * h, w1 * h, noise_amp);
        kinetic(c, 0.5 * w1 * h);
    }

private:
    const std::vector<cplx>& kinetic_phases(double duration) {
        auto it = kinetic_cache_.find(duration);
        if (it != kinetic_cache_.end()) {
            return it->second;
        }
        if (kinetic_cache_.size() > 32) {
            kinetic_cache_.clear();
        }
        std::vector<double> angle(basis_.dim());
        for (std::size_t i = 0; i < angle.size(); ++i) {
            angle[i] = -duration * basis_.kinetic[i];
        }
        std::vector<cplx> phases(basis_.dim());
        detail::unit_phases(angle.data(), reinterpret_cast<double*>(phases.data()), angle.size());
        return kinetic_cache_.emplace(duration, std::move(phases)).first->second;
    }

    void kinetic(std::vector<cplx>& c, double duration) {
        const auto& ph = kinetic_phases(duration);
        for (std::size_t i = 0; i < c.size(); ++i) {
            c[i] *= ph[i];
        }
    }

    void potential(std::vector<cplx>& c, double t, double duration, double noise_amp) {
        const Tidal td = tidal_at(basis_.params, basis_.orbit, t);
        const double c2 = std::cos(td.two_theta);
        const double s2 = std::sin(td.two_theta);
        const double tidal = -2.0 * td.coupling * duration;
        if (noise_amp == 0.0) {
            // Parity chains: m = 2j + p sees -2A cos(x - 2 theta) with x = 2 phi.
            FftGrid& g = *chain_grid_;
            for (std::size_t s0 = 0; s0 < 2 && s0 < c.size(); ++s0) {
                const std::size_t n = (c.size() - s0 + 1) / 2;
                load(g, c, s0, 2, n);
                g.apply_potential([&](std::size_t k) {
                    return tidal * (g.grid_cos(k) * c2 + g.grid_sin(k) * s2);
                });
                store(g, c, s0, 2, n);
            }
            return;
        }
        if (!full_grid_) {
            full_grid_ = std::make_unique<FftGrid>(good_fft_size(basis_.dim() + 2));
        }
        FftGrid& g = *full_grid_;
        const double noise = noise_amp / basis_.params.beta * duration;
        const auto harm = static_cast<std::size_t>(basis_.harmonic);
        load(g, c, 0, 1, c.size());
        g.apply_potential([&](std::size_t k) {
            const std::size_t k2 = (2 * k) % g.size();
            const std::size_t kh = (harm * k) % g.size();
            return tidal * (g.grid_cos(k2) * c2 + g.grid_sin(k2) * s2) + noise * g.grid_cos(kh);
        });
        store(g, c, 0, 1, c.size());
    }

    static void load(FftGrid& g, const std::vector<cplx>& c, std::size_t s0, std::size_t stride,
                     std::size_t n) {
        fftw_complex* b = g.data();
        for (std::size_t j = 0; j < n; ++j) {
            b[j][0] = c[s0 + j * stride].real();
            b[j][1] = c[s0 + j * stride].imag();
        }
        for (std::size_t j = n; j < g.size(); ++j) {
            b[j][0] = 0.0;
            b[j][1] = 0.0;
        }
    }

    static void store(FftGrid& g, std::vector<cplx>& c, std::size_t s0, std::size_t stride,
                      std::size_t n) {
        const fftw_complex* b = g.data();
        for (std::size_t j = 0; j < n; ++j) {
            c[s0 + j * stride] = cplx(b[j][0], b[j][1]);
        }
    }

    const Basis& basis_;
    std::unique_ptr<FftGrid> chain_grid_;
    std::unique_ptr<FftGrid> full_grid_;
    std::map<double, std::vector<cplx>> kinetic_cache_;
};

// ---------------------------------------------------------------------------
// Explicit RK4, used only to cross-check the unitary schemes.

class Rk4Monitor final : public Stepper {
public:
    explicit Rk4Monitor(const Basis& basis) : basis_(basis) {}

    void step(std::vector<cplx>& c, double t, double h, double noise_amp) override {
        const std::size_t n = c.size();
        k1_.resize(n);
        k2_.resize(n);
        k3_.resize(n);
        k4_.resize(n);
        tmp_.resize(n);
        derivative(c, t, noise_amp, k1_);
        for (std::size_t i = 0; i < n; ++i) {
            tmp_[i] = c[i] + 0.5 * h * k1_[i];
        }
        derivative(tmp_, t + 0.5 * h, noise_amp, k2_);
        for (std::size_t i = 0; i < n; ++i) {
            tmp_[i] = c[i] + 0.5 * h * k2_[i];
        }
        derivative(tmp_, t + 0.5 * h, noise_amp, k3_);
        for (std::size_t i = 0; i < n; ++i) {
            tmp_[i] = c[i] + h * k3_[i];
        }
        derivative(tmp_, t + h, noise_amp, k4_);
        for (std::size_t i = 0; i < n; ++i) {
            c[i] += h / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
        }
    }

private:
    // out = -i H x
    void derivative(const std::vector<cplx>& x, double t, double noise_amp, std::vector<cplx>& out) {
        const Tidal td = tidal_at(basis_.params, basis_.orbit, t);
        const cplx up = -td.coupling * std::polar(1.0, td.two_theta);
        const cplx down = std::conj(up);
        const double g = noise_amp / (2.0 * basis_.params.beta);
        const auto k = static_cast<std::size_t>(basis_.harmonic);
        const std::size_t n = x.size();
        for (std::size_t i = 0; i < n; ++i) {
            cplx hx = basis_.kinetic[i] * x[i];
            if (i + 2 < n) {
                hx += up * x[i + 2];
            }
            if (i >= 2) {
                hx += down * x[i - 2];
            }
            if (g != 0.0) {
                if (i + k < n) {
                    hx += g * x[i + k];
                }
                if (i >= k) {
                    hx += g * x[i - k];
                }
            }
            out[i] = cplx(hx.imag(), -hx.real());
        }
    }

    const Basis& basis_;
    std::vector<cplx> k1_, k2_, k3_, k4_, tmp_;
};

std::unique_ptr<Stepper> make_stepper(QuantumMethod method, const Basis& basis) {
    switch (method) {
        case QuantumMethod::crank_nicolson:
            return std::make_unique<CrankNicolson>(basis);
        case QuantumMethod::split_operator:
            return std::make_unique<SplitOperator>(basis);
        case QuantumMethod::rk4_monitor:
            return std::make_unique<Rk4Monitor>(basis);
    }
    throw ConfigError("unknown quantum method");
}

void check_state(const QuantumState& s, const EvolutionControls& controls) {
    const double norm = s.norm_squared();
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > controls.norm_tol) {
        std::ostringstream msg;
        msg << "quantum norm drift " << (norm - 1.0) << " exceeds tolerance " << controls.norm_tol
            << " at tau=" << s.tau;
        throw NumericalError(msg.str());
    }
    const std::size_t n = s.c.size();
    for (std::size_t i : {std::size_t{0}, std::size_t{1}, n - 2, n - 1}) {
        if (i < n && std::norm(s.c[i]) > controls.edge_tol) {
            std::ostringstream msg;
            msg << "probability " << std::norm(s.c[i]) << " at basis edge m=" << (static_cast<int>(i) - s.K)
                << " exceeds " << controls.edge_tol << " at tau=" << s.tau
                << "; increase the cutoff K";
            throw NumericalError(msg.str());
        }
    }
}

}  // namespace

double QuantumState::norm_squared() const {
    double s = 0.0;
    for (const cplx& a : c) {
        s += std::norm(a);
    }
    return s;
}

QuantumMethod parse_quantum_method(std::string_view name) {
    if (name == "crank_nicolson") {
        return QuantumMethod::crank_nicolson;
    }
    if (name == "split_operator") {
        return QuantumMethod::split_operator;
    }
    if (name == "rk4_monitor") {
        return QuantumMethod::rk4_monitor;
    }
    throw ConfigError("unknown quantum method '" + std::string(name) + "'");
}

std::string_view to_string(QuantumMethod method) {
    switch (method) {
        case QuantumMethod::crank_nicolson:
            return "crank_nicolson";
        case QuantumMethod::split_operator:
            return "split_operator";
        case QuantumMethod::rk4_monitor:
            return "rk4_monitor";
    }
    return "unknown";
}

void EvolutionControls::validate() const {
    if (!(dtau > 0.0)) {
        throw ConfigError("quantum dtau must be > 0");
    }
    if (!(norm_tol >= 0.0) || !(edge_tol >= 0.0)) {
        throw ConfigError("quantum tolerances must be >= 0");
    }
}

int default_cutoff(double beta) {
    if (!(beta > 0.0)) {
        throw ConfigError("beta must be > 0");
    }
    return static_cast<int>(std::ceil(20.0 / beta - 1e-9)) + 16;
}

QuantumState init_quantum_state(const InitialStateSpec& spec, const SystemParams& params, int K) {
    spec.validate();
    params.validate();
    if (K < 2) {
        throw ConfigError("basis cutoff K must be >= 2");
    }
    QuantumState s;
    s.K = K;
    s.beta = params.beta;
    s.c.resize(2 * static_cast<std::size_t>(K) + 1);
    const double delta = spec.sigma_j * std::numbers::sqrt2;
    double total = 0.0;
    for (int m = -K; m <= K; ++m) {
        const double x = (params.beta * m - spec.j0) / delta;
        const double amp = std::exp(-0.5 * x * x);
        s.at(m) = std::polar(amp, -spec.phi0 * m);
        total += amp * amp;
    }
    if (!(total > 0.0)) {
        throw NumericalError("initial packet lies entirely outside the basis");
    }
    const double scale = 1.0 / std::sqrt(total);
    for (cplx& a : s.c) {
        a *= scale;
    }
    const double edge = std::norm(s.at(-K)) + std::norm(s.at(K));
    if (edge > 1e-12) {
        throw NumericalError("initial packet holds " + std::to_string(edge) +
                             " probability at |m| = K; increase the cutoff");
    }
    return s;
}

void evolve_quantum(QuantumState& state, const SystemParams& params, const OrbitSolution& orbit,
                    double tau_end, const EvolutionControls& controls,
                    const NoiseRealization* noise, std::span<const double> record_at,
                    const StateObserver& observer) {
    params.validate();
    controls.validate();
    if (state.c.size() != 2 * static_cast<std::size_t>(state.K) + 1) {
        throw ConfigError("quantum state size does not match its cutoff");
    }
    if (state.beta != params.beta) {
        throw ConfigError("quantum state basis scale differs from params.beta");
    }
    if (noise != nullptr && tau_end < state.tau) {
        throw ConfigError("backward evolution is only defined without noise");
    }
    if (noise != nullptr && noise->update_interval() < controls.dtau) {
        throw ConfigError("noise update interval shorter than the quantum step");
    }
    const Basis basis(params, orbit, state.K, noise != nullptr ? noise->params().harmonic : 1);
    auto stepper = make_stepper(controls.method, basis);
    const auto schedule = build_schedule(state.tau, tau_end, controls.dtau, record_at, noise);

    for (const Segment& seg : schedule) {
        if (seg.steps > 0 && seg.t1 != seg.t0) {
            const double h = (seg.t1 - seg.t0) / seg.steps;
            const double noise_amp =
                noise != nullptr ? noise->amplitude_at(0.5 * (seg.t0 + seg.t1)) : 0.0;
            for (int s = 0; s < seg.steps; ++s) {
                stepper->step(state.c, seg.t0 + h * s, h, noise_amp);
            }
            state.tau = seg.t1;
            check_state(state, controls);
        }
        if (seg.record && observer) {
            observer(state.tau, state);
        }
    }
    state.tau = tau_end;
}

double expectation_jz(const QuantumState& state) {
    double s = 0.0;
    for (int m = -state.K; m <= state.K; ++m) {
        s += state.beta * m * std::norm(state.at(m));
    }
    return s;
}

double expectation_jz2(const QuantumState& state) {
    double s = 0.0;
    for (int m = -state.K; m <= state.K; ++m) {
        const double j = state.beta * m;
        s += j * j * std::norm(state.at(m));
    }
    return s;
}

std::vector<double> probability_vector(const QuantumState& state) {
    std::vector<double> p(state.c.size());
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = std::norm(state.c[i]);
        total += p[i];
    }
    for (double& x : p) {
        x /= total;
    }
    return p;
}

double fidelity(const QuantumState& a, const QuantumState& b) {
    if (a.c.size() != b.c.size()) {
        throw ConfigError("fidelity of states on different bases");
    }
    cplx overlap = 0.0;
    for (std::size_t i = 0; i < a.c.size(); ++i) {
        overlap += std::conj(a.c[i]) * b.c[i];
    }
    return std::norm(overlap);
}

}  // namespace hyperion

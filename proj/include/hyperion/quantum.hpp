#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "hyperion/params.hpp"

namespace hyperion {

class OrbitSolution;
class NoiseRealization;

using cplx = std::complex<double>;

/// Amplitudes c_m on the truncated angular-momentum basis m = -K..K.
struct QuantumState {
    int K = 0;
    double beta = 0.0;
    std::vector<cplx> c;  ///< c[m + K]
    double tau = 0.0;

    std::size_t dim() const noexcept { return c.size(); }
    cplx& at(int m) { return c[static_cast<std::size_t>(m + K)]; }
    const cplx& at(int m) const { return c[static_cast<std::size_t>(m + K)]; }
    double norm_squared() const;
};

enum class QuantumMethod {
    crank_nicolson,  ///< Cayley form, tridiagonal solve per parity chain
    split_operator,  ///< FFT kinetic/potential splitting, 4th-order composition
    rk4_monitor,     ///< explicit RK4, cross-check only
};

QuantumMethod parse_quantum_method(std::string_view name);
std::string_view to_string(QuantumMethod method);

struct EvolutionControls {
    double dtau = 1e-3;
    QuantumMethod method = QuantumMethod::split_operator;
    double norm_tol = 1e-9;    ///< abort when |norm^2 - 1| exceeds this
    double edge_tol = 1e-10;   ///< abort when |c_{+-K}|^2 exceeds this

    void validate() const;
};

/// ceil(20 / beta) plus 16 guard levels.
int default_cutoff(double beta);

/// Normalized Gaussian packet c_m ~ exp(-(beta m - j0)^2 / (2 delta^2) - i phi0 m),
/// delta = sigma_j sqrt(2). Throws NumericalError if more than 1e-12 of the
/// probability sits on the edge levels.
QuantumState init_quantum_state(const InitialStateSpec& spec, const SystemParams& params, int K);

using StateObserver = std::function<void(double tau, const QuantumState&)>;

/// Integrates i dc_m/dtau = (beta m^2 / 2) c_m
///   - (3 pi^2 / 2)(alpha / beta)(a/r)^3 (c_{m+2} e^{2 i theta} + c_{m-2} e^{-2 i theta})
///   + (sigma R / (2 beta)) (c_{m+k} + c_{m-k})
/// from state.tau to tau_end (either direction when noise is absent).
/// Never renormalizes; throws NumericalError on norm drift or edge leakage.
void evolve_quantum(QuantumState& state, const SystemParams& params, const OrbitSolution& orbit,
                    double tau_end, const EvolutionControls& controls,
                    const NoiseRealization* noise, std::span<const double> record_at,
                    const StateObserver& observer);

/// Sum of beta m |c_m|^2.
double expectation_jz(const QuantumState& state);

/// Sum of (beta m)^2 |c_m|^2.
double expectation_jz2(const QuantumState& state);

/// |c_m|^2, divided by the total so the result sums to one.
std::vector<double> probability_vector(const QuantumState& state);

/// |<a|b>|^2 for states on the same basis.
double fidelity(const QuantumState& a, const QuantumState& b);

}  // namespace hyperion

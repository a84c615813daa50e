#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hyperion/comparison.hpp"
#include "hyperion/config.hpp"
#include "hyperion/environment.hpp"
#include "hyperion/params.hpp"
#include "hyperion/quantum.hpp"

namespace hyperion {

enum class ExperimentKind {
    comparison,       ///< noise-free quantum vs classical, one run per beta
    decoherence,      ///< realization averages over (beta, sigma, tau_c) points
    classical_decay,  ///< one-norm between two classical ensembles
    poincare,
    lyapunov,
    noise_check,      ///< generator autocovariance and diffusion oracle
    unitarity,        ///< norm drift and parity of one noise-free quantum run
    first_integral,   ///< energy drift of classical trajectories at e = 0
};

std::string_view to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view name);

/// Windows used by the comparison analysis. A window whose upper end is
/// beyond the run, or is zero, is skipped.
struct AnalysisWindows {
    double early_lo = 0.0;
    double early_hi = 0.0;       ///< peak |<Jz> difference| window
    double growth_lo = 2.0;
    double growth_hi = 5.5;      ///< exponential fit of the envelope
    double envelope_bin = 0.5;
    double stop_before_lo = 3.0;
    double stop_before_hi = 6.0;
    double stop_after_lo = 6.0;
    double stop_after_hi = 12.0;
    double saturation_lo = 20.0;
    double saturation_hi = 100.0;
    double maximum_lo = 0.0;
    double maximum_hi = 100.0;   ///< peak |<Jz> difference| after growth stops
    double plateau_tau_c = 0.04; ///< decoherence: tau_c at and above which tau_d is averaged
};

struct DecoherencePoint {
    std::vector<std::string> axes;  ///< sweep axes the point belongs to
    double beta = 0.05;
    double sigma = 0.0;
    double tau_c = 0.01;
};

/// Parsed, validated experiment configuration. `normalized` is the
/// defaults-filled JSON that identifies the run.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::comparison;
    std::string name;
    std::uint64_t seed = 1;

    SystemParams system;
    std::size_t orbit_samples = 4096;
    InitialStateSpec initial;
    InitialStateSpec initial_b;

    EvolutionControls quantum;
    int cutoff = 0;
    ClassicalSampling sampling = ClassicalSampling::monte_carlo;
    std::size_t ensemble_size = 100000;
    std::size_t quadrature_j = 300;
    std::size_t quadrature_phi = 120;

    std::vector<double> betas;
    double tau_end = 10.0;
    double every = 0.1;
    std::vector<double> distributions_at;
    std::vector<double> smoothing;
    AnalysisWindows windows;

    std::optional<NoiseParams> noise;
    std::vector<DecoherencePoint> points;
    std::size_t realizations = 100;
    std::size_t export_noise = 0;

    std::vector<InitialStateSpec> starts;
    int periods = 200;
    double tau_total = 400.0;

    std::size_t samples = 1000000;
    std::size_t max_lag = 8;
    std::size_t walks = 20000;
    double walk_tau = 2.0;

    bool even_only = true;  ///< unitarity: start from the even-m projection

    std::string snapshot_format = "none";  ///< none, csv, binary
    std::vector<double> snapshot_at;
    std::size_t snapshot_members = 0;      ///< 0: every member

    json normalized;

    /// Record times every, 2 every, ..., tau_end plus any distribution and
    /// snapshot times, ascending and unique.
    std::vector<double> record_times() const;
};

/// Validates and fills defaults. Errors carry the field path.
ExperimentConfig parse_experiment(const json& input);

/// Runs the experiment, writing its CSV files into `dir` (which must exist),
/// and returns the summary: per-item analysis, cross-item fits and flat
/// scalar `metrics`. Results do not depend on `threads`.
json run_experiment(const ExperimentConfig& config, const std::filesystem::path& dir,
                    unsigned threads);

}  // namespace hyperion

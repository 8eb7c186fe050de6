#pragma once

// Intensity-product traces and the fringe metrics extracted from them.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sagnacsr {

struct FringeTrace {
    std::vector<double> zeta_grid;  ///< uniform, strictly increasing (rad)
    std::vector<double> values;     ///< non-negative, same length
    std::string label;

    /// Throws DomainError if the grid/values invariants do not hold.
    void validate() const;

    std::size_t size() const { return values.size(); }
    double step() const;
    /// True when the grid is [a, a + 2pi) sampled without the endpoint.
    bool spans_one_period() const;
};

/// `points` samples of [start, end), endpoint excluded.
std::vector<double> uniform_grid(double start, double end, std::size_t points);

/// One full period [0, 2pi).
std::vector<double> period_grid(std::size_t points);

struct CorrelationResult {
    int order = 0;  ///< N
    FringeTrace trace;
    double visibility = 0.0;
    /// Maxima per 2pi; empty when the grid cannot resolve the fringes.
    std::optional<int> fringe_count;
    /// fringe_count relative to the single first-order fringe per 2pi.
    std::optional<double> enhancement;
    double effective_wavelength_ratio = 0.0;  ///< lambda_B / lambda_0 = 1/N
};

/// Second-order product i1 * i2 of block k with unit norm, i.e. sin^2(zeta - xi_k).
double second_order(double zeta, std::size_t k, double xi_k);

/// Sum of log(second_order) over the schedule; -inf when any factor is zero.
double log_nth_order(double zeta, std::span<const double> schedule);

/// Peak-normalized N-th order product (N = 2K) over the K blocks of `schedule`.
/// The product is accumulated in log space and divided by its supremum,
/// located by refining the grid maximum on the continuous product.
/// Throws DomainError on an empty schedule or empty grid.
CorrelationResult nth_order(std::span<const double> zeta_grid, std::span<const double> schedule);

/// Unnormalized I_0^N 2^{-KN} prod_k sin^2(zeta - xi_k). Underflows for large N;
/// kept for prefactor bookkeeping only.
double raw_nth_order(double zeta, std::span<const double> schedule, double input_intensity);

/// sin^2(N zeta / 2): the de Broglie-wavelength closed form.
FringeTrace pbw_closed_form(std::span<const double> zeta_grid, int order);

/// Turns per-point log values (with -inf for exact zeros) into a trace
/// normalized by the supremum of `log_fn`, refined near the grid maximum.
FringeTrace peak_normalize_log(std::span<const double> zeta_grid, std::span<const double> log_values,
                               const std::function<double(double)>& log_fn, std::string label);

/// Fills the derived metrics of a normalized product trace of order N.
CorrelationResult summarize(FringeTrace trace, int order);

/// (max - min) / (max + min). Throws DegenerateTraceError on an all-zero trace.
double visibility(const FringeTrace& trace);

/// Visibility of the best single-harmonic fit a + b cos(order zeta + phi)
/// over one period: |b| / a. Robust to shot noise, unlike max/min.
double fitted_visibility(const FringeTrace& trace, int order);

/// Strict local maxima over one 2pi period with periodic wrap; plateaus count
/// once. Throws ResolutionError if the grid has fewer than 64 points per
/// fringe (of `expected_order` when given, else of the count found) or does
/// not span one period.
int count_fringes(const FringeTrace& trace, std::optional<int> expected_order = {});

inline constexpr std::size_t kPointsPerFringe = 64;

enum class DetectionKind { ideal, poisson };

struct DetectionModel {
    DetectionKind kind = DetectionKind::ideal;
    double photons_per_channel = 1e15 / 8.0;
    std::uint64_t seed = 0;

    void validate() const;

    bool operator==(const DetectionModel&) const = default;
};

/// Ideal: identity. Poisson: each value v becomes Poisson(v p) / p with a
/// counter-based draw per grid point.
FringeTrace detect(const FringeTrace& trace, const DetectionModel& model);

/// Error-propagation phase uncertainty min_zeta sqrt(mu) / |dmu/dzeta| with
/// mu = v p photon counts and central differences on the grid.
/// Requires a poisson model; throws DegenerateTraceError if the slope
/// vanishes everywhere.
double phase_sensitivity(const FringeTrace& trace, const DetectionModel& model);

}  // namespace sagnacsr

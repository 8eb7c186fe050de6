#include "sagnacsr/correlator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <boost/math/tools/minima.hpp>

#include "sagnacsr/eraser_bank.hpp"
#include "sagnacsr/errors.hpp"
#include "sagnacsr/parallel.hpp"
#include "sagnacsr/rng.hpp"

namespace sagnacsr {

namespace {

constexpr double kGridTol = 1e-12;
constexpr double kPeriodTol = 1e-9;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

void FringeTrace::validate() const
{
    if (zeta_grid.size() != values.size())
        throw DomainError("trace '" + label + "': grid and values differ in length");
    if (zeta_grid.size() < 2) throw DomainError("trace '" + label + "': needs at least two points");
    const double h = step();
    if (!(h > 0.0)) throw DomainError("trace '" + label + "': grid is not strictly increasing");
    for (std::size_t i = 1; i < zeta_grid.size(); ++i) {
        if (std::abs((zeta_grid[i] - zeta_grid[i - 1]) - h) > kGridTol)
            throw DomainError("trace '" + label + "': grid is not uniform");
    }
    for (double v : values)
        if (!std::isfinite(v) || v < 0.0)
            throw DomainError("trace '" + label + "': values must be finite and non-negative");
}

double FringeTrace::step() const
{
    if (zeta_grid.size() < 2) return 0.0;
    return (zeta_grid.back() - zeta_grid.front()) / double(zeta_grid.size() - 1);
}

bool FringeTrace::spans_one_period() const
{
    return zeta_grid.size() >= 2 && std::abs(step() * double(zeta_grid.size()) - 2.0 * kPi) <= kPeriodTol;
}

std::vector<double> uniform_grid(double start, double end, std::size_t points)
{
    if (points == 0) throw DomainError("uniform_grid: zero points");
    if (!(end > start)) throw DomainError("uniform_grid: end must exceed start");
    std::vector<double> grid(points);
    const double h = (end - start) / double(points);
    for (std::size_t i = 0; i < points; ++i) grid[i] = start + double(i) * h;
    return grid;
}

std::vector<double> period_grid(std::size_t points) { return uniform_grid(0.0, 2.0 * kPi, points); }

double second_order(double zeta, std::size_t k, double xi_k)
{
    const auto [i1, i2] = block_intensities(zeta, k, xi_k, 1.0);
    return i1 * i2;
}

double log_nth_order(double zeta, std::span<const double> schedule)
{
    double acc = 0.0;
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        const double r = second_order(zeta, k, schedule[k]);
        if (!(r > 0.0)) return kNegInf;
        acc += std::log(r);
    }
    return acc;
}

FringeTrace peak_normalize_log(std::span<const double> zeta_grid, std::span<const double> log_values,
                               const std::function<double(double)>& log_fn, std::string label)
{
    FringeTrace trace{{zeta_grid.begin(), zeta_grid.end()}, std::vector<double>(zeta_grid.size(), 0.0),
                      std::move(label)};

    std::size_t imax = log_values.size();
    for (std::size_t i = 0; i < log_values.size(); ++i) {
        if (std::isfinite(log_values[i]) && (imax == log_values.size() || log_values[i] > log_values[imax]))
            imax = i;
    }
    if (imax == log_values.size()) return trace;  // all zero

    // Refine on the continuous product in a local coordinate around the grid
    // maximum; the supremum then does not depend on where the grid falls.
    double peak = log_values[imax];
    const double h = zeta_grid.size() > 1 ? trace.step() : 1e-3;
    const double centre = zeta_grid[imax];
    auto neg = [&](double u) {
        const double v = log_fn(centre + u);
        return std::isfinite(v) ? -v : std::numeric_limits<double>::max();
    };
    std::uintmax_t iters = 200;
    const auto best = boost::math::tools::brent_find_minima(neg, -h, h, std::numeric_limits<double>::digits / 2,
                                                            iters);
    peak = std::max(peak, -best.second);

    for (std::size_t i = 0; i < log_values.size(); ++i)
        if (std::isfinite(log_values[i])) trace.values[i] = std::exp(log_values[i] - peak);
    return trace;
}

CorrelationResult summarize(FringeTrace trace, int order)
{
    CorrelationResult result;
    result.order = order;
    result.visibility = visibility(trace);
    if (trace.spans_one_period() && trace.size() >= kPointsPerFringe * std::size_t(std::max(order, 1))) {
        result.fringe_count = count_fringes(trace, order);
        result.enhancement = double(*result.fringe_count) / 1.0;
    }
    result.effective_wavelength_ratio = 1.0 / double(order);
    result.trace = std::move(trace);
    return result;
}

CorrelationResult nth_order(std::span<const double> zeta_grid, std::span<const double> schedule)
{
    if (schedule.empty()) throw DomainError("nth_order: empty phase schedule");
    if (zeta_grid.empty()) throw DomainError("nth_order: empty grid");

    std::vector<double> logs(zeta_grid.size());
    parallel_for(zeta_grid.size(), [&](std::size_t i) { logs[i] = log_nth_order(zeta_grid[i], schedule); });

    const int order = 2 * int(schedule.size());
    auto trace = peak_normalize_log(zeta_grid, logs,
                                    [schedule](double z) { return log_nth_order(z, schedule); },
                                    "R" + std::to_string(order));
    return summarize(std::move(trace), order);
}

double raw_nth_order(double zeta, std::span<const double> schedule, double input_intensity)
{
    const double k = double(schedule.size());
    double r = std::pow(input_intensity, 2.0 * k) * std::pow(2.0, -2.0 * k * k);
    for (std::size_t i = 0; i < schedule.size(); ++i) r *= second_order(zeta, i, schedule[i]);
    return r;
}

FringeTrace pbw_closed_form(std::span<const double> zeta_grid, int order)
{
    if (order < 1) throw DomainError("pbw_closed_form: order must be >= 1");
    FringeTrace trace{{zeta_grid.begin(), zeta_grid.end()}, std::vector<double>(zeta_grid.size()),
                      "PBW" + std::to_string(order)};
    for (std::size_t i = 0; i < zeta_grid.size(); ++i) {
        const double s = std::sin(0.5 * order * zeta_grid[i]);
        trace.values[i] = s * s;
    }
    return trace;
}

double visibility(const FringeTrace& trace)
{
    trace.validate();
    const auto [lo, hi] = std::minmax_element(trace.values.begin(), trace.values.end());
    if (*hi + *lo == 0.0) throw DegenerateTraceError("visibility undefined for an all-zero trace");
    return (*hi - *lo) / (*hi + *lo);
}

double fitted_visibility(const FringeTrace& trace, int order)
{
    trace.validate();
    if (!trace.spans_one_period()) throw DomainError("fitted_visibility: trace must span one 2pi period");
    const double n = double(trace.size());
    double a = 0.0, b = 0.0, c = 0.0;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const double arg = order * trace.zeta_grid[i];
        a += trace.values[i];
        b += trace.values[i] * std::cos(arg);
        c += trace.values[i] * std::sin(arg);
    }
    a /= n;
    b *= 2.0 / n;
    c *= 2.0 / n;
    if (!(a > 0.0)) throw DegenerateTraceError("fitted_visibility: zero mean intensity");
    return std::hypot(b, c) / a;
}

int count_fringes(const FringeTrace& trace, std::optional<int> expected_order)
{
    trace.validate();
    if (!trace.spans_one_period()) throw DomainError("count_fringes: trace must span one 2pi period");
    if (expected_order && trace.size() < kPointsPerFringe * std::size_t(std::max(*expected_order, 1)))
        throw ResolutionError("count_fringes: " + std::to_string(trace.size()) + " points cannot resolve " +
                              std::to_string(*expected_order) + " fringes");

    // Collapse runs of equal values (circularly) so a flat top counts once.
    const auto& v = trace.values;
    const std::size_t n = v.size();
    std::size_t start = 0;
    while (start < n && v[start] == v[(start + n - 1) % n]) ++start;
    if (start == n) return 0;  // constant trace
    std::vector<double> runs;
    for (std::size_t j = 0; j < n; ++j) {
        const double x = v[(start + j) % n];
        if (runs.empty() || x != runs.back()) runs.push_back(x);
    }

    int maxima = 0;
    const std::size_t m = runs.size();
    for (std::size_t r = 0; r < m; ++r) {
        if (runs[r] > runs[(r + m - 1) % m] && runs[r] > runs[(r + 1) % m]) ++maxima;
    }

    if (!expected_order && trace.size() < kPointsPerFringe * std::size_t(maxima))
        throw ResolutionError("count_fringes: fewer than 64 points per fringe");
    return maxima;
}

void DetectionModel::validate() const
{
    if (kind == DetectionKind::poisson && !(photons_per_channel > 0.0 && std::isfinite(photons_per_channel)))
        throw ConfigError("detection.photons_per_channel must be positive for poisson detection");
}

FringeTrace detect(const FringeTrace& trace, const DetectionModel& model)
{
    model.validate();
    FringeTrace out = trace;
    if (model.kind == DetectionKind::ideal) return out;

    const double p = model.photons_per_channel;
    parallel_for(trace.size(), [&](std::size_t i) {
        const double mean = trace.values[i] * p;
        if (!(mean > 0.0)) {
            out.values[i] = 0.0;
            return;
        }
        CounterRng rng(model.seed, static_cast<std::uint64_t>(RngStream::detection), i);
        std::poisson_distribution<long long> draw(mean);
        out.values[i] = double(draw(rng)) / p;
    });
    return out;
}

double phase_sensitivity(const FringeTrace& trace, const DetectionModel& model)
{
    if (model.kind != DetectionKind::poisson) throw DomainError("phase_sensitivity: poisson model required");
    model.validate();
    trace.validate();

    const auto& v = trace.values;
    const std::size_t n = v.size();
    const double h = trace.step();
    const double p = model.photons_per_channel;
    const bool periodic = trace.spans_one_period();

    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        double slope;
        if (periodic)
            slope = (v[(i + 1) % n] - v[(i + n - 1) % n]) / (2.0 * h);
        else if (i == 0)
            slope = (v[1] - v[0]) / h;
        else if (i == n - 1)
            slope = (v[n - 1] - v[n - 2]) / h;
        else
            slope = (v[i + 1] - v[i - 1]) / (2.0 * h);

        const double mu = v[i] * p;
        const double dmu = std::abs(slope) * p;
        if (mu > 0.0 && dmu > 0.0) best = std::min(best, std::sqrt(mu) / dmu);
    }
    if (!std::isfinite(best)) throw DegenerateTraceError("phase_sensitivity: trace has no usable slope");
    return best;
}

}  // namespace sagnacsr

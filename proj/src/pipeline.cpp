#include "sagnacsr/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "sagnacsr/errors.hpp"
#include "sagnacsr/parallel.hpp"

namespace sagnacsr {

namespace {

JonesVector interferometer_output(Interferometer which, double zeta, const NoiseSpec& noise,
                                  std::uint64_t sample, double input_intensity)
{
    return which == Interferometer::sagnac ? sagnac_output(zeta, noise, sample, input_intensity)
                                           : mzi_output(zeta, noise, sample, input_intensity);
}

double log_product_of_bank(const JonesVector& e_a, const EraserBankSpec& bank, double* d1, double* d2,
                           std::size_t stride)
{
    double acc = 0.0;
    bool zero = false;
    for (std::size_t k = 0; k < std::size_t(bank.block_count); ++k) {
        const BlockFields f = bank_block_fields(e_a, bank, k);
        const double i1 = f.e1.intensity();
        const double i2 = f.e2.intensity();
        if (d1) d1[k * stride] = i1;
        if (d2) d2[k * stride] = i2;
        if (i1 > 0.0 && i2 > 0.0)
            acc += std::log(i1) + std::log(i2);
        else
            zero = true;
    }
    return zero ? -std::numeric_limits<double>::infinity() : acc;
}

}  // namespace

BankRun run_bank(std::span<const double> zeta_grid, const EraserBankSpec& bank, double input_intensity,
                 const NoiseSpec& noise, Interferometer which)
{
    bank.validate();
    noise.validate();
    if (zeta_grid.size() < 2) throw DomainError("run_bank: grid needs at least two points");
    if (which == Interferometer::sagnac && noise.kind == NoiseKind::differential_arm)
        throw ConfigError("differential_arm noise cannot be represented in the shared-path Sagnac loop");

    const std::size_t n = zeta_grid.size();
    const std::size_t blocks = std::size_t(bank.block_count);

    // Block-major scratch so each grid point writes a disjoint column.
    std::vector<double> d1(blocks * n), d2(blocks * n), logs(n);
    parallel_for(n, [&](std::size_t i) {
        const JonesVector e_a = interferometer_output(which, zeta_grid[i], noise, i, input_intensity);
        logs[i] = log_product_of_bank(e_a, bank, &d1[i], &d2[i], n);
    });

    const double h = (zeta_grid.back() - zeta_grid.front()) / double(n - 1);
    auto log_fn = [&](double z) {
        const double pos = std::round((z - zeta_grid.front()) / h);
        const auto sample = std::uint64_t(std::clamp(pos, 0.0, double(n - 1)));
        const JonesVector e_a = interferometer_output(which, z, noise, sample, input_intensity);
        return log_product_of_bank(e_a, bank, nullptr, nullptr, 0);
    };

    BankRun run;
    run.detector1.resize(blocks);
    run.detector2.resize(blocks);
    for (std::size_t k = 0; k < blocks; ++k) {
        run.detector1[k].assign(d1.begin() + std::ptrdiff_t(k * n), d1.begin() + std::ptrdiff_t((k + 1) * n));
        run.detector2[k].assign(d2.begin() + std::ptrdiff_t(k * n), d2.begin() + std::ptrdiff_t((k + 1) * n));
    }
    auto trace = peak_normalize_log(zeta_grid, logs, log_fn, "R" + std::to_string(bank.total_order()));
    run.product = summarize(std::move(trace), bank.total_order());
    return run;
}

EnsembleRun run_ensemble(std::span<const double> zeta_grid, const EraserBankSpec& bank, const NoiseSpec& noise,
                         std::uint64_t samples, Interferometer which)
{
    bank.validate();
    noise.validate();
    if (samples == 0) throw DomainError("run_ensemble: need at least one sample");
    if (which == Interferometer::sagnac && noise.kind == NoiseKind::differential_arm)
        throw ConfigError("differential_arm noise cannot be represented in the shared-path Sagnac loop");

    const std::size_t n = zeta_grid.size();
    const double norm = physical_block_norm(1.0, bank.block_count);
    std::vector<double> first(n), product(n);

    parallel_for(n, [&](std::size_t i) {
        double first_sum = 0.0, product_sum = 0.0;
        for (std::uint64_t s = 0; s < samples; ++s) {
            const JonesVector e_a = interferometer_output(which, zeta_grid[i], noise, s, 1.0);
            double r = 1.0;
            for (std::size_t k = 0; k < std::size_t(bank.block_count); ++k) {
                const BlockFields f = bank_block_fields(e_a, bank, k);
                const double i1 = f.e1.intensity() / norm;
                if (k == 0) first_sum += i1;
                r *= i1 * (f.e2.intensity() / norm);
            }
            product_sum += r;
        }
        first[i] = first_sum / double(samples);
        product[i] = product_sum / double(samples);
    });

    auto normalized = [&](std::vector<double> v, std::string label) {
        const double peak = *std::max_element(v.begin(), v.end());
        if (peak > 0.0)
            for (double& x : v) x /= peak;
        return FringeTrace{{zeta_grid.begin(), zeta_grid.end()}, std::move(v), std::move(label)};
    };

    EnsembleRun run;
    run.first_order = normalized(std::move(first), "I1");
    run.product = normalized(std::move(product), "R" + std::to_string(bank.total_order()));
    run.first_order_visibility = visibility(run.first_order);
    run.product_visibility = visibility(run.product);

    // The first-order fringe averages to (1 - Re(m e^{i zeta})) with m the mean
    // phasor of the differential phase, so its visibility estimates |m|.
    const bool dephased = which == Interferometer::mzi && noise.kind == NoiseKind::differential_arm;
    if (dephased && samples > 1) {
        std::complex<double> mean{0.0, 0.0};
        for (std::uint64_t s = 0; s < samples; ++s) mean += std::polar(1.0, sample_noise_phase(noise, s));
        mean /= double(samples);
        const double mag = std::abs(mean);
        const std::complex<double> dir = mag > 0.0 ? std::conj(mean) / mag : std::complex<double>{1.0, 0.0};
        double sum = 0.0, sum_sq = 0.0;
        for (std::uint64_t s = 0; s < samples; ++s) {
            const double p = (std::polar(1.0, sample_noise_phase(noise, s)) * dir).real();
            sum += p;
            sum_sq += p * p;
        }
        const double ns = double(samples);
        const double var = std::max(0.0, (sum_sq - sum * sum / ns) / (ns - 1.0));
        run.first_order_visibility_stderr = std::sqrt(var / ns);
    }
    return run;
}

}  // namespace sagnacsr

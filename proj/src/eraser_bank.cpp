#include "sagnacsr/eraser_bank.hpp"

#include <cmath>
#include <string>

#include "sagnacsr/errors.hpp"

namespace sagnacsr {

namespace {

constexpr double kScheduleTol = 1e-12;

// Retarder and polarizer applied to one BS output arm.
JonesVector project_arm(const JonesVector& arm, double xi_k, double pol_angle)
{
    return apply(polarizer_matrix(pol_angle), apply(retarder_matrix(-xi_k), arm));
}

}  // namespace

EraserBankSpec EraserBankSpec::make(int block_count, BankMode mode)
{
    EraserBankSpec spec;
    spec.block_count = block_count;
    spec.mode = mode;
    spec.schedule = phase_schedule(block_count);
    return spec;
}

void EraserBankSpec::validate() const
{
    if (block_count < 1) throw ConfigError("bank.block_count must be at least 1");
    if (schedule.size() != static_cast<std::size_t>(block_count))
        throw ConfigError("phase schedule length " + std::to_string(schedule.size()) +
                          " does not match block_count " + std::to_string(block_count));
    if (!std::isfinite(polarizer_angle)) throw ConfigError("bank.polarizer_angle must be finite");

    const double step = kPi / block_count;
    for (std::size_t k = 1; k < schedule.size(); ++k) {
        if (std::abs((schedule[k] - schedule[k - 1]) - step) > kScheduleTol)
            throw ConfigError("phase schedule is not equally spaced at pi/K");
    }
    const double span = schedule.back() - schedule.front();
    if (std::abs(span - kPi * (block_count - 1) / block_count) > kScheduleTol)
        throw ConfigError("phase schedule violates the pi-modulus span");

    if (strict_qwp && mode == BankMode::qwp_blocks) {
        for (double xi : schedule)
            if (!qwp_realizable(xi))
                throw ConfigError("strict QWP mode: schedule entry " + std::to_string(xi) +
                                  " is not one of {0, pi/2, pi}");
    }
}

std::vector<double> phase_schedule(int block_count)
{
    if (block_count < 1) throw DomainError("phase_schedule: block count must be >= 1");
    std::vector<double> xi(static_cast<std::size_t>(block_count));
    for (int k = 0; k < block_count; ++k) xi[k] = kPi * k / block_count;
    return xi;
}

bool qwp_realizable(double xi)
{
    for (auto rot : {QwpRotation::absent, QwpRotation::fast_axis_vertical,
                     QwpRotation::fast_axis_horizontal})
        if (std::abs(xi - qwp_phase_for_rotation(rot)) <= kScheduleTol) return true;
    return false;
}

double physical_block_norm(double input_intensity, int block_count)
{
    return input_intensity / (4.0 * block_count);
}

double cascade_block_norm(double input_intensity, int block_count)
{
    return input_intensity * std::ldexp(1.0, -block_count);
}

BlockFields block_fields(const JonesVector& e_a, std::size_t k, double xi_k, int block_count,
                         double pol_angle, double global_phase)
{
    if (block_count < 1) throw DomainError("block_fields: block count must be >= 1");
    const JonesVector share = e_a * std::polar(1.0 / std::sqrt(double(block_count)), global_phase);
    const BsFlip flip = (k % 2 == 0) ? BsFlip::reflected : BsFlip::transmitted;
    const BsOutputs arms = bs_split(share, flip);
    return {k, project_arm(arms.transmitted, xi_k, pol_angle),
            project_arm(arms.reflected, xi_k, pol_angle), global_phase};
}

BlockFields slm_pixel_fields(const JonesVector& e_a, std::size_t k, double xi_k, int block_count,
                             double pol_angle, double global_phase)
{
    if (block_count < 1) throw DomainError("slm_pixel_fields: block count must be >= 1");
    // E_1A and E_2A come from one splitter ahead of the SLM pair; beam
    // expansion then gives each pixel 1/K of each arm.
    const BsOutputs arms = bs_split(e_a);
    const ComplexAmp pixel_share = std::polar(1.0 / std::sqrt(double(block_count)), global_phase);
    return {k, project_arm(arms.transmitted * pixel_share, xi_k, pol_angle),
            project_arm(arms.reflected * pixel_share, xi_k, pol_angle), global_phase};
}

BlockFields bank_block_fields(const JonesVector& e_a, const EraserBankSpec& spec, std::size_t k)
{
    const double xi = spec.schedule.at(k);
    if (spec.mode == BankMode::slm_pixels)
        return slm_pixel_fields(e_a, k, xi, spec.block_count, spec.polarizer_angle);
    return block_fields(e_a, k, xi, spec.block_count, spec.polarizer_angle);
}

std::pair<double, double> block_intensities(double zeta, std::size_t k, double xi_k, double norm)
{
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    const double c = sign * std::cos(zeta - xi_k);
    return {norm * (1.0 - c), norm * (1.0 + c)};
}

}  // namespace sagnacsr

#include "sagnacsr/sagnac.hpp"

#include <cmath>
#include <random>

#include "sagnacsr/errors.hpp"
#include "sagnacsr/rng.hpp"

namespace sagnacsr {

void SagnacConfig::validate() const
{
    if (!(wavelength > 0.0) || !std::isfinite(wavelength))
        throw ConfigError("sagnac.wavelength must be positive");
    if (!(enclosed_area > 0.0) || !std::isfinite(enclosed_area))
        throw ConfigError("sagnac.enclosed_area must be positive");
    if (!std::isfinite(angular_velocity))
        throw ConfigError("sagnac.angular_velocity must be finite");
    if (!(input_intensity >= 0.0) || !std::isfinite(input_intensity))
        throw ConfigError("sagnac.input_intensity must be non-negative");
    if (!(photon_rate > 0.0) || !std::isfinite(photon_rate))
        throw ConfigError("sagnac.photon_rate must be positive");
}

void NoiseSpec::validate() const
{
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw ConfigError("noise.sigma must be non-negative");
}

double sagnac_phase(const SagnacConfig& cfg)
{
    cfg.validate();
    return 8.0 * kPi * cfg.enclosed_area * cfg.angular_velocity / (cfg.wavelength * kSpeedOfLight);
}

double sample_noise_phase(const NoiseSpec& noise, std::uint64_t sample)
{
    if (noise.kind == NoiseKind::none || noise.sigma == 0.0) return 0.0;
    CounterRng rng(noise.seed, static_cast<std::uint64_t>(RngStream::phase_noise), sample);
    std::normal_distribution<double> gauss(0.0, noise.sigma);
    return gauss(rng);
}

namespace {

JonesVector two_arm_field(double zeta, double common, double differential, double input_intensity)
{
    const double amp = std::sqrt(input_intensity / 2.0);
    const ComplexAmp global = std::polar(amp, common);
    return {global, -global * std::polar(1.0, zeta + differential)};
}

}  // namespace

JonesVector sagnac_output(double zeta, const NoiseSpec& noise, std::uint64_t sample,
                          double input_intensity)
{
    noise.validate();
    if (noise.kind == NoiseKind::differential_arm)
        throw ConfigError("differential_arm noise cannot be represented in the shared-path Sagnac loop");
    return two_arm_field(zeta, sample_noise_phase(noise, sample), 0.0, input_intensity);
}

JonesVector mzi_output(double zeta, const NoiseSpec& noise, std::uint64_t sample,
                       double input_intensity)
{
    noise.validate();
    const double phi = sample_noise_phase(noise, sample);
    if (noise.kind == NoiseKind::differential_arm)
        return two_arm_field(zeta, 0.0, phi, input_intensity);
    return two_arm_field(zeta, phi, 0.0, input_intensity);
}

}  // namespace sagnacsr

#pragma once

#include <cstdint>

#include "sagnacsr/jones.hpp"

namespace sagnacsr {

/// Speed of light in vacuum, m/s (exact).
inline constexpr double kSpeedOfLight = 299792458.0;

struct SagnacConfig {
    double wavelength = 632.8e-9;   ///< m
    double enclosed_area = 1.0;     ///< m^2
    double angular_velocity = 0.0;  ///< rad/s
    double input_intensity = 1.0;   ///< |E_0|^2, dimensionless
    double photon_rate = 1e15;      ///< photons/s (1 mW HeNe)

    /// Throws ConfigError if any invariant is violated.
    void validate() const;

    bool operator==(const SagnacConfig&) const = default;
};

enum class NoiseKind { none, common_path, differential_arm };

struct NoiseSpec {
    NoiseKind kind = NoiseKind::none;
    double sigma = 0.0;  ///< phase std-dev, rad
    std::uint64_t seed = 0;

    void validate() const;

    bool operator==(const NoiseSpec&) const = default;
};

/// Rotation-induced phase of a single-turn planar loop: 8 pi A Omega / (lambda c).
double sagnac_phase(const SagnacConfig& cfg);

/// Gaussian phase draw for one noise realization. Zero when kind is none or
/// sigma is zero. `sample` selects the realization (counter-based).
double sample_noise_phase(const NoiseSpec& noise, std::uint64_t sample);

/// Sagnac output field (E_0/sqrt2)(H - V e^{i zeta}). Common-path noise enters
/// both components identically; differential-arm noise throws ConfigError
/// since the counterpropagating beams share one path.
JonesVector sagnac_output(double zeta, const NoiseSpec& noise = {}, std::uint64_t sample = 0,
                          double input_intensity = 1.0);

/// Mach-Zehnder baseline with the same polarization encoding. Differential-arm
/// noise adds a sampled phase delta to the V arm: (E_0/sqrt2)(H - V e^{i(zeta+delta)}).
JonesVector mzi_output(double zeta, const NoiseSpec& noise = {}, std::uint64_t sample = 0,
                       double input_intensity = 1.0);

}  // namespace sagnacsr

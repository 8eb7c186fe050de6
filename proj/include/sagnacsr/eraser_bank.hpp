#pragma once

// K phase-controlled quantum-eraser blocks fed by the Sagnac output field.
//
// Each block receives 1/K of the output power, splits it on a beam splitter,
// shifts the V component of both arms by -xi_k and projects onto the
// polarizer axis. Two realizations are modeled:
//
//  * qwp_blocks: one BS per block; odd blocks use the BS with its mirror flip
//    on the transmitted arm, which produces the (-1)^k detector alternation.
//  * slm_pixels: a single BS pair ahead of two SLMs; pixel pair k applies the
//    synchronized retardance xi_k to both arms. No alternation.
//
// With the 45 degree polarizer both give per-detector intensities
//   i1 = norm (1 - s cos(zeta - xi_k)),  i2 = norm (1 + s cos(zeta - xi_k))
// with s = (-1)^k for qwp_blocks and s = 1 for slm_pixels, and the
// energy-conserving norm I_0 / (4K).

#include <cstddef>
#include <utility>
#include <vector>

#include "sagnacsr/jones.hpp"

namespace sagnacsr {

enum class BankMode { qwp_blocks, slm_pixels };

inline constexpr double kDefaultPolarizerAngle = kPi / 4.0;

struct EraserBankSpec {
    int block_count = 4;
    BankMode mode = BankMode::qwp_blocks;
    std::vector<double> schedule;  ///< xi_k, one per block
    /// Only schedules realizable by the three QWP settings {0, pi/2, pi}.
    bool strict_qwp = false;
    double polarizer_angle = kDefaultPolarizerAngle;

    /// Spec with the equally spaced schedule for `block_count` blocks.
    static EraserBankSpec make(int block_count, BankMode mode = BankMode::qwp_blocks);

    int total_order() const { return 2 * block_count; }

    /// Throws ConfigError on any broken invariant (length, spacing, pi-modulus,
    /// strict QWP membership).
    void validate() const;

    bool operator==(const EraserBankSpec&) const = default;
};

struct BlockFields {
    std::size_t k = 0;
    JonesVector e1;
    JonesVector e2;
    double global_phase = 0.0;  ///< gamma_k
};

/// xi_k = pi k / K for k = 0..K-1. Throws DomainError when K < 1.
std::vector<double> phase_schedule(int block_count);

/// True if xi is one of the phases a QWP can impose (0, pi/2, pi).
bool qwp_realizable(double xi);

/// Per-detector normalization for an energy-conserving K-way split.
double physical_block_norm(double input_intensity, int block_count);

/// The I_0 2^{-K} prefactor of a binary cascade of K splitters.
/// Bookkeeping only; traces are peak-normalized before any metric.
double cascade_block_norm(double input_intensity, int block_count);

/// Element-by-element propagation through QWP block k.
BlockFields block_fields(const JonesVector& e_a, std::size_t k, double xi_k, int block_count,
                         double pol_angle = kDefaultPolarizerAngle, double global_phase = 0.0);

/// Element-by-element propagation through SLM pixel pair k.
BlockFields slm_pixel_fields(const JonesVector& e_a, std::size_t k, double xi_k, int block_count,
                             double pol_angle = kDefaultPolarizerAngle,
                             double global_phase = 0.0);

/// Dispatches on spec.mode.
BlockFields bank_block_fields(const JonesVector& e_a, const EraserBankSpec& spec, std::size_t k);

/// Closed-form mean intensities of QWP block k at the 45 degree polarizer.
std::pair<double, double> block_intensities(double zeta, std::size_t k, double xi_k, double norm);

}  // namespace sagnacsr

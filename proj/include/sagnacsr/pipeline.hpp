#pragma once

// End-to-end propagation: interferometer output -> eraser bank -> detectors
// -> intensity product, evaluated element by element with jones_core.

#include <cstdint>
#include <span>
#include <vector>

#include "sagnacsr/correlator.hpp"
#include "sagnacsr/eraser_bank.hpp"
#include "sagnacsr/sagnac.hpp"

namespace sagnacsr {

enum class Interferometer { sagnac, mzi };

struct BankRun {
    /// Per-block raw detector intensities, index [k][grid point].
    std::vector<std::vector<double>> detector1;
    std::vector<std::vector<double>> detector2;
    /// Peak-normalized product over all 2K detectors.
    CorrelationResult product;
};

/// Single-shot sweep. Grid point i uses noise realization i, so common-path
/// noise varies along the sweep.
BankRun run_bank(std::span<const double> zeta_grid, const EraserBankSpec& bank, double input_intensity,
                 const NoiseSpec& noise, Interferometer which = Interferometer::sagnac);

struct EnsembleRun {
    FringeTrace first_order;  ///< mean detector-1 intensity of block 0, peak-normalized
    FringeTrace product;      ///< mean of the unit-norm N-th order product, peak-normalized
    double first_order_visibility = 0.0;
    /// Standard error of the first-order visibility from the per-sample fringe phasors.
    double first_order_visibility_stderr = 0.0;
    double product_visibility = 0.0;
};

/// Ensemble average over `samples` noise realizations; realization s holds
/// for the whole sweep. Reductions run in sample order per grid point.
EnsembleRun run_ensemble(std::span<const double> zeta_grid, const EraserBankSpec& bank,
                         const NoiseSpec& noise, std::uint64_t samples, Interferometer which);

}  // namespace sagnacsr

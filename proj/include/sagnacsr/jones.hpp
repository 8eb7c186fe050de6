#pragma once

// Two-component Jones calculus and the element conventions used by the
// polarization-basis Sagnac setup (HWP, retarder, polarizer, BS, PBS).
// All angles are in radians.

#include <complex>
#include <utility>

namespace sagnacsr {

using ComplexAmp = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Field amplitude along H (h) and V (v).
struct JonesVector {
    ComplexAmp h{0.0, 0.0};
    ComplexAmp v{0.0, 0.0};

    double intensity() const { return std::norm(h) + std::norm(v); }

    JonesVector operator*(ComplexAmp s) const { return {h * s, v * s}; }
    JonesVector operator+(const JonesVector& o) const { return {h + o.h, v + o.v}; }

    bool finite() const;
};

inline JonesVector operator*(ComplexAmp s, const JonesVector& j) { return j * s; }

/// 2x2 complex matrix, row-major.
struct JonesMatrix {
    ComplexAmp hh{1.0, 0.0};
    ComplexAmp hv{0.0, 0.0};
    ComplexAmp vh{0.0, 0.0};
    ComplexAmp vv{1.0, 0.0};

    static JonesMatrix identity() { return {}; }
    static JonesMatrix diagonal(ComplexAmp a, ComplexAmp b) { return {a, 0.0, 0.0, b}; }

    JonesMatrix adjoint() const;
    JonesMatrix operator*(const JonesMatrix& o) const;

    /// Largest entry-wise modulus of (this - o).
    double max_abs_diff(const JonesMatrix& o) const;
};

JonesVector apply(const JonesMatrix& m, const JonesVector& j);

/// Half-wave plate with fast axis at theta: [[cos2t, sin2t], [sin2t, -cos2t]].
JonesMatrix hwp_matrix(double theta);

/// Phase xi on the V component only: diag(1, e^{i xi}).
JonesMatrix retarder_matrix(double xi);

enum class QwpRotation { absent, fast_axis_vertical, fast_axis_horizontal };

/// Retardance a quarter-wave plate imposes on V for each of its three settings.
double qwp_phase_for_rotation(QwpRotation rotation);

/// Rank-1 projector onto the axis (cos theta, sin theta).
JonesMatrix polarizer_matrix(double theta);

/// Which output arm carries the mirror-image H sign flip.
enum class BsFlip { reflected, transmitted };

struct BsOutputs {
    JonesVector transmitted;
    JonesVector reflected;
};

/// Lossless 50:50 beam splitter. The reflected arm picks up a pi/2 phase;
/// the arm selected by `flip` has its H component sign reversed.
BsOutputs bs_split(const JonesVector& j, BsFlip flip = BsFlip::reflected);

struct PbsOutputs {
    JonesVector h_port;
    JonesVector v_port;
};

PbsOutputs pbs_route(const JonesVector& j);

}  // namespace sagnacsr

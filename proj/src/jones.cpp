#include "sagnacsr/jones.hpp"

#include <algorithm>
#include <cmath>

namespace sagnacsr {

namespace {

bool finite_amp(ComplexAmp a) { return std::isfinite(a.real()) && std::isfinite(a.imag()); }

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

}  // namespace

bool JonesVector::finite() const { return finite_amp(h) && finite_amp(v); }

JonesMatrix JonesMatrix::adjoint() const
{
    return {std::conj(hh), std::conj(vh), std::conj(hv), std::conj(vv)};
}

JonesMatrix JonesMatrix::operator*(const JonesMatrix& o) const
{
    return {hh * o.hh + hv * o.vh, hh * o.hv + hv * o.vv,
            vh * o.hh + vv * o.vh, vh * o.hv + vv * o.vv};
}

double JonesMatrix::max_abs_diff(const JonesMatrix& o) const
{
    return std::max({std::abs(hh - o.hh), std::abs(hv - o.hv),
                     std::abs(vh - o.vh), std::abs(vv - o.vv)});
}

JonesVector apply(const JonesMatrix& m, const JonesVector& j)
{
    return {m.hh * j.h + m.hv * j.v, m.vh * j.h + m.vv * j.v};
}

JonesMatrix hwp_matrix(double theta)
{
    const double c = std::cos(2.0 * theta);
    const double s = std::sin(2.0 * theta);
    return {c, s, s, -c};
}

JonesMatrix retarder_matrix(double xi)
{
    return JonesMatrix::diagonal(1.0, std::polar(1.0, xi));
}

double qwp_phase_for_rotation(QwpRotation rotation)
{
    switch (rotation) {
    case QwpRotation::absent: return 0.0;
    case QwpRotation::fast_axis_vertical: return kPi / 2.0;
    case QwpRotation::fast_axis_horizontal: return kPi;
    }
    return 0.0;
}

JonesMatrix polarizer_matrix(double theta)
{
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {c * c, c * s, c * s, s * s};
}

BsOutputs bs_split(const JonesVector& j, BsFlip flip)
{
    const JonesMatrix mirror = JonesMatrix::diagonal(-1.0, 1.0);
    const ComplexAmp reflect_phase{0.0, kInvSqrt2};

    JonesVector t = j * kInvSqrt2;
    JonesVector r = j * reflect_phase;
    if (flip == BsFlip::reflected)
        r = apply(mirror, r);
    else
        t = apply(mirror, t);
    return {t, r};
}

PbsOutputs pbs_route(const JonesVector& j)
{
    return {{j.h, 0.0}, {0.0, j.v}};
}

}  // namespace sagnacsr

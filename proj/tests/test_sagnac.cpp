#include <doctest.h>

#include <complex>

#include "oracles.hpp"
#include "sagnacsr/eraser_bank.hpp"
#include "sagnacsr/errors.hpp"
#include "sagnacsr/sagnac.hpp"

using namespace sagnacsr;

TEST_CASE("sagnac_phase")
{
    SagnacConfig cfg;
    CHECK(sagnac_phase(cfg) == 0.0);

    cfg.angular_velocity = 7.292e-5;
    const double earth = sagnac_phase(cfg);
    CHECK(std::abs(earth - oracle::earth_rate_sagnac_phase) <= 1e-3 * oracle::earth_rate_sagnac_phase);

    cfg.enclosed_area = 2.0;
    CHECK(sagnac_phase(cfg) == doctest::Approx(2.0 * earth).epsilon(1e-15));

    cfg.wavelength = 0.0;
    CHECK_THROWS_AS(sagnac_phase(cfg), ConfigError);
}

TEST_CASE("sagnac_output at zeta = 0 and pi")
{
    const double a = 1.0 / std::sqrt(2.0);
    const JonesVector z0 = sagnac_output(0.0);
    CHECK(std::abs(z0.h - ComplexAmp{a, 0}) <= 1e-15);
    CHECK(std::abs(z0.v - ComplexAmp{-a, 0}) <= 1e-15);

    const JonesVector zpi = sagnac_output(kPi);
    CHECK(std::abs(zpi.v - ComplexAmp{a, 0}) <= 1e-15);

    // E_0 scales as sqrt(I_0).
    CHECK(sagnac_output(0.3, {}, 0, 4.0).intensity() == doctest::Approx(4.0));
}

TEST_CASE("sagnac output intensity is I_0 for any zeta and common-path noise")
{
    const NoiseSpec noise{NoiseKind::common_path, 1.0, 99};
    for (int i = 0; i < 200; ++i) {
        const double zeta = -7.0 + 0.07 * i;
        CHECK(std::abs(sagnac_output(zeta, noise, std::uint64_t(i), 2.5).intensity() - 2.5) <= 1e-12);
    }
}

TEST_CASE("differential-arm noise is rejected by the Sagnac topology")
{
    CHECK_THROWS_AS(sagnac_output(0.1, {NoiseKind::differential_arm, 0.5, 1}), ConfigError);
    CHECK_THROWS_AS(sagnac_output(0.1, {NoiseKind::common_path, -1.0, 1}), ConfigError);
    CHECK_NOTHROW(mzi_output(0.1, {NoiseKind::differential_arm, 0.5, 1}));
}

TEST_CASE("common-path noise leaves every block intensity unchanged")
{
    const NoiseSpec noise{NoiseKind::common_path, 1.0, 7};
    const int blocks = 8;
    const auto schedule = phase_schedule(blocks);
    for (int i = 0; i < 100; ++i) {
        const double zeta = 0.0628 * i;
        const JonesVector clean = sagnac_output(zeta);
        const JonesVector noisy = sagnac_output(zeta, noise, std::uint64_t(i));
        for (int k = 0; k < blocks; ++k) {
            const auto a = block_fields(clean, std::size_t(k), schedule[k], blocks);
            const auto b = block_fields(noisy, std::size_t(k), schedule[k], blocks);
            REQUIRE(std::abs(a.e1.intensity() - b.e1.intensity()) <= 1e-12);
            REQUIRE(std::abs(a.e2.intensity() - b.e2.intensity()) <= 1e-12);
        }
    }
}

TEST_CASE("mzi_output")
{
    // Without noise the baseline is the same field.
    for (double zeta : {0.0, 0.4, 2.0, kPi}) {
        const JonesVector s = sagnac_output(zeta), m = mzi_output(zeta);
        CHECK(std::abs(s.h - m.h) <= 1e-15);
        CHECK(std::abs(s.v - m.v) <= 1e-15);
    }

    // Differential noise dephases: the ensemble fringe contrast is |<e^{i delta}>|.
    auto contrast = [](double sigma, int samples) {
        const NoiseSpec noise{NoiseKind::differential_arm, sigma, 11};
        std::complex<double> acc{0.0, 0.0};
        for (int s = 0; s < samples; ++s) {
            const JonesVector m = mzi_output(0.0, noise, std::uint64_t(s));
            acc += -m.v / m.h;  // e^{i(zeta + delta)}
        }
        return std::abs(acc) / samples;
    };
    CHECK(contrast(1.0, 10000) < 0.9);
    CHECK(contrast(1.0, 10000) == doctest::Approx(oracle::dephasing_sigma_one).epsilon(0.03));
    CHECK(contrast(30.0, 10000) < 0.05);
}

TEST_CASE("noise draws are counter-based")
{
    const NoiseSpec noise{NoiseKind::common_path, 1.0, 5};
    CHECK(sample_noise_phase(noise, 3) == sample_noise_phase(noise, 3));
    CHECK(sample_noise_phase(noise, 3) != sample_noise_phase(noise, 4));
    CHECK(sample_noise_phase({NoiseKind::none, 1.0, 5}, 3) == 0.0);
    CHECK(sample_noise_phase({NoiseKind::common_path, 0.0, 5}, 3) == 0.0);
}

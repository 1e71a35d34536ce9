#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles/oracles.hpp"
#include "specshape/errors.hpp"
#include "specshape/pulse_train.hpp"
#include "specshape/rng.hpp"
#include "specshape/waveform.hpp"

using namespace specshape;

TEST_CASE("DME pulse pair in time") {
    auto spec = PulseTrainSpec::dme();
    spec.peak_power_w = 4.0;
    const double dt = spec.delta_t_s;

    CHECK(dme_pair_time(spec, 0.5 * dt) ==
          doctest::Approx(2.0 * (1.0 + std::exp(-0.5 * spec.beta * dt * dt))).epsilon(1e-15));
    CHECK(dme_pair_time(spec, 0.5 * dt) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(dme_pair_time(spec, -1e-9) == 0.0);
    CHECK(dme_pair_time(spec, 2.0 * dt + 1e-9) == 0.0);

    auto silent = spec;
    silent.peak_power_w = 0.0;
    CHECK(dme_pair_time(silent, 0.0) == 0.0);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 2.0 * dt);
    for (int i = 0; i < 1000; ++i) {
        const double t = u(rng);
        REQUIRE(dme_pair_time(spec, t) == doctest::Approx(dme_pair_time(spec, 2.0 * dt - t)).epsilon(1e-12));
    }

    CHECK_THROWS_AS(dme_pair_time(PulseTrainSpec::rectangular(), 0.0), ModelMismatchError);
    CHECK_THROWS_AS(dme_pair_mean_power_factor(PulseTrainSpec::rectangular()), ModelMismatchError);
}

TEST_CASE("DME mean-power factor") {
    const auto spec = PulseTrainSpec::dme();
    CHECK(std::abs(dme_pair_mean_power_factor(spec) - 0.22018) <= 1e-4);
    CHECK(dme_pair_mean_power_factor(spec) == doctest::Approx(dme_pair_mean_power_factor_erf(spec)).epsilon(1e-9));
    // Reference value from 30-digit quadrature.
    CHECK(dme_pair_mean_power_factor(spec) == doctest::Approx(0.220184868772442744).epsilon(1e-10));

    auto wide = spec;
    wide.delta_t_s = 36e-6;
    CHECK(dme_pair_mean_power_factor(wide) == doctest::Approx(0.0733949499556668706).epsilon(1e-9));
    CHECK(dme_pair_mean_power_factor_erf(wide) == doctest::Approx(dme_pair_mean_power_factor(wide)).epsilon(1e-9));

    // Independent Simpson integration of the squared pulse.
    const double dt = spec.delta_t_s;
    const double energy = oracle::simpson([&](double t) { return std::pow(dme_pair_time(spec, t), 2); }, 0.0, 2 * dt, 20000);
    CHECK(dme_pair_mean_power_factor(spec) == doctest::Approx(energy / (2 * dt * spec.peak_power_w)).epsilon(1e-9));
}

TEST_CASE("train mean power") {
    auto dme = PulseTrainSpec::dme();
    dme.peak_power_w = 1.0;
    CHECK(train_mean_power(dme) == doctest::Approx(1.4268e-2).epsilon(1e-4));

    auto rect = PulseTrainSpec::rectangular();
    rect.peak_power_w = 1.0;
    CHECK(train_mean_power(rect) == doctest::Approx(1.35e-2).epsilon(1e-12));

    dme.rate_ppps = 0.0;
    CHECK(train_mean_power(dme) == 0.0);

    const auto scaled = with_mean_power(PulseTrainSpec::rectangular(), 2.5);
    CHECK(train_mean_power(scaled) == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("spec validation and serialisation") {
    auto s = PulseTrainSpec::dme(250e3);
    CHECK_NOTHROW(s.validate());
    CHECK(s.warnings().empty());
    s.delta_t_s = 20e-6;
    CHECK(s.warnings().size() == 1);

    auto bad = PulseTrainSpec::rectangular();
    bad.pulse_width_s = 0.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = PulseTrainSpec::rectangular();
    bad.rate_ppps = 3e5;  // duty cycle 1.5
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = PulseTrainSpec::dme();
    bad.peak_power_w = -1.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);

    const auto block = PulseTrainSpec::dme(-500e3).to_block();
    CHECK(block.at("kind") == "dme");
    CHECK(PulseTrainSpec::from_block(block) == PulseTrainSpec::dme(-500e3));

    auto extra = block;
    extra["colour"] = "red";
    CHECK_THROWS_AS(PulseTrainSpec::from_block(extra), ValidationError);
    CHECK_THROWS_AS(pulse_kind_from_string("gaussian"), ValidationError);
}

TEST_CASE("analytic PSD shape and normalisation") {
    const double p_rx = 3.0e-14;
    const auto dme = analytic_psd(PulseTrainSpec::dme(100e3), p_rx);
    const double peak = dme(100e3);
    CHECK(peak > 0.0);
    // cos^2 nulls at offset + (2k+1) / (2 dt)
    CHECK(dme(100e3 + 1.0 / (2 * 12e-6)) < 1e-25 * peak);
    CHECK(dme(100e3 - 3.0 / (2 * 12e-6)) < 1e-25 * peak);
    CHECK(dme.band_power(dme.support_lo(), dme.support_hi()) == doctest::Approx(p_rx).epsilon(1e-6));
    CHECK(oracle::simpson([&](double f) { return dme(f); }, dme.support_lo(), dme.support_hi(), 200000) ==
          doctest::Approx(p_rx).epsilon(1e-6));

    const auto rect = analytic_psd(PulseTrainSpec::rectangular(-200e3), p_rx);
    CHECK(rect(-200e3 + 200e3) < 1e-20 * rect(-200e3));
    CHECK(rect(-200e3 - 400e3) < 1e-20 * rect(-200e3));
    CHECK(rect.band_power(rect.support_lo(), rect.support_hi()) == doctest::Approx(p_rx).epsilon(1e-6));

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 800e3);
    for (int i = 0; i < 200; ++i) {
        const double x = u(rng);
        REQUIRE(dme(100e3 + x) == doctest::Approx(dme(100e3 - x)).epsilon(1e-12).scale(0));
        REQUIRE(rect(-200e3 + x) == doctest::Approx(rect(-200e3 - x)).epsilon(1e-12).scale(0));
        REQUIRE(dme(100e3 + x) >= 0.0);
    }
}

TEST_CASE("Parseval: pair energy in time equals the integral of |S(f)|^2") {
    auto spec = PulseTrainSpec::dme();
    spec.peak_power_w = 1000.0;
    const double dt = spec.delta_t_s;
    const double beta = spec.beta;
    const double time_energy = oracle::simpson([&](double t) { return std::pow(dme_pair_time(spec, t), 2); }, 0.0,
                                               2 * dt, 40000);
    // |S(f)|^2 = (8 pi P / beta) exp(-4 pi^2 f^2 / beta) cos^2(pi f dt)
    const double pi = std::numbers::pi;
    auto s2 = [&](double f) {
        const double c = std::cos(pi * f * dt);
        return 8 * pi * spec.peak_power_w / beta * std::exp(-4 * pi * pi * f * f / beta) * c * c;
    };
    const double lim = std::sqrt(60.0 * beta) / (2 * pi);
    const double freq_energy = oracle::simpson(s2, -lim, lim, 400000);
    CHECK(time_energy == doctest::Approx(freq_energy).epsilon(1e-6));

    // The library density is the same shape scaled to the requested mean power.
    const auto psd = analytic_psd(spec, 1.0);
    CHECK(psd(30e3) / psd(0.0) == doctest::Approx(s2(30e3) / s2(0.0)).epsilon(1e-12));
    CHECK(psd(0.0) == doctest::Approx(s2(0.0) / freq_energy).epsilon(1e-6));
}

TEST_CASE("Poisson arrival counts") {
    const double rate = 2700.0;
    const double duration = 100.0 / rate;
    const int runs = 200;
    double total = 0.0;
    for (int r = 0; r < runs; ++r) {
        auto rng = make_stream(99, r);
        total += static_cast<double>(poisson_arrivals(rate, 0.0, duration, rng).size());
    }
    const double mean = total / runs;
    const double sigma = std::sqrt(rate * duration / runs);
    CHECK(std::abs(mean - rate * duration) <= 3.0 * sigma);

    auto rng = make_stream(1);
    CHECK(poisson_arrivals(0.0, 0.0, 1.0, rng).empty());
}

TEST_CASE("sampled pulse trains") {
    const double fs = 4e6;

    auto off = PulseTrainSpec::dme(0.0);
    off.rate_ppps = 0.0;
    const auto zeros = sample_pulse_train(off, 0.01, fs, 1);
    CHECK(std::all_of(zeros.begin(), zeros.end(), [](auto z) { return z == std::complex<double>{}; }));

    const auto dme = PulseTrainSpec::dme(500e3);
    const auto x = sample_pulse_train(dme, 1.0, fs, 42);
    double power = 0.0;
    for (auto v : x) power += std::norm(v);
    power /= static_cast<double>(x.size());
    CHECK(power == doctest::Approx(train_mean_power(dme)).epsilon(0.05));

    const auto rect = PulseTrainSpec::rectangular(-500e3);
    const auto y = sample_pulse_train(rect, 1.0, fs, 43);
    double rect_power = 0.0;
    for (auto v : y) rect_power += std::norm(v);
    rect_power /= static_cast<double>(y.size());
    CHECK(rect_power == doctest::Approx(train_mean_power(rect)).epsilon(0.05));

    CHECK(sample_pulse_train(dme, 0.05, fs, 7) == sample_pulse_train(dme, 0.05, fs, 7));
    CHECK(sample_pulse_train(dme, 0.05, fs, 7) != sample_pulse_train(dme, 0.05, fs, 8));

    CHECK_THROWS_AS(sample_pulse_train(dme, 1.0, 2e6, 1), PreconditionError);       // below 4x bandwidth
    CHECK_THROWS_AS(sample_pulse_train(PulseTrainSpec::dme(1.8e6), 1.0, fs, 1), PreconditionError);  // outside Nyquist
    CHECK_THROWS_AS(sample_pulse_train(dme, 0.01, fs, 1), PreconditionError);       // fewer than 100 arrivals
}

TEST_CASE("Welch PSD of a pulse train follows the analytic shape over the main lobe") {
    const double fs = 4e6;
    const int nfft = 4000;  // 1 kHz bins
    struct Case {
        PulseTrainSpec spec;
        double lobe;
    };
    const Case cases[] = {{PulseTrainSpec::dme(0.0), 1.0 / (2 * 12e-6)}, {PulseTrainSpec::rectangular(0.0), 200e3}};
    for (const auto& c : cases) {
        const auto x = sample_pulse_train(c.spec, 2.0, fs, 2024);
        const auto measured = measure_psd(x, fs, nfft);
        const auto model = analytic_psd(c.spec, train_mean_power(c.spec));
        double worst = 0.0;
        for (std::size_t i = 0; i < measured.freq_hz.size(); ++i) {
            const double f = measured.freq_hz[i];
            // Skip the spectral line of the non-zero mean and the last 40 % of the lobe,
            // where the density heads into its null.
            if (std::abs(f) < 4e3 || std::abs(f) > 0.6 * c.lobe) continue;
            worst = std::max(worst, std::abs(10 * std::log10(measured.density[i] / model(f))));
        }
        CAPTURE(to_string(c.spec.kind));
        CHECK(worst < 1.0);
    }
}

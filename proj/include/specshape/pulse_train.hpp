#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "specshape/quadrature.hpp"

namespace specshape {

enum class PulseKind { DmePair, Rectangular };

std::string to_string(PulseKind kind);
PulseKind pulse_kind_from_string(const std::string& name);

// Ground-to-air DME defaults.
inline constexpr double kDmeBeta = 4.5e11;        // s^-2
inline constexpr double kDmeDeltaT = 12e-6;       // s
inline constexpr double kDmeRatePpps = 2700.0;    // pulse pairs per second
inline constexpr double kDmeGroundPeakW = 1000.0;
// Rectangular pulse width giving roughly the DME mean power at equal peak power and rate.
inline constexpr double kRectPulseWidth = 5e-6;

/// Parameters of one interfering pulsed emitter.
struct PulseTrainSpec {
    PulseKind kind = PulseKind::DmePair;
    double peak_power_w = kDmeGroundPeakW;
    double beta = kDmeBeta;             ///< Gaussian width constant, DME only
    double delta_t_s = kDmeDeltaT;      ///< intra-pair spacing, DME only
    double pulse_width_s = kRectPulseWidth;  ///< rectangular only
    double rate_ppps = kDmeRatePpps;
    double center_offset_hz = 0.0;      ///< relative to the desired band centre

    static PulseTrainSpec dme(double offset_hz = 0.0);
    static PulseTrainSpec rectangular(double offset_hz = 0.0);

    /// 2*delta_t for a DME pair, the pulse width for a rectangle.
    double pulse_duration() const;
    double duty_cycle() const { return rate_ppps * pulse_duration(); }

    /// Throws ValidationError on any violated invariant.
    void validate() const;
    /// Non-fatal remarks, e.g. a DME spacing other than 12 or 36 us.
    std::vector<std::string> warnings() const;

    /// Key-value config block: kind, peak_power_w, beta, delta_t_s, pulse_width_s, rate_ppps, offset_hz.
    std::map<std::string, std::string> to_block() const;
    static PulseTrainSpec from_block(const std::map<std::string, std::string>& block);

    bool operator==(const PulseTrainSpec&) const = default;
};

/// Amplitude (sqrt(W)) of a single DME pulse pair starting at t = 0; zero outside [0, 2*delta_t].
double dme_pair_time(const PulseTrainSpec& spec, double t);

/// Mean power of one pulse pair over its 2*delta_t window divided by the peak power,
/// evaluated by adaptive quadrature.
double dme_pair_mean_power_factor(const PulseTrainSpec& spec);

/// The same factor from its closed form in error functions.
double dme_pair_mean_power_factor_erf(const PulseTrainSpec& spec);

/// Time-averaged power of the whole train (W).
double train_mean_power(const PulseTrainSpec& spec);

/// Two-sided bandwidth of the envelope spectrum used for sampling checks (Hz).
/// DME: width where the Gaussian envelope is 60 dB down. Rectangular: the null-to-null main lobe 2/T.
double sampling_bandwidth(const PulseTrainSpec& spec);

/// Throws PreconditionError unless sample_rate >= 4 * sampling_bandwidth and the emitter band
/// |offset| + bandwidth / 2 fits inside the Nyquist interval.
void check_sampling(const PulseTrainSpec& spec, double sample_rate_hz);

/// Power spectral density of an emitter, rescaled to a receiver-side mean power.
class AnalyticPsd {
public:
    /// Density in W/Hz at absolute baseband frequency f (zero outside the support).
    double operator()(double f) const;

    double mean_power() const { return mean_power_; }
    double center() const { return center_; }
    double support_lo() const { return center_ - half_support_; }
    double support_hi() const { return center_ + half_support_; }
    PulseKind kind() const { return kind_; }

    /// Integral of the density over [lo, hi] intersected with the support.
    double band_power(double lo, double hi, QuadratureTolerance tol = {}) const;

    /// Width of the sub-intervals band_power splits long ranges into.
    double natural_scale() const;

private:
    friend AnalyticPsd analytic_psd(const PulseTrainSpec& spec, double rx_mean_power_w);

    PulseKind kind_ = PulseKind::DmePair;
    double center_ = 0.0;
    double half_support_ = 0.0;
    double mean_power_ = 0.0;
    double scale_ = 0.0;
    double beta_ = 0.0;
    double delta_t_ = 0.0;
    double width_ = 0.0;
};

/// |S(f - offset)|^2 of the emitter's pulse shape, scaled to integrate to rx_mean_power_w.
AnalyticPsd analytic_psd(const PulseTrainSpec& spec, double rx_mean_power_w);

/// Poisson arrival epochs with the given intensity on [t_begin, t_end).
std::vector<double> poisson_arrivals(double rate, double t_begin, double t_end,
                                     std::mt19937_64& rng);

/// Adds a Poisson pulse train to out, sample k at time k / sample_rate. Pulses that started
/// before t = 0 but still overlap the window are included. No sampling checks.
void add_pulse_train(std::span<std::complex<double>> out, const PulseTrainSpec& spec,
                     double sample_rate_hz, std::mt19937_64& rng);

/// Complex-baseband realisation of the pulse train, deterministic for a given seed.
std::vector<std::complex<double>> sample_pulse_train(const PulseTrainSpec& spec, double duration_s,
                                                     double sample_rate_hz, std::uint64_t seed);

/// Copy of spec with the peak power rescaled so that train_mean_power equals mean_power_w.
PulseTrainSpec with_mean_power(const PulseTrainSpec& spec, double mean_power_w);

}  // namespace specshape

#include "specshape/pulse_train.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "specshape/errors.hpp"
#include "specshape/rng.hpp"

namespace specshape {

namespace {

constexpr double kPi = std::numbers::pi;

// Exponent at which the DME Gaussian tail is cut (density 1e-26 of peak).
constexpr double kGaussianTailExponent = 60.0;
// Rectangular spectra are kept over this many sinc lobes either side of the centre.
constexpr int kRectLobes = 200;

double sinc(double x) {
    if (x == 0.0) return 1.0;
    const double px = kPi * x;
    return std::sin(px) / px;
}

// Integral of sinc^2(u) over [-kRectLobes, kRectLobes], computed once lobe by lobe.
double rect_support_integral() {
    static const double value = [] {
        double sum = 0.0;
        for (int k = 0; k < kRectLobes; ++k) {
            sum += integrate([](double u) { return sinc(u) * sinc(u); }, k, k + 1.0,
                             {0.0, 1e-12})
                       .value;
        }
        return 2.0 * sum;
    }();
    return value;
}

void require_kind(const PulseTrainSpec& spec, PulseKind kind, const char* op) {
    if (spec.kind != kind) {
        throw ModelMismatchError(std::string(op) + ": expected a " + to_string(kind) +
                                 " spec, got " + to_string(spec.kind));
    }
}

double parse_number(const std::map<std::string, std::string>& block, const std::string& key,
                    double fallback) {
    auto it = block.find(key);
    if (it == block.end()) return fallback;
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(it->second, &used);
    } catch (const std::exception&) {
        throw ValidationError("pulse train block: '" + key + "' is not a number: " + it->second);
    }
    if (used != it->second.size()) {
        throw ValidationError("pulse train block: '" + key + "' is not a number: " + it->second);
    }
    return v;
}

}  // namespace

std::string to_string(PulseKind kind) {
    return kind == PulseKind::DmePair ? "dme" : "rect";
}

PulseKind pulse_kind_from_string(const std::string& name) {
    if (name == "dme" || name == "DmePair") return PulseKind::DmePair;
    if (name == "rect" || name == "rectangular" || name == "Rectangular") {
        return PulseKind::Rectangular;
    }
    throw ValidationError("unknown pulse kind '" + name + "' (expected dme or rect)");
}

PulseTrainSpec PulseTrainSpec::dme(double offset_hz) {
    PulseTrainSpec s;
    s.kind = PulseKind::DmePair;
    s.center_offset_hz = offset_hz;
    return s;
}

PulseTrainSpec PulseTrainSpec::rectangular(double offset_hz) {
    PulseTrainSpec s;
    s.kind = PulseKind::Rectangular;
    s.center_offset_hz = offset_hz;
    return s;
}

double PulseTrainSpec::pulse_duration() const {
    return kind == PulseKind::DmePair ? 2.0 * delta_t_s : pulse_width_s;
}

void PulseTrainSpec::validate() const {
    if (!(peak_power_w >= 0.0) || !std::isfinite(peak_power_w)) {
        throw ValidationError("pulse train: peak_power_w must be finite and non-negative");
    }
    if (!(rate_ppps >= 0.0) || !std::isfinite(rate_ppps)) {
        throw ValidationError("pulse train: rate_ppps must be finite and non-negative");
    }
    if (!std::isfinite(center_offset_hz)) {
        throw ValidationError("pulse train: offset_hz must be finite");
    }
    if (kind == PulseKind::DmePair) {
        if (!(beta > 0.0)) throw ValidationError("pulse train: beta must be positive");
        if (!(delta_t_s > 0.0)) throw ValidationError("pulse train: delta_t_s must be positive");
    } else if (!(pulse_width_s > 0.0)) {
        throw ValidationError("pulse train: pulse_width_s must be positive");
    }
    if (duty_cycle() > 1.0) {
        std::ostringstream msg;
        msg << "pulse train: duty cycle " << duty_cycle() << " exceeds 1";
        throw ValidationError(msg.str());
    }
}

std::vector<std::string> PulseTrainSpec::warnings() const {
    std::vector<std::string> out;
    if (kind == PulseKind::DmePair) {
        const bool standard = std::abs(delta_t_s - 12e-6) < 1e-12 || std::abs(delta_t_s - 36e-6) < 1e-12;
        if (!standard) {
            std::ostringstream msg;
            msg << "DME pulse spacing " << delta_t_s * 1e6 << " us is neither 12 nor 36 us";
            out.push_back(msg.str());
        }
    }
    return out;
}

std::map<std::string, std::string> PulseTrainSpec::to_block() const {
    auto fmt = [](double v) {
        std::ostringstream os;
        os.precision(17);
        os << v;
        return os.str();
    };
    return {{"kind", to_string(kind)},
            {"peak_power_w", fmt(peak_power_w)},
            {"beta", fmt(beta)},
            {"delta_t_s", fmt(delta_t_s)},
            {"pulse_width_s", fmt(pulse_width_s)},
            {"rate_ppps", fmt(rate_ppps)},
            {"offset_hz", fmt(center_offset_hz)}};
}

PulseTrainSpec PulseTrainSpec::from_block(const std::map<std::string, std::string>& block) {
    static const char* const known[] = {"kind",          "peak_power_w", "beta",     "delta_t_s",
                                        "pulse_width_s", "rate_ppps",    "offset_hz"};
    for (const auto& [key, value] : block) {
        if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
            throw ValidationError("pulse train block: unknown key '" + key + "'");
        }
    }
    auto kind_it = block.find("kind");
    if (kind_it == block.end()) throw ValidationError("pulse train block: missing 'kind'");

    PulseTrainSpec s;
    s.kind = pulse_kind_from_string(kind_it->second);
    s.peak_power_w = parse_number(block, "peak_power_w", s.peak_power_w);
    s.beta = parse_number(block, "beta", s.beta);
    s.delta_t_s = parse_number(block, "delta_t_s", s.delta_t_s);
    s.pulse_width_s = parse_number(block, "pulse_width_s", s.pulse_width_s);
    s.rate_ppps = parse_number(block, "rate_ppps", s.rate_ppps);
    s.center_offset_hz = parse_number(block, "offset_hz", s.center_offset_hz);
    s.validate();
    return s;
}

double dme_pair_time(const PulseTrainSpec& spec, double t) {
    require_kind(spec, PulseKind::DmePair, "dme_pair_time");
    const double dt = spec.delta_t_s;
    if (t < 0.0 || t > 2.0 * dt) return 0.0;
    const double a = t - 0.5 * dt;
    const double b = t - 1.5 * dt;
    return std::sqrt(spec.peak_power_w) *
           (std::exp(-0.5 * spec.beta * a * a) + std::exp(-0.5 * spec.beta * b * b));
}

double dme_pair_mean_power_factor(const PulseTrainSpec& spec) {
    require_kind(spec, PulseKind::DmePair, "dme_pair_mean_power_factor");
    // Unit peak power; the factor is independent of P_peak.
    PulseTrainSpec unit = spec;
    unit.peak_power_w = 1.0;
    const double dt = spec.delta_t_s;
    auto sq = [&](double t) {
        const double s = dme_pair_time(unit, t);
        return s * s;
    };
    // Split at the pulse centres so each panel holds at most one Gaussian flank.
    const double knots[] = {0.0, 0.5 * dt, dt, 1.5 * dt, 2.0 * dt};
    double energy = 0.0;
    for (int i = 0; i < 4; ++i) {
        energy += integrate(sq, knots[i], knots[i + 1], {0.0, 1e-13}).value;
    }
    return energy / (2.0 * dt);
}

double dme_pair_mean_power_factor_erf(const PulseTrainSpec& spec) {
    require_kind(spec, PulseKind::DmePair, "dme_pair_mean_power_factor_erf");
    const double dt = spec.delta_t_s;
    const double sb = std::sqrt(spec.beta);
    const double bracket = std::erf(1.5 * dt * sb) + std::erf(0.5 * dt * sb) +
                           2.0 * std::exp(-0.25 * dt * dt * spec.beta) * std::erf(dt * sb);
    return std::sqrt(kPi) * bracket / (2.0 * dt * sb);
}

double train_mean_power(const PulseTrainSpec& spec) {
    if (spec.kind == PulseKind::DmePair) {
        return dme_pair_mean_power_factor_erf(spec) * spec.peak_power_w * spec.rate_ppps *
               2.0 * spec.delta_t_s;
    }
    return spec.peak_power_w * spec.pulse_width_s * spec.rate_ppps;
}

double sampling_bandwidth(const PulseTrainSpec& spec) {
    if (spec.kind == PulseKind::DmePair) {
        // exp(-4 pi^2 f^2 / beta) = 1e-6
        return 2.0 * std::sqrt(spec.beta * std::log(1e6)) / (2.0 * kPi);
    }
    return 2.0 / spec.pulse_width_s;
}

void check_sampling(const PulseTrainSpec& spec, double sample_rate_hz) {
    const double bw = sampling_bandwidth(spec);
    if (!(sample_rate_hz >= 4.0 * bw)) {
        std::ostringstream msg;
        msg << "sample rate " << sample_rate_hz << " Hz is below 4x the " << bw
            << " Hz bandwidth of the " << to_string(spec.kind) << " emitter";
        throw PreconditionError(msg.str());
    }
    if (std::abs(spec.center_offset_hz) + 0.5 * bw > 0.5 * sample_rate_hz) {
        std::ostringstream msg;
        msg << "emitter at " << spec.center_offset_hz << " Hz does not fit inside the Nyquist "
            << "interval of a " << sample_rate_hz << " Hz sample rate";
        throw PreconditionError(msg.str());
    }
}

double AnalyticPsd::operator()(double f) const {
    const double x = f - center_;
    if (std::abs(x) > half_support_) return 0.0;
    if (kind_ == PulseKind::DmePair) {
        const double c = std::cos(kPi * x * delta_t_);
        return scale_ * std::exp(-4.0 * kPi * kPi * x * x / beta_) * c * c;
    }
    const double s = sinc(width_ * x);
    return scale_ * s * s;
}

double AnalyticPsd::natural_scale() const {
    if (kind_ == PulseKind::DmePair) {
        const double sigma = std::sqrt(beta_) / (2.0 * kPi * std::numbers::sqrt2);
        return std::min(sigma, 0.5 / delta_t_);
    }
    return 1.0 / width_;
}

double AnalyticPsd::band_power(double lo, double hi, QuadratureTolerance tol) const {
    lo = std::max(lo, support_lo());
    hi = std::min(hi, support_hi());
    if (!(lo < hi)) return 0.0;
    const double step = natural_scale();
    const int pieces = std::max(1, static_cast<int>(std::ceil((hi - lo) / step)));
    const double w = (hi - lo) / pieces;
    auto density = [this](double f) { return (*this)(f); };
    double sum = 0.0;
    for (int i = 0; i < pieces; ++i) {
        const double a = lo + i * w;
        const double b = (i + 1 == pieces) ? hi : a + w;
        sum += integrate(density, a, b, tol).value;
    }
    return sum;
}

AnalyticPsd analytic_psd(const PulseTrainSpec& spec, double rx_mean_power_w) {
    spec.validate();
    if (!(rx_mean_power_w >= 0.0) || !std::isfinite(rx_mean_power_w)) {
        throw ValidationError("analytic_psd: receiver mean power must be finite and non-negative");
    }
    AnalyticPsd psd;
    psd.kind_ = spec.kind;
    psd.center_ = spec.center_offset_hz;
    psd.mean_power_ = rx_mean_power_w;
    if (spec.kind == PulseKind::DmePair) {
        psd.beta_ = spec.beta;
        psd.delta_t_ = spec.delta_t_s;
        psd.half_support_ = std::sqrt(kGaussianTailExponent * spec.beta) / (2.0 * kPi);
        // Closed-form integral of exp(-a f^2) cos^2(pi f dt) over the real line.
        const double a = 4.0 * kPi * kPi / spec.beta;
        const double total = 0.5 * std::sqrt(kPi / a) *
                             (1.0 + std::exp(-kPi * kPi * spec.delta_t_s * spec.delta_t_s / a));
        psd.scale_ = rx_mean_power_w / total;
    } else {
        psd.width_ = spec.pulse_width_s;
        psd.half_support_ = kRectLobes / spec.pulse_width_s;
        // density = scale * sinc^2(T f); its support integral is rect_support_integral() / T
        psd.scale_ = rx_mean_power_w * spec.pulse_width_s / rect_support_integral();
    }
    return psd;
}

std::vector<double> poisson_arrivals(double rate, double t_begin, double t_end,
                                     std::mt19937_64& rng) {
    std::vector<double> out;
    if (!(rate > 0.0) || !(t_end > t_begin)) return out;
    std::exponential_distribution<double> gap(rate);
    double t = t_begin + gap(rng);
    while (t < t_end) {
        out.push_back(t);
        t += gap(rng);
    }
    return out;
}

void add_pulse_train(std::span<std::complex<double>> out, const PulseTrainSpec& spec,
                     double sample_rate_hz, std::mt19937_64& rng) {
    if (out.empty() || spec.rate_ppps <= 0.0 || spec.peak_power_w <= 0.0) return;
    const double ts = 1.0 / sample_rate_hz;
    const double duration = static_cast<double>(out.size()) * ts;
    const double len = spec.pulse_duration();
    const double amp = std::sqrt(spec.peak_power_w);
    const double w = 2.0 * kPi * spec.center_offset_hz;
    const auto n = static_cast<long long>(out.size());

    for (double t0 : poisson_arrivals(spec.rate_ppps, -len, duration, rng)) {
        if (spec.kind == PulseKind::DmePair) {
            const long long k0 = std::max(0LL, static_cast<long long>(std::ceil(t0 * sample_rate_hz)));
            const long long k1 = std::min(n - 1, static_cast<long long>(std::floor((t0 + len) * sample_rate_hz)));
            for (long long k = k0; k <= k1; ++k) {
                const double t = k * ts;
                const double a = t - t0 - 0.5 * spec.delta_t_s;
                const double b = t - t0 - 1.5 * spec.delta_t_s;
                const double env = amp * (std::exp(-0.5 * spec.beta * a * a) +
                                          std::exp(-0.5 * spec.beta * b * b));
                out[k] += std::polar(env, w * t);
            }
        } else {
            // Area sampling: each sample holds the fraction of its cell covered by the pulse,
            // which suppresses aliasing of the sinc sidelobes.
            const double t1 = t0 + len;
            const long long k0 = std::max(0LL, static_cast<long long>(std::floor(t0 * sample_rate_hz - 0.5)));
            const long long k1 = std::min(n - 1, static_cast<long long>(std::ceil(t1 * sample_rate_hz + 0.5)));
            for (long long k = k0; k <= k1; ++k) {
                const double t = k * ts;
                const double overlap = std::min(t + 0.5 * ts, t1) - std::max(t - 0.5 * ts, t0);
                if (overlap <= 0.0) continue;
                out[k] += std::polar(amp * overlap / ts, w * t);
            }
        }
    }
}

std::vector<std::complex<double>> sample_pulse_train(const PulseTrainSpec& spec, double duration_s,
                                                     double sample_rate_hz, std::uint64_t seed) {
    spec.validate();
    if (!(duration_s > 0.0) || !(sample_rate_hz > 0.0)) {
        throw ValidationError("sample_pulse_train: duration and sample rate must be positive");
    }
    check_sampling(spec, sample_rate_hz);
    if (spec.rate_ppps > 0.0 && duration_s * spec.rate_ppps < 100.0) {
        throw PreconditionError(
            "sample_pulse_train: duration must cover at least 100 mean inter-arrival times");
    }
    std::vector<std::complex<double>> out(
        static_cast<std::size_t>(std::llround(duration_s * sample_rate_hz)));
    auto rng = make_stream(seed);
    add_pulse_train(out, spec, sample_rate_hz, rng);
    return out;
}

PulseTrainSpec with_mean_power(const PulseTrainSpec& spec, double mean_power_w) {
    PulseTrainSpec out = spec;
    PulseTrainSpec unit = spec;
    unit.peak_power_w = 1.0;
    const double per_watt = train_mean_power(unit);
    out.peak_power_w = per_watt > 0.0 ? mean_power_w / per_watt : 0.0;
    return out;
}

}  // namespace specshape

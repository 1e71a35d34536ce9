#include "specshape/ber.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <thread>

#include "specshape/errors.hpp"
#include "specshape/qam.hpp"
#include "specshape/rng.hpp"

namespace specshape {

namespace {

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

struct BatchCount {
    long long bits = 0;
    long long errors = 0;
};

// Per-point state shared read-only by all batches.
class Engine {
public:
    explicit Engine(const BerSystem& sys) : sys_(sys), modem_(sys.layout) {
        weights_ = weights_from_allocation(sys.allocation);
        for (int n = 1; n <= sys.grid.n_subcarriers; ++n) {
            if (sys.allocation.active[n - 1]) active_.push_back(n);
        }
        const double fs = sys.layout.sample_rate();
        noise_sigma_ = std::sqrt(0.5 * sys.noise_density_w_per_hz * fs);
        for (int n : active_) {
            surrogate_sigma_.push_back(std::sqrt(0.5 * sys.profile.interference_w[n - 1]));
        }
    }

    BatchCount run(int n_symbols, std::uint64_t seed, std::uint64_t point, std::uint64_t batch) const {
        auto rng = make_stream(seed, point, batch);
        std::normal_distribution<double> gauss(0.0, 1.0);
        const int n = sys_.grid.n_subcarriers;
        const int block = sys_.layout.block_samples();
        const std::size_t n_active = active_.size();

        cvec samples(static_cast<std::size_t>(block) * n_symbols);
        std::vector<unsigned char> tx_bits(n_active * n_symbols);
        cvec symbols(n);
        std::uint64_t pool = 0;
        int pool_left = 0;
        for (int s = 0; s < n_symbols; ++s) {
            std::fill(symbols.begin(), symbols.end(), std::complex<double>{});
            for (std::size_t i = 0; i < n_active; ++i) {
                if (pool_left == 0) {
                    pool = rng();
                    pool_left = 16;
                }
                const auto bits = static_cast<unsigned>(pool & 15u);
                pool >>= 4;
                --pool_left;
                tx_bits[s * n_active + i] = static_cast<unsigned char>(bits);
                symbols[active_[i] - 1] = qam16::map(bits);
            }
            modem_.modulate(symbols, weights_,
                            std::span(samples).subspan(static_cast<std::size_t>(s) * block, block));
        }

        if (sys_.mode == InterferenceMode::TimeDomain) {
            for (const auto& spec : sys_.rx_interferers) {
                add_pulse_train(samples, spec, sys_.layout.sample_rate(), rng);
            }
        }
        for (auto& x : samples) x += std::complex<double>(noise_sigma_ * gauss(rng), noise_sigma_ * gauss(rng));

        BatchCount count;
        cvec rx(n);
        for (int s = 0; s < n_symbols; ++s) {
            modem_.demodulate(std::span(samples).subspan(static_cast<std::size_t>(s) * block, block), rx);
            for (std::size_t i = 0; i < n_active; ++i) {
                const int idx = active_[i] - 1;
                auto y = rx[idx];
                if (sys_.mode == InterferenceMode::GaussianSurrogate) {
                    y += std::complex<double>(surrogate_sigma_[i] * gauss(rng), surrogate_sigma_[i] * gauss(rng));
                }
                const unsigned decided = qam16::demap(y / weights_.weights[idx]);
                count.errors += std::popcount(decided ^ tx_bits[s * n_active + i]);
            }
        }
        count.bits = static_cast<long long>(n_active) * qam16::kBitsPerSymbol * n_symbols;
        return count;
    }

private:
    const BerSystem& sys_;
    OfdmModem modem_;
    WeightVector weights_;
    std::vector<int> active_;
    double noise_sigma_ = 0.0;
    std::vector<double> surrogate_sigma_;
};

}  // namespace

double awgn_ber_16qam(double ebn0_db) {
    if (std::isnan(ebn0_db)) return std::numeric_limits<double>::quiet_NaN();
    const double x = std::sqrt(0.8 * std::pow(10.0, ebn0_db / 10.0));
    return 0.25 * (3.0 * q_function(x) + 2.0 * q_function(3.0 * x) - q_function(5.0 * x));
}

std::string to_string(InterferenceMode mode) {
    return mode == InterferenceMode::TimeDomain ? "time-domain" : "gaussian-surrogate";
}

InterferenceMode interference_mode_from_string(const std::string& name) {
    if (name == "time-domain" || name == "time") return InterferenceMode::TimeDomain;
    if (name == "gaussian-surrogate" || name == "surrogate") return InterferenceMode::GaussianSurrogate;
    throw ValidationError("unknown interference mode '" + name + "' (expected time-domain or gaussian-surrogate)");
}

void StoppingRule::validate() const {
    if (min_bits <= 0 || min_errors < 0 || max_bits < min_bits || batch_symbols <= 0) {
        throw ValidationError("stopping rule: need 0 < min_bits <= max_bits, min_errors >= 0 and a positive batch size");
    }
}

BerSystem make_shaped_system(const LinkScenario& s, const SubcarrierGrid& grid, double k, int oversampling,
                             InterferenceMode mode) {
    const auto req = scenario_request(s, grid, k);
    BerSystem sys;
    sys.label = "shaped";
    sys.grid = grid;
    sys.layout = layout_for(grid, oversampling, 0.0);
    sys.allocation = solve_waterfill(req);
    sys.profile = req.profile;
    sys.rx_interferers = receiver_pulse_specs(s);
    sys.noise_density_w_per_hz = req.profile.noise_density_w_per_hz;
    sys.ebn0_db = sys.allocation.empty() ? std::numeric_limits<double>::quiet_NaN()
                                         : ebn0_db(s, sys.allocation, grid, qam16::kBitsPerSymbol);
    sys.d_tx_rx_m = s.d_tx_rx_m;
    sys.d_intf_rx_m = s.d_intf_rx_m;
    sys.mode = mode;
    return sys;
}

BerSystem make_flat_system(const LinkScenario& s, int oversampling, InterferenceMode mode, bool cp_in_eb) {
    BerSystem sys;
    sys.label = "flat";
    sys.grid = ldacs_grid();
    sys.layout = layout_for(sys.grid, oversampling, kLdacsCpSeconds * sys.grid.spacing_hz);
    sys.profile = scenario_profile(s, sys.grid);
    const auto powers = receiver_powers(s);
    sys.allocation = flat_allocation(sys.grid, sys.profile, powers.signal_w);
    sys.rx_interferers = receiver_pulse_specs(s);
    sys.noise_density_w_per_hz = powers.noise_density_w_per_hz;
    sys.ebn0_db = ebn0_db(s, sys.allocation, sys.grid, qam16::kBitsPerSymbol,
                          cp_in_eb ? kLdacsCpSeconds : 0.0);
    sys.d_tx_rx_m = s.d_tx_rx_m;
    sys.d_intf_rx_m = s.d_intf_rx_m;
    sys.mode = mode;
    return sys;
}

bool BerPoint::within_3sigma() const {
    if (bits <= 0) return false;
    const double sigma = std::sqrt(theory * (1.0 - theory) / static_cast<double>(bits));
    return std::abs(ber - theory) <= 3.0 * sigma;
}

BerPoint run_ber_point(const BerSystem& system, const StoppingRule& rule, std::uint64_t seed,
                       std::uint64_t point_index, int threads) {
    rule.validate();
    if (system.allocation.empty()) throw ValidationError("BER run needs a non-empty allocation");
    if (!(system.noise_density_w_per_hz > 0.0)) throw ValidationError("BER run needs a positive noise density");
    if (system.mode == InterferenceMode::TimeDomain) {
        for (const auto& spec : system.rx_interferers) check_sampling(spec, system.layout.sample_rate());
    }
    threads = std::max(1, threads);

    const Engine engine(system);
    BerPoint p;
    p.label = system.label;
    p.d_tx_rx_m = system.d_tx_rx_m;
    p.d_intf_rx_m = system.d_intf_rx_m;
    p.ebn0_db = system.ebn0_db;
    p.theory = awgn_ber_16qam(system.ebn0_db);
    p.n_active = system.allocation.n_active;
    p.mode = to_string(system.mode);

    auto done = [&] {
        return (p.bits >= rule.min_bits && p.errors >= rule.min_errors) || p.bits >= rule.max_bits;
    };
    std::uint64_t next_batch = 0;
    std::vector<BatchCount> wave(threads);
    while (!done()) {
        if (threads == 1) {
            wave[0] = engine.run(rule.batch_symbols, seed, point_index, next_batch);
        } else {
            std::vector<std::jthread> pool;
            for (int t = 0; t < threads; ++t) {
                pool.emplace_back([&, t] { wave[t] = engine.run(rule.batch_symbols, seed, point_index, next_batch + t); });
            }
        }
        // Fold in batch order and stop at the same batch a serial run would.
        for (int t = 0; t < threads && !done(); ++t) {
            p.bits += wave[t].bits;
            p.errors += wave[t].errors;
        }
        next_batch += threads;
    }
    p.ber = static_cast<double>(p.errors) / static_cast<double>(p.bits);
    p.ci95 = 1.96 * std::sqrt(p.ber * (1.0 - p.ber) / static_cast<double>(p.bits));
    p.floor_flag = p.errors < rule.min_errors;
    return p;
}

std::vector<BerPoint> run_ber_curve(const LinkScenario& tmpl, const std::vector<double>& d_tx_rx_m,
                                    const SystemFactory& factory, const StoppingRule& rule, std::uint64_t seed,
                                    int threads) {
    std::vector<BerPoint> out;
    for (std::size_t i = 0; i < d_tx_rx_m.size(); ++i) {
        if (!(d_tx_rx_m[i] > 0.0)) throw ValidationError("BER curve: distances must be positive");
        LinkScenario s = tmpl;
        s.d_tx_rx_m = d_tx_rx_m[i];
        out.push_back(run_ber_point(factory(s), rule, seed, i, threads));
    }
    return out;
}

Table ber_table(const std::vector<BerPoint>& points, const std::string& name) {
    Table t{name,
            {"label", "mode", "d_tx_rx_m", "d_intf_rx_m", "ebn0_db", "ber", "bits", "errors", "ci95",
             "floor_flag", "theory", "n_active"},
            {}};
    for (const auto& p : points) {
        t.add_row({p.label, p.mode, cell(p.d_tx_rx_m), cell(p.d_intf_rx_m), cell(p.ebn0_db), cell(p.ber),
                   cell(p.bits), cell(p.errors), cell(p.ci95), cell(p.floor_flag ? 1 : 0), cell(p.theory),
                   cell(p.n_active)});
    }
    return t;
}

double measure_subcarrier_noise(const OfdmLayout& layout, double noise_density_w_per_hz, int n_symbols,
                                std::uint64_t seed) {
    OfdmModem modem(layout);
    auto rng = make_stream(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double sigma = std::sqrt(0.5 * noise_density_w_per_hz * layout.sample_rate());
    cvec block(layout.block_samples());
    cvec out(layout.n_subcarriers);
    double acc = 0.0;
    for (int s = 0; s < n_symbols; ++s) {
        for (auto& x : block) x = {sigma * gauss(rng), sigma * gauss(rng)};
        modem.demodulate(block, out);
        for (const auto& y : out) acc += std::norm(y);
    }
    return acc / (static_cast<double>(n_symbols) * layout.n_subcarriers);
}

double measure_interference_power(const std::vector<PulseTrainSpec>& rx_specs, double sample_rate_hz,
                                  double duration_s, std::uint64_t seed) {
    cvec total;
    for (std::size_t i = 0; i < rx_specs.size(); ++i) {
        const auto x = sample_pulse_train(rx_specs[i], duration_s, sample_rate_hz, stream_key(seed, i));
        if (total.empty()) total.assign(x.size(), {});
        for (std::size_t k = 0; k < x.size(); ++k) total[k] += x[k];
    }
    if (total.empty()) return 0.0;
    double acc = 0.0;
    for (const auto& x : total) acc += std::norm(x);
    return acc / static_cast<double>(total.size());
}

}  // namespace specshape

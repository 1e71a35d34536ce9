#include "specshape/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>

#include <json.hpp>

#include "specshape/errors.hpp"

namespace specshape {

double WeightVector::total_power() const {
    return std::inner_product(weights.begin(), weights.end(), weights.begin(), 0.0);
}

WeightVector weights_from_allocation(const Allocation& alloc) {
    WeightVector w;
    w.weights.resize(alloc.powers_w.size());
    for (std::size_t i = 0; i < alloc.powers_w.size(); ++i) {
        w.weights[i] = alloc.active[i] ? std::sqrt(alloc.powers_w[i]) : 0.0;
    }
    return w;
}

void OfdmLayout::validate() const {
    if (n_subcarriers < 2 || (n_subcarriers & (n_subcarriers - 1)) != 0) {
        throw ValidationError("ofdm: N must be a power of two");
    }
    if (!(spacing_hz > 0.0)) throw ValidationError("ofdm: subcarrier spacing must be positive");
    if (oversampling < 1) throw ValidationError("ofdm: oversampling must be at least 1");
    if (!(cp_fraction >= 0.0 && cp_fraction <= 0.25)) {
        throw ValidationError("ofdm: cp_fraction must lie in [0, 0.25]");
    }
}

int OfdmLayout::cp_samples() const {
    return static_cast<int>(std::lround(cp_fraction * fft_size()));
}

int OfdmLayout::bin(int n) const {
    const int offset = n - 1 - n_subcarriers / 2;
    const int m = fft_size();
    return ((offset % m) + m) % m;
}

OfdmLayout layout_for(const SubcarrierGrid& grid, int oversampling, double cp_fraction) {
    OfdmLayout l{grid.n_subcarriers, grid.spacing_hz, oversampling, cp_fraction};
    l.validate();
    return l;
}

OfdmModem::OfdmModem(OfdmLayout layout)
    : layout_(layout),
      inverse_((layout.validate(), layout.fft_size()), Fft::Direction::Inverse),
      forward_(layout.fft_size(), Fft::Direction::Forward) {}

void OfdmModem::modulate(std::span<const std::complex<double>> symbols, const WeightVector& weights,
                         std::span<std::complex<double>> out) const {
    const int n = layout_.n_subcarriers;
    const int m = layout_.fft_size();
    const int cp = layout_.cp_samples();
    if (static_cast<int>(symbols.size()) != n || static_cast<int>(weights.weights.size()) != n) {
        throw ValidationError("ofdm_modulate: expected " + std::to_string(n) + " symbols and weights");
    }
    if (static_cast<int>(out.size()) != m + cp) {
        throw ValidationError("ofdm_modulate: output block has the wrong length");
    }
    auto core = out.subspan(cp);
    std::fill(core.begin(), core.end(), std::complex<double>{});
    for (int k = 1; k <= n; ++k) core[layout_.bin(k)] = weights.weights[k - 1] * symbols[k - 1];
    inverse_.execute(core, core);
    std::copy(core.end() - cp, core.end(), out.begin());
}

void OfdmModem::demodulate(std::span<const std::complex<double>> block,
                           std::span<std::complex<double>> out) const {
    const int n = layout_.n_subcarriers;
    const int m = layout_.fft_size();
    if (static_cast<int>(block.size()) != layout_.block_samples()) {
        throw ValidationError("ofdm_demodulate: block has the wrong length");
    }
    if (static_cast<int>(out.size()) != n) throw ValidationError("ofdm_demodulate: output must hold N values");
    cvec spectrum(block.begin() + layout_.cp_samples(), block.end());
    forward_.execute(spectrum, spectrum);
    const double scale = 1.0 / m;
    for (int k = 1; k <= n; ++k) out[k - 1] = spectrum[layout_.bin(k)] * scale;
}

cvec ofdm_modulate(std::span<const std::complex<double>> symbols, const WeightVector& weights,
                   const OfdmLayout& layout) {
    OfdmModem modem(layout);
    cvec out(static_cast<std::size_t>(layout.block_samples()));
    modem.modulate(symbols, weights, out);
    return out;
}

cvec ofdm_demodulate(std::span<const std::complex<double>> block, const OfdmLayout& layout) {
    OfdmModem modem(layout);
    cvec out(static_cast<std::size_t>(layout.n_subcarriers));
    modem.demodulate(block, out);
    return out;
}

PrototypeFilter PrototypeFilter::phydyas(int m_size) {
    if (m_size < 2) throw ValidationError("prototype: transform size must be at least 2");
    PrototypeFilter p;
    p.m_size = m_size;
    const int len = p.overlap * m_size;
    const double h[] = {1.0, kPhydyasH1, kPhydyasH2, kPhydyasH3};
    p.taps.resize(len);
    for (int m = 0; m < len; ++m) {
        double v = h[0];
        for (int k = 1; k < p.overlap; ++k) {
            const double sign = (k % 2) ? -1.0 : 1.0;
            v += 2.0 * sign * h[k] * std::cos(2.0 * std::numbers::pi * k * m / len);
        }
        p.taps[m] = v;
    }
    return p;
}

double PrototypeFilter::dc_response() const {
    return std::accumulate(taps.begin(), taps.end(), 0.0) / static_cast<double>(taps.size());
}

std::vector<double> oqam_stagger(std::span<const std::complex<double>> blocks, int n_subcarriers) {
    if (n_subcarriers <= 0 || blocks.size() % n_subcarriers != 0) {
        throw ValidationError("oqam_stagger: input is not a whole number of symbol blocks");
    }
    std::vector<double> out;
    out.reserve(2 * blocks.size());
    for (std::size_t b = 0; b < blocks.size(); b += n_subcarriers) {
        for (int n = 0; n < n_subcarriers; ++n) out.push_back(blocks[b + n].real());
        for (int n = 0; n < n_subcarriers; ++n) out.push_back(blocks[b + n].imag());
    }
    return out;
}

cvec fbmc_synthesize(std::span<const double> stream, const WeightVector& weights,
                     const PrototypeFilter& proto, const OfdmLayout& layout) {
    layout.validate();
    const int n = layout.n_subcarriers;
    const int m = layout.fft_size();
    if (stream.empty() || stream.size() % n != 0) {
        throw ValidationError("fbmc_synthesize: stream length must be a positive multiple of N = " +
                              std::to_string(n));
    }
    if (static_cast<int>(weights.weights.size()) != n) {
        throw ValidationError("fbmc_synthesize: expected " + std::to_string(n) + " weights");
    }
    if (proto.m_size != m || m % 2 != 0) {
        throw ValidationError("fbmc_synthesize: prototype was designed for a different transform size");
    }
    const double energy = std::inner_product(proto.taps.begin(), proto.taps.end(), proto.taps.begin(), 0.0);
    const double gain = std::sqrt(m / energy);
    const int len = static_cast<int>(proto.taps.size());
    const std::size_t periods = stream.size() / n;
    const int hop = m / 2;

    cvec out((periods - 1) * hop + len);
    cvec buf(m);
    Fft inverse(m, Fft::Direction::Inverse);
    static const std::complex<double> jpow[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (std::size_t k = 0; k < periods; ++k) {
        std::fill(buf.begin(), buf.end(), std::complex<double>{});
        bool any = false;
        for (int sc = 1; sc <= n; ++sc) {
            const double v = weights.weights[sc - 1] * stream[k * n + sc - 1];
            if (v == 0.0) continue;
            any = true;
            buf[layout.bin(sc)] = v * jpow[(sc + k) % 4];
        }
        if (!any) continue;
        inverse.execute(buf, buf);
        auto* dst = out.data() + k * hop;
        for (int r = 0; r < len; ++r) dst[r] += gain * proto.taps[r] * buf[r % m];
    }
    return out;
}

double Psd::integral() const {
    return std::accumulate(density.begin(), density.end(), 0.0) * bin_width_hz;
}

double Psd::mean_density(double lo, double hi) const {
    double sum = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < freq_hz.size(); ++i) {
        if (freq_hz[i] >= lo && freq_hz[i] < hi) {
            sum += density[i];
            ++count;
        }
    }
    if (count == 0) throw ValidationError("psd: no bins in the requested range");
    return sum / count;
}

double Psd::at(double f) const {
    if (freq_hz.empty()) throw ValidationError("psd: empty estimate");
    const double pos = (f - freq_hz.front()) / bin_width_hz;
    const auto i = static_cast<long long>(std::llround(pos));
    if (i < 0 || i >= static_cast<long long>(freq_hz.size())) {
        throw ValidationError("psd: frequency outside the estimate");
    }
    return density[i];
}

Psd measure_psd(std::span<const std::complex<double>> series, double sample_rate_hz, int nfft) {
    if (nfft < 2) throw ValidationError("measure_psd: nfft must be at least 2");
    if (!(sample_rate_hz > 0.0)) throw ValidationError("measure_psd: sample rate must be positive");
    if (series.size() < 8 * static_cast<std::size_t>(nfft)) {
        throw PreconditionError("measure_psd: series of " + std::to_string(series.size()) +
                                " samples is shorter than 8 * nfft = " + std::to_string(8 * nfft));
    }
    std::vector<double> window(nfft);
    for (int i = 0; i < nfft; ++i) {
        window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / nfft);
    }
    const double wsum2 = std::inner_product(window.begin(), window.end(), window.begin(), 0.0);

    Fft fft(nfft, Fft::Direction::Forward);
    cvec seg(nfft);
    std::vector<double> acc(nfft, 0.0);
    const std::size_t step = nfft / 2;
    std::size_t count = 0;
    for (std::size_t start = 0; start + nfft <= series.size(); start += step) {
        for (int i = 0; i < nfft; ++i) seg[i] = series[start + i] * window[i];
        fft.execute(seg, seg);
        for (int i = 0; i < nfft; ++i) acc[i] += std::norm(seg[i]);
        ++count;
    }

    Psd psd;
    psd.bin_width_hz = sample_rate_hz / nfft;
    psd.freq_hz.resize(nfft);
    psd.density.resize(nfft);
    const double scale = 1.0 / (static_cast<double>(count) * sample_rate_hz * wsum2);
    const int half = nfft / 2;
    for (int i = 0; i < nfft; ++i) {
        // Shift so that bin 0 is the most negative frequency.
        const int src = (i + nfft - half) % nfft;
        psd.freq_hz[i] = (i - half) * psd.bin_width_hz;
        psd.density[i] = acc[src] * scale;
    }
    return psd;
}

int nfft_for_resolution(double sample_rate_hz, double resolution_hz) {
    const double n = sample_rate_hz / resolution_hz;
    if (!(n >= 2.0) || std::abs(n - std::round(n)) > 1e-9 * n) {
        throw ValidationError("psd: sample rate is not an integer multiple of the resolution");
    }
    return static_cast<int>(std::lround(n));
}

Table psd_table(const Psd& psd, const std::string& name) {
    Table t{name, {"freq_hz", "density_w_per_hz"}, {}};
    t.rows.reserve(psd.freq_hz.size());
    for (std::size_t i = 0; i < psd.freq_hz.size(); ++i) {
        t.rows.push_back({cell(psd.freq_hz[i]), cell(psd.density[i])});
    }
    return t;
}

void write_baseband(const std::filesystem::path& path, std::span<const std::complex<double>> series,
                    double sample_rate_hz) {
    std::ofstream bin(path, std::ios::binary);
    if (!bin) throw ValidationError("cannot open " + path.string() + " for writing");
    // std::complex<double> is layout-compatible with double[2].
    bin.write(reinterpret_cast<const char*>(series.data()),
              static_cast<std::streamsize>(series.size() * sizeof(std::complex<double>)));
    std::ofstream header(path.string() + ".json");
    header << nlohmann::json{{"sample_rate", sample_rate_hz}, {"length", series.size()},
                             {"format", "interleaved float64 I/Q"}}
                  .dump(2)
           << '\n';
    if (!bin || !header) throw ValidationError("failed writing " + path.string());
}

cvec read_baseband(const std::filesystem::path& path, double* sample_rate_hz) {
    std::ifstream header(path.string() + ".json");
    if (!header) throw ValidationError("missing baseband header " + path.string() + ".json");
    const auto meta = nlohmann::json::parse(header);
    const auto length = meta.at("length").get<std::size_t>();
    if (sample_rate_hz) *sample_rate_hz = meta.at("sample_rate").get<double>();
    cvec out(length);
    std::ifstream bin(path, std::ios::binary);
    bin.read(reinterpret_cast<char*>(out.data()),
             static_cast<std::streamsize>(length * sizeof(std::complex<double>)));
    if (!bin) throw ValidationError("baseband file " + path.string() + " is shorter than its header says");
    return out;
}

}  // namespace specshape

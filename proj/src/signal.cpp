#include "helirot/signal.hpp"

#include "helirot/errors.hpp"
#include "helirot/units.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace helirot {

namespace {

double decay(double t_ps, double tau_ns) {
    return std::isinf(tau_ns) ? 1.0 : std::exp(-t_ps / (tau_ns * 1e3));
}

std::vector<double> window_weights(Window window, std::size_t n) {
    std::vector<double> w(n, 1.0);
    if (window == Window::Hann && n > 1) {
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = 0.5 - 0.5 * std::cos(2.0 * units::pi * static_cast<double>(i) / static_cast<double>(n - 1));
        }
    }
    return w;
}

} // namespace

// --- LDTrace --------------------------------------------------------------------

void LDTrace::validate() const {
    if (times_ps.size() != values.size()) {
        throw ValidationError("trace: time and value columns differ in length");
    }
    if (times_ps.size() < 2) {
        throw ValidationError("trace: need at least two samples");
    }
    const double step = times_ps[1] - times_ps[0];
    if (!(step > 0.0)) {
        throw ValidationError("trace: time grid must be strictly increasing");
    }
    for (std::size_t i = 1; i < times_ps.size(); ++i) {
        const double d = times_ps[i] - times_ps[i - 1];
        if (!(d > 0.0) || std::abs(d - step) > 1e-6 * step + 1e-9 * std::abs(times_ps[i])) {
            throw ValidationError("trace: time grid is not uniform at sample " + std::to_string(i));
        }
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw ValidationError("trace: non-finite value at sample " + std::to_string(i));
        }
    }
}

double LDTrace::dt_ps() const {
    return (times_ps.back() - times_ps.front()) / static_cast<double>(times_ps.size() - 1);
}

double LDTrace::span_ps() const { return dt_ps() * static_cast<double>(times_ps.size()); }

TimeGrid TimeGrid::spanning(double start_ps, double end_ps, double step_ps) {
    if (!(step_ps > 0.0) || !(end_ps > start_ps)) {
        throw ValidationError("time grid: need step > 0 and end > start");
    }
    const auto count = static_cast<std::size_t>(std::floor((end_ps - start_ps) / step_ps + 1e-9)) + 1;
    return {start_ps, step_ps, count};
}

// --- synthesis ------------------------------------------------------------------

std::vector<VibrationalBranch> vibrational_branches(const MoleculeConstants& constants,
                                                    std::span<const double> weights) {
    constants.validate();
    const std::size_t count = weights.empty() ? constants.b_thz.size() : weights.size();
    if (count > constants.b_thz.size()) {
        throw ValidationError("branches: more weights than rotational constants");
    }
    std::vector<VibrationalBranch> out;
    double total = 0.0;
    for (std::size_t v = 0; v < count; ++v) {
        const double w = weights.empty() ? 1.0 : weights[v];
        if (!(w >= 0.0)) {
            throw ValidationError("branches: weights must be non-negative");
        }
        total += w;
        out.push_back({static_cast<int>(v), constants.b_thz[v], w});
    }
    if (!(total > 0.0)) {
        throw ValidationError("branches: weights sum to zero");
    }
    for (auto& branch : out) {
        branch.weight /= total;
    }
    return out;
}

std::vector<BeatComponent> coherence_components(const MoleculeConstants& constants, int n1,
                                                std::span<const double> pair_weights,
                                                std::span<const VibrationalBranch> branches) {
    const auto pairs = allowed_pairs(n1, n1 + 2);
    if (pair_weights.size() != pairs.size()) {
        std::ostringstream msg;
        msg << "components: " << pairs.size() << " pair weights expected for (" << n1 << "," << n1 + 2 << "), got "
            << pair_weights.size();
        throw ValidationError(msg.str());
    }
    std::vector<BeatComponent> out;
    for (const auto& branch : branches) {
        if (branch.weight == 0.0) {
            continue;
        }
        const auto nu = beat_frequencies(n1, constants, branch.v);
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            std::ostringstream label;
            label << "LD" << n1 << n1 + 2 << ":v" << branch.v << ":(" << pairs[k].j1 << "," << pairs[k].j2 << ")";
            out.push_back({nu[k], branch.weight * pair_weights[k], label.str()});
        }
    }
    return out;
}

LDTrace synthesize_ld(std::span<const BeatComponent> components, double tau_ns, const TimeGrid& grid) {
    if (components.empty()) {
        throw ValidationError("synthesis: empty component list");
    }
    if (!(tau_ns > 0.0)) {
        throw ValidationError("synthesis: tau must be positive");
    }
    if (grid.count < 2 || !(grid.step_ps > 0.0)) {
        throw ValidationError("synthesis: grid needs at least two samples and a positive step");
    }
    double nu_max = 0.0;
    for (const auto& c : components) {
        nu_max = std::max(nu_max, std::abs(c.frequency_thz));
    }
    if (nu_max >= 0.5 / grid.step_ps) {
        std::ostringstream msg;
        msg << "synthesis: step " << grid.step_ps << " ps undersamples " << nu_max << " THz (Nyquist "
            << 0.5 / grid.step_ps << " THz)";
        throw ValidationError(msg.str());
    }
    LDTrace trace;
    trace.times_ps.resize(grid.count);
    trace.values.resize(grid.count);
    for (std::size_t i = 0; i < grid.count; ++i) {
        const double t = grid.at(i);
        double sum = 0.0;
        for (const auto& c : components) {
            sum += c.weight * std::cos(2.0 * units::pi * c.frequency_thz * t);
        }
        trace.times_ps[i] = t;
        trace.values[i] = sum * decay(t, tau_ns);
    }
    std::ostringstream meta;
    meta << "synthesized components=" << components.size() << " tau_ns=" << tau_ns;
    trace.meta = meta.str();
    return trace;
}

LDTrace add_white_noise(LDTrace trace, double sigma, std::uint64_t seed) {
    if (!(sigma >= 0.0)) {
        throw ValidationError("noise: sigma must be non-negative");
    }
    if (sigma == 0.0) {
        return trace;
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, sigma);
    for (auto& v : trace.values) {
        v += normal(rng);
    }
    trace.meta += " noise_sigma=" + std::to_string(sigma);
    return trace;
}

double beat_envelope(double t_ps, std::span<const BeatComponent> components, double tau_ns) {
    std::complex<double> sum{};
    for (const auto& c : components) {
        sum += c.weight * std::polar(1.0, 2.0 * units::pi * c.frequency_thz * t_ps);
    }
    return std::abs(sum) * decay(t_ps, tau_ns);
}

std::optional<EnvelopeMinimum> first_envelope_minimum(std::span<const BeatComponent> components, double tau_ns,
                                                      double t_max_ps, double step_ps) {
    if (!(step_ps > 0.0) || !(t_max_ps > 2.0 * step_ps)) {
        throw ValidationError("envelope minimum: need step > 0 and a range of at least two steps");
    }
    const double start = beat_envelope(0.0, components, tau_ns);
    double prev = start;
    double here = beat_envelope(step_ps, components, tau_ns);
    for (double t = step_ps; t + step_ps <= t_max_ps; t += step_ps) {
        const double next = beat_envelope(t + step_ps, components, tau_ns);
        if (here < prev && here <= next) {
            const double curvature = prev - 2.0 * here + next;
            const double shift = curvature > 0.0 ? 0.5 * (prev - next) / curvature : 0.0;
            const double t_min = t + shift * step_ps;
            return EnvelopeMinimum{t_min, beat_envelope(t_min, components, tau_ns) / start};
        }
        prev = here;
        here = next;
    }
    return std::nullopt;
}

// --- spectra --------------------------------------------------------------------

Spectrum magnitude_spectrum(const LDTrace& trace, const SpectrumOptions& options) {
    trace.validate();
    if (options.zero_pad < 1) {
        throw ValidationError("spectrum: zero_pad must be >= 1");
    }
    const std::size_t n = trace.values.size();
    std::size_t nfft = 1;
    while (nfft < n * static_cast<std::size_t>(options.zero_pad)) {
        nfft <<= 1;
    }
    const auto w = window_weights(options.window, n);
    const double gain = std::accumulate(w.begin(), w.end(), 0.0);
    std::vector<double> padded(nfft, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        padded[i] = trace.values[i] * w[i];
    }
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> out;
    fft.fwd(out, padded);

    const double dt = trace.dt_ps();
    Spectrum s;
    s.resolution_thz = 1.0 / trace.span_ps();
    const std::size_t half = nfft / 2 + 1;
    s.frequency_thz.resize(half);
    s.amplitude.resize(half);
    for (std::size_t k = 0; k < half; ++k) {
        s.frequency_thz[k] = static_cast<double>(k) / (static_cast<double>(nfft) * dt);
        s.amplitude[k] = (k == 0 ? 1.0 : 2.0) * std::abs(out[k]) / gain;
    }
    return s;
}

std::vector<SpectralPeak> find_peaks(const Spectrum& spectrum, double min_relative_amplitude) {
    const auto& a = spectrum.amplitude;
    std::vector<SpectralPeak> peaks;
    if (a.size() < 3) {
        return peaks;
    }
    const double bin = spectrum.frequency_thz[1] - spectrum.frequency_thz[0];
    for (std::size_t k = 1; k + 1 < a.size(); ++k) {
        if (a[k] > a[k - 1] && a[k] >= a[k + 1]) {
            const double denom = a[k - 1] - 2.0 * a[k] + a[k + 1];
            const double shift = denom != 0.0 ? 0.5 * (a[k - 1] - a[k + 1]) / denom : 0.0;
            const double height = a[k] - 0.25 * (a[k - 1] - a[k + 1]) * shift;
            peaks.push_back({spectrum.frequency_thz[k] + shift * bin, height, ""});
        }
    }
    double strongest = 0.0;
    for (const auto& p : peaks) {
        strongest = std::max(strongest, p.amplitude);
    }
    std::erase_if(peaks, [&](const SpectralPeak& p) { return p.amplitude < min_relative_amplitude * strongest; });
    return peaks;
}

std::vector<SpectralPeak> fourier_spectrum(const LDTrace& trace, const SpectrumOptions& options,
                                           double lowest_target_thz) {
    trace.validate();
    if (lowest_target_thz > 0.0 && trace.span_ps() * lowest_target_thz < 2.0) {
        std::ostringstream msg;
        msg << "spectrum: " << trace.span_ps() << " ps scan is shorter than two periods of " << lowest_target_thz
            << " THz";
        throw ValidationError(msg.str());
    }
    return find_peaks(magnitude_spectrum(trace, options), options.min_relative_amplitude);
}

std::vector<SpectralPeak> label_peaks(std::span<const SpectralPeak> peaks, std::span<const PeakTarget> targets,
                                      double tolerance_thz) {
    std::vector<SpectralPeak> out;
    for (const auto& target : targets) {
        const SpectralPeak* best = nullptr;
        for (const auto& p : peaks) {
            if (std::abs(p.frequency_thz - target.frequency_thz) <= tolerance_thz &&
                (best == nullptr || p.amplitude > best->amplitude)) {
                best = &p;
            }
        }
        if (best != nullptr) {
            out.push_back({best->frequency_thz, best->amplitude, target.label});
        }
    }
    return out;
}

double peak_ratio(std::span<const SpectralPeak> peaks, const std::string& numerator, const std::string& denominator) {
    auto find = [&](const std::string& label) {
        for (const auto& p : peaks) {
            if (p.label == label) {
                return p.amplitude;
            }
        }
        throw ModelError("peak ratio: no peak labelled " + label);
    };
    const double num = find(numerator);
    const double den = find(denominator);
    if (!(den > 0.0)) {
        throw ModelError("peak ratio: peak " + denominator + " has zero amplitude");
    }
    return num / den;
}

AmplitudeSeries sliding_window_amplitude(const LDTrace& trace, double target_thz, double window_ps,
                                         std::span<const double> coarse_starts_ps) {
    trace.validate();
    if (!(target_thz > 0.0) || window_ps * target_thz < 10.0) {
        std::ostringstream msg;
        msg << "sliding window: " << window_ps << " ps holds fewer than ten periods of " << target_thz << " THz";
        throw ValidationError(msg.str());
    }
    const double dt = trace.dt_ps();
    const auto samples = static_cast<std::size_t>(std::llround(window_ps / dt)) + 1;
    const auto w = window_weights(Window::Hann, samples);
    const double gain = std::accumulate(w.begin(), w.end(), 0.0);

    AmplitudeSeries series;
    for (double start : coarse_starts_ps) {
        const double offset = (start - trace.times_ps.front()) / dt;
        if (offset < -1e-9) {
            continue;
        }
        const auto first = static_cast<std::size_t>(std::llround(offset));
        if (first + samples > trace.values.size()) {
            continue;
        }
        std::complex<double> sum{};
        for (std::size_t i = 0; i < samples; ++i) {
            const double t = trace.times_ps[first + i];
            sum += w[i] * trace.values[first + i] * std::polar(1.0, -2.0 * units::pi * target_thz * t);
        }
        series.t_ps.push_back(trace.times_ps[first] + 0.5 * static_cast<double>(samples - 1) * dt);
        series.amplitude.push_back(2.0 * std::abs(sum) / gain);
    }
    return series;
}

} // namespace helirot

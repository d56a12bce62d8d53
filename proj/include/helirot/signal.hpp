#pragma once

// Forward model of the linear-dichroism (LD) beat signal and its spectral
// analysis. Amplitudes are relative: the absolute LD normalization is not
// modelled.

#include "helirot/fine_structure.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace helirot {

/// Uniformly sampled LD signal.
struct LDTrace {
    std::vector<double> times_ps;
    std::vector<double> values;
    std::string meta;

    /// Throws ValidationError unless the grid is uniform, strictly increasing
    /// and all values are finite.
    void validate() const;
    double dt_ps() const;
    double span_ps() const;
};

struct SpectralPeak {
    double frequency_thz = 0.0;
    double amplitude = 0.0;
    std::string label;
};

struct VibrationalBranch {
    int v = 0;
    double b_thz = 0.0;
    double weight = 0.0;
};

/// One cosine term c·cos(2πνt) of the beat model.
struct BeatComponent {
    double frequency_thz = 0.0;
    double weight = 0.0;
    std::string label;
};

struct TimeGrid {
    double start_ps = 0.0;
    double step_ps = 0.02;
    std::size_t count = 0;

    static TimeGrid spanning(double start_ps, double end_ps, double step_ps);
    double at(std::size_t i) const { return start_ps + static_cast<double>(i) * step_ps; }
};

/// Branches v = 0..n-1 with the molecule's B_v and the given relative weights
/// (normalized to sum 1). Empty weights mean equal weights over all B_v.
std::vector<VibrationalBranch> vibrational_branches(const MoleculeConstants& constants,
                                                    std::span<const double> weights = {});

/// Beat components of the (N1, N1+2) coherence for each branch: the pair
/// weights c_k are scaled by the branch weight, frequencies use that
/// branch's B_v. `pair_weights` follows allowed_pairs(N1, N1+2) order.
std::vector<BeatComponent> coherence_components(const MoleculeConstants& constants, int n1,
                                                std::span<const double> pair_weights,
                                                std::span<const VibrationalBranch> branches);

/// LD(t) = Σ_k c_k cos(2π ν_k t) · exp(-t/τ). τ may be +infinity.
/// Throws ValidationError for τ <= 0, an empty component list, or a grid
/// whose Nyquist frequency does not exceed max ν_k.
LDTrace synthesize_ld(std::span<const BeatComponent> components, double tau_ns, const TimeGrid& grid);

/// Adds N(0, σ²) to every sample with a seeded generator.
LDTrace add_white_noise(LDTrace trace, double sigma, std::uint64_t seed);

enum class Window { None, Hann };

struct SpectrumOptions {
    Window window = Window::Hann;
    int zero_pad = 4;                     ///< transform length >= zero_pad × samples, rounded to a power of 2
    double min_relative_amplitude = 0.05; ///< peak threshold relative to the strongest peak
};

/// One-sided magnitude spectrum, scaled so that a cosine of amplitude A
/// shows a peak of height A.
struct Spectrum {
    std::vector<double> frequency_thz;
    std::vector<double> amplitude;
    double resolution_thz = 0.0; ///< 1 / scan length
};

Spectrum magnitude_spectrum(const LDTrace& trace, const SpectrumOptions& options = {});

/// Local maxima of the magnitude spectrum (parabolic interpolation),
/// ascending in frequency. When `lowest_target_thz` > 0 the trace must span
/// at least two periods of it, otherwise ValidationError.
std::vector<SpectralPeak> fourier_spectrum(const LDTrace& trace, const SpectrumOptions& options = {},
                                           double lowest_target_thz = 0.0);
std::vector<SpectralPeak> find_peaks(const Spectrum& spectrum, double min_relative_amplitude);

/// Labels the strongest peak within `tolerance_thz` of each target. Targets
/// with no peak in reach stay absent.
struct PeakTarget {
    std::string label;
    double frequency_thz = 0.0;
};
std::vector<SpectralPeak> label_peaks(std::span<const SpectralPeak> peaks, std::span<const PeakTarget> targets,
                                      double tolerance_thz);

/// amplitude(numerator) / amplitude(denominator). Throws ModelError when a
/// label is missing.
double peak_ratio(std::span<const SpectralPeak> peaks, const std::string& numerator, const std::string& denominator);

/// Amplitude of one spectral line versus coarse delay.
struct AmplitudeSeries {
    std::vector<double> t_ps; ///< window centres
    std::vector<double> amplitude;
};

/// Hann-weighted projection of [t, t + window] onto frequency `target_thz`
/// for each coarse start t. Starts whose window leaves the trace are
/// skipped. Throws ValidationError when the window holds fewer than ten
/// periods of the target.
AmplitudeSeries sliding_window_amplitude(const LDTrace& trace, double target_thz, double window_ps,
                                         std::span<const double> coarse_starts_ps);

/// |Σ_k c_k e^{2πiν_k t}| · e^{-t/τ}: the slowly varying envelope of the beat model.
double beat_envelope(double t_ps, std::span<const BeatComponent> components, double tau_ns);

struct EnvelopeMinimum {
    double t_ps = 0.0;
    double depth = 0.0; ///< envelope at the minimum relative to its value at t = 0
};

/// First local minimum of beat_envelope on (0, t_max] sampled every
/// `step_ps`, refined parabolically. std::nullopt when the envelope is
/// monotone over the range.
std::optional<EnvelopeMinimum> first_envelope_minimum(std::span<const BeatComponent> components, double tau_ns,
                                                      double t_max_ps, double step_ps = 0.5);

} // namespace helirot

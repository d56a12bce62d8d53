#include "helirot/errors.hpp"
#include "helirot/signal.hpp"
#include "helirot/units.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace helirot;

namespace {

std::vector<BeatComponent> single(double f, double weight = 1.0) { return {{f, weight, "line"}}; }

} // namespace

TEST_CASE("time grid spans start to end inclusive") {
    const auto g = TimeGrid::spanning(0.0, 10.0, 0.5);
    CHECK(g.count == 21);
    CHECK(g.at(20) == doctest::Approx(10.0));
    CHECK_THROWS_AS(TimeGrid::spanning(1.0, 0.0, 0.1), ValidationError);
}

TEST_CASE("vibrational branches normalize their weights") {
    const auto c = MoleculeConstants::helium_excimer();
    const std::vector<double> w{2.0, 1.0, 1.0};
    const auto branches = vibrational_branches(c, w);
    REQUIRE(branches.size() == 3);
    CHECK(branches[0].weight == doctest::Approx(0.5));
    CHECK(branches[2].b_thz == doctest::Approx(0.2136));
    CHECK(vibrational_branches(c).size() == 3);
    const std::vector<double> too_many{1, 1, 1, 1};
    CHECK_THROWS_AS(vibrational_branches(c, too_many), ValidationError);
}

TEST_CASE("coherence components carry pair labels and scaled weights") {
    const auto c = MoleculeConstants::helium_excimer();
    const std::vector<double> w{1.0};
    const auto branches = vibrational_branches(c, w);
    const std::vector<double> pair_weights{0.2, -0.1, 1.0, 0.5, -0.5};
    const auto comps = coherence_components(c, 1, pair_weights, branches);
    REQUIRE(comps.size() == 5);
    CHECK(comps[2].label == "LD13:v0:(1,3)");
    CHECK(comps[2].frequency_thz == doctest::Approx(2.27).epsilon(1e-6));
    CHECK(comps[1].weight == doctest::Approx(-0.1));
    const std::vector<double> wrong{1.0, 2.0};
    CHECK_THROWS_AS(coherence_components(c, 1, wrong, branches), ValidationError);
}

TEST_CASE("synthesis evaluates the damped cosine sum") {
    const std::vector<BeatComponent> comps{{2.0, 1.0, "a"}, {3.0, 0.5, "b"}};
    const auto trace = synthesize_ld(comps, 1.0, TimeGrid::spanning(0.0, 5.0, 0.01));
    for (std::size_t i : {0u, 37u, 499u}) {
        const double t = trace.times_ps[i];
        const double expected =
            (std::cos(2.0 * units::pi * 2.0 * t) + 0.5 * std::cos(2.0 * units::pi * 3.0 * t)) * std::exp(-t / 1000.0);
        CHECK(trace.values[i] == doctest::Approx(expected).epsilon(1e-12));
    }
    const auto undamped =
        synthesize_ld(comps, std::numeric_limits<double>::infinity(), TimeGrid::spanning(0.0, 1.0, 0.01));
    CHECK(undamped.values[0] == doctest::Approx(1.5));
}

TEST_CASE("synthesis rejects empty components, bad tau and undersampling") {
    const auto grid = TimeGrid::spanning(0.0, 1.0, 0.1);
    CHECK_THROWS_AS(synthesize_ld({}, 1.0, grid), ValidationError);
    CHECK_THROWS_AS(synthesize_ld(single(1.0), 0.0, grid), ValidationError);
    CHECK_THROWS_AS(synthesize_ld(single(6.0), 1.0, grid), ValidationError);
}

TEST_CASE("trace validation") {
    LDTrace t{{0.0, 1.0, 2.5}, {0.0, 0.0, 0.0}, ""};
    CHECK_THROWS_AS(t.validate(), ValidationError);
    t.times_ps = {0.0, 1.0, 2.0};
    CHECK_NOTHROW(t.validate());
    CHECK(t.span_ps() == doctest::Approx(3.0));
    t.values[1] = std::nan("");
    CHECK_THROWS_AS(t.validate(), ValidationError);
}

TEST_CASE("noise is reproducible from the seed") {
    const auto trace = synthesize_ld(single(1.0), 1.0, TimeGrid::spanning(0.0, 10.0, 0.05));
    const auto a = add_white_noise(trace, 0.1, 42);
    const auto b = add_white_noise(trace, 0.1, 42);
    const auto c = add_white_noise(trace, 0.1, 43);
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
    double var = 0.0;
    for (std::size_t i = 0; i < trace.values.size(); ++i) {
        var += std::pow(a.values[i] - trace.values[i], 2);
    }
    CHECK(std::sqrt(var / static_cast<double>(trace.values.size())) == doctest::Approx(0.1).epsilon(0.1));
}

TEST_CASE("a 2.27 THz cosine over 400 ps gives a single peak at 2.27 THz") {
    const auto trace = synthesize_ld(single(2.27, 0.8), std::numeric_limits<double>::infinity(),
                                     TimeGrid::spanning(0.0, 400.0, 0.02));
    const auto spectrum = magnitude_spectrum(trace);
    CHECK(spectrum.resolution_thz == doctest::Approx(1.0 / 400.0).epsilon(1e-3));
    const auto peaks = fourier_spectrum(trace, {}, 2.27);
    REQUIRE(peaks.size() == 1);
    CHECK(std::abs(peaks[0].frequency_thz - 2.27) < spectrum.resolution_thz);
    CHECK(peaks[0].amplitude == doctest::Approx(0.8).epsilon(0.01));
}

TEST_CASE("spectrum requires two periods of the lowest target") {
    const auto trace = synthesize_ld(single(2.27), 1.0, TimeGrid::spanning(0.0, 0.5, 0.02));
    CHECK_THROWS_AS(fourier_spectrum(trace, {}, 2.27), ValidationError);
}

TEST_CASE("peaks are labelled by nearest target and ratios need both labels") {
    const std::vector<BeatComponent> comps{{2.27, 1.0, "a"}, {4.086, 0.3, "b"}};
    const auto trace = synthesize_ld(comps, 1.0, TimeGrid::spanning(0.0, 100.0, 0.02));
    const auto spectrum = magnitude_spectrum(trace);
    const auto peaks = find_peaks(spectrum, 0.05);
    const std::vector<PeakTarget> targets{{"LD13", 2.27}, {"LD35", 4.08}, {"absent", 7.0}};
    const auto labelled = label_peaks(peaks, targets, spectrum.resolution_thz);
    REQUIRE(labelled.size() == 2);
    CHECK(labelled[1].label == "LD35");
    CHECK(std::abs(labelled[1].frequency_thz - 4.08) < spectrum.resolution_thz);
    CHECK(peak_ratio(labelled, "LD35", "LD13") == doctest::Approx(0.3).epsilon(0.03));
    CHECK_THROWS_AS(peak_ratio(labelled, "absent", "LD13"), ModelError);
}

TEST_CASE("sliding window recovers the envelope of a beating line") {
    const std::vector<BeatComponent> comps{{2.27, 1.0, "a"}, {2.2708, 0.5, "b"}};
    const auto trace = synthesize_ld(comps, 1.0, TimeGrid::spanning(0.0, 1500.0, 0.02));
    std::vector<double> starts;
    for (double t = 0.0; t < 1480.0; t += 50.0) {
        starts.push_back(t);
    }
    const auto series = sliding_window_amplitude(trace, 2.27, 20.0, starts);
    REQUIRE(series.t_ps.size() == starts.size());
    for (std::size_t i = 0; i < series.t_ps.size(); ++i) {
        CHECK(series.amplitude[i] == doctest::Approx(beat_envelope(series.t_ps[i], comps, 1.0)).epsilon(0.01));
    }
    const std::vector<double> one{0.0};
    CHECK_THROWS_AS(sliding_window_amplitude(trace, 2.27, 2.0, one), ValidationError);
}

TEST_CASE("first envelope minimum of two beating lines sits at half the beat period") {
    const std::vector<BeatComponent> comps{{2.27, 1.0, "a"}, {2.271, 0.5, "b"}};
    const auto minimum = first_envelope_minimum(comps, std::numeric_limits<double>::infinity(), 1500.0);
    REQUIRE(minimum.has_value());
    CHECK(minimum->t_ps == doctest::Approx(500.0).epsilon(1e-3));
    CHECK(minimum->depth == doctest::Approx(0.5 / 1.5).epsilon(1e-4));
    CHECK_FALSE(first_envelope_minimum(single(2.27), 1.0, 1000.0).has_value());
}

TEST_CASE("default beat weights give a deep minimum near 500 ps") {
    const auto c = MoleculeConstants::helium_excimer();
    const std::vector<double> w{1.0};
    const auto branches = vibrational_branches(c, w);
    const std::vector<double> pair_weights{0.2, -0.1, 1.0, 0.5, -0.5};
    const auto comps = coherence_components(c, 1, pair_weights, branches);
    const auto minimum = first_envelope_minimum(comps, 1.0, 1500.0);
    REQUIRE(minimum.has_value());
    CHECK(minimum->t_ps > 450.0);
    CHECK(minimum->t_ps < 550.0);
    CHECK(minimum->depth < 0.3);
}

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "tclrl/binning.hpp"
#include "tclrl/rng.hpp"

using namespace tclrl;

namespace {

// Brute-force IQR: sort a copy, read both quartiles off the Weibull plotting
// positions directly.
double brute_force_iqr(std::vector<double> samples) {
    std::sort(samples.begin(), samples.end());
    auto at = [&](double p) {
        const double h = p * static_cast<double>(samples.size() + 1);
        if (h <= 1.0) {
            return samples.front();
        }
        if (h >= static_cast<double>(samples.size())) {
            return samples.back();
        }
        const auto lo = static_cast<std::size_t>(h);
        return samples[lo - 1] + (h - static_cast<double>(lo)) * (samples[lo] - samples[lo - 1]);
    };
    return at(0.75) - at(0.25);
}

} // namespace

TEST_CASE("equal-width edges") {
    const BinningSpec ten = equal_width_edges(0.9, 1.7, 10);
    REQUIRE(ten.n_bins() == 10);
    REQUIRE(ten.edges.size() == 11);
    CHECK(ten.edges.front() == doctest::Approx(0.9));
    CHECK(ten.edges.back() == doctest::Approx(1.7));
    for (std::size_t i = 1; i < ten.edges.size(); ++i) {
        CHECK(ten.edges[i] - ten.edges[i - 1] == doctest::Approx(0.08));
    }

    const BinningSpec one = equal_width_edges(0.0, 1.0, 1);
    CHECK(one.n_bins() == 1);
    CHECK(encode(one, -5.0) == 0);
    CHECK(encode(one, 0.5) == 0);
    CHECK(encode(one, 5.0) == 0);

    const BinningSpec hundred = equal_width_edges(0.1, 1.7, 100);
    CHECK(hundred.n_bins() == 100);
    CHECK(hundred.edges[1] - hundred.edges[0] == doctest::Approx(0.016));

    CHECK_THROWS_AS(equal_width_edges(1.0, 1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(equal_width_edges(0.0, 1.0, 0), std::invalid_argument);
}

TEST_CASE("encode: hand values, totality, monotonicity, coverage") {
    const BinningSpec spec = equal_width_edges(0.9, 1.7, 10);
    CHECK(encode(spec, 1.23) == 4);
    CHECK(encode(spec, 0.9) == 0);
    CHECK(encode(spec, 0.0) == 0);
    CHECK(encode(spec, 1.7) == 9);
    CHECK(encode(spec, 5.0) == 9);

    std::size_t previous = 0;
    std::vector<bool> hit(spec.n_bins(), false);
    for (double v = 0.5; v <= 2.1; v += 0.001) {
        const std::size_t index = encode(spec, v);
        CHECK(index >= previous);
        CHECK(index < spec.n_bins());
        hit[index] = true;
        previous = index;
    }
    CHECK(std::all_of(hit.begin(), hit.end(), [](bool b) { return b; }));
}

TEST_CASE("Freedman-Diaconis width against the brute-force IQR oracle") {
    HistoricalDataset data;
    Rng rng(99);
    for (int i = 0; i < 1000; ++i) {
        data.samples.push_back(rng.uniform01());
    }
    const double iqr = brute_force_iqr(data.samples);
    CHECK(iqr == doctest::Approx(0.5).epsilon(0.1));
    const double expected_width = 2.0 * iqr * std::pow(1000.0, -1.0 / 3.0);
    CHECK(expected_width == doctest::Approx(0.1).epsilon(0.15));

    const BinningSpec spec = fd_edges(data);
    for (std::size_t i = 1; i < spec.edges.size(); ++i) {
        CHECK(std::abs((spec.edges[i] - spec.edges[i - 1]) - expected_width) < 1e-12);
    }
    const auto [lo, hi] = std::minmax_element(data.samples.begin(), data.samples.end());
    CHECK(spec.edges.front() == doctest::Approx(*lo));
    CHECK(spec.edges.back() >= *hi);
    CHECK(spec.n_bins() ==
          static_cast<std::size_t>(std::ceil((*hi - *lo) / expected_width)));
}

TEST_CASE("Freedman-Diaconis on two samples") {
    HistoricalDataset data;
    data.samples = {0.0, 1.0};
    const BinningSpec spec = fd_edges(data);
    // IQR = 1, width = 2 * 2^(-1/3) ~ 1.587: a single bin covers the range
    CHECK(spec.n_bins() == 1);
    CHECK(spec.edges[1] - spec.edges[0] ==
          doctest::Approx(2.0 * std::pow(2.0, -1.0 / 3.0)));

    HistoricalDataset flat;
    flat.samples = {1.0, 1.0, 1.0};
    CHECK_THROWS_AS(fd_edges(flat), std::invalid_argument);
}

TEST_CASE("quantile edges on a uniform grid") {
    HistoricalDataset data;
    for (int i = 0; i <= 100; ++i) {
        data.samples.push_back(i / 100.0);
    }
    const BinningSpec spec = quantile_edges(data, 10);
    REQUIRE(spec.n_bins() == 10);
    for (int i = 0; i <= 10; ++i) {
        CHECK(spec.edges[static_cast<std::size_t>(i)] ==
              doctest::Approx(i / 10.0).epsilon(0.05));
    }
}

TEST_CASE("quantile bins hold balanced sample counts") {
    HistoricalDataset data;
    Rng rng(5);
    const int n = 1000;
    for (int i = 0; i < n; ++i) {
        // skewed data: squaring concentrates mass near zero
        const double u = rng.uniform01();
        data.samples.push_back(u * u);
    }
    const int n_bins = 10;
    const BinningSpec spec = quantile_edges(data, n_bins);

    std::vector<int> counts(spec.n_bins(), 0);
    for (double v : data.samples) {
        ++counts[encode(spec, v)];
    }
    for (int count : counts) {
        CHECK(count >= n / n_bins - 1);
        CHECK(count <= n / n_bins + 1);
    }

    // denser data region gets narrower bins than equal-width splitting
    const double full_span = spec.edges.back() - spec.edges.front();
    CHECK(spec.edges[1] - spec.edges[0] < full_span / n_bins);

    HistoricalDataset tiny;
    tiny.samples = {1.0, 2.0};
    CHECK_THROWS_AS(quantile_edges(tiny, 10), std::invalid_argument);
}

TEST_CASE("reference level is always an edge of rpl_edge bins") {
    const BinningSpec spec = rpl_edge_edges(0.9, 1.7, 10, 1.2);
    REQUIRE(spec.n_bins() == 10);
    CHECK(std::count(spec.edges.begin(), spec.edges.end(), 1.2) == 1);
    CHECK(spec.edges.front() == doctest::Approx(0.9));
    CHECK(spec.edges.back() == doctest::Approx(1.7));

    Rng rng(21);
    for (int i = 0; i < 200; ++i) {
        const double below = rng.uniform(0.5, 1.2 - 1e-9);
        const double above = rng.uniform(1.2 + 1e-9, 2.0);
        CHECK(encode(spec, below) != encode(spec, above));
    }

    // reference coinciding with an equal-width edge reproduces equal widths
    const BinningSpec coincident = rpl_edge_edges(0.9, 1.7, 10, 1.22);
    const BinningSpec equal = equal_width_edges(0.9, 1.7, 10);
    REQUIRE(coincident.edges.size() == equal.edges.size());
    for (std::size_t i = 0; i < equal.edges.size(); ++i) {
        CHECK(coincident.edges[i] == doctest::Approx(equal.edges[i]));
    }

    CHECK_THROWS_AS(rpl_edge_edges(0.9, 1.7, 10, 0.9), std::invalid_argument);
    CHECK_THROWS_AS(rpl_edge_edges(0.9, 1.7, 10, 2.0), std::invalid_argument);
}

TEST_CASE("historical data file loading") {
    const auto path = std::filesystem::temp_directory_path() / "tclrl_hist_test.txt";
    {
        std::ofstream out(path);
        out << "# APL samples\n1.25\n\n1.30\n# trailing comment\n0.95\n";
    }
    const HistoricalDataset data = load_historical(path);
    REQUIRE(data.samples.size() == 3);
    CHECK(data.samples[0] == doctest::Approx(1.25));
    CHECK(data.samples[2] == doctest::Approx(0.95));
    std::filesystem::remove(path);

    CHECK_THROWS_AS(load_historical("/nonexistent/tclrl.txt"), std::runtime_error);

    const auto empty = std::filesystem::temp_directory_path() / "tclrl_hist_empty.txt";
    {
        std::ofstream out(empty);
        out << "# nothing here\n";
    }
    CHECK_THROWS_AS(load_historical(empty), std::runtime_error);
    std::filesystem::remove(empty);
}

TEST_CASE("joint state encoder flattens row-major over (APL, RPL)") {
    StateEncoder encoder{equal_width_edges(0.9, 1.7, 10),
                         make_binning_spec({1.0, 1.25, 1.5})};
    CHECK(encoder.n_states() == 20);
    CHECK(encoder.encode_state(1.23, 1.1) == 4 * 2 + 0);
    CHECK(encoder.encode_state(1.23, 1.4) == 4 * 2 + 1);

    const StateEncoder constant_rpl{equal_width_edges(0.9, 1.7, 10)};
    CHECK(constant_rpl.n_states() == 10);
    CHECK(constant_rpl.encode_state(1.23, 1.2) == 4);
}

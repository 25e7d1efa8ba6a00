#include "tclrl/binning.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

namespace tclrl {

namespace {

void check_edges(const std::vector<double>& edges) {
    if (edges.size() < 2) {
        throw std::invalid_argument("BinningSpec: need at least two edges");
    }
    for (std::size_t i = 1; i < edges.size(); ++i) {
        if (!(edges[i - 1] < edges[i])) {
            throw std::invalid_argument("BinningSpec: edges must be strictly increasing");
        }
    }
}

std::size_t count_distinct(const std::vector<double>& samples) {
    std::set<double> distinct(samples.begin(), samples.end());
    return distinct.size();
}

} // namespace

BinningSpec make_binning_spec(std::vector<double> edges, bool open_left, bool open_right) {
    check_edges(edges);
    return {std::move(edges), open_left, open_right};
}

HistoricalDataset load_historical(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw std::runtime_error("cannot open historical data file: " + file.string());
    }
    HistoricalDataset data;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        std::istringstream token(line);
        double value = 0.0;
        if (!(token >> value)) {
            throw std::runtime_error("bad value at " + file.string() + ":" +
                                     std::to_string(line_no));
        }
        data.samples.push_back(value);
    }
    if (data.samples.empty()) {
        throw std::runtime_error("historical data file has no samples: " + file.string());
    }
    return data;
}

BinningSpec equal_width_edges(double lo, double hi, int n_bins) {
    if (!(lo < hi)) {
        throw std::invalid_argument("equal_width_edges: lo must be below hi");
    }
    if (n_bins < 1) {
        throw std::invalid_argument("equal_width_edges: need at least one bin");
    }
    std::vector<double> edges(static_cast<std::size_t>(n_bins) + 1);
    const double width = (hi - lo) / n_bins;
    for (int i = 0; i <= n_bins; ++i) {
        edges[static_cast<std::size_t>(i)] = lo + i * width;
    }
    edges.back() = hi;
    return make_binning_spec(std::move(edges));
}

double sample_quantile(std::vector<double> samples, double p) {
    if (samples.empty()) {
        throw std::invalid_argument("sample_quantile: empty sample");
    }
    std::sort(samples.begin(), samples.end());
    const auto n = samples.size();
    // Weibull plotting position: rank h = p * (n + 1), 1-based, clamped.
    const double h = p * static_cast<double>(n + 1);
    if (h <= 1.0) {
        return samples.front();
    }
    if (h >= static_cast<double>(n)) {
        return samples.back();
    }
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const double frac = h - static_cast<double>(lo);
    return samples[lo - 1] + frac * (samples[lo] - samples[lo - 1]);
}

BinningSpec fd_edges(const HistoricalDataset& data) {
    if (count_distinct(data.samples) < 2) {
        throw std::invalid_argument("fd_edges: need at least two distinct samples");
    }
    const double iqr =
        sample_quantile(data.samples, 0.75) - sample_quantile(data.samples, 0.25);
    if (iqr <= 0.0) {
        throw std::invalid_argument("fd_edges: degenerate data, IQR is zero");
    }
    const auto n = static_cast<double>(data.samples.size());
    const double width = 2.0 * iqr * std::pow(n, -1.0 / 3.0);
    const auto [min_it, max_it] = std::minmax_element(data.samples.begin(), data.samples.end());
    const double lo = *min_it;
    const double hi = *max_it;
    const auto bins = static_cast<std::size_t>(std::ceil((hi - lo) / width));
    std::vector<double> edges(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) {
        edges[i] = lo + static_cast<double>(i) * width;
    }
    return make_binning_spec(std::move(edges));
}

BinningSpec quantile_edges(const HistoricalDataset& data, int n_bins) {
    if (n_bins < 1) {
        throw std::invalid_argument("quantile_edges: need at least one bin");
    }
    if (count_distinct(data.samples) < static_cast<std::size_t>(n_bins)) {
        throw std::invalid_argument("quantile_edges: not enough distinct samples");
    }
    std::vector<double> edges(static_cast<std::size_t>(n_bins) + 1);
    for (int i = 0; i <= n_bins; ++i) {
        edges[static_cast<std::size_t>(i)] =
            sample_quantile(data.samples, static_cast<double>(i) / n_bins);
    }
    // heavy ties can put several quantiles on one value; merge those bins
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    if (edges.size() < 2) {
        throw std::invalid_argument("quantile_edges: degenerate data, all quantiles tied");
    }
    return make_binning_spec(std::move(edges));
}

BinningSpec rpl_edge_edges(double lo, double hi, int n_bins, double rpl) {
    if (!(lo < rpl && rpl < hi)) {
        throw std::invalid_argument("rpl_edge_edges: rpl must lie strictly inside (lo, hi)");
    }
    if (n_bins < 2) {
        throw std::invalid_argument("rpl_edge_edges: need at least two bins");
    }
    // Bins split between the two segments in proportion to their length.
    auto below = static_cast<int>(std::lround(n_bins * (rpl - lo) / (hi - lo)));
    below = std::clamp(below, 1, n_bins - 1);
    const int above = n_bins - below;

    std::vector<double> edges;
    edges.reserve(static_cast<std::size_t>(n_bins) + 1);
    const double w_below = (rpl - lo) / below;
    for (int i = 0; i < below; ++i) {
        edges.push_back(lo + i * w_below);
    }
    edges.push_back(rpl);
    const double w_above = (hi - rpl) / above;
    for (int i = 1; i < above; ++i) {
        edges.push_back(rpl + i * w_above);
    }
    edges.push_back(hi);
    return make_binning_spec(std::move(edges));
}

BinningSpec passthrough_bin() {
    return make_binning_spec({0.0, 1.0});
}

std::size_t encode(const BinningSpec& spec, double value) {
    const auto& edges = spec.edges;
    if (value <= edges.front()) {
        return 0;
    }
    if (value >= edges.back()) {
        return spec.n_bins() - 1;
    }
    const auto it = std::upper_bound(edges.begin(), edges.end(), value);
    return static_cast<std::size_t>(it - edges.begin()) - 1;
}

} // namespace tclrl

#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

namespace tclrl {

/// Ordered bin edges mapping a continuous value to a bin index. Intervals are
/// left-closed, right-open; the final interval is right-closed. With the open
/// flags set (the default for every factory here) values outside the edge
/// range fall into the outermost bins, making encode total.
struct BinningSpec {
    std::vector<double> edges; // strictly increasing, at least two entries
    bool open_left = true;
    bool open_right = true;

    std::size_t n_bins() const { return edges.size() - 1; }
};

/// Validates edge ordering; throws std::invalid_argument on violation.
BinningSpec make_binning_spec(std::vector<double> edges, bool open_left = true,
                              bool open_right = true);

/// Historical observations used by the data-driven edge constructors.
struct HistoricalDataset {
    enum class Source { ConstantSweep, EarlyQlearning };

    std::vector<double> samples; // APL observations, p.u.
    Source source = Source::ConstantSweep;
};

/// Reads one numeric value per line; lines starting with '#' are comments.
HistoricalDataset load_historical(const std::filesystem::path& file);

/// n_bins equal-width bins spanning [lo, hi].
BinningSpec equal_width_edges(double lo, double hi, int n_bins);

/// Bin width from the Freedman-Diaconis rule, 2 * IQR * n^(-1/3); edges step
/// uniformly from min(data) until max(data) is covered.
BinningSpec fd_edges(const HistoricalDataset& data);

/// Edges at the i/n_bins empirical quantiles of the data, i = 0..n_bins.
/// Quantiles tied by repeated samples are merged into one edge, so heavily
/// tied data can yield fewer than n_bins bins.
BinningSpec quantile_edges(const HistoricalDataset& data, int n_bins);

/// Equal-width bins on [lo, rpl] and [rpl, hi] with rpl itself as an edge, so
/// values on opposite sides of the reference level never share a bin.
BinningSpec rpl_edge_edges(double lo, double hi, int n_bins, double rpl);

/// Single catch-all bin; every value encodes to index 0.
BinningSpec passthrough_bin();

/// Bin index of value; total and monotone non-decreasing.
std::size_t encode(const BinningSpec& spec, double value);

/// Quantile of the samples by linear interpolation of order statistics
/// (Weibull plotting positions), clamped to the sample range. p in [0, 1].
double sample_quantile(std::vector<double> samples, double p);

/// Joint discrete state over (APL, RPL), flattened row-major with APL as the
/// leading axis. Constant-RPL setups use a passthrough RPL spec.
struct StateEncoder {
    BinningSpec apl_bins;
    BinningSpec rpl_bins = passthrough_bin();

    std::size_t n_states() const { return apl_bins.n_bins() * rpl_bins.n_bins(); }
    std::size_t encode_state(double apl, double rpl) const {
        return encode(apl_bins, apl) * rpl_bins.n_bins() + encode(rpl_bins, rpl);
    }
};

} // namespace tclrl

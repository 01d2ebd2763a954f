#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nf2 {

/// Equi-width binning over [lo, hi). Values at hi land in overflow.
struct HistogramSpec {
    double lo = 0.0;
    double hi = 1.0;
    int nbins = 1;

    friend bool operator==(const HistogramSpec&, const HistogramSpec&) = default;
};

/// The terminal aggregation of every query. Under-/overflow and NaN have
/// dedicated counters so that fills are conserved exactly.
class Histogram {
public:
    Histogram() : Histogram(HistogramSpec{}) {}
    explicit Histogram(const HistogramSpec& spec);

    void fill(double x);

    /// Element-wise counter sum. Throws std::invalid_argument on spec mismatch.
    void merge(const Histogram& other);

    const HistogramSpec& spec() const { return spec_; }
    const std::vector<std::int64_t>& counts() const { return counts_; }
    std::int64_t underflow() const { return underflow_; }
    std::int64_t overflow() const { return overflow_; }
    std::int64_t nan_count() const { return nan_count_; }

    /// Total number of fills (all counters).
    std::int64_t total() const;

    friend bool operator==(const Histogram&, const Histogram&) = default;

private:
    HistogramSpec spec_;
    std::vector<std::int64_t> counts_;
    std::int64_t underflow_ = 0;
    std::int64_t overflow_ = 0;
    std::int64_t nan_count_ = 0;
};

Histogram merge(const Histogram& a, const Histogram& b);

/// CSV rendering: header `bin_lo,bin_hi,count`, one underflow row (-inf
/// marker), nbins numeric rows, one overflow row (+inf marker), one nan row.
/// Numbers are shortest round-trip decimals.
std::string to_csv(const Histogram& h);

/// Shortest round-trip decimal rendering of a double.
std::string format_double(double v);

}  // namespace nf2

#include "nf2/histogram.hpp"

#include <charconv>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace nf2 {

Histogram::Histogram(const HistogramSpec& spec) : spec_(spec) {
    if (!(spec.lo < spec.hi)) throw std::invalid_argument("histogram: requires lo < hi");
    if (spec.nbins < 1) throw std::invalid_argument("histogram: requires nbins >= 1");
    counts_.assign(static_cast<std::size_t>(spec.nbins), 0);
}

void Histogram::fill(double x) {
    if (std::isnan(x)) {
        ++nan_count_;
        return;
    }
    if (x < spec_.lo) {
        ++underflow_;
        return;
    }
    if (x >= spec_.hi) {
        ++overflow_;
        return;
    }
    auto bin = static_cast<std::int64_t>((x - spec_.lo) * spec_.nbins / (spec_.hi - spec_.lo));
    // Rounding can push a value just below hi into bin nbins.
    if (bin >= spec_.nbins) bin = spec_.nbins - 1;
    ++counts_[static_cast<std::size_t>(bin)];
}

void Histogram::merge(const Histogram& other) {
    if (spec_ != other.spec_)
        throw std::invalid_argument("histogram merge: spec mismatch");
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
    underflow_ += other.underflow_;
    overflow_ += other.overflow_;
    nan_count_ += other.nan_count_;
}

std::int64_t Histogram::total() const {
    return std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0}) + underflow_ +
           overflow_ + nan_count_;
}

Histogram merge(const Histogram& a, const Histogram& b) {
    Histogram out = a;
    out.merge(b);
    return out;
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::string to_csv(const Histogram& h) {
    const HistogramSpec& s = h.spec();
    const auto edge = [&](int i) {
        if (i == 0) return s.lo;
        if (i == s.nbins) return s.hi;
        return s.lo + (s.hi - s.lo) * i / s.nbins;
    };
    std::string out = "bin_lo,bin_hi,count\n";
    out += "-inf," + format_double(s.lo) + "," + std::to_string(h.underflow()) + "\n";
    for (int i = 0; i < s.nbins; ++i) {
        out += format_double(edge(i)) + "," + format_double(edge(i + 1)) + "," +
               std::to_string(h.counts()[static_cast<std::size_t>(i)]) + "\n";
    }
    out += format_double(s.hi) + ",+inf," + std::to_string(h.overflow()) + "\n";
    out += "nan,nan," + std::to_string(h.nan_count()) + "\n";
    return out;
}

}  // namespace nf2

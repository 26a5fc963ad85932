// SPDX-License-Identifier: Apache-2.0
//
// Series utilities for reading peak structure out of mean/variance traces.
// Equal-valued plateaus are compressed and reported at their last index; an
// optional two-sided prominence threshold filters out the small step-parity
// jitter that rides on the physical oscillation.

#ifndef LQW_ANALYSIS_HPP
#define LQW_ANALYSIS_HPP

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace lqw {

namespace detail {

// (value, last index) runs of consecutive equal entries
template <typename Scalar>
std::vector<std::pair<Scalar, std::size_t>> compress_runs(std::span<const Scalar> series) {
    std::vector<std::pair<Scalar, std::size_t>> runs;
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (!runs.empty() && series[i] == runs.back().first)
            runs.back().second = i;
        else
            runs.emplace_back(series[i], i);
    }
    return runs;
}

// prominence of run k as a maximum: drop to the lowest value reached on each
// side before a higher value appears (series ends count as full drops)
template <typename Scalar>
Scalar max_prominence(const std::vector<std::pair<Scalar, std::size_t>>& runs, std::size_t k) {
    const Scalar v = runs[k].first;
    Scalar left = v, right = v;
    for (std::size_t j = k; j-- > 0 && runs[j].first <= v;) left = std::min(left, runs[j].first);
    for (std::size_t j = k + 1; j < runs.size() && runs[j].first <= v; ++j)
        right = std::min(right, runs[j].first);
    return std::min(v - left, v - right);
}

template <typename Scalar>
Scalar min_prominence_depth(const std::vector<std::pair<Scalar, std::size_t>>& runs, std::size_t k) {
    const Scalar v = runs[k].first;
    Scalar left = v, right = v;
    for (std::size_t j = k; j-- > 0 && runs[j].first >= v;) left = std::max(left, runs[j].first);
    for (std::size_t j = k + 1; j < runs.size() && runs[j].first >= v; ++j)
        right = std::max(right, runs[j].first);
    return std::min(left - v, right - v);
}

}  // namespace detail

/// Index of the first strict local extremum (maximum or minimum) relative to
/// both neighbouring runs, skipping any initial plateau. With min_prominence
/// > 0 only extrema whose two-sided prominence reaches the threshold count.
template <typename Scalar = double>
std::optional<std::size_t> first_extremum_step(std::span<const Scalar> series,
                                               Scalar min_prominence = Scalar(0)) {
    if (series.size() < 3)
        throw std::domain_error("first_extremum_step: series must have at least 3 entries");
    const auto runs = detail::compress_runs(series);
    for (std::size_t k = 1; k + 1 < runs.size(); ++k) {
        const Scalar v = runs[k].first;
        const bool is_max = v > runs[k - 1].first && v > runs[k + 1].first;
        const bool is_min = v < runs[k - 1].first && v < runs[k + 1].first;
        if (!is_max && !is_min) continue;
        if (min_prominence > Scalar(0)) {
            const Scalar prom = is_max ? detail::max_prominence(runs, k)
                                       : detail::min_prominence_depth(runs, k);
            if (prom < min_prominence) continue;
        }
        return runs[k].second;
    }
    return std::nullopt;
}

/// Indices of strict local maxima (plateaus reported at their last index)
/// with two-sided prominence >= min_prominence.
template <typename Scalar = double>
std::vector<std::size_t> local_maxima(std::span<const Scalar> series,
                                      Scalar min_prominence = Scalar(0)) {
    std::vector<std::size_t> out;
    if (series.size() < 3) return out;
    const auto runs = detail::compress_runs(series);
    for (std::size_t k = 1; k + 1 < runs.size(); ++k) {
        if (runs[k].first > runs[k - 1].first && runs[k].first > runs[k + 1].first &&
            detail::max_prominence(runs, k) >= min_prominence)
            out.push_back(runs[k].second);
    }
    return out;
}

/// Mean spacing between consecutive detected maxima; absent with < 2 peaks.
template <typename Scalar = double>
std::optional<Scalar> mean_peak_spacing(std::span<const Scalar> series, Scalar min_prominence) {
    const auto peaks = local_maxima(series, min_prominence);
    if (peaks.size() < 2) return std::nullopt;
    return Scalar(peaks.back() - peaks.front()) / Scalar(peaks.size() - 1);
}

/// Peak-to-peak range over the inclusive index window [first, last].
template <typename Scalar = double>
Scalar series_range(std::span<const Scalar> series, std::size_t first, std::size_t last) {
    if (first > last || last >= series.size())
        throw std::domain_error("series_range: window outside series");
    Scalar lo = series[first], hi = series[first];
    for (std::size_t i = first + 1; i <= last; ++i) {
        lo = std::min(lo, series[i]);
        hi = std::max(hi, series[i]);
    }
    return hi - lo;
}

}  // namespace lqw

#endif  // LQW_ANALYSIS_HPP

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "csivid/csi.hpp"

namespace csivid {

/// One video-frame timestamp on the shared timeline.
struct FrameIndexEntry {
    std::int64_t frame_id = 0;
    std::int64_t timestamp_us = 0;
};

/// K consecutive resampled amplitude measurements matched to one frame.
/// `amplitudes` is K x n_tx x n_rx x n_c, measurement-major.
struct CsiWindow {
    std::int64_t frame_id = 0;
    std::int64_t start_timestamp_us = 0;
    int k = 0;
    int n_tx = 0;
    int n_rx = 0;
    int n_c = 0;
    std::vector<double> amplitudes;

    double at(int m, int tx, int rx, int c) const {
        const std::size_t per = static_cast<std::size_t>(n_tx) * n_rx * n_c;
        return amplitudes[per * static_cast<std::size_t>(m) +
                          (static_cast<std::size_t>(tx) * n_rx + rx) * n_c + c];
    }
};

/// Network-ready input plane stack: one channel per antenna pair (tx-major),
/// each channel a time-by-subcarrier plane resized to H_in x W_in.
struct InputTensor {
    std::int64_t frame_id = 0;
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> data;  // channels * height * width, row-major

    double at(int c, int y, int x) const {
        return data[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
};

/// Hampel outlier cleaning, applied independently to every
/// (tx, rx, subcarrier) amplitude series. A sample whose amplitude deviates
/// from the centered sliding-window median by more than
/// n_mads * 1.4826 * MAD is replaced by linear interpolation (in time, re and
/// im separately) between the nearest non-outlier neighbors. Flags are
/// decided on the original series in one pass; windows are truncated at the
/// series ends; the even-count median is the mean of the two middle values.
/// Timestamps are unchanged.
CsiSequence remove_outliers(const CsiSequence& seq, int window_len = 11, double n_mads = 3.0);

/// Per-point Hampel flags for one amplitude series; exposed so callers and
/// tests can inspect the decision independently of the replacement step.
std::vector<bool> hampel_flags(const std::vector<double>& series, int window_len, double n_mads);

/// Linear resampling onto the exact integer-microsecond grid
/// t0 + k * round(1e6 / target_rate_hz), k = 0.. while the grid point does
/// not exceed the last input timestamp. Complex values are interpolated per
/// component between bracketing samples; grid points that hit an input
/// timestamp take that sample unchanged.
CsiSequence resample_uniform(const CsiSequence& seq, double target_rate_hz);

enum class WindowAlignment {
    kFirstAtOrAfter,   // the K consecutive samples with smallest timestamps >= T
    kUniformSubsample  // K samples spread uniformly over [T, T + frame period)
};

/// Matches each frame with K resampled measurements. Frames whose window
/// would overrun the stream end are dropped. `frame_period_us` is only used
/// by the kUniformSubsample alignment.
std::vector<CsiWindow> pair_windows(const CsiSequence& resampled,
                                    const std::vector<FrameIndexEntry>& frames, int k,
                                    WindowAlignment alignment = WindowAlignment::kFirstAtOrAfter,
                                    std::int64_t frame_period_us = 0);

/// Bilinear resize (corner-aligned) of each antenna pair's K x n_c plane to
/// H_in x W_in. Channel order is tx-major, then rx.
InputTensor to_input_tensor(const CsiWindow& window, int h_in, int w_in);

/// Chronological split: first floor(n * train_fraction) items train, the
/// rest test. No shuffling across the boundary.
std::pair<std::size_t, std::size_t> split_sizes(std::size_t n, double train_fraction);

template <typename T>
std::pair<std::vector<T>, std::vector<T>> split_dataset(const std::vector<T>& pairs,
                                                        double train_fraction) {
    const auto [n_train, n_test] = split_sizes(pairs.size(), train_fraction);
    std::vector<T> train(pairs.begin(), pairs.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<T> test(pairs.begin() + static_cast<std::ptrdiff_t>(n_train), pairs.end());
    (void)n_test;
    return {std::move(train), std::move(test)};
}

}  // namespace csivid

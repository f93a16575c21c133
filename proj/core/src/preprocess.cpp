// SPDX-License-Identifier: Apache-2.0
#include "csivid/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace csivid {

namespace {

constexpr double kMadScale = 1.4826;  // consistency factor for Gaussian spread

double median_of(std::vector<double>& buf) {
    const std::size_t n = buf.size();
    const std::size_t mid = n / 2;
    std::nth_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(mid), buf.end());
    double hi = buf[mid];
    if (n % 2 == 1) return hi;
    const double lo = *std::max_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
}

}  // namespace

std::vector<bool> hampel_flags(const std::vector<double>& series, int window_len, double n_mads) {
    const int n = static_cast<int>(series.size());
    const int half = window_len / 2;
    std::vector<bool> flags(static_cast<std::size_t>(n), false);
    std::vector<double> window, dev;
    for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - half);
        const int hi = std::min(n - 1, i + half);
        window.assign(series.begin() + lo, series.begin() + hi + 1);
        const double med = median_of(window);
        dev.resize(window.size());
        for (std::size_t j = 0; j < window.size(); ++j) {
            dev[j] = std::abs(series[static_cast<std::size_t>(lo) + j] - med);
        }
        const double mad = median_of(dev);
        if (std::abs(series[static_cast<std::size_t>(i)] - med) > n_mads * kMadScale * mad) {
            flags[static_cast<std::size_t>(i)] = true;
        }
    }
    return flags;
}

CsiSequence remove_outliers(const CsiSequence& seq, int window_len, double n_mads) {
    if (window_len < 3 || window_len % 2 == 0) {
        throw DimensionMismatch("window_len must be odd and >= 3");
    }
    const int n = static_cast<int>(seq.records.size());
    if (n < window_len) {
        throw SequenceTooShort("sequence has " + std::to_string(n) + " records, need >= " +
                               std::to_string(window_len));
    }
    validate_sequence(seq);

    CsiSequence out = seq;
    const int per = seq.header.samples_per_record();
    std::vector<double> series(static_cast<std::size_t>(n));
    for (int e = 0; e < per; ++e) {
        for (int i = 0; i < n; ++i) {
            series[static_cast<std::size_t>(i)] =
                std::abs(seq.records[static_cast<std::size_t>(i)].values[static_cast<std::size_t>(e)]);
        }
        const auto flags = hampel_flags(series, window_len, n_mads);
        for (int i = 0; i < n; ++i) {
            if (!flags[static_cast<std::size_t>(i)]) continue;
            // nearest clean neighbors on each side
            int left = i - 1;
            while (left >= 0 && flags[static_cast<std::size_t>(left)]) --left;
            int right = i + 1;
            while (right < n && flags[static_cast<std::size_t>(right)]) ++right;
            Complex v;
            if (left >= 0 && right < n) {
                const auto& a = seq.records[static_cast<std::size_t>(left)];
                const auto& b = seq.records[static_cast<std::size_t>(right)];
                const double t = static_cast<double>(seq.records[static_cast<std::size_t>(i)].timestamp_us -
                                                     a.timestamp_us) /
                                 static_cast<double>(b.timestamp_us - a.timestamp_us);
                const Complex va = a.values[static_cast<std::size_t>(e)];
                const Complex vb = b.values[static_cast<std::size_t>(e)];
                v = Complex(va.real() + t * (vb.real() - va.real()),
                            va.imag() + t * (vb.imag() - va.imag()));
            } else if (left >= 0) {
                v = seq.records[static_cast<std::size_t>(left)].values[static_cast<std::size_t>(e)];
            } else if (right < n) {
                v = seq.records[static_cast<std::size_t>(right)].values[static_cast<std::size_t>(e)];
            } else {
                continue;  // every sample flagged; nothing clean to interpolate from
            }
            out.records[static_cast<std::size_t>(i)].values[static_cast<std::size_t>(e)] = v;
        }
    }
    return out;
}

CsiSequence resample_uniform(const CsiSequence& seq, double target_rate_hz) {
    if (seq.records.size() < 2) throw SequenceTooShort("resampling needs at least 2 records");
    if (!(target_rate_hz > 0)) throw DimensionMismatch("target rate must be positive");
    validate_sequence(seq);

    const std::int64_t step_us = std::llround(1e6 / target_rate_hz);
    if (step_us < 1) throw DimensionMismatch("target rate too high for microsecond grid");

    const std::int64_t t0 = seq.records.front().timestamp_us;
    const std::int64_t t_last = seq.records.back().timestamp_us;
    const std::int64_t n_out = (t_last - t0) / step_us + 1;
    const int per = seq.header.samples_per_record();

    CsiSequence out;
    out.header = seq.header;
    out.header.nominal_rate_hz = target_rate_hz;
    out.records.reserve(static_cast<std::size_t>(n_out));

    std::size_t seg = 0;  // current bracketing segment [seg, seg+1]
    for (std::int64_t k = 0; k < n_out; ++k) {
        const std::int64_t t = t0 + k * step_us;
        while (seg + 2 < seq.records.size() && seq.records[seg + 1].timestamp_us < t) ++seg;
        const auto& a = seq.records[seg];
        const auto& b = seq.records[seg + 1];

        CsiMeasurement rec;
        rec.timestamp_us = t;
        rec.n_tx = seq.header.n_tx;
        rec.n_rx = seq.header.n_rx;
        rec.n_c = seq.header.n_c;
        rec.values.resize(static_cast<std::size_t>(per));
        if (t == a.timestamp_us) {
            rec.values = a.values;
        } else if (t == b.timestamp_us) {
            rec.values = b.values;
        } else {
            const double w = static_cast<double>(t - a.timestamp_us) /
                             static_cast<double>(b.timestamp_us - a.timestamp_us);
            for (int e = 0; e < per; ++e) {
                const Complex va = a.values[static_cast<std::size_t>(e)];
                const Complex vb = b.values[static_cast<std::size_t>(e)];
                rec.values[static_cast<std::size_t>(e)] =
                    Complex(va.real() + w * (vb.real() - va.real()),
                            va.imag() + w * (vb.imag() - va.imag()));
            }
        }
        out.records.push_back(std::move(rec));
    }
    return out;
}

std::vector<CsiWindow> pair_windows(const CsiSequence& resampled,
                                    const std::vector<FrameIndexEntry>& frames, int k,
                                    WindowAlignment alignment, std::int64_t frame_period_us) {
    if (resampled.records.empty() || frames.empty()) {
        throw EmptyInputs("pair_windows needs a non-empty CSI sequence and frame index");
    }
    if (k < 1) throw DimensionMismatch("K must be >= 1");
    if (alignment == WindowAlignment::kUniformSubsample && frame_period_us <= 0) {
        throw DimensionMismatch("uniform subsample alignment needs a positive frame period");
    }

    const auto& recs = resampled.records;
    const int n = static_cast<int>(recs.size());
    const int per = resampled.header.samples_per_record();

    std::vector<CsiWindow> windows;
    windows.reserve(frames.size());
    for (const auto& frame : frames) {
        const auto it = std::lower_bound(
            recs.begin(), recs.end(), frame.timestamp_us,
            [](const CsiMeasurement& r, std::int64_t t) { return r.timestamp_us < t; });
        const int first = static_cast<int>(it - recs.begin());

        std::vector<int> picks;
        picks.reserve(static_cast<std::size_t>(k));
        if (alignment == WindowAlignment::kFirstAtOrAfter) {
            if (first + k > n) continue;  // window would overrun the stream
            for (int i = 0; i < k; ++i) picks.push_back(first + i);
        } else {
            // samples within [T, T + period); evenly spread indices, K of them
            const std::int64_t t_end = frame.timestamp_us + frame_period_us;
            int last = first;
            while (last < n && recs[static_cast<std::size_t>(last)].timestamp_us < t_end) ++last;
            const int span = last - first;
            if (span < k) continue;
            for (int i = 0; i < k; ++i) {
                const int off =
                    (k == 1) ? 0
                             : static_cast<int>(std::llround(static_cast<double>(i) * (span - 1) /
                                                             (k - 1)));
                picks.push_back(first + off);
            }
        }

        CsiWindow w;
        w.frame_id = frame.frame_id;
        w.start_timestamp_us = recs[static_cast<std::size_t>(picks.front())].timestamp_us;
        w.k = k;
        w.n_tx = resampled.header.n_tx;
        w.n_rx = resampled.header.n_rx;
        w.n_c = resampled.header.n_c;
        w.amplitudes.resize(static_cast<std::size_t>(k) * per);
        for (int m = 0; m < k; ++m) {
            const auto& rec = recs[static_cast<std::size_t>(picks[static_cast<std::size_t>(m)])];
            for (int e = 0; e < per; ++e) {
                w.amplitudes[static_cast<std::size_t>(m) * per + static_cast<std::size_t>(e)] =
                    std::abs(rec.values[static_cast<std::size_t>(e)]);
            }
        }
        windows.push_back(std::move(w));
    }
    return windows;
}

InputTensor to_input_tensor(const CsiWindow& window, int h_in, int w_in) {
    if (h_in < 2 || w_in < 2) throw DimensionMismatch("input tensor size must be >= 2x2");

    InputTensor t;
    t.frame_id = window.frame_id;
    t.channels = window.n_tx * window.n_rx;
    t.height = h_in;
    t.width = w_in;
    t.data.resize(static_cast<std::size_t>(t.channels) * h_in * w_in);

    const int src_h = window.k;
    const int src_w = window.n_c;
    const std::size_t per = static_cast<std::size_t>(window.n_tx) * window.n_rx * window.n_c;

    // corner-aligned bilinear: identical sizes reproduce the source exactly
    const double sy = (h_in > 1 && src_h > 1) ? static_cast<double>(src_h - 1) / (h_in - 1) : 0.0;
    const double sx = (w_in > 1 && src_w > 1) ? static_cast<double>(src_w - 1) / (w_in - 1) : 0.0;

    for (int tx = 0; tx < window.n_tx; ++tx) {
        for (int rx = 0; rx < window.n_rx; ++rx) {
            const int ch = tx * window.n_rx + rx;
            const std::size_t plane_off = (static_cast<std::size_t>(tx) * window.n_rx + rx) *
                                          static_cast<std::size_t>(window.n_c);
            for (int y = 0; y < h_in; ++y) {
                const double fy = y * sy;
                const int y0 = std::min(static_cast<int>(fy), src_h - 1);
                const int y1 = std::min(y0 + 1, src_h - 1);
                const double wy = fy - y0;
                for (int x = 0; x < w_in; ++x) {
                    const double fx = x * sx;
                    const int x0 = std::min(static_cast<int>(fx), src_w - 1);
                    const int x1 = std::min(x0 + 1, src_w - 1);
                    const double wx = fx - x0;
                    const auto src = [&](int m, int c) {
                        return window.amplitudes[per * static_cast<std::size_t>(m) + plane_off +
                                                 static_cast<std::size_t>(c)];
                    };
                    const double v00 = src(y0, x0), v01 = src(y0, x1);
                    const double v10 = src(y1, x0), v11 = src(y1, x1);
                    const double top = v00 + wx * (v01 - v00);
                    const double bot = v10 + wx * (v11 - v10);
                    t.data[(static_cast<std::size_t>(ch) * h_in + y) * w_in + x] =
                        top + wy * (bot - top);
                }
            }
        }
    }
    return t;
}

std::pair<std::size_t, std::size_t> split_sizes(std::size_t n, double train_fraction) {
    if (n == 0) throw EmptyInputs("cannot split an empty dataset");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw DimensionMismatch("train fraction must lie in (0, 1)");
    }
    const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * train_fraction));
    return {n_train, n - n_train};
}

}  // namespace csivid

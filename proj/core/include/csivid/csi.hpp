// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "csivid/errors.hpp"

namespace csivid {

using Complex = std::complex<double>;

/// Stream-level CSI dimensions and nominal sampling rate.
struct CsiHeader {
    double nominal_rate_hz = 100.0;
    int n_tx = 3;
    int n_rx = 3;
    int n_c = 30;

    int samples_per_record() const { return n_tx * n_rx * n_c; }
    bool operator==(const CsiHeader&) const = default;
};

/// One timestamped channel matrix. `values` is laid out tx-major, then rx,
/// then subcarrier: index = (tx * n_rx + rx) * n_c + c.
struct CsiMeasurement {
    std::int64_t timestamp_us = 0;
    int n_tx = 0;
    int n_rx = 0;
    int n_c = 0;
    std::vector<Complex> values;

    Complex& at(int tx, int rx, int c) { return values[(static_cast<std::size_t>(tx) * n_rx + rx) * n_c + c]; }
    const Complex& at(int tx, int rx, int c) const {
        return values[(static_cast<std::size_t>(tx) * n_rx + rx) * n_c + c];
    }
    bool operator==(const CsiMeasurement&) const = default;
};

/// A timestamp-ordered run of measurements sharing one header.
struct CsiSequence {
    CsiHeader header;
    std::vector<CsiMeasurement> records;

    bool operator==(const CsiSequence&) const = default;
};

/// Element-wise modulus of a measurement, same layout as the source values.
struct AmplitudeMeasurement {
    std::int64_t timestamp_us = 0;
    int n_tx = 0;
    int n_rx = 0;
    int n_c = 0;
    std::vector<double> amplitudes;

    double at(int tx, int rx, int c) const {
        return amplitudes[(static_cast<std::size_t>(tx) * n_rx + rx) * n_c + c];
    }
};

/// |C| per element; shape and timestamp preserved.
AmplitudeMeasurement amplitude(const CsiMeasurement& m);

/// Checks the CsiSequence invariants (shared dimensions, strictly increasing
/// timestamps). Throws DimensionMismatch or NonMonotonicTimestamps.
void validate_sequence(const CsiSequence& seq);

}  // namespace csivid

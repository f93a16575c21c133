// SPDX-License-Identifier: Apache-2.0
#include "csivid/csil.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "csivid/binio.hpp"

namespace csivid {

AmplitudeMeasurement amplitude(const CsiMeasurement& m) {
    AmplitudeMeasurement out;
    out.timestamp_us = m.timestamp_us;
    out.n_tx = m.n_tx;
    out.n_rx = m.n_rx;
    out.n_c = m.n_c;
    out.amplitudes.resize(m.values.size());
    for (std::size_t i = 0; i < m.values.size(); ++i) out.amplitudes[i] = std::abs(m.values[i]);
    return out;
}

void validate_sequence(const CsiSequence& seq) {
    const auto& h = seq.header;
    if (h.n_tx < 1 || h.n_rx < 1 || h.n_c < 1) {
        throw DimensionMismatch("header dimensions must be positive");
    }
    std::int64_t prev = 0;
    bool first = true;
    for (std::size_t i = 0; i < seq.records.size(); ++i) {
        const auto& r = seq.records[i];
        if (r.n_tx != h.n_tx || r.n_rx != h.n_rx || r.n_c != h.n_c ||
            r.values.size() != static_cast<std::size_t>(h.samples_per_record())) {
            throw DimensionMismatch("record " + std::to_string(i) + " disagrees with header dimensions");
        }
        if (!first && r.timestamp_us <= prev) {
            throw NonMonotonicTimestamps("record " + std::to_string(i) + " timestamp " +
                                         std::to_string(r.timestamp_us) + " not after " +
                                         std::to_string(prev));
        }
        prev = r.timestamp_us;
        first = false;
    }
}

std::size_t csil_record_size(const CsiHeader& header) {
    return 8 + static_cast<std::size_t>(header.samples_per_record()) * 8;
}

CsiSequence parse_csil(std::span<const std::uint8_t> bytes) {
    ByteReader in(bytes);
    if (in.remaining() < 4 || std::memcmp(bytes.data(), kCsilMagic, 4) != 0) {
        throw BadMagic("not a CSIL stream");
    }
    if (in.remaining() < kCsilHeaderSize) throw TruncatedRecord("truncated CSIL header");
    in.read_string(4);  // magic, checked above
    const std::uint16_t version = in.read_u16();
    if (version != kCsilVersion) {
        throw BadMagic("unsupported CSIL version " + std::to_string(version));
    }
    CsiSequence seq;
    seq.header.n_tx = in.read_u8();
    seq.header.n_rx = in.read_u8();
    seq.header.n_c = in.read_u16();
    seq.header.nominal_rate_hz = in.read_f64();
    if (seq.header.n_tx < 1 || seq.header.n_rx < 1 || seq.header.n_c < 1) {
        throw DimensionMismatch("CSIL header has zero-sized dimension");
    }

    const int n = seq.header.samples_per_record();
    const std::size_t record_size = csil_record_size(seq.header);
    if (in.remaining() % record_size != 0) {
        throw TruncatedRecord("stream ends mid-record (payload " + std::to_string(in.remaining()) +
                              " bytes, record size " + std::to_string(record_size) + ")");
    }
    seq.records.reserve(in.remaining() / record_size);

    std::int64_t prev = 0;
    while (!in.at_end()) {
        CsiMeasurement rec;
        rec.timestamp_us = static_cast<std::int64_t>(in.read_u64());
        rec.n_tx = seq.header.n_tx;
        rec.n_rx = seq.header.n_rx;
        rec.n_c = seq.header.n_c;
        rec.values.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const double re = in.read_f32();
            const double im = in.read_f32();
            rec.values[static_cast<std::size_t>(i)] = Complex(re, im);
        }
        if (!seq.records.empty() && rec.timestamp_us <= prev) {
            throw NonMonotonicTimestamps("record " + std::to_string(seq.records.size()) +
                                         " timestamp not strictly increasing");
        }
        prev = rec.timestamp_us;
        seq.records.push_back(std::move(rec));
    }
    return seq;
}

std::vector<std::uint8_t> write_csil(const CsiSequence& seq) {
    validate_sequence(seq);
    if (seq.header.n_tx > 255 || seq.header.n_rx > 255 || seq.header.n_c > 65535) {
        throw DimensionMismatch("header dimensions exceed CSIL field width");
    }
    ByteWriter out;
    out.write_raw(kCsilMagic, 4);
    out.write_u16(kCsilVersion);
    out.write_u8(static_cast<std::uint8_t>(seq.header.n_tx));
    out.write_u8(static_cast<std::uint8_t>(seq.header.n_rx));
    out.write_u16(static_cast<std::uint16_t>(seq.header.n_c));
    out.write_f64(seq.header.nominal_rate_hz);
    for (const auto& rec : seq.records) {
        out.write_u64(static_cast<std::uint64_t>(rec.timestamp_us));
        for (const auto& v : rec.values) {
            out.write_f32(static_cast<float>(v.real()));
            out.write_f32(static_cast<float>(v.imag()));
        }
    }
    return out.take();
}

CsiSequence read_csil_file(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    return parse_csil(bytes);
}

void write_csil_file(const std::filesystem::path& path, const CsiSequence& seq) {
    write_file_atomic(path, write_csil(seq));
}

}  // namespace csivid

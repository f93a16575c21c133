// SPDX-License-Identifier: Apache-2.0
#include "csivid/checkpoint.hpp"

#include <cstring>

#include "csivid/binio.hpp"

namespace csivid {

namespace {

void write_name(ByteWriter& out, const std::string& name) {
    if (name.size() > 0xffff) throw IoError("checkpoint name too long");
    out.write_u16(static_cast<std::uint16_t>(name.size()));
    out.write_string(name);
}

std::string read_name(ByteReader& in) { return in.read_string(in.read_u16()); }

void write_tensor(ByteWriter& out, const std::string& name, const Tensor& t) {
    write_name(out, name);
    if (t.shape.size() > 255) throw IoError("checkpoint tensor rank too large");
    out.write_u8(static_cast<std::uint8_t>(t.shape.size()));
    for (const int d : t.shape) {
        if (d < 0) throw ShapeMismatch("negative dimension in checkpoint tensor " + name);
        out.write_u32(static_cast<std::uint32_t>(d));
    }
    for (const double v : t.data) out.write_f64(v);
}

std::pair<std::string, Tensor> read_tensor(ByteReader& in) {
    const std::string name = read_name(in);
    const int ndim = in.read_u8();
    std::vector<int> shape(static_cast<std::size_t>(ndim));
    for (auto& d : shape) d = static_cast<int>(in.read_u32());
    Tensor t(shape);
    for (auto& v : t.data) v = in.read_f64();
    return {name, std::move(t)};
}

void read_array(ByteReader& in, std::vector<double>& dst, std::size_t n) {
    dst.resize(n);
    for (auto& v : dst) v = in.read_f64();
}

}  // namespace

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ckpt) {
    ByteWriter out;
    out.write_raw(kCheckpointMagic, 4);
    out.write_u16(kCheckpointVersion);

    out.write_u32(static_cast<std::uint32_t>(ckpt.params.params.size()));
    for (const auto& [name, p] : ckpt.params.params) write_tensor(out, name, p);

    out.write_u8(ckpt.adam ? 1 : 0);
    if (ckpt.adam) {
        out.write_u64(static_cast<std::uint64_t>(ckpt.adam->t));
        for (const auto& [name, p] : ckpt.params.params) {
            const auto mi = ckpt.adam->m.find(name);
            const auto vi = ckpt.adam->v.find(name);
            if (mi == ckpt.adam->m.end() || vi == ckpt.adam->v.end() ||
                mi->second.size() != p.data.size() || vi->second.size() != p.data.size()) {
                throw ShapeMismatch("optimizer state does not cover parameter " + name);
            }
            for (const double v : mi->second) out.write_f64(v);
            for (const double v : vi->second) out.write_f64(v);
        }
    }

    out.write_u32(static_cast<std::uint32_t>(ckpt.extra.size()));
    for (const auto& [name, t] : ckpt.extra) write_tensor(out, name, t);

    out.write_u32(static_cast<std::uint32_t>(ckpt.meta.size()));
    for (const auto& [k, v] : ckpt.meta) {
        write_name(out, k);
        if (v.size() > 0xffff) throw IoError("checkpoint metadata value too long");
        out.write_u16(static_cast<std::uint16_t>(v.size()));
        out.write_string(v);
    }
    return out.take();
}

Checkpoint parse_checkpoint(std::span<const std::uint8_t> bytes) {
    ByteReader in(bytes);
    char magic[4];
    if (in.remaining() < 4) throw BadMagic("checkpoint stream shorter than its magic");
    in.read_raw(magic, 4);
    if (std::memcmp(magic, kCheckpointMagic, 4) != 0) {
        throw BadMagic("not a checkpoint stream");
    }
    const auto version = in.read_u16();
    if (version != kCheckpointVersion) {
        throw BadMagic("unsupported checkpoint version " + std::to_string(version));
    }

    Checkpoint ckpt;
    const auto n_params = in.read_u32();
    for (std::uint32_t i = 0; i < n_params; ++i) {
        auto [name, t] = read_tensor(in);
        ckpt.params.params.emplace(std::move(name), std::move(t));
    }

    if (in.read_u8()) {
        AdamState adam;
        adam.t = static_cast<std::int64_t>(in.read_u64());
        for (const auto& [name, p] : ckpt.params.params) {
            read_array(in, adam.m[name], p.data.size());
            read_array(in, adam.v[name], p.data.size());
        }
        ckpt.adam = std::move(adam);
    }

    const auto n_extra = in.read_u32();
    for (std::uint32_t i = 0; i < n_extra; ++i) {
        auto [name, t] = read_tensor(in);
        ckpt.extra.emplace(std::move(name), std::move(t));
    }

    const auto n_meta = in.read_u32();
    for (std::uint32_t i = 0; i < n_meta; ++i) {
        const auto k = read_name(in);
        const auto v = in.read_string(in.read_u16());
        ckpt.meta.emplace(k, v);
    }

    if (!in.at_end()) throw TruncatedRecord("trailing bytes after checkpoint payload");
    return ckpt;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    write_file_atomic(path, serialize_checkpoint(ckpt));
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
    return parse_checkpoint(read_file(path));
}

ParamSetF to_float(const ParamSet& params) {
    ParamSetF out;
    for (const auto& [name, p] : params.params) {
        TensorF t(p.shape);
        for (std::size_t i = 0; i < p.data.size(); ++i) t.data[i] = static_cast<float>(p.data[i]);
        out.params.emplace(name, std::move(t));
    }
    return out;
}

ParamSet to_double(const ParamSetF& params) {
    ParamSet out;
    for (const auto& [name, p] : params.params) {
        Tensor t(p.shape);
        for (std::size_t i = 0; i < p.data.size(); ++i) t.data[i] = p.data[i];
        out.params.emplace(name, std::move(t));
    }
    return out;
}

AdamStateF to_float(const AdamState& state) {
    AdamStateF out;
    out.t = state.t;
    for (const auto& [name, arr] : state.m) {
        auto& dst = out.m[name];
        dst.assign(arr.begin(), arr.end());
    }
    for (const auto& [name, arr] : state.v) {
        auto& dst = out.v[name];
        dst.assign(arr.begin(), arr.end());
    }
    return out;
}

AdamState to_double(const AdamStateF& state) {
    AdamState out;
    out.t = state.t;
    for (const auto& [name, arr] : state.m) {
        auto& dst = out.m[name];
        dst.assign(arr.begin(), arr.end());
    }
    for (const auto& [name, arr] : state.v) {
        auto& dst = out.v[name];
        dst.assign(arr.begin(), arr.end());
    }
    return out;
}

}  // namespace csivid

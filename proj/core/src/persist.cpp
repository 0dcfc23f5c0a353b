#include "droso/persist.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "droso/error.hpp"

namespace fs = std::filesystem;

namespace droso {

// Layout (all integers little-endian):
//   0  char[4] "DRSN"       4  u8 version      5  u8 quantized   6  u16 reserved
//   8  u32 input length     12 u32 activations 16 u32 places     20 u32 models
//   24 u32 radius           28 u64 master seed
//   36 per model: u64 seed, activations x ceil(D/8) bytes of column bitsets
//      (row i -> byte i/8, bit i%8), then either f32 scale + K*P int8 or K*P f32.

namespace {

constexpr char kMagic[4] = {'D', 'R', 'S', 'N'};

class Writer {
public:
    explicit Writer(std::size_t reserve) { bytes_.reserve(reserve); }

    void u8(std::uint8_t v) { bytes_.push_back(v); }
    void u16(std::uint16_t v) { put(v, 2); }
    void u32(std::uint32_t v) { put(v, 4); }
    void u64(std::uint64_t v) { put(v, 8); }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
    void raw(const void* data, std::size_t n) {
        const auto* p = static_cast<const std::uint8_t*>(data);
        bytes_.insert(bytes_.end(), p, p + n);
    }

    std::vector<std::uint8_t> take() { return std::move(bytes_); }

private:
    void put(std::uint64_t v, int n) {
        for (int i = 0; i < n; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    std::vector<std::uint8_t> bytes_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::size_t offset() const noexcept { return pos_; }
    std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

    std::span<const std::uint8_t> take(std::size_t n) {
        if (remaining() < n)
            throw FormatError("truncated model file: need " + std::to_string(n) + " bytes, " +
                                  std::to_string(remaining()) + " left",
                              pos_);
        auto out = bytes_.subspan(pos_, n);
        pos_ += n;
        return out;
    }
    std::uint8_t u8() { return take(1)[0]; }
    std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
    std::uint64_t u64() { return get(8); }
    float f32() { return std::bit_cast<float>(u32()); }

private:
    std::uint64_t get(int n) {
        auto b = take(static_cast<std::size_t>(n));
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(b[static_cast<std::size_t>(i)]) << (8 * i);
        return v;
    }
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

std::size_t bitset_bytes(std::size_t input_length) { return (input_length + 7) / 8; }

std::uint32_t narrow(std::size_t v, const char* what) {
    if (v > 0xFFFFFFFFu) throw ParameterError(std::string(what) + " does not fit the model file format");
    return static_cast<std::uint32_t>(v);
}

}  // namespace

std::size_t serialized_size(std::size_t models, std::size_t input_length, std::size_t activations,
                            std::size_t places, bool quantized) noexcept {
    const std::size_t payload = quantized ? 4 + activations * places : 4 * activations * places;
    return kHeaderBytes + models * (8 + bitset_bytes(input_length) * activations + payload);
}

std::vector<std::uint8_t> serialize(const Ensemble& ensemble) {
    ensemble.validate();
    const DrosoNet& first = ensemble.models.front();
    const bool quantized = first.quantized();
    for (const DrosoNet& m : ensemble.models)
        if (m.quantized() != quantized) throw DataError("cannot save an ensemble mixing float and int8 members");

    const std::size_t d = first.input_length();
    const std::size_t k = first.activation_count();
    const std::size_t p = first.places();
    Writer w(serialized_size(ensemble.models.size(), d, k, p, quantized));
    w.raw(kMagic, 4);
    w.u8(kFormatVersion);
    w.u8(quantized ? 1 : 0);
    w.u16(0);
    w.u32(narrow(d, "input length"));
    w.u32(narrow(k, "activation count"));
    w.u32(narrow(p, "place count"));
    w.u32(narrow(ensemble.models.size(), "model count"));
    w.u32(narrow(ensemble.radius, "radius"));
    w.u64(ensemble.master_seed);

    std::vector<std::uint8_t> column(bitset_bytes(d));
    for (const DrosoNet& m : ensemble.models) {
        w.u64(m.seed());
        for (std::size_t c = 0; c < k; ++c) {
            std::fill(column.begin(), column.end(), std::uint8_t{0});
            for (std::uint32_t row : m.projection().column(c))
                column[row / 8] = static_cast<std::uint8_t>(column[row / 8] | (1u << (row % 8)));
            w.raw(column.data(), column.size());
        }
        if (quantized) {
            const QuantizedWeights& q = m.quantized_weights();
            w.f32(q.scale);
            w.raw(q.q.data(), q.q.size());
        } else {
            for (float v : m.float_weights().values) w.f32(v);
        }
    }
    return w.take();
}

Ensemble deserialize(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    const auto magic = r.take(4);
    if (std::memcmp(magic.data(), kMagic, 4) != 0) throw FormatError("bad magic, expected \"DRSN\"", 0);
    const std::uint8_t version = r.u8();
    if (version != kFormatVersion)
        throw UnsupportedVersionError("unsupported model format version " + std::to_string(version), 4);
    const std::uint8_t quantized = r.u8();
    if (quantized > 1) throw FormatError("quantized flag must be 0 or 1", 5);
    if (r.u16() != 0) throw FormatError("reserved header field must be zero", 6);

    const std::size_t d = r.u32();
    const std::size_t k = r.u32();
    const std::size_t p = r.u32();
    const std::size_t n = r.u32();
    if (d == 0) throw FormatError("input length must be positive", 8);
    if (k == 0) throw FormatError("activation count must be positive", 12);
    if (p < 2) throw FormatError("place count must be >= 2", 16);
    if (n == 0) throw FormatError("model count must be positive", 20);

    Ensemble ensemble;
    ensemble.radius = r.u32();
    ensemble.master_seed = r.u64();
    ensemble.models.reserve(n);

    const std::size_t stride = bitset_bytes(d);
    if (stride * k > r.remaining())
        throw FormatError("truncated model file: first projection does not fit", r.offset());
    std::vector<std::vector<std::uint32_t>> columns(k);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t seed = r.u64();
        for (std::size_t c = 0; c < k; ++c) {
            const std::size_t col_offset = r.offset();
            const auto bits = r.take(stride);
            columns[c].clear();
            for (std::size_t row = 0; row < stride * 8; ++row) {
                if (!(bits[row / 8] & (1u << (row % 8)))) continue;
                if (row >= d) throw FormatError("projection bit set beyond the input length", col_offset + row / 8);
                columns[c].push_back(static_cast<std::uint32_t>(row));
            }
            if (columns[c].empty()) throw FormatError("empty projection column", col_offset);
        }
        ProjectionMatrix projection(d, columns);

        const std::size_t payload_offset = r.offset();
        if (quantized) {
            QuantizedWeights q;
            q.rows = k;
            q.cols = p;
            q.scale = r.f32();
            if (!(q.scale > 0.0f) || !std::isfinite(q.scale))
                throw FormatError("quantization scale must be positive and finite", payload_offset);
            if (k > r.remaining() / p)
                throw FormatError("truncated model file: int8 weights do not fit", r.offset());
            const auto raw = r.take(k * p);
            q.q.resize(raw.size());
            std::memcpy(q.q.data(), raw.data(), raw.size());
            for (std::size_t j = 0; j < q.q.size(); ++j)
                if (q.q[j] == -128) throw FormatError("int8 weight outside [-127, 127]", payload_offset + 4 + j);
            ensemble.models.emplace_back(seed, std::move(projection), std::move(q));
        } else {
            if (k > r.remaining() / (4 * p))
                throw FormatError("truncated model file: float weights do not fit", payload_offset);
            WeightMatrix w(k, p);
            for (float& v : w.values) {
                const std::size_t at = r.offset();
                v = r.f32();
                if (!std::isfinite(v)) throw FormatError("non-finite float weight", at);
            }
            ensemble.models.emplace_back(seed, std::move(projection), std::move(w));
        }
    }
    if (r.remaining() != 0)
        throw FormatError(std::to_string(r.remaining()) + " trailing bytes after the last model", r.offset());
    return ensemble;
}

std::size_t save(const Ensemble& ensemble, const fs::path& path) {
    const std::vector<std::uint8_t> bytes = serialize(ensemble);
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            std::error_code ignored;
            fs::remove(tmp, ignored);
            throw IoError("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        std::error_code ignored;
        fs::remove(tmp, ignored);
        throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
    return bytes.size();
}

Ensemble load(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file " + path.string());
    const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return deserialize(bytes);
    } catch (const FormatError&) {
        throw;
    } catch (const Error& e) {
        throw FormatError(path.string() + ": " + e.what(), 0);
    }
}

}  // namespace droso

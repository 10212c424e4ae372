#include "spect/array_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

namespace spect::io {

namespace {

constexpr char kMagic[4] = {'T', 'O', 'M', 'O'};
constexpr uint8_t kVersion = 1;

void put_u32(std::ostream& out, uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

void put_f32(std::ostream& out, float v) { put_u32(out, std::bit_cast<uint32_t>(v)); }

void put_u64(std::ostream& out, uint64_t v) {
    put_u32(out, static_cast<uint32_t>(v & 0xffffffffu));
    put_u32(out, static_cast<uint32_t>(v >> 32));
}

size_t checked_count(const std::vector<uint32_t>& dims) {
    if (dims.empty()) throw DataError("array: dims must be nonempty");
    size_t count = 1;
    for (uint32_t d : dims) {
        if (d == 0) throw DataError("array: zero dimension");
        if (count > std::numeric_limits<size_t>::max() / d)
            throw DataError("array: dimension product overflows");
        count *= d;
    }
    return count;
}

}  // namespace

void write_blob(std::ostream& out, const std::vector<uint32_t>& dims, uint8_t dtype,
                const double* values, size_t count) {
    if (checked_count(dims) != count) throw DataError("array: values length != product(dims)");
    if (dims.size() > 255) throw DataError("array: too many dimensions");
    out.write(kMagic, 4);
    out.put(static_cast<char>(kVersion));
    out.put(static_cast<char>(dtype));
    out.put(static_cast<char>(dims.size()));
    for (uint32_t d : dims) put_u32(out, d);
    if (dtype == kDtypeF32) {
        for (size_t i = 0; i < count; ++i) put_f32(out, static_cast<float>(values[i]));
    } else if (dtype == kDtypeF64) {
        for (size_t i = 0; i < count; ++i) put_u64(out, std::bit_cast<uint64_t>(values[i]));
    } else {
        throw DataError("array: unsupported dtype " + std::to_string(dtype));
    }
}

void read_blob(std::istream& in, const std::string& what, std::vector<uint32_t>& dims,
               uint8_t& dtype, std::vector<double>& values) {
    char magic[4] = {0, 0, 0, 0};
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw DataError(what + ": bad magic, not a TOMO array");
    int version = in.get();
    int dt = in.get();
    int ndim = in.get();
    if (!in) throw DataError(what + ": truncated header");
    if (version != kVersion)
        throw DataError(what + ": unsupported version " + std::to_string(version));
    if (dt != kDtypeF32 && dt != kDtypeF64)
        throw DataError(what + ": unsupported dtype " + std::to_string(dt));
    dtype = static_cast<uint8_t>(dt);
    dims.resize(static_cast<size_t>(ndim));
    for (int i = 0; i < ndim; ++i) dims[static_cast<size_t>(i)] = get_u32(in);
    if (!in) throw DataError(what + ": truncated dims");
    size_t count = checked_count(dims);
    size_t elem = dtype == kDtypeF32 ? 4 : 8;
    std::vector<char> payload(count * elem);
    in.read(payload.data(), static_cast<std::streamsize>(payload.size()));
    size_t got = static_cast<size_t>(in.gcount());
    if (got != payload.size())
        throw DataError(what + ": truncated payload, expected " + std::to_string(payload.size()) +
                        " bytes, got " + std::to_string(got));
    values.resize(count);
    for (size_t i = 0; i < count; ++i) {
        if (dtype == kDtypeF32) {
            uint32_t u;
            std::memcpy(&u, payload.data() + i * 4, 4);
            values[i] = static_cast<double>(std::bit_cast<float>(u));
        } else {
            uint64_t u;
            std::memcpy(&u, payload.data() + i * 8, 8);
            values[i] = std::bit_cast<double>(u);
        }
    }
}

void write_array(const std::string& path, const std::vector<uint32_t>& dims,
                 const std::vector<float>& values) {
    if (checked_count(dims) != values.size())
        throw DataError("write_array: values length != product(dims)");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("write_array: cannot open " + path);
    out.write(kMagic, 4);
    out.put(static_cast<char>(kVersion));
    out.put(static_cast<char>(kDtypeF32));
    out.put(static_cast<char>(dims.size()));
    for (uint32_t d : dims) put_u32(out, d);
    for (float v : values) put_f32(out, v);
    out.flush();
    if (!out) throw DataError("write_array: I/O failure writing " + path);
}

ArrayData read_array(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("read_array: cannot open " + path);
    std::vector<uint32_t> dims;
    uint8_t dtype = 0;
    std::vector<double> vals;
    read_blob(in, "read_array(" + path + ")", dims, dtype, vals);
    if (dtype != kDtypeF32)
        throw DataError("read_array(" + path + "): unsupported dtype " + std::to_string(dtype));
    ArrayData out;
    out.dims = std::move(dims);
    out.values.resize(vals.size());
    for (size_t i = 0; i < vals.size(); ++i) out.values[i] = static_cast<float>(vals[i]);
    return out;
}

void save_image(const Image& img, const std::string& path) {
    std::vector<float> v(img.data.begin(), img.data.end());
    write_array(path, {static_cast<uint32_t>(img.n), static_cast<uint32_t>(img.n)}, v);
}

Image load_image(const std::string& path) {
    ArrayData a = read_array(path);
    if (a.dims.size() != 2 || a.dims[0] != a.dims[1])
        throw DataError("load_image(" + path + "): expected square 2-D array");
    Image img(static_cast<int>(a.dims[0]));
    for (size_t i = 0; i < a.values.size(); ++i) img.data[i] = a.values[i];
    return img;
}

void save_sinogram(const Sinogram& sino, const std::string& path) {
    std::vector<float> v(sino.data.begin(), sino.data.end());
    write_array(path, {static_cast<uint32_t>(sino.np), static_cast<uint32_t>(sino.nr)}, v);
}

Sinogram load_sinogram(const std::string& path) {
    ArrayData a = read_array(path);
    if (a.dims.size() != 2) throw DataError("load_sinogram(" + path + "): expected 2-D array");
    Sinogram s(static_cast<int>(a.dims[0]), static_cast<int>(a.dims[1]));
    for (size_t i = 0; i < a.values.size(); ++i) s.data[i] = a.values[i];
    return s;
}

void export_pgm(const double* values, int width, int height, const std::string& path) {
    size_t count = static_cast<size_t>(width) * height;
    double lo = values[0], hi = values[0];
    for (size_t i = 0; i < count; ++i) {
        if (!std::isfinite(values[i])) throw DataError("export_pgm: non-finite value");
        lo = std::min(lo, values[i]);
        hi = std::max(hi, values[i]);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("export_pgm: cannot open " + path);
    out << "P5\n" << width << " " << height << "\n255\n";
    double range = hi - lo;
    for (size_t i = 0; i < count; ++i) {
        double t = range > 0.0 ? (values[i] - lo) / range : 0.5019607843137255;  // 128/255
        out.put(static_cast<char>(static_cast<unsigned char>(std::floor(t * 255.0 + 0.5))));
    }
    out.flush();
    if (!out) throw DataError("export_pgm: I/O failure writing " + path);
}

void export_pgm(const Image& img, const std::string& path) {
    export_pgm(img.data.data(), img.n, img.n, path);
}

}  // namespace spect::io

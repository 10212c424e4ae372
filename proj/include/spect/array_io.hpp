#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "spect/types.hpp"

namespace spect::io {

// On-disk array container:
//   magic "TOMO" | version u8 = 1 | dtype u8 | ndim u8 | dims ndim x u32 LE
//   | payload, row major, little endian.
// Standalone .tomo files always use dtype 1 (f32). dtype 2 (f64) exists only
// for blobs embedded in the model container, where parameters must round-trip
// at full training precision.
constexpr uint8_t kDtypeF32 = 1;
constexpr uint8_t kDtypeF64 = 2;

struct ArrayData {
    std::vector<uint32_t> dims;
    std::vector<float> values;
};

void write_array(const std::string& path, const std::vector<uint32_t>& dims,
                 const std::vector<float>& values);
ArrayData read_array(const std::string& path);

// Stream-level blob I/O shared by the file format above and the model container.
void write_blob(std::ostream& out, const std::vector<uint32_t>& dims, uint8_t dtype,
                const double* values, size_t count);
void read_blob(std::istream& in, const std::string& what, std::vector<uint32_t>& dims,
               uint8_t& dtype, std::vector<double>& values);

// Convenience wrappers casting between the double precision containers used in
// memory and the f32 payload on disk.
void save_image(const Image& img, const std::string& path);
Image load_image(const std::string& path);
void save_sinogram(const Sinogram& sino, const std::string& path);
Sinogram load_sinogram(const std::string& path);

// Binary PGM (P5, maxval 255), min-max normalized; a constant input maps to
// mid-gray 128. Rounding is half-up.
void export_pgm(const double* values, int width, int height, const std::string& path);
void export_pgm(const Image& img, const std::string& path);

}  // namespace spect::io

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "specedit/grid.hpp"

namespace specedit {

// Tensor files: 20-byte header followed by row-major little-endian f32 payload.
//   magic "SPGD" | version u16 | dtype u8 (0 = f32) | rank u8 (= 3) | H, W, C as u32
inline constexpr std::array<char, 4> kTensorMagic = {'S', 'P', 'G', 'D'};
inline constexpr std::uint16_t kTensorVersion = 1;
inline constexpr std::size_t kTensorHeaderBytes = 20;

struct TensorFileHeader {
    std::uint16_t version = kTensorVersion;
    std::uint8_t dtype = 0;
    std::uint8_t rank = 3;
    std::uint32_t height = 0;
    std::uint32_t width = 0;
    std::uint32_t channels = 0;

    std::uint64_t payload_bytes() const { return std::uint64_t{height} * width * channels * 4; }
};

std::vector<std::uint8_t> encode_tensor(const LatentGrid& g);
LatentGrid decode_tensor(const std::vector<std::uint8_t>& bytes);
TensorFileHeader decode_tensor_header(const std::vector<std::uint8_t>& bytes);

void write_tensor(const std::filesystem::path& path, const LatentGrid& g);
LatentGrid read_tensor(const std::filesystem::path& path);
TensorFileHeader read_tensor_header(const std::filesystem::path& path);

// Binary PGM (P5, one channel) and PPM (P6, three channels), maxval 255.
LatentGrid decode_pnm(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> encode_pnm(const LatentGrid& g);

LatentGrid read_image_pgm_ppm(const std::filesystem::path& path);
void write_image_pgm_ppm(const std::filesystem::path& path, const LatentGrid& g);

/// Reads either format, chosen by extension (.pgm/.ppm/.pnm are images, anything else a tensor).
LatentGrid read_grid_any(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace specedit

#include "specedit/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "specedit/errors.hpp"

namespace specedit {
namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

std::uint16_t get_u16(const std::uint8_t* p) { return static_cast<std::uint16_t>(p[0] | (p[1] << 8)); }

std::uint32_t get_u32(const std::uint8_t* p) {
    return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) | (std::uint32_t{p[2]} << 16) |
           (std::uint32_t{p[3]} << 24);
}

std::uint32_t narrow_dim(std::size_t d) {
    if (d > std::numeric_limits<std::uint32_t>::max()) {
        throw Error(ErrorCode::InvalidArgument, "dimension does not fit in u32");
    }
    return static_cast<std::uint32_t>(d);
}

struct PnmCursor {
    const std::vector<std::uint8_t>& bytes;
    std::size_t pos = 0;

    void skip_space_and_comments() {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else if (std::isspace(bytes[pos])) {
                ++pos;
            } else {
                break;
            }
        }
    }

    unsigned long read_uint() {
        skip_space_and_comments();
        if (pos >= bytes.size() || !std::isdigit(bytes[pos])) {
            throw Error(ErrorCode::MalformedHeader, "expected an unsigned integer in header");
        }
        unsigned long v = 0;
        while (pos < bytes.size() && std::isdigit(bytes[pos])) {
            v = v * 10 + (bytes[pos] - '0');
            if (v > (1ul << 31)) throw Error(ErrorCode::MalformedHeader, "header value too large");
            ++pos;
        }
        return v;
    }
};

}  // namespace

std::vector<std::uint8_t> encode_tensor(const LatentGrid& g) {
    std::vector<std::uint8_t> out;
    out.reserve(kTensorHeaderBytes + g.size() * 4);
    out.insert(out.end(), kTensorMagic.begin(), kTensorMagic.end());
    put_u16(out, kTensorVersion);
    out.push_back(0);
    out.push_back(3);
    put_u32(out, narrow_dim(g.height()));
    put_u32(out, narrow_dim(g.width()));
    put_u32(out, narrow_dim(g.channels()));
    const double fmax = std::numeric_limits<float>::max();
    for (double v : g.data()) {
        if (!std::isfinite(v) || std::abs(v) > fmax) {
            throw Error(ErrorCode::NonFiniteValue, "value outside f32 range: " + std::to_string(v));
        }
        put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
    return out;
}

TensorFileHeader decode_tensor_header(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < kTensorHeaderBytes) {
        throw Error(ErrorCode::TruncatedPayload, "file shorter than the 20-byte header");
    }
    if (!std::equal(kTensorMagic.begin(), kTensorMagic.end(), bytes.begin())) {
        throw Error(ErrorCode::BadMagic, "expected SPGD");
    }
    TensorFileHeader h;
    h.version = get_u16(bytes.data() + 4);
    h.dtype = bytes[6];
    h.rank = bytes[7];
    h.height = get_u32(bytes.data() + 8);
    h.width = get_u32(bytes.data() + 12);
    h.channels = get_u32(bytes.data() + 16);
    if (h.version != kTensorVersion) {
        throw Error(ErrorCode::UnsupportedVersion, "version " + std::to_string(h.version));
    }
    if (h.dtype != 0 || h.rank != 3) {
        throw Error(ErrorCode::UnsupportedFormat, "only dtype 0 (f32) with rank 3 is supported");
    }
    if (h.height == 0 || h.width == 0 || h.channels == 0) {
        throw Error(ErrorCode::MalformedHeader, "zero dimension in header");
    }
    return h;
}

LatentGrid decode_tensor(const std::vector<std::uint8_t>& bytes) {
    const auto h = decode_tensor_header(bytes);
    const std::uint64_t payload = bytes.size() - kTensorHeaderBytes;
    if (payload != h.payload_bytes()) {
        throw Error(ErrorCode::TruncatedPayload, "payload has " + std::to_string(payload) + " bytes, expected " +
                                                     std::to_string(h.payload_bytes()));
    }
    std::vector<double> data(static_cast<std::size_t>(h.payload_bytes() / 4));
    const std::uint8_t* p = bytes.data() + kTensorHeaderBytes;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const float f = std::bit_cast<float>(get_u32(p + 4 * i));
        if (!std::isfinite(f)) throw Error(ErrorCode::NonFiniteValue, "payload element " + std::to_string(i));
        data[i] = f;
    }
    return LatentGrid(h.height, h.width, h.channels, std::move(data));
}

LatentGrid decode_pnm(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P') throw Error(ErrorCode::UnsupportedFormat, "not a PNM file");
    std::size_t channels = 0;
    if (bytes[1] == '5') {
        channels = 1;
    } else if (bytes[1] == '6') {
        channels = 3;
    } else {
        throw Error(ErrorCode::UnsupportedFormat, std::string("PNM variant P") + static_cast<char>(bytes[1]));
    }
    PnmCursor cur{bytes, 2};
    const auto width = cur.read_uint();
    const auto height = cur.read_uint();
    const auto maxval = cur.read_uint();
    if (width == 0 || height == 0) throw Error(ErrorCode::MalformedHeader, "zero image dimension");
    if (maxval != 255) throw Error(ErrorCode::UnsupportedFormat, "maxval must be 255");
    if (cur.pos >= bytes.size() || !std::isspace(bytes[cur.pos])) {
        throw Error(ErrorCode::MalformedHeader, "missing whitespace after maxval");
    }
    ++cur.pos;
    const std::size_t n = std::size_t{height} * width * channels;
    if (bytes.size() - cur.pos < n) {
        throw Error(ErrorCode::TruncatedPayload, "image payload has " + std::to_string(bytes.size() - cur.pos) +
                                                     " bytes, expected " + std::to_string(n));
    }
    std::vector<double> data(n);
    for (std::size_t i = 0; i < n; ++i) data[i] = bytes[cur.pos + i] / 255.0;
    return LatentGrid(height, width, channels, std::move(data));
}

std::vector<std::uint8_t> encode_pnm(const LatentGrid& g) {
    if (g.channels() != 1 && g.channels() != 3) {
        throw Error(ErrorCode::UnsupportedFormat, "PNM needs 1 or 3 channels, got " + std::to_string(g.channels()));
    }
    const std::string header = std::string(g.channels() == 1 ? "P5" : "P6") + "\n" + std::to_string(g.width()) +
                               " " + std::to_string(g.height()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(header.size() + g.size());
    for (double v : g.data()) {
        const double clamped = std::clamp(v, 0.0, 1.0);
        out.push_back(static_cast<std::uint8_t>(std::lround(clamped * 255.0)));
    }
    return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << text;
}

void write_tensor(const std::filesystem::path& path, const LatentGrid& g) {
    write_file_bytes(path, encode_tensor(g));
}

LatentGrid read_tensor(const std::filesystem::path& path) { return decode_tensor(read_file_bytes(path)); }

TensorFileHeader read_tensor_header(const std::filesystem::path& path) {
    return decode_tensor_header(read_file_bytes(path));
}

LatentGrid read_image_pgm_ppm(const std::filesystem::path& path) { return decode_pnm(read_file_bytes(path)); }

void write_image_pgm_ppm(const std::filesystem::path& path, const LatentGrid& g) {
    write_file_bytes(path, encode_pnm(g));
}

LatentGrid read_grid_any(const std::filesystem::path& path) {
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") return read_image_pgm_ppm(path);
    return read_tensor(path);
}

}  // namespace specedit

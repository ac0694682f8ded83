#include <doctest.h>

#include <cmath>
#include <cstring>
#include <functional>
#include <limits>
#include <string>

#include "specedit/errors.hpp"
#include "specedit/io.hpp"
#include "test_util.hpp"

using namespace specedit;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return ErrorCode::IoError;
}

std::vector<std::uint8_t> header_bytes(const char* magic, std::uint16_t version, std::uint8_t dtype, std::uint8_t rank,
                                       std::uint32_t h, std::uint32_t w, std::uint32_t c) {
    std::vector<std::uint8_t> b(20);
    std::memcpy(b.data(), magic, 4);
    b[4] = version & 0xff;
    b[5] = version >> 8;
    b[6] = dtype;
    b[7] = rank;
    auto put = [&](std::size_t off, std::uint32_t v) {
        for (int i = 0; i < 4; ++i) b[off + i] = (v >> (8 * i)) & 0xff;
    };
    put(8, h);
    put(12, w);
    put(16, c);
    return b;
}

std::vector<std::uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

}  // namespace

TEST_CASE("tensor round trip is exact up to f32 rounding") {
    const auto g = testutil::random_grid(5, 7, 3, 11);
    const auto back = decode_tensor(encode_tensor(g));
    REQUIRE(back.same_shape(g));
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(back.data()[i] == static_cast<double>(static_cast<float>(g.data()[i])));
    }
}

TEST_CASE("tensor header layout") {
    LatentGrid g(4, 4, 2);
    const auto bytes = encode_tensor(g);
    CHECK(bytes.size() == 20 + 128);
    CHECK(std::memcmp(bytes.data(), "SPGD", 4) == 0);
    CHECK(bytes[4] == 1);
    CHECK(bytes[5] == 0);
    CHECK(bytes[6] == 0);
    CHECK(bytes[7] == 3);
    const auto h = decode_tensor_header(bytes);
    CHECK(h.height == 4);
    CHECK(h.width == 4);
    CHECK(h.channels == 2);
    CHECK(h.payload_bytes() == 128);
}

TEST_CASE("tensor decode errors") {
    auto bad_magic = header_bytes("XXXX", 1, 0, 3, 1, 1, 1);
    CHECK(code_of([&] { decode_tensor(bad_magic); }) == ErrorCode::BadMagic);

    auto truncated = header_bytes("SPGD", 1, 0, 3, 4, 4, 2);
    truncated.resize(20 + 100);
    try {
        decode_tensor(truncated);
        FAIL("expected TruncatedPayload");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TruncatedPayload);
        CHECK(std::string(e.what()).find("expected 128") != std::string::npos);
    }

    auto v2 = header_bytes("SPGD", 2, 0, 3, 1, 1, 1);
    v2.resize(24);
    CHECK(code_of([&] { decode_tensor(v2); }) == ErrorCode::UnsupportedVersion);

    auto f64 = header_bytes("SPGD", 1, 1, 3, 1, 1, 1);
    f64.resize(24);
    CHECK(code_of([&] { decode_tensor(f64); }) == ErrorCode::UnsupportedFormat);

    std::vector<std::uint8_t> short_header(10, 0);
    CHECK(code_of([&] { decode_tensor(short_header); }) == ErrorCode::TruncatedPayload);

    auto nan_payload = header_bytes("SPGD", 1, 0, 3, 1, 1, 1);
    const float nan = std::numeric_limits<float>::quiet_NaN();
    nan_payload.resize(24);
    std::memcpy(nan_payload.data() + 20, &nan, 4);
    CHECK(code_of([&] { decode_tensor(nan_payload); }) == ErrorCode::NonFiniteValue);
}

TEST_CASE("values outside f32 range fail at write time") {
    LatentGrid g(1, 2, 1, {1.0, 1e39});
    CHECK(code_of([&] { encode_tensor(g); }) == ErrorCode::NonFiniteValue);
    LatentGrid n(1, 1, 1);
    n.data()[0] = std::numeric_limits<double>::infinity();
    CHECK(code_of([&] { encode_tensor(n); }) == ErrorCode::NonFiniteValue);
}

TEST_CASE("tensor file round trip is idempotent") {
    const auto dir = testutil::scratch_dir("io_tensor");
    const auto g = testutil::random_grid(8, 4, 2, 12);
    write_tensor(dir / "a.spgd", g);
    const auto once = read_tensor(dir / "a.spgd");
    write_tensor(dir / "b.spgd", once);
    const auto twice = read_tensor(dir / "b.spgd");
    CHECK(once == twice);
    CHECK(read_file_bytes(dir / "a.spgd") == read_file_bytes(dir / "b.spgd"));
    CHECK(read_tensor_header(dir / "a.spgd").width == 4);
}

TEST_CASE("P5 bytes map to [0, 1]") {
    auto bytes = bytes_of("P5\n2 2\n255\n");
    bytes.insert(bytes.end(), {0, 255, 128, 64});
    const auto g = decode_pnm(bytes);
    REQUIRE(g.channels() == 1);
    CHECK(g.at(0, 0) == 0.0);
    CHECK(g.at(0, 1) == 1.0);
    CHECK(g.at(1, 0) == 128.0 / 255.0);
    CHECK(g.at(1, 1) == 64.0 / 255.0);
}

TEST_CASE("P6 red pixel") {
    auto bytes = bytes_of("P6 1 1 255\n");
    bytes.insert(bytes.end(), {255, 0, 0});
    const auto g = decode_pnm(bytes);
    CHECK(g == LatentGrid(1, 1, 3, {1.0, 0.0, 0.0}));
}

TEST_CASE("PNM comments are skipped") {
    auto bytes = bytes_of("P5\n# made by hand\n1 # width\n1\n255\n");
    bytes.push_back(51);
    CHECK(decode_pnm(bytes).at(0, 0) == 51.0 / 255.0);
}

TEST_CASE("PNM write of a read image reproduces the bytes") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const bool color = trial % 2 == 1;
        const std::size_t w = 1 + rng() % 9;
        const std::size_t h = 1 + rng() % 7;
        auto bytes = bytes_of(std::string(color ? "P6" : "P5") + "\n" + std::to_string(w) + " " +
                              std::to_string(h) + "\n255\n");
        for (std::size_t i = 0; i < w * h * (color ? 3 : 1); ++i) bytes.push_back(static_cast<std::uint8_t>(rng()));
        CHECK(encode_pnm(decode_pnm(bytes)) == bytes);
    }
}

TEST_CASE("PNM write clamps and rounds") {
    LatentGrid g(1, 3, 1, {-0.5, 0.5, 2.0});
    const auto bytes = encode_pnm(g);
    const std::size_t n = bytes.size();
    CHECK(bytes[n - 3] == 0);
    CHECK(bytes[n - 2] == 128);
    CHECK(bytes[n - 1] == 255);
}

TEST_CASE("PNM errors") {
    CHECK(code_of([] { decode_pnm(bytes_of("P2\n1 1\n255\n0")); }) == ErrorCode::UnsupportedFormat);
    CHECK(code_of([] { decode_pnm(bytes_of("P5\n1 1\n65535\n00")); }) == ErrorCode::UnsupportedFormat);
    CHECK(code_of([] { decode_pnm(bytes_of("P5\nx 1\n255\n0")); }) == ErrorCode::MalformedHeader);
    CHECK(code_of([] { decode_pnm(bytes_of("P5\n2 2\n255\n0")); }) == ErrorCode::TruncatedPayload);
    CHECK(code_of([] { decode_pnm(bytes_of("JPEG")); }) == ErrorCode::UnsupportedFormat);
    LatentGrid two(1, 1, 2);
    CHECK(code_of([&] { encode_pnm(two); }) == ErrorCode::UnsupportedFormat);
}

TEST_CASE("read_grid_any dispatches on extension") {
    const auto dir = testutil::scratch_dir("io_any");
    LatentGrid img(2, 2, 1, {0.0, 1.0, 0.2, 0.4});
    write_image_pgm_ppm(dir / "a.pgm", img);
    write_tensor(dir / "a.spgd", img);
    CHECK(read_grid_any(dir / "a.pgm").at(0, 1) == 1.0);
    CHECK(read_grid_any(dir / "a.spgd").at(0, 1) == 1.0);
    CHECK(code_of([&] { read_grid_any(dir / "missing.spgd"); }) == ErrorCode::IoError);
}

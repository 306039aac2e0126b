#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <sstream>

#include "ellsys/errors.hpp"
#include "ellsys/field_io.hpp"
#include "ellsys/rng.hpp"

using namespace ellsys;

TEST(Efof, RoundTripIsBitExact) {
    Xoshiro256 rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(rng.next() % 3);
        const int G = 4 + 2 * static_cast<int>(rng.next() % 3);
        const int C = 1 + static_cast<int>(rng.next() % 5);
        GridFunction u(PeriodicGrid(n, G, 1.5), C);
        for (auto& v : u.values()) v = rng.normal() * std::pow(10.0, rng.uniform(-300, 300));
        std::stringstream buf;
        write_efof(buf, u);
        const GridFunction v = read_efof(buf, 1.5);
        ASSERT_TRUE(v.grid() == u.grid());
        ASSERT_EQ(v.components(), C);
        EXPECT_EQ(std::memcmp(v.values().data(), u.values().data(), u.values().size() * sizeof(double)), 0);
    }
}

TEST(Efof, ByteLayout) {
    GridFunction u(PeriodicGrid(2, 4), 1);
    u.values()[0] = 1.0;
    u.values()[1] = -2.5;
    std::stringstream buf;
    write_efof(buf, u);
    const std::string s = buf.str();
    ASSERT_EQ(s.size(), 4u + 4 + 4 + 4 + 2 * 4 + 8 + 16 * 8);
    EXPECT_EQ(s.substr(0, 4), "EFOF");
    auto u32 = [&](std::size_t off) {
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(s[off + i]);
        return v;
    };
    EXPECT_EQ(u32(4), 1u);   // version
    EXPECT_EQ(u32(8), 2u);   // n
    EXPECT_EQ(u32(12), 1u);  // components
    EXPECT_EQ(u32(16), 4u);
    EXPECT_EQ(u32(20), 4u);
    EXPECT_EQ(u32(24), 128u);  // payload bytes, low word
    EXPECT_EQ(u32(28), 0u);
    // 1.0 = 0x3FF0000000000000 little-endian
    EXPECT_EQ(static_cast<unsigned char>(s[32 + 7]), 0x3F);
    EXPECT_EQ(static_cast<unsigned char>(s[32 + 6]), 0xF0);
    // -2.5 = 0xC004000000000000
    EXPECT_EQ(static_cast<unsigned char>(s[40 + 7]), 0xC0);
    EXPECT_EQ(static_cast<unsigned char>(s[40 + 6]), 0x04);
}

TEST(Efof, RejectsMalformedInput) {
    GridFunction u(PeriodicGrid(2, 4), 2);
    std::stringstream buf;
    write_efof(buf, u);
    const std::string good = buf.str();

    auto read = [](std::string bytes) {
        std::stringstream in(bytes);
        return read_efof(in);
    };
    std::string bad = good;
    bad[0] = 'X';
    EXPECT_THROW(read(bad), FormatError);
    bad = good;
    bad[4] = 2;
    EXPECT_THROW(read(bad), FormatError);
    EXPECT_THROW(read(good.substr(0, good.size() - 1)), FormatError);
    bad = good;
    bad[25] = 7;  // payload length no longer matches
    EXPECT_THROW(read(bad), FormatError);
    bad = good;
    bad[20] = 6;  // unequal points per axis
    EXPECT_THROW(read(bad), FormatError);
    bad = good;
    bad[16] = bad[20] = 5;  // odd points per axis
    EXPECT_THROW(read(bad), FormatError);
}

TEST(Efof, FileRoundTrip) {
    const auto path = std::filesystem::temp_directory_path() / "ellsys_test_field.efof";
    GridFunction u(PeriodicGrid(3, 4), 4);
    for (std::size_t i = 0; i < u.values().size(); ++i) u.values()[i] = static_cast<double>(i) * 0.25;
    write_efof(path, u);
    const GridFunction v = read_efof(path);
    EXPECT_EQ(v.values()[17], 17 * 0.25);
    std::filesystem::remove(path);
    EXPECT_THROW(read_efof(path), FormatError);
}

#include "ellsys/field_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "ellsys/errors.hpp"

namespace ellsys {

namespace {

template <typename T>
void put_le(std::ostream& out, T value) {
    std::array<unsigned char, sizeof(T)> bytes{};
    std::uint64_t bits = 0;
    if constexpr (sizeof(T) == 8) {
        bits = std::bit_cast<std::uint64_t>(value);
    } else {
        bits = static_cast<std::uint64_t>(std::bit_cast<std::uint32_t>(value));
    }
    for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xFFu);
    out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
    std::array<unsigned char, sizeof(T)> bytes{};
    if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) throw FormatError("EFOF: truncated file");
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    if constexpr (sizeof(T) == 8) {
        return std::bit_cast<T>(bits);
    } else {
        return std::bit_cast<T>(static_cast<std::uint32_t>(bits));
    }
}

}  // namespace

void write_efof(std::ostream& out, const GridFunction& u) {
    const auto& grid = u.grid();
    out.write("EFOF", 4);
    put_le<std::uint32_t>(out, kEfofVersion);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(grid.n()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(u.components()));
    for (int axis = 0; axis < grid.n(); ++axis) put_le<std::uint32_t>(out, static_cast<std::uint32_t>(grid.G()));
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(u.values().size() * sizeof(double)));
    for (double v : u.values()) put_le<double>(out, v);
    if (!out) throw FormatError("EFOF: write failed");
}

void write_efof(const std::filesystem::path& path, const GridFunction& u) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("EFOF: cannot open " + path.string() + " for writing");
    write_efof(out, u);
}

GridFunction read_efof(std::istream& in, double L) {
    char magic[4] = {};
    if (!in.read(magic, 4) || std::memcmp(magic, "EFOF", 4) != 0) throw FormatError("EFOF: bad magic bytes");
    const auto version = get_le<std::uint32_t>(in);
    if (version != kEfofVersion) throw FormatError("EFOF: unsupported version " + std::to_string(version));
    const auto n = get_le<std::uint32_t>(in);
    const auto components = get_le<std::uint32_t>(in);
    if (n < 2 || n > static_cast<std::uint32_t>(PeriodicGrid::kMaxDim)) throw FormatError("EFOF: dimension out of range");
    if (components < 1 || components > 4096) throw FormatError("EFOF: component count out of range");
    std::vector<std::uint32_t> points(n);
    for (auto& g : points) g = get_le<std::uint32_t>(in);
    for (auto g : points) {
        if (g != points.front()) throw FormatError("EFOF: only equal points per axis are supported");
    }
    PeriodicGrid grid;
    try {
        grid = PeriodicGrid(static_cast<int>(n), static_cast<int>(points.front()), L);
    } catch (const Error& e) {
        throw FormatError(std::string("EFOF: ") + e.what());
    }
    const auto payload = get_le<std::uint64_t>(in);
    const std::uint64_t expected = static_cast<std::uint64_t>(components) * grid.size() * sizeof(double);
    if (payload != expected) {
        throw FormatError("EFOF: payload length " + std::to_string(payload) + " does not match header (" +
                          std::to_string(expected) + ")");
    }
    std::vector<double> values(static_cast<std::size_t>(components) * grid.size());
    for (double& v : values) v = get_le<double>(in);
    return {grid, static_cast<int>(components), std::move(values)};
}

GridFunction read_efof(const std::filesystem::path& path, double L) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("EFOF: cannot open " + path.string());
    return read_efof(in, L);
}

}  // namespace ellsys

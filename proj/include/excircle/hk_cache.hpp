#pragma once

// On-disk cache of assembled H_k matrices, one file per (k, N, M).
//
// File layout, little-endian:
//   bytes 0..3   magic "EXHK"
//   u32          format version (1)
//   f64, f64     Re k, Im k
//   u32, u32     N, M
//   f64 pairs    (2N+1)^2 entries (re, im), row-major
//
// Files are written to a temporary name and renamed into place, so a reader
// never observes a partial file. The cache only short-circuits assembly:
// a hit returns the exact doubles that were stored.

#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <system_error>
#include <thread>
#include <vector>

#include "excircle/bie.hpp"

namespace excircle {

inline constexpr const char* cache_dir_env = "EXCIRCLE_CACHE_DIR";

class HkCache {
public:
    static constexpr std::array<char, 4> magic{'E', 'X', 'H', 'K'};
    static constexpr std::uint32_t version = 1;

    explicit HkCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

    /// $EXCIRCLE_CACHE_DIR if set, else ./.excircle_cache
    static std::filesystem::path default_dir() {
        if (const char* env = std::getenv(cache_dir_env); env && *env) return env;
        return ".excircle_cache";
    }

    const std::filesystem::path& dir() const noexcept { return dir_; }

    std::filesystem::path path_for(Complex k, int N, int M) const {
        char name[96];
        std::snprintf(name, sizeof name, "hk_%016llx_%016llx_N%d_M%d.bin",
                      static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(k.real())),
                      static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(k.imag())), N, M);
        return dir_ / name;
    }

    std::optional<ComplexMatrix> load(Complex k, int N, int M) const {
        std::ifstream in(path_for(k, N, M), std::ios::binary);
        if (!in) return std::nullopt;
        std::array<char, 4> m{};
        in.read(m.data(), 4);
        if (!in || m != magic) return std::nullopt;
        if (read_u32(in) != version) return std::nullopt;
        const double kr = read_f64(in), ki = read_f64(in);
        const auto n = static_cast<int>(read_u32(in));
        const auto mm = static_cast<int>(read_u32(in));
        if (!in || kr != k.real() || ki != k.imag() || n != N || mm != M) return std::nullopt;
        const int size = 2 * N + 1;
        ComplexMatrix h(size, size);
        for (int r = 0; r < size; ++r)
            for (int c = 0; c < size; ++c) {
                const double re = read_f64(in);
                const double im = read_f64(in);
                h(r, c) = Complex(re, im);
            }
        if (!in) return std::nullopt;
        return h;
    }

    /// Returns false (and leaves no file behind) when the write fails.
    bool store(Complex k, int N, int M, const ComplexMatrix& h) const {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        const auto final_path = path_for(k, N, M);
        auto tmp = final_path;
        tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) return false;
            out.write(magic.data(), 4);
            write_u32(out, version);
            write_f64(out, k.real());
            write_f64(out, k.imag());
            write_u32(out, static_cast<std::uint32_t>(N));
            write_u32(out, static_cast<std::uint32_t>(M));
            for (Eigen::Index r = 0; r < h.rows(); ++r)
                for (Eigen::Index c = 0; c < h.cols(); ++c) {
                    write_f64(out, h(r, c).real());
                    write_f64(out, h(r, c).imag());
                }
            if (!out) {
                out.close();
                std::filesystem::remove(tmp, ec);
                return false;
            }
        }
        std::filesystem::rename(tmp, final_path, ec);
        if (ec) std::filesystem::remove(tmp, ec);
        return !ec;
    }

    /// Removes cache files; returns how many were deleted.
    std::size_t clear() const {
        std::error_code ec;
        std::size_t removed = 0;
        if (!std::filesystem::exists(dir_, ec)) return 0;
        for (const auto& entry : std::filesystem::directory_iterator(dir_, ec)) {
            const auto name = entry.path().filename().string();
            if (name.starts_with("hk_") && std::filesystem::remove(entry.path(), ec)) ++removed;
        }
        return removed;
    }

private:
    static void write_u32(std::ostream& os, std::uint32_t v) {
        std::array<char, 4> b{};
        for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
        os.write(b.data(), 4);
    }
    static void write_f64(std::ostream& os, double d) {
        const auto v = std::bit_cast<std::uint64_t>(d);
        std::array<char, 8> b{};
        for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
        os.write(b.data(), 8);
    }
    static std::uint32_t read_u32(std::istream& is) {
        std::array<unsigned char, 4> b{};
        is.read(reinterpret_cast<char*>(b.data()), 4);
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
        return v;
    }
    static double read_f64(std::istream& is) {
        std::array<unsigned char, 8> b{};
        is.read(reinterpret_cast<char*>(b.data()), 8);
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
        return std::bit_cast<double>(v);
    }

    std::filesystem::path dir_;
};

/// H_k from the cache when present, assembled (and stored) otherwise.
inline ComplexMatrix cached_hk_matrix(const HkCache* cache, Complex k, int N, int M) {
    if (cache) {
        if (auto hit = cache->load(k, N, M)) return std::move(*hit);
    }
    ComplexMatrix h = assemble_hk_matrix(k, N, M);
    if (cache) cache->store(k, N, M, h);
    return h;
}

}  // namespace excircle

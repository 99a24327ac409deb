#pragma once

// Embedding persistence. Binary layout:
//   bytes 0..4   magic "HOMF1"
//   3 x u64 LE   m, n, k
//   (m+n)*k f64 LE  U, row-major
//   (m+n)*k f64 LE  V, row-major
// Byte order is encoded explicitly, so files are portable across hosts.
// Writes go to a sibling temp file first and are renamed into place.

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "homf/factorize.hpp"

namespace homf {

namespace detail {

constexpr char kEmbeddingMagic[5] = {'H', 'O', 'M', 'F', '1'};

inline void append_u64_le(std::string& out, std::uint64_t v) {
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

inline void append_f64_le(std::string& out, double x) {
    append_u64_le(out, std::bit_cast<std::uint64_t>(x));
}

inline std::uint64_t read_u64_le(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(p[b]) << (8 * b);
    return v;
}

inline double read_f64_le(const unsigned char* p) {
    return std::bit_cast<double>(read_u64_le(p));
}

/// Write `payload` to `path` atomically: stream to path + ".tmp" in the
/// same directory, then rename over the destination.
inline void atomic_write_file(const std::filesystem::path& path,
                              const std::string& payload) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        }
        out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
        out.flush();
        if (!out) {
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace detail

inline void save_embeddings(const std::filesystem::path& path, const EmbeddingPair& e) {
    const std::size_t total = e.m + e.n;
    if (e.u.rows != total || e.v.rows != total || e.u.cols != e.k || e.v.cols != e.k) {
        throw std::invalid_argument("save_embeddings: inconsistent embedding shape");
    }
    std::string payload;
    payload.reserve(5 + 24 + 16 * total * e.k);
    payload.append(detail::kEmbeddingMagic, 5);
    detail::append_u64_le(payload, e.m);
    detail::append_u64_le(payload, e.n);
    detail::append_u64_le(payload, e.k);
    for (double x : e.u.data) detail::append_f64_le(payload, x);
    for (double x : e.v.data) detail::append_f64_le(payload, x);
    detail::atomic_write_file(path, payload);
}

inline EmbeddingPair load_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open embeddings file " + path.string());
    }
    std::string raw((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
    if (raw.size() < 5 + 24) {
        throw std::runtime_error("embeddings file " + path.string() + " is truncated");
    }
    if (std::memcmp(raw.data(), detail::kEmbeddingMagic, 5) != 0) {
        throw std::runtime_error("embeddings file " + path.string() +
                                 " has wrong magic (expected HOMF1)");
    }
    const auto* p = reinterpret_cast<const unsigned char*>(raw.data()) + 5;
    EmbeddingPair e;
    e.m = detail::read_u64_le(p);
    e.n = detail::read_u64_le(p + 8);
    e.k = detail::read_u64_le(p + 16);
    p += 24;
    const std::size_t total = e.m + e.n;
    const std::size_t expected = 5 + 24 + 16 * total * e.k;
    if (raw.size() != expected) {
        throw std::runtime_error("embeddings file " + path.string() + " has " +
                                 std::to_string(raw.size()) + " bytes, expected " +
                                 std::to_string(expected));
    }
    e.u = DenseMatrix(total, e.k);
    e.v = DenseMatrix(total, e.k);
    for (std::size_t i = 0; i < total * e.k; ++i, p += 8) {
        e.u.data[i] = detail::read_f64_le(p);
    }
    for (std::size_t i = 0; i < total * e.k; ++i, p += 8) {
        e.v.data[i] = detail::read_f64_le(p);
    }
    return e;
}

/// Text export: first U then V, one embedding row per line, values
/// space-separated with enough digits to round-trip doubles.
inline void export_embeddings_text(const std::filesystem::path& path,
                                   const EmbeddingPair& e) {
    std::string payload;
    char buf[64];
    auto append_matrix = [&](const DenseMatrix& mat) {
        for (std::size_t i = 0; i < mat.rows; ++i) {
            const double* r = mat.row(i);
            for (std::size_t j = 0; j < mat.cols; ++j) {
                const int len = std::snprintf(buf, sizeof buf, "%.17g", r[j]);
                if (j > 0) payload.push_back(' ');
                payload.append(buf, static_cast<std::size_t>(len));
            }
            payload.push_back('\n');
        }
    };
    append_matrix(e.u);
    append_matrix(e.v);
    detail::atomic_write_file(path, payload);
}

}  // namespace homf

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace wdr::io {

// Little-endian fixed-width binary primitives. Reads throw std::runtime_error
// on short or malformed input.
void write_u64(std::ostream& os, std::uint64_t v);
void write_f64(std::ostream& os, double v);
std::uint64_t read_u64(std::istream& is);
double read_f64(std::istream& is);

// FNV-1a, used for stage caching and config provenance.
std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a(const std::string& s, std::uint64_t seed = 0xcbf29ce484222325ULL);

std::string hash_hex(std::uint64_t h);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace wdr::io

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "biym/calculus.hpp"

namespace biym {

// Connection snapshot, format version 1. Layout (all integers and floats
// little-endian):
//   magic "BIYM" | u32 version | u32 n | u32 extents[n] | f64 h | u32 m |
//   u32 name_len | name bytes | payload | u32 crc32(payload)
// payload: f64 per connection entry, ordered by site (lexicographic),
// axis ascending, then the row-major upper triangle of the skew matrix.
inline constexpr std::uint32_t kSnapshotVersion = 1;

std::uint32_t crc32(const std::uint8_t* data, std::size_t len);

std::vector<std::uint8_t> encode_snapshot(const Connection& D,
                                          const std::string& density_name);

struct DecodedSnapshot {
  Connection connection;
  std::string density_name;
};
DecodedSnapshot decode_snapshot(const std::vector<std::uint8_t>& bytes);

void save_snapshot(const std::string& path, const Connection& D,
                   const std::string& density_name);
DecodedSnapshot load_snapshot(const std::string& path);

// write-temp-then-rename; creates parent directories
void atomic_write_file(const std::string& path,
                       const std::uint8_t* data, std::size_t len);
void atomic_write_text(const std::string& path, const std::string& text);
std::vector<std::uint8_t> read_file_bytes(const std::string& path);

}  // namespace biym

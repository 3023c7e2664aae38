#include "biym/snapshot.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace biym {

namespace {

constexpr char kMagic[4] = {'B', 'I', 'Y', 'M'};

struct Crc32Table {
  std::uint32_t t[256];
  Crc32Table() {
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) {
        c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      }
      t[i] = c;
    }
  }
};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xFF);
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back((bits >> (8 * i)) & 0xFF);
}

struct Reader {
  const std::vector<std::uint8_t>& b;
  std::size_t pos = 0;

  void need(std::size_t k) const {
    if (pos + k > b.size()) {
      throw std::runtime_error("snapshot: truncated file");
    }
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(b[pos + i]) << (8 * i);
    pos += 4;
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[pos + i]) << (8 * i);
    pos += 8;
    return std::bit_cast<double>(v);
  }
};

}  // namespace

std::uint32_t crc32(const std::uint8_t* data, std::size_t len) {
  static const Crc32Table table;
  std::uint32_t c = 0xFFFFFFFFu;
  for (std::size_t i = 0; i < len; ++i) {
    c = table.t[(c ^ data[i]) & 0xFF] ^ (c >> 8);
  }
  return c ^ 0xFFFFFFFFu;
}

std::vector<std::uint8_t> encode_snapshot(const Connection& D,
                                          const std::string& density_name) {
  const Lattice& lat = *D.lattice();
  const int n = lat.dim();
  const int m = D.fiber_dim();

  std::vector<std::uint8_t> out;
  out.insert(out.end(), kMagic, kMagic + 4);
  put_u32(out, kSnapshotVersion);
  put_u32(out, static_cast<std::uint32_t>(n));
  for (int L : lat.extents()) put_u32(out, static_cast<std::uint32_t>(L));
  put_f64(out, lat.spacing());
  put_u32(out, static_cast<std::uint32_t>(m));
  put_u32(out, static_cast<std::uint32_t>(density_name.size()));
  out.insert(out.end(), density_name.begin(), density_name.end());

  const std::size_t payload_begin = out.size();
  for (std::int64_t site = 0; site < lat.num_sites(); ++site) {
    for (int mu = 0; mu < n; ++mu) {
      const double* a = D.alpha.at(site, mu);
      for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
          put_f64(out, a[i * m + j]);
        }
      }
    }
  }
  const std::uint32_t checksum =
      crc32(out.data() + payload_begin, out.size() - payload_begin);
  put_u32(out, checksum);
  return out;
}

DecodedSnapshot decode_snapshot(const std::vector<std::uint8_t>& bytes) {
  Reader r{bytes};
  r.need(4);
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw std::runtime_error("snapshot: bad magic");
  }
  r.pos = 4;
  const std::uint32_t version = r.u32();
  if (version != kSnapshotVersion) {
    throw std::runtime_error("snapshot: unsupported version " +
                             std::to_string(version));
  }
  const int n = static_cast<int>(r.u32());
  if (n < 2 || n > Lattice::kMaxDim) {
    throw std::runtime_error("snapshot: bad dimension");
  }
  std::vector<int> extents(n);
  for (int& L : extents) L = static_cast<int>(r.u32());
  const double h = r.f64();
  const int m = static_cast<int>(r.u32());
  if (m < 1 || m > AlgebraElement::kMaxDim) {
    throw std::runtime_error("snapshot: bad fiber dimension");
  }
  const std::uint32_t name_len = r.u32();
  r.need(name_len);
  std::string name(bytes.begin() + r.pos, bytes.begin() + r.pos + name_len);
  r.pos += name_len;

  auto lat = Lattice::make(n, extents, h);
  const std::size_t gdim = static_cast<std::size_t>(so_dim(m));
  const std::size_t count =
      static_cast<std::size_t>(lat->num_sites()) * n * gdim;
  const std::size_t payload_begin = r.pos;
  r.need(count * 8 + 4);
  if (bytes.size() != payload_begin + count * 8 + 4) {
    throw std::runtime_error("snapshot: payload length mismatch");
  }
  const std::uint32_t expect =
      crc32(bytes.data() + payload_begin, count * 8);

  Connection D = Connection::flat(lat, m);
  for (std::int64_t site = 0; site < lat->num_sites(); ++site) {
    for (int mu = 0; mu < n; ++mu) {
      double* a = D.alpha.at(site, mu);
      for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
          const double v = r.f64();
          a[i * m + j] = v;
          a[j * m + i] = -v;
        }
      }
    }
  }
  const std::uint32_t stored = r.u32();
  if (stored != expect) {
    throw std::runtime_error("snapshot: checksum mismatch");
  }
  return DecodedSnapshot{std::move(D), std::move(name)};
}

void save_snapshot(const std::string& path, const Connection& D,
                   const std::string& density_name) {
  const auto bytes = encode_snapshot(D, density_name);
  atomic_write_file(path, bytes.data(), bytes.size());
}

DecodedSnapshot load_snapshot(const std::string& path) {
  return decode_snapshot(read_file_bytes(path));
}

void atomic_write_file(const std::string& path, const std::uint8_t* data,
                       std::size_t len) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    fs::create_directories(target.parent_path());
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(data),
              static_cast<std::streamsize>(len));
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

void atomic_write_text(const std::string& path, const std::string& text) {
  atomic_write_file(path, reinterpret_cast<const std::uint8_t*>(text.data()),
                    text.size());
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

}  // namespace biym

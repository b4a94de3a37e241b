#include "pds/grid_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace pds {

namespace {

constexpr char kMagic[17] = "PDSGRID1        ";  // 8-char tag padded to 16 bytes
constexpr std::int64_t kMaxElements = std::int64_t{1} << 26;  // 512 MiB of doubles

void put_u32_le(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_f64_le(std::string& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

std::uint32_t get_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

double get_f64_le(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

[[noreturn]] void fail(const std::string& origin, const std::string& why) {
  throw std::runtime_error("grid file " + origin + ": " + why);
}

}  // namespace

void write_grid(std::ostream& out, const Field& x) {
  if (!all_finite(x)) {
    throw std::invalid_argument("write_grid: field contains non-finite entries");
  }
  std::string buf;
  buf.reserve(16 + 12 + 8 * static_cast<std::size_t>(x.size()));
  buf.append(kMagic, 16);
  put_u32_le(buf, static_cast<std::uint32_t>(x.channels()));
  put_u32_le(buf, static_cast<std::uint32_t>(x.height()));
  put_u32_le(buf, static_cast<std::uint32_t>(x.width()));
  for (std::int64_t i = 0; i < x.size(); ++i) put_f64_le(buf, x[i]);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error("write_grid: stream write failed");
}

void write_grid(const std::string& path, const Field& x) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("write_grid: cannot open " + path);
  write_grid(out, x);
  out.flush();
  if (!out) throw std::runtime_error("write_grid: failed writing " + path);
}

Field read_grid(std::istream& in, const std::string& origin) {
  std::array<unsigned char, 28> header{};
  in.read(reinterpret_cast<char*>(header.data()), header.size());
  if (in.gcount() != static_cast<std::streamsize>(header.size())) {
    fail(origin, "truncated header");
  }
  if (std::memcmp(header.data(), kMagic, 16) != 0) fail(origin, "bad magic");

  const std::uint32_t c = get_u32_le(header.data() + 16);
  const std::uint32_t h = get_u32_le(header.data() + 20);
  const std::uint32_t w = get_u32_le(header.data() + 24);
  if (c == 0 || h == 0 || w == 0) fail(origin, "zero dimension in header");
  const std::int64_t n = static_cast<std::int64_t>(c) * h * w;
  if (c > kMaxElements || h > kMaxElements || w > kMaxElements || n > kMaxElements) {
    fail(origin, "dimensions too large (" + std::to_string(c) + "x" + std::to_string(h) +
                     "x" + std::to_string(w) + ")");
  }

  std::vector<unsigned char> payload(static_cast<std::size_t>(8 * n));
  in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
  if (in.gcount() != static_cast<std::streamsize>(payload.size())) {
    fail(origin, "truncated payload (expected " + std::to_string(n) + " doubles)");
  }

  GridShape shape{static_cast<int>(c), static_cast<int>(h), static_cast<int>(w)};
  Field out(shape);
  for (std::int64_t i = 0; i < n; ++i) out[i] = get_f64_le(payload.data() + 8 * i);
  if (!all_finite(out)) fail(origin, "non-finite entries in payload");
  return out;
}

Field read_grid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_grid: cannot open " + path);
  return read_grid(in, path);
}

std::string describe_grid(const Field& x) {
  const auto [mn, mx] = std::minmax_element(x.data().begin(), x.data().end());
  std::ostringstream os;
  os.precision(17);
  os << to_string(x.shape()) << " min=" << *mn << " max=" << *mx;
  return os.str();
}

}  // namespace pds

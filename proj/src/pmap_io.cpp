#include "derm/pmap_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <vector>

#include "derm/png_io.hpp"

namespace derm {

namespace {

constexpr char kMagic[4] = {'P', 'M', 'A', 'P'};

std::uint32_t read_u32_le(const std::uint8_t* p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 |
         std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
}

void write_u32_le(std::uint32_t v, std::ostream& out) {
  const std::uint8_t b[4] = {std::uint8_t(v), std::uint8_t(v >> 8),
                             std::uint8_t(v >> 16), std::uint8_t(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

}  // namespace

ProbMap load_pmap(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw std::runtime_error("bad PMAP magic: " + path);
  const std::uint32_t w = read_u32_le(bytes.data() + 4);
  const std::uint32_t h = read_u32_le(bytes.data() + 8);
  const std::uint32_t c = read_u32_le(bytes.data() + 12);
  if (w == 0 || h == 0 || c == 0)
    throw std::runtime_error("PMAP with zero dimension: " + path);
  const std::size_t count = std::size_t(w) * h * c;
  if (bytes.size() != 16 + count * 4)
    throw std::runtime_error(
        "truncated PMAP payload: expected " + std::to_string(16 + count * 4) +
        " bytes, got " + std::to_string(bytes.size()) + ": " + path);
  static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);
  std::vector<float> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint32_t u = read_u32_le(bytes.data() + 16 + i * 4);
    values[i] = std::bit_cast<float>(u);
    if (!(values[i] >= 0.0f && values[i] <= 1.0f))
      throw std::runtime_error("PMAP value outside [0,1] at index " +
                               std::to_string(i) + ": " + path);
  }
  return ProbMap(int(w), int(h), int(c), std::move(values));
}

void save_pmap(const ProbMap& map, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open file for writing: " + path);
  out.write(kMagic, 4);
  write_u32_le(std::uint32_t(map.width()), out);
  write_u32_le(std::uint32_t(map.height()), out);
  write_u32_le(std::uint32_t(map.channels()), out);
  for (float v : map.data()) write_u32_le(std::bit_cast<std::uint32_t>(v), out);
  if (!out) throw std::runtime_error("failed to write PMAP: " + path);
}

ProbMap load_probmap(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  char head[4] = {};
  in.read(head, 4);
  in.close();
  if (std::memcmp(head, kMagic, 4) == 0) return load_pmap(path);
  return load_probmap_png16(path);
}

}  // namespace derm

#include "fvec.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace embedkit::data {

namespace {

constexpr char kMagic[4] = {'F', 'V', 'E', 'C'};
constexpr std::size_t kHeaderBytes = 16;

std::uint32_t read_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

void write_u32_le(std::ostream& os, std::uint32_t v) {
  const unsigned char bytes[4] = {
      static_cast<unsigned char>(v & 0xff), static_cast<unsigned char>((v >> 8) & 0xff),
      static_cast<unsigned char>((v >> 16) & 0xff), static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(bytes), 4);
}

float f32_from_le(const unsigned char* p) {
  const std::uint32_t bits = read_u32_le(p);
  float f;
  std::memcpy(&f, &bits, sizeof(f));
  return f;
}

std::uint32_t f32_to_bits(float f) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, sizeof(bits));
  return bits;
}

}  // namespace

num::Matrix load_blob(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrCode::Io, "load_blob: cannot open ", path.string());

  unsigned char header[kHeaderBytes];
  in.read(reinterpret_cast<char*>(header), kHeaderBytes);
  if (in.gcount() != static_cast<std::streamsize>(kHeaderBytes)) {
    fail(ErrCode::Format, "load_blob: ", path.string(), ": truncated header (", in.gcount(),
         " of ", kHeaderBytes, " bytes)");
  }
  if (std::memcmp(header, kMagic, 4) != 0) {
    fail(ErrCode::Format, "load_blob: ", path.string(), ": bad magic bytes at offset 0");
  }
  const std::uint32_t count = read_u32_le(header + 4);
  const std::uint32_t dim = read_u32_le(header + 8);
  if (dim == 0) fail(ErrCode::Format, "load_blob: ", path.string(), ": dim is zero");

  const std::size_t n_values = static_cast<std::size_t>(count) * dim;
  std::vector<unsigned char> raw(n_values * 4);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  const std::size_t got = static_cast<std::size_t>(in.gcount());
  if (got != raw.size()) {
    fail(ErrCode::Format, "load_blob: ", path.string(), ": truncated at byte offset ",
         kHeaderBytes + got, " (expected ", kHeaderBytes + raw.size(), " bytes total)");
  }

  num::Matrix values(count, dim);
  for (std::size_t i = 0; i < n_values; ++i) {
    const float f = f32_from_le(raw.data() + i * 4);
    if (!std::isfinite(f)) {
      fail(ErrCode::Format, "load_blob: ", path.string(), ": non-finite value at byte offset ",
           kHeaderBytes + i * 4);
    }
    values.flat()[i] = static_cast<double>(f);
  }
  return values;
}

void save_blob(const std::filesystem::path& path, const num::Matrix& values) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrCode::Io, "save_blob: cannot open ", path.string(), " for writing");

  out.write(kMagic, 4);
  write_u32_le(out, static_cast<std::uint32_t>(values.rows()));
  write_u32_le(out, static_cast<std::uint32_t>(values.cols()));
  write_u32_le(out, 0);
  for (double v : values.flat()) {
    write_u32_le(out, f32_to_bits(static_cast<float>(v)));
  }
  if (!out) fail(ErrCode::Io, "save_blob: write failed for ", path.string());
}

}  // namespace embedkit::data

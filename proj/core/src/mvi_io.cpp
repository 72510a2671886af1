#include "mvd/mvi_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "mvd/errors.hpp"

namespace mvd {
namespace {

constexpr char kMagic[4] = {'M', 'V', 'I', '1'};
constexpr std::size_t kMaxTag = 32;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double d) {
  const auto v = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_le(const std::uint8_t* p, int n) {
  std::uint64_t v = 0;
  for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

void check_valid(const ManifoldImage& image) {
  const std::size_t bad = image.first_invalid_pixel();
  if (bad < image.size()) {
    throw ValidationError("pixel " + std::to_string(bad) + " is not a valid " + image.manifold().tag() + " point",
                          bad);
  }
}

}  // namespace

std::vector<std::uint8_t> encode_mvi(const ManifoldImage& image) {
  check_valid(image);
  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  const std::string tag = image.manifold().tag();
  out.insert(out.end(), tag.begin(), tag.end());
  out.push_back(0);
  put_u32(out, static_cast<std::uint32_t>(image.rows()));
  put_u32(out, static_cast<std::uint32_t>(image.cols()));
  out.reserve(out.size() + image.data().size() * 8);
  for (double d : image.data()) put_f64(out, d);
  return out;
}

ManifoldImage decode_mvi(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) throw ParseError("bad magic (expected MVI1)", 0);
  std::size_t pos = 4;
  std::string tag;
  while (true) {
    if (pos >= bytes.size()) throw ParseError("unterminated manifold tag", pos);
    if (bytes[pos] == 0) break;
    if (tag.size() >= kMaxTag) throw ParseError("manifold tag too long", pos);
    tag.push_back(static_cast<char>(bytes[pos++]));
  }
  Manifold m;
  try {
    m = Manifold::from_tag(tag);
  } catch (const Error&) {
    throw ParseError("unknown manifold tag '" + tag + "'", 4);
  }
  ++pos;
  if (bytes.size() < pos + 8) throw ParseError("truncated header (dimensions)", bytes.size());
  const auto rows = get_le(bytes.data() + pos, 4);
  const auto cols = get_le(bytes.data() + pos + 4, 4);
  pos += 8;
  if (rows > 0x7fffffffULL || cols > 0x7fffffffULL) throw ParseError("image dimensions too large", pos - 8);
  const std::uint64_t reals = rows * cols * static_cast<std::uint64_t>(m.ambient_len());
  const std::uint64_t need = pos + reals * 8;
  if (bytes.size() < need) throw ParseError("truncated payload", bytes.size());
  if (bytes.size() > need) throw ParseError("trailing bytes after payload", need);
  std::vector<double> data(reals);
  for (std::uint64_t i = 0; i < reals; ++i) data[i] = std::bit_cast<double>(get_le(bytes.data() + pos + 8 * i, 8));
  ManifoldImage img(m, static_cast<int>(rows), static_cast<int>(cols), std::move(data));
  check_valid(img);
  return img;
}

void write_mvi(const ManifoldImage& image, const std::string& path) {
  const std::vector<std::uint8_t> bytes = encode_mvi(image);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error("write to '" + path + "' failed");
}

ManifoldImage read_mvi(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "'");
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return decode_mvi(bytes);
}

}  // namespace mvd

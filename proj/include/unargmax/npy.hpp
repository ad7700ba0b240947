#pragma once

// Reader/writer for the NPY v1.0 array container restricted to little-endian
// float32/float64 payloads.

#include <bit>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "unargmax/error.hpp"

namespace unargmax::npy {

inline constexpr char kMagic[] = "\x93NUMPY";
inline constexpr std::size_t kMagicLen = 6;
inline constexpr std::size_t kPreambleLen = 10;  // magic + version + header length

struct Array {
  std::vector<std::size_t> shape;
  std::vector<double> data;  // C order, widened to double
  bool source_was_float32 = false;
  bool source_was_fortran = false;

  std::size_t rank() const { return shape.size(); }
  std::size_t size() const {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
  }
};

namespace detail {

struct Header {
  std::string descr;
  bool fortran_order = false;
  std::vector<std::size_t> shape;
};

class DictParser {
 public:
  explicit DictParser(std::string_view text) : text_(text) {}

  Header parse() {
    Header header;
    bool have_descr = false, have_order = false, have_shape = false;
    skip_ws();
    expect('{');
    while (true) {
      skip_ws();
      if (peek() == '}') break;
      std::string key = parse_string();
      skip_ws();
      expect(':');
      skip_ws();
      if (key == "descr") {
        header.descr = parse_string();
        have_descr = true;
      } else if (key == "fortran_order") {
        header.fortran_order = parse_bool();
        have_order = true;
      } else if (key == "shape") {
        header.shape = parse_tuple();
        have_shape = true;
      } else {
        throw ParseError("unexpected key '" + key + "' in NPY header");
      }
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      skip_ws();
      if (peek() != '}') throw ParseError("expected ',' or '}' in NPY header");
    }
    if (!have_descr || !have_order || !have_shape) {
      throw ParseError("NPY header is missing descr, fortran_order or shape");
    }
    return header;
  }

 private:
  char peek() const {
    if (pos_ >= text_.size()) throw ParseError("truncated NPY header");
    return text_[pos_];
  }
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  void expect(char c) {
    if (peek() != c) throw ParseError(std::string("expected '") + c + "' in NPY header");
    ++pos_;
  }
  std::string parse_string() {
    char quote = peek();
    if (quote != '\'' && quote != '"') throw ParseError("expected quoted string in NPY header");
    ++pos_;
    auto end = text_.find(quote, pos_);
    if (end == std::string_view::npos) throw ParseError("unterminated string in NPY header");
    std::string out(text_.substr(pos_, end - pos_));
    pos_ = end + 1;
    return out;
  }
  bool parse_bool() {
    if (text_.substr(pos_, 4) == "True") {
      pos_ += 4;
      return true;
    }
    if (text_.substr(pos_, 5) == "False") {
      pos_ += 5;
      return false;
    }
    throw ParseError("expected True or False for fortran_order");
  }
  std::vector<std::size_t> parse_tuple() {
    std::vector<std::size_t> dims;
    expect('(');
    while (true) {
      skip_ws();
      if (peek() == ')') {
        ++pos_;
        return dims;
      }
      if (!std::isdigit(static_cast<unsigned char>(peek()))) {
        throw ParseError("non-integer dimension in NPY shape");
      }
      std::size_t v = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        v = v * 10 + static_cast<std::size_t>(text_[pos_] - '0');
        ++pos_;
      }
      dims.push_back(v);
      skip_ws();
      if (peek() == ',') ++pos_;
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

inline std::uint16_t read_le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

template <typename T>
T load_le(const unsigned char* p) {
  static_assert(std::endian::native == std::endian::little, "big-endian hosts unsupported");
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

}  // namespace detail

inline Array parse(std::span<const unsigned char> bytes) {
  if (bytes.size() < kPreambleLen || std::memcmp(bytes.data(), kMagic, kMagicLen) != 0) {
    throw ParseError("missing NPY magic string");
  }
  if (bytes[6] != 0x01 || bytes[7] != 0x00) {
    throw ParseError("unsupported NPY version " + std::to_string(bytes[6]) + "." +
                     std::to_string(bytes[7]) + " (only 1.0 is accepted)");
  }
  const std::size_t header_len = detail::read_le16(bytes.data() + 8);
  if (bytes.size() < kPreambleLen + header_len) throw ParseError("truncated NPY header");
  std::string_view text(reinterpret_cast<const char*>(bytes.data() + kPreambleLen), header_len);
  detail::Header header = detail::DictParser(text).parse();

  std::size_t elem = 0;
  if (header.descr == "<f8") {
    elem = 8;
  } else if (header.descr == "<f4") {
    elem = 4;
  } else {
    throw ParseError("unsupported NPY element type '" + header.descr + "' (need <f4 or <f8)");
  }

  Array out;
  out.shape = header.shape;
  out.source_was_float32 = elem == 4;
  out.source_was_fortran = header.fortran_order;
  const std::size_t count = out.size();
  const std::size_t offset = kPreambleLen + header_len;
  if (bytes.size() - offset != count * elem) {
    throw ParseError("NPY payload has " + std::to_string(bytes.size() - offset) +
                     " bytes, expected " + std::to_string(count * elem));
  }
  std::vector<double> raw(count);
  const unsigned char* p = bytes.data() + offset;
  for (std::size_t i = 0; i < count; ++i, p += elem) {
    raw[i] = elem == 8 ? detail::load_le<double>(p) : static_cast<double>(detail::load_le<float>(p));
  }

  if (header.fortran_order && out.rank() > 1) {
    // Column-major to row-major: the flat index of element (i0..ik) is
    // sum i_j * stride_j with stride_0 = 1 in fortran order.
    const std::size_t rank = out.rank();
    std::vector<std::size_t> fstride(rank, 1);
    for (std::size_t j = 1; j < rank; ++j) fstride[j] = fstride[j - 1] * out.shape[j - 1];
    out.data.resize(count);
    std::vector<std::size_t> idx(rank, 0);
    for (std::size_t c = 0; c < count; ++c) {
      std::size_t f = 0;
      for (std::size_t j = 0; j < rank; ++j) f += idx[j] * fstride[j];
      out.data[c] = raw[f];
      for (std::size_t j = rank; j-- > 0;) {
        if (++idx[j] < out.shape[j]) break;
        idx[j] = 0;
      }
    }
  } else {
    out.data = std::move(raw);
  }
  return out;
}

inline Array read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IOError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return parse(bytes);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

// Encodes a C-order float64 array. The header is padded with spaces so the
// payload starts on a 64-byte boundary, as numpy does.
inline std::vector<unsigned char> encode(std::span<const std::size_t> shape, std::span<const double> data) {
  std::string dict = "{'descr': '<f8', 'fortran_order': False, 'shape': (";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    dict += std::to_string(shape[i]);
    if (shape.size() == 1 || i + 1 < shape.size()) dict += ",";
    if (i + 1 < shape.size()) dict += " ";
  }
  dict += "), }";
  std::size_t total = kPreambleLen + dict.size() + 1;
  std::size_t padded = (total + 63) / 64 * 64;
  dict.append(padded - total, ' ');
  dict += '\n';
  if (dict.size() > 0xFFFF) throw ParseError("NPY header too long for version 1.0");

  std::vector<unsigned char> out;
  out.reserve(kPreambleLen + dict.size() + data.size() * 8);
  out.insert(out.end(), kMagic, kMagic + kMagicLen);
  out.push_back(0x01);
  out.push_back(0x00);
  out.push_back(static_cast<unsigned char>(dict.size() & 0xFF));
  out.push_back(static_cast<unsigned char>((dict.size() >> 8) & 0xFF));
  out.insert(out.end(), dict.begin(), dict.end());
  const auto* raw = reinterpret_cast<const unsigned char*>(data.data());
  out.insert(out.end(), raw, raw + data.size() * sizeof(double));
  return out;
}

inline void write(const std::filesystem::path& path, std::span<const std::size_t> shape,
                  std::span<const double> data) {
  auto bytes = encode(shape, data);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IOError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IOError("failed writing " + path.string());
}

}  // namespace unargmax::npy

#pragma once

// Netpbm (PPM P3/P6, PGM P2/P5) codecs and ground-truth disparity encodings.

#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sparsedisp/grid.hpp"

namespace sparsedisp {

enum class ImageIoErrc {
  file_not_found,
  io_failure,
  bad_magic,
  bad_header,
  truncated_payload,
  unsupported_maxval,
  size_mismatch,
  value_out_of_range,
};

inline const char* to_string(ImageIoErrc c) {
  switch (c) {
    case ImageIoErrc::file_not_found: return "file not found";
    case ImageIoErrc::io_failure: return "i/o failure";
    case ImageIoErrc::bad_magic: return "bad magic number";
    case ImageIoErrc::bad_header: return "malformed header";
    case ImageIoErrc::truncated_payload: return "truncated payload";
    case ImageIoErrc::unsupported_maxval: return "unsupported maxval";
    case ImageIoErrc::size_mismatch: return "payload size disagrees with header";
    case ImageIoErrc::value_out_of_range: return "value out of range";
  }
  return "unknown";
}

class ImageIoError : public std::runtime_error {
 public:
  ImageIoError(ImageIoErrc code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code) {}
  ImageIoErrc code() const { return code_; }

 private:
  ImageIoErrc code_;
};

namespace detail {

struct NetpbmHeader {
  char kind = 0;  // '2', '3', '5' or '6'
  int width = 0;
  int height = 0;
  int maxval = 0;
  std::size_t payload_offset = 0;
};

class HeaderCursor {
 public:
  HeaderCursor(std::string_view bytes, const std::string& source)
      : bytes_(bytes), source_(source) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  /// Reads an unsigned decimal integer; false at end of input.
  bool next_uint(long long& out) {
    skip_space_and_comments();
    if (pos_ >= bytes_.size()) return false;
    if (!std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      throw ImageIoError(ImageIoErrc::bad_header,
                         source_ + ": expected integer at byte " + std::to_string(pos_));
    }
    long long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > 1'000'000'000LL) {
        throw ImageIoError(ImageIoErrc::bad_header, source_ + ": integer too large");
      }
      ++pos_;
    }
    out = v;
    return true;
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }
  bool at_end() const { return pos_ >= bytes_.size(); }
  char peek() const { return bytes_[pos_]; }

 private:
  std::string_view bytes_;
  const std::string& source_;
  std::size_t pos_ = 0;
};

inline std::string slurp(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw ImageIoError(ImageIoErrc::file_not_found, path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageIoError(ImageIoErrc::io_failure, "cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw ImageIoError(ImageIoErrc::io_failure, "read error on " + path.string());
  return bytes;
}

inline NetpbmHeader parse_header(HeaderCursor& cur, std::string_view bytes,
                                 std::string_view allowed_kinds, const std::string& source) {
  if (bytes.size() < 2 || bytes[0] != 'P' ||
      allowed_kinds.find(bytes[1]) == std::string_view::npos) {
    throw ImageIoError(ImageIoErrc::bad_magic, source);
  }
  NetpbmHeader h;
  h.kind = bytes[1];
  cur.advance(2);
  if (!cur.at_end() && !std::isspace(static_cast<unsigned char>(cur.peek())) && cur.peek() != '#') {
    throw ImageIoError(ImageIoErrc::bad_magic, source);
  }
  long long w = 0, ht = 0, mv = 0;
  if (!cur.next_uint(w) || !cur.next_uint(ht) || !cur.next_uint(mv)) {
    throw ImageIoError(ImageIoErrc::bad_header, source + ": incomplete header");
  }
  if (w <= 0 || ht <= 0) {
    throw ImageIoError(ImageIoErrc::bad_header, source + ": non-positive dimensions");
  }
  if (mv <= 0 || mv > 65535) {
    throw ImageIoError(ImageIoErrc::unsupported_maxval, source + ": maxval " + std::to_string(mv));
  }
  h.width = static_cast<int>(w);
  h.height = static_cast<int>(ht);
  h.maxval = static_cast<int>(mv);
  // Binary payload begins after exactly one whitespace byte.
  if (h.kind == '5' || h.kind == '6') {
    if (cur.at_end() || !std::isspace(static_cast<unsigned char>(cur.peek()))) {
      throw ImageIoError(ImageIoErrc::bad_header, source + ": missing separator after maxval");
    }
    cur.advance(1);
  }
  h.payload_offset = cur.pos();
  return h;
}

/// Decodes `count` samples following the header, in either ASCII or binary
/// form. Rejects short and over-long payloads.
inline std::vector<std::uint16_t> read_samples(std::string_view bytes, const NetpbmHeader& h,
                                               std::size_t count, HeaderCursor& cur,
                                               const std::string& source) {
  std::vector<std::uint16_t> out;
  out.reserve(count);
  const bool ascii = h.kind == '2' || h.kind == '3';
  if (ascii) {
    long long v = 0;
    while (out.size() < count) {
      if (!cur.next_uint(v)) {
        throw ImageIoError(ImageIoErrc::truncated_payload,
                           source + ": expected " + std::to_string(count) + " samples, got " +
                               std::to_string(out.size()));
      }
      if (v > h.maxval) {
        throw ImageIoError(ImageIoErrc::value_out_of_range,
                           source + ": sample " + std::to_string(v) + " exceeds maxval");
      }
      out.push_back(static_cast<std::uint16_t>(v));
    }
    cur.skip_space_and_comments();
    if (!cur.at_end()) {
      throw ImageIoError(ImageIoErrc::size_mismatch, source + ": trailing data after samples");
    }
    return out;
  }
  const std::size_t bytes_per = h.maxval > 255 ? 2 : 1;
  const std::size_t need = count * bytes_per;
  const std::size_t have = bytes.size() - h.payload_offset;
  if (have < need) {
    throw ImageIoError(ImageIoErrc::truncated_payload,
                       source + ": need " + std::to_string(need) + " payload bytes, have " +
                           std::to_string(have));
  }
  if (have > need) {
    throw ImageIoError(ImageIoErrc::size_mismatch,
                       source + ": " + std::to_string(have - need) + " extra payload bytes");
  }
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + h.payload_offset);
  for (std::size_t i = 0; i < count; ++i) {
    unsigned v = bytes_per == 2 ? (unsigned(p[2 * i]) << 8) | p[2 * i + 1] : p[i];
    if (v > static_cast<unsigned>(h.maxval)) {
      throw ImageIoError(ImageIoErrc::value_out_of_range,
                         source + ": sample " + std::to_string(v) + " exceeds maxval");
    }
    out.push_back(static_cast<std::uint16_t>(v));
  }
  return out;
}

inline void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ImageIoError(ImageIoErrc::io_failure, "cannot create " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ImageIoError(ImageIoErrc::io_failure, "write error on " + path.string());
}

}  // namespace detail

/// Decodes a P3 or P6 file. Only maxval 255 is accepted.
inline RgbImage decode_ppm(std::string_view bytes, const std::string& source = "<memory>") {
  detail::HeaderCursor cur(bytes, source);
  auto h = detail::parse_header(cur, bytes, "36", source);
  if (h.maxval != 255) {
    throw ImageIoError(ImageIoErrc::unsupported_maxval,
                       source + ": PPM maxval must be 255, got " + std::to_string(h.maxval));
  }
  const std::size_t n = static_cast<std::size_t>(h.width) * h.height;
  auto samples = detail::read_samples(bytes, h, n * 3, cur, source);
  RgbImage img(h.width, h.height);
  for (std::size_t i = 0; i < n; ++i) {
    img.data()[i] = {static_cast<std::uint8_t>(samples[3 * i]),
                     static_cast<std::uint8_t>(samples[3 * i + 1]),
                     static_cast<std::uint8_t>(samples[3 * i + 2])};
  }
  return img;
}

inline GrayImage decode_pgm(std::string_view bytes, const std::string& source = "<memory>") {
  detail::HeaderCursor cur(bytes, source);
  auto h = detail::parse_header(cur, bytes, "25", source);
  const std::size_t n = static_cast<std::size_t>(h.width) * h.height;
  auto samples = detail::read_samples(bytes, h, n, cur, source);
  return GrayImage{Grid<std::uint16_t>(h.width, h.height, std::move(samples)), h.maxval};
}

inline RgbImage read_ppm(const std::filesystem::path& path) {
  return decode_ppm(detail::slurp(path), path.string());
}

inline GrayImage read_pgm(const std::filesystem::path& path) {
  return decode_pgm(detail::slurp(path), path.string());
}

/// Binary P5 encoding with maxval 255.
inline std::string encode_pgm(const GrayImage& img) {
  if (img.maxval != 255) {
    throw ImageIoError(ImageIoErrc::unsupported_maxval, "writer emits maxval 255 only");
  }
  std::string out = "P5\n" + std::to_string(img.width()) + " " +
                    std::to_string(img.height()) + "\n255\n";
  out.reserve(out.size() + img.samples.size());
  for (auto v : img.samples) {
    if (v > 255) throw ImageIoError(ImageIoErrc::value_out_of_range, "sample exceeds 255");
    out.push_back(static_cast<char>(v));
  }
  return out;
}

inline std::string encode_ppm(const RgbImage& img) {
  std::string out = "P6\n" + std::to_string(img.width()) + " " +
                    std::to_string(img.height()) + "\n255\n";
  out.reserve(out.size() + img.size() * 3);
  for (const auto& px : img) {
    for (auto c : px) out.push_back(static_cast<char>(c));
  }
  return out;
}

inline void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
  detail::write_bytes(path, encode_pgm(img));
}

inline void write_ppm(const std::filesystem::path& path, const RgbImage& img) {
  detail::write_bytes(path, encode_ppm(img));
}

/// Middlebury ground truth stores disparity × scale; 0 means unknown and
/// stays 0.
inline DisparityMap decode_ground_truth(const GrayImage& gray, int scale) {
  if (scale < 1) throw std::invalid_argument("ground-truth scale must be >= 1");
  DisparityMap out(gray.width(), gray.height());
  auto src = gray.samples.data().begin();
  for (auto& v : out) {
    v = static_cast<int>(std::lround(static_cast<double>(*src++) / scale));
  }
  return out;
}

inline GrayImage encode_disparity(const DisparityMap& map, int scale) {
  if (scale < 1) throw std::invalid_argument("disparity scale must be >= 1");
  GrayImage out{Grid<std::uint16_t>(map.width(), map.height()), 255};
  auto dst = out.samples.data().begin();
  for (int v : map) {
    if (v < 0) {
      throw ImageIoError(ImageIoErrc::value_out_of_range,
                         "cannot encode undetermined disparity; map must be dense");
    }
    if (static_cast<long long>(v) * scale > 255) {
      throw ImageIoError(ImageIoErrc::value_out_of_range,
                         "disparity " + std::to_string(v) + " x scale " +
                             std::to_string(scale) + " exceeds 255");
    }
    *dst++ = static_cast<std::uint16_t>(v * scale);
  }
  return out;
}

}  // namespace sparsedisp

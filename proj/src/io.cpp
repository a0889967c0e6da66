#include "pointdr/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include "pointdr/errors.hpp"

namespace pointdr {
namespace {

std::vector<unsigned char> load_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto end = in.tellg();
  if (end < 0) throw FormatError("cannot determine size of " + path.string());
  in.seekg(0, std::ios::beg);
  std::vector<unsigned char> buf(static_cast<std::size_t>(end));
  if (!buf.empty()) {
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
    if (!in) throw FormatError("short read from " + path.string());
  }
  return buf;
}

std::uint32_t read_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 |
         static_cast<std::uint32_t>(p[3]) << 24;
}

float read_f32le(const unsigned char* p) {
  return std::bit_cast<float>(read_u32le(p));
}

void append_u32le(std::vector<unsigned char>& out, std::uint32_t v) {
  out.push_back(static_cast<unsigned char>(v));
  out.push_back(static_cast<unsigned char>(v >> 8));
  out.push_back(static_cast<unsigned char>(v >> 16));
  out.push_back(static_cast<unsigned char>(v >> 24));
}

void append_f32le(std::vector<unsigned char>& out, float f) {
  append_u32le(out, std::bit_cast<std::uint32_t>(f));
}

void store_file(const std::filesystem::path& path,
                const std::vector<unsigned char>& buf) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
  if (!out) throw FormatError("short write to " + path.string());
}

}  // namespace

PointCloud read_scan(const std::filesystem::path& path) {
  const auto buf = load_file(path);
  if (buf.size() % 16 != 0) {
    throw FormatError(path.string() + ": size " + std::to_string(buf.size()) +
                      " is not a multiple of the 16-byte point record");
  }
  PointCloud cloud;
  const std::size_t n = buf.size() / 16;
  cloud.points.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned char* rec = buf.data() + i * 16;
    Point& p = cloud.points[i];
    p.x = read_f32le(rec);
    p.y = read_f32le(rec + 4);
    p.z = read_f32le(rec + 8);
    p.intensity = read_f32le(rec + 12);
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z) ||
        !std::isfinite(p.intensity)) {
      throw FormatError(path.string() + ": non-finite value in point " +
                        std::to_string(i));
    }
  }
  return cloud;
}

void write_scan(const PointCloud& cloud, const std::filesystem::path& path) {
  std::vector<unsigned char> buf;
  buf.reserve(cloud.size() * 16);
  for (const Point& p : cloud.points) {
    append_f32le(buf, static_cast<float>(p.x));
    append_f32le(buf, static_cast<float>(p.y));
    append_f32le(buf, static_cast<float>(p.z));
    append_f32le(buf, static_cast<float>(p.intensity));
  }
  store_file(path, buf);
}

std::vector<TrainId> read_labels(const std::filesystem::path& path,
                                 const LabelMap& map) {
  const auto buf = load_file(path);
  if (buf.size() % 4 != 0) {
    throw FormatError(path.string() + ": size " + std::to_string(buf.size()) +
                      " is not a multiple of the 4-byte label record");
  }
  std::vector<TrainId> labels(buf.size() / 4);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::uint32_t word = read_u32le(buf.data() + i * 4);
    labels[i] = map.train_id(static_cast<std::uint16_t>(word & 0xffffu));
  }
  return labels;
}

void write_labels(std::span<const TrainId> labels,
                  const std::filesystem::path& path, const LabelMap& map) {
  std::vector<unsigned char> buf;
  buf.reserve(labels.size() * 4);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    // canonical_raw rejects out-of-range ids (e.g. 255).
    append_u32le(buf, map.canonical_raw(labels[i]));
  }
  store_file(path, buf);
}

}  // namespace pointdr

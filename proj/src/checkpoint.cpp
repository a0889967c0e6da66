#include "pointdr/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pointdr/errors.hpp"

namespace pointdr {
namespace {

constexpr char kMagic[4] = {'P', 'D', 'R', 'C'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  void u32(std::uint32_t v) {
    buf_.push_back(static_cast<unsigned char>(v));
    buf_.push_back(static_cast<unsigned char>(v >> 8));
    buf_.push_back(static_cast<unsigned char>(v >> 16));
    buf_.push_back(static_cast<unsigned char>(v >> 24));
  }
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    u32(static_cast<std::uint32_t>(bits));
    u32(static_cast<std::uint32_t>(bits >> 32));
  }
  void f32_array(const std::vector<double>& v) {
    for (const double x : v) f32(static_cast<float>(x));
  }
  const std::vector<unsigned char>& bytes() const { return buf_; }

 private:
  std::vector<unsigned char> buf_;
};

class Reader {
 public:
  Reader(std::vector<unsigned char> buf, std::string name)
      : buf_(std::move(buf)), name_(std::move(name)) {}

  std::uint32_t u32() {
    need(4);
    const unsigned char* p = buf_.data() + pos_;
    pos_ += 4;
    return static_cast<std::uint32_t>(p[0]) |
           static_cast<std::uint32_t>(p[1]) << 8 |
           static_cast<std::uint32_t>(p[2]) << 16 |
           static_cast<std::uint32_t>(p[3]) << 24;
  }
  std::uint8_t u8() {
    need(1);
    return buf_[pos_++];
  }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() {
    const std::uint64_t lo = u32();
    const std::uint64_t hi = u32();
    return std::bit_cast<double>(lo | hi << 32);
  }
  void f64_from_f32_array(std::vector<double>& out) {
    for (double& x : out) x = f32();
  }
  void expect_end() const {
    if (pos_ != buf_.size()) {
      throw FormatError(name_ + ": " + std::to_string(buf_.size() - pos_) +
                        " trailing bytes");
    }
  }

 private:
  void need(std::size_t k) {
    if (pos_ + k > buf_.size()) throw FormatError(name_ + ": truncated checkpoint");
  }

  std::vector<unsigned char> buf_;
  std::string name_;
  std::size_t pos_ = 0;
};

void write_layers(Writer& w, const std::vector<Linear>& layers) {
  for (const Linear& l : layers) {
    w.f32_array(l.w);
    w.f32_array(l.b);
  }
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Model& model,
                     const MemoryBank& bank) {
  const ModelConfig& cfg = model.config();
  if (bank.dim() != cfg.embed_dim || bank.classes() != cfg.num_classes) {
    throw std::invalid_argument("bank shape does not match the model");
  }
  Writer w;
  for (const char c : kMagic) w.u8(static_cast<std::uint8_t>(c));
  w.u32(kVersion);
  w.u32(static_cast<std::uint32_t>(cfg.feature_dim));
  w.u32(static_cast<std::uint32_t>(cfg.embed_dim));
  w.u32(static_cast<std::uint32_t>(cfg.num_classes));
  w.u32(static_cast<std::uint32_t>(cfg.encoder_hidden.size()));
  for (const std::size_t h : cfg.encoder_hidden) {
    w.u32(static_cast<std::uint32_t>(h));
  }
  w.f64(cfg.voxel_size);
  const auto scale = cfg.resolved_feature_scale();
  w.u32(static_cast<std::uint32_t>(scale.size()));
  for (const double s : scale) w.f64(s);
  w.f64(bank.momentum());
  write_layers(w, model.encoder());
  write_layers(w, model.projector());
  w.f32_array(model.classifier().w);
  w.f32_array(model.classifier().b);
  w.f32_array(bank.data());
  for (const std::uint8_t f : bank.init_flags()) w.u8(f);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(w.bytes().data()),
            static_cast<std::streamsize>(w.bytes().size()));
  if (!out) throw FormatError("short write to " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  Reader r(std::move(buf), path.string());

  for (const char c : kMagic) {
    if (r.u8() != static_cast<std::uint8_t>(c)) {
      throw FormatError(path.string() + ": bad magic");
    }
  }
  if (const auto v = r.u32(); v != kVersion) {
    throw FormatError(path.string() + ": unsupported version " + std::to_string(v));
  }

  ModelConfig cfg;
  cfg.feature_dim = r.u32();
  cfg.embed_dim = r.u32();
  cfg.num_classes = r.u32();
  cfg.encoder_hidden.resize(r.u32());
  for (std::size_t& h : cfg.encoder_hidden) h = r.u32();
  cfg.voxel_size = r.f64();
  cfg.feature_scale.resize(r.u32());
  for (double& s : cfg.feature_scale) s = r.f64();
  const double bank_momentum = r.f64();
  cfg.validate();

  Model model(cfg, 0);
  for (auto t : model.tensors()) r.f64_from_f32_array(*t.value);

  MemoryBank bank(cfg.embed_dim, cfg.num_classes, bank_momentum);
  std::vector<double> data(cfg.embed_dim * cfg.num_classes);
  r.f64_from_f32_array(data);
  std::vector<std::uint8_t> init(cfg.num_classes);
  for (std::uint8_t& f : init) f = r.u8();
  bank.restore(std::move(data), std::move(init));

  r.expect_end();
  return Checkpoint{std::move(model), std::move(bank)};
}

}  // namespace pointdr

#include "oxdgm/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace oxdgm {
namespace {

constexpr char kMagic[8] = {'O', 'X', 'D', 'G', 'M', 'C', 'P', '1'};

class Writer {
 public:
  explicit Writer(const std::string& path)
      : out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  }
  void bytes(const void* p, std::size_t n) {
    out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  }
  void u32(std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(b, 4);
  }
  void u64(std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(b, 8);
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  void close() {
    out_.close();
    if (!out_) throw std::runtime_error("checkpoint write failed");
  }

 private:
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : in_(path, std::ios::binary) {
    if (!in_) throw std::runtime_error("cannot open checkpoint: " + path);
  }
  void bytes(void* p, std::size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (in_.gcount() != static_cast<std::streamsize>(n))
      throw std::runtime_error("truncated checkpoint");
  }
  std::uint32_t u32() {
    unsigned char b[4];
    bytes(b, 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    unsigned char b[8];
    bytes(b, 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint32_t n = u32();
    if (n > (1u << 20)) throw std::runtime_error("corrupt checkpoint: oversized string");
    std::string s(n, '\0');
    if (n > 0) bytes(s.data(), n);
    return s;
  }

 private:
  std::ifstream in_;
};

void put_layer_cfg(Writer& w, const NeuronLayerConfig& c) {
  w.f64(c.gain);
  w.u32(static_cast<std::uint32_t>(c.ref_mode));
  w.u32(static_cast<std::uint32_t>(c.state_commit));
  w.f64(c.device.mu_on);
  w.f64(c.device.sigma_on);
  w.f64(c.device.mu_off);
  w.f64(c.device.sigma_off);
  w.u32(static_cast<std::uint32_t>(c.device.dist));
  w.f64(c.device.v_read);
  w.f64(c.device.r_series);
}

NeuronLayerConfig get_layer_cfg(Reader& r, int size) {
  NeuronLayerConfig c;
  c.size = size;
  c.gain = r.f64();
  c.ref_mode = static_cast<RefMode>(r.u32());
  c.state_commit = static_cast<StateCommit>(r.u32());
  c.device.mu_on = r.f64();
  c.device.sigma_on = r.f64();
  c.device.mu_off = r.f64();
  c.device.sigma_off = r.f64();
  c.device.dist = static_cast<ResistanceDist>(r.u32());
  c.device.v_read = r.f64();
  c.device.r_series = r.f64();
  return c;
}

void put_normalizer(Writer& w, const NormalizerConfig& n) {
  w.u32(static_cast<std::uint32_t>(n.gain_levels.size()));
  for (const auto& [res, g] : n.gain_levels) {
    w.f64(res);
    w.f64(g);
  }
  w.u32(static_cast<std::uint32_t>(n.bias_levels.size()));
  for (const auto& [res, b] : n.bias_levels) {
    w.f64(res);
    w.f64(b);
  }
  w.f64(n.selected_level);
}

NormalizerConfig get_normalizer(Reader& r) {
  NormalizerConfig n;
  const std::uint32_t ng = r.u32();
  if (ng > (1u << 16)) throw std::runtime_error("corrupt checkpoint: normalizer table");
  n.gain_levels.resize(ng);
  for (auto& [res, g] : n.gain_levels) {
    res = r.f64();
    g = r.f64();
  }
  const std::uint32_t nb = r.u32();
  if (nb > (1u << 16)) throw std::runtime_error("corrupt checkpoint: normalizer table");
  n.bias_levels.resize(nb);
  for (auto& [res, b] : n.bias_levels) {
    res = r.f64();
    b = r.f64();
  }
  n.selected_level = r.f64();
  return n;
}

}  // namespace

void save_checkpoint(const DgmModel& model, const std::string& path) {
  const NetworkSpec& spec = model.spec();
  Writer w(path);
  w.bytes(kMagic, sizeof kMagic);
  w.u32(static_cast<std::uint32_t>(spec.kind));
  w.u32(static_cast<std::uint32_t>(spec.layer_sizes.size()));
  for (int s : spec.layer_sizes) w.i32(s);
  w.i32(spec.quant.bits);
  w.f64(spec.quant.w_min);
  w.f64(spec.quant.w_max);
  w.str(spec.name);
  for (const auto& c : spec.layer_cfgs) put_layer_cfg(w, c);
  for (const auto& c : spec.block_cfgs) {
    w.f64(c.epsilon);
    w.i32(c.epochs);
    w.i32(c.batch_size);
    w.f64(c.momentum);
    w.f64(c.weight_decay);
    w.u32(c.use_bias ? 1 : 0);
  }
  w.u32(static_cast<std::uint32_t>(spec.normalizers.size()));
  for (const auto& n : spec.normalizers) put_normalizer(w, n);

  for (std::size_t l = 0; l < model.n_blocks(); ++l) {
    const RbmBlock& blk = model.block(l);
    for (std::uint32_t code : blk.weights().codes()) w.u32(code);
    for (std::uint32_t f : blk.weights().flip_counters()) w.u32(f);
    for (double b : blk.v_bias()) w.f64(b);
    for (double b : blk.h_bias()) w.f64(b);
    for (int i = 0; i < blk.n_visible(); ++i) w.u64(blk.visible().state_switches(i));
    for (int i = 0; i < blk.n_visible(); ++i) w.u64(blk.visible().ref_switches(i));
    for (int j = 0; j < blk.n_hidden(); ++j) w.u64(blk.hidden().state_switches(j));
    for (int j = 0; j < blk.n_hidden(); ++j) w.u64(blk.hidden().ref_switches(j));
    for (std::uint64_t c : blk.bookkeeping()) w.u64(c);
  }
  w.close();
}

std::unique_ptr<DgmModel> load_checkpoint(const std::string& path) {
  Reader r(path);
  char magic[8];
  r.bytes(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw std::runtime_error("not a model checkpoint: " + path);

  NetworkSpec spec;
  const std::uint32_t kind = r.u32();
  if (kind > 1) throw std::runtime_error("corrupt checkpoint: unknown model kind");
  spec.kind = static_cast<ModelKind>(kind);
  const std::uint32_t n_layers = r.u32();
  if (n_layers < 2 || n_layers > 64)
    throw std::runtime_error("corrupt checkpoint: layer count");
  spec.layer_sizes.resize(n_layers);
  for (auto& s : spec.layer_sizes) {
    s = r.i32();
    if (s < 1 || s > (1 << 20)) throw std::runtime_error("corrupt checkpoint: layer size");
  }
  spec.quant.bits = r.i32();
  spec.quant.w_min = r.f64();
  spec.quant.w_max = r.f64();
  spec.name = r.str();
  spec.layer_cfgs.reserve(n_layers);
  for (std::uint32_t n = 0; n < n_layers; ++n)
    spec.layer_cfgs.push_back(get_layer_cfg(r, spec.layer_sizes[n]));
  spec.block_cfgs.resize(n_layers - 1);
  for (auto& c : spec.block_cfgs) {
    c.epsilon = r.f64();
    c.epochs = r.i32();
    c.batch_size = r.i32();
    c.momentum = r.f64();
    c.weight_decay = r.f64();
    c.use_bias = r.u32() != 0;
  }
  const std::uint32_t n_norm = r.u32();
  if (n_norm + 1 != n_layers - 1 && !(n_layers == 2 && n_norm == 0))
    throw std::runtime_error("corrupt checkpoint: normalizer count");
  spec.normalizers.reserve(n_norm);
  for (std::uint32_t k = 0; k < n_norm; ++k) spec.normalizers.push_back(get_normalizer(r));

  Rng scratch_rng(0);
  auto model = std::make_unique<DgmModel>(spec, scratch_rng);

  for (std::size_t l = 0; l < model->n_blocks(); ++l) {
    RbmBlock& blk = model->block(l);
    const std::size_t nw = static_cast<std::size_t>(blk.n_visible()) * blk.n_hidden();
    std::vector<std::uint32_t> codes(nw);
    for (auto& c : codes) c = r.u32();
    std::vector<std::uint32_t> flips(nw * static_cast<std::size_t>(spec.quant.bits));
    for (auto& f : flips) f = r.u32();
    blk.weights().restore(codes, flips);
    std::vector<double> vb(blk.n_visible()), hb(blk.n_hidden());
    for (auto& b : vb) b = r.f64();
    for (auto& b : hb) b = r.f64();
    blk.restore_biases(vb, hb);
    std::vector<std::uint64_t> vs(blk.n_visible()), vr(blk.n_visible());
    std::vector<std::uint64_t> hs(blk.n_hidden()), hr(blk.n_hidden());
    for (auto& c : vs) c = r.u64();
    for (auto& c : vr) c = r.u64();
    for (auto& c : hs) c = r.u64();
    for (auto& c : hr) c = r.u64();
    blk.visible().restore_counters(vs, vr);
    blk.hidden().restore_counters(hs, hr);
    std::vector<std::uint64_t> book(8);
    for (auto& c : book) c = r.u64();
    blk.restore_bookkeeping(book);
  }
  return model;
}

}  // namespace oxdgm

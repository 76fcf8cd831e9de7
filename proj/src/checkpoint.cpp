#include "asymdex/checkpoint.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace asymdex::rl {

namespace {

constexpr char kMagic[8] = {'A', 'S', 'D', 'X', 'C', 'K', 'P', 'T'};

static_assert(std::endian::native == std::endian::little, "checkpoint format assumes a little-endian host");

class Writer {
 public:
  void raw(const void* p, std::size_t n) { out_.append(static_cast<const char*>(p), n); }
  void i64(long long v) {
    const std::int64_t x = v;
    raw(&x, sizeof x);
  }
  void f64(double v) { raw(&v, sizeof v); }
  void str(const std::string& s) {
    i64(static_cast<long long>(s.size()));
    raw(s.data(), s.size());
  }
  void vec(std::span<const double> v) {
    i64(static_cast<long long>(v.size()));
    raw(v.data(), v.size() * sizeof(double));
  }
  void ints(const std::vector<int>& v) {
    i64(static_cast<long long>(v.size()));
    for (int x : v) i64(x);
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}
  void raw(void* p, std::size_t n) {
    if (n > in_.size() - at_) throw std::runtime_error("checkpoint payload is truncated");
    std::memcpy(p, in_.data() + at_, n);
    at_ += n;
  }
  long long i64() {
    std::int64_t x = 0;
    raw(&x, sizeof x);
    return x;
  }
  double f64() {
    double v = 0.0;
    raw(&v, sizeof v);
    return v;
  }
  std::size_t count() {
    const long long n = i64();
    if (n < 0 || static_cast<unsigned long long>(n) > in_.size()) throw std::runtime_error("checkpoint count is corrupt");
    return static_cast<std::size_t>(n);
  }
  std::string str() {
    std::string s(count(), '\0');
    raw(s.data(), s.size());
    return s;
  }
  std::vector<double> vec() {
    std::vector<double> v(count());
    raw(v.data(), v.size() * sizeof(double));
    return v;
  }
  std::vector<int> ints() {
    std::vector<int> v(count());
    for (int& x : v) x = static_cast<int>(i64());
    return v;
  }
  bool done() const { return at_ == in_.size(); }

 private:
  std::string_view in_;
  std::size_t at_ = 0;
};

std::uint32_t crc(std::string_view s) {
  return static_cast<std::uint32_t>(::crc32(0L, reinterpret_cast<const Bytef*>(s.data()), static_cast<uInt>(s.size())));
}

void write_ppo(Writer& w, const PpoConfig& p) {
  for (double x : {p.gamma, p.lambda, p.clip, p.kl_threshold, p.entropy_coef, p.value_coef, p.learning_rate,
                   p.max_grad_norm, p.adam_beta1, p.adam_beta2, p.adam_eps})
    w.f64(x);
  w.i64(p.minibatch);
  w.i64(p.epochs);
  w.i64(p.adaptive_lr ? 1 : 0);
}

PpoConfig read_ppo(Reader& r) {
  PpoConfig p;
  for (double* x : {&p.gamma, &p.lambda, &p.clip, &p.kl_threshold, &p.entropy_coef, &p.value_coef,
                    &p.learning_rate, &p.max_grad_norm, &p.adam_beta1, &p.adam_beta2, &p.adam_eps})
    *x = r.f64();
  p.minibatch = static_cast<int>(r.i64());
  p.epochs = static_cast<int>(r.i64());
  p.adaptive_lr = r.i64() != 0;
  return p;
}

void copy_params(Mlp& net, const std::vector<double>& p) {
  if (p.size() != net.num_params()) throw std::runtime_error("checkpoint parameter count does not match the network");
  std::copy(p.begin(), p.end(), net.params().begin());
}

}  // namespace

std::string encode_checkpoint(const Checkpoint& c) {
  Writer w;
  w.str(c.tag);
  w.ints(c.model.policy.sizes());
  w.vec(c.model.policy.params());
  w.ints(c.model.value.sizes());
  w.vec(c.model.value.params());
  w.vec(c.model.log_std);
  w.vec(c.model.normalizer.mean);
  w.vec(c.model.normalizer.var);
  w.f64(c.model.normalizer.count);
  w.f64(c.model.normalizer.clip);
  write_ppo(w, c.ppo);
  w.f64(c.lr);
  w.i64(c.env_steps);
  std::ostringstream rs;
  rs << c.rng;
  w.str(rs.str());
  const std::string payload = w.take();

  Writer out;
  out.raw(kMagic, sizeof kMagic);
  const std::uint32_t version = kCheckpointVersion;
  out.raw(&version, sizeof version);
  const std::uint64_t size = payload.size();
  out.raw(&size, sizeof size);
  out.raw(payload.data(), payload.size());
  const std::uint32_t sum = crc(payload);
  out.raw(&sum, sizeof sum);
  return out.take();
}

Checkpoint decode_checkpoint(const std::string& bytes) {
  Reader head(bytes);
  char magic[8];
  head.raw(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof magic) != 0) throw std::runtime_error("not a checkpoint file (bad magic)");
  std::uint32_t version = 0;
  head.raw(&version, sizeof version);
  if (version != kCheckpointVersion)
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
  std::uint64_t size = 0;
  head.raw(&size, sizeof size);
  constexpr std::size_t kHeader = sizeof kMagic + sizeof(std::uint32_t) + sizeof(std::uint64_t);
  if (bytes.size() != kHeader + size + sizeof(std::uint32_t)) throw std::runtime_error("checkpoint size mismatch");
  const std::string_view payload(bytes.data() + kHeader, size);
  std::uint32_t sum = 0;
  std::memcpy(&sum, bytes.data() + kHeader + size, sizeof sum);
  if (sum != crc(payload)) throw std::runtime_error("checkpoint checksum mismatch");

  Reader r(payload);
  Checkpoint c;
  c.tag = r.str();
  c.model.policy = Mlp(r.ints());
  copy_params(c.model.policy, r.vec());
  c.model.value = Mlp(r.ints());
  copy_params(c.model.value, r.vec());
  c.model.log_std = r.vec();
  c.model.normalizer.mean = r.vec();
  c.model.normalizer.var = r.vec();
  c.model.normalizer.count = r.f64();
  c.model.normalizer.clip = r.f64();
  c.ppo = read_ppo(r);
  c.lr = r.f64();
  c.env_steps = r.i64();
  std::istringstream rs(r.str());
  rs >> c.rng;
  if (!rs) throw std::runtime_error("checkpoint rng state is corrupt");
  if (!r.done()) throw std::runtime_error("checkpoint payload has trailing bytes");
  if (static_cast<int>(c.model.log_std.size()) != c.model.act_dim() ||
      c.model.normalizer.dim() != c.model.obs_dim() || c.model.value.in_dim() != c.model.obs_dim())
    throw std::runtime_error("checkpoint shapes are inconsistent");
  return c;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
  const std::string bytes = encode_checkpoint(c);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write checkpoint " + tmp.string());
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw std::runtime_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open checkpoint " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return decode_checkpoint(ss.str());
}

}  // namespace asymdex::rl

#include "flywheel/math/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace flywheel::math {

namespace {

constexpr char kMagic[4] = {'F', 'W', 'C', 'P'};
constexpr uint32_t kVersion = 1;

void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_str(std::string& out, const std::string& s) {
  put_u32(out, static_cast<uint32_t>(s.size()));
  out += s;
}

struct Reader {
  const std::string& buf;
  size_t pos = 0;

  void need(size_t n) const {
    if (pos + n > buf.size()) throw std::runtime_error("checkpoint: truncated file");
  }
  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
    pos += 4;
    return v;
  }
  uint64_t u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
    pos += 8;
    return v;
  }
  std::string str() {
    const uint32_t n = u32();
    need(n);
    std::string s = buf.substr(pos, n);
    pos += n;
    return s;
  }
};

std::string serialize(const Checkpoint& ck) {
  std::string out;
  out.append(kMagic, 4);
  put_u32(out, kVersion);
  put_u32(out, static_cast<uint32_t>(ck.meta.size()));
  for (const auto& [k, v] : ck.meta) {
    put_str(out, k);
    put_str(out, v);
  }
  put_u32(out, static_cast<uint32_t>(ck.tensors.size()));
  for (const auto& [name, t] : ck.tensors) {
    put_str(out, name);
    put_u32(out, static_cast<uint32_t>(t.shape().size()));
    for (int d : t.shape()) put_u32(out, static_cast<uint32_t>(d));
    for (double x : t.values()) put_u64(out, std::bit_cast<uint64_t>(x));
  }
  return out;
}

}  // namespace

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("checkpoint: cannot open " + path.string() + " for writing");
  const std::string bytes = serialize(ck);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw std::runtime_error("checkpoint: write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("checkpoint: cannot open " + path.string());
  std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (buf.size() < 8 || std::memcmp(buf.data(), kMagic, 4) != 0) {
    throw std::runtime_error("checkpoint: bad magic in " + path.string());
  }
  Reader r{buf, 4};
  const uint32_t version = r.u32();
  if (version != kVersion) {
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version) + " (expected " +
                             std::to_string(kVersion) + ")");
  }
  Checkpoint ck;
  const uint32_t nmeta = r.u32();
  for (uint32_t i = 0; i < nmeta; ++i) {
    std::string k = r.str();
    ck.meta[k] = r.str();
  }
  const uint32_t ntensors = r.u32();
  for (uint32_t i = 0; i < ntensors; ++i) {
    std::string name = r.str();
    const uint32_t rank = r.u32();
    if (rank < 1 || rank > 2) throw std::runtime_error("checkpoint: bad tensor rank");
    std::vector<int> shape;
    for (uint32_t d = 0; d < rank; ++d) shape.push_back(static_cast<int>(r.u32()));
    Tensor t(shape);
    for (int64_t j = 0; j < t.size(); ++j) t[j] = std::bit_cast<double>(r.u64());
    ck.tensors.emplace(std::move(name), std::move(t));
  }
  return ck;
}

uint64_t fingerprint(const Checkpoint& ck) {
  const std::string bytes = serialize(ck);
  uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace flywheel::math

#include "glyphmend/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace glyphmend {

static_assert(std::endian::native == std::endian::little,
              "checkpoint payload is little-endian; big-endian hosts need a "
              "byte-swapping reader");

namespace {

constexpr char kMagic[4] = {'G', 'M', 'N', 'D'};

void put_u32(std::ofstream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
  out.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ofstream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::ifstream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(std::ifstream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  nlohmann::json header;
  header["meta"] = ckpt.meta;
  header["tensors"] = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (const TensorEntry& t : ckpt.tensors) {
    if (t.data.size() != t.rows * t.cols) {
      throw std::runtime_error("tensor " + t.name + " has " +
                               std::to_string(t.data.size()) +
                               " values but shape " + std::to_string(t.rows) +
                               "x" + std::to_string(t.cols));
    }
    header["tensors"].push_back({{"name", t.name},
                                 {"rows", t.rows},
                                 {"cols", t.cols},
                                 {"offset", offset},
                                 {"count", t.data.size()}});
    offset += t.data.size();
  }
  const std::string header_text = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open checkpoint for writing: " + path);
  }
  out.write(kMagic, 4);
  put_u32(out, kCheckpointVersion);
  put_u64(out, header_text.size());
  out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
  for (const TensorEntry& t : ckpt.tensors) {
    out.write(reinterpret_cast<const char*>(t.data.data()),
              static_cast<std::streamsize>(t.data.size() * sizeof(double)));
  }
  if (!out) {
    throw std::runtime_error("failed writing checkpoint: " + path);
  }
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open checkpoint: " + path);
  }
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error("not a checkpoint file: " + path);
  }
  const std::uint32_t version = get_u32(in);
  if (version != kCheckpointVersion) {
    throw std::runtime_error("unsupported checkpoint version " +
                             std::to_string(version) + " in " + path);
  }
  const std::uint64_t header_len = get_u64(in);
  std::string header_text(header_len, '\0');
  in.read(header_text.data(), static_cast<std::streamsize>(header_len));
  if (!in) {
    throw std::runtime_error("truncated checkpoint header: " + path);
  }
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("corrupt checkpoint header in " + path + ": " +
                             e.what());
  }

  Checkpoint ckpt;
  ckpt.meta = header.value("meta", nlohmann::json::object());
  for (const auto& entry : header.at("tensors")) {
    TensorEntry t;
    t.name = entry.at("name").get<std::string>();
    t.rows = entry.at("rows").get<std::size_t>();
    t.cols = entry.at("cols").get<std::size_t>();
    const std::size_t count = entry.at("count").get<std::size_t>();
    if (count != t.rows * t.cols) {
      throw std::runtime_error("corrupt checkpoint: tensor " + t.name +
                               " count/shape mismatch in " + path);
    }
    t.data.resize(count);
    in.read(reinterpret_cast<char*>(t.data.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) {
      throw std::runtime_error("truncated checkpoint payload (tensor " +
                               t.name + ") in " + path);
    }
    ckpt.tensors.push_back(std::move(t));
  }
  return ckpt;
}

}  // namespace glyphmend

// Copyright 2026 The glomnet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "glomnet/nn/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "glomnet/error.h"

namespace glomnet {

namespace {

constexpr char kMagic[4] = {'G', 'L', 'O', 'M'};

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  template <typename T>
  void le(T value) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    U bits = std::bit_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(U); ++i) out_.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
  template <typename T>
  T le() {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    need(sizeof(U));
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) bits |= static_cast<U>(in_[pos_ + i]) << (8 * i);
    pos_ += sizeof(U);
    return std::bit_cast<T>(bits);
  }
  void need(std::size_t n) const {
    if (pos_ + n > in_.size()) throw DataError("checkpoint truncated");
  }
  std::span<const std::uint8_t> take(std::size_t n) {
    need(n);
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const NetworkConfig& cfg,
                                            const NetworkParams& params) {
  params.check_shapes(cfg);
  Writer w;
  w.bytes(kMagic, 4);
  w.le<std::uint32_t>(kCheckpointVersion);
  w.le<std::uint64_t>(cfg.digest());
  w.le<std::uint32_t>(static_cast<std::uint32_t>(params.tensors.size()));
  for (const auto& t : params.tensors) {
    w.le<std::uint32_t>(static_cast<std::uint32_t>(t.rank()));
    for (auto d : t.shape()) w.le<std::uint64_t>(d);
    for (double v : t.values()) w.le<double>(v);
  }
  return w.take();
}

NetworkParams decode_checkpoint(std::span<const std::uint8_t> bytes, const NetworkConfig& cfg) {
  Reader r(bytes);
  const auto magic = r.take(4);
  if (std::memcmp(magic.data(), kMagic, 4) != 0) throw DataError("not a glomnet checkpoint");
  const auto version = r.le<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw DataError("unsupported checkpoint version " + std::to_string(version));
  }
  if (r.le<std::uint64_t>() != cfg.digest()) {
    throw DataError("checkpoint was written for a different network config than " +
                    cfg.canonical());
  }
  const auto count = r.le<std::uint32_t>();
  NetworkParams params;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto rank = r.le<std::uint32_t>();
    if (rank > 8) throw DataError("checkpoint tensor rank is implausible");
    std::vector<std::size_t> shape(rank);
    std::size_t size = 1;
    for (auto& d : shape) {
      d = static_cast<std::size_t>(r.le<std::uint64_t>());
      size *= d;
    }
    r.need(size * 8);
    std::vector<double> values(size);
    for (auto& v : values) v = r.le<double>();
    params.tensors.emplace_back(std::move(shape), std::move(values));
  }
  if (!r.done()) throw DataError("checkpoint has trailing bytes");
  params.check_shapes(cfg);
  return params;
}

void save_checkpoint(const std::filesystem::path& path, const NetworkConfig& cfg,
                     const NetworkParams& params) {
  const auto bytes = encode_checkpoint(cfg, params);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("I/O error writing " + path.string());
}

NetworkParams load_checkpoint(const std::filesystem::path& path, const NetworkConfig& cfg) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes, cfg);
}

}  // namespace glomnet

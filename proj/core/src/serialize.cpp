// Copyright 2026 The prnn Authors.
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

#include "prnn/serialize.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace prnn::sparse {

namespace {

static_assert(std::endian::native == std::endian::little ||
                  std::endian::native == std::endian::big,
              "mixed-endian hosts are not supported");

template <typename U>
U to_little(U v) noexcept {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    U out = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      out = static_cast<U>((out << 8) | ((v >> (8 * i)) & 0xFF));
    }
    return out;
  }
}

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { put(to_little(v)); }
  void u32(std::uint32_t v) { put(to_little(v)); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  template <typename Range>
  void u32s(const Range& r) {
    for (std::uint32_t v : r) u32(v);
  }
  template <typename Range>
  void f32s(const Range& r) {
    for (float v : r) f32(v);
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  template <typename U>
  void put(U v) {
    std::uint8_t buf[sizeof(U)];
    std::memcpy(buf, &v, sizeof(U));
    out_.insert(out_.end(), buf, buf + sizeof(U));
  }
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::size_t offset() const noexcept { return pos_; }
  bool done() const noexcept { return pos_ == in_.size(); }

  void need(std::size_t n, const char* what) const {
    if (in_.size() - pos_ < n) {
      throw FormatError(std::string("truncated input reading ") + what, pos_);
    }
  }
  std::uint8_t u8(const char* what) {
    need(1, what);
    return in_[pos_++];
  }
  std::uint16_t u16(const char* what) { return get<std::uint16_t>(what); }
  std::uint32_t u32(const char* what) { return get<std::uint32_t>(what); }
  float f32(const char* what) {
    return std::bit_cast<float>(get<std::uint32_t>(what));
  }
  std::vector<std::uint32_t> u32s(std::size_t n, const char* what) {
    need_array(n, what);
    std::vector<std::uint32_t> v(n);
    for (auto& x : v) x = u32(what);
    return v;
  }
  std::vector<float> f32s(std::size_t n, const char* what) {
    need_array(n, what);
    std::vector<float> v(n);
    for (auto& x : v) x = f32(what);
    return v;
  }

 private:
  void need_array(std::size_t n, const char* what) const {
    if (n > (in_.size() - pos_) / 4) {
      throw FormatError(std::string("truncated input reading ") + what, pos_);
    }
  }
  template <typename U>
  U get(const char* what) {
    need(sizeof(U), what);
    U v;
    std::memcpy(&v, in_.data() + pos_, sizeof(U));
    pos_ += sizeof(U);
    return to_little(v);
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

void write_tensor(Writer& w, const StoredTensor& t) {
  if (t.is_csr()) {
    const CsrMatrix& m = t.csr();
    w.u8(1);
    w.u32(m.rows());
    w.u32(m.cols());
    w.u32(static_cast<std::uint32_t>(m.nnz()));
    w.u32s(m.row_ptr());
    w.u32s(m.col_idx());
    w.f32s(m.values());
  } else {
    const DenseMatrix& m = t.dense();
    w.u8(0);
    w.u32(static_cast<std::uint32_t>(m.rows()));
    w.u32(static_cast<std::uint32_t>(m.cols()));
    w.f32s(m.values());
  }
}

StoredTensor read_tensor(Reader& r) {
  const std::size_t at = r.offset();
  const std::uint8_t storage = r.u8("storage tag");
  const std::uint32_t rows = r.u32("tensor rows");
  const std::uint32_t cols = r.u32("tensor cols");
  if (storage == 0) {
    const std::size_t n = static_cast<std::size_t>(rows) * cols;
    auto values = r.f32s(n, "dense payload");
    return StoredTensor(DenseMatrix(rows, cols, std::move(values)));
  }
  if (storage == 1) {
    const std::uint32_t nnz = r.u32("csr nnz");
    if (static_cast<std::uint64_t>(nnz) >
        static_cast<std::uint64_t>(rows) * cols) {
      throw FormatError("csr nnz exceeds rows*cols", at);
    }
    auto row_ptr = r.u32s(static_cast<std::size_t>(rows) + 1, "csr row_ptr");
    auto col_idx = r.u32s(nnz, "csr col_idx");
    auto values = r.f32s(nnz, "csr values");
    try {
      return StoredTensor(CsrMatrix(rows, cols, std::move(row_ptr),
                                    std::move(col_idx), std::move(values)));
    } catch (const ParameterError& e) {
      throw FormatError(e.what(), at);
    }
  }
  throw FormatError("unknown storage tag " + std::to_string(storage), at);
}

}  // namespace

std::vector<std::uint8_t> serialize(const SparseModel& model) {
  Writer w;
  w.bytes(kMagic, sizeof(kMagic));
  w.u16(kFormatVersion);
  w.u32(static_cast<std::uint32_t>(model.layers().size()));
  for (const auto& l : model.layers()) {
    w.u8(static_cast<std::uint8_t>(l.kind));
    w.u8(static_cast<std::uint8_t>(l.activation));
    w.u32(l.input_size);
    w.u32(l.output_size);
    for (const auto& t : l.tensors) write_tensor(w, t);
  }
  return w.take();
}

SparseModel deserialize(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  r.need(sizeof(kMagic), "magic");
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw FormatError("bad magic, expected \"SPRN\"", 0);
  }
  for (std::size_t i = 0; i < sizeof(kMagic); ++i) r.u8("magic");
  const std::size_t version_at = r.offset();
  const std::uint16_t version = r.u16("version");
  if (version != kFormatVersion) {
    throw FormatError("unsupported format version " + std::to_string(version),
                      version_at);
  }
  const std::uint32_t count = r.u32("layer count");
  std::vector<SparseLayer> layers;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::size_t at = r.offset();
    SparseLayer l;
    const std::uint8_t kind = r.u8("layer kind");
    if (kind > 2) {
      throw FormatError("unknown layer kind " + std::to_string(kind), at);
    }
    l.kind = static_cast<LayerKind>(kind);
    const std::uint8_t act = r.u8("activation");
    if (act > 2) {
      throw FormatError("unknown activation " + std::to_string(act), at + 1);
    }
    l.activation = static_cast<nn::Activation>(act);
    l.input_size = r.u32("layer input size");
    l.output_size = r.u32("layer output size");
    for (std::size_t k = 0; k < tensor_count(l.kind); ++k) {
      l.tensors.push_back(read_tensor(r));
    }
    layers.push_back(std::move(l));
  }
  if (!r.done()) throw FormatError("trailing bytes after last layer", r.offset());
  try {
    return SparseModel(std::move(layers));
  } catch (const ShapeError& e) {
    throw FormatError(std::string("inconsistent model: ") + e.what(),
                      kFileHeaderBytes);
  }
}

std::size_t dense_tensor_bytes(std::size_t rows, std::size_t cols) noexcept {
  return kTensorHeaderBytes + 4 * rows * cols;
}

std::size_t csr_tensor_bytes(std::size_t rows, std::size_t nnz) noexcept {
  return kCsrHeaderBytes + 4 * (rows + 1) + 8 * nnz;
}

std::size_t serialized_size(const StoredTensor& t) noexcept {
  return t.is_csr() ? csr_tensor_bytes(t.rows(), t.csr().nnz())
                    : dense_tensor_bytes(t.rows(), t.cols());
}

std::size_t serialized_size(const SparseModel& model) noexcept {
  std::size_t n = kFileHeaderBytes;
  for (const auto& l : model.layers()) {
    n += kLayerHeaderBytes;
    for (const auto& t : l.tensors) n += serialized_size(t);
  }
  return n;
}

std::size_t dense_equivalent_size(const SparseModel& model) noexcept {
  std::size_t n = kFileHeaderBytes;
  for (const auto& l : model.layers()) {
    n += kLayerHeaderBytes;
    for (const auto& t : l.tensors) n += dense_tensor_bytes(t.rows(), t.cols());
  }
  return n;
}

void write_model(const std::filesystem::path& path, const SparseModel& model) {
  const auto bytes = serialize(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

SparseModel read_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

}  // namespace prnn::sparse

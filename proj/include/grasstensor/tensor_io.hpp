#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include <json.hpp>

#include "grasstensor/dense_tensor.hpp"
#include "grasstensor/io_util.hpp"

namespace gt {

namespace detail {

inline void put_u64le(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_f64le(std::string& out, double v) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &v, sizeof(bits));
  put_u64le(out, bits);
}

class ByteReader {
 public:
  ByteReader(const std::string& bytes, std::string where) : bytes_(bytes), where_(std::move(where)) {}

  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(bytes_[pos_++]);
  }

  std::uint64_t u64le() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }

  double f64le() {
    const std::uint64_t bits = u64le();
    double v = 0;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
  }

  void expect_bytes(const char* literal) {
    for (const char* c = literal; *c; ++c)
      if (u8() != static_cast<std::uint8_t>(*c)) fail("bad magic, not a GTEN file");
  }

  [[nodiscard]] bool exhausted() const { return pos_ == bytes_.size(); }
  [[noreturn]] void fail(const std::string& msg) const {
    throw std::runtime_error(where_ + ": " + msg + " (at byte " + std::to_string(pos_) + ")");
  }

 private:
  void need(std::size_t n) {
    if (pos_ + n > bytes_.size()) fail("truncated file");
  }

  const std::string& bytes_;
  std::string where_;
  std::size_t pos_ = 0;
};

}  // namespace detail

// --- GTEN binary form: "GTEN", version u8, field u8 (0 real / 1 complex),
// --- order u8, dims as u64 little-endian, then f64 entries (re,im when
// --- complex) in the canonical last-mode-fastest order.

template <class Scalar>
std::string encode_tensor_binary(const DenseTensor<Scalar>& t) {
  std::string out = "GTEN";
  out.push_back(1);
  out.push_back(is_complex_v<Scalar> ? 1 : 0);
  out.push_back(static_cast<char>(t.order()));
  for (Index j = 0; j < t.order(); ++j) detail::put_u64le(out, static_cast<std::uint64_t>(t.dim(j)));
  for (Index f = 0; f < t.size(); ++f) {
    const Scalar v = t.flat()(f);
    detail::put_f64le(out, real_part(v));
    if constexpr (is_complex_v<Scalar>) detail::put_f64le(out, std::imag(v));
  }
  return out;
}

// Holds whichever field the file declared; exactly one side is populated.
struct LoadedTensor {
  bool complex = false;
  DenseTensor<double> real_data;
  DenseTensor<cplx> complex_data;

  [[nodiscard]] DenseTensor<cplx> as_complex() const { return complex ? complex_data : real_data.cast<cplx>(); }
  [[nodiscard]] const std::vector<Index>& shape() const { return complex ? complex_data.shape() : real_data.shape(); }
};

inline LoadedTensor decode_tensor_binary(const std::string& bytes, const std::string& where) {
  detail::ByteReader r(bytes, where);
  r.expect_bytes("GTEN");
  if (r.u8() != 1) r.fail("unsupported version");
  const std::uint8_t field = r.u8();
  if (field > 1) r.fail("field byte must be 0 (real) or 1 (complex)");
  const Index order = r.u8();
  if (order < 1) r.fail("order must be at least 1");
  std::vector<Index> shape;
  Index total = 1;
  for (Index j = 0; j < order; ++j) {
    const std::uint64_t d = r.u64le();
    if (d < 1 || d > (1u << 20)) r.fail("mode " + std::to_string(j) + " has implausible extent");
    shape.push_back(static_cast<Index>(d));
    total *= static_cast<Index>(d);
  }
  LoadedTensor out;
  out.complex = field == 1;
  if (out.complex) {
    out.complex_data = DenseTensor<cplx>(shape);
    for (Index f = 0; f < total; ++f) {
      const double re = r.f64le();
      const double im = r.f64le();
      out.complex_data.flat()(f) = cplx(re, im);
    }
  } else {
    out.real_data = DenseTensor<double>(shape);
    for (Index f = 0; f < total; ++f) out.real_data.flat()(f) = r.f64le();
  }
  if (!r.exhausted()) r.fail("trailing bytes after tensor data");
  return out;
}

// --- JSON text form: {"shape": [...], "field": "real"|"complex",
// --- "data": nested arrays, innermost = last mode, complex entry = [re, im]}.

namespace detail {

template <class Scalar>
nlohmann::json nest_tensor(const DenseTensor<Scalar>& t, Index mode, Index& flat) {
  nlohmann::json arr = nlohmann::json::array();
  for (Index i = 0; i < t.dim(mode); ++i) {
    if (mode + 1 == t.order()) {
      const Scalar v = t.flat()(flat++);
      if constexpr (is_complex_v<Scalar>)
        arr.push_back(nlohmann::json::array({real_part(v), std::imag(v)}));
      else
        arr.push_back(real_part(v));
    } else {
      arr.push_back(nest_tensor(t, mode + 1, flat));
    }
  }
  return arr;
}

template <class Scalar>
void unnest_tensor(const nlohmann::json& node, DenseTensor<Scalar>& t, Index mode, Index& flat, const std::string& where) {
  if (!node.is_array() || static_cast<Index>(node.size()) != t.dim(mode))
    throw std::runtime_error(where + ": data nesting does not match shape at mode " + std::to_string(mode));
  for (const auto& child : node) {
    if (mode + 1 == t.order()) {
      if constexpr (is_complex_v<Scalar>) {
        if (child.is_number()) {
          t.flat()(flat++) = cplx(child.get<double>(), 0.0);
        } else if (child.is_array() && child.size() == 2) {
          t.flat()(flat++) = cplx(child[0].get<double>(), child[1].get<double>());
        } else {
          throw std::runtime_error(where + ": complex entries must be numbers or [re, im] pairs");
        }
      } else {
        if (!child.is_number()) throw std::runtime_error(where + ": real tensor entries must be numbers");
        t.flat()(flat++) = child.get<double>();
      }
    } else {
      unnest_tensor(child, t, mode + 1, flat, where);
    }
  }
}

}  // namespace detail

template <class Scalar>
nlohmann::json tensor_to_json(const DenseTensor<Scalar>& t) {
  nlohmann::json j;
  j["shape"] = t.shape();
  j["field"] = is_complex_v<Scalar> ? "complex" : "real";
  Index flat = 0;
  j["data"] = detail::nest_tensor(t, 0, flat);
  return j;
}

inline LoadedTensor tensor_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.contains("shape") || !j.contains("data")) throw std::runtime_error(where + ": tensor JSON needs shape and data");
  const auto shape = j.at("shape").get<std::vector<Index>>();
  const std::string field = j.value("field", "real");
  if (field != "real" && field != "complex") throw std::runtime_error(where + ": field must be real or complex");
  LoadedTensor out;
  out.complex = field == "complex";
  Index flat = 0;
  if (out.complex) {
    out.complex_data = DenseTensor<cplx>(shape);
    detail::unnest_tensor(j.at("data"), out.complex_data, 0, flat, where);
  } else {
    out.real_data = DenseTensor<double>(shape);
    detail::unnest_tensor(j.at("data"), out.real_data, 0, flat, where);
  }
  return out;
}

// --- File-level helpers; binary vs JSON is decided by the magic bytes.

template <class Scalar>
void save_tensor(const std::string& path, const DenseTensor<Scalar>& t, bool binary = true) {
  atomic_write_file(path, binary ? encode_tensor_binary(t) : tensor_to_json(t).dump(2) + "\n");
}

inline LoadedTensor load_tensor(const std::string& path) {
  const std::string bytes = read_file(path);
  if (bytes.rfind("GTEN", 0) == 0) return decode_tensor_binary(bytes, path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return tensor_from_json(j, path);
}

}  // namespace gt

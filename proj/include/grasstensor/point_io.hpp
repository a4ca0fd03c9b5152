#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "grasstensor/grassmann.hpp"
#include "grasstensor/io_util.hpp"

namespace gt {

// ProductPoint JSON: {"field", "factors": [{"n", "m", "frame"}]} where frame
// lists the n×m basis row-major, complex entries as [re, im] pairs.
template <class Scalar>
nlohmann::json point_to_json(const ProductPoint<Scalar>& p) {
  nlohmann::json factors = nlohmann::json::array();
  for (const auto& f : p.factors) {
    nlohmann::json entries = nlohmann::json::array();
    const MatX<Scalar> basis = f.basis();
    for (Index i = 0; i < basis.rows(); ++i)
      for (Index c = 0; c < basis.cols(); ++c) {
        const Scalar v = basis(i, c);
        if constexpr (is_complex_v<Scalar>)
          entries.push_back(nlohmann::json::array({real_part(v), std::imag(v)}));
        else
          entries.push_back(real_part(v));
      }
    factors.push_back({{"n", f.n()}, {"m", f.m()}, {"frame", entries}});
  }
  return {{"field", is_complex_v<Scalar> ? "complex" : "real"}, {"factors", factors}};
}

template <class Scalar>
ProductPoint<Scalar> point_from_json(const nlohmann::json& j, const std::string& where) {
  const std::string field = j.value("field", "real");
  if (field == "complex" && !is_complex_v<Scalar>)
    throw std::runtime_error(where + ": point is complex but a real point was requested");
  if (!j.contains("factors") || !j.at("factors").is_array())
    throw std::runtime_error(where + ": point JSON needs a factors array");
  ProductPoint<Scalar> p;
  for (const auto& fj : j.at("factors")) {
    const Index n = fj.at("n").get<Index>();
    const Index m = fj.at("m").get<Index>();
    const auto& entries = fj.at("frame");
    if (n < 1 || m < 1 || m > n) throw std::runtime_error(where + ": factor sizes must satisfy 1 <= m <= n");
    if (!entries.is_array() || static_cast<Index>(entries.size()) != n * m)
      throw std::runtime_error(where + ": frame must list n*m entries");
    MatX<Scalar> basis(n, m);
    Index k = 0;
    for (Index i = 0; i < n; ++i)
      for (Index c = 0; c < m; ++c, ++k) {
        const auto& e = entries[static_cast<std::size_t>(k)];
        if constexpr (is_complex_v<Scalar>) {
          if (e.is_number())
            basis(i, c) = Scalar(e.get<double>());
          else if (e.is_array() && e.size() == 2)
            basis(i, c) = Scalar(cplx(e[0].get<double>(), e[1].get<double>()));
          else
            throw std::runtime_error(where + ": frame entries must be numbers or [re, im] pairs");
        } else {
          if (!e.is_number()) throw std::runtime_error(where + ": real frame entries must be numbers");
          basis(i, c) = e.get<double>();
        }
      }
    try {
      p.factors.push_back(GrassPoint<Scalar>::from_isometry(basis));
    } catch (const std::invalid_argument& err) {
      throw std::runtime_error(where + ": " + err.what());
    }
  }
  if (p.factors.empty()) throw std::runtime_error(where + ": point needs at least one factor");
  return p;
}

template <class Scalar>
void save_point(const std::string& path, const ProductPoint<Scalar>& p) {
  atomic_write_file(path, point_to_json(p).dump(2) + "\n");
}

template <class Scalar>
ProductPoint<Scalar> load_point(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return point_from_json<Scalar>(j, path);
}

}  // namespace gt

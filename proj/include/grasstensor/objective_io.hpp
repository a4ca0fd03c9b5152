#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "grasstensor/csv_io.hpp"
#include "grasstensor/objective.hpp"
#include "grasstensor/tensor_io.hpp"

namespace gt {

namespace detail {

template <class Scalar>
nlohmann::json matrix_to_json(const MatX<Scalar>& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < m.cols(); ++j) {
      const Scalar v = m(i, j);
      if constexpr (is_complex_v<Scalar>)
        row.push_back(nlohmann::json::array({real_part(v), std::imag(v)}));
      else
        row.push_back(real_part(v));
    }
    rows.push_back(row);
  }
  return rows;
}

template <class Scalar>
MatX<Scalar> matrix_from_json(const nlohmann::json& rows, const std::string& where) {
  if (!rows.is_array() || rows.empty() || !rows[0].is_array())
    throw std::runtime_error(where + ": matrix payload must be an array of rows");
  const Index r = static_cast<Index>(rows.size());
  const Index c = static_cast<Index>(rows[0].size());
  MatX<Scalar> m(r, c);
  for (Index i = 0; i < r; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != c)
      throw std::runtime_error(where + ": matrix rows have inconsistent lengths");
    for (Index j = 0; j < c; ++j) {
      const auto& e = row[static_cast<std::size_t>(j)];
      if constexpr (is_complex_v<Scalar>) {
        if (e.is_number())
          m(i, j) = Scalar(e.get<double>());
        else if (e.is_array() && e.size() == 2)
          m(i, j) = Scalar(cplx(e[0].get<double>(), e[1].get<double>()));
        else
          throw std::runtime_error(where + ": matrix entries must be numbers or [re, im] pairs");
      } else {
        if (!e.is_number()) throw std::runtime_error(where + ": real matrix entries must be numbers");
        m(i, j) = e.get<double>();
      }
    }
  }
  return m;
}

// Payload fields may hold data inline or reference a sibling file by path.
template <class Scalar>
DenseTensor<Scalar> descriptor_tensor(const nlohmann::json& node, const std::string& anchor, const std::string& where) {
  LoadedTensor loaded;
  if (node.is_string())
    loaded = load_tensor(resolve_sibling(anchor, node.get<std::string>()));
  else
    loaded = tensor_from_json(node, where);
  if constexpr (is_complex_v<Scalar>) {
    return loaded.as_complex();
  } else {
    if (loaded.complex) throw std::runtime_error(where + ": complex tensor payload in a real objective");
    return loaded.real_data;
  }
}

}  // namespace detail

inline const char* to_string(ObjKind kind) {
  switch (kind) {
    case ObjKind::dense:
      return "dense";
    case ObjKind::rank_one:
      return "rank_one";
    case ObjKind::kron_factors:
      return "kron_factors";
    case ObjKind::sum_kron_powers:
      return "sum_kron_powers";
    case ObjKind::diagonal:
      return "diagonal";
  }
  return "unknown";
}

inline const char* to_string(Sense sense) { return sense == Sense::maximize ? "maximize" : "minimize"; }

// Descriptor JSON: {"kind", "field", "sense", payload}.  Payloads are inline
// here; loaders additionally accept file references (GTEN/JSON tensor paths
// for rank_one and diagonal, a CSV path for sum_kron_powers points).
template <class Scalar>
nlohmann::json objective_to_json(const ObjectiveMatrix<Scalar>& obj) {
  nlohmann::json j;
  j["kind"] = to_string(obj.kind());
  j["field"] = is_complex_v<Scalar> ? "complex" : "real";
  j["sense"] = to_string(obj.sense());
  switch (obj.kind()) {
    case ObjKind::dense:
      j["dims"] = obj.dims();
      j["matrix"] = detail::matrix_to_json(obj.materialize());
      break;
    case ObjKind::rank_one:
      j["tensor"] = tensor_to_json(obj.amplitudes());
      break;
    case ObjKind::kron_factors: {
      nlohmann::json factors = nlohmann::json::array();
      for (const auto& f : obj.kron_blocks()) factors.push_back(detail::matrix_to_json(f));
      j["factors"] = factors;
      break;
    }
    case ObjKind::sum_kron_powers: {
      nlohmann::json pts = nlohmann::json::array();
      for (const auto& x : obj.data_points()) pts.push_back(detail::matrix_to_json(MatX<Scalar>(x.transpose()))[0]);
      j["points"] = pts;
      j["order"] = obj.order();
      break;
    }
    case ObjKind::diagonal:
      j["table"] = tensor_to_json(obj.diagonal_table());
      break;
  }
  return j;
}

inline bool descriptor_is_complex(const nlohmann::json& j) { return j.value("field", "real") == "complex"; }

template <class Scalar>
ObjectiveMatrix<Scalar> objective_from_json(const nlohmann::json& j, const std::string& anchor) {
  const std::string where = anchor.empty() ? std::string("objective descriptor") : anchor;
  if (!j.contains("kind")) throw std::runtime_error(where + ": descriptor needs a kind tag");
  if (descriptor_is_complex(j) && !is_complex_v<Scalar>)
    throw std::runtime_error(where + ": descriptor is complex but a real objective was requested");
  const std::string kind = j.at("kind").get<std::string>();
  const std::string sense_name = j.value("sense", "maximize");
  if (sense_name != "maximize" && sense_name != "minimize")
    throw std::runtime_error(where + ": sense must be maximize or minimize");
  const Sense sense = sense_name == "maximize" ? Sense::maximize : Sense::minimize;

  if (kind == "dense") {
    auto dims = j.at("dims").get<std::vector<Index>>();
    return ObjectiveMatrix<Scalar>::dense(std::move(dims), detail::matrix_from_json<Scalar>(j.at("matrix"), where), sense);
  }
  if (kind == "rank_one")
    return ObjectiveMatrix<Scalar>::rank_one(detail::descriptor_tensor<Scalar>(j.at("tensor"), anchor, where), sense);
  if (kind == "kron_factors") {
    std::vector<MatX<Scalar>> factors;
    for (const auto& f : j.at("factors")) factors.push_back(detail::matrix_from_json<Scalar>(f, where));
    return ObjectiveMatrix<Scalar>::kron_factors(factors, sense);
  }
  if (kind == "sum_kron_powers") {
    const Index order = j.at("order").get<Index>();
    std::vector<VecX<Scalar>> pts;
    const auto& node = j.at("points");
    if (node.is_string()) {
      for (const auto& x : read_csv_points(resolve_sibling(anchor, node.get<std::string>())))
        pts.push_back(x.template cast<Scalar>());
    } else {
      for (const auto& row : node) {
        const MatX<Scalar> m = detail::matrix_from_json<Scalar>(nlohmann::json::array({row}), where);
        pts.push_back(m.row(0).transpose());
      }
    }
    return ObjectiveMatrix<Scalar>::sum_kron_powers(pts, order, sense);
  }
  if (kind == "diagonal")
    return ObjectiveMatrix<Scalar>::diagonal(detail::descriptor_tensor<double>(j.at("table"), anchor, where), sense);
  throw std::runtime_error(where + ": unknown objective kind '" + kind + "'");
}

template <class Scalar>
void save_objective(const std::string& path, const ObjectiveMatrix<Scalar>& obj) {
  atomic_write_file(path, objective_to_json(obj).dump(2) + "\n");
}

template <class Scalar>
ObjectiveMatrix<Scalar> load_objective(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return objective_from_json<Scalar>(j, path);
}

}  // namespace gt

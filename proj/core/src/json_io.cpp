#include "qcsb/json_io.hpp"

namespace qcsb {

namespace {

Json complex_to_json(Complex c) { return Json::array({c.real(), c.imag()}); }

Complex complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw PreconditionError("json: complex entries must be [re, im] pairs");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw PreconditionError("json: matrices must be non-empty arrays of rows");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  ComplexMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (static_cast<Eigen::Index>(row.size()) != cols) throw PreconditionError("json: ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

Json mode_vector_to_json(const ModeVector& v) {
  Json out = Json::array();
  for (Eigen::Index j = 0; j < v.size(); ++j) out.push_back(complex_to_json(v[j]));
  return out;
}

ModeVector mode_vector_from_json(const Json& j) {
  if (!j.is_array()) throw PreconditionError("json: mode vectors must be arrays");
  ModeVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v[static_cast<Eigen::Index>(k)] = complex_from_json(j[k]);
  return v;
}

Json state_to_json(const JointState& state, std::size_t d_spin, std::size_t d_boson) {
  if (static_cast<std::size_t>(state.rho.rows()) != d_spin * d_boson) {
    throw DimensionError("state_to_json: dimensions do not match the density matrix");
  }
  Json entries = Json::array();
  for (Eigen::Index i = 0; i < state.rho.rows(); ++i) {
    for (Eigen::Index k = 0; k < state.rho.cols(); ++k) entries.push_back(complex_to_json(state.rho(i, k)));
  }
  return {{"dimensions", {d_spin, d_boson}},
          {"epsilon", state.epsilon},
          {"time", state.time},
          {"entries", std::move(entries)}};
}

JointState state_from_json(const Json& j) {
  const auto dims = j.at("dimensions").get<std::vector<std::size_t>>();
  if (dims.size() != 2) throw PreconditionError("json: dimensions must be [d_spin, d_boson]");
  const auto d = static_cast<Eigen::Index>(dims[0] * dims[1]);
  const Json& entries = j.at("entries");
  if (static_cast<Eigen::Index>(entries.size()) != d * d) {
    throw DimensionError("json: entry count does not match the dimensions");
  }
  JointState s{ComplexMatrix(d, d), j.at("epsilon").get<double>(), j.at("time").get<double>()};
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) {
      s.rho(i, k) = complex_from_json(entries[static_cast<std::size_t>(i * d + k)]);
    }
  }
  return s;
}

Json measure_to_json(const StateValuedMeasure& measure) {
  Json out = Json::array();
  for (const Atom& a : measure.atoms()) {
    out.push_back({{"weight", a.weight},
                   {"z", mode_vector_to_json(a.point)},
                   {"gamma", matrix_to_json(a.gamma)}});
  }
  return out;
}

StateValuedMeasure measure_from_json(const Json& j) {
  if (!j.is_array()) throw PreconditionError("json: ensembles must be arrays of atoms");
  std::vector<Atom> atoms;
  for (const Json& a : j) {
    atoms.push_back({a.at("weight").get<double>(), mode_vector_from_json(a.at("z")),
                     matrix_from_json(a.at("gamma"))});
  }
  return StateValuedMeasure(std::move(atoms));
}

}  // namespace qcsb

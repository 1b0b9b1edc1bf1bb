#pragma once

#include <cstddef>

#include <nlohmann/json.hpp>

#include "qcsb/linalg.hpp"
#include "qcsb/measures.hpp"
#include "qcsb/spin_boson.hpp"

namespace qcsb {

using Json = nlohmann::json;

/// [[[re, im], ...], ...], one inner array per row.
Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j);

/// [[re, im], ...]
Json mode_vector_to_json(const ModeVector& v);
ModeVector mode_vector_from_json(const Json& j);

/// {"dimensions": [d_spin, d_boson], "epsilon", "time", "entries": flat
/// row-major list of [re, im]}.
Json state_to_json(const JointState& state, std::size_t d_spin, std::size_t d_boson);
JointState state_from_json(const Json& j);

/// [{"weight", "z": [[re, im], ...], "gamma": matrix}, ...]
Json measure_to_json(const StateValuedMeasure& measure);
StateValuedMeasure measure_from_json(const Json& j);

}  // namespace qcsb

#pragma once
/*
 * JSON wire format.  Matrices are {"rows": n, "cols": m, "re": [...],
 * "im": [...]} with row-major coefficient order; vectors are the cols = 1
 * case.  Serialization uses shortest-round-trip doubles, so parsing an
 * emitted document reproduces every coefficient bit-for-bit.
 */

#include <json.hpp>

#include "twistdisc/types.hpp"

namespace twistdisc {

nlohmann::json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const nlohmann::json& j);

nlohmann::json state_to_json(const PureState& s);
PureState state_from_json(const nlohmann::json& j, double norm_tolerance = 1e-9);

}  // namespace twistdisc

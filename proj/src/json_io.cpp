#include "twistdisc/json_io.hpp"

#include <stdexcept>

namespace twistdisc {

using nlohmann::json;

json matrix_to_json(const ComplexMatrix& m) {
  json re = json::array();
  json im = json::array();
  for (const cd& e : m.entries) {
    re.push_back(e.real());
    im.push_back(e.imag());
  }
  return json{{"rows", m.rows}, {"cols", m.cols}, {"re", std::move(re)}, {"im", std::move(im)}};
}

ComplexMatrix matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("re") ||
      !j.contains("im"))
    throw std::runtime_error("matrix_from_json: expected {rows, cols, re, im}");
  const auto rows = j.at("rows").get<std::size_t>();
  const auto cols = j.at("cols").get<std::size_t>();
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (rows == 0 || cols == 0) throw std::runtime_error("matrix_from_json: zero dimension");
  if (!re.is_array() || !im.is_array() || re.size() != rows * cols || im.size() != rows * cols)
    throw std::runtime_error("matrix_from_json: coefficient arrays must have rows*cols entries");
  ComplexMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows * cols; ++i)
    m.entries[i] = cd{re[i].get<double>(), im[i].get<double>()};
  return m;
}

json state_to_json(const PureState& s) {
  ComplexMatrix m(s.dim(), 1);
  m.entries = s.amplitudes;
  return matrix_to_json(m);
}

PureState state_from_json(const json& j, double norm_tolerance) {
  ComplexMatrix m = matrix_from_json(j);
  if (m.cols != 1) throw std::runtime_error("state_from_json: expected a cols = 1 vector");
  return make_pure_state(std::move(m.entries), norm_tolerance);
}

}  // namespace twistdisc

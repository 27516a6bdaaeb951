#include "twistdisc/operators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "twistdisc/linalg.hpp"

namespace twistdisc {

cd root_of_unity(std::uint64_t d, std::int64_t k) {
  if (d == 0) throw std::invalid_argument("root_of_unity: d must be positive");
  std::int64_t m = k % static_cast<std::int64_t>(d);
  if (m < 0) m += static_cast<std::int64_t>(d);
  constexpr double two_pi = 6.283185307179586476925286766559;
  const double theta = two_pi * static_cast<double>(m) / static_cast<double>(d);
  return cd{std::cos(theta), std::sin(theta)};
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t f = 2; f * f <= n; ++f)
    if (n % f == 0) return false;
  return true;
}

std::vector<PrimePower> factorize(std::uint64_t d) {
  if (d < 2) throw std::invalid_argument("factorize: d must be at least 2");
  std::vector<PrimePower> out;
  std::uint64_t rest = d;
  for (std::uint64_t f = 2; f * f <= rest; ++f) {
    if (rest % f) continue;
    PrimePower pp{f, 0, 1};
    while (rest % f == 0) {
      rest /= f;
      ++pp.r;
      pp.value *= f;
    }
    out.push_back(pp);
  }
  if (rest > 1) out.push_back(PrimePower{rest, 1, rest});
  std::sort(out.begin(), out.end(),
            [](const PrimePower& a, const PrimePower& b) { return a.value < b.value; });
  return out;
}

UnitaryMatrix build_shift(std::size_t d) {
  if (d < 2) throw std::invalid_argument("build_shift: d must be at least 2");
  ComplexMatrix m(d, d);
  for (std::size_t j = 0; j < d; ++j) m((j + 1) % d, j) = 1.0;
  return UnitaryMatrix{std::move(m), true};
}

UnitaryMatrix build_clock(std::size_t d) {
  if (d < 2) throw std::invalid_argument("build_clock: d must be at least 2");
  ComplexMatrix m(d, d);
  for (std::size_t j = 0; j < d; ++j) m(j, j) = root_of_unity(d, static_cast<std::int64_t>(j));
  return UnitaryMatrix{std::move(m), true};
}

UnitaryMatrix gbs_unitary(const GbsLabel& label) {
  if (label.d < 2) throw std::invalid_argument("gbs_unitary: d must be at least 2");
  if (label.m >= label.d || label.n >= label.d)
    throw std::invalid_argument("gbs_unitary: exponents must lie in [0, d)");
  ComplexMatrix m(label.d, label.d);
  // X^m Z^n e_j = ω^{n j} e_{j+m}
  for (std::size_t j = 0; j < label.d; ++j)
    m((j + label.m) % label.d, j) =
        root_of_unity(label.d, static_cast<std::int64_t>(label.n * j));
  return UnitaryMatrix{std::move(m), true};
}

namespace {

void validate_lattice_label(const LatticeLabel& label) {
  const auto expect = factorize(label.d);
  if (label.factors.size() != expect.size())
    throw std::invalid_argument("lattice label: factor count does not match factorization");
  for (std::size_t j = 0; j < expect.size(); ++j) {
    if (label.factors[j].p != expect[j].p || label.factors[j].r != expect[j].r)
      throw std::invalid_argument("lattice label: factors must match the sorted factorization");
  }
  if (label.s.size() != expect.size() || label.t.size() != expect.size())
    throw std::invalid_argument("lattice label: exponent blocks must match factor count");
  for (std::size_t j = 0; j < expect.size(); ++j) {
    if (label.s[j].size() != expect[j].r || label.t[j].size() != expect[j].r)
      throw std::invalid_argument("lattice label: exponent vectors must have length r");
    for (unsigned e : label.s[j])
      if (e >= expect[j].p) throw std::invalid_argument("lattice label: shift exponent out of range");
    for (unsigned e : label.t[j])
      if (e >= expect[j].p) throw std::invalid_argument("lattice label: clock exponent out of range");
  }
}

}  // namespace

UnitaryMatrix lattice_unitary(const LatticeLabel& label) {
  validate_lattice_label(label);
  ComplexMatrix acc = ComplexMatrix::identity(1);
  for (std::size_t j = 0; j < label.factors.size(); ++j) {
    for (unsigned i = 0; i < label.factors[j].r; ++i) {
      const GbsLabel slot{static_cast<std::size_t>(label.factors[j].p), label.s[j][i],
                          label.t[j][i]};
      acc = tensor(acc, gbs_unitary(slot).matrix);
    }
  }
  return UnitaryMatrix{std::move(acc), true};
}

std::vector<SlotLabel> slots_of_gbs(const GbsLabel& label) {
  return {SlotLabel{label.d, static_cast<unsigned>(label.m), static_cast<unsigned>(label.n),
                    is_prime(label.d)}};
}

std::vector<SlotLabel> slots_of_lattice(const LatticeLabel& label) {
  validate_lattice_label(label);
  std::vector<SlotLabel> out;
  for (std::size_t j = 0; j < label.factors.size(); ++j)
    for (unsigned i = 0; i < label.factors[j].r; ++i)
      out.push_back(SlotLabel{label.factors[j].p, label.s[j][i], label.t[j][i], true});
  return out;
}

GbsLabel gbs_label_from_index(std::size_t d, std::size_t index) {
  if (index >= d * d) throw std::invalid_argument("gbs_label_from_index: index out of range");
  return GbsLabel{d, index / d, index % d};
}

std::size_t gbs_index_of(const GbsLabel& label) { return label.m * label.d + label.n; }

LatticeLabel lattice_label_from_index(std::uint64_t d, std::size_t index) {
  const auto factors = factorize(d);
  std::size_t total = 1;
  for (const auto& f : factors) total *= static_cast<std::size_t>(f.value) * f.value;
  if (index >= total) throw std::invalid_argument("lattice_label_from_index: index out of range");

  LatticeLabel label;
  label.d = d;
  label.factors = factors;
  label.s.resize(factors.size());
  label.t.resize(factors.size());
  // factor-major: first factor's digits are the most significant
  std::size_t rem = index;
  for (std::size_t j = factors.size(); j-- > 0;) {
    const auto p = static_cast<std::size_t>(factors[j].p);
    const unsigned r = factors[j].r;
    std::vector<unsigned> digits(2 * r);
    for (std::size_t k = 2 * r; k-- > 0;) {
      digits[k] = static_cast<unsigned>(rem % p);
      rem /= p;
    }
    label.s[j].assign(digits.begin(), digits.begin() + r);
    label.t[j].assign(digits.begin() + r, digits.end());
  }
  return label;
}

std::size_t lattice_index_of(const LatticeLabel& label) {
  validate_lattice_label(label);
  std::size_t idx = 0;
  for (std::size_t j = 0; j < label.factors.size(); ++j) {
    const auto p = static_cast<std::size_t>(label.factors[j].p);
    for (unsigned i = 0; i < label.factors[j].r; ++i) idx = idx * p + label.s[j][i];
    for (unsigned i = 0; i < label.factors[j].r; ++i) idx = idx * p + label.t[j][i];
  }
  return idx;
}

std::string format_gbs_label(const GbsLabel& label) {
  std::ostringstream os;
  os << '(' << label.m << ',' << label.n << ')';
  return os.str();
}

std::string format_lattice_label(const LatticeLabel& label) {
  std::ostringstream os;
  for (std::size_t j = 0; j < label.factors.size(); ++j) {
    if (j) os << '*';
    os << label.factors[j].p << '^' << label.factors[j].r << ":[";
    for (unsigned i = 0; i < label.factors[j].r; ++i) {
      if (i) os << ',';
      os << label.s[j][i];
    }
    os << "]/[";
    for (unsigned i = 0; i < label.factors[j].r; ++i) {
      if (i) os << ',';
      os << label.t[j][i];
    }
    os << ']';
  }
  return os.str();
}

namespace {

[[noreturn]] void bad_label(const std::string& text, const char* what) {
  throw std::invalid_argument("label '" + text + "': " + what);
}

std::vector<unsigned> parse_uint_list(const std::string& text, const std::string& chunk) {
  std::vector<unsigned> out;
  std::size_t pos = 0;
  while (pos < chunk.size()) {
    std::size_t next = chunk.find(',', pos);
    if (next == std::string::npos) next = chunk.size();
    const std::string piece = chunk.substr(pos, next - pos);
    if (piece.empty()) bad_label(text, "empty exponent");
    try {
      out.push_back(static_cast<unsigned>(std::stoul(piece)));
    } catch (const std::exception&) {
      bad_label(text, "exponent is not a number");
    }
    pos = next + 1;
  }
  return out;
}

}  // namespace

GbsLabel parse_gbs_label(const std::string& text, std::size_t d) {
  if (text.size() < 5 || text.front() != '(' || text.back() != ')') bad_label(text, "expected (m,n)");
  const std::size_t comma = text.find(',');
  if (comma == std::string::npos) bad_label(text, "expected (m,n)");
  GbsLabel label;
  label.d = d;
  try {
    label.m = std::stoul(text.substr(1, comma - 1));
    label.n = std::stoul(text.substr(comma + 1, text.size() - comma - 2));
  } catch (const std::exception&) {
    bad_label(text, "exponent is not a number");
  }
  if (label.m >= d || label.n >= d) bad_label(text, "exponent out of [0, d)");
  return label;
}

LatticeLabel parse_lattice_label(const std::string& text, std::uint64_t d) {
  LatticeLabel label;
  label.d = d;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t next = text.find('*', pos);
    if (next == std::string::npos) next = text.size();
    const std::string seg = text.substr(pos, next - pos);
    const std::size_t caret = seg.find('^');
    const std::size_t colon = seg.find(':', caret == std::string::npos ? 0 : caret);
    if (caret == std::string::npos || colon == std::string::npos)
      bad_label(text, "expected p^r:[s,...]/[t,...] segments");
    PrimePower pp;
    try {
      pp.p = std::stoull(seg.substr(0, caret));
      pp.r = static_cast<unsigned>(std::stoul(seg.substr(caret + 1, colon - caret - 1)));
    } catch (const std::exception&) {
      bad_label(text, "bad prime power");
    }
    pp.value = 1;
    for (unsigned i = 0; i < pp.r; ++i) pp.value *= pp.p;
    const std::string rest = seg.substr(colon + 1);
    const std::size_t slash = rest.find("]/[");
    if (rest.size() < 5 || rest.front() != '[' || rest.back() != ']' || slash == std::string::npos)
      bad_label(text, "expected [s,...]/[t,...]");
    label.factors.push_back(pp);
    label.s.push_back(parse_uint_list(text, rest.substr(1, slash - 1)));
    label.t.push_back(parse_uint_list(text, rest.substr(slash + 3, rest.size() - slash - 4)));
    pos = next + 1;
  }
  validate_lattice_label(label);  // also checks against factorize(d)
  return label;
}

std::vector<std::string> split_label_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t next = text.find(';', pos);
    if (next == std::string::npos) next = text.size();
    std::string piece = text.substr(pos, next - pos);
    // trim spaces
    const auto b = piece.find_first_not_of(" \t");
    const auto e = piece.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(piece.substr(b, e - b + 1));
    pos = next + 1;
  }
  return out;
}

TwistPhaseTable twist_table(const std::vector<UnitaryMatrix>& basis, double pair_tolerance) {
  if (basis.empty()) throw std::invalid_argument("twist_table: empty basis");
  const std::size_t n = basis.size();
  const std::size_t d = basis[0].dim();
  for (const auto& u : basis)
    if (u.dim() != d) throw std::invalid_argument("twist_table: mixed dimensions");

  TwistPhaseTable table;
  table.size = n;
  table.phases.assign(n * n, cd{0.0, 0.0});
  table.pair_ok.assign(n * n, 0);
  table.orthogonal = true;

  for (std::size_t i = 0; i < n && table.orthogonal; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const cd g = hs_inner(basis[i].matrix, basis[j].matrix);
      const double err = (i == j) ? std::abs(g - 1.0) : std::abs(g);
      if (err > tol::ortho) {
        table.orthogonal = false;
        table.note = "basis not orthonormal at pair (" + std::to_string(i) + "," +
                     std::to_string(j) + ")";
        break;
      }
    }
  }

  bool all_pairs = true;
  std::vector<ComplexMatrix> transposes;
  transposes.reserve(n);
  for (const auto& u : basis) transposes.push_back(transpose_of(u.matrix));

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const ComplexMatrix a = mul(basis[i].matrix, transposes[j]);
      const ComplexMatrix b = mul(transposes[j], basis[i].matrix);
      // w = a/b at b's largest entry, then check a = w b everywhere.
      std::size_t arg = 0;
      double best = 0.0;
      for (std::size_t k = 0; k < b.size(); ++k) {
        const double mag = std::abs(b.entries[k]);
        if (mag > best) {
          best = mag;
          arg = k;
        }
      }
      bool ok = best > pair_tolerance;
      cd w{0.0, 0.0};
      if (ok) {
        w = a.entries[arg] / b.entries[arg];
        ok = std::abs(std::abs(w) - 1.0) <= pair_tolerance;
      }
      if (ok) {
        double worst = 0.0;
        for (std::size_t k = 0; k < b.size(); ++k)
          worst = std::max(worst, std::abs(a.entries[k] - w * b.entries[k]));
        ok = worst <= pair_tolerance;
      }
      table.phases[i * n + j] = w;
      table.pair_ok[i * n + j] = ok ? 1 : 0;
      if (!ok && all_pairs) {
        all_pairs = false;
        if (table.note.empty())
          table.note = "pair (" + std::to_string(i) + "," + std::to_string(j) +
                       ") has a non-scalar or non-unimodular ratio";
      }
    }
  }
  table.is_twist = table.orthogonal && all_pairs;
  return table;
}

std::vector<UnitaryMatrix> tensor_basis(const std::vector<std::vector<UnitaryMatrix>>& factors) {
  if (factors.empty()) throw std::invalid_argument("tensor_basis: no factors");
  for (const auto& f : factors)
    if (f.empty()) throw std::invalid_argument("tensor_basis: empty factor basis");
  std::vector<UnitaryMatrix> acc = factors[0];
  for (std::size_t j = 1; j < factors.size(); ++j) {
    std::vector<UnitaryMatrix> next;
    next.reserve(acc.size() * factors[j].size());
    for (const auto& a : acc)
      for (const auto& b : factors[j]) next.push_back(tensor_u(a, b));
    acc = std::move(next);
  }
  return acc;
}

}  // namespace twistdisc

#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dcqo/error.hpp"

namespace dcqo {

using cplx = std::complex<double>;

inline constexpr int kMaxSymbolicQubits = 64;
inline constexpr int kMaxDenseQubits = 12;

/// N-qubit Pauli string in symplectic form.
///
/// Qubit q carries X if only bit q of `x_mask` is set, Z if only bit q of
/// `z_mask` is set, Y if both are set. The operator is
/// `i^phase * P_0 (x) P_1 (x) ...` with Y meaning the Hermitian Pauli Y, so
/// every string with phase 0 or 2 is Hermitian.
struct PauliString {
  std::uint64_t x_mask = 0;
  std::uint64_t z_mask = 0;
  std::uint8_t phase = 0;  // power of i, in [0, 4)
  int n_qubits = 1;

  static PauliString identity(int n) {
    check_width(n);
    return PauliString{0, 0, 0, n};
  }
  static PauliString x(int n, int q) { return single(n, q, true, false); }
  static PauliString y(int n, int q) { return single(n, q, true, true); }
  static PauliString z(int n, int q) { return single(n, q, false, true); }

  /// Parses "XIZY" style text; character k is qubit k. An optional leading
  /// sign of "+", "-", "+i" or "-i" sets the phase.
  static PauliString parse(std::string_view text) {
    std::uint8_t ph = 0;
    if (!text.empty() && (text.front() == '+' || text.front() == '-')) {
      ph = text.front() == '-' ? 2 : 0;
      text.remove_prefix(1);
      if (!text.empty() && text.front() == 'i') {
        ph = static_cast<std::uint8_t>((ph + 1) % 4);
        text.remove_prefix(1);
      }
    }
    const int n = static_cast<int>(text.size());
    PauliString p = identity(n);
    p.phase = ph;
    for (int q = 0; q < n; ++q) {
      const std::uint64_t bit = std::uint64_t{1} << q;
      switch (text[q]) {
        case 'I': case '_': break;
        case 'X': p.x_mask |= bit; break;
        case 'Y': p.x_mask |= bit; p.z_mask |= bit; break;
        case 'Z': p.z_mask |= bit; break;
        default: throw ConfigError("bad Pauli character '" + std::string(1, text[q]) + "'");
      }
    }
    return p;
  }

  int weight() const { return std::popcount(x_mask | z_mask); }
  bool is_identity() const { return (x_mask | z_mask) == 0; }
  bool is_hermitian() const { return phase % 2 == 0; }
  bool is_diagonal() const { return x_mask == 0; }

  bool commutes_with(const PauliString& o) const {
    return ((std::popcount(x_mask & o.z_mask) + std::popcount(z_mask & o.x_mask)) & 1) == 0;
  }

  cplx phase_value() const {
    static constexpr double re[4] = {1, 0, -1, 0};
    static constexpr double im[4] = {0, 1, 0, -1};
    return {re[phase], im[phase]};
  }

  std::string str() const {
    static constexpr const char* sign[4] = {"+", "+i", "-", "-i"};
    std::string out = sign[phase];
    for (int q = 0; q < n_qubits; ++q) {
      const bool xb = (x_mask >> q) & 1;
      const bool zb = (z_mask >> q) & 1;
      out += xb ? (zb ? 'Y' : 'X') : (zb ? 'Z' : '_');
    }
    return out;
  }

  friend bool operator==(const PauliString&, const PauliString&) = default;

  static void check_width(int n) {
    if (n < 1 || n > kMaxSymbolicQubits) {
      throw ConfigError("Pauli string width must be in [1, 64], got " + std::to_string(n));
    }
  }

 private:
  static PauliString single(int n, int q, bool xb, bool zb) {
    check_width(n);
    if (q < 0 || q >= n) throw DimensionError("qubit index out of range");
    PauliString p = identity(n);
    if (xb) p.x_mask = std::uint64_t{1} << q;
    if (zb) p.z_mask = std::uint64_t{1} << q;
    return p;
  }
};

/// Pauli group product a*b with exact phase.
inline PauliString multiply(const PauliString& a, const PauliString& b) {
  if (a.n_qubits != b.n_qubits) {
    throw DimensionError("multiply: qubit-count mismatch (" + std::to_string(a.n_qubits) +
                         " vs " + std::to_string(b.n_qubits) + ")");
  }
  // Write each factor as i^{phase + |x&z|} X^x Z^z. Moving Z^{za} past X^{xb}
  // costs (-1)^{|za&xb|}; the result is then re-expressed with Y = iXZ.
  PauliString c;
  c.n_qubits = a.n_qubits;
  c.x_mask = a.x_mask ^ b.x_mask;
  c.z_mask = a.z_mask ^ b.z_mask;
  const int e = a.phase + b.phase + std::popcount(a.x_mask & a.z_mask) +
                std::popcount(b.x_mask & b.z_mask) + 2 * std::popcount(a.z_mask & b.x_mask) -
                std::popcount(c.x_mask & c.z_mask);
  c.phase = static_cast<std::uint8_t>(((e % 4) + 4) % 4);
  return c;
}

/// Weighted sum of Pauli strings with phases folded into the coefficients.
///
/// Keys are (x_mask, z_mask) of phase-0 strings; iteration order is the key
/// order, which keeps every downstream reduction deterministic.
class PauliSum {
 public:
  using Key = std::pair<std::uint64_t, std::uint64_t>;
  static constexpr double kDefaultPruneTol = 1e-12;

  explicit PauliSum(int n_qubits, double prune_tol = kDefaultPruneTol)
      : n_qubits_(n_qubits), prune_tol_(prune_tol) {
    PauliString::check_width(n_qubits);
  }

  PauliSum(const PauliString& p, cplx coeff = 1.0, double prune_tol = kDefaultPruneTol)
      : PauliSum(p.n_qubits, prune_tol) {
    add(p, coeff);
  }

  int n_qubits() const { return n_qubits_; }
  double prune_tol() const { return prune_tol_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const std::map<Key, cplx>& terms() const { return terms_; }

  /// Coefficient of the phase-0 string with the given masks (0 if absent).
  cplx coefficient(const PauliString& p) const {
    auto it = terms_.find({p.x_mask, p.z_mask});
    return it == terms_.end() ? cplx{} : it->second * std::conj(p.phase_value());
  }

  PauliSum& add(const PauliString& p, cplx coeff) {
    check(p.n_qubits);
    accumulate({p.x_mask, p.z_mask}, coeff * p.phase_value());
    return *this;
  }

  PauliSum& operator+=(const PauliSum& o) {
    check(o.n_qubits_);
    for (const auto& [k, c] : o.terms_) accumulate(k, c);
    return *this;
  }
  PauliSum& operator-=(const PauliSum& o) {
    check(o.n_qubits_);
    for (const auto& [k, c] : o.terms_) accumulate(k, -c);
    return *this;
  }
  PauliSum& operator*=(cplx s) {
    for (auto& [k, c] : terms_) c *= s;
    prune();
    return *this;
  }

  friend PauliSum operator+(PauliSum a, const PauliSum& b) { return a += b; }
  friend PauliSum operator-(PauliSum a, const PauliSum& b) { return a -= b; }
  friend PauliSum operator*(PauliSum a, cplx s) { return a *= s; }
  friend PauliSum operator*(cplx s, PauliSum a) { return a *= s; }

  friend PauliSum operator*(const PauliSum& a, const PauliSum& b) {
    a.check(b.n_qubits_);
    PauliSum out(a.n_qubits_, a.prune_tol_);
    for (const auto& [ka, ca] : a.terms_) {
      const PauliString pa = a.string_of(ka);
      for (const auto& [kb, cb] : b.terms_) {
        const PauliString pc = multiply(pa, a.string_of(kb));
        out.raw_add({pc.x_mask, pc.z_mask}, ca * cb * pc.phase_value());
      }
    }
    out.prune();
    return out;
  }

  /// True when every coefficient is real within `tol`.
  bool is_hermitian(double tol = 1e-12) const {
    for (const auto& [k, c] : terms_) {
      if (std::abs(c.imag()) > tol) return false;
    }
    return true;
  }

  double max_abs_coefficient() const {
    double m = 0.0;
    for (const auto& [k, c] : terms_) m = std::max(m, std::abs(c));
    return m;
  }

  PauliString string_of(const Key& k) const { return PauliString{k.first, k.second, 0, n_qubits_}; }

  std::string str() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, c] : terms_) {
      if (!first) os << " + ";
      first = false;
      os << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i)"
         << string_of(k).str().substr(1);
    }
    if (first) os << "0";
    return os.str();
  }

  /// Dense 2^N x 2^N row-major rendering, basis index bit q = qubit q.
  std::vector<cplx> to_dense() const {
    if (n_qubits_ > kMaxDenseQubits) throw ConfigError("dense rendering is capped at 12 qubits");
    const std::size_t dim = std::size_t{1} << n_qubits_;
    std::vector<cplx> m(dim * dim);
    for (const auto& [k, c] : terms_) {
      const auto [xm, zm] = k;
      const cplx yph = std::pow(cplx{0, 1}, std::popcount(xm & zm));
      for (std::size_t col = 0; col < dim; ++col) {
        const double sign = (std::popcount(col & zm) & 1) ? -1.0 : 1.0;
        m[(col ^ xm) * dim + col] += c * yph * sign;
      }
    }
    return m;
  }

  friend void check_same_width(const PauliSum& a, const PauliSum& b) { a.check(b.n_qubits_); }
  friend PauliSum commutator(const PauliSum& a, const PauliSum& b);

 private:
  void check(int n) const {
    if (n != n_qubits_) {
      throw DimensionError("PauliSum: qubit-count mismatch (" + std::to_string(n_qubits_) +
                           " vs " + std::to_string(n) + ")");
    }
  }
  void raw_add(const Key& k, cplx c) { terms_[k] += c; }
  void accumulate(const Key& k, cplx c) {
    auto [it, inserted] = terms_.try_emplace(k, c);
    if (!inserted) it->second += c;
    if (std::abs(it->second) < prune_tol_) terms_.erase(it);
  }
  void prune() {
    std::erase_if(terms_, [this](const auto& kv) { return std::abs(kv.second) < prune_tol_; });
  }

  int n_qubits_;
  double prune_tol_;
  std::map<Key, cplx> terms_;
};

/// [a, b] = ab - ba. Only anticommuting string pairs contribute, each with
/// twice its product.
inline PauliSum commutator(const PauliSum& a, const PauliSum& b) {
  check_same_width(a, b);
  PauliSum out(a.n_qubits(), a.prune_tol());
  for (const auto& [ka, ca] : a.terms()) {
    const PauliString pa = a.string_of(ka);
    for (const auto& [kb, cb] : b.terms()) {
      const PauliString pb = b.string_of(kb);
      if (pa.commutes_with(pb)) continue;
      const PauliString pc = multiply(pa, pb);
      out.raw_add({pc.x_mask, pc.z_mask}, 2.0 * ca * cb * pc.phase_value());
    }
  }
  out.prune();
  return out;
}

/// Tr(a b) / 2^N. Distinct canonical strings are trace-orthogonal and every
/// string squares to the identity, so only matching keys contribute.
inline cplx normalized_trace_product(const PauliSum& a, const PauliSum& b) {
  check_same_width(a, b);
  cplx acc{};
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;
  for (const auto& [k, c] : small.terms()) {
    auto it = large.terms().find(k);
    if (it != large.terms().end()) acc += c * it->second;
  }
  return acc;
}

}  // namespace dcqo

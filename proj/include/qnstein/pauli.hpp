#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qnstein {

enum class Pauli : std::uint8_t { I, X, Y, Z };

inline char pauli_char(Pauli p) {
  switch (p) {
    case Pauli::I: return 'I';
    case Pauli::X: return 'X';
    case Pauli::Y: return 'Y';
    case Pauli::Z: return 'Z';
  }
  return '?';
}

/// Bit of site `q` in a basis index. Site 0 is the most significant bit.
inline std::uint64_t site_bit(int qubits, int q) {
  return std::uint64_t{1} << (qubits - 1 - q);
}

/// Bit-mask form of a Pauli pattern.
///
/// `flip` marks X/Y sites, `phase` marks Y/Z sites. Acting on basis state |i>,
/// the string gives i^{#Y} (-1)^{popcount(i & phase)} |i ^ flip>.
struct PauliMasks {
  std::uint64_t flip = 0;
  std::uint64_t phase = 0;
  int y_count = 0;

  std::complex<double> sign(std::uint64_t index) const {
    static constexpr std::complex<double> kIPow[4] = {
        {1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const int parity = std::popcount(index & phase) & 1;
    const std::complex<double> base = kIPow[y_count & 3];
    return parity ? -base : base;
  }
};

struct PauliString {
  double coefficient = 0.0;
  std::vector<Pauli> axes;

  int qubit_count() const { return static_cast<int>(axes.size()); }

  bool is_identity() const {
    for (Pauli p : axes)
      if (p != Pauli::I) return false;
    return true;
  }

  PauliMasks masks() const {
    PauliMasks m;
    const int n = qubit_count();
    for (int q = 0; q < n; ++q) {
      const std::uint64_t bit = site_bit(n, q);
      switch (axes[q]) {
        case Pauli::I: break;
        case Pauli::X: m.flip |= bit; break;
        case Pauli::Y: m.flip |= bit; m.phase |= bit; ++m.y_count; break;
        case Pauli::Z: m.phase |= bit; break;
      }
    }
    return m;
  }

  /// Compact label such as "Z0Z1" or "I".
  std::string label() const {
    std::string out;
    for (int q = 0; q < qubit_count(); ++q) {
      if (axes[q] == Pauli::I) continue;
      out += pauli_char(axes[q]);
      out += std::to_string(q);
    }
    return out.empty() ? "I" : out;
  }
};

/// Real-weighted sum of Pauli strings in canonical form: unique patterns,
/// sorted by pattern, coefficients with |c| <= kPruneThreshold removed.
class PauliSum {
 public:
  static constexpr double kPruneThreshold = 1e-12;

  explicit PauliSum(int qubit_count) : qubit_count_(qubit_count) {
    if (qubit_count < 1) throw std::invalid_argument("PauliSum: qubit_count must be positive");
  }

  PauliSum(int qubit_count, std::vector<PauliString> terms) : PauliSum(qubit_count) {
    for (auto& t : terms) accumulate(t.axes, t.coefficient);
    canonicalize();
  }

  int qubit_count() const { return qubit_count_; }
  const std::vector<PauliString>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  /// Sum of identity-term coefficients.
  double constant() const {
    double c = 0.0;
    for (const auto& t : terms_)
      if (t.is_identity()) c += t.coefficient;
    return c;
  }

  /// Coefficient of the given pattern (0 when absent).
  double coefficient(const std::vector<Pauli>& axes) const {
    for (const auto& t : terms_)
      if (t.axes == axes) return t.coefficient;
    return 0.0;
  }

  void add(std::vector<Pauli> axes, double coefficient) {
    accumulate(axes, coefficient);
    canonicalize();
  }

  PauliSum& operator+=(const PauliSum& other) {
    check_width(other);
    for (const auto& t : other.terms_) accumulate(t.axes, t.coefficient);
    canonicalize();
    return *this;
  }

  friend PauliSum operator+(PauliSum a, const PauliSum& b) { return a += b; }

  friend PauliSum operator*(double s, PauliSum a) {
    for (auto& t : a.terms_) t.coefficient *= s;
    a.canonicalize();
    return a;
  }

  /// Operator product. Throws if the product is not Hermitian with real
  /// weights (imaginary parts must cancel, as they do for squares of
  /// Hermitian sums).
  friend PauliSum operator*(const PauliSum& a, const PauliSum& b) {
    a.check_width(b);
    std::map<std::vector<Pauli>, std::complex<double>> acc;
    for (const auto& ta : a.terms_) {
      for (const auto& tb : b.terms_) {
        std::vector<Pauli> axes(a.qubit_count_);
        std::complex<double> phase{ta.coefficient * tb.coefficient, 0.0};
        for (int q = 0; q < a.qubit_count_; ++q) {
          auto [p, ph] = multiply(ta.axes[q], tb.axes[q]);
          axes[q] = p;
          phase *= ph;
        }
        acc[axes] += phase;
      }
    }
    PauliSum out(a.qubit_count_);
    for (auto& [axes, c] : acc) {
      if (std::abs(c.imag()) > kPruneThreshold)
        throw std::domain_error("PauliSum product has a non-Hermitian component");
      out.accumulate(axes, c.real());
    }
    out.canonicalize();
    return out;
  }

  static PauliSum identity(int qubit_count, double coefficient = 1.0) {
    PauliSum s(qubit_count);
    s.add(std::vector<Pauli>(qubit_count, Pauli::I), coefficient);
    return s;
  }

  static PauliSum single(int qubit_count, std::initializer_list<std::pair<int, Pauli>> sites,
                         double coefficient = 1.0) {
    std::vector<Pauli> axes(qubit_count, Pauli::I);
    for (auto [q, p] : sites) {
      if (q < 0 || q >= qubit_count) throw std::out_of_range("PauliSum::single: site out of range");
      axes[q] = p;
    }
    PauliSum s(qubit_count);
    s.add(std::move(axes), coefficient);
    return s;
  }

 private:
  static std::pair<Pauli, std::complex<double>> multiply(Pauli a, Pauli b) {
    using C = std::complex<double>;
    if (a == Pauli::I) return {b, C{1, 0}};
    if (b == Pauli::I) return {a, C{1, 0}};
    if (a == b) return {Pauli::I, C{1, 0}};
    // XY = iZ, YZ = iX, ZX = iY and the reversed orders pick up -i.
    const int ia = static_cast<int>(a), ib = static_cast<int>(b);
    const int third = 6 - ia - ib;  // I=0,X=1,Y=2,Z=3 so X+Y+Z = 6
    const bool cyclic = (ib - ia + 3) % 3 == 1;
    return {static_cast<Pauli>(third), cyclic ? C{0, 1} : C{0, -1}};
  }

  void check_width(const PauliSum& other) const {
    if (other.qubit_count_ != qubit_count_)
      throw std::invalid_argument("PauliSum: qubit counts differ");
  }

  void accumulate(const std::vector<Pauli>& axes, double coefficient) {
    if (static_cast<int>(axes.size()) != qubit_count_)
      throw std::invalid_argument("PauliString length does not match qubit_count");
    if (!std::isfinite(coefficient))
      throw std::invalid_argument("PauliString coefficient must be finite");
    terms_.push_back({coefficient, axes});
  }

  void canonicalize() {
    std::map<std::vector<Pauli>, double> merged;
    for (const auto& t : terms_) merged[t.axes] += t.coefficient;
    terms_.clear();
    for (auto& [axes, c] : merged)
      if (std::abs(c) > kPruneThreshold) terms_.push_back({c, axes});
  }

  int qubit_count_;
  std::vector<PauliString> terms_;
};

/// J * sum Z_i Z_{i+1} + h * sum X_i with open boundaries.
inline PauliSum build_tfim(int n, double coupling, double field) {
  if (n < 2) throw std::invalid_argument("build_tfim: need at least 2 qubits");
  PauliSum h(n);
  for (int i = 0; i + 1 < n; ++i)
    h += PauliSum::single(n, {{i, Pauli::Z}, {i + 1, Pauli::Z}}, coupling);
  for (int i = 0; i < n; ++i) h += PauliSum::single(n, {{i, Pauli::X}}, field);
  return h;
}

/// Electric-field operator l + 1/2 sum_{k<=site} (-1)^k Z_k, unsquared.
inline PauliSum schwinger_field(int n, int site, double background) {
  PauliSum e = PauliSum::identity(n, background);
  for (int k = 0; k <= site; ++k)
    e += PauliSum::single(n, {{k, Pauli::Z}}, (k % 2 == 0 ? 0.5 : -0.5));
  return e;
}

/// Jordan-Wigner form of the staggered-fermion lattice Schwinger model,
/// fully expanded (the squared field term is multiplied out, constants kept).
inline PauliSum build_schwinger(int n, double hopping, double mass, double background) {
  if (n < 2) throw std::invalid_argument("build_schwinger: need at least 2 qubits");
  if (n % 2 != 0) throw std::invalid_argument("build_schwinger: qubit count must be even");
  PauliSum h(n);
  for (int i = 0; i + 1 < n; ++i) {
    h += PauliSum::single(n, {{i, Pauli::X}, {i + 1, Pauli::X}}, hopping / 2);
    h += PauliSum::single(n, {{i, Pauli::Y}, {i + 1, Pauli::Y}}, hopping / 2);
  }
  for (int i = 0; i < n; ++i) {
    h += PauliSum::identity(n, mass / 2);
    h += PauliSum::single(n, {{i, Pauli::Z}}, (i % 2 == 0 ? mass : -mass) / 2);
  }
  for (int site = 0; site + 1 < n; ++site) {
    const PauliSum e = schwinger_field(n, site, background);
    h += e * e;
  }
  return h;
}

inline constexpr int kMaxDenseQubits = 14;

inline Eigen::MatrixXcd to_dense(const PauliString& term) {
  const int n = term.qubit_count();
  if (n > kMaxDenseQubits) throw std::length_error("to_dense: more than 14 qubits");
  const std::uint64_t dim = std::uint64_t{1} << n;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  const PauliMasks k = term.masks();
  for (std::uint64_t i = 0; i < dim; ++i) m(i ^ k.flip, i) += term.coefficient * k.sign(i);
  return m;
}

inline Eigen::MatrixXcd to_dense(const PauliSum& h) {
  const int n = h.qubit_count();
  if (n > kMaxDenseQubits) throw std::length_error("to_dense: more than 14 qubits");
  const std::uint64_t dim = std::uint64_t{1} << n;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& t : h.terms()) {
    const PauliMasks k = t.masks();
    for (std::uint64_t i = 0; i < dim; ++i) m(i ^ k.flip, i) += t.coefficient * k.sign(i);
  }
  return m;
}

inline double exact_ground_energy(const PauliSum& h) {
  const Eigen::MatrixXcd m = to_dense(h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("exact_ground_energy: eigensolver failed");
  return solver.eigenvalues().minCoeff();
}

/// Open-chain TFIM ground energy via free fermions: minus the sum of the
/// singular values of the bidiagonal matrix with |h| on the diagonal and |J|
/// on the superdiagonal. Valid for any n, unlike the dense oracle.
inline double tfim_ground_energy(int n, double coupling, double field) {
  if (n < 2) throw std::invalid_argument("tfim_ground_energy: need at least 2 qubits");
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) b(i, i) = std::abs(field);
  for (int i = 0; i + 1 < n; ++i) b(i, i + 1) = std::abs(coupling);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(b);
  return -svd.singularValues().sum();
}

/// Shot-noise scale of a full loss estimate: sqrt(sum c^2) over
/// non-identity terms, before dividing by sqrt(shots).
inline double noise_weight(const PauliSum& h) {
  double s = 0.0;
  for (const auto& t : h.terms())
    if (!t.is_identity()) s += t.coefficient * t.coefficient;
  return std::sqrt(s);
}

}  // namespace qnstein

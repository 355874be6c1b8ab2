#pragma once

// Holomorphic automorphisms of the unit disc, phi(z) = lambda (z - a) / (1 - conj(a) z),
// with composition, iteration, fixed-point classification, canonical forms,
// conjugators and one-parameter commutants.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "numeric.hpp"

namespace hardyiso {

inline constexpr double kBoundaryRejection = 1e-14;
inline constexpr double kEvalSlack = 1e-12;
inline constexpr double kDefaultClassifyTol = 1e-9;

class DiscAutomorphism {
 public:
  /// The identity e(z) = z.
  DiscAutomorphism() = default;

  /// lambda is renormalised to the unit circle; it must already be within
  /// 1e-6 of it. Rejects |a| >= 1 - 1e-14.
  DiscAutomorphism(Complex lambda, Complex a) : lambda_(lambda), a_(a) {
    if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()) ||
        !std::isfinite(a.real()) || !std::isfinite(a.imag())) {
      throw DomainError("automorphism parameters must be finite");
    }
    const double m = std::abs(lambda);
    if (std::abs(m - 1.0) > 1e-6) {
      throw DomainError("lambda must be unimodular, got |lambda| = " + std::to_string(m));
    }
    lambda_ /= m;
    if (std::abs(a) >= 1.0 - kBoundaryRejection) {
      throw DomainError("automorphism zero must satisfy |a| < 1 - 1e-14");
    }
  }

  static DiscAutomorphism identity() { return {}; }
  static DiscAutomorphism rotation(Complex lambda) { return {lambda, 0.0}; }
  static DiscAutomorphism rotation_by_angle(double theta) { return rotation(std::polar(1.0, theta)); }

  /// psi_r(z) = (z - r) / (1 - r z); fixes -1 and 1.
  static DiscAutomorphism hyperbolic_standard(double r) {
    if (!(std::abs(r) < 1.0)) throw DomainError("psi_r needs |r| < 1");
    return {1.0, r};
  }

  /// phi_c(z) = (1 + c - 2z) / (2c - (1 + c) z) for unimodular c != +-1;
  /// the parabolic maps fixing 1.
  static DiscAutomorphism parabolic_standard(Complex c) {
    if (std::abs(std::abs(c) - 1.0) > 1e-12) throw DomainError("phi_c needs |c| = 1");
    c = unit(c);
    if (std::abs(c - 1.0) < 1e-12 || std::abs(c + 1.0) < 1e-12) {
      throw DomainError("phi_c needs c != +-1");
    }
    return {-std::conj(c), (1.0 + c) / 2.0};
  }

  Complex lambda() const { return lambda_; }
  Complex a() const { return a_; }

  /// Evaluation without the domain check; used on interior points and on
  /// extended-plane computations inside the library.
  Complex apply(Complex z) const { return lambda_ * (z - a_) / (1.0 - std::conj(a_) * z); }

  Complex operator()(Complex z) const {
    if (std::abs(z) > 1.0 + kEvalSlack) {
      throw DomainError("evaluation point outside the closed disc");
    }
    return apply(z);
  }

  Complex derivative(Complex z) const {
    const Complex d = 1.0 - std::conj(a_) * z;
    return lambda_ * deficit(a_) / (d * d);
  }

  bool is_exact_identity() const { return lambda_ == Complex{1.0, 0.0} && a_ == Complex{0.0, 0.0}; }

  /// (conj(lambda), -lambda a), carrying the inverse matrix along when one is stored.
  DiscAutomorphism inverse_map() const {
    DiscAutomorphism out(std::conj(lambda_), -lambda_ * a_);
    if (has_matrix_) {
      out.has_matrix_ = true;
      out.alpha_ = std::conj(alpha_);
      out.beta_ = -beta_;
      out.log_det_ = log_det_;
    }
    return out;
  }

  friend bool operator==(const DiscAutomorphism& x, const DiscAutomorphism& y) {
    return x.lambda_ == y.lambda_ && x.a_ == y.a_;
  }

 private:
  friend class MoebiusMatrix;

  Complex lambda_{1.0, 0.0};
  Complex a_{0.0, 0.0};
  // Matrix this value was extracted from, kept because (lambda, a) alone loses
  // the size of 1 - |a| once a is close to the circle.
  bool has_matrix_ = false;
  Complex alpha_{1.0, 0.0};
  Complex beta_{0.0, 0.0};
  double log_det_ = 0.0;
};

/// SU(1,1) representative [[alpha, beta], [conj beta, conj alpha]] of an
/// automorphism, defined up to sign. Entries are kept rescaled so that
/// max(|alpha|, |beta|) = 1 while log_det tracks log(|alpha|^2 - |beta|^2), which
/// keeps long products finite and lets image_deficit stay accurate near the circle.
class MoebiusMatrix {
 public:
  MoebiusMatrix() = default;

  explicit MoebiusMatrix(const DiscAutomorphism& phi) {
    if (phi.has_matrix_) {
      alpha_ = phi.alpha_;
      beta_ = phi.beta_;
      log_det_ = phi.log_det_;
      return;
    }
    const Complex mu = std::sqrt(phi.lambda());
    alpha_ = mu;
    beta_ = -mu * phi.a();
    log_det_ = std::log(deficit(phi.a()));
  }

  Complex alpha() const { return alpha_; }
  Complex beta() const { return beta_; }
  double log_det() const { return log_det_; }

  /// Entries scaled to |alpha|^2 - |beta|^2 = 1, sign fixed so Re alpha >= 0.
  std::pair<Complex, Complex> normalized() const {
    const double f = std::exp(-0.5 * log_det_);
    Complex al = alpha_ * f;
    Complex be = beta_ * f;
    if (al.real() < 0.0) {
      al = -al;
      be = -be;
    }
    return {al, be};
  }

  Complex apply(Complex z) const {
    return (alpha_ * z + beta_) / (std::conj(beta_) * z + std::conj(alpha_));
  }

  /// 1 - |M(z)|^2 computed from 1 - |z|^2 without cancellation.
  double image_deficit(Complex z, double z_deficit) const {
    const double den = std::norm(std::conj(beta_) * z + std::conj(alpha_));
    return std::exp(log_det_ + std::log(z_deficit) - std::log(den));
  }

  MoebiusMatrix inverse() const {
    MoebiusMatrix r;
    r.alpha_ = std::conj(alpha_);
    r.beta_ = -beta_;
    r.log_det_ = log_det_;
    return r;
  }

  /// Products are formed in long double: near-parabolic powers cancel heavily
  /// when a forward and a backward iterate are combined.
  friend MoebiusMatrix operator*(const MoebiusMatrix& x, const MoebiusMatrix& y) {
    return Wide(x).times(Wide(y)).narrow();
  }

  /// Binary powering with rescaling after every product; negative n powers the inverse.
  MoebiusMatrix power(std::int64_t n) const {
    Wide base(n < 0 ? inverse() : *this);
    std::uint64_t k = n < 0 ? static_cast<std::uint64_t>(-(n + 1)) + 1 : static_cast<std::uint64_t>(n);
    Wide result;
    while (k != 0) {
      if (k & 1U) result = result.times(base);
      k >>= 1U;
      if (k != 0) base = base.times(base);
    }
    return result.narrow();
  }

  /// Throws DomainError when the zero has drifted within 1e-14 of the circle.
  DiscAutomorphism to_automorphism() const {
    const Complex a = -beta_ / alpha_;
    const Complex lambda = alpha_ / std::conj(alpha_);
    DiscAutomorphism out(unit(lambda), a);
    out.has_matrix_ = true;
    out.alpha_ = alpha_;
    out.beta_ = beta_;
    out.log_det_ = log_det_;
    return out;
  }

 private:
  using WideComplex = std::complex<long double>;

  struct Wide {
    WideComplex alpha{1.0L, 0.0L};
    WideComplex beta{0.0L, 0.0L};
    long double log_det = 0.0L;

    Wide() = default;
    explicit Wide(const MoebiusMatrix& m)
        : alpha(static_cast<WideComplex>(m.alpha_)), beta(static_cast<WideComplex>(m.beta_)), log_det(m.log_det_) {}

    Wide times(const Wide& y) const {
      Wide r;
      r.alpha = alpha * y.alpha + beta * std::conj(y.beta);
      r.beta = alpha * y.beta + beta * std::conj(y.alpha);
      r.log_det = log_det + y.log_det;
      const long double s = std::max(std::abs(r.alpha), std::abs(r.beta));
      if (s > 0.0L && std::isfinite(s)) {
        r.alpha /= s;
        r.beta /= s;
        r.log_det -= 2.0L * std::log(s);
      }
      return r;
    }

    MoebiusMatrix narrow() const {
      MoebiusMatrix m;
      m.alpha_ = static_cast<Complex>(alpha);
      m.beta_ = static_cast<Complex>(beta);
      m.log_det_ = static_cast<double>(log_det);
      return m;
    }
  };

  Complex alpha_{1.0, 0.0};
  Complex beta_{0.0, 0.0};
  double log_det_ = 0.0;
};

/// outer o inner.
inline DiscAutomorphism compose(const DiscAutomorphism& outer, const DiscAutomorphism& inner) {
  return (MoebiusMatrix(outer) * MoebiusMatrix(inner)).to_automorphism();
}

inline DiscAutomorphism inverse(const DiscAutomorphism& phi) { return phi.inverse_map(); }

/// n-fold composition; |n| <= 1e9. Throws DomainError when the result is not
/// representable (its zero lies within 1e-14 of the circle).
inline DiscAutomorphism iterate(const DiscAutomorphism& phi, std::int64_t n) {
  if (n > 1'000'000'000 || n < -1'000'000'000) throw DomainError("|n| must be <= 1e9");
  if (n == 0) return {};
  return MoebiusMatrix(phi).power(n).to_automorphism();
}

inline DiscAutomorphism conjugate(const DiscAutomorphism& eta, const DiscAutomorphism& phi) {
  return compose(eta, compose(phi, inverse(eta)));
}

// ---------------------------------------------------------------------------
// Sample points and pointwise comparison.

inline std::vector<Complex> circle_points(std::size_t n, double radius = 1.0, double offset = 0.1) {
  std::vector<Complex> pts;
  pts.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    pts.push_back(std::polar(radius, offset + 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n)));
  }
  return pts;
}

template <class F, class G>
double max_pointwise_distance(const F& f, const G& g, const std::vector<Complex>& pts) {
  double worst = 0.0;
  for (const Complex z : pts) worst = std::max(worst, std::abs(f(z) - g(z)));
  return worst;
}

inline double max_distance(const DiscAutomorphism& f, const DiscAutomorphism& g,
                           const std::vector<Complex>& pts) {
  return max_pointwise_distance([&](Complex z) { return f.apply(z); },
                                [&](Complex z) { return g.apply(z); }, pts);
}

/// max over 32 boundary points of |eta(phi(eta^-1(z))) - psi(z)|.
inline double conjugacy_residual(const DiscAutomorphism& eta, const DiscAutomorphism& phi,
                                 const DiscAutomorphism& psi) {
  const DiscAutomorphism eta_inv = inverse(eta);
  return max_pointwise_distance([&](Complex z) { return eta.apply(phi.apply(eta_inv.apply(z))); },
                                [&](Complex z) { return psi.apply(z); }, circle_points(32));
}

// ---------------------------------------------------------------------------
// General 2x2 Moebius maps, used to pass through the upper half-plane.

namespace detail {

struct Mobius2 {
  Complex a{1.0}, b{0.0}, c{0.0}, d{1.0};

  Complex apply(Complex z) const { return (a * z + b) / (c * z + d); }

  friend Mobius2 operator*(const Mobius2& x, const Mobius2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }

  /// Only valid for maps that preserve the disc.
  DiscAutomorphism to_automorphism() const { return {unit(a / d), -b / a}; }
};

// z -> i (1 + z) / (1 - z): disc onto the upper half-plane, 1 -> infinity, -1 -> 0.
inline const Mobius2 kCayley{kI, kI, -1.0, 1.0};
inline const Mobius2 kCayleyInv{1.0, -kI, 1.0, kI};

inline Mobius2 rotation(Complex w) { return {w, 0.0, 0.0, 1.0}; }
inline Mobius2 translation(double t) { return {1.0, t, 0.0, 1.0}; }

inline Complex to_half_plane(Complex z) { return kCayley.apply(z); }

/// Roots of conj(a) z^2 + (lambda - 1) z - lambda a = 0 (requires a != 0).
inline std::array<Complex, 2> fixed_point_roots(const DiscAutomorphism& phi) {
  const Complex qa = std::conj(phi.a());
  const Complex qb = phi.lambda() - 1.0;
  const Complex qc = -phi.lambda() * phi.a();
  const Complex sq = std::sqrt(qb * qb - 4.0 * qa * qc);
  const Complex s = (std::real(std::conj(qb) * sq) >= 0.0) ? sq : -sq;
  const Complex q = -0.5 * (qb + s);
  if (q == Complex{}) return {Complex{}, Complex{}};
  return {q / qa, qc / q};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Classification.

enum class AutomorphismKind { Identity, Elliptic, Parabolic, Hyperbolic };
enum class Orientation { Plus, Minus, NotApplicable };

inline const char* to_string(AutomorphismKind k) {
  switch (k) {
    case AutomorphismKind::Identity: return "Identity";
    case AutomorphismKind::Elliptic: return "Elliptic";
    case AutomorphismKind::Parabolic: return "Parabolic";
    case AutomorphismKind::Hyperbolic: return "Hyperbolic";
  }
  return "?";
}

/// Fixed-point verdict. Hyperbolic fixed_points are ordered (attracting,
/// repelling) and multiplier is the derivative at the attracting point.
struct Classification {
  AutomorphismKind kind = AutomorphismKind::Identity;
  std::vector<Complex> fixed_points;
  Complex multiplier{1.0, 0.0};
  Orientation orientation = Orientation::NotApplicable;
};

/// Translation length of a parabolic phi fixing w, measured in the half-plane
/// model where w sits at infinity. phi_i translates by +2 there.
inline double parabolic_translation(const DiscAutomorphism& phi, Complex w) {
  const Complex image = phi.apply(-w);
  return detail::to_half_plane(std::conj(w) * image).real();
}

// phi_i has positive translation length; checked once in the test suite.
inline constexpr Orientation kPhiIOrientation = Orientation::Plus;

inline Classification classify(const DiscAutomorphism& phi, double tol = kDefaultClassifyTol) {
  if (!(tol >= 1e-14 && tol <= 1e-4)) throw DomainError("classification tolerance must lie in [1e-14, 1e-4]");

  const auto [al, be] = MoebiusMatrix(phi).normalized();
  Classification out;
  if (std::abs(be) <= tol && std::abs(al.imag()) <= tol) return out;

  if (phi.a() == Complex{}) {
    out.kind = AutomorphismKind::Elliptic;
    out.fixed_points = {Complex{}};
    out.multiplier = phi.lambda();
    return out;
  }

  const double t = 2.0 * al.real();
  const auto roots = detail::fixed_point_roots(phi);
  const double m0 = std::abs(roots[0]);
  const double m1 = std::abs(roots[1]);
  const Complex beta_bar = std::conj(be);

  if (t < 2.0 - tol) {
    const double s = std::sqrt(std::max(0.0, 1.0 - al.real() * al.real()));
    const Complex outer = kI * (al.imag() + std::copysign(s, al.imag())) / beta_bar;
    const Complex inner = -be / (beta_bar * outer);
    if (!(std::min(m0, m1) < 1.0 - 1e-12 && std::max(m0, m1) > 1.0 + 1e-12)) {
      throw AmbiguousClassification("trace test says elliptic but no interior fixed point separates from the circle");
    }
    out.kind = AutomorphismKind::Elliptic;
    out.fixed_points = {inner};
    out.multiplier = unit(phi.derivative(inner));
    return out;
  }

  if (std::abs(t - 2.0) <= tol) {
    const double band = 10.0 * std::sqrt(tol) + 1e-7;
    if (std::abs(m0 - 1.0) > band || std::abs(m1 - 1.0) > band) {
      throw AmbiguousClassification("trace test says parabolic but the fixed points are off the circle");
    }
    const Complex w = unit(kI * al.imag() / beta_bar);
    out.kind = AutomorphismKind::Parabolic;
    out.fixed_points = {w};
    out.multiplier = phi.derivative(w);
    out.orientation = parabolic_translation(phi, w) > 0.0 ? Orientation::Plus : Orientation::Minus;
    return out;
  }

  if (std::abs(m0 - 1.0) > 1e-6 || std::abs(m1 - 1.0) > 1e-6) {
    throw AmbiguousClassification("trace test says hyperbolic but the fixed points are off the circle");
  }
  const double s = std::sqrt(al.real() * al.real() - 1.0);
  const Complex w1 = unit((kI * al.imag() + s) / beta_bar);
  const Complex w2 = unit((kI * al.imag() - s) / beta_bar);
  const double grow = al.real() + s;
  out.kind = AutomorphismKind::Hyperbolic;
  out.fixed_points = {w1, w2};
  out.multiplier = 1.0 / (grow * grow);
  return out;
}

/// The attracting boundary point for non-elliptic maps (the unique fixed point
/// for parabolic ones).
inline Complex attracting_point(const Classification& c) {
  if (c.kind != AutomorphismKind::Parabolic && c.kind != AutomorphismKind::Hyperbolic) {
    throw WrongClass("only parabolic and hyperbolic maps have an attracting boundary point");
  }
  return c.fixed_points.front();
}

// ---------------------------------------------------------------------------
// Canonical forms.

/// phi = eta o kappa o eta^-1 with kappa a rotation, phi_{+-i}, or psi_r (0 < r < 1).
struct CanonicalPair {
  DiscAutomorphism eta;
  DiscAutomorphism kappa;
};

namespace detail {

inline CanonicalPair canonical_pair(const DiscAutomorphism& phi, const Classification& c) {
  switch (c.kind) {
    case AutomorphismKind::Identity:
      throw IdentityError("the identity has no canonical representative");
    case AutomorphismKind::Elliptic: {
      const Complex p = c.fixed_points.front();
      return {DiscAutomorphism(1.0, -p), DiscAutomorphism::rotation(c.multiplier)};
    }
    case AutomorphismKind::Parabolic: {
      const Complex w = c.fixed_points.front();
      const auto rot = DiscAutomorphism::rotation(w);
      const auto at_one = compose(inverse(rot), compose(phi, rot));
      const double s = parabolic_translation(at_one, 1.0);
      // psi_r acts on the half-plane model as the dilation X -> k X.
      const double k = std::abs(s) / 2.0;
      const double r = (1.0 - k) / (1.0 + k);
      const Complex c_param = s > 0.0 ? kI : -kI;
      return {compose(rot, DiscAutomorphism::hyperbolic_standard(r)),
              DiscAutomorphism::parabolic_standard(c_param)};
    }
    case AutomorphismKind::Hyperbolic: {
      const Complex w1 = c.fixed_points[0];
      const Complex w2 = c.fixed_points[1];
      const double s = c.multiplier.real();
      const double r = (1.0 - s) / (1.0 + s);
      const double x1 = to_half_plane(std::conj(w2) * w1).real();
      const Mobius2 eta_inv = kCayleyInv * translation(-x1) * kCayley * rotation(std::conj(w2));
      return {inverse(eta_inv.to_automorphism()), DiscAutomorphism::hyperbolic_standard(r)};
    }
  }
  throw IdentityError("unreachable");
}

}  // namespace detail

inline CanonicalPair canonical_pair(const DiscAutomorphism& phi, double tol = kDefaultClassifyTol) {
  return detail::canonical_pair(phi, classify(phi, tol));
}

// ---------------------------------------------------------------------------
// Conjugacy.

/// How two elliptic multipliers relate. Rotations by mu and conj(mu) are not
/// conjugate inside the automorphism group; Conjugate flags that case.
enum class MultiplierRelation { Equal, Conjugate, Different };

inline MultiplierRelation multiplier_relation(Complex m1, Complex m2, double tol) {
  if (std::abs(m1 - m2) <= tol) return MultiplierRelation::Equal;
  if (std::abs(m1 - std::conj(m2)) <= tol) return MultiplierRelation::Conjugate;
  return MultiplierRelation::Different;
}

/// Returns eta with psi = eta o phi o eta^-1 when the conjugacy invariants
/// agree within tol, built from the two canonical pairs.
inline std::optional<DiscAutomorphism> find_conjugator(const DiscAutomorphism& phi,
                                                       const DiscAutomorphism& psi,
                                                       double tol = kDefaultClassifyTol) {
  const Classification c1 = classify(phi, tol);
  const Classification c2 = classify(psi, tol);
  if (c1.kind == AutomorphismKind::Identity || c2.kind == AutomorphismKind::Identity) {
    throw IdentityError("conjugacy search needs non-identity automorphisms");
  }
  if (c1.kind != c2.kind) return std::nullopt;
  switch (c1.kind) {
    case AutomorphismKind::Elliptic:
      if (multiplier_relation(c1.multiplier, c2.multiplier, tol) != MultiplierRelation::Equal) return std::nullopt;
      break;
    case AutomorphismKind::Hyperbolic:
      if (std::abs(c1.multiplier.real() - c2.multiplier.real()) > tol) return std::nullopt;
      break;
    case AutomorphismKind::Parabolic:
      if (c1.orientation != c2.orientation) return std::nullopt;
      break;
    case AutomorphismKind::Identity:
      break;
  }
  const CanonicalPair p1 = detail::canonical_pair(phi, c1);
  const CanonicalPair p2 = detail::canonical_pair(psi, c2);
  return compose(p2.eta, inverse(p1.eta));
}

// ---------------------------------------------------------------------------
// Commutants. Com(phi) minus the identity is a one-parameter group for phi != e:
//   elliptic   -> conjugated rotations by angle t,
//   parabolic  -> conjugated half-plane translations by t (phi_{+-i} at t = +-2),
//   hyperbolic -> conjugated psi_{tanh t}.

namespace detail {

inline DiscAutomorphism canonical_flow(AutomorphismKind kind, double t) {
  switch (kind) {
    case AutomorphismKind::Elliptic:
      return DiscAutomorphism::rotation_by_angle(t);
    case AutomorphismKind::Parabolic:
      if (t == 0.0) return {};
      return (kCayleyInv * translation(t) * kCayley).to_automorphism();
    case AutomorphismKind::Hyperbolic:
      return DiscAutomorphism::hyperbolic_standard(std::tanh(t));
    case AutomorphismKind::Identity:
      break;
  }
  throw IdentityError("Com(e) is the whole automorphism group, not a one-parameter family");
}

/// Flow parameter t with flow_t(x) = y inside the canonical model, where the
/// orbit through x contains y. Callers verify the residual.
inline double canonical_flow_parameter(AutomorphismKind kind, Complex x, Complex y) {
  switch (kind) {
    case AutomorphismKind::Elliptic:
      if (std::abs(x) < 1e-300 || std::abs(y) < 1e-300) return 0.0;
      return std::arg(y / x);
    case AutomorphismKind::Parabolic:
      return (to_half_plane(y) - to_half_plane(x)).real();
    case AutomorphismKind::Hyperbolic:
      return -0.5 * std::log(std::abs(to_half_plane(y)) / std::abs(to_half_plane(x)));
    case AutomorphismKind::Identity:
      break;
  }
  throw IdentityError("Com(e) is the whole automorphism group, not a one-parameter family");
}

}  // namespace detail

/// One-parameter commutant structure of a fixed non-identity automorphism.
class Commutant {
 public:
  explicit Commutant(const DiscAutomorphism& phi, double tol = kDefaultClassifyTol)
      : class_(classify(phi, tol)) {
    if (class_.kind == AutomorphismKind::Identity) {
      throw IdentityError("Com(e) is the whole automorphism group, not a one-parameter family");
    }
    pair_ = detail::canonical_pair(phi, class_);
    eta_inv_ = inverse(pair_.eta);
  }

  const Classification& classification() const { return class_; }

  DiscAutomorphism element(double t) const {
    if (t == 0.0) return {};
    return conjugate(pair_.eta, detail::canonical_flow(class_.kind, t));
  }

  /// t with element(t)(z) = u, assuming u lies on the orbit of z; verify the
  /// result with element(t).
  double parameter_between(Complex z, Complex u) const {
    return detail::canonical_flow_parameter(class_.kind, eta_inv_.apply(z), eta_inv_.apply(u));
  }

  /// t with element(t) = eta pointwise within tol, if eta belongs to the family.
  std::optional<double> parameter_of(const DiscAutomorphism& eta, double tol = 1e-9) const {
    const DiscAutomorphism x = conjugate(eta_inv_, eta);
    double t = 0.0;
    switch (class_.kind) {
      case AutomorphismKind::Elliptic:
        t = std::arg(x.derivative(0.0));
        break;
      case AutomorphismKind::Parabolic: {
        // flow_t(0) = t / (2i + t)
        const Complex v = x.apply(0.0);
        t = (2.0 * kI * v / (1.0 - v)).real();
        break;
      }
      case AutomorphismKind::Hyperbolic:
        t = std::atanh(std::clamp(-x.apply(0.0).real(), -1.0 + 1e-16, 1.0 - 1e-16));
        break;
      case AutomorphismKind::Identity:
        break;
    }
    const auto pts = circle_points(16, 0.5);
    if (max_distance(element(t), eta, pts) <= tol) return t;
    return std::nullopt;
  }

 private:
  Classification class_;
  CanonicalPair pair_;
  DiscAutomorphism eta_inv_;
};

inline DiscAutomorphism commutant_element(const DiscAutomorphism& phi, double t) {
  return Commutant(phi).element(t);
}

/// Pointwise commutation test at 16 interior and 16 boundary points.
inline bool commutes(const DiscAutomorphism& phi, const DiscAutomorphism& eta, double tol = 1e-9) {
  auto pts = circle_points(16, 0.5);
  const auto boundary = circle_points(16);
  pts.insert(pts.end(), boundary.begin(), boundary.end());
  return max_pointwise_distance([&](Complex z) { return phi.apply(eta.apply(z)); },
                                [&](Complex z) { return eta.apply(phi.apply(z)); }, pts) <= tol;
}

}  // namespace hardyiso

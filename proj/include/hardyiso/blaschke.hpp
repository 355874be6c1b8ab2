#pragma once

// Blaschke sequences and products: zero generators, partial sums of 1 - |a_k|,
// certified tail bounds, convergence-normalising factors and truncated products.

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "moebius.hpp"
#include "numeric.hpp"

namespace hardyiso {

/// A disc point with 1 - |a|^2 carried separately, so orbit points that sit
/// within rounding distance of the circle keep an accurate deficit.
struct ZeroTerm {
  Complex value;
  double deficit_sq = 1.0;

  static ZeroTerm from_point(Complex z) {
    if (!(std::abs(z) < 1.0)) throw DomainError("zero sequence terms must satisfy |a| < 1");
    return {z, deficit(z)};
  }

  double one_minus_abs() const { return deficit_sq / (1.0 + std::abs(value)); }
};

struct ExplicitZeros {
  std::vector<ZeroTerm> terms;
};

/// b_n = phi_{-n}(psi^{-1}(0)), n = 0, 1, 2, ... : the zeros of psi o phi_n.
struct OrbitZeros {
  DiscAutomorphism psi;
  DiscAutomorphism phi;
};

/// z_n = phi_n(0), n = 1, 2, ...
struct ForwardOrbitZeros {
  DiscAutomorphism phi;
};

class ZeroSequence {
 public:
  using Source = std::variant<ExplicitZeros, OrbitZeros, ForwardOrbitZeros>;

  static ZeroSequence from_points(const std::vector<Complex>& pts) {
    ExplicitZeros e;
    e.terms.reserve(pts.size());
    for (const Complex z : pts) e.terms.push_back(ZeroTerm::from_point(z));
    return ZeroSequence(std::move(e));
  }
  static ZeroSequence from_terms(std::vector<ZeroTerm> terms) { return ZeroSequence(ExplicitZeros{std::move(terms)}); }
  static ZeroSequence orbit(const DiscAutomorphism& psi, const DiscAutomorphism& phi) {
    return ZeroSequence(OrbitZeros{psi, phi});
  }
  static ZeroSequence forward_orbit(const DiscAutomorphism& phi) { return ZeroSequence(ForwardOrbitZeros{phi}); }

  const Source& source() const { return source_; }

  /// Number of available terms; nullopt for generator-defined sequences.
  std::optional<std::size_t> size() const {
    if (const auto* e = std::get_if<ExplicitZeros>(&source_)) return e->terms.size();
    return std::nullopt;
  }

  ZeroTerm term(std::size_t k) const {
    return std::visit(
        [k](const auto& s) -> ZeroTerm {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, ExplicitZeros>) {
            if (k >= s.terms.size()) throw GeneratorExhausted("explicit zero list has only " + std::to_string(s.terms.size()) + " terms");
            return s.terms[k];
          } else if constexpr (std::is_same_v<S, OrbitZeros>) {
            const MoebiusMatrix m = MoebiusMatrix(s.phi).power(-static_cast<std::int64_t>(k));
            const Complex alpha = s.psi.a();
            return {m.apply(alpha), m.image_deficit(alpha, deficit(alpha))};
          } else {
            const MoebiusMatrix m = MoebiusMatrix(s.phi).power(static_cast<std::int64_t>(k) + 1);
            return {m.apply(0.0), m.image_deficit(0.0, 1.0)};
          }
        },
        source_);
  }

  std::vector<ZeroTerm> take(std::size_t n) const {
    if (const auto sz = size(); sz && *sz < n) {
      throw GeneratorExhausted("explicit zero list has only " + std::to_string(*sz) + " terms, " + std::to_string(n) + " requested");
    }
    std::vector<ZeroTerm> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) out.push_back(term(k));
    return out;
  }

 private:
  explicit ZeroSequence(Source s) : source_(std::move(s)) {}
  Source source_;
};

// ---------------------------------------------------------------------------
// Tail certificates: bounds on sum_{k >= N} (1 - |a_k|).

enum class TailKind { Finite, Geometric, InverseSquare };

struct TailCertificate {
  TailKind kind = TailKind::Finite;
  /// Explicit leading terms (1 - |a_k|), k < head.size(); the analytic bound
  /// covers the rest.
  std::vector<double> head;
  double constant = 0.0;
  /// Multiplier s of the geometric bound 4 s^n.
  double ratio = 0.0;
  /// Orbit exponent n of term index k is k + index_offset.
  std::int64_t index_offset = 0;

  /// Upper bound for sum over k >= n_terms of (1 - |a_k|).
  double tail(std::size_t n_terms) const {
    CompensatedSum s;
    for (std::size_t k = n_terms; k < head.size(); ++k) s.add(head[k]);
    if (kind == TailKind::Finite) return s.value();
    const std::size_t first = std::max(n_terms, head.size());
    const double m = static_cast<double>(static_cast<std::int64_t>(first) + index_offset);
    double g = 0.0;
    if (kind == TailKind::Geometric) {
      g = 4.0 * std::exp(m * std::log(ratio)) / (1.0 - ratio);
    } else {
      // sum_{n >= m} 1/(n^2 + 1) <= integral from m - 1 to infinity
      g = std::numbers::pi / 2.0 - std::atan(m - 1.0);
    }
    s.add(constant * g);
    return s.value();
  }
};

/// Analytic certificate for orbit sequences of parabolic or hyperbolic maps,
/// via conjugation to phi_{+-i} or psi_r and the distortion bound
/// 1 - |eta(x)|^2 <= (1 + |a_eta|)/(1 - |a_eta|) (1 - |x|^2). Returns nullopt for
/// explicit lists and for elliptic or identity symbols.
inline std::optional<TailCertificate> orbit_certificate(const ZeroSequence& seq) {
  const DiscAutomorphism* phi = nullptr;
  Complex start{};
  bool backward = false;
  if (const auto* o = std::get_if<OrbitZeros>(&seq.source())) {
    phi = &o->phi;
    start = o->psi.a();
    backward = true;
  } else if (const auto* f = std::get_if<ForwardOrbitZeros>(&seq.source())) {
    phi = &f->phi;
  } else {
    return std::nullopt;
  }
  const Classification c = classify(*phi);
  if (c.kind != AutomorphismKind::Parabolic && c.kind != AutomorphismKind::Hyperbolic) return std::nullopt;

  const CanonicalPair pair = detail::canonical_pair(*phi, c);
  const double ae = std::abs(pair.eta.a());
  const double beta = std::abs(inverse(pair.eta).apply(start));
  TailCertificate cert;
  cert.constant = (1.0 + ae) / (1.0 - ae) * (1.0 + beta) / (1.0 - beta) * (1.0 + 1e-9);
  if (c.kind == AutomorphismKind::Hyperbolic) {
    cert.kind = TailKind::Geometric;
    cert.ratio = c.multiplier.real();
  } else {
    cert.kind = TailKind::InverseSquare;
  }
  if (backward) {
    cert.head.push_back(seq.term(0).one_minus_abs());
    cert.index_offset = 0;
  } else {
    cert.index_offset = 1;
  }
  return cert;
}

/// Certificate used for product evaluation: orbit certificates, or the exact
/// remainder of a finite explicit list.
inline std::optional<TailCertificate> product_certificate(const ZeroSequence& seq) {
  if (const auto* e = std::get_if<ExplicitZeros>(&seq.source())) {
    TailCertificate cert;
    cert.kind = TailKind::Finite;
    for (const auto& t : e->terms) cert.head.push_back(t.one_minus_abs());
    return cert;
  }
  return orbit_certificate(seq);
}

// ---------------------------------------------------------------------------
// Partial sums and convergence verdicts.

inline std::vector<double> partial_sums(const std::vector<ZeroTerm>& terms) {
  std::vector<double> out;
  out.reserve(terms.size());
  CompensatedSum s;
  double prev = 0.0;
  for (const auto& t : terms) {
    s.add(t.one_minus_abs());
    prev = std::max(prev, s.value());
    out.push_back(prev);
  }
  return out;
}

/// Prefix sums S_m = sum_{k <= m} (1 - |a_k|), m = 1..N.
inline std::vector<double> partial_blaschke_sum(const ZeroSequence& seq, std::size_t n) {
  if (n < 1) throw DomainError("need at least one term");
  return partial_sums(seq.take(n));
}

enum class BlaschkeVerdict { Blaschke, NotBlaschke, Undetermined };
enum class Growth { Bounded, Logarithmic, Linear, Other };

inline const char* to_string(BlaschkeVerdict v) {
  switch (v) {
    case BlaschkeVerdict::Blaschke: return "Blaschke";
    case BlaschkeVerdict::NotBlaschke: return "NotBlaschke";
    case BlaschkeVerdict::Undetermined: return "Undetermined";
  }
  return "?";
}

inline const char* to_string(Growth g) {
  switch (g) {
    case Growth::Bounded: return "Bounded";
    case Growth::Logarithmic: return "Logarithmic";
    case Growth::Linear: return "Linear";
    case Growth::Other: return "Other";
  }
  return "?";
}

struct ConvergencePolicy {
  /// Largest relative RMS residual for which a growth fit counts.
  double fit_residual_threshold = 1e-3;
  /// A good linear or logarithmic fit on an explicit list is reported as
  /// NotBlaschke when set; otherwise it stays Undetermined.
  bool accept_numeric_divergence = true;
};

struct GrowthFit {
  Growth growth = Growth::Other;
  double residual = std::numeric_limits<double>::infinity();
};

/// Least-squares fit of S_m ~ c0 + c1 g(m) on the last three quarters of the
/// prefix, with g(m) in {1/m, log m, m}.
inline GrowthFit fit_growth(const std::vector<double>& sums) {
  const std::size_t n = sums.size();
  if (n < 8) return {};
  const std::size_t lo = n / 4;
  const double scale = std::max(std::abs(sums.back()), 1e-300);
  if (sums.back() - sums[lo] <= 1e-12 * scale) return {Growth::Bounded, 0.0};

  auto fit = [&](auto g, bool want_positive) -> double {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double cnt = static_cast<double>(n - lo);
    for (std::size_t i = lo; i < n; ++i) {
      const double x = g(static_cast<double>(i + 1));
      sx += x;
      sy += sums[i];
      sxx += x * x;
      sxy += x * sums[i];
    }
    const double den = cnt * sxx - sx * sx;
    const double c1 = den != 0.0 ? (cnt * sxy - sx * sy) / den : 0.0;
    const double c0 = (sy - c1 * sx) / cnt;
    if (want_positive && !(c1 > 0.0)) return std::numeric_limits<double>::infinity();
    double ss = 0.0;
    for (std::size_t i = lo; i < n; ++i) {
      const double r = sums[i] - (c0 + c1 * g(static_cast<double>(i + 1)));
      ss += r * r;
    }
    return std::sqrt(ss / cnt) / scale;
  };

  const double bounded = fit([](double m) { return 1.0 / m; }, false);
  const double logarithmic = fit([](double m) { return std::log(m); }, true);
  const double linear = fit([](double m) { return m; }, true);
  GrowthFit best{Growth::Bounded, bounded};
  if (logarithmic < best.residual) best = {Growth::Logarithmic, logarithmic};
  if (linear < best.residual) best = {Growth::Linear, linear};
  return best;
}

struct ConvergenceVerdict {
  BlaschkeVerdict verdict = BlaschkeVerdict::Undetermined;
  std::vector<double> partial_sums;
  Growth fitted_growth = Growth::Other;
  double fit_residual = std::numeric_limits<double>::infinity();
  /// Present when the verdict rests on an analytic tail bound.
  std::optional<TailCertificate> certificate;
  /// Certified bound on the remainder beyond the computed prefix (Blaschke only).
  double tail_bound = std::numeric_limits<double>::infinity();
};

inline ConvergenceVerdict verdict_from_sums(std::vector<double> sums, const ConvergencePolicy& policy) {
  ConvergenceVerdict v;
  const GrowthFit fit = fit_growth(sums);
  v.fitted_growth = fit.residual <= policy.fit_residual_threshold ? fit.growth : Growth::Other;
  v.fit_residual = fit.residual;
  v.partial_sums = std::move(sums);
  if (policy.accept_numeric_divergence &&
      (v.fitted_growth == Growth::Linear || v.fitted_growth == Growth::Logarithmic)) {
    v.verdict = BlaschkeVerdict::NotBlaschke;
  }
  return v;
}

inline ConvergenceVerdict classify_blaschke(const ZeroSequence& seq, std::size_t n_max,
                                            const ConvergencePolicy& policy = {}) {
  if (n_max < 64) throw DomainError("classify_blaschke needs N_max >= 64");
  const auto sums = partial_blaschke_sum(seq, n_max);

  const DiscAutomorphism* phi = nullptr;
  if (const auto* o = std::get_if<OrbitZeros>(&seq.source())) phi = &o->phi;
  if (const auto* f = std::get_if<ForwardOrbitZeros>(&seq.source())) phi = &f->phi;
  if (phi == nullptr) return verdict_from_sums(sums, policy);

  ConvergenceVerdict v = verdict_from_sums(sums, policy);
  const Classification c = classify(*phi);
  if (c.kind == AutomorphismKind::Identity || c.kind == AutomorphismKind::Elliptic) {
    // The orbit stays on a fixed hyperbolic circle, so 1 - |a_k| is bounded below.
    v.verdict = BlaschkeVerdict::NotBlaschke;
    return v;
  }
  v.certificate = orbit_certificate(seq);
  v.tail_bound = v.certificate->tail(n_max);
  v.verdict = BlaschkeVerdict::Blaschke;
  return v;
}

// ---------------------------------------------------------------------------
// Products.

/// Zeros, unimodular factors lambda_k with lambda_k b_k(0) = |a_k| for
/// b_k(z) = (z - a_k)/(1 - conj(a_k) z), and the tail certificate if any.
struct ProductSpec {
  ZeroSequence zeros = ZeroSequence::from_terms({});
  std::vector<ZeroTerm> terms;
  std::vector<Complex> factors;
  std::size_t truncation = 0;
  std::optional<TailCertificate> certificate;

  /// lambda_k b_k(z); works for zeros too close to the circle to form an automorphism.
  Complex factor_value(std::size_t k, Complex z) const;
};

/// (z - a) / (1 - conj(a) z) rebuilt from the direction u of a and its distance s to
/// the circle, so a zero that rounds onto T still switches from -u to u across its arc.
inline Complex zero_factor(const ZeroTerm& t, Complex z) {
  const double r = std::abs(t.value);
  const double s = t.deficit_sq / (1.0 + std::sqrt(1.0 - t.deficit_sq));
  if (s > 1e-3) return (z - t.value) / (1.0 - std::conj(t.value) * z);
  const Complex u = t.value / r;
  const Complex d = z - u;
  return (d + u * s) / (std::conj(u) * (s * z - d));
}

inline Complex ProductSpec::factor_value(std::size_t k, Complex z) const { return factors[k] * zero_factor(terms[k], z); }

inline Complex convergence_factor(Complex a) {
  if (a == Complex{}) return 1.0;
  return -std::conj(a) / std::abs(a);
}

inline ProductSpec convergence_factors(const ZeroSequence& zeros, std::size_t n) {
  ProductSpec spec;
  spec.zeros = zeros;
  spec.terms = zeros.take(n);
  spec.factors.reserve(n);
  for (const auto& t : spec.terms) spec.factors.push_back(convergence_factor(t.value));
  spec.truncation = n;
  spec.certificate = product_certificate(zeros);
  return spec;
}

struct BlaschkeValue {
  Complex value;
  /// Bound on |B(z)/B_N(z) - 1| from the certified remainder; +inf without a
  /// certificate or on the circle with a nonzero remainder.
  double tail_bound = std::numeric_limits<double>::infinity();
  /// Floating-point error allowance for the computed N-term product.
  double rounding_bound = 0.0;

  double total_bound() const { return tail_bound + rounding_bound; }
};

inline BlaschkeValue eval_blaschke(const ProductSpec& spec, Complex z, std::size_t n) {
  if (std::abs(z) > 1.0 + kEvalSlack) throw DomainError("Blaschke product evaluated outside the closed disc");
  if (n > spec.terms.size()) throw GeneratorExhausted("truncation exceeds the available terms");
  BlaschkeValue out;
  Complex prod{1.0, 0.0};
  for (std::size_t k = 0; k < n; ++k) prod *= spec.factor_value(k, z);
  out.value = prod;
  out.rounding_bound = 8.0 * static_cast<double>(n + 1) * std::numeric_limits<double>::epsilon() * std::abs(prod);
  if (spec.certificate) {
    const double tail = spec.certificate->tail(n);
    const double r = std::abs(z);
    if (tail == 0.0) {
      out.tail_bound = 0.0;
    } else if (r < 1.0) {
      out.tail_bound = std::expm1(2.0 * tail / (1.0 - r));
    }
  }
  return out;
}

/// The first N zeros of psi o phi_n as an explicit sequence.
inline ZeroSequence orbit_zeros(const DiscAutomorphism& psi, const DiscAutomorphism& phi, std::size_t n) {
  if (n < 1) throw DomainError("need at least one term");
  return ZeroSequence::from_terms(ZeroSequence::orbit(psi, phi).take(n));
}

}  // namespace hardyiso

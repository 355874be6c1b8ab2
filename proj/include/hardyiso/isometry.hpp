#pragma once

// Isometry-level procedures for S = phase * M_Psi * U_phi: codimension, the
// Crownover decision with orbit evidence, isometric-equivalence witnesses,
// infinite-codimension constructions and the invariant-subspace identity.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "blaschke.hpp"
#include "errors.hpp"
#include "hardy.hpp"
#include "moebius.hpp"
#include "numeric.hpp"

namespace hardyiso {

struct Codimension {
  bool infinite = false;
  std::size_t value = 0;
};

inline Codimension codimension(const IsometrySpec& spec) {
  if (spec.infinite) return {true, 0};
  return {false, spec.psi_factors.size()};
}

// ---------------------------------------------------------------------------
// Infinite constructions.

namespace detail {

inline void require_non_elliptic(const DiscAutomorphism& phi) {
  const auto kind = classify(phi).kind;
  if (kind != AutomorphismKind::Parabolic && kind != AutomorphismKind::Hyperbolic) {
    throw WrongClass(std::string("construction needs a parabolic or hyperbolic symbol, got ") + to_string(kind));
  }
}

}  // namespace detail

/// Psi = prod_{n >= 1} lambda_n phi_{-n}, zeros phi_n(0). Then Psi o phi = z Psi up
/// to a unimodular constant and S = M_Psi U_phi has trivial intersection.
inline InfiniteConstruction construct_zero_intersection(const DiscAutomorphism& phi) {
  detail::require_non_elliptic(phi);
  InfiniteConstruction c;
  c.kind = ConstructionKind::BackwardOrbitProduct;
  c.phi = phi;
  return c;
}

/// Keeps the zeros a_{n_k} of phi_{n_k}, with n_1 > 1 and each n_k the smallest
/// index after n_{k-1} whose certified tail is below R/2^k. R is bounded from
/// below by an exact prefix sum, so the certified tails compare against the true R.
inline InfiniteConstruction construct_nonzero_intersection(const DiscAutomorphism& phi, std::size_t k_count,
                                                           std::size_t prefix = 4096) {
  detail::require_non_elliptic(phi);
  if (k_count < 1) throw DomainError("need at least one retained index");
  const ZeroSequence seq = ZeroSequence::forward_orbit(inverse(phi));
  const auto cert = orbit_certificate(seq);
  if (!cert) throw NotCertified("forward orbit has no tail certificate");

  // om[n - 1] = 1 - |a_n|; suffix[n - 1] = sum_{j >= n} up to the prefix end.
  const auto terms = seq.take(prefix);
  std::vector<double> suffix(prefix + 1, 0.0);
  {
    CompensatedSum s;
    for (std::size_t i = prefix; i-- > 0;) {
      s.add(terms[i].one_minus_abs());
      suffix[i] = s.value();
    }
  }
  const double slack = 1.0 + 1e-12;
  const double far_tail = cert->tail(prefix);
  auto tail_from = [&](std::size_t n) {
    if (n <= prefix) return (suffix[n - 1] + far_tail) * slack;
    return cert->tail(n - 1) * slack;
  };

  InfiniteConstruction c;
  c.kind = ConstructionKind::ThinnedForwardProduct;
  c.phi = phi;
  c.budget = suffix[0] / slack;
  c.budget_upper = (suffix[0] + far_tail) * slack;
  std::size_t n = 1;
  double target = c.budget;
  CompensatedSum total;
  for (std::size_t k = 1; k <= k_count; ++k) {
    target /= 2.0;
    ++n;
    while (!(tail_from(n) < target)) {
      if (n > 100'000'000) throw NotCertified("no index with a small enough certified tail");
      // Past the prefix the bound is monotone; jump by doubling then settle.
      n = n < prefix ? n + 1 : n + std::max<std::size_t>(1, n / 64);
    }
    c.indices.push_back(n);
    c.index_tails.push_back(tail_from(n));
    total.add(tail_from(n));
  }
  c.double_sum_bound = total.value() * slack;
  return c;
}

/// Zero sequence of the inner factor of a construction.
inline std::vector<ZeroTerm> construction_zeros(const InfiniteConstruction& c, std::size_t n) {
  if (c.kind == ConstructionKind::BackwardOrbitProduct) return ZeroSequence::forward_orbit(c.phi).take(n);
  const ZeroSequence seq = ZeroSequence::forward_orbit(inverse(c.phi));
  std::vector<ZeroTerm> out;
  for (std::size_t i = 0; i < std::min(n, c.indices.size()); ++i) out.push_back(seq.term(c.indices[i] - 1));
  return out;
}

/// Finite spec whose inner factor keeps the first n zeros of the construction
/// with normalised factors lambda_k b_k.
inline IsometrySpec truncate(const IsometrySpec& spec, std::size_t n) {
  if (!spec.infinite) return spec;
  IsometrySpec out = spec;
  out.infinite.reset();
  out.phi = spec.phi;
  out.psi_factors.clear();
  for (const auto& t : construction_zeros(*spec.infinite, n)) {
    out.psi_factors.emplace_back(convergence_factor(t.value), t.value);
  }
  return out;
}

struct IdentityCheck {
  double defect = 0.0;
  double bound = 0.0;
};

/// max over pts of ||Psi_N(phi(z))| - |z| |Psi_N(z)|| for the backward-orbit
/// product, against the certified truncation bound at z and phi(z).
inline IdentityCheck functional_identity_check(const InfiniteConstruction& c, std::size_t n,
                                               const std::vector<Complex>& pts) {
  if (c.kind != ConstructionKind::BackwardOrbitProduct) throw WrongClass("identity holds for the backward-orbit product");
  const ProductSpec spec = convergence_factors(ZeroSequence::forward_orbit(c.phi), n);
  IdentityCheck out;
  for (const Complex z : pts) {
    const Complex w = c.phi.apply(z);
    const BlaschkeValue at_z = eval_blaschke(spec, z, n);
    const BlaschkeValue at_w = eval_blaschke(spec, w, n);
    const double lhs = std::abs(at_w.value);
    const double rhs = std::abs(z) * std::abs(at_z.value);
    out.defect = std::max(out.defect, std::abs(lhs - rhs));
    const double b = at_w.tail_bound * lhs + std::abs(z) * at_z.tail_bound * std::abs(at_z.value) +
                     at_w.rounding_bound + at_z.rounding_bound;
    out.bound = std::max(out.bound, b);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Crownover.

enum class CrownoverKind { Crownover, NotCrownover };
enum class CrownoverReason {
  EllipticOrIdentitySymbol,
  HyperbolicSymbol,
  ParabolicSymbol,
  ConstructedDivergent,
  ConstructedConvergent
};

inline const char* to_string(CrownoverKind k) { return k == CrownoverKind::Crownover ? "Crownover" : "NotCrownover"; }

inline const char* to_string(CrownoverReason r) {
  switch (r) {
    case CrownoverReason::EllipticOrIdentitySymbol: return "EllipticOrIdentitySymbol";
    case CrownoverReason::HyperbolicSymbol: return "HyperbolicSymbol";
    case CrownoverReason::ParabolicSymbol: return "ParabolicSymbol";
    case CrownoverReason::ConstructedDivergent: return "ConstructedDivergent";
    case CrownoverReason::ConstructedConvergent: return "ConstructedConvergent";
  }
  return "?";
}

struct CrownoverVerdict {
  CrownoverKind verdict = CrownoverKind::Crownover;
  CrownoverReason reason = CrownoverReason::EllipticOrIdentitySymbol;
  ConvergenceVerdict evidence;
  /// Zeros of Psi o phi_n behind the evidence sums, in reporting order.
  std::vector<ZeroTerm> evidence_terms;
  /// Elliptic or identity symbol: every evidence term has 1 - |b| >= this, so S_m >= rate * m.
  double divergence_rate = 0.0;
};

/// The zeros of Psi o phi_n, n >= 0, for Psi with d factors: d orbit sequences
/// b^j_n = phi_{-n}(zero_j), interleaved as (n, j) in lexicographic order.
inline std::vector<ZeroTerm> union_orbit_terms(const std::vector<DiscAutomorphism>& factors,
                                               const DiscAutomorphism& phi, std::size_t n_terms) {
  std::vector<ZeroSequence> seqs;
  for (const auto& f : factors) seqs.push_back(ZeroSequence::orbit(f, phi));
  std::vector<ZeroTerm> out;
  out.reserve(n_terms);
  for (std::size_t m = 0; m < n_terms; ++m) out.push_back(seqs[m % seqs.size()].term(m / seqs.size()));
  return out;
}

inline CrownoverVerdict decide_crownover(const IsometrySpec& spec, std::size_t n_evidence) {
  spec.validate();
  if (n_evidence < 64) throw DomainError("evidence needs at least 64 terms");
  CrownoverVerdict out;

  if (spec.infinite) {
    const InfiniteConstruction& c = *spec.infinite;
    if (c.kind == ConstructionKind::BackwardOrbitProduct) {
      // phi_1(0) is a zero of Psi o phi_n for every n.
      const ZeroTerm z1 = ZeroSequence::forward_orbit(c.phi).term(0);
      out.evidence_terms.assign(n_evidence, z1);
      out.evidence = verdict_from_sums(partial_sums(out.evidence_terms), {});
      out.evidence.verdict = BlaschkeVerdict::NotBlaschke;
      out.verdict = CrownoverKind::Crownover;
      out.reason = CrownoverReason::ConstructedDivergent;
    } else {
      // Zeros of Psi o phi_m, m >= 1, are a_{n_k + m}; a_n has multiplicity #{k : n_k < n}.
      const ZeroSequence seq = ZeroSequence::forward_orbit(inverse(c.phi));
      std::size_t n = c.indices.front() + 1;
      while (out.evidence_terms.size() < n_evidence) {
        const auto mult = static_cast<std::size_t>(
            std::count_if(c.indices.begin(), c.indices.end(), [n](std::size_t nk) { return nk < n; }));
        const ZeroTerm t = seq.term(n - 1);
        for (std::size_t i = 0; i < mult && out.evidence_terms.size() < n_evidence; ++i) out.evidence_terms.push_back(t);
        ++n;
      }
      out.evidence = verdict_from_sums(partial_sums(out.evidence_terms), {});
      out.evidence.verdict = BlaschkeVerdict::Blaschke;
      out.evidence.tail_bound = c.double_sum_bound;
      out.verdict = CrownoverKind::NotCrownover;
      out.reason = CrownoverReason::ConstructedConvergent;
    }
    return out;
  }

  if (spec.psi_factors.empty()) throw ZeroCodimension("onto isometries are never Crownover");
  const Classification cls = classify(spec.phi);
  out.evidence_terms = union_orbit_terms(spec.psi_factors, spec.phi, n_evidence);
  out.evidence = verdict_from_sums(partial_sums(out.evidence_terms), {});

  switch (cls.kind) {
    case AutomorphismKind::Identity:
    case AutomorphismKind::Elliptic:
      out.verdict = CrownoverKind::Crownover;
      out.reason = CrownoverReason::EllipticOrIdentitySymbol;
      out.evidence.verdict = BlaschkeVerdict::NotBlaschke;
      {
        // Each orbit stays on a hyperbolic circle about the fixed point c, whose
        // largest modulus is (|c| + r) / (1 + |c| r) for pseudo-hyperbolic radius r.
        const Complex c = cls.kind == AutomorphismKind::Elliptic ? cls.fixed_points.front() : Complex{};
        const double ac = std::abs(c);
        double rate = 1.0;
        for (const auto& f : spec.psi_factors) {
          const double r = std::abs(DiscAutomorphism(1.0, c).apply(f.a()));
          rate = std::min(rate, (1.0 - ac) * (1.0 - r) / (1.0 + ac * r));
        }
        out.divergence_rate = rate * (1.0 - 1e-12);
        if (rate > 0.0) out.evidence.fitted_growth = Growth::Linear;
      }
      break;
    case AutomorphismKind::Hyperbolic:
    case AutomorphismKind::Parabolic: {
      out.verdict = CrownoverKind::NotCrownover;
      out.reason = cls.kind == AutomorphismKind::Hyperbolic ? CrownoverReason::HyperbolicSymbol
                                                             : CrownoverReason::ParabolicSymbol;
      // Remainder bound: each factor sequence has consumed ceil or floor of n/d terms.
      const std::size_t d = spec.psi_factors.size();
      double tail = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const std::size_t used = n_evidence / d + (j < n_evidence % d ? 1 : 0);
        const auto cert = orbit_certificate(ZeroSequence::orbit(spec.psi_factors[j], spec.phi));
        tail += cert->tail(used);
      }
      out.evidence.verdict = BlaschkeVerdict::Blaschke;
      out.evidence.tail_bound = tail;
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Isometric equivalence.

/// Free accepts any unimodular constant between S2 and U_eta S1 U_eta^-1, which is
/// the usual notion of isometric equivalence. Strict additionally requires
/// that constant to be 1, i.e. a genuine similarity by the onto isometry U_eta.
enum class PhasePolicy { Free, Strict };
enum class Decision { Equivalent, NotEquivalent, Undetermined };

inline const char* to_string(Decision d) {
  switch (d) {
    case Decision::Equivalent: return "Equivalent";
    case Decision::NotEquivalent: return "NotEquivalent";
    case Decision::Undetermined: return "Undetermined";
  }
  return "?";
}

struct EquivWitness {
  DiscAutomorphism eta;
  /// phase2 Psi2 = rho * phase1 * Psi1 o eta.
  Complex rho{1.0, 0.0};
  /// S2 = operator_phase * U_eta S1 U_eta^-1.
  Complex operator_phase{1.0, 0.0};
  double residual = 0.0;
};

struct EquivalenceResult {
  Decision decision = Decision::NotEquivalent;
  std::optional<EquivWitness> witness;
  std::string note;
};

namespace detail {

inline std::vector<Complex> zeros_of(const std::vector<DiscAutomorphism>& factors) {
  std::vector<Complex> z;
  for (const auto& f : factors) z.push_back(f.a());
  return z;
}

/// Smallest max-distance matching between two equal-size point multisets.
inline double multiset_distance(std::vector<Complex> x, const std::vector<Complex>& y) {
  if (x.size() != y.size()) return std::numeric_limits<double>::infinity();
  if (x.empty()) return 0.0;
  if (x.size() <= 8) {
    std::vector<std::size_t> perm(x.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    double best = std::numeric_limits<double>::infinity();
    do {
      double worst = 0.0;
      for (std::size_t i = 0; i < perm.size(); ++i) worst = std::max(worst, std::abs(x[perm[i]] - y[i]));
      best = std::min(best, worst);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
  }
  double worst = 0.0;
  for (const Complex target : y) {
    auto it = std::min_element(x.begin(), x.end(),
                               [&](Complex a, Complex b) { return std::abs(a - target) < std::abs(b - target); });
    worst = std::max(worst, std::abs(*it - target));
    x.erase(it);
  }
  return worst;
}

inline Complex spec_inner(const IsometrySpec& s, Complex z) { return s.phase * inner_factor(s.psi_factors, z); }

/// (S f)(z) for f(z) = 1 + z / 2.
inline Complex apply_probe(const IsometrySpec& s, Complex z) {
  return apply_isometry_at(s, [](Complex x) { return 1.0 + 0.5 * x; }, z);
}

inline EquivWitness score(const IsometrySpec& s1, const IsometrySpec& s2, const DiscAutomorphism& eta,
                          PhasePolicy policy) {
  const DiscAutomorphism eta_inv = inverse(eta);
  const auto pts = circle_points(32);
  EquivWitness w;
  w.eta = eta;

  const double map_res = max_distance(compose(eta_inv, compose(s1.phi, eta)), s2.phi, pts);
  std::vector<Complex> pulled;
  for (const Complex z : zeros_of(s1.psi_factors)) pulled.push_back(eta_inv.apply(z));
  const double zero_res = multiset_distance(pulled, zeros_of(s2.psi_factors));

  // Inner-factor constant and its spread.
  CompensatedComplexSum rho_sum;
  std::vector<Complex> rho_vals;
  for (const Complex z : pts) {
    const Complex r = spec_inner(s2, z) / spec_inner(s1, eta.apply(z));
    rho_vals.push_back(r);
    rho_sum.add(r);
  }
  w.rho = rho_sum.value() / static_cast<double>(pts.size());
  double rho_spread = 0.0;
  for (const Complex r : rho_vals) rho_spread = std::max(rho_spread, std::abs(r - w.rho));

  // Operator constant: U_eta U_{eta^-1} = kappa I, so U_eta^-1 = U_{eta^-1} / kappa.
  const double p = s1.p;
  const Complex kappa = weight_function(eta, p, pts[0]) * weight_function(eta_inv, p, eta.apply(pts[0]));
  CompensatedComplexSum op_sum;
  std::vector<Complex> op_vals;
  auto pulled_probe = [&](Complex x) { return weight_function(eta_inv, p, x) * (1.0 + 0.5 * eta_inv.apply(x)); };
  for (const Complex z : pts) {
    const Complex y = eta.apply(z);
    const Complex s1_part = apply_isometry_at(s1, pulled_probe, y);
    const Complex conj_val = weight_function(eta, p, z) * s1_part / kappa;
    const Complex r = apply_probe(s2, z) / conj_val;
    op_vals.push_back(r);
    op_sum.add(r);
  }
  w.operator_phase = op_sum.value() / static_cast<double>(pts.size());
  double op_spread = 0.0;
  for (const Complex r : op_vals) op_spread = std::max(op_spread, std::abs(r - w.operator_phase));

  w.residual = std::max({map_res, zero_res, rho_spread, op_spread});
  if (policy == PhasePolicy::Strict) w.residual = std::max(w.residual, std::abs(w.operator_phase - 1.0));
  return w;
}

/// Automorphism taking z to u with eta'(z) pointing along `spin` relative to the
/// canonical map T_u^-1 o T_z.
inline DiscAutomorphism point_map(Complex from, Complex to, Complex spin = 1.0) {
  return compose(inverse(DiscAutomorphism(1.0, to)), compose(DiscAutomorphism::rotation(spin), DiscAutomorphism(1.0, from)));
}

/// Candidates eta with eta^-1(zeros1) = zeros2 for phi = e, from two distinct
/// zeros of Psi2 and every target pair at the same pseudo-hyperbolic distance.
inline std::vector<DiscAutomorphism> identity_symbol_candidates(const IsometrySpec& s1, const IsometrySpec& s2,
                                                                 double tol) {
  const auto z1 = zeros_of(s1.psi_factors);
  const auto z2 = zeros_of(s2.psi_factors);
  std::vector<DiscAutomorphism> out;
  const Complex va = z2.front();
  auto distinct = std::find_if(z2.begin(), z2.end(), [&](Complex v) { return std::abs(v - va) > 1e-12; });
  if (distinct == z2.end()) {
    // Psi2 = c T_v^d: only the spin of eta around v is free; choose it so Psi1 o eta
    // lands on Psi2 with the same phase.
    for (const Complex u : z1) {
      const DiscAutomorphism base = point_map(va, u);
      const Complex ratio = spec_inner(s2, 0.3 * unit(1.0 + va) + 0.1) /
                            spec_inner(s1, base.apply(0.3 * unit(1.0 + va) + 0.1));
      const double d = static_cast<double>(z2.size());
      out.push_back(point_map(va, u, std::polar(1.0, std::arg(ratio) / d)));
    }
    return out;
  }
  const Complex vb = *distinct;
  const Complex rel = DiscAutomorphism(1.0, va).apply(vb);
  for (const Complex ua : z1) {
    for (const Complex ub : z1) {
      if (std::abs(ua - ub) <= 1e-12) continue;
      const Complex target = DiscAutomorphism(1.0, ua).apply(ub);
      if (std::abs(std::abs(target) - std::abs(rel)) > std::max(1e-6, 100.0 * tol)) continue;
      out.push_back(point_map(va, ua, unit(target / rel)));
    }
  }
  return out;
}

}  // namespace detail

inline EquivalenceResult decide_equivalent(const IsometrySpec& s1, const IsometrySpec& s2,
                                           double tol = kDefaultClassifyTol, PhasePolicy policy = PhasePolicy::Free) {
  s1.validate();
  s2.validate();
  if (!(tol > 0.0 && tol <= 1e-4)) throw DomainError("tolerance must lie in (0, 1e-4]");
  if (s1.p != s2.p) throw InvalidInput("equivalence needs equal exponents");
  if (s1.infinite || s2.infinite) throw InvalidInput("equivalence is decided for finite codimension only");

  EquivalenceResult result;
  if (s1.psi_factors.size() != s2.psi_factors.size()) {
    result.note = "codimensions differ";
    return result;
  }
  const double class_tol = std::clamp(tol, 1e-14, 1e-4);
  const Classification c1 = classify(s1.phi, class_tol);
  const Classification c2 = classify(s2.phi, class_tol);
  if (c1.kind != c2.kind) {
    result.note = std::string("symbol classes differ: ") + to_string(c1.kind) + " vs " + to_string(c2.kind);
    return result;
  }

  std::vector<DiscAutomorphism> candidates;
  if (c1.kind == AutomorphismKind::Identity) {
    if (s1.psi_factors.empty()) {
      candidates.push_back({});
    } else {
      candidates = detail::identity_symbol_candidates(s1, s2, tol);
    }
  } else {
    const auto eta0 = find_conjugator(s1.phi, s2.phi, class_tol);
    if (!eta0) {
      result.note = "symbols are not conjugate";
      return result;
    }
    // eta = eta0^-1 o c with c in Com(phi2) carrying zeros of Psi2 onto eta0(zeros of Psi1).
    const DiscAutomorphism base = inverse(*eta0);
    if (s1.psi_factors.empty()) {
      candidates.push_back(base);
    } else {
      const Commutant com(s2.phi, class_tol);
      const auto z2 = detail::zeros_of(s2.psi_factors);
      // Reference zero: the one whose orbit under Com(phi2) is least degenerate.
      Complex ref = z2.front();
      if (c2.kind == AutomorphismKind::Elliptic) {
        const Complex centre = c2.fixed_points.front();
        for (const Complex v : z2) {
          if (std::abs(DiscAutomorphism(1.0, centre).apply(v)) > std::abs(DiscAutomorphism(1.0, centre).apply(ref))) ref = v;
        }
      }
      for (const Complex z : detail::zeros_of(s1.psi_factors)) {
        const double t = com.parameter_between(ref, eta0->apply(z));
        candidates.push_back(compose(base, com.element(t)));
      }
    }
  }

  std::optional<EquivWitness> best;
  for (const auto& eta : candidates) {
    const EquivWitness w = detail::score(s1, s2, eta, policy);
    if (!best || w.residual < best->residual) best = w;
  }
  if (!best) {
    result.note = "no candidate conjugator matches the zero configuration";
    return result;
  }
  result.witness = best;
  if (best->residual <= 10.0 * tol) {
    result.decision = Decision::Equivalent;
  } else if (best->residual <= std::sqrt(tol)) {
    result.decision = Decision::Undetermined;
    result.note = "best candidate residual lies between 10 tol and sqrt(tol)";
  } else {
    result.decision = Decision::NotEquivalent;
    result.note = "best candidate residual exceeds sqrt(tol)";
  }
  return result;
}

// ---------------------------------------------------------------------------
// Invariant subspace B H^p.

struct SubspaceCheck {
  double defect = 0.0;
  double tail_bound = 0.0;
  /// C_N in S(B_N g) = C_N B'_N U_phi g.
  Complex scale{1.0, 0.0};
};

/// S(B_N g) against B'_N (U_phi g), where B'_N has the zero of psi together with
/// phi^-1 of the first N zeros of B. For B built from the zeros of psi o phi_n this
/// is the truncation of S(B g) = C B U_phi g that holds exactly at level N.
inline SubspaceCheck invariant_subspace_check(const IsometrySpec& spec, const ProductSpec& b, const BoundaryFunction& g,
                                              const HpContext& ctx, std::size_t n_trunc) {
  spec.validate();
  if (spec.infinite || spec.psi_factors.size() != 1) throw InvalidInput("invariant-subspace check needs codimension one");
  if (!b.certificate) throw NotCertified("B has no convergence certificate");
  if (n_trunc > b.terms.size()) throw GeneratorExhausted("truncation exceeds the available terms");
  if (spec.p != ctx.p) throw GridMismatch("isometry exponent differs from the context exponent");

  const MoebiusMatrix phi_inv(inverse(spec.phi));
  std::vector<ZeroTerm> shifted;
  for (const auto& t : std::span(b.terms).first(n_trunc)) {
    shifted.push_back({phi_inv.apply(t.value), phi_inv.image_deficit(t.value, t.deficit_sq)});
  }
  auto b_n = [&](Complex z) {
    Complex v{1.0, 0.0};
    for (std::size_t k = 0; k < n_trunc; ++k) v *= b.factor_value(k, z);
    return v;
  };
  auto b_shifted = [&](Complex z) {
    Complex v = spec.psi_factors.front().apply(z);
    for (const auto& t : shifted) v *= convergence_factor(t.value) * zero_factor(t, z);
    return v;
  };

  const auto pts = grid_points(ctx.grid_size);
  std::vector<Complex> lhs, rhs;
  lhs.reserve(pts.size());
  rhs.reserve(pts.size());
  CompensatedComplexSum ratio;
  for (const Complex z : pts) {
    const Complex w = spec.phi.apply(z);
    const Complex inner_lhs = spec.phase * spec.psi_factors.front().apply(z) * b_n(w);
    const Complex inner_rhs = b_shifted(z);
    ratio.add(inner_lhs / inner_rhs);
    const Complex tail = weight_function(spec.phi, spec.p, z) * g(w);
    lhs.push_back(inner_lhs * tail);
    rhs.push_back(inner_rhs * tail);
  }
  SubspaceCheck out;
  out.scale = ratio.value() / static_cast<double>(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) out.defect = std::max(out.defect, std::abs(lhs[k] - out.scale * rhs[k]));
  out.tail_bound = b.certificate->tail(n_trunc);
  return out;
}

}  // namespace hardyiso

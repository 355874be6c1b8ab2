#pragma once

// Boundary-grid numerics for H^p: polynomial functions, the uniform-rule norm,
// the principal-branch weight (conj(lambda) phi')^(1/p), the isometries
// phase * M_Psi * U_phi, and the unimodular constants of U_phi U_psi.

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "errors.hpp"
#include "moebius.hpp"
#include "numeric.hpp"

namespace hardyiso {

struct HpContext {
  double p = 3.0;
  std::size_t grid_size = 8192;

  HpContext() = default;
  HpContext(double p_, std::size_t n) : p(p_), grid_size(n) {
    if (!(std::isfinite(p) && p >= 1.0)) throw DomainError("p must be >= 1");
    if (n < 64 || (n & (n - 1)) != 0) throw DomainError("grid size must be a power of two >= 64");
  }

  /// p = 2 runs, but the onto isometries are far richer there than U_phi.
  bool outside_scope() const { return p == 2.0; }
};

/// zeta_k = exp(2 pi i k / N).
inline std::vector<Complex> grid_points(std::size_t n) {
  std::vector<Complex> pts(n);
  for (std::size_t k = 0; k < n; ++k) {
    pts[k] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
  }
  return pts;
}

/// A polynomial, sampled on the boundary grid on demand.
class BoundaryFunction {
 public:
  BoundaryFunction() : coeffs_{Complex{}} {}
  explicit BoundaryFunction(std::vector<Complex> coeffs, std::optional<std::size_t> grid = std::nullopt)
      : coeffs_(std::move(coeffs)), grid_(grid) {
    while (coeffs_.size() > 1 && coeffs_.back() == Complex{}) coeffs_.pop_back();
    if (coeffs_.empty()) coeffs_.push_back(0.0);
  }

  const std::vector<Complex>& coeffs() const { return coeffs_; }
  std::size_t degree() const { return coeffs_.size() - 1; }
  /// The grid this function was declared on, if any.
  std::optional<std::size_t> grid() const { return grid_; }

  Complex operator()(Complex z) const {
    Complex acc{};
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
    return acc;
  }

  std::vector<Complex> samples(std::size_t n) const {
    std::vector<Complex> out;
    out.reserve(n);
    for (const Complex z : grid_points(n)) out.push_back((*this)(z));
    return out;
  }

 private:
  std::vector<Complex> coeffs_;
  std::optional<std::size_t> grid_;
};

/// (sum_k |f_k|^p / N)^(1/p) over grid samples.
inline double hp_norm_samples(const std::vector<Complex>& samples, double p) {
  if (samples.empty()) throw DomainError("no samples");
  CompensatedSum s;
  for (const Complex v : samples) s.add(std::pow(std::abs(v), p));
  return std::pow(s.value() / static_cast<double>(samples.size()), 1.0 / p);
}

inline double hp_norm(const BoundaryFunction& f, const HpContext& ctx) {
  if (4 * f.degree() >= ctx.grid_size) {
    throw DegreeError("degree " + std::to_string(f.degree()) + " needs a grid larger than " +
                      std::to_string(4 * f.degree()));
  }
  if (f.grid() && *f.grid() != ctx.grid_size) throw GridMismatch("function grid differs from the context grid");
  return hp_norm_samples(f.samples(ctx.grid_size), ctx.p);
}

/// Principal-branch (conj(lambda) phi'(z))^(1/p) = (1 - |a|^2)^(1/p) (1 - conj(a) z)^(-2/p).
/// Re(1 - conj(a) z) > 0 on the closed disc keeps -2 Arg(1 - conj(a) z) inside
/// (-pi, pi), so the split form is the principal branch of the full radicand.
inline Complex weight_function(const DiscAutomorphism& phi, double p, Complex z) {
  if (std::abs(z) > 1.0 + kEvalSlack) throw DomainError("weight evaluated outside the closed disc");
  const Complex d = 1.0 - std::conj(phi.a()) * z;
  if (!(d.real() > 0.0)) throw BranchError("1 - conj(a) z left the right half-plane");
  return std::pow(deficit(phi.a()), 1.0 / p) * std::exp(-(2.0 / p) * std::log(d));
}

enum class ConstructionKind { BackwardOrbitProduct, ThinnedForwardProduct };

inline const char* to_string(ConstructionKind k) {
  return k == ConstructionKind::BackwardOrbitProduct ? "BackwardOrbitProduct" : "ThinnedForwardProduct";
}

/// Infinite Blaschke inner factor built from the orbits of phi.
///   BackwardOrbitProduct: zeros phi_n(0), n >= 1.
///   ThinnedForwardProduct: zeros a_{n_k} where phi_n(a_n) = 0, for the retained n_k.
struct InfiniteConstruction {
  ConstructionKind kind = ConstructionKind::BackwardOrbitProduct;
  DiscAutomorphism phi;
  std::vector<std::size_t> indices;
  /// Certified tail bounds for sum_{n >= n_k} (1 - |a_n|), one per index.
  std::vector<double> index_tails;
  /// Lower and upper certified bounds for R = sum_n (1 - |a_n|).
  double budget = 0.0;
  double budget_upper = 0.0;
  /// Certified bound for sum_k sum_{n >= n_k} (1 - |a_n|).
  double double_sum_bound = 0.0;
};

/// S = phase * M_Psi * U_phi with Psi the product of psi_factors, or an
/// infinite inner factor when `infinite` is set.
struct IsometrySpec {
  double p = 3.0;
  Complex phase{1.0, 0.0};
  std::vector<DiscAutomorphism> psi_factors;
  std::optional<InfiniteConstruction> infinite;
  DiscAutomorphism phi;

  void validate() const {
    if (!(std::isfinite(p) && p >= 1.0)) throw DomainError("p must be >= 1");
    if (std::abs(std::abs(phase) - 1.0) > 1e-12) throw DomainError("phase must be unimodular");
  }
};

inline Complex inner_factor(const std::vector<DiscAutomorphism>& factors, Complex z) {
  Complex v{1.0, 0.0};
  for (const auto& f : factors) v *= f.apply(z);
  return v;
}

/// (S F)(z) for an arbitrary function F given pointwise.
template <class F>
Complex apply_isometry_at(const IsometrySpec& spec, const F& f, Complex z) {
  if (spec.infinite) throw InvalidInput("infinite inner factors must be truncated first");
  return spec.phase * inner_factor(spec.psi_factors, z) * weight_function(spec.phi, spec.p, z) * f(spec.phi.apply(z));
}

inline std::vector<Complex> apply_isometry(const IsometrySpec& spec, const BoundaryFunction& f, const HpContext& ctx) {
  spec.validate();
  if (f.grid() && *f.grid() != ctx.grid_size) throw GridMismatch("function grid differs from the context grid");
  if (spec.p != ctx.p) throw GridMismatch("isometry exponent differs from the context exponent");
  std::vector<Complex> out;
  out.reserve(ctx.grid_size);
  for (const Complex z : grid_points(ctx.grid_size)) out.push_back(apply_isometry_at(spec, f, z));
  return out;
}

struct CompositionConstant {
  Complex rho_closed;
  Complex rho_numeric;
  double spread = 0.0;
};

/// exp(i (2/p) Arg(1 + conj(lambda1 a1) a2)) for phi = (lambda1, a1), psi = (lambda2, a2).
inline Complex composition_constant_closed(const DiscAutomorphism& phi, const DiscAutomorphism& psi, double p) {
  const Complex q = 1.0 + std::conj(phi.lambda() * phi.a()) * psi.a();
  return std::polar(1.0, (2.0 / p) * std::arg(q));
}

/// The constant rho in U_phi U_psi = rho U_{psi o phi}, in closed form and as the
/// grid mean of w_phi(z) w_psi(phi(z)) / w_{psi o phi}(z).
inline CompositionConstant composition_constant(const DiscAutomorphism& phi, const DiscAutomorphism& psi, double p,
                                                const HpContext& ctx) {
  const DiscAutomorphism both = compose(psi, phi);
  const auto pts = grid_points(ctx.grid_size);
  std::vector<Complex> ratios;
  ratios.reserve(pts.size());
  CompensatedComplexSum mean;
  for (const Complex z : pts) {
    const Complex r = weight_function(phi, p, z) * weight_function(psi, p, phi.apply(z)) / weight_function(both, p, z);
    ratios.push_back(r);
    mean.add(r);
  }
  CompositionConstant out;
  out.rho_closed = composition_constant_closed(phi, psi, p);
  out.rho_numeric = mean.value() / static_cast<double>(pts.size());
  for (const Complex r : ratios) out.spread = std::max(out.spread, std::abs(r - out.rho_numeric));
  return out;
}

}  // namespace hardyiso

// hardyiso: command-line front end for the disc-automorphism and H^p isometry library.
//
// Exit codes: 0 success or decided, 2 parse error, 3 undetermined, 4 invalid input.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>

#include "hardyiso/hardyiso.hpp"

namespace {

using hardyiso::Complex;
using hardyiso::DiscAutomorphism;
using hardyiso::io::Json;
namespace io = hardyiso::io;

constexpr int kOk = 0;
constexpr int kParse = 2;
constexpr int kUndetermined = 3;
constexpr int kInvalid = 4;

void emit_error(const char* kind, const std::string& message) {
  std::cerr << Json{{"error", kind}, {"message", message}}.dump() << '\n';
}

void emit(const Json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream os(out_path, std::ios::binary);
  if (!os) throw hardyiso::InvalidInput("cannot write " + out_path);
  os << j.dump(2) << '\n';
}

void write_csv(const std::string& path, const std::vector<hardyiso::ZeroTerm>& terms, const std::vector<double>& sums,
               std::size_t first_index) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw hardyiso::InvalidInput("cannot write " + path);
  io::write_orbit_csv(os, terms, sums, first_index);
}

/// For the CSV-producing subcommands an --out path ending in .csv names the CSV,
/// and the JSON verdict then goes to stdout.
struct Outputs {
  std::string csv, json;
};

Outputs split_outputs(const std::string& csv, const std::string& out) {
  const bool out_is_csv = out.size() >= 4 && out.compare(out.size() - 4, 4, ".csv") == 0;
  if (out_is_csv) return {out, ""};
  return {csv, out};
}

DiscAutomorphism automorphism_arg(const std::string& s) { return io::automorphism_from_json(io::load(s)); }
Complex complex_arg(const std::string& s) { return io::complex_from_json(io::load(s)); }

struct Options {
  std::string phi, psi, outer, inner, at, spec, s1, s2, eta, out, csv, kind = "zero", poly;
  long long n = 1;
  std::size_t terms = 1000, evidence = 1000, grid = 8192, n_trunc = 512, k_count = 6, trials = 10, degree = 32;
  double tol = hardyiso::kDefaultClassifyTol, p = 3.0, t = 0.0;
  bool forward = false, strict = false, has_t = false;
  std::uint64_t seed = 1;
};

int run_classify(const Options& o) {
  emit(io::to_json(hardyiso::classify(automorphism_arg(o.phi), o.tol)), o.out);
  return kOk;
}

int run_compose(const Options& o) {
  const auto r = hardyiso::compose(automorphism_arg(o.outer), automorphism_arg(o.inner));
  Json j = {{"result", io::to_json(r)}};
  if (!o.at.empty()) j["value"] = io::to_json(r(complex_arg(o.at)));
  emit(j, o.out);
  return kOk;
}

int run_iterate(const Options& o) {
  const auto phi = automorphism_arg(o.phi);
  if (o.n > 1'000'000'000 || o.n < -1'000'000'000) throw hardyiso::DomainError("|n| must be <= 1e9");
  const auto m = hardyiso::MoebiusMatrix(phi).power(o.n);
  Json j = {{"n", o.n}};
  try {
    j["result"] = io::to_json(hardyiso::iterate(phi, o.n));
  } catch (const hardyiso::DomainError&) {
    // The zero has reached the circle in double precision; points can still be mapped.
    j["result"] = nullptr;
  }
  if (!o.at.empty()) {
    const Complex z = complex_arg(o.at);
    if (std::abs(z) > 1.0 + hardyiso::kEvalSlack) throw hardyiso::DomainError("evaluation point outside the closed disc");
    j["value"] = io::to_json(m.apply(z));
  }
  emit(j, o.out);
  return kOk;
}

int run_orbit(const Options& o) {
  const auto phi = automorphism_arg(o.phi);
  const auto seq = o.forward ? hardyiso::ZeroSequence::forward_orbit(phi)
                             : hardyiso::ZeroSequence::orbit(o.psi.empty() ? DiscAutomorphism{} : automorphism_arg(o.psi), phi);
  const std::size_t n = std::max<std::size_t>(o.terms, 64);
  const auto v = hardyiso::classify_blaschke(seq, n);
  const auto terms = seq.take(o.terms);
  const std::vector<double> sums(v.partial_sums.begin(), v.partial_sums.begin() + static_cast<std::ptrdiff_t>(o.terms));
  const std::size_t first = o.forward ? 1 : 0;
  const Outputs dst = split_outputs(o.csv, o.out);
  if (o.csv.empty() && o.out.empty()) {
    io::write_orbit_csv(std::cout, terms, sums, first);
  } else {
    if (!dst.csv.empty()) write_csv(dst.csv, terms, sums, first);
    Json j = io::to_json(v);
    if (!dst.csv.empty()) j["csv"] = dst.csv;
    emit(j, dst.json);
  }
  return v.verdict == hardyiso::BlaschkeVerdict::Undetermined ? kUndetermined : kOk;
}

int run_crownover(const Options& o) {
  const auto spec = io::spec_from_json(io::load(o.spec));
  const auto v = hardyiso::decide_crownover(spec, o.evidence);
  const Outputs dst = split_outputs(o.csv, o.out);
  Json j = {{"verdict", hardyiso::to_string(v.verdict)},
            {"reason", hardyiso::to_string(v.reason)},
            {"evidence", io::to_json(v.evidence)},
            {"evidence_csv", dst.csv.empty() ? Json(nullptr) : Json(dst.csv)}};
  if (v.divergence_rate > 0.0) j["divergence_rate"] = v.divergence_rate;
  if (!dst.csv.empty()) write_csv(dst.csv, v.evidence_terms, v.evidence.partial_sums, 0);
  emit(j, dst.json);
  return kOk;
}

int run_equiv(const Options& o) {
  const auto a = io::spec_from_json(io::load(o.s1));
  const auto b = io::spec_from_json(io::load(o.s2));
  const auto r = hardyiso::decide_equivalent(a, b, o.tol,
                                             o.strict ? hardyiso::PhasePolicy::Strict : hardyiso::PhasePolicy::Free);
  emit(io::to_json(r), o.out);
  return r.decision == hardyiso::Decision::Undetermined ? kUndetermined : kOk;
}

int run_commutant(const Options& o) {
  const auto phi = automorphism_arg(o.phi);
  const auto cls = hardyiso::classify(phi, o.tol);
  if (cls.kind == hardyiso::AutomorphismKind::Identity) {
    emit({{"kind", "Identity"}, {"note", "Com(e) is the whole automorphism group; there is no one-parameter family"}}, o.out);
    return kOk;
  }
  const hardyiso::Commutant com(phi, o.tol);
  Json j = {{"kind", hardyiso::to_string(cls.kind)}};
  if (o.has_t) j["element"] = io::to_json(com.element(o.t));
  if (!o.eta.empty()) {
    const auto eta = automorphism_arg(o.eta);
    const auto t = com.parameter_of(eta);
    j["commutes"] = hardyiso::commutes(phi, eta);
    j["parameter"] = t ? Json(*t) : Json(nullptr);
  }
  emit(j, o.out);
  return kOk;
}

int run_verify(const Options& o) {
  auto spec = io::spec_from_json(io::load(o.spec));
  if (spec.infinite) spec = hardyiso::truncate(spec, o.n_trunc);
  const hardyiso::HpContext ctx(spec.p, o.grid);
  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> gauss;
  Json reports = Json::array();
  double worst = 0.0;
  for (std::size_t trial = 0; trial < o.trials; ++trial) {
    std::vector<Complex> coeffs;
    if (!o.poly.empty()) {
      for (const auto& c : io::load(o.poly)) coeffs.push_back(io::complex_from_json(c));
    } else {
      for (std::size_t k = 0; k <= o.degree; ++k) coeffs.emplace_back(gauss(rng), gauss(rng));
    }
    const hardyiso::BoundaryFunction f(coeffs);
    const double norm_in = hardyiso::hp_norm(f, ctx);
    const double norm_out = hardyiso::hp_norm_samples(hardyiso::apply_isometry(spec, f, ctx), ctx.p);
    const double rel = std::abs(norm_out - norm_in) / norm_in;
    worst = std::max(worst, rel);
    reports.push_back({{"norm_in", norm_in}, {"norm_out", norm_out}, {"rel_defect", rel}, {"N", o.grid}});
    if (!o.poly.empty()) break;
  }
  Json j = {{"seed", o.seed}, {"reports", reports}, {"max_rel_defect", worst}};
  if (ctx.outside_scope()) j["note"] = "p = 2 lies outside the scope of the onto-isometry description";
  emit(j, o.out);
  return kOk;
}

int run_construct(const Options& o) {
  const auto phi = automorphism_arg(o.phi);
  Json j;
  if (o.kind == "zero") {
    const auto c = hardyiso::construct_zero_intersection(phi);
    const auto check = hardyiso::functional_identity_check(c, o.n_trunc, hardyiso::circle_points(32, 0.5));
    j = {{"construction", io::to_json(c)},
         {"identity_check", {{"N", o.n_trunc}, {"defect", check.defect}, {"bound", check.bound}}}};
  } else if (o.kind == "nonzero") {
    j = {{"construction", io::to_json(hardyiso::construct_nonzero_intersection(phi, o.k_count))}};
  } else {
    throw hardyiso::InvalidInput("--kind must be zero or nonzero");
  }
  emit(j, o.out);
  return kOk;
}

int run_rho(const Options& o) {
  const hardyiso::HpContext ctx(o.p, o.grid);
  Json j = io::to_json(hardyiso::composition_constant(automorphism_arg(o.phi), automorphism_arg(o.psi), o.p, ctx));
  if (ctx.outside_scope()) j["note"] = "p = 2 lies outside the scope of the onto-isometry description";
  emit(j, o.out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Disc automorphisms, Blaschke sequences and isometries of H^p"};
  app.require_subcommand(1);
  Options o;

  auto* classify = app.add_subcommand("classify", "Classify an automorphism by its fixed points");
  classify->add_option("--phi", o.phi, "automorphism JSON or file")->required();
  classify->add_option("--tol", o.tol, "trace-test tolerance");

  auto* compose = app.add_subcommand("compose", "outer o inner");
  compose->add_option("--outer", o.outer)->required();
  compose->add_option("--inner", o.inner)->required();
  compose->add_option("--at", o.at, "evaluate the composite at this point");

  auto* iterate = app.add_subcommand("iterate", "n-fold composition");
  iterate->add_option("--phi", o.phi)->required();
  iterate->add_option("--n", o.n)->required();
  iterate->add_option("--at", o.at, "evaluate the iterate at this point");

  auto* orbit = app.add_subcommand("orbit", "Orbit zeros phi_{-n}(psi^-1(0)) and their Blaschke sums");
  orbit->add_option("--phi", o.phi)->required();
  orbit->add_option("--psi", o.psi, "defaults to the identity");
  orbit->add_flag("--forward", o.forward, "use phi_n(0), n >= 1 instead");
  orbit->add_option("--n", o.terms, "number of terms");
  orbit->add_option("--csv", o.csv, "CSV path; without --csv or --out the CSV goes to stdout");

  auto* crownover = app.add_subcommand("crownover", "Decide whether the intersection of S^n H^p is trivial");
  crownover->add_option("--spec", o.spec)->required();
  crownover->add_option("--evidence", o.evidence, "number of evidence terms (>= 64)");
  crownover->add_option("--csv", o.csv, "evidence CSV path");

  auto* equiv = app.add_subcommand("equiv", "Decide isometric equivalence of two isometries");
  equiv->add_option("--s1", o.s1)->required();
  equiv->add_option("--s2", o.s2)->required();
  equiv->add_option("--tol", o.tol);
  equiv->add_flag("--strict", o.strict, "require S2 = U_eta S1 U_eta^-1 with no extra phase");

  auto* commutant = app.add_subcommand("commutant", "One-parameter commutant of phi");
  commutant->add_option("--phi", o.phi)->required();
  commutant->add_option("--t", o.t, "parameter of the element to return")->each([&](const std::string&) { o.has_t = true; });
  commutant->add_option("--eta", o.eta, "test whether eta commutes with phi");
  commutant->add_option("--tol", o.tol);

  auto* verify = app.add_subcommand("verify", "Check the isometry property on random polynomials");
  verify->add_option("--spec", o.spec)->required();
  verify->add_option("--N", o.grid, "grid size (power of two >= 64)");
  verify->add_option("--seed", o.seed);
  verify->add_option("--trials", o.trials);
  verify->add_option("--degree", o.degree);
  verify->add_option("--poly", o.poly, "JSON array of complex coefficients instead of random ones");
  verify->add_option("--N-trunc", o.n_trunc, "truncation for infinite inner factors");

  auto* construct = app.add_subcommand("construct", "Infinite-codimension constructions");
  construct->add_option("--phi", o.phi)->required();
  construct->add_option("--kind", o.kind, "zero or nonzero intersection");
  construct->add_option("--K", o.k_count, "retained indices for the thinned product");
  construct->add_option("--N-trunc", o.n_trunc, "truncation for the identity check");

  auto* rho = app.add_subcommand("rho", "Constant in U_phi U_psi = rho U_{psi o phi}");
  rho->add_option("--phi", o.phi)->required();
  rho->add_option("--psi", o.psi)->required();
  rho->add_option("--p", o.p);
  rho->add_option("--N", o.grid);

  for (auto* sub : app.get_subcommands({})) sub->add_option("--out", o.out, "write JSON here instead of stdout; for orbit and crownover a .csv path takes the CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error("ParseError", e.what());
    return kParse;
  }

  try {
    if (classify->parsed()) return run_classify(o);
    if (compose->parsed()) return run_compose(o);
    if (iterate->parsed()) return run_iterate(o);
    if (orbit->parsed()) return run_orbit(o);
    if (crownover->parsed()) return run_crownover(o);
    if (equiv->parsed()) return run_equiv(o);
    if (commutant->parsed()) return run_commutant(o);
    if (verify->parsed()) return run_verify(o);
    if (construct->parsed()) return run_construct(o);
    if (rho->parsed()) return run_rho(o);
  } catch (const hardyiso::ParseError& e) {
    emit_error(e.kind(), e.what());
    return kParse;
  } catch (const Json::exception& e) {
    emit_error("ParseError", e.what());
    return kParse;
  } catch (const hardyiso::Error& e) {
    emit_error(e.kind(), e.what());
    return kInvalid;
  }
  return kInvalid;
}

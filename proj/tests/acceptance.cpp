// Copyright 2026 The wtdil Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>

#include "cli.hpp"
#include "wtdil/instances.hpp"
#include "wtdil/random.hpp"

namespace {

using namespace wtdil;

struct Result {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string data_file(const std::string& name) {
  const char* dir = std::getenv("WTDIL_DATA_DIR");
#ifdef WTDIL_DEFAULT_DATA_DIR
  if (!dir) dir = WTDIL_DEFAULT_DATA_DIR;
#endif
  return (std::filesystem::path(dir ? dir : "data") / name).string();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Golden j for the averaging map with the three-element seed.
Result golden_j() {
  const auto t0 = std::chrono::steady_clock::now();
  const WeakTensorDilation d = weak_tensor_dilation(averaging::map(), averaging::seed());
  double err = 0.0;
  double j10 = 0.0;
  for (Eigen::Index k = 0; k < 2; ++k) {
    const Complex a1 = k == 0 ? 1.0 : 0.0;
    const Complex a2 = 1.0 - a1;
    const ComplexMatrix& jk = d.j[static_cast<std::size_t>(k)];
    err = std::max(err, (jk - averaging::expected_j(a1, a2)).cwiseAbs().maxCoeff());
    ComplexMatrix p1 = ComplexMatrix::Zero(2, 2);
    p1(0, 0) = 1.0;
    j10 = std::max(j10, (jk.block(2, 0, 2, 2) - 0.5 * (a1 - a2) * p1).cwiseAbs().maxCoeff());
  }
  const double t = seconds_since(t0);
  const bool ok = d.k_dim == 3 && err <= 1e-12 && j10 <= 1e-12 && t < 1.0;
  return {ok, fmt("entrywise %.2e", err) + fmt(", j10 %.2e", j10) + fmt(", %.3f s", t)};
}

// H_dim, QONS relations and p_I for the averaging map.
Result structural_values() {
  const CPMap s = averaging::map();
  // Gram of {e_k (x) g_t}: <g_s, S(e_k* e_l) g_t>.
  ComplexMatrix gram(4, 4);
  for (Eigen::Index k = 0; k < 2; ++k)
    for (Eigen::Index l = 0; l < 2; ++l) {
      const AlgebraElement prod = AlgebraElement::basis(s.source, k).adjoint() * AlgebraElement::basis(s.source, l);
      gram.block(k * 2, l * 2, 2, 2) = represent(apply(s, prod));
    }
  const double gram_err = residual(gram, 0.5 * ComplexMatrix::Identity(4, 4));
  const WeakTensorDilation d = weak_tensor_dilation(s, averaging::seed());
  const QONS& q = *d.qons;
  const std::vector<AlgebraElement> p = {averaging::diag(1.0, 1.0), averaging::diag(1.0, 0.0),
                                         averaging::diag(0.0, 1.0)};
  double p_err = q.elements.size() == 3 ? 0.0 : 1.0;
  for (std::size_t i = 0; i < std::min<std::size_t>(3, q.elements.size()); ++i)
    p_err = std::max(p_err, (q.elements[i].p - p[i]).coordinates().norm());
  const double rel = qons_relation_residual(*d.gns, q.elements);
  const double p_i = residual(d.p_I, averaging::expected_p_I());
  const bool ok = gram_err <= 1e-12 && d.gns->h_dim == 4 && numerical_rank(gram) == 4 && rel <= 1e-12 &&
                  p_err <= 1e-12 && q.completeness_residual <= 1e-12 && p_i <= 1e-12;
  return {ok, "H_dim " + std::to_string(d.gns->h_dim) + fmt(", gram %.2e", gram_err) + fmt(", relations %.2e", rel) +
                  fmt(", completeness %.2e", q.completeness_residual) + fmt(", p_I %.2e", p_i)};
}

Result dilation_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(20261016);
  double worst = 0.0;
  int failures = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const MatrixBlockAlgebra a = random_standard_algebra(rng, 6, false);
    const MatrixBlockAlgebra b = random_standard_algebra(rng, 6, false);
    const CPMap s = random_unital_cp_map(rng, a, b);
    const WeakTensorDilation d = weak_tensor_dilation(s);
    const double r = std::max(d.certificate.max(), gns_residuals(*d.gns).max());
    worst = std::max(worst, r);
    if (!(r <= 1e-8)) ++failures;
  }
  const double t = seconds_since(t0);
  return {failures == 0 && t < 60.0,
          "200 maps, worst " + fmt("%.2e", worst) + ", failures " + std::to_string(failures) + fmt(", %.2f s", t)};
}

// max |phi_g(b' S(a)) - phi_f(S'(b') a)| over coordinate bases.
double pairing(const DualityContext& ctx, const CPMap& sp) {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < ctx.a_alg.coord_dim(); ++k)
    for (Eigen::Index l = 0; l < sp.source.coord_dim(); ++l) {
      const ComplexMatrix a = represent_basis(ctx.a_alg, k);
      const AlgebraElement b = AlgebraElement::basis(sp.source, l);
      const Complex lhs = ctx.g(represent(b) * represent(apply(ctx.map, AlgebraElement::basis(ctx.a_alg, k))));
      const Complex rhs = ctx.f(represent(apply(sp, b)) * a);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  return worst;
}

Result duality_suite() {
  const DualityContext avg = averaging::context();
  const DualMap avg_dual = dual_map(avg);
  const double self = (avg_dual.map.action - avg.map.action).norm();
  const double avg_pair = pairing(avg, avg_dual.map);
  Rng rng(4);
  double worst_pair = 0.0, worst_state = 0.0, worst_dd = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const DualityContext ctx = random_covariant_instance(rng, 5);
    const DoubleDual dd = double_dual(ctx);
    worst_pair = std::max(worst_pair, pairing(ctx, dd.first.map));
    for (Eigen::Index l = 0; l < dd.first.map.source.coord_dim(); ++l) {
      const AlgebraElement b = AlgebraElement::basis(dd.first.map.source, l);
      worst_state = std::max(worst_state, std::abs(ctx.f(represent(apply(dd.first.map, b))) - ctx.g(represent(b))));
    }
    worst_dd = std::max(worst_dd, dd.residual);
  }
  const bool ok = self <= 1e-10 && avg_pair <= 1e-10 && worst_pair <= 1e-8 && worst_state <= 1e-8 && worst_dd <= 1e-8;
  return {ok, fmt("S' vs S %.2e", self) + fmt(", pairing %.2e", worst_pair) + fmt(", state %.2e", worst_state) +
                  fmt(", S'' vs S %.2e", worst_dd)};
}

Result extension_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(5);
  double choi_neg = 0.0, unital = 0.0, restriction = 0.0, covariance = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const DualityContext ctx = random_covariant_instance(rng, 5);
    const Extension e = extend_cp_map(ctx);
    choi_neg = std::max(choi_neg, -std::min(0.0, e.z.choi_min_eigenvalue));
    unital = std::max(unital, e.z.unital_residual);
    // ||Z|_A - S|| on the coordinate basis of A.
    for (Eigen::Index k = 0; k < ctx.a_alg.coord_dim(); ++k) {
      const AlgebraElement a = AlgebraElement::basis(ctx.a_alg, k);
      const ComplexMatrix za = represent(apply(e.z, decompose(e.z.source, represent(a))));
      restriction = std::max(restriction, residual(za, represent(apply(ctx.map, a))));
    }
    // Matrix units of B(F) span it.
    const Eigen::Index nf = ctx.a_alg.ambient_dim();
    for (Eigen::Index k = 0; k < nf * nf; ++k) {
      const AlgebraElement x = AlgebraElement::basis(e.z.source, k);
      covariance = std::max(covariance, std::abs(ctx.f(represent(x)) - ctx.g(represent(apply(e.z, x)))));
    }
  }
  const double t = seconds_since(t0);
  const bool ok = choi_neg <= 1e-8 && unital <= 1e-8 && restriction <= 1e-8 && covariance <= 1e-8 && t < 120.0;
  return {ok, fmt("choi negativity %.2e", choi_neg) + fmt(", unital %.2e", unital) +
                  fmt(", restriction %.2e", restriction) + fmt(", covariance %.2e", covariance) + fmt(", %.2f s", t)};
}

Result roundtrip_suite() {
  Rng rng(6);
  double choi = 0.0, dual = 0.0, cert = 0.0;
  int mismatched = 0, non_minimal = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const DualityContext ctx = random_covariant_instance(rng, 5);
    const ExtensionPipeline p = extend_cp_map_pipeline(ctx);
    const ExtensionRoundTrip e = roundtrip_extension(ctx, p.extension.z);
    choi = std::max(choi, e.choi_distance);
    cert = std::max(cert, e.recovered.dilation.certificate.max());
    if (!is_minimal_dilation(p.dual_dilation)) ++non_minimal;
    const DilationRoundTrip d = roundtrip_dilation(ctx, p.dual_dilation);
    dual = std::max(dual, d.dual_residual);
    cert = std::max(cert, d.recovered.dilation.certificate.max());
    if (!d.l_dim_match) ++mismatched;
  }
  const bool ok = choi <= 1e-8 && dual <= 1e-8 && cert <= 1e-8 && mismatched == 0 && non_minimal == 0;
  return {ok, fmt("choi %.2e", choi) + fmt(", S' %.2e", dual) + fmt(", certificates %.2e", cert) +
                  ", L_dim mismatches " + std::to_string(mismatched) + ", non-minimal " +
                  std::to_string(non_minimal)};
}

Result nonunital() {
  const CPMap half = scaled(averaging::map(), 0.5);
  const NonunitalDilation r = nonunital_recovery(half);
  const double abs_err = residual(represent(r.abs_xi), std::sqrt(0.5) * ComplexMatrix::Identity(2, 2));
  const ComplexMatrix w = represent(r.abs_xi);
  const ConditionalExpectation p = r.dilation.expectation();
  double identity = 0.0;
  for (Eigen::Index k = 0; k < 2; ++k) {
    const AlgebraElement a = AlgebraElement::basis(half.source, k);
    identity = std::max(identity, residual(w * p.apply_ambient(r.dilation.j_of(a)) * w, represent(apply(half, a))));
  }
  return {abs_err <= 1e-10 && identity <= 1e-10, fmt("|xi| %.2e", abs_err) + fmt(", identity %.2e", identity)};
}

Result fault_surfacing() {
  cli::Options noncov;
  noncov.input = data_file("noncovariant.json");
  cli::Options noncyc;
  noncyc.input = data_file("noncyclic_f.json");
  const cli::Outcome a1 = cli::cmd_dual(noncov), a2 = cli::cmd_dual(noncov);
  const cli::Outcome b1 = cli::cmd_dual(noncyc), b2 = cli::cmd_dual(noncyc);
  auto kind = [](const cli::Outcome& o) {
    return o.report.contains("error") ? o.report["error"]["kind"].get<std::string>() : std::string();
  };
  const bool cov_ok = a1.exit_code == cli::kExitVerification && kind(a1) == to_string(ErrorKind::NotCovariant) &&
                      a1.report["error"].contains("residual") &&
                      std::abs(a1.report["error"]["residual"].get<double>() - 0.5) <= 1e-12;
  const bool cyc_ok = b1.exit_code == cli::kExitVerification && kind(b1) == to_string(ErrorKind::NotCyclic) &&
                      b1.report["error"]["message"].get<std::string>().find("f not cyclic for A") != std::string::npos;
  const bool deterministic = io::dump(a1.report) == io::dump(a2.report) && io::dump(b1.report) == io::dump(b2.report);
  std::string detail = "non-covariant: " + kind(a1);
  if (a1.report.contains("error") && a1.report["error"].contains("residual"))
    detail += fmt(" (residual %.3g)", a1.report["error"]["residual"].get<double>());
  detail += ", non-cyclic f: " + (b1.report.contains("error") ? b1.report["error"]["message"].get<std::string>()
                                                                : std::string("no error"));
  detail += deterministic ? ", deterministic" : ", NOT deterministic";
  return {cov_ok && cyc_ok && deterministic, detail};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Result()>> criteria[] = {
      {"1 golden j", golden_j},
      {"2 structural values", structural_values},
      {"3 dilation property suite", dilation_suite},
      {"4 duality", duality_suite},
      {"5 extension pipeline", extension_suite},
      {"6 round trips", roundtrip_suite},
      {"7 non-unital recovery", nonunital},
      {"8 fault surfacing", fault_surfacing},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Result r;
    try {
      r = fn();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    if (!r.pass) ++failed;
    std::printf("%s criterion %s: %s\n", r.pass ? "PASS" : "FAIL", name, r.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}

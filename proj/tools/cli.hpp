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

// Command implementations behind the wtdil executable. Each command returns
// its exit code together with the JSON report, so tests can run them in
// process.

#ifndef WTDIL_TOOLS_CLI_HPP
#define WTDIL_TOOLS_CLI_HPP

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "instance_io.hpp"
#include "wtdil/instances.hpp"
#include "wtdil/random.hpp"

namespace wtdil::cli {

using io::Json;

inline constexpr int kExitPass = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitVerification = 2;

inline constexpr double kBaseTol = 1e-9;
inline constexpr double kExampleTol = 1e-12;

struct Options {
  std::optional<std::string> input;
  std::optional<std::string> output;
  std::optional<double> tol;
  std::optional<std::string> seed_qons;
  bool no_seed = false;
  bool random = false;
  int dims = 3;
  std::uint64_t seed = 0;
  bool json = false;
};

struct Outcome {
  int exit_code = kExitPass;
  Json report;
  std::vector<std::string> timings;  // "stage: 1.23 ms", never part of the report
};

/// Exit code for a library error: malformed input is 1, a failed hypothesis
/// or verification is 2.
inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse:
    case ErrorKind::ShapeMismatch:
    case ErrorKind::NonFinite:
    case ErrorKind::DimensionCap:
    case ErrorKind::AlgebraMismatch:
    case ErrorKind::NotHermitianPreserving:
    case ErrorKind::NotFullAlgebra:
      return kExitInput;
    default:
      return kExitVerification;
  }
}

class ReportBuilder {
 public:
  explicit ReportBuilder(std::string command) {
    report_["schema"] = io::kSchemaVersion;
    report_["command"] = std::move(command);
    report_["stages"] = Json::array();
  }

  /// Adds a stage; it passes iff every residual is <= tol and every check holds.
  Json& stage(const std::string& name, double tol, const std::vector<std::pair<std::string, double>>& residuals,
              const std::vector<std::pair<std::string, bool>>& checks = {}) {
    Json s;
    s["name"] = name;
    s["tolerance"] = tol;
    Json r = Json::object();
    double stage_max = 0.0;
    std::string stage_arg;
    for (const auto& [key, value] : residuals) {
      r[key] = value;
      if (stage_arg.empty() || value > stage_max) {
        stage_max = value;
        stage_arg = key;
      }
    }
    bool ok = stage_max <= tol;
    Json c = Json::object();
    for (const auto& [key, value] : checks) {
      c[key] = value;
      ok = ok && value;
    }
    s["max_residual"] = stage_max;
    s["pass"] = ok;
    s["residuals"] = std::move(r);
    if (!checks.empty()) s["checks"] = std::move(c);
    if (worst_stage_.empty() || stage_max > worst_) {
      worst_ = stage_max;
      worst_stage_ = name + "." + stage_arg;
    }
    pass_ = pass_ && ok;
    report_["stages"].push_back(std::move(s));
    return report_["stages"].back();
  }

  void timing(const std::string& name, double ms) {
    timings_.push_back(name + ": " + std::to_string(ms) + " ms");
  }

  void note(const std::string& text) {
    if (!report_.contains("notes")) report_["notes"] = Json::array();
    report_["notes"].push_back(text);
  }

  Outcome finish() {
    report_["pass"] = pass_;
    report_["max_residual"] = worst_;
    report_["max_residual_at"] = worst_stage_;
    return {pass_ ? kExitPass : kExitVerification, std::move(report_), std::move(timings_)};
  }

  Outcome fail(const Error& e) {
    Json err;
    err["kind"] = std::string(to_string(e.kind()));
    err["message"] = e.what();
    if (e.residual()) err["residual"] = *e.residual();
    report_["error"] = std::move(err);
    report_["pass"] = false;
    if (e.residual() && (worst_stage_.empty() || *e.residual() > worst_)) {
      worst_ = *e.residual();
      worst_stage_ = "error." + std::string(to_string(e.kind()));
    }
    report_["max_residual"] = worst_;
    report_["max_residual_at"] = worst_stage_;
    return {exit_code_for(e.kind()), std::move(report_), std::move(timings_)};
  }

  Json& data() { return report_; }

 private:
  Json report_;
  bool pass_ = true;
  double worst_ = 0.0;
  std::string worst_stage_;
  std::vector<std::string> timings_;
};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double lap_ms() {
    const auto now = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(now - start_).count();
    start_ = now;
    return ms;
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

namespace detail {

inline io::Instance random_instance(const Options& opts, bool covariant) {
  if (opts.dims < 1) throw Error(ErrorKind::Parse, "--dims must be >= 1");
  Rng rng(opts.seed);
  io::Instance inst;
  CPMap s;
  if (covariant) {
    DualityContext ctx = random_covariant_instance(rng, opts.dims);
    s = ctx.map;
    inst.states.emplace("f", ctx.f.vector());
    inst.states.emplace("g", ctx.g.vector());
    inst.pipeline.f = "f";
    inst.pipeline.g = "g";
  } else {
    s = random_unital_cp_map(rng, opts.dims);
  }
  inst.algebras.emplace("A", s.source);
  inst.algebras.emplace("B", s.target);
  inst.cp_maps.emplace("S", s);
  inst.pipeline.map = "S";
  return inst;
}

inline io::Instance load(const Options& opts, bool covariant) {
  if (opts.random) return random_instance(opts, covariant);
  if (!opts.input) throw Error(ErrorKind::Parse, "no --input given (or use --random)");
  return io::instance_from_json(io::read_json_file(*opts.input));
}

inline Json instance_json(const CPMap& s) {
  Json j;
  j["source"] = io::algebra_to_json(s.source);
  j["target"] = io::algebra_to_json(s.target);
  j["action"] = io::matrix_to_json(s.action);
  return j;
}

inline DualityContext context_of(const io::Instance& inst, double tol) {
  if (!inst.pipeline.f || !inst.pipeline.g) throw Error(ErrorKind::Parse, "pipeline needs states \"f\" and \"g\"");
  return build_context(inst.map(), inst.states.at(*inst.pipeline.f), inst.states.at(*inst.pipeline.g), tol);
}

inline void context_stage(ReportBuilder& rb, const DualityContext& ctx, double tol, bool need_g) {
  std::vector<std::pair<std::string, bool>> checks = {{"covariant", ctx.covariant},
                                                      {"f_cyclic_for_A", ctx.f_cyclic_for_A}};
  if (need_g) checks.emplace_back("g_cyclic_for_Bprime", ctx.g_cyclic_for_Bprime);
  Json& s = rb.stage("context", tol, {{"covariance", ctx.covariance_residual}}, checks);
  s["g_cyclic_for_Bprime"] = ctx.g_cyclic_for_Bprime;
  s["f_rank"] = ctx.f_rank;
  s["g_rank"] = ctx.g_rank;
  s["F_dim"] = ctx.a_alg.ambient_dim();
  s["G_dim"] = ctx.b_alg.ambient_dim();
}

// Raises the first failed standing hypothesis, naming it.
inline void require_hypotheses(const DualityContext& ctx, bool need_g) {
  if (!ctx.covariant) {
    throw Error(ErrorKind::NotCovariant, "phi_f != phi_g o S (covariance residual reported)",
                ctx.covariance_residual);
  }
  if (!ctx.f_cyclic_for_A) throw Error(ErrorKind::NotCyclic, "f not cyclic for A");
  if (need_g && !ctx.g_cyclic_for_Bprime) throw Error(ErrorKind::NotCyclic, "g not cyclic for B'");
}

inline Json& dual_stage(ReportBuilder& rb, const DualMap& d, double tol) {
  Json& s = rb.stage("dual", tol,
                     {{"consistency", d.consistency},
                      {"isometry", d.isometry},
                      {"intertwining", d.intertwining},
                      {"membership", d.membership},
                      {"pairing", d.pairing},
                      {"state_transport", d.state},
                      {"gns_identity", d.gns_identity}},
                     {{"dual_is_cp", d.map.is_cp}, {"dual_is_unital", d.map.is_unital}});
  s["H_dim"] = d.gns->h_dim;
  s["dual_map"] = instance_json(d.map);
  return s;
}

inline void dilation_stage(ReportBuilder& rb, const std::string& name, const WeakTensorDilation& d, double tol) {
  const DilationCertificate& c = d.certificate;
  Json& s = rb.stage(name, tol,
                     {{"multiplicativity", c.multiplicativity},
                      {"adjoint", c.adjoint},
                      {"membership", c.membership},
                      {"expectation", c.expectation},
                      {"projection", c.projection}});
  s["K_dim"] = d.k_dim;
  s["state"] = io::vector_to_json(d.state);
}

inline void extension_stage(ReportBuilder& rb, const Extension& e, double tol) {
  const ExtensionCertificate& c = e.certificate;
  Json& s = rb.stage("extension", tol,
                     {{"consistency", c.consistency},
                      {"isometry", c.isometry},
                      {"restriction", c.restriction},
                      {"covariance", c.covariance},
                      {"unital", c.unital},
                      {"choi_negativity", -c.choi_min}},
                     {{"is_cp", e.z.is_cp}, {"is_unital", e.z.is_unital}});
  s["L_dim"] = e.l_dim();
  s["ell"] = io::vector_to_json(e.ell);
  s["Z"] = instance_json(e.z);
}

inline std::optional<std::vector<ModuleElementSpec>> seed_of(const io::Instance& inst, const Options& opts) {
  if (opts.no_seed) return std::nullopt;
  std::optional<std::string> name = opts.seed_qons ? opts.seed_qons : inst.pipeline.seed;
  if (!name) return std::nullopt;
  return io::seed_from_json(inst.map(), io::lookup(inst.seeds, *name, "seed"));
}

inline Outcome run(const std::string& command, const std::function<void(ReportBuilder&)>& body) {
  ReportBuilder rb(command);
  try {
    body(rb);
  } catch (const Error& e) {
    return rb.fail(e);
  } catch (const nlohmann::json::exception& e) {
    return rb.fail(Error(ErrorKind::Parse, e.what()));
  }
  return rb.finish();
}

}  // namespace detail

inline Outcome cmd_dilate(const Options& opts) {
  return detail::run("dilate", [&](ReportBuilder& rb) {
    Stopwatch sw;
    const io::Instance inst = detail::load(opts, false);
    const double base = opts.tol.value_or(kBaseTol);
    const CPMap& s = inst.map();
    const auto seed = detail::seed_of(inst, opts);
    rb.timing("load", sw.lap_ms());

    const WeakTensorDilation d = weak_tensor_dilation(s, seed);
    rb.timing("dilate", sw.lap_ms());

    const GNSResiduals g = gns_residuals(*d.gns);
    Json& gs = rb.stage("gns", inst.tolerance("gns", base),
                        {{"rho_homomorphism", g.rho_homomorphism},
                         {"rho_prime_homomorphism", g.rho_prime_homomorphism},
                         {"commutation", g.commutation},
                         {"stinespring", g.stinespring}});
    gs["H_dim"] = d.gns->h_dim;
    gs["cyclic_rank"] = g.cyclic_rank;

    Json& qs = rb.stage("qons", inst.tolerance("qons", base),
                        {{"relations", qons_relation_residual(*d.gns, d.qons->elements)},
                         {"completeness", d.qons->completeness_residual}});
    qs["seeded"] = seed.has_value();
    Json projections = Json::array();
    for (const auto& e : d.qons->elements) projections.push_back(io::element_to_json(e.p));
    qs["projections"] = std::move(projections);

    detail::dilation_stage(rb, "dilation", d, inst.tolerance("dilation", base));
    rb.timing("verify", sw.lap_ms());

    Json& out = rb.data();
    out["instance"] = detail::instance_json(s);
    out["K_dim"] = d.k_dim;
    out["k0_index"] = 0;
    out["state"] = io::vector_to_json(d.state);
    Json p_blocks = Json::array();
    for (const auto& b : project_tensor_k(s.target, d.k_dim, d.p_I).blocks) p_blocks.push_back(io::element_to_json(b));
    out["p_I_blocks"] = std::move(p_blocks);
    Json j = Json::array();
    for (const auto& m : d.j) j.push_back(io::matrix_to_json(m));
    out["j"] = std::move(j);
  });
}

/// Re-verifies a dilate report from its own contents.
inline Outcome cmd_verify(const Options& opts) {
  return detail::run("verify", [&](ReportBuilder& rb) {
    if (!opts.input) throw Error(ErrorKind::Parse, "verify needs --input REPORT");
    const Json r = io::read_json_file(*opts.input);
    for (const char* key : {"instance", "K_dim", "state", "j"}) {
      if (!r.contains(key)) throw Error(ErrorKind::Parse, std::string("report lacks \"") + key + "\"");
    }
    const Json& ij = r["instance"];
    const MatrixBlockAlgebra a = io::algebra_from_json(ij["source"]);
    const MatrixBlockAlgebra b = io::algebra_from_json(ij["target"]);
    CPMap s = make_cpmap(a, b, io::matrix_from_json(ij["action"]));
    std::vector<ComplexMatrix> j;
    for (const Json& m : r["j"]) j.push_back(io::matrix_from_json(m));
    const WeakTensorDilation d =
        make_dilation(std::move(s), r["K_dim"].get<Eigen::Index>(), io::vector_from_json(r["state"]), std::move(j));
    detail::dilation_stage(rb, "dilation", d, opts.tol.value_or(kBaseTol));
  });
}

inline Outcome cmd_dual(const Options& opts) {
  return detail::run("dual", [&](ReportBuilder& rb) {
    Stopwatch sw;
    const io::Instance inst = detail::load(opts, true);
    const double base = opts.tol.value_or(kBaseTol);
    const double tol = inst.tolerance("dual", base);
    const DualityContext ctx = detail::context_of(inst, inst.tolerance("context", base));
    detail::context_stage(rb, ctx, inst.tolerance("context", base), false);
    detail::require_hypotheses(ctx, false);
    const DualMap d = dual_map(ctx, tol);
    rb.timing("dual", sw.lap_ms());
    Json& ds = detail::dual_stage(rb, d, tol);
    if (d.map.source.blocks() == ctx.a_alg.blocks() && d.map.target.blocks() == ctx.b_alg.blocks()) {
      ds["distance_to_S"] = (d.map.action - ctx.map.action).norm();
    }
    if (ctx.g_cyclic_for_Bprime) {
      const DoubleDual dd = double_dual(ctx, tol);
      rb.stage("double_dual", inst.tolerance("double_dual", base), {{"S_double_prime_vs_S", dd.residual}});
      rb.timing("double_dual", sw.lap_ms());
    } else {
      rb.note("double dual skipped: g not cyclic for B'");
    }
  });
}

inline Outcome cmd_extend(const Options& opts) {
  return detail::run("extend", [&](ReportBuilder& rb) {
    Stopwatch sw;
    const io::Instance inst = detail::load(opts, true);
    const double base = opts.tol.value_or(kBaseTol);
    const DualityContext ctx = detail::context_of(inst, inst.tolerance("context", base));
    detail::context_stage(rb, ctx, inst.tolerance("context", base), true);
    detail::require_hypotheses(ctx, true);
    const ExtensionPipeline p = extend_cp_map_pipeline(ctx, inst.tolerance("extension", base));
    rb.timing("extend", sw.lap_ms());
    detail::dual_stage(rb, p.dual, inst.tolerance("dual", base));
    detail::dilation_stage(rb, "dual_dilation", p.dual_dilation, inst.tolerance("dilation", base));
    detail::extension_stage(rb, p.extension, inst.tolerance("extension", base));
  });
}

inline Outcome cmd_roundtrip(const Options& opts) {
  return detail::run("roundtrip", [&](ReportBuilder& rb) {
    Stopwatch sw;
    const io::Instance inst = detail::load(opts, true);
    const double base = opts.tol.value_or(kBaseTol);
    const double tol = inst.tolerance("roundtrip", base);
    const DualityContext ctx = detail::context_of(inst, inst.tolerance("context", base));
    detail::context_stage(rb, ctx, inst.tolerance("context", base), true);
    detail::require_hypotheses(ctx, true);
    const ExtensionPipeline p = extend_cp_map_pipeline(ctx, inst.tolerance("extension", base));
    detail::extension_stage(rb, p.extension, inst.tolerance("extension", base));
    rb.timing("extend", sw.lap_ms());

    const ExtensionRoundTrip z = roundtrip_extension(ctx, p.extension.z, tol);
    Json& zs = rb.stage("extension_roundtrip", tol,
                        {{"choi_distance", z.choi_distance},
                         {"rho_prime_consistency", z.recovered.consistency},
                         {"membership", z.recovered.membership},
                         {"state", z.recovered.state},
                         {"dilation_certificate", z.recovered.dilation.certificate.max()}});
    zs["H_dim"] = z.recovered.h_dim;
    zs["L_dim"] = z.recovered.dilation.k_dim;

    const DilationRoundTrip d = roundtrip_dilation(ctx, p.dual_dilation, tol);
    Json& ds = rb.stage("dilation_roundtrip", tol, {{"dual_map", d.dual_residual}},
                        {{"minimal", is_minimal_dilation(p.dual_dilation)}, {"L_dim_match", d.l_dim_match}});
    ds["L_dim"] = p.dual_dilation.k_dim;
    ds["recovered_L_dim"] = d.recovered.dilation.k_dim;
    ds["choi_rank"] = d.choi_rank;
    rb.timing("roundtrip", sw.lap_ms());
  });
}

/// The averaging map on the diagonal algebra C^2 end to end.
inline Outcome cmd_paper_example(const Options& opts) {
  return detail::run("paper-example", [&](ReportBuilder& rb) {
    Stopwatch sw;
    const double tol = opts.tol.value_or(kExampleTol);
    const CPMap s = averaging::map();
    const auto seed = opts.no_seed ? std::nullopt : std::optional(averaging::seed());
    const WeakTensorDilation d = weak_tensor_dilation(s, seed);
    const GNSData& g = *d.gns;

    // <x, y> = p_1 S(x_1* y_1) + p_2 S(x_2* y_2) for x = x_1 (x) p_1 + x_2 (x) p_2.
    const AlgebraElement p1 = averaging::diag(1.0, 0.0);
    const AlgebraElement p2 = averaging::diag(0.0, 1.0);
    const AlgebraElement x1 = averaging::diag({1.0, 2.0}, {-0.5, 0.25});
    const AlgebraElement x2 = averaging::diag({0.0, -1.0}, {3.0, 0.5});
    const AlgebraElement y1 = averaging::diag({2.0, 0.0}, {1.0, -1.0});
    const AlgebraElement y2 = averaging::diag({-1.5, 0.5}, {0.0, 2.0});
    const ComplexMatrix x = g.element(x1, p1) + g.element(x2, p2);
    const ComplexMatrix y = g.element(y1, p1) + g.element(y2, p2);
    const AlgebraElement lhs = inner_product(g, x, y);
    const AlgebraElement rhs = p1 * apply(s, x1.adjoint() * y1) + p2 * apply(s, x2.adjoint() * y2);
    Json& gs = rb.stage("gns", tol, {{"inner_product_formula", (lhs - rhs).coordinates().norm()}},
                        {{"H_dim_is_4", g.h_dim == 4}});
    gs["H_dim"] = g.h_dim;

    const double relations = qons_relation_residual(g, d.qons->elements);
    std::vector<std::pair<std::string, double>> q_res = {{"relations", relations},
                                                         {"completeness", d.qons->completeness_residual}};
    if (seed) {
      const std::vector<AlgebraElement> expected_p = {averaging::diag(1.0, 1.0), p1, p2};
      double p_err = d.qons->elements.size() == 3 ? 0.0 : 1.0;
      for (std::size_t i = 0; i < std::min<std::size_t>(3, d.qons->elements.size()); ++i) {
        p_err = std::max(p_err, (d.qons->elements[i].p - expected_p[i]).coordinates().norm());
      }
      q_res.emplace_back("projections", p_err);
      q_res.emplace_back("p_I", d.p_I.rows() == 6 ? residual(d.p_I, averaging::expected_p_I()) : 1.0);
    }
    Json& qs = rb.stage("qons", tol, q_res);
    qs["K_dim"] = d.k_dim;

    if (seed) {
      double j_err = 0.0;
      double j10_err = 0.0;
      for (Eigen::Index k = 0; k < 2; ++k) {
        const Complex a1 = k == 0 ? 1.0 : 0.0;
        const Complex a2 = k == 0 ? 0.0 : 1.0;
        const ComplexMatrix& jk = d.j[static_cast<std::size_t>(k)];
        j_err = std::max(j_err, (jk - averaging::expected_j(a1, a2)).cwiseAbs().maxCoeff());
        const ComplexMatrix want10 = 0.5 * (a1 - a2) * represent(p1);
        j10_err = std::max(j10_err, (jk.block(2, 0, 2, 2) - want10).cwiseAbs().maxCoeff());
      }
      rb.stage("j_matrix", tol, {{"entrywise", j_err}, {"j10", j10_err}});
    } else {
      rb.note("matrix equality skipped: no seed, the QONS differs from the displayed one");
    }
    detail::dilation_stage(rb, "dilation", d, tol);
    rb.timing("dilation", sw.lap_ms());

    const DualityContext ctx = averaging::context();
    const DualMap dual = dual_map(ctx);
    const DoubleDual dd = double_dual(ctx);
    rb.stage("dual", tol,
             {{"S_prime_vs_S", (dual.map.action - s.action).norm()},
              {"pairing", dual.pairing},
              {"S_double_prime_vs_S", dd.residual}});
    rb.timing("dual", sw.lap_ms());
  });
}

}  // namespace wtdil::cli

#endif  // WTDIL_TOOLS_CLI_HPP

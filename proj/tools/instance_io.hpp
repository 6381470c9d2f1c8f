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

// Instance files and reports.
//
// Complex numbers are [re, im] pairs (a bare number is read as real). Matrices
// are arrays of rows. Algebra elements are arrays of blocks, each block a
// row-major flat array. Reports are written with a fixed key order and
// doubles printed as %.17g, so identical input gives identical bytes.

#ifndef WTDIL_TOOLS_INSTANCE_IO_HPP
#define WTDIL_TOOLS_INSTANCE_IO_HPP

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "wtdil/duality.hpp"

namespace wtdil::io {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

[[noreturn]] inline void parse_error(const std::string& what) { throw Error(ErrorKind::Parse, what); }

inline Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  parse_error("expected a number or an [re, im] pair, got " + j.dump());
}

inline Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline ComplexVector vector_from_json(const Json& j) {
  if (!j.is_array()) parse_error("expected an array of complex numbers");
  ComplexVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
  return v;
}

inline Json vector_to_json(const ComplexVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

inline ComplexMatrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) parse_error("expected a non-empty array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].size();
  ComplexMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) parse_error("matrix rows have unequal length");
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = complex_from_json(j[r][c]);
    }
  }
  return m;
}

inline Json matrix_to_json(const ComplexMatrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    out.push_back(std::move(row));
  }
  return out;
}

inline MatrixBlockAlgebra algebra_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("blocks") || !j["blocks"].is_array()) {
    parse_error("algebra needs a \"blocks\" array");
  }
  std::vector<Block> blocks;
  for (const Json& b : j["blocks"]) {
    if (!b.contains("dim") || !b["dim"].is_number_integer()) parse_error("block needs an integer \"dim\"");
    const Eigen::Index mult = b.contains("mult") ? b["mult"].get<Eigen::Index>() : 1;
    blocks.push_back({b["dim"].get<Eigen::Index>(), mult});
  }
  return make_algebra(std::move(blocks));
}

inline Json algebra_to_json(const MatrixBlockAlgebra& alg) {
  Json blocks = Json::array();
  for (const Block& b : alg.blocks()) blocks.push_back(Json{{"dim", b.dim}, {"mult", b.mult}});
  return Json{{"blocks", std::move(blocks)}};
}

inline AlgebraElement element_from_json(const MatrixBlockAlgebra& alg, const Json& j) {
  if (!j.is_array() || j.size() != alg.num_blocks()) {
    parse_error("element needs one entry per block (" + std::to_string(alg.num_blocks()) + ")");
  }
  AlgebraElement x(alg);
  for (std::size_t i = 0; i < alg.num_blocks(); ++i) {
    const Eigen::Index d = alg.blocks()[i].dim;
    const ComplexVector flat = vector_from_json(j[i]);
    if (flat.size() != d * d) parse_error("element block " + std::to_string(i) + " needs dim^2 entries");
    for (Eigen::Index r = 0; r < d; ++r)
      for (Eigen::Index c = 0; c < d; ++c) x.block(i)(r, c) = flat(r * d + c);
  }
  return x;
}

inline Json element_to_json(const AlgebraElement& x) {
  Json out = Json::array();
  for (const ComplexMatrix& b : x.blocks()) {
    const ComplexMatrix t = b.transpose();  // column-major storage of b^T is row-major b
    out.push_back(vector_to_json(Eigen::Map<const ComplexVector>(t.data(), t.size())));
  }
  return out;
}

struct Pipeline {
  std::string map;
  std::optional<std::string> f;
  std::optional<std::string> g;
  std::optional<std::string> seed;
};

struct Instance {
  std::map<std::string, MatrixBlockAlgebra> algebras;
  std::map<std::string, ComplexVector> states;
  std::map<std::string, CPMap> cp_maps;
  std::map<std::string, Json> seeds;  // resolved against a GNS module later
  Pipeline pipeline;
  std::map<std::string, double> tolerances;

  const CPMap& map() const { return cp_maps.at(pipeline.map); }

  double tolerance(const std::string& stage, double fallback) const {
    auto it = tolerances.find(stage);
    return it == tolerances.end() ? fallback : it->second;
  }
};

template <typename T>
const T& lookup(const std::map<std::string, T>& table, const std::string& name, const char* what) {
  auto it = table.find(name);
  if (it == table.end()) parse_error(std::string("unknown ") + what + " \"" + name + "\"");
  return it->second;
}

/// Seed elements sum rho(a) xi b over the listed terms.
inline std::vector<ModuleElementSpec> seed_from_json(const CPMap& s, const Json& j) {
  if (!j.is_array()) parse_error("seed must be an array of module elements");
  std::vector<ModuleElementSpec> out;
  for (const Json& element : j) {
    if (!element.is_array()) parse_error("module element must be an array of {a, b} terms");
    ModuleElementSpec spec;
    for (const Json& term : element) {
      if (!term.contains("a") || !term.contains("b")) parse_error("module term needs \"a\" and \"b\"");
      spec.push_back({element_from_json(s.source, term["a"]), element_from_json(s.target, term["b"])});
    }
    out.push_back(std::move(spec));
  }
  return out;
}

inline Instance instance_from_json(const Json& j) {
  if (!j.is_object()) parse_error("instance must be a JSON object");
  if (!j.contains("schema") || j["schema"] != kSchemaVersion) {
    parse_error("unsupported or missing \"schema\" (expected " + std::to_string(kSchemaVersion) + ")");
  }
  Instance inst;
  if (j.contains("algebras")) {
    for (const auto& [name, a] : j["algebras"].items()) inst.algebras.emplace(name, algebra_from_json(a));
  }
  if (j.contains("states")) {
    for (const auto& [name, v] : j["states"].items()) inst.states.emplace(name, vector_from_json(v));
  }
  if (j.contains("cp_maps")) {
    for (const auto& [name, m] : j["cp_maps"].items()) {
      if (!m.contains("from") || !m.contains("to") || !m.contains("action")) {
        parse_error("cp map \"" + name + "\" needs \"from\", \"to\" and \"action\"");
      }
      const MatrixBlockAlgebra& src = lookup(inst.algebras, m["from"].get<std::string>(), "algebra");
      const MatrixBlockAlgebra& dst = lookup(inst.algebras, m["to"].get<std::string>(), "algebra");
      inst.cp_maps.emplace(name, make_cpmap(src, dst, matrix_from_json(m["action"])));
    }
  }
  if (j.contains("seeds")) {
    for (const auto& [name, s] : j["seeds"].items()) inst.seeds.emplace(name, s);
  }
  if (!j.contains("pipeline") || !j["pipeline"].contains("map")) parse_error("instance needs pipeline.map");
  const Json& p = j["pipeline"];
  inst.pipeline.map = p["map"].get<std::string>();
  lookup(inst.cp_maps, inst.pipeline.map, "cp map");
  for (const char* key : {"f", "g", "seed"}) {
    if (!p.contains(key) || p[key].is_null()) continue;
    const std::string name = p[key].get<std::string>();
    if (std::string(key) == "seed") {
      lookup(inst.seeds, name, "seed");
      inst.pipeline.seed = name;
    } else {
      lookup(inst.states, name, "state");
      (std::string(key) == "f" ? inst.pipeline.f : inst.pipeline.g) = name;
    }
  }
  if (j.contains("tolerances")) {
    for (const auto& [stage, t] : j["tolerances"].items()) inst.tolerances[stage] = t.get<double>();
  }
  return inst;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) parse_error("cannot open \"" + path + "\"");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    parse_error("\"" + path + "\": " + e.what());
  }
}

namespace detail {

inline void write_string(std::ostream& os, const std::string& s) {
  os << Json(s).dump();
}

inline void write_number(std::ostream& os, const Json& j) {
  if (j.is_number_integer()) {
    os << j.dump();
    return;
  }
  const double x = j.get<double>();
  if (!std::isfinite(x)) {
    os << "null";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  os << buf;
}

inline bool is_flat(const Json& j) {
  for (const Json& x : j)
    if (x.is_object() || (x.is_array() && !(x.size() == 2 && x[0].is_number()))) return false;
  return true;
}

inline void write(std::ostream& os, const Json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  if (j.is_object()) {
    if (j.empty()) {
      os << "{}";
      return;
    }
    os << "{\n";
    bool first = true;
    for (const auto& [k, v] : j.items()) {
      if (!first) os << ",\n";
      first = false;
      os << inner;
      write_string(os, k);
      os << ": ";
      write(os, v, indent + 1);
    }
    os << "\n" << pad << "}";
  } else if (j.is_array()) {
    if (j.empty()) {
      os << "[]";
      return;
    }
    // Rows of numbers or [re, im] pairs stay on one line.
    if (is_flat(j)) {
      os << "[";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ", ";
        write(os, j[i], indent + 1);
      }
      os << "]";
      return;
    }
    os << "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i) os << ",\n";
      os << inner;
      write(os, j[i], indent + 1);
    }
    os << "\n" << pad << "]";
  } else if (j.is_number()) {
    write_number(os, j);
  } else if (j.is_string()) {
    write_string(os, j.get<std::string>());
  } else {
    os << j.dump();
  }
}

}  // namespace detail

/// Deterministic serialization: insertion-ordered keys, %.17g doubles.
inline std::string dump(const Json& j) {
  std::ostringstream os;
  detail::write(os, j, 0);
  os << "\n";
  return os.str();
}

}  // namespace wtdil::io

#endif  // WTDIL_TOOLS_INSTANCE_IO_HPP

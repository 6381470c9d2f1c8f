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

#ifndef WTDIL_ERROR_HPP
#define WTDIL_ERROR_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wtdil {

enum class ErrorKind {
  NonHermitian,
  NonFinite,
  NotPSD,
  ShapeMismatch,
  DimensionCap,
  NotInAlgebra,
  NotHermitianPreserving,
  AlgebraMismatch,
  NotFullAlgebra,
  NotCP,
  NotUnital,
  NotInTargetAlgebra,
  BadSeed,
  IncompleteQONS,
  NotCovariant,
  NotCyclic,
  InconsistentSystem,
  NotInCommutant,
  StateMismatch,
  NotExtension,
  Parse,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonHermitian: return "NonHermitian";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::DimensionCap: return "DimensionCap";
    case ErrorKind::NotInAlgebra: return "NotInAlgebra";
    case ErrorKind::NotHermitianPreserving: return "NotHermitianPreserving";
    case ErrorKind::AlgebraMismatch: return "AlgebraMismatch";
    case ErrorKind::NotFullAlgebra: return "NotFullAlgebra";
    case ErrorKind::NotCP: return "NotCP";
    case ErrorKind::NotUnital: return "NotUnital";
    case ErrorKind::NotInTargetAlgebra: return "NotInTargetAlgebra";
    case ErrorKind::BadSeed: return "BadSeed";
    case ErrorKind::IncompleteQONS: return "IncompleteQONS";
    case ErrorKind::NotCovariant: return "NotCovariant";
    case ErrorKind::NotCyclic: return "NotCyclic";
    case ErrorKind::InconsistentSystem: return "InconsistentSystem";
    case ErrorKind::NotInCommutant: return "NotInCommutant";
    case ErrorKind::StateMismatch: return "StateMismatch";
    case ErrorKind::NotExtension: return "NotExtension";
    case ErrorKind::Parse: return "Parse";
  }
  return "Unknown";
}

// Every failure in the library is reported through this type. Numerical
// failures carry the offending residual when one exists.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what,
        std::optional<double> residual = std::nullopt)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind),
        residual_(residual) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<double> residual() const noexcept { return residual_; }

 private:
  ErrorKind kind_;
  std::optional<double> residual_;
};

}  // namespace wtdil

#endif  // WTDIL_ERROR_HPP

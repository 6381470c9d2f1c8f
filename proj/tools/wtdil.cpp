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

// wtdil: build and verify weak tensor dilations, dual maps and extensions.
//
//   wtdil dilate --input data/averaging.json --json
//   wtdil paper-example
//   wtdil roundtrip --random --dims 3 --seed 7

#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "cli.hpp"

namespace {

using wtdil::cli::Options;
using wtdil::cli::Outcome;

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--input", o.input, "Instance file (JSON, schema 1)");
  cmd->add_option("--output", o.output, "Write the JSON report to this path");
  cmd->add_option("--tol", o.tol, "Base verification tolerance");
  cmd->add_flag("--json", o.json, "Print the JSON report instead of a summary");
}

void add_random(CLI::App* cmd, Options& o) {
  cmd->add_flag("--random", o.random, "Use a random instance instead of --input");
  cmd->add_option("--dims", o.dims, "Largest ambient dimension for --random")->check(CLI::Range(1, 16));
  cmd->add_option("--seed", o.seed, "Random seed for --random");
}

void print_summary(const std::string& command, const Outcome& out) {
  const auto& r = out.report;
  for (const auto& s : r["stages"]) {
    std::printf("%-22s %s  max residual %.3e  (tol %.1e)\n", s["name"].get<std::string>().c_str(),
                s["pass"].get<bool>() ? "PASS" : "FAIL", s["max_residual"].get<double>(),
                s["tolerance"].get<double>());
  }
  if (r.contains("notes")) {
    for (const auto& n : r["notes"]) std::printf("note: %s\n", n.get<std::string>().c_str());
  }
  if (r.contains("error")) {
    std::printf("error: %s\n", r["error"]["message"].get<std::string>().c_str());
  }
  std::printf("%s %s: largest residual %.6e at %s\n", command.c_str(), r["pass"].get<bool>() ? "PASS" : "FAIL",
              r["max_residual"].get<double>(), r["max_residual_at"].get<std::string>().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weak tensor dilations of CP maps and covariant extensions"};
  app.require_subcommand(1);
  Options o;

  auto* dilate = app.add_subcommand("dilate", "Construct and verify a weak tensor dilation");
  add_common(dilate, o);
  add_random(dilate, o);
  dilate->add_option("--seed-qons", o.seed_qons, "Named QONS seed from the instance file");
  dilate->add_flag("--no-seed", o.no_seed, "Ignore any seed named in the instance");

  auto* dual = app.add_subcommand("dual", "Dual map S' and double dual");
  add_common(dual, o);
  add_random(dual, o);

  auto* extend = app.add_subcommand("extend", "Covariant extension Z of S to B(F) -> B(G)");
  add_common(extend, o);
  add_random(extend, o);

  auto* roundtrip = app.add_subcommand("roundtrip", "Round trips between extensions and dilations");
  add_common(roundtrip, o);
  add_random(roundtrip, o);

  auto* paper = app.add_subcommand("paper-example", "Built-in averaging map on C^2");
  add_common(paper, o);
  paper->add_flag("--no-seed", o.no_seed, "Use the default QONS instead of the three-element seed");

  auto* verify = app.add_subcommand("verify", "Re-verify a dilate report");
  add_common(verify, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : wtdil::cli::kExitInput;
  }

  Outcome out;
  std::string name;
  if (*dilate) {
    name = "dilate";
    out = wtdil::cli::cmd_dilate(o);
  } else if (*dual) {
    name = "dual";
    out = wtdil::cli::cmd_dual(o);
  } else if (*extend) {
    name = "extend";
    out = wtdil::cli::cmd_extend(o);
  } else if (*roundtrip) {
    name = "roundtrip";
    out = wtdil::cli::cmd_roundtrip(o);
  } else if (*paper) {
    name = "paper-example";
    out = wtdil::cli::cmd_paper_example(o);
  } else {
    name = "verify";
    out = wtdil::cli::cmd_verify(o);
  }

  const std::string text = wtdil::io::dump(out.report);
  if (o.output) {
    std::ofstream f(*o.output, std::ios::binary);
    if (!f || !(f << text)) {
      std::fprintf(stderr, "cannot write %s\n", o.output->c_str());
      return wtdil::cli::kExitInput;
    }
  }
  if (o.json) {
    std::fwrite(text.data(), 1, text.size(), stdout);
  } else {
    print_summary(name, out);
    for (const auto& t : out.timings) std::fprintf(stderr, "time %s\n", t.c_str());
  }
  return out.exit_code;
}

/*
 * Copyright (c) 2026, The chanrace Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
*/

#include <doctest.h>

#include <json.hpp>
#include <sstream>

#include "chanrace/cli.hh"
#include "chanrace/diagram.hh"
#include "support/gen.hh"

using namespace chanrace;
using chanrace::testing::data_path;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("verify exit codes") {
  auto ok = run({"verify", "--protocol", data_path("guarded.gp"), "--program",
                 data_path("verified.go")});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("verdict: success") != std::string::npos);

  auto bad = run({"verify", "--protocol", data_path("guarded.gp"), "--program",
                  data_path("failed.go")});
  CHECK(bad.code == 1);
  CHECK(bad.out.find("`e <- 0`") != std::string::npos);
  CHECK(bad.out.find("fail_precondition") != std::string::npos);

  CHECK(run({"verify", "--protocol", data_path("guarded.gp")}).code == 2);
  CHECK(run({"verify", "--protocol", data_path("nope.gp"), "--program",
             data_path("verified.go")}).code == 2);
  CHECK(run({"bogus"}).code == 2);
}

TEST_CASE("verify json report") {
  auto r = run({"verify", "--protocol", data_path("guarded.gp"), "--program",
                data_path("failed.go"), "--output", "json", "--trace"});
  REQUIRE(r.code == 1);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["verdict"] == "failure");
  CHECK(j["parties"][0]["outcome"] == "fail_precondition");
  CHECK(j["parties"][0]["failure"]["statement"] == "e <- 0");
  CHECK(j["parties"][1]["residue"] == "c: !B.2 || d: guard(B.2) || e: !B.1.2");
  CHECK(j["channel_binding"]["~g2"] == "e");
}

TEST_CASE("transform, project, count and simulate") {
  auto t = run({"transform", "--protocol", data_path("racy.gp")});
  CHECK(t.code == 0);
  CHECK(t.out.find("A -c-> B ; [A.1 < B.2] ; [B.1 < C.2] ; B -c-> C\n") != std::string::npos);
  auto cyc = run({"transform", "--protocol", data_path("guarded_cycle.gp")});
  CHECK(cyc.code == 1);
  CHECK(cyc.out.find("deadlock") != std::string::npos);

  auto p = run({"project", "--protocol", data_path("guarded.gp"), "--party", "A",
                "--endpoint", "~g1"});
  CHECK(p.code == 0);
  CHECK(p.out == "A/~g1: guard(A.1) ; !A.1.1\n");
  CHECK(run({"project", "--protocol", data_path("guarded.gp"), "--party", "Q"}).code == 2);

  auto c = run({"count", "--n", "4"});
  CHECK(c.code == 0);
  CHECK(c.out.find("4 → 1657") != std::string::npos);

  auto s = run({"simulate", "--protocol", data_path("racy.gp")});
  CHECK(s.code == 1);
  CHECK(s.out.find("executions: 2, racy: 1") != std::string::npos);
  CHECK(run({"simulate", "--protocol", data_path("guarded.gp")}).code == 0);
  CHECK(run({"simulate", "--protocol", data_path("racy.gp"), "--bound", "2"}).code == 2);
  auto prog = run({"simulate", "--protocol", data_path("guarded.gp"), "--program",
                   data_path("verified.go")});
  CHECK(prog.code == 0);
}

TEST_CASE("output is deterministic") {
  std::vector<std::string> args{"simulate", "--protocol", data_path("three_senders.gp"),
                                "--output", "json"};
  CHECK(run(args).out == run(args).out);
}

TEST_CASE("protocol diagrams") {
  std::string dot = render_protocol_diagram(load_protocol("A -c-> B ; B -c-> C"), Dialect::kDot);
  CHECK(dot.find("\"A.1\" -> \"B.1\" [style=dotted, label=\"c\"];") != std::string::npos);
  CHECK(dot.find("\"B.2\" -> \"C.2\" [style=dotted, label=\"c\"];") != std::string::npos);
  CHECK(dot.find("\"B.1\" -> \"B.2\";") != std::string::npos);
  CHECK(dot.find("label=\"A\"") < dot.find("label=\"B\""));
  CHECK(dot.find("label=\"B\"") < dot.find("label=\"C\""));

  std::string empty = render_protocol_diagram(load_protocol("emp"), Dialect::kDot);
  CHECK(empty.find("->") == std::string::npos);

  std::string mm = render_protocol_diagram(load_protocol("A -c-> B"), Dialect::kMermaid);
  CHECK(mm.find("n_A_1 -.->|c| n_B_1") != std::string::npos);
  CHECK_THROWS_AS(parse_dialect("svg"), InputError);
}

TEST_CASE("trace diagrams") {
  auto r = run({"render", "--trace", data_path("racy_exec.trace")});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("\"A.1\" -> \"C.2\";") != std::string::npos);
  CHECK(r.out.find("\"A.1\" -> \"C.2\" [style=dotted, label=\"c\"];") != std::string::npos);
  CHECK(r.out.find("style=dashed") != std::string::npos);
  CHECK(run({"render", "--trace", data_path("racy_exec.trace"), "--format", "svg"}).code == 2);
}

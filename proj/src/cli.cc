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

#include "chanrace/cli.hh"

#include <CLI11.hpp>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "chanrace/diagram.hh"
#include "chanrace/exec_oracle.hh"
#include "chanrace/projection.hh"
#include "chanrace/transform.hh"
#include "chanrace/verifier.hh"

namespace chanrace {

namespace {

using Json = nlohmann::ordered_json;

struct RunConfig {
  std::string protocol_path;
  std::string program_path;
  std::string trace_path;
  std::vector<std::string> binds;
  std::string party;
  std::string endpoint;
  std::string strategy = "on-demand";
  std::string output = "text";
  std::string dialect = "dot";
  std::size_t bound = 10;
  unsigned any_capacity = 1;
  int n = 4;
  bool brute_force = false;
  bool show_trace = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

GlobalProtocol read_protocol(const RunConfig& cfg) {
  if (cfg.protocol_path.empty()) throw InputError("--protocol is required");
  try {
    return load_protocol(read_file(cfg.protocol_path));
  } catch (const InputError& e) {
    throw InputError(cfg.protocol_path + ":" + e.what());
  }
}

Program read_program(const RunConfig& cfg) {
  if (cfg.program_path.empty()) throw InputError("--program is required");
  return parse_program(read_file(cfg.program_path), cfg.program_path);
}

Bindings read_bindings(const RunConfig& cfg) {
  Bindings b;
  for (const auto& s : cfg.binds) b.add(s);
  return b;
}

std::string loc_text(const Program& prog, const std::optional<SourceLoc>& loc) {
  return loc ? prog.where(*loc) : std::string();
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  GlobalProtocol g = read_protocol(cfg);
  Program prog = read_program(cfg);
  VerifyOptions opts;
  opts.bindings = read_bindings(cfg);
  if (cfg.strategy == "eager") {
    opts.strategy = GuardStrategy::kEager;
  } else if (cfg.strategy != "on-demand") {
    throw InputError("unknown guard strategy '" + cfg.strategy + "'");
  }
  GlobalResidue r = verify(prog, g, opts);

  if (cfg.output == "json") {
    Json j;
    j["verdict"] = r.success() ? "success" : "failure";
    Json binding = Json::object();
    for (const auto& [f, c] : r.channel_binding) binding[f] = c;
    j["channel_binding"] = binding;
    Json parties = Json::array();
    for (const auto& p : r.parties) {
      Json jp;
      jp["party"] = p.party.name;
      jp["function"] = p.function;
      jp["outcome"] = to_string(p.outcome);
      if (p.outcome == Outcome::kFailPrecondition) {
        jp["failure"] = {{"location", loc_text(prog, p.failure_loc)},
                         {"statement", p.failure_stmt},
                         {"reason", p.failure_reason}};
      } else if (p.outcome == Outcome::kFailUnconsumed) {
        jp["failure"] = {{"reason", p.failure_reason}};
      }
      jp["residue"] = p.residue.to_string();
      jp["final"] = p.final_assertion.to_string();
      if (cfg.show_trace) {
        Json tr = Json::array();
        for (const auto& s : p.trace) {
          tr.push_back({{"label", s.label},
                        {"location", s.loc.line ? prog.where(s.loc) : ""},
                        {"assertion", s.assertion.to_string()}});
        }
        jp["trace"] = tr;
      }
      parties.push_back(jp);
    }
    j["parties"] = parties;
    out << j.dump(2) << "\n";
  } else {
    if (cfg.show_trace) {
      for (const auto& p : r.parties) {
        out << "# " << p.party.name << " (func " << p.function << ")\n";
        for (const auto& s : p.trace) {
          out << "  " << s.label;
          if (s.loc.line) out << " @" << prog.where(s.loc);
          out << "\n    " << s.assertion.to_string() << "\n";
        }
      }
    }
    out << r.to_string(&prog);
  }
  return r.success() ? kExitOk : kExitViolation;
}

std::string cycle_text(const std::vector<EventPoint>& cyc) {
  std::string s;
  for (const auto& p : cyc) s += p.to_string() + " -> ";
  return s + (cyc.empty() ? "" : cyc.front().to_string());
}

int cmd_transform(const RunConfig& cfg, std::ostream& out) {
  GlobalProtocol g = read_protocol(cfg);
  if (auto cyc = screen_deadlock(g)) {
    if (cfg.output == "json") {
      Json j;
      j["deadlock"] = true;
      Json pts = Json::array();
      for (const auto& p : *cyc) pts.push_back(p.to_string());
      j["cycle"] = pts;
      out << j.dump(2) << "\n";
    } else {
      out << "deadlock: happens-before cycle " << cycle_text(*cyc) << "\n";
    }
    return kExitViolation;
  }
  TransformReport rep = make_race_free(g);
  if (cfg.output == "json") {
    Json j;
    j["input"] = render_protocol(rep.input);
    j["output"] = render_protocol(rep.output);
    Json gs = Json::array();
    for (const auto& ig : rep.inserted_guards) {
      gs.push_back({{"guard", render_leaf(GlobalLeaf{ig.guard})},
                    {"channel", ig.channel},
                    {"after", ig.after.to_string()},
                    {"before", ig.before.to_string()}});
    }
    j["guards"] = gs;
    Json ws = Json::array();
    for (const auto& w : rep.warnings) ws.push_back(w.message);
    j["warnings"] = ws;
    out << j.dump(2) << "\n";
  } else {
    out << rep.to_text();
  }
  return kExitOk;
}

int cmd_project(const RunConfig& cfg, std::ostream& out) {
  GlobalProtocol g = read_protocol(cfg);
  ProjectionContext ctx(g);
  std::vector<PartyId> parties;
  if (cfg.party.empty()) {
    parties = parties_of(g);
  } else {
    auto all = parties_of(g);
    PartyId want{cfg.party};
    if (std::find(all.begin(), all.end(), want) == all.end()) {
      throw InputError("party '" + cfg.party + "' does not occur in the protocol");
    }
    parties.push_back(want);
  }
  Json j = Json::object();
  for (const auto& p : parties) {
    PerPartyProtocol pi = project_party(g, p, ctx);
    auto eps = project_endpoints(pi);
    if (!cfg.endpoint.empty()) {
      auto it = eps.find(cfg.endpoint);
      if (it == eps.end()) {
        throw InputError("party " + p.name + " has no endpoint '" + cfg.endpoint + "'");
      }
      if (cfg.output == "json") {
        j[p.name] = {{cfg.endpoint, render_endpoint(it->second)}};
      } else {
        out << p.name << "/" << cfg.endpoint << ": " << render_endpoint(it->second) << "\n";
      }
      continue;
    }
    if (cfg.output == "json") {
      Json jp;
      jp["party"] = render_party(pi);
      Json je = Json::object();
      for (const auto& [c, z] : eps) je[c] = render_endpoint(z);
      jp["endpoints"] = je;
      j[p.name] = jp;
    } else {
      out << render_projection(p, pi) << "\n";
      for (const auto& [c, z] : eps) out << "  " << c << ": " << render_endpoint(z) << "\n";
    }
  }
  if (cfg.output == "json") out << j.dump(2) << "\n";
  return kExitOk;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  std::optional<GlobalProtocol> g;
  if (!cfg.protocol_path.empty()) g = read_protocol(cfg);
  ExecModel model;
  if (!cfg.program_path.empty()) {
    Program prog = read_program(cfg);
    model = model_of(prog, g ? &*g : nullptr, read_bindings(cfg));
  } else if (g) {
    model = model_of(*g, cfg.any_capacity);
  } else {
    throw InputError("simulate needs --protocol or --program");
  }
  auto execs = enumerate_executions(model, cfg.bound);
  std::size_t racy = 0;
  Json list = Json::array();
  for (std::size_t i = 0; i < execs.size(); ++i) {
    RaceVerdict v = classify_race(execs[i], model.cb);
    if (!v.race_free) ++racy;
    if (cfg.output == "json") {
      Json je;
      Json order = Json::array();
      for (const auto& x : execs[i].order) order.push_back(x.to_string());
      Json blocked = Json::array();
      for (const auto& x : execs[i].blocked) blocked.push_back(x.to_string());
      Json viol = Json::array();
      for (const auto& x : v.violations) viol.push_back(x.to_string());
      je["order"] = order;
      je["blocked"] = blocked;
      je["race_free"] = v.race_free;
      je["violations"] = viol;
      if (v.witness) je["witness"] = v.witness->to_string();
      list.push_back(je);
    } else {
      out << "execution " << i + 1 << ": " << (v.race_free ? "race-free" : "racy")
          << "\n";
      std::istringstream dump(execs[i].dump());
      for (std::string line; std::getline(dump, line);) out << "  " << line << "\n";
      if (v.witness) out << "  witness: " << v.witness->to_string() << "\n";
    }
  }
  if (cfg.output == "json") {
    Json j;
    j["executions"] = list;
    j["total"] = execs.size();
    j["racy"] = racy;
    out << j.dump(2) << "\n";
  } else {
    out << "executions: " << execs.size() << ", racy: " << racy << "\n";
  }
  return racy ? kExitViolation : kExitOk;
}

int cmd_count(const RunConfig& cfg, std::ostream& out) {
  if (cfg.n < 1 || cfg.n > 12) throw InputError("--n must be between 1 and 12");
  Json rows = Json::array();
  for (int n = 1; n <= cfg.n; ++n) {
    auto [total, vec] = count_protocols(n);
    if (cfg.output == "json") {
      Json r{{"n", n}, {"total", total}, {"by_parties", vec.counts}};
      if (cfg.brute_force && n <= 3) r["brute_force"] = brute_force_count(n);
      rows.push_back(r);
    } else {
      out << n << " → " << total << "  " << vec.to_string();
      if (cfg.brute_force && n <= 3) out << "  brute force " << brute_force_count(n);
      out << "\n";
    }
  }
  if (cfg.output == "json") out << rows.dump(2) << "\n";
  return kExitOk;
}

int cmd_render(const RunConfig& cfg, std::ostream& out) {
  Dialect d = parse_dialect(cfg.dialect);
  if (!cfg.protocol_path.empty() == !cfg.trace_path.empty()) {
    throw InputError("render needs exactly one of --protocol or --trace");
  }
  if (!cfg.protocol_path.empty()) {
    out << render_protocol_diagram(read_protocol(cfg), d);
  } else {
    out << render_trace_diagram(parse_trace(read_file(cfg.trace_path)), d);
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Channel-race checker for global protocols and Go programs", "chanrace"};
  app.require_subcommand(1);
  auto output_opt = [&cfg](CLI::App* sub) {
    sub->add_option("--output", cfg.output, "Report format")
        ->check(CLI::IsMember({"text", "json"}));
  };

  auto* verify_cmd = app.add_subcommand("verify", "Verify a program against a protocol");
  verify_cmd->add_option("--protocol", cfg.protocol_path)->required();
  verify_cmd->add_option("--program", cfg.program_path)->required();
  verify_cmd->add_option("--bind", cfg.binds, "Party=function or ~gN=channel");
  verify_cmd->add_option("--strategy", cfg.strategy)
      ->check(CLI::IsMember({"on-demand", "eager"}));
  verify_cmd->add_flag("--trace", cfg.show_trace, "Print intermediate assertions");
  output_opt(verify_cmd);

  auto* transform_cmd = app.add_subcommand("transform", "Insert race-freedom guards");
  transform_cmd->add_option("--protocol", cfg.protocol_path)->required();
  output_opt(transform_cmd);

  auto* project_cmd = app.add_subcommand("project", "Project onto parties and endpoints");
  project_cmd->add_option("--protocol", cfg.protocol_path)->required();
  project_cmd->add_option("--party", cfg.party);
  project_cmd->add_option("--endpoint", cfg.endpoint);
  output_opt(project_cmd);

  auto* simulate_cmd = app.add_subcommand("simulate", "Enumerate sequential executions");
  simulate_cmd->add_option("--protocol", cfg.protocol_path);
  simulate_cmd->add_option("--program", cfg.program_path);
  simulate_cmd->add_option("--bind", cfg.binds);
  simulate_cmd->add_option("--bound", cfg.bound, "Maximum number of events");
  simulate_cmd->add_option("--any-capacity", cfg.any_capacity,
                           "Capacity used for channels declared any");
  output_opt(simulate_cmd);

  auto* count_cmd = app.add_subcommand("count", "Count sequentially composed protocols");
  count_cmd->add_option("--n", cfg.n, "Number of transmissions");
  count_cmd->add_flag("--brute-force", cfg.brute_force);
  output_opt(count_cmd);

  auto* render_cmd = app.add_subcommand("render", "Render a protocol or trace diagram");
  render_cmd->add_option("--protocol", cfg.protocol_path);
  render_cmd->add_option("--trace", cfg.trace_path);
  render_cmd->add_option("--format", cfg.dialect, "dot or mermaid");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (verify_cmd->parsed()) return cmd_verify(cfg, out);
    if (transform_cmd->parsed()) return cmd_transform(cfg, out);
    if (project_cmd->parsed()) return cmd_project(cfg, out);
    if (simulate_cmd->parsed()) return cmd_simulate(cfg, out);
    if (count_cmd->parsed()) return cmd_count(cfg, out);
    if (render_cmd->parsed()) return cmd_render(cfg, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::length_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace chanrace

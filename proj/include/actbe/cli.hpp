#pragma once

// Command-line front end. `run` takes the arguments after the program name
// and returns the exit code: 0 success, 1 a false verdict under --assert (or
// a failed oracle check), 2 usage or validation errors.

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "actbe/analysis.hpp"
#include "actbe/constructors.hpp"
#include "actbe/core_model.hpp"
#include "actbe/dense_oracle.hpp"
#include "actbe/io.hpp"
#include "actbe/protocols.hpp"

namespace actbe::cli {

using Json = nlohmann::ordered_json;

namespace detail {

inline Json party_list(PartySet s) {
  Json arr = Json::array();
  for (int p : s.parties()) arr.push_back(p);
  return arr;
}

inline Json splitting_json(const Splitting& s) {
  return Json{{"mask", s.mask()}, {"label", s.label()}, {"describe", s.describe()}};
}

inline Json report_json(const GroupingReport& r) {
  Json groups = Json::array();
  for (const auto& g : r.grouping.groups()) groups.push_back(party_list(g));
  Json pairs = Json::array();
  for (const auto& p : r.pairs) {
    Json e{{"first", p.first + 1}, {"second", p.second + 1}, {"distillable", p.distillable}};
    e["witness"] = p.witness ? splitting_json(*p.witness) : Json(nullptr);
    pairs.push_back(std::move(e));
  }
  Json ghz = Json::array();
  for (const auto& set : r.ghz_sets) {
    Json members = Json::array();
    for (auto i : set) members.push_back(i + 1);
    ghz.push_back(std::move(members));
  }
  return Json{{"grouping", r.grouping.to_string()}, {"groups", groups}, {"pairs", pairs}, {"ghz_sets", ghz}};
}

inline void print_report(std::ostream& out, const GroupingReport& r) {
  out << r.grouping.to_string() << '\n';
  for (const auto& p : r.pairs) {
    out << "  " << std::setw(3) << p.first + 1 << " " << std::setw(3) << p.second + 1 << "  " << (p.distillable ? "distillable" : "not distillable");
    if (p.witness) out << "  witness " << p.witness->describe();
    out << '\n';
  }
  for (const auto& set : r.ghz_sets) {
    out << "  GHZ set:";
    for (auto i : set) out << ' ' << i + 1;
    out << '\n';
  }
}

inline Json header(const std::string& command) { return Json{{"schema", io::kSchemaVersion}, {"command", command}}; }

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Activation of bound entanglement in GHZ-diagonal family states"};
  app.require_subcommand(1);
  app.fallthrough();
  bool pretty = false;
  app.add_flag("--pretty", pretty, "human-readable output instead of JSON");

  // construct
  auto* construct = app.add_subcommand("construct", "build a family state");
  std::string example, spec_path, output, members;
  int n = 0, j = 0;
  std::vector<double> band;
  double margin = 0.5;
  std::uint64_t seed = 0;
  bool random = false;
  auto* example_opt = construct->add_option("--example", example, "example I..VII");
  auto* spec_opt = construct->add_option("--spec", spec_path, "specification JSON file");
  auto* random_opt = construct->add_flag("--random", random, "seeded random family state");
  construct->add_option("--n", n, "number of parties");
  construct->add_option("--j", j, "size parameter (examples I and IV)");
  construct->add_option("--band", band, "percent band LO HI (example II)")->expected(2);
  construct->add_option("--members", members, "distinguished group, e.g. 1,3,5 (example III)");
  construct->add_option("--margin", margin, "relative distance of separable coefficients from the boundary")->capture_default_str();
  construct->add_option("--seed", seed, "seed for --random");
  construct->add_option("-o,--output", output, "write the state here instead of standard output");
  example_opt->excludes(spec_opt)->excludes(random_opt);
  spec_opt->excludes(random_opt);

  // analyze
  auto* analyze = app.add_subcommand("analyze", "grouping verdicts");
  std::string state_path, grouping_text;
  std::vector<std::size_t> pair;
  bool all_groupings = false, two_groups = false, assert_flag = false;
  int guard = 10;
  analyze->add_option("--state", state_path, "state JSON file")->required()->check(CLI::ExistingFile);
  auto* grouping_opt = analyze->add_option("--grouping", grouping_text, "groups separated by '|', parties by ','");
  analyze->add_option("--pair", pair, "two 1-based group indices")->expected(2);
  auto* all_opt = analyze->add_flag("--all-groupings", all_groupings, "classify every set partition");
  analyze->add_flag("--two-groups", two_groups, "with --all-groupings: only partitions into two groups");
  analyze->add_option("--guard", guard, "refuse --all-groupings above this many parties")->capture_default_str();
  analyze->add_flag("--assert", assert_flag, "exit 1 when any reported verdict is false");
  grouping_opt->excludes(all_opt);

  // protocol
  auto* protocol = app.add_subcommand("protocol", "run the distillation pipeline");
  std::string p_state, p_grouping;
  std::vector<std::size_t> p_pair;
  bool json_trace = false, p_assert = false;
  protocol->add_option("--state", p_state, "state JSON file")->required()->check(CLI::ExistingFile);
  protocol->add_option("--grouping", p_grouping, "groups separated by '|', parties by ','")->required();
  protocol->add_option("--pair", p_pair, "two 1-based group indices")->expected(2)->required();
  protocol->add_flag("--json-trace", json_trace, "include every step in the output");
  protocol->add_flag("--assert", p_assert, "exit 1 when the pipeline does not succeed");

  // verify
  auto* verify = app.add_subcommand("verify", "dense partial-transpose check of every splitting");
  std::string v_state;
  verify->add_option("--state", v_state, "state JSON file")->required()->check(CLI::ExistingFile);

  // search
  auto* search = app.add_subcommand("search", "exhaustive specification search");
  int s_n = 0;
  std::string requirement = "any-two-helpers";
  search->add_option("--n", s_n, "number of parties")->required();
  search->add_option("--requirement", requirement, "any-two-helpers | example-vii | always")
      ->check(CLI::IsMember({"any-two-helpers", "example-vii", "always"}))
      ->capture_default_str();
  search->add_flag("--assert", assert_flag, "exit 1 when a witness is found");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (construct->parsed()) {
      RhoN state = [&]() -> RhoN {
        if (!spec_path.empty()) return from_specification(io::specification_from_json(io::read_file(spec_path)), margin);
        if (random) {
          if (construct->count("--seed") == 0) throw argument_error("--random requires an explicit --seed");
          return random_family_state(n, seed);
        }
        if (example.empty()) throw argument_error("construct needs --example, --spec or --random");
        ExampleParams params;
        params.j = j;
        if (!band.empty()) {
          params.band_lo = band[0];
          params.band_hi = band[1];
        }
        if (!members.empty()) params.members = Grouping::parse_party_list(members);
        return example_state(parse_example_id(example), n, params, margin);
      }();
      if (output.empty()) {
        out << io::state_to_json(state);
      } else {
        io::save_state(state, output);
        if (pretty) out << "wrote " << output << " (n=" << state.parties() << ", s=" << s_digest(state) << ")\n";
      }
      return 0;
    }

    if (analyze->parsed()) {
      const RhoN state = io::load_state(state_path);
      const int parties = state.parties();
      std::vector<GroupingReport> reports;
      if (all_groupings) {
        ClassifyOptions options;
        options.guard = guard;
        if (two_groups) options.filter = is_two_group;
        reports = classify_groupings(state, options);
      } else {
        const Grouping g = grouping_text.empty() ? Grouping::singletons(parties) : Grouping::parse(parties, grouping_text);
        reports.push_back(grouping_report(state, g));
      }

      if (!pair.empty()) {
        if (all_groupings) throw argument_error("--pair needs a single --grouping");
        const Grouping& g = reports.front().grouping;
        if (pair[0] < 1 || pair[1] < 1 || pair[0] > g.size() || pair[1] > g.size() || pair[0] == pair[1]) {
          throw argument_error("--pair needs two distinct group indices in 1.." + std::to_string(g.size()));
        }
        const PartySet c = g[pair[0] - 1], d = g[pair[1] - 1];
        const auto witness = find_witness(state, g, c, d);
        if (pretty) {
          out << "groups " << party_names(c) << " and " << party_names(d) << ": " << (witness ? "not distillable" : "distillable");
          if (witness) out << " (witness " << witness->describe() << ")";
          out << '\n';
        } else {
          Json doc = detail::header("analyze");
          doc["grouping"] = g.to_string();
          doc["pair"] = Json::array({pair[0], pair[1]});
          doc["distillable"] = !witness.has_value();
          doc["witness"] = witness ? detail::splitting_json(*witness) : Json(nullptr);
          out << doc.dump(2) << '\n';
        }
        return assert_flag && witness ? 1 : 0;
      }

      bool any_false = false;
      for (const auto& r : reports) {
        for (const auto& p : r.pairs) any_false = any_false || !p.distillable;
      }
      if (pretty) {
        out << "n=" << parties << "  s=" << s_digest(state) << '\n';
        for (const auto& r : reports) detail::print_report(out, r);
      } else {
        Json doc = detail::header("analyze");
        doc["n"] = parties;
        doc["s"] = s_digest(state);
        Json arr = Json::array();
        for (const auto& r : reports) arr.push_back(detail::report_json(r));
        doc["reports"] = std::move(arr);
        out << doc.dump(2) << '\n';
      }
      return assert_flag && any_false ? 1 : 0;
    }

    if (protocol->parsed()) {
      const RhoN state = io::load_state(p_state);
      const Grouping g = Grouping::parse(state.parties(), p_grouping);
      if (p_pair[0] < 1 || p_pair[1] < 1 || p_pair[0] > g.size() || p_pair[1] > g.size() || p_pair[0] == p_pair[1]) {
        throw argument_error("--pair needs two distinct group indices in 1.." + std::to_string(g.size()));
      }
      const auto trace = distill_pipeline(state, g, g[p_pair[0] - 1], g[p_pair[1] - 1]);
      if (pretty) {
        for (const auto& s : trace.steps) out << std::left << std::setw(28) << s.operation << " n=" << s.parties << "  " << s.parameters << "  s=" << s.s_digest << '\n';
        out << (trace.succeeded() ? "succeeded" : "failed") << '\n';
      } else {
        Json doc = detail::header("protocol");
        doc["grouping"] = g.to_string();
        doc["pair"] = Json::array({p_pair[0], p_pair[1]});
        doc["succeeded"] = trace.succeeded();
        if (trace.result) {
          doc["result"] = Json{{"lam0_plus", trace.result->lam0_plus}, {"lam0_minus", trace.result->lam0_minus}, {"lam_k", trace.result->lam_k}, {"delta", trace.result->delta},
                               {"fidelity", trace.result->fidelity()}};
        } else {
          doc["result"] = nullptr;
        }
        doc["witness"] = trace.witness ? detail::splitting_json(*trace.witness) : Json(nullptr);
        if (json_trace) {
          Json steps = Json::array();
          for (const auto& s : trace.steps) {
            steps.push_back(Json{{"operation", s.operation}, {"parameters", s.parameters}, {"parties", s.parties}, {"s", s.s_digest}});
          }
          doc["steps"] = std::move(steps);
        }
        out << doc.dump(2) << '\n';
      }
      return p_assert && !trace.succeeded() ? 1 : 0;
    }

    if (verify->parsed()) {
      const RhoN state = io::load_state(v_state);
      const auto report = dense::verify_ppt_agreement(state);
      if (pretty) {
        for (const auto& e : report.entries) {
          out << std::left << std::setw(12) << e.split.label() << " s=" << e.s << "  min_eig=" << std::setprecision(6) << e.min_eigenvalue
              << (e.agree ? "" : "  MISMATCH") << '\n';
        }
        out << (report.passed ? "agree" : "disagree") << '\n';
      } else {
        Json doc = detail::header("verify");
        doc["n"] = state.parties();
        doc["passed"] = report.passed;
        Json entries = Json::array();
        for (const auto& e : report.entries) {
          entries.push_back(Json{{"mask", e.split.mask()}, {"label", e.split.label()}, {"s", e.s}, {"min_eigenvalue", e.min_eigenvalue}, {"agree", e.agree}});
        }
        doc["splittings"] = std::move(entries);
        out << doc.dump(2) << '\n';
      }
      return report.passed ? 0 : 1;
    }

    if (search->parsed()) {
      const Requirement req = requirement == "example-vii"   ? requirements::example_vii_activation()
                              : requirement == "always"      ? requirements::always()
                                                             : requirements::any_two_helpers_activate();
      const auto result = impossibility_search(s_n, req);
      if (pretty) {
        out << "examined " << result.examined << ": " << (result.exhausted() ? "exhausted" : "witness " + s_string(result.witness->bits())) << '\n';
      } else {
        Json doc = detail::header("search");
        doc["n"] = s_n;
        doc["requirement"] = requirement;
        doc["examined"] = result.examined;
        doc["exhausted"] = result.exhausted();
        doc["witness"] = result.witness ? Json(s_string(result.witness->bits())) : Json(nullptr);
        out << doc.dump(2) << '\n';
      }
      return assert_flag && !result.exhausted() ? 1 : 0;
    }
  } catch (const validation_error& e) {
    err << "error: invalid state\n";
    for (const auto& v : e.violations()) err << "  " << v.invariant << ": " << v.detail << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  err << app.help();
  return 2;
}

}  // namespace actbe::cli

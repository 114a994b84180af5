/*
 * Copyright 2026 The wflock Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// wflock: command line front end over the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wflock/wflock.h"

namespace {

struct ConfigDeleter {
  void operator()(wfl_config* c) const { wfl_config_free(c); }
};
struct ReportDeleter {
  void operator()(wfl_report* r) const { wfl_report_free(r); }
};
struct StringDeleter {
  void operator()(char* s) const { wfl_string_free(s); }
};
using ConfigPtr = std::unique_ptr<wfl_config, ConfigDeleter>;
using ReportPtr = std::unique_ptr<wfl_report, ReportDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

/// Carries a status out of a subcommand.
struct Exit {
  int code;
};

int report_error(wfl_status s) {
  std::cerr << "wflock: " << wfl_last_error() << "\n";
  return s;
}

void ensure(wfl_status s) {
  if (s != WFL_OK) throw Exit{report_error(s)};
}

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

struct RunOptions {
  std::string n, attempts, seed, seeds, schedule, variant, think_min, think_max;
  std::string kappa, L, c, c_prime, priority_range, checks;
  std::string shape, locking, max_degree, graph_seed;
  std::string report, history_out, format = "text";
};

void add_run_options(CLI::App* app, RunOptions& o) {
  app->add_option("--n", o.n, "Philosophers, or graph nodes");
  app->add_option("--attempts", o.attempts, "Completed attempts, split over the seeds");
  app->add_option("--seed", o.seed, "First seed");
  app->add_option("--seeds", o.seeds, "Number of seeds (runs)");
  app->add_option("--schedule", o.schedule, "round_robin | uniform_random | scripted:FILE");
  app->add_option("--variant", o.variant, "known | adaptive");
  app->add_option("--think-min", o.think_min, "Shortest think time between attempts");
  app->add_option("--think-max", o.think_max, "Longest think time between attempts");
  app->add_option("--kappa", o.kappa, "Contention bound (0 = from the topology)");
  app->add_option("--L", o.L, "Locks per attempt bound (0 = from the topology)");
  app->add_option("--c", o.c, "Pre-reveal delay constant (0 = calibrate)");
  app->add_option("--c-prime", o.c_prime, "Post delay constant (0 = calibrate)");
  app->add_option("--priority-range", o.priority_range, "Priorities drawn from [1, M] (0 = P^3)");
  app->add_option("--checks", o.checks, "Comma separated: mutex,regularity,slot-bound,steps,linearizable");
  app->add_option("--report", o.report, "Write the JSON report here");
  app->add_option("--history-out", o.history_out, "Write run histories here (.bin for binary)");
  app->add_option("--format", o.format, "Output on stdout: text | json")->check(CLI::IsMember({"text", "json"}));
}

wfl_format format_of(const std::string& f) { return f == "json" ? WFL_FORMAT_JSON : WFL_FORMAT_TEXT; }

int execute(ConfigPtr cfg, const RunOptions& o) {
  if (!o.history_out.empty()) ensure(wfl_config_set(cfg.get(), "keep_histories", "1"));
  wfl_report* raw = nullptr;
  wfl_status s = wfl_run(cfg.get(), &raw);
  if (s != WFL_OK && s != WFL_VIOLATION) return report_error(s);
  ReportPtr report(raw);

  char* text = nullptr;
  ensure(wfl_report_render(report.get(), format_of(o.format), &text));
  StringPtr owned(text);
  std::cout << text;
  if (!o.report.empty()) {
    char* json = nullptr;
    ensure(wfl_report_render(report.get(), WFL_FORMAT_JSON, &json));
    StringPtr owned_json(json);
    if (!write_file(o.report, json)) {
      std::cerr << "wflock: cannot write report '" << o.report << "'\n";
      return WFL_ERR_IO;
    }
  }
  if (!o.history_out.empty()) ensure(wfl_report_write_histories(report.get(), o.history_out.c_str()));
  if (s == WFL_VIOLATION) std::cerr << "wflock: " << wfl_last_error() << "\n";
  return s;
}

int run_workload(const char* command, const RunOptions& o) {
  wfl_config* raw = nullptr;
  ensure(wfl_config_new(&raw));
  ConfigPtr cfg(raw);
  const std::vector<std::pair<const char*, const std::string*>> keys{
      {"command", nullptr},       {"n", &o.n},
      {"attempts", &o.attempts},  {"seed", &o.seed},
      {"seeds", &o.seeds},        {"schedule", &o.schedule},
      {"variant", &o.variant},    {"think_min", &o.think_min},
      {"think_max", &o.think_max}, {"kappa", &o.kappa},
      {"L", &o.L},                {"c", &o.c},
      {"c_prime", &o.c_prime},    {"priority_range", &o.priority_range},
      {"checks", &o.checks},      {"shape", &o.shape},
      {"locking", &o.locking},    {"max_degree", &o.max_degree},
      {"graph_seed", &o.graph_seed}};
  for (auto [key, value] : keys) {
    if (!value) {
      ensure(wfl_config_set(cfg.get(), key, command));
    } else if (!value->empty()) {
      ensure(wfl_config_set(cfg.get(), key, value->c_str()));
    }
  }
  return execute(std::move(cfg), o);
}

int replay(const std::string& path, const RunOptions& o) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "wflock: cannot read '" << path << "'\n";
    return WFL_ERR_IO;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  wfl_config* raw = nullptr;
  ensure(wfl_config_from_json(buf.str().c_str(), &raw));
  return execute(ConfigPtr(raw), o);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wait-free randomized tryLock simulator and checker"};
  app.require_subcommand(1);
  app.set_version_flag("--version", wfl_version());

  RunOptions phil, graph, rerun;
  CLI::App* p = app.add_subcommand("philosophers", "Dining philosophers around a table of n");
  add_run_options(p, phil);

  CLI::App* g = app.add_subcommand("graph", "Lock the neighbourhood of every node of a graph");
  add_run_options(g, graph);
  g->add_option("--shape", graph.shape, "random | ring | star | empty");
  g->add_option("--locking", graph.locking, "neighborhood | edges");
  g->add_option("--max-degree", graph.max_degree, "Degree bound of random graphs");
  g->add_option("--graph-seed", graph.graph_seed, "Seed of the random graph");

  std::string check_path, check_list, check_format = "text";
  CLI::App* c = app.add_subcommand("check", "Check a recorded history offline");
  c->add_option("history", check_path, "History file (text or binary)")->required();
  c->add_option("--checks", check_list, "Comma separated checks");
  c->add_option("--format", check_format, "text | json")->check(CLI::IsMember({"text", "json"}));

  std::uint32_t cal_kappa = 2, cal_L = 2, cal_validate = 0;
  std::string cal_variant = "known", cal_format = "text";
  CLI::App* k = app.add_subcommand("calibrate", "Size the delay constants c and c'");
  k->add_option("--kappa", cal_kappa, "Contention bound");
  k->add_option("--L", cal_L, "Locks per attempt bound");
  k->add_option("--variant", cal_variant, "known | adaptive");
  k->add_option("--validate", cal_validate, "Re-measure on this many fresh schedules");
  k->add_option("--format", cal_format, "text | json")->check(CLI::IsMember({"text", "json"}));

  std::string replay_path;
  CLI::App* r = app.add_subcommand("replay", "Rerun the configuration embedded in a JSON report");
  r->add_option("input", replay_path, "JSON report to rerun")->required();
  r->add_option("--report", rerun.report, "Write the new JSON report here");
  r->add_option("--history-out", rerun.history_out, "Write run histories here");
  r->add_option("--format", rerun.format, "text | json")->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : WFL_ERR_CONFIG;
  }

  try {
    if (*p) return run_workload("philosophers", phil);
    if (*g) return run_workload("graph", graph);
    if (*r) return replay(replay_path, rerun);
    char* out = nullptr;
    wfl_status s;
    if (*c) {
      s = wfl_check_file(check_path.c_str(), check_list.empty() ? nullptr : check_list.c_str(),
                         format_of(check_format), &out);
    } else {
      s = wfl_calibrate(cal_kappa, cal_L, cal_variant.c_str(), cal_validate, format_of(cal_format), &out);
    }
    StringPtr owned(out);
    if (out) std::cout << out;
    if (s != WFL_OK) return report_error(s);
    return 0;
  } catch (const Exit& e) {
    return e.code;
  }
}

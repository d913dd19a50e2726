// Copyright 2026 The twr-sim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// twr-sim: Monte Carlo sweeps for the K x N x K interfering two-way relay
// network.

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "twr/config.hpp"
#include "twr/csv.hpp"
#include "twr/twr.hpp"

namespace {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kUsage = 2, kBadConfig = 3, kBudget = 4, kIo = 5, kInternal = 6 };

struct FlagSpec {
  const char* flag;
  const char* key;
  const char* help;
};

// Every configuration field has a flag; the values are forwarded to
// apply_setting so flags and config files share one parser.
constexpr FlagSpec kFlags[] = {
    {"--k", "k", "number of CN pairs K"},
    {"--n", "n", "number of relays N (single)"},
    {"--snr-db", "snr_db", "SNR in dB (single)"},
    {"--epsilon", "epsilon", "maximum allowable TIL; 'inf' disables outage"},
    {"--t-max", "t_max", "maximum back-off duration"},
    {"--seed", "seed", "64-bit master seed"},
    {"--outage-fallback", "outage_fallback", "true: ORS outage pairs take the min-TIL free relay"},
    {"--snr-points", "snr_points_db", "comma-separated SNR grid in dB"},
    {"--n-points", "n_points", "comma-separated relay counts"},
    {"--protocols", "protocols", "comma-separated subset of AF,DF,LC_CF"},
    {"--selectors", "selectors", "comma-separated subset of ORS,MaxMinSnr,Random"},
    {"--trials", "trials", "Monte Carlo trials per sweep point"},
    {"--no-int-bound", "include_no_interference_bound", "true: add interference-free LC-CF rows"},
    {"--under-scaled", "under_scaled", "true: N = SNR^(K-1) instead of SNR^(2(K-1))"},
    {"--max-n", "max_n", "relay-count cap for SNR-scaled sweeps"},
    {"--work-budget", "work_budget", "refuse points with K*N*trials above this"},
    {"--threads", "threads", "worker threads (0 = all cores)"},
    {"--output", "output", "output CSV file name inside the output directory"},
};

struct CommandLine {
  std::string config_path;
  std::string output_dir;
  std::uint64_t trial = 0;
  std::vector<std::string> sets;
  std::map<std::string, std::string> flags;
};

twr::RunConfig command_defaults(const std::string& command) {
  twr::RunConfig rc;
  auto& s = rc.sweep;
  if (command == "sweep-snr-scaling") {
    s.kind = twr::SweepKind::SnrScalingN;
    s.snr_points_db = {6, 8, 10, 12, 14};
    s.include_no_interference_bound = true;
  } else if (command == "sweep-snr-fixed-n") {
    s.kind = twr::SweepKind::SnrFixedN;
    for (int d = 0; d <= 20; d += 2) s.snr_points_db.push_back(d);
    s.n_points = {50};
  } else if (command == "sweep-n") {
    s.kind = twr::SweepKind::NSweep;
    s.snr_points_db = {20};
    s.n_points = {4, 10, 20, 50, 100};
  } else if (command == "verify-lemma") {
    s.kind = twr::SweepKind::LemmaVerify;
    rc.net.snr_db = 10;
    s.snr_points_db = {10};
    s.n_points = {10, 100, 1000};
    s.protocols = {twr::Protocol::LC_CF};
    s.selectors = {twr::Selector::ORS};
    s.trials = 100000;
  }
  return rc;
}

twr::SweepKind command_kind(const std::string& command) {
  if (command == "sweep-snr-scaling") return twr::SweepKind::SnrScalingN;
  if (command == "sweep-n") return twr::SweepKind::NSweep;
  if (command == "verify-lemma") return twr::SweepKind::LemmaVerify;
  return twr::SweepKind::SnrFixedN;
}

// Precedence: flag > config file > command default.
twr::RunConfig resolve(const std::string& command, const CommandLine& cl) {
  twr::RunConfig rc = command_defaults(command);
  if (!cl.config_path.empty()) twr::apply_json(rc, twr::load_json_file(cl.config_path));
  for (const auto& s : cl.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw twr::ConfigError("--set expects key=value, got '" + s + "'");
    twr::apply_setting(rc, s.substr(0, eq), twr::parse_override_value(s.substr(eq + 1)));
  }
  for (const auto& [key, value] : cl.flags) twr::apply_setting(rc, key, twr::parse_override_value(value));
  if (command != "single") rc.sweep.kind = command_kind(command);
  return rc;
}

std::string output_name(const std::string& command, const CommandLine& cl, const twr::RunConfig& rc) {
  if (!rc.output.empty()) return rc.output;
  if (!cl.config_path.empty()) return fs::path(cl.config_path).stem().string() + ".csv";
  return command + ".csv";
}

fs::path prepare_output_dir(const CommandLine& cl) {
  std::string dir = cl.output_dir;
  if (dir.empty()) {
    const char* env = std::getenv("TWR_SIM_OUTPUT_DIR");
    dir = env && *env ? env : ".";
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw twr::IoError("output directory '" + dir + "' is not usable");
  return dir;
}

void print_validation(const twr::ValidationOutcome& v) {
  for (const auto& w : v.warnings) std::cerr << "twr-sim: warning: " << w << "\n";
}

int run_single(const CommandLine& cl) {
  const auto rc = resolve("single", cl);
  const auto check = twr::validate_config(rc.net);
  if (!check.ok()) throw twr::InvalidConfig(check);
  print_validation(check);
  const auto& cfg = rc.net;
  const double snr = cfg.snr_linear();
  const auto c = twr::generate_channels(cfg, cl.trial);
  const auto til = twr::compute_til(c);
  std::printf("realization: K=%zu N=%zu snr_db=%s epsilon=%s seed=%llu trial=%llu\n", cfg.k, cfg.n,
              twr::format_real(cfg.snr_db).c_str(), twr::format_real(cfg.epsilon).c_str(),
              static_cast<unsigned long long>(cfg.seed), static_cast<unsigned long long>(cl.trial));
  for (twr::Selector s : twr::kAllSelectors) {
    const auto sel = twr::run_selector(s, c, til, cfg, cl.trial);
    const auto prof = twr::interference_profile(c, sel, snr);
    std::printf("\n[%s] elapsed=%s total_delta=%s decoupled=%s\n", std::string(to_string(s)).c_str(),
                twr::format_real(sel.elapsed).c_str(), twr::format_real(prof.total()).c_str(),
                twr::decoupled(sel, snr, cfg.epsilon) ? "yes" : "no");
    for (std::size_t i = 0; i < sel.pairs(); ++i) {
      if (sel.assigned(i))
        std::printf("  pair %zu -> relay %zu  til=%s  rank=%zu  delta=%s\n", i, sel.relay_of(i),
                    twr::format_real(sel.selected_til[i]).c_str(), *sel.order[i],
                    twr::format_real(prof.delta[i]).c_str());
      else
        std::printf("  pair %zu -> outage\n", i);
    }
    for (twr::Protocol p : twr::kAllProtocols) {
      const auto rep = twr::compute_rates(p, c, sel, prof, snr);
      std::printf("  %-6s sum_rate=%s\n", std::string(to_string(p)).c_str(), twr::format_real(rep.sum_rate).c_str());
    }
    std::printf("  %-6s sum_rate=%s\n", "NoInt", twr::format_real(twr::no_interference_bound(c, sel, snr).sum_rate).c_str());
  }
  return kOk;
}

int run_sweep_command(const std::string& command, const CommandLine& cl) {
  const auto rc = resolve(command, cl);
  const auto check = twr::validate_config(rc.net);
  if (!check.ok()) throw twr::InvalidConfig(check);
  print_validation(check);
  const fs::path dir = prepare_output_dir(cl);
  const fs::path out = dir / output_name(command, cl, rc);

  const auto result = twr::run_sweep(rc.sweep, rc.net);
  for (double s : result.skipped_snr_db)
    std::cerr << "twr-sim: warning: snr_db=" << s << " skipped, N exceeds max_n=" << rc.sweep.max_n << "\n";
  twr::write_csv(result, out);

  if (rc.sweep.kind == twr::SweepKind::LemmaVerify) {
    for (const auto& row : result.rows) {
      const auto successes = static_cast<std::size_t>(std::llround(row.p_c_estimate * static_cast<double>(row.trials)));
      const auto ci = twr::wilson_interval(successes, row.trials);
      std::printf("%s %s N=%zu snr_db=%s P_C=%s ci95=[%s, %s]\n", row.protocol.c_str(), row.selector.c_str(), row.n,
                  twr::format_real(row.snr_db).c_str(), twr::format_real(row.p_c_estimate).c_str(),
                  twr::format_real(ci.lower).c_str(), twr::format_real(ci.upper).c_str());
    }
  }
  std::printf("wrote %zu rows to %s (%s, seed %llu)\n", result.rows.size(), out.string().c_str(),
              result.version.c_str(), static_cast<unsigned long long>(result.seed));
  return kOk;
}

void add_common(CLI::App* sub, CommandLine& cl) {
  sub->add_option("-c,--config", cl.config_path, "JSON configuration file");
  sub->add_option("-o,--output-dir", cl.output_dir, "output directory (default: $TWR_SIM_OUTPUT_DIR or .)");
  sub->add_option("--set", cl.sets, "generic override key=value (repeatable)");
  for (const auto& f : kFlags) {
    sub->add_option_function<std::string>(
        f.flag, [&cl, key = std::string(f.key)](const std::string& v) { cl.flags[key] = v; }, f.help);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"twr-sim: opportunistic relay selection and AF/DF/LC-CF rates in the K x N x K interfering "
               "two-way relay network"};
  app.require_subcommand(1);
  CommandLine cl;

  struct Command {
    const char* name;
    const char* help;
  };
  const Command commands[] = {
      {"sweep-snr-scaling", "sum rate vs SNR with N = round(SNR^(2(K-1))) (or SNR^(K-1) with --under-scaled true)"},
      {"sweep-snr-fixed-n", "sum rate vs SNR at fixed relay counts"},
      {"sweep-n", "sum rate vs relay count at fixed SNR"},
      {"verify-lemma", "decoupling probability estimates with Wilson 95% intervals"},
      {"single", "one realization: selections and rates printed to standard output"},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    add_common(sub, cl);
    if (std::string(c.name) == "single") sub->add_option("--trial", cl.trial, "trial index of the realization");
    subs[c.name] = sub;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    for (const auto& [name, sub] : subs) {
      if (!sub->parsed()) continue;
      if (name == "single") return run_single(cl);
      return run_sweep_command(name, cl);
    }
  } catch (const twr::WorkBudgetExceeded& e) {
    std::cerr << "twr-sim: refused: " << e.what() << "\n";
    return kBudget;
  } catch (const twr::IoError& e) {
    std::cerr << "twr-sim: error: " << e.what() << "\n";
    return kIo;
  } catch (const twr::ConfigError& e) {
    std::cerr << "twr-sim: error: " << e.what() << "\n";
    return kBadConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "twr-sim: error: " << e.what() << "\n";
    return kBadConfig;
  } catch (const std::exception& e) {
    std::cerr << "twr-sim: error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}

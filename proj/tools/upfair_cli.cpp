// upfair: command-line front end for the bid/price power allocation library.
//
//   upfair run    --config scenario.json --out trace.csv
//   upfair sweep  --config scenario.json --range 5:200:5 --out sweep.csv
//   upfair oracle --config scenario.json [--json]
//   upfair serve  --config scenario.json --port 7000
//   upfair ue     --config scenario.json --user-index 0 --addr 127.0.0.1:7000
//
// Exit codes: 0 converged / ok, 1 error, 2 non-convergence.

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <string>

#include "upfair/errors.hpp"
#include "upfair/scenario_io.hpp"
#include "upfair/simulator.hpp"
#include "upfair/socket_transport.hpp"

namespace {

using namespace upfair;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotConverged = 2;

const char* status_name(RunStatus status) {
  return status == RunStatus::converged ? "converged" : "max_iterations_reached";
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ' ';
    out += format_real(values[i]);
  }
  return out;
}

void print_result(const AllocationResult& result) {
  std::cout << "status: " << status_name(result.status) << '\n'
            << "iterations: " << result.iterations << '\n'
            << "final_price: " << format_real(result.final_price) << '\n'
            << "final_powers: " << join(result.final_powers) << '\n'
            << "oracle_price: " << format_real(result.oracle.shadow_price) << '\n'
            << "oracle_gap: " << format_real(result.oracle_gap) << '\n';
}

int exit_for(RunStatus status) {
  return status == RunStatus::converged ? kExitOk : kExitNotConverged;
}

MessageLog stderr_log(bool verbose, std::string who) {
  if (!verbose) return {};
  return [who = std::move(who)](std::string_view direction, std::string_view line) {
    std::cerr << who << ' ' << direction << ' ' << line << '\n';
  };
}

std::pair<std::string, std::uint16_t> split_address(const std::string& addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos) throw ConfigError("addr", "expected host:port");
  const int port = std::stoi(addr.substr(colon + 1));
  if (port <= 0 || port > 65535) throw ConfigError("addr", "port out of range");
  return {addr.substr(0, colon), static_cast<std::uint16_t>(port)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Utility-proportional-fair downlink power allocation"};
  app.require_subcommand(1);

  std::string config;
  std::string out_path;

  auto* run_cmd = app.add_subcommand("run", "Run the distributed algorithm and write its trace");
  run_cmd->add_option("--config", config, "Scenario JSON")->required();
  run_cmd->add_option("--out", out_path, "Trace CSV")->required();

  std::string range;
  std::string values;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run the damped algorithm over a range of P_T");
  sweep_cmd->add_option("--config", config, "Scenario JSON")->required();
  auto* range_opt = sweep_cmd->add_option("--range", range, "start:end:step");
  auto* values_opt = sweep_cmd->add_option("--values", values, "comma separated P_T values");
  range_opt->excludes(values_opt);
  sweep_cmd->add_option("--out", out_path, "Sweep CSV")->required();

  bool as_json = false;
  auto* oracle_cmd = app.add_subcommand("oracle", "Centralized optimum");
  oracle_cmd->add_option("--config", config, "Scenario JSON")->required();
  oracle_cmd->add_flag("--json", as_json, "Machine-readable output");

  std::string host = "127.0.0.1";
  int port = 7000;
  int timeout_ms = 5000;
  int registration_ms = 30000;
  bool verbose = false;
  auto* serve_cmd = app.add_subcommand("serve", "Run the BS over TCP");
  serve_cmd->add_option("--config", config, "Scenario JSON")->required();
  serve_cmd->add_option("--host", host, "Bind address");
  serve_cmd->add_option("--port", port, "TCP port, 0 picks a free one")->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--timeout-ms", timeout_ms, "Per-round bid deadline");
  serve_cmd->add_option("--registration-timeout-ms", registration_ms, "Deadline for all UEs to connect");
  serve_cmd->add_flag("--verbose", verbose, "Log every message");

  std::int64_t user_index = 0;
  std::string addr = "127.0.0.1:7000";
  int ue_timeout_ms = 30000;
  auto* ue_cmd = app.add_subcommand("ue", "Run one UE against a BS");
  ue_cmd->add_option("--config", config, "Scenario JSON")->required();
  ue_cmd->add_option("--user-index", user_index, "Index into users")->required();
  ue_cmd->add_option("--addr", addr, "BS host:port");
  ue_cmd->add_option("--timeout-ms", ue_timeout_ms, "Deadline for each BS message");
  ue_cmd->add_flag("--verbose", verbose, "Log every message");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*run_cmd) {
      const Scenario scenario = load_scenario(config, Scenario{});
      const AllocationResult result = run(scenario);
      std::ofstream out(out_path);
      if (!out) throw ConfigError("--out", "cannot open " + out_path);
      write_trace_csv(out, result.trace);
      print_result(result);
      return exit_for(result.status);
    }

    if (*sweep_cmd) {
      if (range.empty() && values.empty()) throw ConfigError("--range", "give --range or --values");
      const auto totals = range.empty() ? parse_list(values) : parse_range(range);
      const Scenario base = load_scenario(config, sweep_defaults({}), false);
      const auto rows = sweep(base, totals);
      std::ofstream out(out_path);
      if (!out) throw ConfigError("--out", "cannot open " + out_path);
      write_sweep_csv(out, rows);
      bool all_converged = true;
      for (const auto& row : rows) {
        std::cout << "P_T=" << format_real(row.total_power) << " status=" << status_name(row.status)
                  << " p=" << format_real(row.price) << " sum_P=" << format_real(row.power_sum) << '\n';
        all_converged = all_converged && row.status == RunStatus::converged;
      }
      return all_converged ? kExitOk : kExitNotConverged;
    }

    if (*oracle_cmd) {
      const Scenario scenario = load_scenario(config, Scenario{});
      const OracleResult oracle = oracle_allocate(scenario.users, scenario.total_power, scenario.solver);
      if (as_json) {
        nlohmann::json doc{{"powers", oracle.powers},
                           {"shadow_price", oracle.shadow_price},
                           {"kkt_residual", oracle.kkt_residual}};
        std::cout << doc.dump() << '\n';
      } else {
        std::cout << "powers: " << join(oracle.powers) << '\n'
                  << "shadow_price: " << format_real(oracle.shadow_price) << '\n'
                  << "kkt_residual: " << format_real(oracle.kkt_residual) << '\n';
      }
      return kExitOk;
    }

    if (*serve_cmd) {
      const Scenario scenario = load_scenario(config, Scenario{});
      SocketServerOptions options;
      options.host = host;
      options.port = static_cast<std::uint16_t>(port);
      options.round_timeout = std::chrono::milliseconds(timeout_ms);
      options.registration_timeout = std::chrono::milliseconds(registration_ms);
      options.log = stderr_log(verbose, "bs");
      SocketBsTransport transport(scenario.users.size(), options);
      std::cerr << "listening on " << host << ':' << transport.port() << '\n';
      transport.wait_for_users();
      const AllocationResult result = run_protocol(scenario, transport);
      print_result(result);
      return exit_for(result.status);
    }

    if (*ue_cmd) {
      const Scenario scenario = load_scenario(config, Scenario{});
      if (user_index < 0 || static_cast<std::size_t>(user_index) >= scenario.users.size()) {
        throw ConfigError("--user-index", "out of range");
      }
      const auto index = static_cast<std::size_t>(user_index);
      UeAgent agent(user_index, scenario.users[index], scenario.initial_bid(index), scenario.decay,
                    scenario.decay_start, scenario.solver);
      SocketUeOptions options;
      std::tie(options.host, options.port) = split_address(addr);
      options.timeout = std::chrono::milliseconds(ue_timeout_ms);
      options.log = stderr_log(verbose, "ue" + std::to_string(user_index));
      const double power = run_socket_ue(agent, options);
      std::cout << "user " << user_index << " power: " << format_real(power) << '\n';
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

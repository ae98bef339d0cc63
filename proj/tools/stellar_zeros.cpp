// stellar_zeros: command-line front end for the stellar library.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stellar/io.hpp"
#include "stellar/stellar.hpp"

namespace {

using namespace stellar;
using nlohmann::json;

struct RunConfig {
  std::string command;
  std::string state_path;
  std::string random_spec;
  double scale = 0.2;
  std::string hamiltonian = "0.5,0.5,0,0,0,0";
  std::string time;
  std::string out;
  double tol = 1e-4;
  std::string method = "both";
  std::string config_path;
};

/// Raised for contract violations; maps to exit status 2.
struct ContractViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Input {
  std::optional<StellarState> state;
  WavefunctionForm form;
};

Input load_input(const RunConfig& cfg)
{
  Input in;
  if (!cfg.random_spec.empty()) {
    const std::vector<double> rs = io::parse_doubles(cfg.random_spec, 2, "--random");
    if (rs[0] < 0 || rs[0] != std::floor(rs[0]) || rs[1] < 0 || rs[1] != std::floor(rs[1]))
      throw Error(ErrorCode::InputError, "--random expects RANK,SEED as non-negative integers");
    in.state = random_stellar_state(static_cast<std::size_t>(rs[0]), static_cast<std::uint64_t>(rs[1]), cfg.scale);
  } else if (!cfg.state_path.empty()) {
    const json j = io::read_json_file(cfg.state_path);
    if (j.is_object() && j.contains("g2")) {
      in.form = io::form_from_json(j);
      return in;
    }
    in.state = io::state_from_json(j);
  } else {
    throw Error(ErrorCode::InputError, "one of --state or --random is required");
  }
  in.form = build_wavefunction(*in.state);
  return in;
}

void emit(const RunConfig& cfg, const std::string& text)
{
  if (cfg.out.empty()) {
    std::cout << text;
  } else {
    io::write_atomic(cfg.out, text);
  }
}

std::vector<double> time_grid(const RunConfig& cfg, const std::string& fallback)
{
  return io::parse_time_grid(cfg.time.empty() ? fallback : cfg.time);
}

std::string two_pi_grid(int n)
{
  return "0," + io::format_double(2.0 * std::numbers::pi) + "," + std::to_string(n);
}

unsigned worker_count()
{
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("STELLAR_ZEROS_THREADS")) {
    try {
      const long cap = std::stol(env);
      if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    } catch (const std::exception&) {
      throw Error(ErrorCode::InputError, "STELLAR_ZEROS_THREADS must be a positive integer");
    }
  }
  return n;
}

int cmd_build(const RunConfig& cfg)
{
  const Input in = load_input(cfg);
  emit(cfg, io::form_to_json(in.form).dump(2) + "\n");
  return 0;
}

int cmd_zeros(const RunConfig& cfg)
{
  const Input in = load_input(cfg);
  json zeros = json::array();
  for (const cplx& z : in.form.zeros) zeros.push_back(io::to_json(z));
  emit(cfg, json{{"zeros", zeros}}.dump() + "\n");
  return 0;
}

int cmd_evolve(const RunConfig& cfg)
{
  const Input in = load_input(cfg);
  const QuadraticHamiltonian H = io::parse_hamiltonian(cfg.hamiltonian);
  const std::vector<double> grid = time_grid(cfg, two_pi_grid(65));
  if (cfg.method != "ode" && cfg.method != "closed" && cfg.method != "both")
    throw Error(ErrorCode::InputError, "--method must be ode, closed or both");

  std::string csv = "t,k,re,im,method\n";
  if (in.form.rank() > 0) {
    bool closed_ok = cfg.method != "ode";
    if (cfg.method != "closed") {
      try {
        io::append_trajectory_csv(csv, integrate(in.form, H, grid));
      } catch (const ZeroCollisionError& e) {
        if (cfg.method == "ode") throw;
        std::cerr << "warning: ode path stopped (" << e.what() << "); closed form is the method of record\n";
      }
    }
    if (closed_ok) {
      try {
        io::append_trajectory_csv(csv, closed_form_trajectory(in.form, H, grid));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::UnsupportedHamiltonian || cfg.method == "closed") throw;
      }
    }
  }
  emit(cfg, csv);
  return 0;
}

int cmd_crossings(const RunConfig& cfg)
{
  const Input in = load_input(cfg);
  const QuadraticHamiltonian H = io::parse_hamiltonian(cfg.hamiltonian);
  const std::vector<double> grid = time_grid(cfg, two_pi_grid(513));
  std::string lines;
  if (in.form.rank() > 0) {
    const ZeroTrajectory traj = closed_form_trajectory(in.form, H, grid);
    for (const CrossingEvent& ev : detect_crossings(traj)) {
      json j = {{"k", ev.zero_index}, {"t", ev.t_star}, {"x", ev.x_star}, {"flag", to_string(ev.flag)}};
      lines += j.dump() + "\n";
    }
  }
  emit(cfg, lines);
  return 0;
}

int cmd_audit(const RunConfig& cfg)
{
  const Input in = load_input(cfg);
  const AuditResult res = crossing_guarantee_audit(in.form);
  std::ostringstream os;
  os << "verdict=" << to_string(res.verdict) << " events=" << res.events << " rank=" << in.form.rank()
     << " certified=" << (res.gershgorin.certified ? "true" : "false")
     << " min_separation=" << io::format_double(res.gershgorin.min_separation)
     << " threshold=" << io::format_double(res.gershgorin.threshold) << "\n";
  emit(cfg, os.str());
  if (res.verdict == AuditVerdict::GuaranteedButMissed) throw ContractViolation("guaranteed crossings were not observed");
  return 0;
}

int cmd_verify(const RunConfig& cfg)
{
  const Input in = load_input(cfg);
  if (!in.state) throw Error(ErrorCode::InputError, "verify needs a state descriptor, not a bare form");
  const QuadraticHamiltonian H = io::parse_hamiltonian(cfg.hamiltonian);
  const std::vector<double> grid = time_grid(cfg, "0.3,2.9,3");
  const StellarState& st = *in.state;
  const WavefunctionForm& wf = in.form;
  const int r = static_cast<int>(wf.rank());
  const std::size_t cutoff = std::max<std::size_t>(80, default_cutoff(st));

  const FockVector v = stellar_to_fock(st, cutoff);
  double dual = 0.0;
  for (double x = -3.0; x <= 3.0; x += 0.5)
    for (double y = -3.0; y <= 3.0; y += 0.5) {
      const cplx z(x, y);
      const cplx a = eval_form(wf, z);
      dual = std::max(dual, std::abs(eval_entire_detailed(v, z).value - a) / std::abs(a));
    }

  // One worker per sample time, capped by STELLAR_ZEROS_THREADS.
  std::vector<double> ode_dev(grid.size(), 0.0), oracle_dev(grid.size(), 0.0);
  std::vector<std::string> failures(grid.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      try {
        const double t = grid[i];
        const std::vector<cplx> cf = closed_form(wf, H, t);
        const double g[1] = {t};
        ode_dev[i] = matching_distance(cf, integrate(wf, H, g).zeros_at(0));
        double reach = 0.0;
        for (const cplx& z : cf) reach = std::max({reach, std::abs(z.real()), std::abs(z.imag())});
        const FockVector ev = evolve_fock(v, H, t, cutoff);
        oracle_dev[i] = matching_distance(cf, zeros_from_fock(ev, r, reach + 1.0));
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned n = std::min<unsigned>(worker_count(), static_cast<unsigned>(grid.size()));
  for (unsigned i = 0; i < n; ++i) pool.emplace_back(work);
  for (std::thread& th : pool) th.join();
  for (const std::string& f : failures)
    if (!f.empty()) throw ContractViolation(f);

  json report = {{"rank", r},
                 {"dual_path_max_rel", dual},
                 {"ode_vs_closed_max", *std::max_element(ode_dev.begin(), ode_dev.end())},
                 {"oracle_vs_closed_max", *std::max_element(oracle_dev.begin(), oracle_dev.end())},
                 {"tolerance", cfg.tol}};
  const bool ok = report["ode_vs_closed_max"].get<double>() <= cfg.tol &&
                  report["oracle_vs_closed_max"].get<double>() <= cfg.tol;
  report["pass"] = ok;
  emit(cfg, report.dump() + "\n");
  if (!ok) throw ContractViolation("deviation above tolerance");
  return 0;
}

/// Fills fields still at their defaults from the config file (flags win).
void merge_config(RunConfig& cfg, const CLI::App& app)
{
  if (cfg.config_path.empty()) return;
  const json j = io::read_json_file(cfg.config_path);
  if (!j.is_object()) throw Error(ErrorCode::InputError, "config file must hold a JSON object");
  auto take_string = [&](const char* key, const char* flag, std::string& field) {
    if (!j.contains(key) || app.count(flag) > 0) return;
    if (!j[key].is_string()) throw Error(ErrorCode::InputError, std::string("config \"") + key + "\" must be a string");
    field = j[key].get<std::string>();
  };
  auto take_number = [&](const char* key, const char* flag, double& field) {
    if (!j.contains(key) || app.count(flag) > 0) return;
    if (!j[key].is_number()) throw Error(ErrorCode::InputError, std::string("config \"") + key + "\" must be a number");
    field = j[key].get<double>();
  };
  take_string("state", "--state", cfg.state_path);
  take_string("random", "--random", cfg.random_spec);
  take_string("hamiltonian", "--hamiltonian", cfg.hamiltonian);
  take_string("time", "--time", cfg.time);
  take_string("out", "--out", cfg.out);
  take_string("method", "--method", cfg.method);
  take_number("tol", "--tol", cfg.tol);
  take_number("scale", "--scale", cfg.scale);
}

int exit_code_for(ErrorCode code)
{
  switch (code) {
    case ErrorCode::InputError:
    case ErrorCode::InvalidParameter:
    case ErrorCode::CutoffTooSmall:
    case ErrorCode::DegenerateInitialZeros:
    case ErrorCode::UnsupportedHamiltonian:
    case ErrorCode::ZeroVector: return 1;
    default: return 2;
  }
}

std::string one_line(std::string s)
{
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Zeros of finite stellar-rank wavefunctions under Gaussian dynamics"};
  app.require_subcommand(1);
  RunConfig cfg;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"build", "write the polynomial-times-Gaussian form as JSON"},
      {"zeros", "print the zero multiset"},
      {"evolve", "write zero trajectories as CSV"},
      {"crossings", "write real-axis crossing events as JSON lines"},
      {"audit", "check the crossing guarantee under phase shifts"},
      {"verify", "cross-check closed form, integration and number-basis oracle"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--state", cfg.state_path, "state descriptor or wavefunction form JSON");
    sub->add_option("--random", cfg.random_spec, "seeded random state RANK,SEED");
    sub->add_option("--scale", cfg.scale, "bound on |alpha| and |chi| for --random");
    sub->add_option("--hamiltonian", cfg.hamiltonian, "A,B,C,D,E,F");
    sub->add_option("--time", cfg.time, "T0,T1,N");
    sub->add_option("--out", cfg.out, "output path (stdout if absent)");
    sub->add_option("--tol", cfg.tol, "deviation tolerance for verify");
    sub->add_option("--method", cfg.method, "ode|closed|both");
    sub->add_option("--config", cfg.config_path, "JSON file with the same keys as the flags");
    sub->callback([&cfg, name = name] { cfg.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: InputError: " << one_line(e.what()) << "\n";
    return 1;
  }

  try {
    merge_config(cfg, *app.get_subcommand(cfg.command));
    if (!(cfg.tol > 0.0)) throw Error(ErrorCode::InputError, "--tol must be positive");
    if (!(cfg.scale >= 0.0)) throw Error(ErrorCode::InputError, "--scale must be non-negative");
    if (cfg.command == "build") return cmd_build(cfg);
    if (cfg.command == "zeros") return cmd_zeros(cfg);
    if (cfg.command == "evolve") return cmd_evolve(cfg);
    if (cfg.command == "crossings") return cmd_crossings(cfg);
    if (cfg.command == "audit") return cmd_audit(cfg);
    if (cfg.command == "verify") return cmd_verify(cfg);
  } catch (const ContractViolation& e) {
    std::cerr << "error: ContractViolation: " << one_line(e.what()) << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << one_line(e.what()) << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: Internal: " << one_line(e.what()) << "\n";
    return 2;
  }
  return 1;
}

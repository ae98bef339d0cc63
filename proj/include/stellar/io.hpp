#ifndef STELLAR_IO_HPP
#define STELLAR_IO_HPP

// JSON descriptors, CSV number formatting and atomic file output.

#include <charconv>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "stellar/dynamics.hpp"
#include "stellar/errors.hpp"
#include "stellar/state.hpp"
#include "stellar/wavefunction.hpp"

namespace stellar::io {

using nlohmann::json;

/// Shortest representation that reads back to the same double.
inline std::string format_double(double x)
{
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline json to_json(cplx c) { return json::array({c.real(), c.imag()}); }

inline cplx complex_from_json(const json& j, std::string_view what)
{
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw Error(ErrorCode::InputError, std::string(what) + " must be a [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json state_to_json(const StellarState& st)
{
  json core = json::array();
  for (const cplx& c : st.core()) core.push_back(to_json(c));
  return json{{"rank", st.rank()}, {"core", core}, {"alpha", to_json(st.alpha())}, {"chi", to_json(st.chi())}};
}

inline StellarState state_from_json(const json& j)
{
  if (!j.is_object() || !j.contains("rank") || !j.contains("core"))
    throw Error(ErrorCode::InputError, "state descriptor needs \"rank\" and \"core\"");
  if (!j["rank"].is_number_integer() || j["rank"].get<long>() < 0)
    throw Error(ErrorCode::InputError, "\"rank\" must be a non-negative integer");
  const auto rank = j["rank"].get<std::size_t>();
  const json& core_j = j["core"];
  if (!core_j.is_array() || core_j.size() != rank + 1)
    throw Error(ErrorCode::InputError, "\"core\" must hold rank + 1 coefficients");
  std::vector<cplx> core;
  for (const json& c : core_j) core.push_back(complex_from_json(c, "core coefficient"));
  const cplx alpha = j.contains("alpha") ? complex_from_json(j["alpha"], "alpha") : cplx(0.0, 0.0);
  const cplx chi = j.contains("chi") ? complex_from_json(j["chi"], "chi") : cplx(0.0, 0.0);
  try {
    return StellarState(std::move(core), alpha, chi);
  } catch (const Error& e) {
    throw Error(ErrorCode::InputError, e.what());
  }
}

inline json form_to_json(const WavefunctionForm& wf)
{
  json zeros = json::array();
  for (const cplx& z : wf.zeros) zeros.push_back(to_json(z));
  return json{{"g2", to_json(wf.g2)},
              {"g1", to_json(wf.g1)},
              {"g0", to_json(wf.g0)},
              {"zeros", zeros},
              {"leading", to_json(wf.leading)}};
}

inline WavefunctionForm form_from_json(const json& j)
{
  if (!j.is_object()) throw Error(ErrorCode::InputError, "wavefunction form must be a JSON object");
  for (const char* key : {"g2", "g1", "g0", "zeros", "leading"})
    if (!j.contains(key)) throw Error(ErrorCode::InputError, std::string("wavefunction form is missing \"") + key + "\"");
  WavefunctionForm wf;
  wf.g2 = complex_from_json(j["g2"], "g2");
  wf.g1 = complex_from_json(j["g1"], "g1");
  wf.g0 = complex_from_json(j["g0"], "g0");
  wf.leading = complex_from_json(j["leading"], "leading");
  if (!j["zeros"].is_array()) throw Error(ErrorCode::InputError, "\"zeros\" must be an array");
  for (const json& z : j["zeros"]) wf.zeros.push_back(complex_from_json(z, "zero"));
  try {
    wf.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::InputError, e.what());
  }
  return wf;
}

inline json read_json_file(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InputError, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InputError, "malformed JSON in " + path.string() + ": " + e.what());
  }
}

/// Writes to a sibling temporary file and renames it over the target.
inline void write_atomic(const std::filesystem::path& path, std::string_view content)
{
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::InputError, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::InputError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::InputError, "cannot move output into place at " + path.string());
  }
}

inline std::vector<double> parse_doubles(std::string_view text, std::size_t expected, std::string_view what)
{
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    std::string_view item = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    double v = 0.0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || res.ec != std::errc() || res.ptr != item.data() + item.size() || !std::isfinite(v))
      throw Error(ErrorCode::InputError, std::string(what) + ": cannot parse \"" + std::string(item) + "\"");
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (out.size() != expected)
    throw Error(ErrorCode::InputError,
                std::string(what) + " expects " + std::to_string(expected) + " comma-separated numbers");
  return out;
}

inline QuadraticHamiltonian parse_hamiltonian(std::string_view text)
{
  const std::vector<double> c = parse_doubles(text, 6, "--hamiltonian");
  return {c[0], c[1], c[2], c[3], c[4], c[5]};
}

/// "T0,T1,N" -> N equally spaced times including both ends.
inline std::vector<double> parse_time_grid(std::string_view text)
{
  const std::vector<double> c = parse_doubles(text, 3, "--time");
  if (c[2] < 2 || c[2] != std::floor(c[2])) throw Error(ErrorCode::InputError, "--time needs an integer N >= 2");
  if (!(c[1] > c[0]) || c[0] < 0.0) throw Error(ErrorCode::InputError, "--time needs 0 <= T0 < T1");
  const auto n = static_cast<std::size_t>(c[2]);
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = c[0] + (c[1] - c[0]) * static_cast<double>(i) / static_cast<double>(n - 1);
  return t;
}

/// Trajectory rows "t,k,re,im,method".
inline void append_trajectory_csv(std::string& out, const ZeroTrajectory& traj)
{
  for (std::size_t i = 0; i < traj.times.size(); ++i)
    for (std::size_t k = 0; k < traj.rank(); ++k) {
      out += format_double(traj.times[i]);
      out += ',';
      out += std::to_string(k);
      out += ',';
      out += format_double(traj.paths[k][i].real());
      out += ',';
      out += format_double(traj.paths[k][i].imag());
      out += ',';
      out += to_string(traj.method);
      out += '\n';
    }
}

} // namespace stellar::io

#endif // STELLAR_IO_HPP

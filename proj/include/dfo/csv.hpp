#ifndef DFO_CSV_HPP
#define DFO_CSV_HPP

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "dfo/core.hpp"
#include "dfo/trace.hpp"

namespace dfo {

inline constexpr std::string_view kTraceHeader = "iter,evals,f_current,f_best,grad_norm_approx,delta,C,tau,step_status";

namespace detail {

// Shortest decimal form that parses back to the same double.
inline void append_double(std::string& out, double v) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw IoError("cannot format value");
  out.append(buf.data(), end);
}

template <class T>
T parse_number(std::string_view field, long line) {
  T v{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    throw IoError("trace line " + std::to_string(line) + ": bad number '" + std::string(field) + "'");
  return v;
}

} // namespace detail

inline std::string trace_to_csv(const Trace& trace) {
  std::string out(kTraceHeader);
  out += '\n';
  for (const auto& r : trace) {
    out += std::to_string(r.iter);
    out += ',';
    out += std::to_string(r.evals);
    for (double v : {r.f_current, r.f_best, r.grad_norm_approx, r.delta, r.C, r.tau}) {
      out += ',';
      detail::append_double(out, v);
    }
    out += ',';
    out += to_string(r.step_status);
    out += '\n';
  }
  return out;
}

inline void emit_csv(const Trace& trace, const std::string& path) {
  require(!trace.empty(), "cannot write an empty trace");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << trace_to_csv(trace);
  if (!out) throw IoError("write failed: " + path);
}

inline Trace trace_from_csv(std::string_view text) {
  Trace trace;
  long line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != kTraceHeader) throw IoError("unexpected trace header");
      continue;
    }
    std::vector<std::string_view> f;
    std::size_t a = 0;
    while (true) {
      const std::size_t c = line.find(',', a);
      f.push_back(line.substr(a, c == std::string_view::npos ? std::string_view::npos : c - a));
      if (c == std::string_view::npos) break;
      a = c + 1;
    }
    if (f.size() != 9) throw IoError("trace line " + std::to_string(line_no) + ": expected 9 fields");
    TraceRecord r;
    r.iter = detail::parse_number<long>(f[0], line_no);
    r.evals = detail::parse_number<long>(f[1], line_no);
    r.f_current = detail::parse_number<double>(f[2], line_no);
    r.f_best = detail::parse_number<double>(f[3], line_no);
    r.grad_norm_approx = detail::parse_number<double>(f[4], line_no);
    r.delta = detail::parse_number<double>(f[5], line_no);
    r.C = detail::parse_number<double>(f[6], line_no);
    r.tau = detail::parse_number<double>(f[7], line_no);
    const auto st = parse_step_status(f[8]);
    if (!st) throw IoError("trace line " + std::to_string(line_no) + ": unknown status '" + std::string(f[8]) + "'");
    r.step_status = *st;
    trace.push_back(r);
  }
  if (line_no == 0) throw IoError("empty trace file");
  return trace;
}

inline Trace read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return trace_from_csv(ss.str());
}

} // namespace dfo

#endif // DFO_CSV_HPP

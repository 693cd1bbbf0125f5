#include "mirrorvi/trace_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "mirrorvi/errors.hpp"

namespace mirrorvi {
namespace {

constexpr char kHeader[] = "k,L_accepted,inner_trials,weight,S_cumulative,oracle_calls";
constexpr char kMagic[8] = {'M', 'V', 'I', 'T', 'E', 'R', '0', '1'};

static_assert(std::endian::native == std::endian::little,
              "iterate sidecar I/O assumes a little-endian host");

template <class T>
T parse_field(const std::string& s, std::size_t line) {
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("trace line " + std::to_string(line) + ": cannot parse '" + s + "'");
  }
  return value;
}

void write_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint64_t read_u64(std::istream& in) {
  std::uint64_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw ConfigError("iterates: truncated header");
  return v;
}

void write_vec(std::ostream& out, const Vector& v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}

Vector read_vec(std::istream& in, Index n) {
  Vector v(n);
  if (!in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)))) {
    throw ConfigError("iterates: truncated body");
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw InputError("format_double: conversion failed");
  return std::string(buf.data(), ptr);
}

void write_trace_csv(std::ostream& out, const SolveResult& result) {
  out << kHeader << '\n';
  for (const IterationRecord& r : result.trace) {
    out << r.k << ',' << format_double(r.L_accepted) << ',' << r.inner_trials << ','
        << format_double(r.weight) << ',' << format_double(r.S_cumulative) << ','
        << r.oracle_calls_so_far << '\n';
  }
}

std::vector<TraceRow> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kHeader) throw ConfigError("trace: missing or unexpected header");
  std::vector<TraceRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) cols.push_back(col);
    if (cols.size() != 6) throw ConfigError("trace line " + std::to_string(lineno) + ": expected 6 columns");
    TraceRow row;
    row.k = parse_field<std::size_t>(cols[0], lineno);
    row.L_accepted = parse_field<double>(cols[1], lineno);
    row.inner_trials = parse_field<int>(cols[2], lineno);
    row.weight = parse_field<double>(cols[3], lineno);
    row.S_cumulative = parse_field<double>(cols[4], lineno);
    row.oracle_calls = parse_field<std::uint64_t>(cols[5], lineno);
    rows.push_back(row);
  }
  return rows;
}

void write_iterates(std::ostream& out, const SolveResult& result) {
  const Index dim = result.x0.size();
  for (const IterationRecord& r : result.trace) {
    if (r.y_next.size() != dim || r.x_next.size() != dim || r.g_y.size() != dim) {
      throw InputError("write_iterates: result was produced without record_trace");
    }
  }
  out.write(kMagic, sizeof kMagic);
  write_u64(out, static_cast<std::uint64_t>(dim));
  write_u64(out, result.trace.size());
  write_vec(out, result.x0);
  for (const IterationRecord& r : result.trace) {
    write_vec(out, r.y_next);
    write_vec(out, r.x_next);
    write_vec(out, r.g_y);
  }
}

IterateSidecar read_iterates(std::istream& in) {
  char magic[sizeof kMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw ConfigError("iterates: bad magic");
  }
  const auto dim = static_cast<Index>(read_u64(in));
  const std::uint64_t count = read_u64(in);
  IterateSidecar side;
  side.x0 = read_vec(in, dim);
  for (std::uint64_t i = 0; i < count; ++i) {
    side.y_next.push_back(read_vec(in, dim));
    side.x_next.push_back(read_vec(in, dim));
    side.g_y.push_back(read_vec(in, dim));
  }
  return side;
}

SolveResult result_from_trace(const std::vector<TraceRow>& rows, const IterateSidecar& iterates,
                              const ProxSetup& setup) {
  if (rows.size() != iterates.y_next.size()) throw ConfigError("trace and iterates disagree on length");
  if (iterates.x0.size() != setup.dim()) throw ShapeError("iterates do not match the instance dimension");
  if (rows.empty()) throw InputError("result_from_trace: empty trace");
  SolveResult res;
  res.status = SolveStatus::Converged;
  res.x0 = iterates.x0;
  res.x_final = iterates.x0;
  res.field_sum = Vector::Zero(setup.dim());
  res.R_sq_used = prox_radius_sq(setup);
  res.R_sq_pairwise = bregman_diameter_sq(setup);
  Vector y_sum = Vector::Zero(setup.dim());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const TraceRow& row = rows[i];
    IterationRecord rec;
    rec.k = row.k;
    rec.L_accepted = row.L_accepted;
    rec.inner_trials = row.inner_trials;
    rec.weight = row.weight;
    rec.S_cumulative = row.S_cumulative;
    rec.oracle_calls_so_far = row.oracle_calls;
    rec.y_next = iterates.y_next[i];
    rec.x_next = iterates.x_next[i];
    rec.g_y = iterates.g_y[i];
    res.S_N += row.weight;
    y_sum += row.weight * rec.y_next;
    res.field_sum += row.weight * rec.g_y;
    res.field_dot_sum += row.weight * rec.g_y.dot(rec.y_next);
    res.x_final = rec.x_next;
    res.max_accepted_L = i == 0 ? row.L_accepted : std::max(res.max_accepted_L, row.L_accepted);
    res.min_accepted_L = i == 0 ? row.L_accepted : std::min(res.min_accepted_L, row.L_accepted);
    res.trace.push_back(std::move(rec));
  }
  res.N = rows.size();
  res.y_tilde = y_sum / res.S_N;
  return res;
}

void write_trace_file(const std::string& path, const SolveResult& result) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open trace file for writing: " + path);
  write_trace_csv(out, result);
}

std::vector<TraceRow> read_trace_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open trace file: " + path);
  return read_trace_csv(in);
}

void write_iterates_file(const std::string& path, const SolveResult& result) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open iterates file for writing: " + path);
  write_iterates(out, result);
}

IterateSidecar read_iterates_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open iterates file: " + path);
  return read_iterates(in);
}

}  // namespace mirrorvi

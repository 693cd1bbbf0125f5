#pragma once

// Trace persistence.
//
// The trace is CSV with one row per accepted iteration:
//   k,L_accepted,inner_trials,weight,S_cumulative,oracle_calls
// Reals are written in shortest round-trip form, so parsing recovers the
// exact doubles. Iterate vectors go to an optional binary sidecar:
//   "MVITER01" | u64 dim | u64 count | x0 | count x (y_next, x_next, g_y)
// with every double in little-endian IEEE-754 binary64.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mirrorvi/geometry.hpp"
#include "mirrorvi/solver.hpp"

namespace mirrorvi {

struct TraceRow {
  std::size_t k = 0;
  double L_accepted = 0.0;
  int inner_trials = 0;
  double weight = 0.0;
  double S_cumulative = 0.0;
  std::uint64_t oracle_calls = 0;
};

struct IterateSidecar {
  Vector x0;
  std::vector<Vector> y_next;
  std::vector<Vector> x_next;
  std::vector<Vector> g_y;
};

/// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);

void write_trace_csv(std::ostream& out, const SolveResult& result);
std::vector<TraceRow> read_trace_csv(std::istream& in);

/// Throws InputError when the result has no recorded iterates.
void write_iterates(std::ostream& out, const SolveResult& result);
IterateSidecar read_iterates(std::istream& in);

/// Rebuilds a SolveResult (aggregates, y_tilde, trace with iterates) from a
/// stored trace and sidecar. Status is left as Converged; the caller knows
/// nothing else about how the run ended.
SolveResult result_from_trace(const std::vector<TraceRow>& rows, const IterateSidecar& iterates,
                              const ProxSetup& setup);

void write_trace_file(const std::string& path, const SolveResult& result);
std::vector<TraceRow> read_trace_file(const std::string& path);
void write_iterates_file(const std::string& path, const SolveResult& result);
IterateSidecar read_iterates_file(const std::string& path);

}  // namespace mirrorvi

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cgn/diagnostics.hpp"
#include "cgn/solver.hpp"

namespace cgn {

/// Identifying header fields shared by trace and report files.
struct TraceMetadata {
    std::string problem;
    std::uint64_t seed = 0;
    /// When false the generated= field is omitted and the output is
    /// byte-for-byte reproducible.
    bool include_timestamp = true;
};

/// Column names of the per-iteration rows, in file order.
extern const char* const kTraceHeader;

/// Emits: one `# cgn-trace` signature line, an optional note when the start
/// point had to be projected, the CSV header, one row per outer iteration
/// (floating-point values at 17 significant digits, which round-trips
/// doubles exactly), and a closing `# status=` summary line.
void write_trace(std::ostream& os, const TraceMetadata& meta, const RunOutcome& outcome);

/// A re-parsed trace. Iterate coordinates are not part of the file format,
/// so the x field of each record is left empty.
struct ParsedTrace {
    std::string problem;
    std::uint64_t seed = 0;
    bool had_timestamp = false;
    bool projected_x0 = false;
    std::vector<IterateRecord> records;
    std::string status;
};

/// Inverse of write_trace; throws std::runtime_error on malformed input.
ParsedTrace parse_trace(std::istream& is);

/// Report file for certification runs: signature line, CSV header
/// `check,max_violation,tolerance,samples,skipped,pass`, one row per check,
/// and a closing `# overall=pass|fail` line.
void write_reports(std::ostream& os, const TraceMetadata& meta,
                   const std::vector<CheckReport>& reports);

}  // namespace cgn

#include "cgn/trace.hpp"

#include <cstdio>
#include <ctime>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace cgn {

const char* const kTraceHeader =
    "k,objective,mu,step_norm,backtracks,inner_iterations,criticality,cumulative_step";

namespace {

// 17 significant digits: the shortest width that round-trips every finite
// double through decimal text.
std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string timestamp_utc() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

// std::stod/stoi signal garbage with logic_error types; fold every failure
// mode into the runtime_error this parser promises.
double parse_double(const std::string& tok) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != tok.size() || tok.empty())
        throw std::runtime_error("trace parse: bad number '" + tok + "'");
    return v;
}

int parse_int(const std::string& tok) {
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(tok, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != tok.size() || tok.empty())
        throw std::runtime_error("trace parse: bad count '" + tok + "'");
    return v;
}

}  // namespace

void write_trace(std::ostream& os, const TraceMetadata& meta, const RunOutcome& outcome) {
    os << "# cgn-trace problem=" << meta.problem << " seed=" << meta.seed;
    if (meta.include_timestamp) os << " generated=" << timestamp_utc();
    os << '\n';
    if (outcome.projected_x0) os << "# note=projected-infeasible-x0\n";
    os << kTraceHeader << '\n';
    for (const IterateRecord& r : outcome.trace) {
        os << r.k << ',' << fmt17(r.objective) << ',' << fmt17(r.mu) << ','
           << fmt17(r.step_norm) << ',' << r.backtracks << ',' << r.inner_iterations << ','
           << fmt17(r.criticality) << ',' << fmt17(r.cumulative_step) << '\n';
    }
    os << "# status=" << to_string(outcome.status) << " iterations=" << outcome.trace.size()
       << " final_objective=" << fmt17(outcome.final_objective) << '\n';
}

ParsedTrace parse_trace(std::istream& is) {
    ParsedTrace out;
    std::string line;
    if (!std::getline(is, line) || line.rfind("# cgn-trace", 0) != 0)
        throw std::runtime_error("trace parse: missing signature line");
    for (const std::string& tok : split(line.substr(11), ' ')) {
        if (tok.empty()) continue;
        const std::size_t eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = tok.substr(0, eq);
        const std::string val = tok.substr(eq + 1);
        if (key == "problem")
            out.problem = val;
        else if (key == "seed") {
            try {
                out.seed = std::stoull(val);
            } catch (const std::exception&) {
                throw std::runtime_error("trace parse: bad seed '" + val + "'");
            }
        } else if (key == "generated")
            out.had_timestamp = true;
    }

    bool saw_header = false;
    bool saw_status = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.rfind("# note=projected-infeasible-x0", 0) == 0)
                out.projected_x0 = true;
            else if (line.rfind("# status=", 0) == 0) {
                const std::string rest = line.substr(9);
                out.status = rest.substr(0, rest.find(' '));
                saw_status = true;
            }
            continue;
        }
        if (!saw_header) {
            if (line != kTraceHeader)
                throw std::runtime_error("trace parse: unexpected header row '" + line + "'");
            saw_header = true;
            continue;
        }
        const std::vector<std::string> fields = split(line, ',');
        if (fields.size() != 8)
            throw std::runtime_error("trace parse: expected 8 columns, got " +
                                     std::to_string(fields.size()));
        IterateRecord r;
        r.k = parse_int(fields[0]);
        r.objective = parse_double(fields[1]);
        r.mu = parse_double(fields[2]);
        r.step_norm = parse_double(fields[3]);
        r.backtracks = parse_int(fields[4]);
        r.inner_iterations = parse_int(fields[5]);
        r.criticality = parse_double(fields[6]);
        r.cumulative_step = parse_double(fields[7]);
        out.records.push_back(std::move(r));
    }
    if (!saw_header) throw std::runtime_error("trace parse: no header row");
    if (!saw_status) throw std::runtime_error("trace parse: no status line");
    return out;
}

void write_reports(std::ostream& os, const TraceMetadata& meta,
                   const std::vector<CheckReport>& reports) {
    os << "# cgn-report problem=" << meta.problem << " seed=" << meta.seed;
    if (meta.include_timestamp) os << " generated=" << timestamp_utc();
    os << '\n';
    os << "check,max_violation,tolerance,samples,skipped,pass\n";
    bool all_pass = true;
    for (const CheckReport& r : reports) {
        os << r.name << ',' << fmt17(r.max_violation) << ',' << fmt17(r.tolerance) << ','
           << r.samples << ',' << r.skipped << ',' << (r.pass ? 1 : 0) << '\n';
        all_pass = all_pass && r.pass;
    }
    os << "# overall=" << (all_pass ? "pass" : "fail") << '\n';
}

}  // namespace cgn

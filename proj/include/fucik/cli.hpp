#pragma once

// Command layer behind the fucik binary.  Each command echoes its resolved
// configuration into its artifacts; identical commands and seeds produce
// byte-identical files.  Exit codes: 0 success, 2 validation failure
// (InvalidEps / HypothesisViolated / RegionError), 3 no convergence,
// 4 parse error.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "fucik/classical.hpp"
#include "fucik/curve.hpp"
#include "fucik/expr.hpp"
#include "fucik/nonhomog.hpp"

namespace fucik {

struct SpectrumListCmd {
    int m_bound = 8;
    int n_bound = 8;
    std::string out;  // optional JSON artifact
};

struct CurveTraceCmd {
    int k = 1;
    Side side = Side::Lower;
    double eps_first = 0.1;
    double eps_second = 0.1;
    TruncationSpec trunc = TruncationSpec::with_bounds(32, 32, 2.0);
    double r_max = 100.0;
    int n_r = 40;
    MaximizerConfig mcfg;
    std::string out;  // prefix: writes <out>.csv and <out>.json
};

struct CurveCheckCmd {
    double a = 0.0;
    double b = 0.0;
    int k = 1;
    std::vector<std::string> curves_in;  // JSON bundles (lower and upper)
};

struct Validate1dCmd {
    Family family = Family::Dirichlet;
    int index = 2;
    int n_samples = 50;
    std::string out;  // optional CSV
};

struct SolveCmd {
    int k = 1;
    Side side = Side::Lower;
    double a = 0.5;
    double b = 0.5;
    std::string p_spec = "zero";
    TruncationSpec trunc = TruncationSpec::with_bounds(32, 32, 2.0);
    MaximizerConfig mcfg;
    std::string out;  // prefix: writes <out>.json and <out>_u0.csv
};

struct OracleCmd {
    std::string suite = "ratio";
    int dim = 6;
    std::uint64_t seed = 1;
    std::string out;
};

using Command = std::variant<SpectrumListCmd, CurveTraceCmd, CurveCheckCmd, Validate1dCmd,
                             SolveCmd, OracleCmd>;

// parse_p: expression front end for user-supplied p(s,t,u).
PExpression parse_p(const std::string& source);

int run(const Command& command, std::ostream& out);

}  // namespace fucik

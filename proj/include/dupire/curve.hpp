#pragma once

#include "dupire/config.hpp"

#include <cmath>
#include <iosfwd>
#include <string>
#include <vector>

namespace dupire {

// One grid point; methods that were not requested stay unset (empty CSV
// field), failed evaluations hold NaN.
struct CurveRow {
    double T = 0.0;
    double k = 0.0;
    double exact = std::nan("");
    double saddle = std::nan("");
    double asymptote = std::nan("");
};

struct CurveResult {
    std::vector<CurveRow> rows;         // T-major, then ascending k
    std::vector<std::string> failures;  // one message per failed (k, T, method)
    std::size_t evaluated = 0;          // requested (k, T, method) points
};

// Worker count: DUPIRE_WINGS_THREADS if set and positive, else the hardware
// concurrency.
unsigned curve_threads();

double evaluate_method(const ModelSpec& model, VolMethod method, double k, double T,
                       const QuadratureConfig& q);

CurveResult compute_curve(const RunConfig& cfg, unsigned threads = curve_threads());

// Header "k,exact,saddle,asymptote", prefixed by "T," when several maturities
// are requested. Values use 17 significant digits.
void write_curve_csv(std::ostream& out, const RunConfig& cfg, const CurveResult& result);

std::string format_double(double x);

}  // namespace dupire

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "cubosc/expansion.hpp"
#include "cubosc/oscillator.hpp"
#include "cubosc/sde.hpp"

namespace cubosc::io {

// Shortest decimal representation that round-trips a double, so identical
// runs produce byte-identical files.
std::string format_double(double v);

// Header "t, x0, x1, ..., xN, Xn_sigma"; the truncated sum uses the full
// computed order.  extra_name/extra adds one trailing column when non-null
// (the simulate command appends the Euler-Maruyama oracle path this way).
void write_expansion_csv(const std::string& file, const expansion::CoefficientPaths& coeffs,
                         double sigma, const std::string& extra_name = {},
                         const std::vector<double>* extra = nullptr);

// Header "t, x, xi"; rows stop at the blowup index for exploded runs.
void write_sde_csv(const std::string& file, const sde::SdeRunResult& run);

// Two-column sweep, e.g. "q, mu".
void write_pairs_csv(const std::string& file, const std::string& header_a,
                     const std::string& header_b, const std::vector<double>& a,
                     const std::vector<double>& b);

// Arbitrary named columns of equal length, e.g. the deterministic profile
// (t, x0, u1, u2, w1, w2).
void write_columns_csv(const std::string& file, const std::vector<std::string>& names,
                       const std::vector<const std::vector<double>*>& columns);

nlohmann::json params_json(const oscillator::OscillatorParams& p);
void write_json(const std::string& file, const nlohmann::json& j);

}  // namespace cubosc::io

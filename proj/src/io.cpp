#include "cubosc/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace cubosc::io {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_or_throw(const std::string& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("io: cannot open " + file + " for writing");
  return out;
}

}  // namespace

void write_expansion_csv(const std::string& file, const expansion::CoefficientPaths& coeffs,
                         double sigma, const std::string& extra_name,
                         const std::vector<double>* extra) {
  const int order = coeffs.order();
  if (order < 0) throw std::invalid_argument("io: empty coefficient paths");
  const std::vector<double> total = expansion::truncated_sum(coeffs, sigma, order);
  std::ofstream out = open_or_throw(file);

  out << "t";
  for (int n = 0; n <= order; ++n) out << ", x" << n;
  out << ", Xn_sigma";
  if (extra != nullptr) out << ", " << extra_name;
  out << "\n";

  const std::size_t rows = coeffs.paths[0].size();
  for (std::size_t k = 0; k < rows; ++k) {
    out << format_double(coeffs.grid.t(static_cast<int>(k)));
    for (int n = 0; n <= order; ++n)
      out << ", " << format_double(coeffs.paths[static_cast<std::size_t>(n)][k]);
    out << ", " << format_double(total[k]);
    // A truncated extra column (an exploded run) pads with NaN, not zero.
    if (extra != nullptr)
      out << ", " << format_double(k < extra->size() ? (*extra)[k] : std::nan(""));
    out << "\n";
  }
  if (!out) throw std::runtime_error("io: write failed for " + file);
}

void write_sde_csv(const std::string& file, const sde::SdeRunResult& run) {
  std::ofstream out = open_or_throw(file);
  out << "t, x, xi\n";
  for (std::size_t k = 0; k < run.x.size(); ++k)
    out << format_double(run.grid.t(static_cast<int>(k))) << ", " << format_double(run.x[k])
        << ", " << format_double(run.xi[k]) << "\n";
  if (!out) throw std::runtime_error("io: write failed for " + file);
}

void write_pairs_csv(const std::string& file, const std::string& header_a,
                     const std::string& header_b, const std::vector<double>& a,
                     const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("io: column size mismatch");
  std::ofstream out = open_or_throw(file);
  out << header_a << ", " << header_b << "\n";
  for (std::size_t k = 0; k < a.size(); ++k)
    out << format_double(a[k]) << ", " << format_double(b[k]) << "\n";
  if (!out) throw std::runtime_error("io: write failed for " + file);
}

void write_columns_csv(const std::string& file, const std::vector<std::string>& names,
                       const std::vector<const std::vector<double>*>& columns) {
  if (names.size() != columns.size() || columns.empty())
    throw std::invalid_argument("io: column/name mismatch");
  const std::size_t rows = columns[0]->size();
  for (const auto* col : columns)
    if (col->size() != rows) throw std::invalid_argument("io: column size mismatch");

  std::ofstream out = open_or_throw(file);
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? ", " : "") << names[i];
  out << "\n";
  for (std::size_t k = 0; k < rows; ++k) {
    for (std::size_t i = 0; i < columns.size(); ++i)
      out << (i ? ", " : "") << format_double((*columns[i])[k]);
    out << "\n";
  }
  if (!out) throw std::runtime_error("io: write failed for " + file);
}

nlohmann::json params_json(const oscillator::OscillatorParams& p) {
  return nlohmann::json{{"a", p.a},
                        {"c", p.c},
                        {"y", p.y},
                        {"eta_sign", p.eta_sign},
                        {"B", p.big_b},
                        {"q", p.q.q},
                        {"omega", p.omega},
                        {"period", p.period}};
}

void write_json(const std::string& file, const nlohmann::json& j) {
  std::ofstream out = open_or_throw(file);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("io: write failed for " + file);
}

}  // namespace cubosc::io

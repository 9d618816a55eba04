#include "pol/inference.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace pol {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

double GammaPosterior::predictive_mean() const {
  if (alpha <= 1.0) return std::numeric_limits<double>::infinity();
  return beta / (alpha - 1.0);
}

GammaPosterior fit_exponential(std::span<const double> data, const GammaPosterior& prior) {
  if (!(prior.alpha > 0.0) || !(prior.beta > 0.0)) {
    throw std::invalid_argument("gamma prior parameters must be positive");
  }
  if (data.empty()) throw std::invalid_argument("fit_exponential needs at least one observation");
  double sum = 0.0;
  for (std::size_t j = 0; j < data.size(); ++j) {
    if (!(data[j] > 0.0) || !std::isfinite(data[j])) {
      throw std::invalid_argument("observation " + std::to_string(j) + " is not a positive duration");
    }
    sum += data[j];
  }
  return {prior.alpha + static_cast<double>(data.size()), prior.beta + sum};
}

double posterior_predictive_sample(const GammaPosterior& post, Rng& rng) {
  for (;;) {
    const double m = std::gamma_distribution<double>(post.alpha, 1.0 / post.beta)(rng);
    if (!(m > 0.0)) continue;
    const double d = std::exponential_distribution<double>(m)(rng);
    if (d > 0.0) return d;
  }
}

std::vector<double> load_trace(const std::string& path, const std::string& column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file '" + path + "'");

  std::vector<double> out;
  std::string line;
  long line_no = 0;
  long col = -1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;

    std::string field = t;
    if (!column.empty()) {
      const auto cells = split_csv(t);
      if (col < 0) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
          if (cells[c] == column) col = static_cast<long>(c);
        }
        if (col < 0) {
          throw std::runtime_error(path + ":" + std::to_string(line_no) + ": header has no column '" +
                                   column + "'");
        }
        continue;
      }
      if (static_cast<std::size_t>(col) >= cells.size()) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) + ": missing column '" +
                                 column + "'");
      }
      field = cells[col];
    }

    double v = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": not a number: '" + field + "'");
    }
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": durations must be positive, got " + field);
    }
    out.push_back(v);
  }
  if (out.empty()) throw std::runtime_error("trace file '" + path + "' contains no durations");
  return out;
}

}  // namespace pol

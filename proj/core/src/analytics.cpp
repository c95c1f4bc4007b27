#include "ghzsim/analytics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "ghzsim/errors.hpp"

namespace ghzsim {
namespace analytics {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void check_eta(double eta) {
  if (!(eta >= 0.0 && eta < 1.0)) throw ConfigError("eta must lie in [0, 1)");
}

void check_prep(const PrepParams& prep) {
  if (!(prep.p0 > 0.0 && prep.p0 < 1.0)) throw ConfigError("p0 must lie in (0, 1)");
  if (!(prep.f_p > 0.0)) throw ConfigError("f_p must be positive");
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

double pair_time_s(const PrepParams& prep) {
  check_prep(prep);
  return prep.t0_s();
}

double pair_fidelity(double p0) {
  if (!(p0 > 0.0 && p0 < 1.0)) throw ConfigError("p0 must lie in (0, 1)");
  return 1.0 - p0;
}

int ladder_levels(int n) {
  if (!is_power_of_two(n) || n < 4)
    throw ConfigError("ring merging requires n a power of two with n >= 4");
  int levels = 0;
  for (int m = n; m > 2; m /= 2) ++levels;
  return levels;
}

double vacuum_coeff(int i, double eta) {
  if (i < 0) throw ConfigError("level index must be non-negative");
  check_eta(eta);
  return 2.0 * eta * (std::ldexp(1.0, i) - 1.0);
}

double vacuum_coeff_recursive(int i, double eta) {
  if (i < 0) throw ConfigError("level index must be non-negative");
  check_eta(eta);
  // c_i = 2 c_{i-1} + 2 eta with c_0 = 0 keeps the form c_i = 2 eta m_i for
  // integer m_i = 2 m_{i-1} + 1, so iterate the integer and multiply once.
  double m = 0.0;
  for (int j = 0; j < i; ++j) m = 2.0 * m + 1.0;
  return 2.0 * eta * m;
}

double connect_success(int level, double eta) {
  if (level < 1) throw ConfigError("merge level must be >= 1");
  check_eta(eta);
  double c = vacuum_coeff(level - 1, eta);
  double keep = 1.0 - eta;
  return keep * keep * (1.0 + 2.0 * eta + 2.0 * c) / (4.0 * (1.0 + c) * (1.0 + c));
}

double close_success(int top_level, double eta) {
  if (top_level < 0) throw ConfigError("level index must be non-negative");
  check_eta(eta);
  double c = vacuum_coeff(top_level, eta);
  double keep = 1.0 - eta;
  return keep * keep / (2.0 * (1.0 + c));
}

double basic_time_s(int n, double eta, double t0_s) {
  if (n < 2) throw ConfigError("ring scheme requires n >= 2");
  check_eta(eta);
  return std::ldexp(t0_s, n - 1) / std::pow(1.0 - eta, n);
}

double basic_time_log10(int n, double eta, double t0_s) {
  if (n < 2) throw ConfigError("ring scheme requires n >= 2");
  check_eta(eta);
  return std::log10(t0_s) + (n - 1) * std::log10(2.0) - n * std::log10(1.0 - eta);
}

double basic_acceptance(int n, double eta) {
  if (n < 2) throw ConfigError("ring scheme requires n >= 2");
  check_eta(eta);
  return std::pow(1.0 - eta, n) * std::ldexp(1.0, -(n - 1));
}

double improved_time_s(int n, double eta, double t0_s) {
  int levels = ladder_levels(n);
  check_eta(eta);
  double denom = close_success(levels, eta);
  for (int i = 1; i <= levels; ++i) denom *= connect_success(i, eta);
  return t0_s / denom;
}

double asymptotic_time_s(int n, double eta, double t0_s) {
  if (!is_power_of_two(n) || n < 4)
    throw ConfigError("ring merging requires n a power of two with n >= 4");
  check_eta(eta);
  if (eta == 0.0) throw std::domain_error("asymptotic form degenerates at eta = 0");
  double keep_sq = (1.0 - eta) * (1.0 - eta);
  double prefactor = 2.0 * eta * n / keep_sq;
  double exponent = std::log2(2.0 * eta * std::sqrt(double(n)) / keep_sq);
  return t0_s * prefactor * std::pow(n / 2.0, exponent);
}

double memoryless_repeats_log10(int n, double p0) {
  if (n < 1) throw ConfigError("n must be >= 1");
  if (!(p0 > 0.0 && p0 < 1.0)) throw ConfigError("p0 must lie in (0, 1)");
  return -double(n) * std::log10(p0);
}

double expected_max_vs_geom(double a_s, const PrepParams& prep) {
  check_prep(prep);
  if (a_s < 0.0) throw ConfigError("time must be non-negative");
  double m = std::floor(a_s * prep.f_p);
  // E[(G/f_p - a)^+] = (1-p0)^m (m/f_p + t0 - a) by memorylessness of G.
  double tail = std::pow(1.0 - prep.p0, m) * (m / prep.f_p + prep.t0_s() - a_s);
  return a_s + tail;
}

double modeled_block_time_s(int level, double eta, const PrepParams& prep) {
  if (level < 0) throw ConfigError("level index must be non-negative");
  check_eta(eta);
  check_prep(prep);
  double d = prep.t0_s();
  for (int i = 1; i <= level; ++i) d = expected_max_vs_geom(d, prep) / connect_success(i, eta);
  return d;
}

double modeled_improved_time_s(int n, double eta, const PrepParams& prep) {
  int levels = ladder_levels(n);
  double top = modeled_block_time_s(levels, eta, prep);
  return expected_max_vs_geom(top, prep) / close_success(levels, eta);
}

std::vector<ScalingRow> scaling_sweep(const std::vector<int>& ns, const std::vector<double>& etas,
                                      double t0_s) {
  if (!(t0_s > 0.0)) throw ConfigError("t0 must be positive");
  std::vector<ScalingRow> rows;
  for (int n : ns) {
    int levels = ladder_levels(n);
    for (double eta : etas) {
      check_eta(eta);
      ScalingRow row;
      row.n = n;
      row.eta = eta;
      row.t0_s = t0_s;
      row.basic_s = basic_time_s(n, eta, t0_s);
      row.improved_s = improved_time_s(n, eta, t0_s);
      row.quadratic_s = n * double(n) * t0_s / 2.0;
      row.asymptotic_s =
          eta == 0.0 ? std::nan("") : asymptotic_time_s(n, eta, t0_s);
      for (int i = 1; i <= levels; ++i) {
        row.connect.push_back(connect_success(i, eta));
        row.vacuum.push_back(vacuum_coeff(i, eta));
      }
      row.close = close_success(levels, eta);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string scaling_csv(const std::vector<ScalingRow>& rows) {
  size_t depth = 0;
  for (const auto& row : rows) depth = std::max(depth, row.connect.size());
  std::ostringstream os;
  os << "n,eta,t0_s,basic_s,improved_s,quadratic_s,asymptotic_s";
  for (size_t i = 1; i <= depth; ++i) os << ",p" << i;
  for (size_t i = 1; i <= depth; ++i) os << ",c" << i;
  os << ",p_close\n";
  for (const auto& row : rows) {
    os << row.n << ',' << format_double(row.eta) << ',' << format_double(row.t0_s) << ','
       << format_double(row.basic_s) << ',' << format_double(row.improved_s) << ','
       << format_double(row.quadratic_s) << ',';
    if (!std::isnan(row.asymptotic_s)) os << format_double(row.asymptotic_s);
    for (size_t i = 0; i < depth; ++i) {
      os << ',';
      if (i < row.connect.size()) os << format_double(row.connect[i]);
    }
    for (size_t i = 0; i < depth; ++i) {
      os << ',';
      if (i < row.vacuum.size()) os << format_double(row.vacuum[i]);
    }
    os << ',' << format_double(row.close) << '\n';
  }
  return os.str();
}

std::string scaling_json(const std::vector<ScalingRow>& rows) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json j;
    j["n"] = row.n;
    j["eta"] = row.eta;
    j["t0_s"] = row.t0_s;
    j["basic_s"] = row.basic_s;
    j["improved_s"] = row.improved_s;
    j["quadratic_s"] = row.quadratic_s;
    if (std::isnan(row.asymptotic_s))
      j["asymptotic_s"] = nullptr;
    else
      j["asymptotic_s"] = row.asymptotic_s;
    j["connect"] = row.connect;
    j["vacuum"] = row.vacuum;
    j["close"] = row.close;
    out.push_back(std::move(j));
  }
  return out.dump(2) + "\n";
}

}  // namespace analytics
}  // namespace ghzsim

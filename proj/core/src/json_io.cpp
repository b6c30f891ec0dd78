#include "ergolab/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace ergolab::io {

std::string fmt_double(double v) {
  char buf[40];
  const int len = std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

std::string rational_to_string(const products::Rational& r) {
  return numerator(r).str() + "/" + denominator(r).str();
}

products::Rational rational_from_string(const std::string& s) {
  const auto slash = s.find('/');
  if (slash == std::string::npos) return products::Rational(products::BigInt(s));
  const products::BigInt num(s.substr(0, slash));
  const products::BigInt den(s.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("rational_from_string: zero denominator");
  return products::Rational(num, den);
}

json odometer_spec_to_json(const products::OdometerSpec& spec) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["lambda"] = rational_to_string(spec.lambda);
  j["moduli"] = spec.moduli;
  return j;
}

products::OdometerSpec odometer_spec_from_json(const json& j) {
  return products::OdometerSpec(rational_from_string(j.at("lambda").get<std::string>()),
                                j.at("moduli").get<std::vector<long long>>());
}

json condition_report_to_json(const products::OdometerSpec& spec,
                              const products::ConditionReport& rep) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["lambda"] = rational_to_string(spec.lambda);
  j["moduli"] = spec.moduli;
  j["circ"] = {{"holds", rep.cond_circ.holds},
               {"sum", rep.cond_circ.value},
               {"terms", rep.cond_circ.terms}};
  const auto rows = [](const std::vector<products::ConditionReport::MassRow>& in) {
    json arr = json::array();
    for (const auto& row : in) {
      arr.push_back({{"n", row.n},
                     {"mass", rational_to_string(row.mass)},
                     {"mass_value", row.mass.convert_to<double>()},
                     {"threshold", rational_to_string(row.threshold)},
                     {"holds", row.holds}});
    }
    return arr;
  };
  j["bullet"] = rows(rep.cond_bullet);
  j["star"] = rows(rep.cond_star);
  j["all_hold"] = rep.all_hold();
  return j;
}

json witness_report_to_json(const products::WitnessReport& rep) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["iterate"] = rep.iterate;
  j["prefix_period_ok"] = rep.prefix_period_ok;
  j["lattice_confirmed"] = rep.lattice_confirmed;
  j["points_checked"] = rep.points_checked;
  j["exhaustive"] = rep.exhaustive;
  j["head_mass"] = rational_to_string(rep.head_mass);
  j["mass"] = rational_to_string(rep.mass);
  j["mass_value"] = rep.mass.convert_to<double>();
  j["achieved_delta"] = rational_to_string(rep.achieved_delta);
  j["delta_bound"] = rational_to_string(rep.delta_bound);
  j["mass_ok"] = rep.mass_ok;
  return j;
}

json gaussian_space_to_json(const gaussian::GaussianSpace& space) {
  json j;
  j["eigs"] = std::vector<double>(space.eigs.data(), space.eigs.data() + space.eigs.size());
  return j;
}

gaussian::GaussianSpace gaussian_space_from_json(const json& j) {
  const auto eigs = j.at("eigs").get<std::vector<double>>();
  gaussian::Vector v(static_cast<Eigen::Index>(eigs.size()));
  for (std::size_t i = 0; i < eigs.size(); ++i) v[static_cast<Eigen::Index>(i)] = eigs[i];
  return gaussian::GaussianSpace(std::move(v));
}

json affine_map_to_json(const gaussian::AffineMap& map) {
  json j;
  j["f"] = std::vector<double>(map.f.data(), map.f.data() + map.f.size());
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(map.V.size()));
  for (int r = 0; r < map.V.rows(); ++r)
    for (int c = 0; c < map.V.cols(); ++c) v.push_back(map.V(r, c));
  j["V"] = v;
  return j;
}

gaussian::AffineMap affine_map_from_json(const json& j) {
  const auto f = j.at("f").get<std::vector<double>>();
  const auto v = j.at("V").get<std::vector<double>>();
  const int d = static_cast<int>(f.size());
  if (v.size() != static_cast<std::size_t>(d) * static_cast<std::size_t>(d))
    throw std::invalid_argument("affine_map_from_json: V must be d*d row-major");
  gaussian::Vector fv(d);
  gaussian::Matrix vm(d, d);
  for (int i = 0; i < d; ++i) fv[i] = f[static_cast<std::size_t>(i)];
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) vm(r, c) = v[static_cast<std::size_t>(r * d + c)];
  return gaussian::AffineMap(std::move(fv), std::move(vm));
}

CsvDoc::CsvDoc(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvDoc::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size())
    throw std::invalid_argument("CsvDoc: row width does not match header");
  rows_.push_back(std::move(cells));
}

std::string CsvDoc::str() const {
  std::string out;
  const auto append_row = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out.push_back(',');
      out += cells[i];
    }
    out.push_back('\n');
  };
  append_row(header_);
  for (const auto& row : rows_) append_row(row);
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("write_file: cannot open " + path);
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw std::runtime_error("write_file: short write to " + path);
}

}  // namespace ergolab::io

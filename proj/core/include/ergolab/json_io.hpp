#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "ergolab/gaussian.hpp"
#include "ergolab/products.hpp"

namespace ergolab::io {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Canonical %.17g rendering used for every double written to an artifact,
/// so identical runs produce identical bytes.
std::string fmt_double(double v);

std::string rational_to_string(const products::Rational& r);  // "num/den"
products::Rational rational_from_string(const std::string& s);

json odometer_spec_to_json(const products::OdometerSpec& spec);
products::OdometerSpec odometer_spec_from_json(const json& j);

json condition_report_to_json(const products::OdometerSpec& spec,
                              const products::ConditionReport& rep);

json witness_report_to_json(const products::WitnessReport& rep);

json gaussian_space_to_json(const gaussian::GaussianSpace& space);
gaussian::GaussianSpace gaussian_space_from_json(const json& j);

json affine_map_to_json(const gaussian::AffineMap& map);  // V row-major
gaussian::AffineMap affine_map_from_json(const json& j);

/// CSV document with a header row, ',' delimiter, '.' decimal point and LF
/// line endings.
class CsvDoc {
 public:
  explicit CsvDoc(std::vector<std::string> header);
  void add_row(std::vector<std::string> cells);
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Binary-mode whole-file write (no platform newline translation).
void write_file(const std::string& path, const std::string& content);

}  // namespace ergolab::io

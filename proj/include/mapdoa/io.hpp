#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "mapdoa/model.hpp"

namespace mapdoa {

// Scenario files are JSON. Complex values are [re, im] pairs; a bare number
// is accepted where the value is real.
nlohmann::json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);

// Complex matrices as CSV with real/imag column pairs: row m holds
// re(x_{m,1}), im(x_{m,1}), re(x_{m,2}), ...
void write_complex_csv(const ComplexMatrix& matrix, std::ostream& out);
ComplexMatrix read_complex_csv(std::istream& in);
void save_complex_csv(const ComplexMatrix& matrix, const std::string& path);
ComplexMatrix load_complex_csv(const std::string& path);

}  // namespace mapdoa

#pragma once

#include "addbo/posterior.hpp"

#include <iosfwd>
#include <string>

namespace addbo {

// Shortest round-trippable-enough text for CSV cells ("%.12g"; "inf" for infinity).
std::string format_real(double value);

// Reads "x_1,...,x_D,y" with a header row. Throws ParseError with the line
// number on malformed rows and on files without data rows.
ObservationSet read_observations_csv(std::istream& in);
void write_observations_csv(std::ostream& out, const ObservationSet& obs);

}  // namespace addbo

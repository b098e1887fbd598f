#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "regloc/geometry.hpp"

namespace regloc::text {

/// Shortest decimal form that parses back to the same double.
std::string formatDouble(double value);

double parseDouble(std::string_view token);
long long parseInteger(std::string_view token);

/// Splits on `sep`, trimming blanks around each field. Empty input yields no fields.
std::vector<std::string_view> split(std::string_view line, char sep);
std::string_view trim(std::string_view s);

/// "x,y"
Point2 parsePoint(std::string_view token);
/// "x1,y1 x2,y2 ..."
std::vector<Point2> parsePointList(std::string_view list);
std::string formatPointList(const std::vector<Point2>& points);

/// Comma separated reals, e.g. a sigma grid "0.1,0.2,0.5".
std::vector<double> parseRealList(std::string_view list);

}  // namespace regloc::text

#include "regloc/text.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <string>

#include "regloc/errors.hpp"

namespace regloc::text {

std::string formatDouble(double value) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parseDouble(std::string_view token) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
    throw ConfigError("not a number: '" + std::string(token) + "'");
  }
  return value;
}

long long parseInteger(std::string_view token) {
  token = trim(token);
  long long value = 0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
    throw ConfigError("not an integer: '" + std::string(token) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  if (trim(line).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

Point2 parsePoint(std::string_view token) {
  const auto parts = split(token, ',');
  if (parts.size() != 2) throw ConfigError("expected a point `x,y`, got '" + std::string(token) + "'");
  return {parseDouble(parts[0]), parseDouble(parts[1])};
}

std::vector<Point2> parsePointList(std::string_view list) {
  std::vector<Point2> out;
  std::size_t i = 0;
  while (i < list.size()) {
    while (i < list.size() && std::isspace(static_cast<unsigned char>(list[i]))) ++i;
    std::size_t j = i;
    while (j < list.size() && !std::isspace(static_cast<unsigned char>(list[j]))) ++j;
    if (j > i) out.push_back(parsePoint(list.substr(i, j - i)));
    i = j;
  }
  return out;
}

std::string formatPointList(const std::vector<Point2>& points) {
  std::string out;
  for (const Point2& p : points) {
    if (!out.empty()) out += ' ';
    out += formatDouble(p.x);
    out += ',';
    out += formatDouble(p.y);
  }
  return out;
}

std::vector<double> parseRealList(std::string_view list) {
  std::vector<double> out;
  for (std::string_view field : split(list, ',')) {
    if (field.empty()) throw ConfigError("empty entry in list '" + std::string(list) + "'");
    out.push_back(parseDouble(field));
  }
  return out;
}

}  // namespace regloc::text

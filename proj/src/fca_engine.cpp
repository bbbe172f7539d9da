#include "soccerseq/fca_engine.hpp"

#include <charconv>
#include <iomanip>
#include <sstream>

namespace soccerseq::fca {

namespace {

std::vector<std::string_view> split_commas(std::string_view text) {
  std::vector<std::string_view> parts;
  while (true) {
    const auto comma = text.find(',');
    auto part = text.substr(0, comma);
    while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
    while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
    parts.push_back(part);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return parts;
}

}  // namespace

RuleVector parse_rules(std::string_view text) {
  RuleVector rules;
  for (auto part : split_commas(text)) {
    int value = 0;
    auto [end, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
    if (part.empty() || ec != std::errc{} || end != part.data() + part.size())
      throw std::invalid_argument("bad rule number '" + std::string(part) + "'");
    rules.emplace_back(value);
  }
  return rules;
}

FuzzyState<double> parse_state(std::string_view text) {
  std::vector<double> values;
  for (auto part : split_commas(text)) {
    std::string s(part);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (s.empty() || used != s.size()) throw std::invalid_argument("bad state value '" + s + "'");
    values.push_back(v);
  }
  FuzzyState<double> state = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  check_state(state);
  return state;
}

std::string format_rules(const RuleVector& rules) {
  std::string out;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(rules[i].number());
  }
  return out;
}

std::string format_state(const FuzzyState<double>& state, int precision) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(precision);
  for (Eigen::Index i = 0; i < state.size(); ++i) {
    if (i) out << ',';
    out << state(i);
  }
  return out.str();
}

}  // namespace soccerseq::fca

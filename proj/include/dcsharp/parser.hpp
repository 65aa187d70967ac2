#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dcsharp/syntax.hpp"

namespace dcsharp {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, std::vector<std::string> expected, const std::string& found);
  int line() const { return line_; }
  int column() const { return column_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  int line_;
  int column_;
  std::vector<std::string> expected_;
};

struct Observation {
  Term rv;
  Term value;
};
using Evidence = std::vector<Observation>;

Program parse_program(std::string_view text);
// A comma-joined body conjunction, optionally terminated by '.'.
std::vector<BodyLiteral> parse_query(std::string_view text);
// One ground `term ~= value.` per observation.
Evidence parse_evidence(std::string_view text);
Term parse_term(std::string_view text);

}  // namespace dcsharp

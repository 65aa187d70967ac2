#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dcsharp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CycleError : public Error {
 public:
  explicit CycleError(std::vector<std::string> witness);
  const std::vector<std::string>& witness() const { return witness_; }

 private:
  std::vector<std::string> witness_;
};

}  // namespace dcsharp

// chstokes: error types shared across the library.
//
// ValidationError -> CLI exit code 2 (bad config / CLI input)
// BlowUpError     -> CLI exit code 3 (solution left the finite regime)
// ContractError   -> programming error (broken caller contract)
#pragma once

#include <stdexcept>
#include <string>

namespace chst {

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

class BlowUpError : public std::runtime_error {
 public:
  explicit BlowUpError(const std::string& what) : std::runtime_error(what) {}
};

class ContractError : public std::logic_error {
 public:
  explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace chst

#define CHST_REQUIRE(cond, msg)                                         \
  do {                                                                  \
    if (!(cond))                                                        \
      throw ::chst::ContractError(std::string("requirement failed (") + \
                                  #cond + "): " + (msg));               \
  } while (0)

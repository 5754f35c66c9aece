#pragma once

#include <stdexcept>
#include <string>

namespace ofsulr {

// Error taxonomy maps onto the CLI exit codes:
//   ConfigError -> 1 (usage / bad configuration)
//   DataError   -> 2 (unreadable or malformed data)
//   NumericError-> 3 (numerical failure: non-convergence, non-finite input)
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class DataError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace ofsulr

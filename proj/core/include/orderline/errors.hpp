#pragma once

#include <stdexcept>
#include <string>

namespace orderline {

// Base for every recoverable error raised by the library. Programming errors
// (violated preconditions) use std::logic_error instead.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace orderline

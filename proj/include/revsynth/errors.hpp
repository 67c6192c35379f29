#pragma once

#include <stdexcept>
#include <string>

namespace revsynth {

// Bad user input: missing files, malformed records, unknown app ids.
class data_error : public std::runtime_error {
public:
    explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

// Numeric breakdown: NaN loss, non-finite inputs to numeric kernels.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace revsynth

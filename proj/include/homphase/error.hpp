#pragma once

#include <stdexcept>
#include <string>

namespace homphase {

// Bad or inconsistent user input (files, grids, parameters).
class InputError : public std::invalid_argument
{
public:
    explicit InputError(const std::string &what) : std::invalid_argument(what) {}
};

// The numbers themselves failed: non-finite values, degenerate data, etc.
class NumericalError : public std::runtime_error
{
public:
    explicit NumericalError(const std::string &what) : std::runtime_error(what) {}
};

} // namespace homphase

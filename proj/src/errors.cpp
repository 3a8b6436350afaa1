#include "apguard/errors.hpp"

namespace apguard {

ParseError::ParseError(std::size_t row, const std::string& what)
    : Error("row " + std::to_string(row) + ": " + what), row_(row) {}

}  // namespace apguard

#ifndef MRRHOM_ERRORS_HPP
#define MRRHOM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mrrhom
{

// Argument outside the mathematical domain of an operation (bad τ, mismatched
// photon numbers, non-square matrix, ...).
class DomainError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

// A linear system that should be solvable was numerically singular.
class SolverError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Feedback block of a star product could not be inverted.
class CompositionError : public std::runtime_error
{
public:
    CompositionError(const std::string& what, double condition_number)
        : std::runtime_error(what), condition_number_(condition_number)
    {
    }

    double condition_number() const noexcept { return condition_number_; }

private:
    double condition_number_;
};

} // namespace mrrhom

#endif // MRRHOM_ERRORS_HPP

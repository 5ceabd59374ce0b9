#ifndef CGUR_ERRORS_HPP
#define CGUR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cgur
{

/// Base class for every failure raised by the library.
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Iterative kernel ran out of budget before meeting its tolerance.
class NonConvergence : public Error
{
  public:
    using Error::Error;
};

class InvalidBracket : public Error
{
  public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error
{
  public:
    using Error::Error;
};

class Divergent : public Error
{
  public:
    using Error::Error;
};

class TailBudgetExceeded : public Error
{
  public:
    using Error::Error;
};

class WidthMismatch : public Error
{
  public:
    using Error::Error;
};

/// Malformed state descriptor or run configuration.
class ParseError : public Error
{
  public:
    using Error::Error;
};

} // namespace cgur

#endif // CGUR_ERRORS_HPP
